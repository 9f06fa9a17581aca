"""Synthetic profiling environment with known ground truth.

A simulated workload carries the true coefficients of the prediction chain
plus a noise-ramp horizon and a jitter level.  Per-iteration samples are
synthesized so that the raw noise ratio equals the ramped true value (times
multiplicative jitter) exactly: the aggregated squared norm is pinned to 1
and the per-worker squared norms carry the target mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .config import (
    JobConfig,
    PricingModel,
    SearchBounds,
    VMShape,
    mini_batch,
    run_cost_usd,
)
from .errors import ConfigurationError
from .noise import IterationSample
from .perfmodel import ParallelFit, PerfModel, Prediction, StatFit, predict
from .policy import Constraints, Objective, Recommendation, select
from .tradeoff import TradeoffPoint


@dataclass(frozen=True)
class SimWorkload:
    """Ground-truth coefficients and trace-synthesis knobs for one workload."""

    name: str
    dataset_size: int
    noise_slope: float
    noise_intercept: float
    epochs_base: float
    epochs_slope: float
    time_base_s: float
    time_per_sample_s: float
    time_per_worker_s: float
    ramp_iters: float = 500.0
    jitter: float = 0.0
    grad_dim: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dataset_size < 1:
            raise ConfigurationError("dataset_size must be >= 1")
        if self.ramp_iters < 1:
            raise ConfigurationError("ramp_iters must be >= 1")
        if self.jitter < 0:
            raise ConfigurationError("jitter must be >= 0")
        if self.grad_dim < 2:
            raise ConfigurationError("grad_dim must be >= 2")

    def true_normalized_noise(self, global_batch: int) -> float:
        return self.noise_slope * global_batch**-0.5 + self.noise_intercept

    def true_epochs(self, global_batch: int) -> float:
        return self.epochs_base + self.epochs_slope * self.true_normalized_noise(
            global_batch
        )

    def true_iteration_time(self, workers: int, mini_batch: float) -> float:
        return (
            self.time_base_s
            + self.time_per_sample_s * mini_batch
            + self.time_per_worker_s * workers
        )

    def to_perf_model(self) -> PerfModel:
        return PerfModel(
            stat=StatFit(
                noise_slope=self.noise_slope,
                noise_intercept=self.noise_intercept,
                epochs_base=self.epochs_base,
                epochs_slope=self.epochs_slope,
            ),
            parallel=ParallelFit(
                base_s=self.time_base_s,
                per_sample_s=self.time_per_sample_s,
                per_worker_s=self.time_per_worker_s,
            ),
            dataset_size=self.dataset_size,
            fingerprint=self.name,
            provenance="ground_truth",
        )


@dataclass(frozen=True)
class SimCluster:
    """VM shape, pricing, and checkpoint-restore overhead of the test cluster."""

    shape: VMShape
    pricing: PricingModel
    restore_overhead_s: float = 37.0
    per_config_restore_s: Mapping[tuple[int, int], float] | None = None

    def __post_init__(self) -> None:
        if self.restore_overhead_s < 0:
            raise ConfigurationError("restore_overhead_s must be >= 0")

    def restore_for(self, workers: int, global_batch: int) -> float:
        if self.per_config_restore_s is not None:
            key = (workers, global_batch)
            if key in self.per_config_restore_s:
                return self.per_config_restore_s[key]
        return self.restore_overhead_s


class SimEnvironment:
    """Deterministic profiling environment over a simulated workload.

    Traces are reproducible from the workload seed and the sequence of
    ``profile`` calls; every call advances one shared generator in a fixed
    draw order.
    """

    def __init__(self, workload: SimWorkload, cluster: SimCluster) -> None:
        self.workload = workload
        self.cluster = cluster
        self._rng = np.random.default_rng(workload.seed)

    def fingerprint(self) -> str:
        return self.workload.name

    def dataset_size(self) -> int:
        return self.workload.dataset_size

    def pricing(self) -> PricingModel:
        return self.cluster.pricing

    def shape(self) -> VMShape:
        return self.cluster.shape

    def restore_overhead_s(self, workers: int, global_batch: int) -> float:
        return self.cluster.restore_for(workers, global_batch)

    def epochs_to_target(self, workers: int, global_batch: int) -> float:
        JobConfig(workers, global_batch)
        return self.workload.true_epochs(global_batch)

    def profile(
        self,
        workers: int,
        global_batch: int,
        iters: int,
        start_iteration: int = 0,
    ) -> list[IterationSample]:
        """Synthesize ``iters`` per-iteration samples starting at ``start_iteration``.

        The raw noise target ramps as ``1 - exp(-t / ramp_iters)`` toward
        ``workers * true_normalized_noise(B)``; compute and sync times split
        the plane with half the base each and jitter independently.
        """
        config = JobConfig(workers, global_batch)
        if iters < 1:
            raise ConfigurationError(f"iters must be >= 1, got {iters}")
        if start_iteration < 0:
            raise ConfigurationError("start_iteration must be >= 0")
        w = self.workload
        b = mini_batch(config)
        t_idx = start_iteration + np.arange(iters, dtype=float)
        ramp = 1.0 - np.exp(-t_idx / w.ramp_iters)
        noise_jit = w.jitter * self._rng.standard_normal(iters)
        spread = self._rng.standard_normal((iters, workers)) * math.sqrt(
            2.0 / w.grad_dim
        )
        compute_jit = w.jitter * self._rng.standard_normal(iters)
        sync_jit = w.jitter * self._rng.standard_normal(iters)

        gamma = workers * w.true_normalized_noise(global_batch) * ramp
        gamma = np.clip(gamma * (1.0 + noise_jit), 0.0, None)
        # Center the per-worker spread so the Eq-style ratio stays exact.
        spread -= spread.mean(axis=1, keepdims=True)
        worker_vals = np.clip(gamma[:, None] * (1.0 + spread), 0.0, None)

        compute = np.clip(
            (w.time_base_s / 2.0 + w.time_per_sample_s * b) * (1.0 + compute_jit),
            0.0,
            None,
        )
        sync = np.clip(
            (w.time_base_s / 2.0 + w.time_per_worker_s * workers) * (1.0 + sync_jit),
            0.0,
            None,
        )

        samples = []
        for i in range(iters):
            samples.append(
                IterationSample(
                    iteration=int(t_idx[i]),
                    per_worker_grad_sqnorms=tuple(float(v) for v in worker_vals[i]),
                    aggregated_grad_sqnorm=1.0,
                    compute_time_s=float(compute[i]),
                    sync_time_s=float(sync[i]),
                )
            )
        return samples


def ground_truth(
    workload: SimWorkload, cluster: SimCluster, config: JobConfig
) -> Prediction:
    """Closed-form truth for one configuration via the shared prediction chain."""
    return predict(workload.to_perf_model(), config, cluster.pricing, cluster.shape)


def run_to_target(
    workload: SimWorkload, cluster: SimCluster, config: JobConfig
) -> tuple[float, float]:
    """(time_s, cost_usd) of running the job to target on one configuration."""
    p = ground_truth(workload, cluster, config)
    return p.total_time_s, p.cost_usd


def ground_truth_points(
    workload: SimWorkload, cluster: SimCluster, bounds: SearchBounds
) -> list[TradeoffPoint]:
    """Ground-truth tradeoff points for every valid configuration in bounds."""
    points = []
    for config in bounds.valid_configs():
        p = ground_truth(workload, cluster, config)
        points.append(
            TradeoffPoint(config=config, time_s=p.total_time_s, cost_usd=p.cost_usd)
        )
    return points


def oracle_best(
    workload: SimWorkload,
    cluster: SimCluster,
    bounds: SearchBounds,
    objective: Objective,
    constraints: Constraints | None = None,
) -> Recommendation:
    """Brute-force selection over ground-truth points."""
    return select(ground_truth_points(workload, cluster, bounds), objective, constraints)


@dataclass(frozen=True)
class EndToEnd:
    """Search overhead composed with the chosen configuration's full run."""

    overhead_time_s: float
    overhead_cost_usd: float
    run_time_s: float
    run_cost_usd: float

    @property
    def total_time_s(self) -> float:
        return self.overhead_time_s + self.run_time_s

    @property
    def total_cost_usd(self) -> float:
        return self.overhead_cost_usd + self.run_cost_usd


def compose_end_to_end(outcome, workload: SimWorkload, cluster: SimCluster) -> EndToEnd:
    """End-to-end totals for a search outcome: exploration plus remaining run."""
    if outcome.chosen is None:
        raise ConfigurationError("search outcome has no chosen configuration")
    run_time, run_cost = run_to_target(workload, cluster, outcome.chosen)
    return EndToEnd(
        overhead_time_s=outcome.overhead_time_s,
        overhead_cost_usd=outcome.overhead_cost_usd,
        run_time_s=run_time,
        run_cost_usd=run_cost,
    )


# Preset workloads.  Ramp horizons are tuned so the noise ramp reaches 98%
# of its plateau (t = ln(50)·R ≈ 3.9·R) near iteration 2000, 3000, and
# 10000 respectively; restore overheads reflect typical checkpoint-restart
# times for models of these sizes.
_PRESET_WORKLOADS: dict[str, SimWorkload] = {
    "resnet18-like": SimWorkload(
        name="resnet18-like",
        dataset_size=1_000_000,
        noise_slope=48.0,
        noise_intercept=0.1,
        epochs_base=6.0,
        epochs_slope=16.0,
        time_base_s=0.25,
        time_per_sample_s=0.012,
        time_per_worker_s=0.008,
        ramp_iters=500.0,
        jitter=0.0,
        grad_dim=10_000,
    ),
    "resnet50-like": SimWorkload(
        name="resnet50-like",
        dataset_size=1_300_000,
        noise_slope=60.0,
        noise_intercept=0.2,
        epochs_base=8.0,
        epochs_slope=20.0,
        time_base_s=0.4,
        time_per_sample_s=0.03,
        time_per_worker_s=0.012,
        ramp_iters=750.0,
        jitter=0.0,
        grad_dim=25_000,
    ),
    "transformer-like": SimWorkload(
        name="transformer-like",
        dataset_size=4_500_000,
        noise_slope=120.0,
        noise_intercept=0.5,
        epochs_base=4.0,
        epochs_slope=10.0,
        time_base_s=0.6,
        time_per_sample_s=0.05,
        time_per_worker_s=0.02,
        ramp_iters=2500.0,
        jitter=0.0,
        grad_dim=60_000,
    ),
}

_PRESET_RESTORE_S = {
    "resnet18-like": 37.0,
    "resnet50-like": 40.0,
    "transformer-like": 127.0,
}

PRESET_NAMES = tuple(_PRESET_WORKLOADS)


def preset_workload(
    name: str, seed: int = 0, jitter: float | None = None
) -> SimWorkload:
    """A named preset workload with the given seed and optional jitter override."""
    if name not in _PRESET_WORKLOADS:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {PRESET_NAMES}"
        )
    w = replace(_PRESET_WORKLOADS[name], seed=seed)
    if jitter is not None:
        w = replace(w, jitter=jitter)
    return w


def preset_cluster(name: str) -> SimCluster:
    """The matching 4-vCPU/16-GB flat-priced cluster for a preset workload."""
    if name not in _PRESET_RESTORE_S:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {PRESET_NAMES}"
        )
    return SimCluster(
        shape=VMShape(vcpus=4, memory_gb=16.0),
        pricing=PricingModel.flat(0.13402),
        restore_overhead_s=_PRESET_RESTORE_S[name],
    )
