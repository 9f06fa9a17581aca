"""Configuration-search drivers over a profiling environment.

Three exploration strategies share the same machinery:

* ``full_search`` profiles every grid configuration briefly and predicts
  from per-configuration measurements.
* ``partial_search`` stabilizes the noise estimate on two extreme-batch
  anchor runs, profiles iteration time on the four grid corners only, and
  predicts everything else from the fitted model.
* ``online_scaling_search`` samples batch sizes and worker counts, measures
  iteration time per sampled pair, predicts the statistical side from the
  anchors, takes the knee of each per-batch worker sweep, and keeps the
  knee with the smallest cost-time product.

``no_search`` skips profiling entirely and reuses a stored model.

Every run on a configuration is recorded with its iteration count, restore
overhead, and mean measured iteration time; the reported search overhead is
exactly the sum of ``restore + iterations * mean_time`` over those records,
priced at each record's own cluster size.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np

from .config import (
    JobConfig,
    PricingModel,
    SearchBounds,
    VMShape,
    mini_batch,
    run_cost_usd,
)
from .errors import (
    CapabilityMissingError,
    ConfigurationError,
    DegenerateGradientError,
    ModelNotFoundError,
    ModelOutOfDomainError,
    SearchFailedError,
)
from .noise import EwmaConfig, NoiseTracker, compute_raw_noise
from .perfmodel import (
    PerfModel,
    StatFit,
    average_over_workers,
    fit_epochs_vs_noise,
    fit_iteration_time_best_effort,
    fit_noise_vs_batch,
    predict,
)
from .policy import Constraints, Objective, Recommendation, select
from .tradeoff import TradeoffCurve, TradeoffPoint, kneedle_knee

SEARCH_MODES = ("full", "partial", "scaling", "none")


@dataclass(frozen=True)
class GridSampling:
    """Exhaustive deterministic sampling over the valid grid."""

    kind: str = "grid"


@dataclass(frozen=True)
class RandomSampling:
    """Seeded uniform sampling of batch sizes and worker counts."""

    seed: int
    bspace: int = 4
    kspace: int = 4
    kind: str = "random"

    def __post_init__(self) -> None:
        if self.bspace < 1 or self.kspace < 1:
            raise ConfigurationError("bspace and kspace must be >= 1")


@dataclass(frozen=True)
class SearchParams:
    mode: str = "partial"
    profile_iters: int = 20
    sampling: GridSampling | RandomSampling = field(default_factory=GridSampling)
    ewma: EwmaConfig = field(default_factory=EwmaConfig)
    max_stabilize_iters: int = 50_000

    def __post_init__(self) -> None:
        if self.mode not in SEARCH_MODES:
            raise ConfigurationError(
                f"mode must be one of {SEARCH_MODES}, got {self.mode!r}"
            )
        if self.profile_iters < 1:
            raise ConfigurationError("profile_iters must be >= 1")
        if self.max_stabilize_iters < 1:
            raise ConfigurationError("max_stabilize_iters must be >= 1")


class ProfilingEnvironment(Protocol):
    """What a search needs from the system under test.

    ``epochs_to_target`` is an optional capability: trace-replay
    environments may not know it, in which case only ``no_search`` applies.
    """

    def profile(
        self, workers: int, global_batch: int, iters: int, start_iteration: int = 0
    ) -> list: ...

    def restore_overhead_s(self, workers: int, global_batch: int) -> float: ...

    def dataset_size(self) -> int: ...

    def pricing(self) -> PricingModel: ...

    def shape(self) -> VMShape: ...


@dataclass(frozen=True)
class Exploration:
    """One run (or refusal) on a configuration during the search."""

    workers: int
    global_batch: int
    kind: str  # "anchor", "profile", or "skipped"
    iterations: int
    mean_iteration_time_s: float
    restore_s: float

    def elapsed_s(self) -> float:
        return self.restore_s + self.iterations * self.mean_iteration_time_s


@dataclass(frozen=True)
class SearchOutcome:
    mode: str
    chosen: JobConfig | None
    model: PerfModel
    explored: tuple[Exploration, ...]
    overhead_time_s: float
    overhead_cost_usd: float
    tradeoff_points: tuple[TradeoffPoint, ...]
    recommendation: Recommendation | None


def _require_epochs_capability(env) -> None:
    if not callable(getattr(env, "epochs_to_target", None)):
        raise CapabilityMissingError(
            "environment cannot report epochs-to-target; "
            "only no_search works without it"
        )


def _env_fingerprint(env) -> str:
    fn = getattr(env, "fingerprint", None)
    return fn() if callable(fn) else "unknown"


def _anchor_configs(valid: list[tuple[int, int]]) -> tuple[JobConfig, JobConfig]:
    """Extreme-batch anchor configs, sharing the smallest worker count when possible."""
    bs = sorted({b for _, b in valid})
    b_lo, b_hi = bs[0], bs[-1]
    ks_lo = sorted(k for k, b in valid if b == b_lo)
    ks_hi = sorted(k for k, b in valid if b == b_hi)
    common = sorted(set(ks_lo) & set(ks_hi))
    if common:
        return JobConfig(common[0], b_lo), JobConfig(common[0], b_hi)
    return JobConfig(ks_lo[0], b_lo), JobConfig(ks_hi[0], b_hi)


def _corner_configs(valid: list[tuple[int, int]]) -> list[JobConfig]:
    """Unique timing-profile corners: extreme workers at each extreme batch."""
    bs = sorted({b for _, b in valid})
    b_lo, b_hi = bs[0], bs[-1]
    ks_lo = sorted(k for k, b in valid if b == b_lo)
    ks_hi = sorted(k for k, b in valid if b == b_hi)
    corners = [
        (ks_lo[0], b_lo),
        (ks_hi[0], b_hi),
        (ks_lo[-1], b_lo),
        (ks_hi[-1], b_hi),
    ]
    out: list[JobConfig] = []
    for k, b in corners:
        cfg = JobConfig(k, b)
        if cfg not in out:
            out.append(cfg)
    return out


class _Session:
    """Tracks the global iteration cursor across exploration runs."""

    def __init__(self, env, params: SearchParams) -> None:
        self.env = env
        self.params = params
        self.cursor = 0

    def run_profile(self, config: JobConfig) -> tuple[Exploration, float, float]:
        """Short profiling pass: (record, mean normalized noise, mean tau)."""
        iters = self.params.profile_iters
        samples = self.env.profile(
            config.workers, config.global_batch, iters, self.cursor
        )
        self.cursor += len(samples)
        noises = []
        for s in samples:
            try:
                noises.append(compute_raw_noise(s) / config.workers)
            except DegenerateGradientError:
                continue
        mean_noise = sum(noises) / len(noises) if noises else 0.0
        mean_tau = sum(s.iteration_time_s for s in samples) / len(samples)
        record = Exploration(
            workers=config.workers,
            global_batch=config.global_batch,
            kind="profile",
            iterations=len(samples),
            mean_iteration_time_s=mean_tau,
            restore_s=self.env.restore_overhead_s(
                config.workers, config.global_batch
            ),
        )
        return record, mean_noise, mean_tau

    def run_anchor(self, config: JobConfig) -> tuple[Exploration, float, float]:
        """Run until the noise estimate stabilizes: (record, noise, mean tau)."""
        tracker = NoiseTracker(config.workers, self.params.ewma)
        chunk_size = self.params.ewma.stability_window
        consumed = 0
        total_time = 0.0
        noise = None
        while consumed < self.params.max_stabilize_iters:
            chunk = min(chunk_size, self.params.max_stabilize_iters - consumed)
            samples = self.env.profile(
                config.workers, config.global_batch, chunk, self.cursor
            )
            used = 0
            for s in samples:
                used += 1
                total_time += s.iteration_time_s
                try:
                    est = tracker.update(s)
                except DegenerateGradientError:
                    continue
                if est.stabilized:
                    noise = est.normalized
                    break
            self.cursor += used
            consumed += used
            if noise is not None:
                break
        if noise is None:
            raise SearchFailedError(
                f"noise did not stabilize within {self.params.max_stabilize_iters} "
                f"iterations at K={config.workers}, B={config.global_batch}"
            )
        mean_tau = total_time / consumed
        record = Exploration(
            workers=config.workers,
            global_batch=config.global_batch,
            kind="anchor",
            iterations=consumed,
            mean_iteration_time_s=mean_tau,
            restore_s=self.env.restore_overhead_s(
                config.workers, config.global_batch
            ),
        )
        return record, noise, mean_tau


def _overheads(
    explored: list[Exploration], pricing: PricingModel, shape: VMShape
) -> tuple[float, float]:
    total_t = 0.0
    total_c = 0.0
    for e in explored:
        if e.kind == "skipped":
            continue
        dt = e.elapsed_s()
        total_t += dt
        total_c += run_cost_usd(pricing, shape, e.workers, dt)
    return total_t, total_c


def _epoch_anchor_fit(
    gamma_lo: float, e_lo: float, gamma_hi: float, e_hi: float
) -> tuple[float, float]:
    if gamma_lo == gamma_hi:
        # Flat noise curve: epochs cannot depend on it, pin the mean.
        return (e_lo + e_hi) / 2.0, 0.0
    return fit_epochs_vs_noise([(gamma_lo, e_lo), (gamma_hi, e_hi)])


def full_search(
    env,
    bounds: SearchBounds,
    params: SearchParams,
    objective: Objective,
    *,
    pricing: PricingModel | None = None,
    shape: VMShape | None = None,
    constraints: Constraints | None = None,
) -> SearchOutcome:
    """Profile every grid configuration and select from measured predictions.

    The job first trains on the initial (smallest-workers, smallest-batch)
    configuration until the noise estimate stabilizes; that cold-start run
    is productive training and is not charged to the exploration ledger.
    Every grid pair is then profiled for ``profile_iters`` iterations —
    pairs that violate divisibility or that the environment refuses are
    recorded as skipped.
    """
    pricing = pricing if pricing is not None else env.pricing()
    shape = shape if shape is not None else env.shape()
    _require_epochs_capability(env)
    combos = bounds.grid()
    valid = [(k, b) for k, b in combos if b % k == 0]
    if not valid:
        raise SearchFailedError("bounds contain no valid (workers, batch) pair")
    anchor_lo, _ = _anchor_configs(valid)
    session = _Session(env, params)
    session.run_anchor(anchor_lo)

    explored: list[Exploration] = []
    measured: dict[tuple[int, int], tuple[float, float]] = {}
    for k, b in combos:
        if b % k != 0:
            explored.append(Exploration(k, b, "skipped", 0, 0.0, 0.0))
            continue
        try:
            record, mean_noise, mean_tau = session.run_profile(JobConfig(k, b))
        except ConfigurationError:
            explored.append(Exploration(k, b, "skipped", 0, 0.0, 0.0))
            continue
        explored.append(record)
        measured[(k, b)] = (mean_noise, mean_tau)
    if not measured:
        raise SearchFailedError("every candidate configuration was refused")

    stat = _stat_from_measurements(env, measured)
    parallel = fit_iteration_time_best_effort(
        [((k, b / k), tau) for (k, b), (_, tau) in sorted(measured.items())]
    )
    model = PerfModel(
        stat=stat,
        parallel=parallel,
        dataset_size=env.dataset_size(),
        fingerprint=_env_fingerprint(env),
        provenance="full_search",
    )

    points = []
    for (k, b), (noise, tau) in sorted(measured.items()):
        epochs = stat.predicted_epochs(noise)
        if noise <= 0 or epochs <= 0 or tau <= 0:
            continue
        total = epochs * model.dataset_size / b * tau
        points.append(
            TradeoffPoint(JobConfig(k, b), total, run_cost_usd(pricing, shape, k, total))
        )
    if not points:
        raise SearchFailedError("no configuration produced a usable prediction")
    rec = select(points, objective, constraints or Constraints(bounds=bounds))
    overhead_t, overhead_c = _overheads(explored, pricing, shape)
    return SearchOutcome(
        mode="full",
        chosen=rec.chosen.config if rec.chosen is not None else None,
        model=model,
        explored=tuple(explored),
        overhead_time_s=overhead_t,
        overhead_cost_usd=overhead_c,
        tradeoff_points=tuple(points),
        recommendation=rec,
    )


def _stat_from_measurements(
    env, measured: dict[tuple[int, int], tuple[float, float]]
) -> StatFit:
    """Noise curve from per-worker-count fits; epoch line from extreme-batch anchors."""
    by_k: dict[int, list[tuple[int, float]]] = defaultdict(list)
    for (k, b), (noise, _) in sorted(measured.items()):
        by_k[k].append((b, noise))
    per_k = []
    for k, pts in sorted(by_k.items()):
        if len({b for b, _ in pts}) >= 2:
            slope, intercept = fit_noise_vs_batch(pts)
            per_k.append((k, slope, intercept))
    if per_k:
        a_n, c_n = average_over_workers(per_k)
    else:
        all_pts = [(b, noise) for (_, b), (noise, _) in sorted(measured.items())]
        if len({b for b, _ in all_pts}) >= 2:
            a_n, c_n = fit_noise_vs_batch(all_pts)
        else:
            a_n, c_n = 0.0, sum(n for _, n in all_pts) / len(all_pts)

    bs = sorted({b for _, b in measured})
    b_lo, b_hi = bs[0], bs[-1]
    cfg_lo = min((k, b) for (k, b) in measured if b == b_lo)
    cfg_hi = min((k, b) for (k, b) in measured if b == b_hi)
    e_lo = env.epochs_to_target(*cfg_lo)
    gamma_lo = measured[cfg_lo][0]
    if b_lo == b_hi:
        e_base, e_slope = e_lo, 0.0
    else:
        e_hi = env.epochs_to_target(*cfg_hi)
        gamma_hi = measured[cfg_hi][0]
        e_base, e_slope = _epoch_anchor_fit(gamma_lo, e_lo, gamma_hi, e_hi)
    return StatFit(
        noise_slope=a_n,
        noise_intercept=c_n,
        epochs_base=e_base,
        epochs_slope=e_slope,
    )


def partial_search(
    env,
    bounds: SearchBounds,
    params: SearchParams,
    objective: Objective,
    *,
    pricing: PricingModel | None = None,
    shape: VMShape | None = None,
    constraints: Constraints | None = None,
) -> SearchOutcome:
    """Anchor-and-corner search: two stabilized noise runs plus four timing profiles.

    The anchors sit at the extreme batch sizes on the smallest worker count
    valid at both; iteration time is profiled only at the four grid corners.
    Every other configuration is predicted from the fitted model.
    """
    pricing = pricing if pricing is not None else env.pricing()
    shape = shape if shape is not None else env.shape()
    candidates = bounds.valid_configs()
    if not candidates:
        raise SearchFailedError("bounds contain no valid (workers, batch) pair")
    valid = [(c.workers, c.global_batch) for c in candidates]
    if len({b for _, b in valid}) < 2:
        raise SearchFailedError("partial search needs at least 2 distinct batch sizes")
    if len({k for k, _ in valid}) < 2:
        raise SearchFailedError("partial search needs at least 2 distinct worker counts")
    _require_epochs_capability(env)

    session = _Session(env, params)
    anchor_lo, anchor_hi = _anchor_configs(valid)
    rec_lo, gamma_lo, _ = session.run_anchor(anchor_lo)
    rec_hi, gamma_hi, _ = session.run_anchor(anchor_hi)
    e_lo = env.epochs_to_target(anchor_lo.workers, anchor_lo.global_batch)
    e_hi = env.epochs_to_target(anchor_hi.workers, anchor_hi.global_batch)
    a_n, c_n = fit_noise_vs_batch(
        [(anchor_lo.global_batch, gamma_lo), (anchor_hi.global_batch, gamma_hi)]
    )
    e_base, e_slope = _epoch_anchor_fit(gamma_lo, e_lo, gamma_hi, e_hi)

    explored: list[Exploration] = [rec_lo, rec_hi]
    timing = []
    for config in _corner_configs(valid):
        record, _, mean_tau = session.run_profile(config)
        explored.append(record)
        timing.append(((config.workers, float(mini_batch(config))), mean_tau))
    parallel = fit_iteration_time_best_effort(timing)

    model = PerfModel(
        stat=StatFit(a_n, c_n, e_base, e_slope),
        parallel=parallel,
        dataset_size=env.dataset_size(),
        fingerprint=_env_fingerprint(env),
        provenance="partial_search",
    )
    points = []
    for config in candidates:
        try:
            p = predict(model, config, pricing, shape)
        except ModelOutOfDomainError:
            continue
        points.append(TradeoffPoint(config, p.total_time_s, p.cost_usd))
    if not points:
        raise SearchFailedError("no configuration produced a usable prediction")
    rec = select(points, objective, constraints or Constraints(bounds=bounds))
    overhead_t, overhead_c = _overheads(explored, pricing, shape)
    return SearchOutcome(
        mode="partial",
        chosen=rec.chosen.config if rec.chosen is not None else None,
        model=model,
        explored=tuple(explored),
        overhead_time_s=overhead_t,
        overhead_cost_usd=overhead_c,
        tradeoff_points=tuple(points),
        recommendation=rec,
    )


def _sampled_configs(
    valid: list[tuple[int, int]], sampling: GridSampling | RandomSampling
) -> dict[int, list[int]]:
    """Batch size -> sorted worker counts to measure."""
    by_b: dict[int, list[int]] = defaultdict(list)
    for k, b in valid:
        by_b[b].append(k)
    if isinstance(sampling, GridSampling):
        return {b: sorted(ks) for b, ks in sorted(by_b.items())}
    rng = np.random.default_rng(sampling.seed)
    bs = sorted(by_b)
    drawn_bs = {bs[i] for i in rng.integers(0, len(bs), size=sampling.bspace)}
    out: dict[int, list[int]] = {}
    for b in sorted(drawn_bs):
        ks = sorted(by_b[b])
        drawn_ks = {ks[i] for i in rng.integers(0, len(ks), size=sampling.kspace)}
        out[b] = sorted(drawn_ks)
    return out


def online_scaling_search(
    env,
    bounds: SearchBounds,
    params: SearchParams,
    *,
    pricing: PricingModel | None = None,
    shape: VMShape | None = None,
) -> SearchOutcome:
    """Knee-of-each-batch search with measured iteration times.

    After the two anchor runs fix the statistical fits, every sampled
    (batch, workers) pair gets a short timing profile; its run time is the
    measured iteration time times the predicted iteration count.  Each
    batch size contributes the knee of its worker sweep, and the knee with
    the smallest cost-time product wins.
    """
    pricing = pricing if pricing is not None else env.pricing()
    shape = shape if shape is not None else env.shape()
    candidates = bounds.valid_configs()
    if not candidates:
        raise SearchFailedError("bounds contain no valid (workers, batch) pair")
    valid = [(c.workers, c.global_batch) for c in candidates]
    if len({b for _, b in valid}) < 2:
        raise SearchFailedError("scaling search needs at least 2 distinct batch sizes")
    _require_epochs_capability(env)

    session = _Session(env, params)
    anchor_lo, anchor_hi = _anchor_configs(valid)
    rec_lo, gamma_lo, _ = session.run_anchor(anchor_lo)
    rec_hi, gamma_hi, _ = session.run_anchor(anchor_hi)
    e_lo = env.epochs_to_target(anchor_lo.workers, anchor_lo.global_batch)
    e_hi = env.epochs_to_target(anchor_hi.workers, anchor_hi.global_batch)
    a_n, c_n = fit_noise_vs_batch(
        [(anchor_lo.global_batch, gamma_lo), (anchor_hi.global_batch, gamma_hi)]
    )
    e_base, e_slope = _epoch_anchor_fit(gamma_lo, e_lo, gamma_hi, e_hi)
    stat = StatFit(a_n, c_n, e_base, e_slope)

    explored: list[Exploration] = [rec_lo, rec_hi]
    timing = []
    all_points: list[TradeoffPoint] = []
    knees: list[TradeoffPoint] = []
    dataset = env.dataset_size()
    for b, ks in _sampled_configs(valid, params.sampling).items():
        batch_points = []
        for k in ks:
            config = JobConfig(k, b)
            try:
                record, _, mean_tau = session.run_profile(config)
            except ConfigurationError:
                explored.append(Exploration(k, b, "skipped", 0, 0.0, 0.0))
                continue
            explored.append(record)
            timing.append(((k, float(mini_batch(config))), mean_tau))
            noise = stat.predicted_noise(b)
            epochs = stat.predicted_epochs(noise)
            if noise <= 0 or epochs <= 0 or mean_tau <= 0:
                continue
            est_time = epochs * dataset / b * mean_tau
            batch_points.append(
                TradeoffPoint(
                    config, est_time, run_cost_usd(pricing, shape, k, est_time)
                )
            )
        if not batch_points:
            continue
        all_points.extend(batch_points)
        knees.append(kneedle_knee(TradeoffCurve.build(batch_points, fixed_batch=b)).point)
    if not knees:
        raise SearchFailedError("every sampled batch size was skipped")
    best = min(
        knees,
        key=lambda p: (
            p.time_s * p.cost_usd,
            p.time_s,
            p.cost_usd,
            p.config.workers,
            p.config.global_batch,
        ),
    )

    model = PerfModel(
        stat=stat,
        parallel=fit_iteration_time_best_effort(timing),
        dataset_size=dataset,
        fingerprint=_env_fingerprint(env),
        provenance="partial_search",
    )
    overhead_t, overhead_c = _overheads(explored, pricing, shape)
    return SearchOutcome(
        mode="scaling",
        chosen=best.config,
        model=model,
        explored=tuple(explored),
        overhead_time_s=overhead_t,
        overhead_cost_usd=overhead_c,
        tradeoff_points=tuple(all_points),
        recommendation=None,
    )


def no_search(
    store,
    fingerprint: str,
    *,
    dataset_size: int | None = None,
    allow_universal: bool = True,
) -> PerfModel:
    """Reuse a stored model, falling back to the coefficient-averaged universal one.

    An exact fingerprint hit is returned with provenance ``reused``.  On a
    miss, and only when allowed, the store's universal average stands in;
    it needs the requesting job's dataset size to scale iteration counts.
    """
    try:
        stored = store.load(fingerprint)
    except ModelNotFoundError:
        if not allow_universal:
            raise
        if dataset_size is None:
            raise ConfigurationError(
                "dataset_size is required to fall back to the universal model"
            )
        return store.universal_average(dataset_size, fingerprint=fingerprint)
    return replace(stored.model, provenance="reused")
