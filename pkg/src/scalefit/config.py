"""Job configurations, VM shapes, cluster pricing, and search bounds.

Conventions used throughout the package: prices are $/hour, durations are
seconds, batch sizes are samples.  Seconds are converted to hours exactly
once, in :func:`run_cost_usd`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError, InfeasibleMemoryError

PRICING_MODES = ("flat_per_vm", "per_resource")


@dataclass(frozen=True)
class JobConfig:
    """One (worker count, global batch size) training configuration."""

    workers: int
    global_batch: int

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if self.global_batch < 1:
            raise ConfigurationError(
                f"global_batch must be >= 1, got {self.global_batch}"
            )
        if self.global_batch % self.workers != 0:
            raise ConfigurationError(
                f"global_batch {self.global_batch} is not divisible by "
                f"workers {self.workers}"
            )


def mini_batch(config: JobConfig) -> int:
    """Per-worker mini-batch size; exact because JobConfig enforces divisibility."""
    return config.global_batch // config.workers


@dataclass(frozen=True)
class VMShape:
    """Resources of a single worker VM."""

    vcpus: int
    memory_gb: float

    def __post_init__(self) -> None:
        if self.vcpus < 1:
            raise ConfigurationError(f"vcpus must be >= 1, got {self.vcpus}")
        if self.memory_gb <= 0:
            raise ConfigurationError(f"memory_gb must be > 0, got {self.memory_gb}")


@dataclass(frozen=True)
class PricingModel:
    """Hourly cluster pricing, either flat per VM or per allocated resource."""

    mode: str
    flat_hourly_usd: float = 0.0
    per_vcpu_hourly_usd: float = 0.0
    per_gb_hourly_usd: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in PRICING_MODES:
            raise ConfigurationError(
                f"pricing mode must be one of {PRICING_MODES}, got {self.mode!r}"
            )
        for name in ("flat_hourly_usd", "per_vcpu_hourly_usd", "per_gb_hourly_usd"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")

    @classmethod
    def flat(cls, hourly_usd: float) -> "PricingModel":
        return cls(mode="flat_per_vm", flat_hourly_usd=hourly_usd)

    @classmethod
    def per_resource(cls, vcpu_hourly_usd: float, gb_hourly_usd: float) -> "PricingModel":
        return cls(
            mode="per_resource",
            per_vcpu_hourly_usd=vcpu_hourly_usd,
            per_gb_hourly_usd=gb_hourly_usd,
        )


def hourly_cluster_price(pricing: PricingModel, shape: VMShape, workers: int) -> float:
    """Hourly price of a cluster of ``workers`` identical VMs."""
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if pricing.mode == "flat_per_vm":
        per_vm = pricing.flat_hourly_usd
    else:
        per_vm = (
            shape.vcpus * pricing.per_vcpu_hourly_usd
            + shape.memory_gb * pricing.per_gb_hourly_usd
        )
    return workers * per_vm


def run_cost_usd(
    pricing: PricingModel, shape: VMShape, workers: int, duration_s: float
) -> float:
    """Cost of running the cluster for ``duration_s`` seconds."""
    return duration_s / 3600.0 * hourly_cluster_price(pricing, shape, workers)


def max_batch_for_memory(
    shape: VMShape,
    per_sample_gb: float,
    fixed_overhead_gb: float,
    workers: int,
) -> int:
    """Largest global batch that fits in per-worker memory.

    Each worker holds ``fixed_overhead_gb`` of model state plus
    ``per_sample_gb`` for every sample of its mini-batch.  The result is
    clamped so every worker keeps at least one sample.
    """
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if per_sample_gb <= 0:
        raise ConfigurationError(f"per_sample_gb must be > 0, got {per_sample_gb}")
    if fixed_overhead_gb < 0:
        raise ConfigurationError(
            f"fixed_overhead_gb must be >= 0, got {fixed_overhead_gb}"
        )
    free_gb = shape.memory_gb - fixed_overhead_gb
    if free_gb <= 0:
        raise InfeasibleMemoryError(
            f"VM memory {shape.memory_gb} GB does not exceed the fixed "
            f"overhead {fixed_overhead_gb} GB"
        )
    per_worker = int(free_gb / per_sample_gb)
    return workers * max(1, per_worker)


@dataclass(frozen=True)
class SearchBounds:
    """Inclusive grid bounds over worker counts and global batch sizes.

    ``b_candidates`` replaces the batch range enumeration when given; worker
    counts always step from ``k_min`` by ``k_step``.  Candidate pairs that
    violate the JobConfig divisibility invariant are skipped, not rounded.
    """

    k_min: int
    k_max: int
    b_min: int
    b_max: int
    k_step: int = 1
    b_candidates: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.k_min < 1:
            raise ConfigurationError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ConfigurationError(
                f"k_max {self.k_max} must be >= k_min {self.k_min}"
            )
        if self.b_min < 1:
            raise ConfigurationError(f"b_min must be >= 1, got {self.b_min}")
        if self.b_max < self.b_min:
            raise ConfigurationError(
                f"b_max {self.b_max} must be >= b_min {self.b_min}"
            )
        if self.k_step < 1:
            raise ConfigurationError(f"k_step must be >= 1, got {self.k_step}")
        if self.b_candidates is not None:
            if len(self.b_candidates) == 0:
                raise ConfigurationError("b_candidates must not be empty")
            if any(b < 1 for b in self.b_candidates):
                raise ConfigurationError("b_candidates must all be >= 1")
            object.__setattr__(
                self, "b_candidates", tuple(sorted(set(self.b_candidates)))
            )

    def k_values(self) -> tuple[int, ...]:
        return tuple(range(self.k_min, self.k_max + 1, self.k_step))

    def b_values(self) -> tuple[int, ...]:
        if self.b_candidates is not None:
            return self.b_candidates
        return tuple(range(self.b_min, self.b_max + 1))

    def grid(self) -> list[tuple[int, int]]:
        """All (workers, global_batch) pairs of the grid, valid or not."""
        return [(k, b) for k in self.k_values() for b in self.b_values()]

    def valid_configs(self) -> list[JobConfig]:
        """Grid pairs that satisfy the JobConfig invariants, in grid order."""
        return [
            JobConfig(k, b) for k, b in self.grid() if b % k == 0
        ]

    def contains(self, config: JobConfig) -> bool:
        return (
            config.workers in self.k_values()
            and config.global_batch in self.b_values()
        )
