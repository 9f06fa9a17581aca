"""Acceptance suite: eight numbered criteria, one PASS/FAIL line each.

Each test prints ``criterion N (<name>): PASS`` or ``FAIL`` before
asserting, so ``pytest tests/test_acceptance.py -v -s`` gives a one-line
verdict per criterion.  The criteria pin the package's headline behavior:
model-fit closure against the simulator oracle, prediction accuracy under
measurement noise, policy soundness, knee invariance, noise-saturation
statistics, overhead accounting, universal-model reuse error, and
determinism.
"""

import json
from dataclasses import replace

import numpy as np

from scalefit.cli import main as cli_main
from scalefit.config import JobConfig, SearchBounds, run_cost_usd
from scalefit.noise import IterationSample, NoiseTracker
from scalefit.perfmodel import (
    ParallelFit,
    PerfModel,
    StatFit,
    average_over_workers,
    fit_epochs_vs_noise,
    fit_iteration_time,
    fit_noise_vs_batch,
    predict,
)
from scalefit.policy import Objective, select
from scalefit.search import SearchParams, partial_search
from scalefit.simulator import (
    SimEnvironment,
    compose_end_to_end,
    ground_truth,
    ground_truth_points,
    oracle_best,
    preset_cluster,
    preset_workload,
)
from scalefit.store import ModelStore
from scalefit.tradeoff import (
    TradeoffCurve,
    TradeoffPoint,
    kneedle_knee,
    pareto_frontier,
)

GRID = SearchBounds(
    k_min=8, k_max=20, b_min=1, b_max=2048, k_step=4,
    b_candidates=(384, 512, 768, 1024),
)


def report(number: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


def test_criterion_1_oracle_closure():
    """A model fitted from noiseless traces reproduces ground truth to 1e-6."""
    w = preset_workload("resnet18-like")
    cluster = preset_cluster("resnet18-like")
    env = SimEnvironment(w, cluster)

    corners = [(8, 384), (8, 1024), (16, 384), (16, 1024)]
    measured = {}
    start = 12_500  # deep past the noise ramp
    for k, b in corners:
        samples = env.profile(k, b, 20, start)
        start += 20
        from scalefit.noise import compute_raw_noise

        noise = sum(compute_raw_noise(s) / k for s in samples) / len(samples)
        tau = sum(s.iteration_time_s for s in samples) / len(samples)
        measured[(k, b)] = (noise, tau)

    per_k = []
    for k in (8, 16):
        pts = [(b, measured[(kk, b)][0]) for kk, b in corners if kk == k]
        per_k.append((k, *fit_noise_vs_batch(pts)))
    a_n, c_n = average_over_workers(per_k)

    anchors = [(384, w.true_epochs(384)), (1024, w.true_epochs(1024))]
    e_base, e_slope = fit_epochs_vs_noise(
        [(a_n * b ** -0.5 + c_n, e) for b, e in anchors]
    )
    parallel = fit_iteration_time(
        [((k, b / k), tau) for (k, b), (_, tau) in measured.items()]
    )
    model = PerfModel(
        stat=StatFit(a_n, c_n, e_base, e_slope),
        parallel=parallel,
        dataset_size=w.dataset_size,
        fingerprint=w.name,
        provenance="full_search",
    )

    worst = 0.0
    for config in GRID.valid_configs():
        got = predict(model, config, cluster.pricing, cluster.shape)
        want = ground_truth(w, cluster, config)
        worst = max(
            worst,
            abs(got.total_time_s / want.total_time_s - 1.0),
            abs(got.cost_usd / want.cost_usd - 1.0),
        )
    report(1, "oracle closure", worst <= 1e-6, f"worst rel err {worst:.2e}")


def test_criterion_2_partial_search_accuracy():
    """Partial search predictions stay within 10% mean |T error| at 5% jitter."""
    cluster = preset_cluster("resnet18-like")
    truth = {
        (p.config.workers, p.config.global_batch): p.time_s
        for p in ground_truth_points(
            preset_workload("resnet18-like"), cluster, GRID
        )
    }
    errors = []
    for seed in range(20):
        w = preset_workload("resnet18-like", seed=seed, jitter=0.05)
        outcome = partial_search(
            SimEnvironment(w, cluster),
            GRID,
            SearchParams(mode="partial"),
            Objective.min_cost_time(),
            pricing=cluster.pricing,
            shape=cluster.shape,
        )
        for p in outcome.tradeoff_points:
            want = truth[(p.config.workers, p.config.global_batch)]
            errors.append(abs(p.time_s / want - 1.0))
    mean_err = sum(errors) / len(errors)
    report(
        2,
        "partial-search accuracy",
        mean_err <= 0.10,
        f"mean |T err| {mean_err:.2%} over {len(errors)} predictions",
    )


def _brute_force(points, objective):
    if objective.kind == "deadline":
        feasible = [p for p in points if p.time_s <= objective.deadline_s]
        key = lambda p: (p.cost_usd, p.time_s, p.config.workers, p.config.global_batch)
    elif objective.kind == "budget":
        feasible = [p for p in points if p.cost_usd <= objective.budget_usd]
        key = lambda p: (p.time_s, p.cost_usd, p.config.workers, p.config.global_batch)
    else:  # min_cost_time
        feasible = list(points)
        key = lambda p: (
            p.time_s * p.cost_usd,
            p.cost_usd,
            p.time_s,
            p.config.workers,
            p.config.global_batch,
        )
    if not feasible:
        return None, 0
    return min(feasible, key=key), len(feasible)


def test_criterion_3_policy_soundness():
    """select() agrees with exhaustive enumeration on 100 random scenarios."""
    rng = np.random.default_rng(99)
    base = preset_workload("resnet18-like")
    cluster = preset_cluster("resnet18-like")
    all_ok = True
    infeasible_seen = 0
    for _ in range(100):
        f = rng.uniform(0.6, 1.6, size=7)
        w = replace(
            base,
            noise_slope=base.noise_slope * f[0],
            noise_intercept=base.noise_intercept * f[1],
            epochs_base=base.epochs_base * f[2],
            epochs_slope=base.epochs_slope * f[3],
            time_base_s=base.time_base_s * f[4],
            time_per_sample_s=base.time_per_sample_s * f[5],
            time_per_worker_s=base.time_per_worker_s * f[6],
        )
        points = ground_truth_points(w, cluster, GRID)
        times = sorted(p.time_s for p in points)
        costs = sorted(p.cost_usd for p in points)
        objectives = [
            Objective.deadline(float(rng.uniform(0.8 * times[0], 1.1 * times[-1]))),
            Objective.budget(float(rng.uniform(0.8 * costs[0], 1.1 * costs[-1]))),
            Objective.min_cost_time(),
            Objective.knee_point(),
        ]
        for objective in objectives:
            rec = select(points, objective)
            if objective.kind == "knee_point":
                expected = kneedle_knee(
                    TradeoffCurve.build(pareto_frontier(points))
                ).point
                all_ok &= rec.feasible and rec.chosen == expected
            else:
                expected, count = _brute_force(points, objective)
                if expected is None:
                    infeasible_seen += 1
                    all_ok &= (
                        not rec.feasible
                        and rec.chosen is None
                        and rec.feasible_count == 0
                        and rec.nearest_miss is not None
                    )
                else:
                    all_ok &= (
                        rec.feasible
                        and rec.chosen == expected
                        and rec.feasible_count == count
                    )
    report(
        3,
        "policy soundness",
        all_ok and infeasible_seen > 0,
        f"400 selections, {infeasible_seen} infeasible flagged",
    )


def _random_convex_curve(rng, n):
    times = np.cumsum(rng.uniform(1.0, 3.0, size=n)) + rng.uniform(0.5, 2.0)
    drops = np.sort(rng.uniform(0.5, 5.0, size=n - 1))[::-1]
    top = float(drops.sum() + rng.uniform(1.0, 10.0))
    costs = [top]
    for d in drops:
        costs.append(costs[-1] - float(d))
    return [
        TradeoffPoint(JobConfig(i + 1, i + 1), float(t), c)
        for i, (t, c) in enumerate(zip(times, costs))
    ]


def test_criterion_4_knee_invariance():
    """The knee survives cost rescaling and affine remapping of both axes."""
    rng = np.random.default_rng(4)
    all_ok = True
    for _ in range(100):
        points = _random_convex_curve(rng, int(rng.integers(4, 11)))
        knee = kneedle_knee(TradeoffCurve.build(points)).point.config

        scaled = [
            TradeoffPoint(p.config, p.time_s, p.cost_usd * 1000.0) for p in points
        ]
        all_ok &= kneedle_knee(TradeoffCurve.build(scaled)).point.config == knee

        a, b = float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.0, 50.0))
        c, d = float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.0, 20.0))
        mapped = [
            TradeoffPoint(p.config, a * p.time_s + b, c * p.cost_usd + d)
            for p in points
        ]
        all_ok &= kneedle_knee(TradeoffCurve.build(mapped)).point.config == knee

    for _ in range(20):
        points = _random_convex_curve(rng, 2)
        result = kneedle_knee(TradeoffCurve.build(points))
        expected = min(points, key=lambda p: p.time_s * p.cost_usd)
        all_ok &= result.point == expected
    report(4, "knee invariance", all_ok, "100 curves + 20 two-point fallbacks")


def test_criterion_5_noise_saturation():
    """IID zero-mean gradients drive the normalized noise to 1 for any K."""
    rng = np.random.default_rng(12)
    dim = 10_000
    all_ok = True
    details = []
    for workers in (2, 4, 8, 16):
        tracker = NoiseTracker(workers)
        estimate = None
        iteration = 0
        while iteration < 2_500:
            chunk = 100
            g = rng.standard_normal((chunk, workers, dim))
            per_worker = np.einsum("ikd,ikd->ik", g, g)
            mean_grad = g.mean(axis=1)
            agg = np.einsum("id,id->i", mean_grad, mean_grad)
            done = False
            for i in range(chunk):
                estimate = tracker.update(
                    IterationSample(
                        iteration=iteration,
                        per_worker_grad_sqnorms=tuple(per_worker[i]),
                        aggregated_grad_sqnorm=float(agg[i]),
                        compute_time_s=0.1,
                        sync_time_s=0.0,
                    )
                )
                iteration += 1
                if estimate.stabilized:
                    done = True
                    break
            if done:
                break
        ok = (
            estimate is not None
            and estimate.stabilized
            and abs(estimate.normalized - 1.0) <= 0.02
        )
        details.append(f"K={workers}: {estimate.normalized:.4f}")
        all_ok &= ok
    report(5, "noise saturation", all_ok, ", ".join(details))


def test_criterion_6_overhead_accounting():
    """Reported overhead equals the ledger sum; end-to-end stays near oracle."""
    w = preset_workload("resnet18-like")
    cluster = preset_cluster("resnet18-like")  # 37 s restore
    outcome = partial_search(
        SimEnvironment(w, cluster),
        GRID,
        SearchParams(mode="partial", profile_iters=20),
        Objective.min_cost_time(),
        pricing=cluster.pricing,
        shape=cluster.shape,
    )
    expected_t = 0.0
    expected_c = 0.0
    for e in outcome.explored:
        if e.kind == "skipped":
            continue
        dt = e.restore_s + e.iterations * e.mean_iteration_time_s
        expected_t += dt
        expected_c += run_cost_usd(cluster.pricing, cluster.shape, e.workers, dt)
    identity = (
        expected_t == outcome.overhead_time_s
        and expected_c == outcome.overhead_cost_usd
        and len(outcome.explored) == 6  # 2 anchors + 4 timing corners
    )
    totals = compose_end_to_end(outcome, w, cluster)
    oracle = oracle_best(w, cluster, GRID, Objective.min_cost_time())
    increase = totals.total_time_s / oracle.chosen.time_s - 1.0
    report(
        6,
        "overhead accounting",
        identity and increase <= 0.15,
        f"identity exact, end-to-end time +{increase:.2%} vs oracle",
    )


def test_criterion_7_universal_model_band(tmp_path):
    """A coefficient-averaged model serves a ±10% workload family within 12%."""
    base = preset_workload("resnet18-like")
    cluster = preset_cluster("resnet18-like")
    scalings = [(1.10, 0.96), (0.90, 1.04), (1.00, 1.00)]
    variants = []
    for i, (s, q) in enumerate(scalings):
        variants.append(
            replace(
                base,
                name=f"variant-{i}",
                epochs_base=base.epochs_base * s,
                epochs_slope=base.epochs_slope * s,
                time_base_s=base.time_base_s * q,
                time_per_sample_s=base.time_per_sample_s * q,
                time_per_worker_s=base.time_per_worker_s * q,
            )
        )
    store = ModelStore(tmp_path / "store")
    for v in variants:
        store.save(v.to_perf_model())
    universal = store.universal_average(
        base.dataset_size, fingerprint="unseen-workload"
    )
    assert universal.provenance == "universal"

    worst = 0.0
    for v in variants:
        for config in GRID.valid_configs():
            t_pred = predict(
                universal, config, cluster.pricing, cluster.shape
            ).total_time_s
            t_true = ground_truth(v, cluster, config).total_time_s
            worst = max(worst, abs(t_pred / t_true - 1.0))
    report(7, "universal model band", worst <= 0.12, f"worst T err {worst:.2%}")


def test_criterion_8_determinism(tmp_path):
    """Same-seed searches are byte-identical; the store round-trips bits."""
    scenario = {
        "seed": 5,
        "workload": {"preset": "resnet18-like", "jitter": 0.03},
        "cluster": {"pricing": {"flat_hourly_usd": 0.13402}},
        "bounds": {
            "k_min": 8, "k_max": 20, "k_step": 4,
            "b_min": 1, "b_max": 2048,
            "b_candidates": [384, 512, 768, 1024],
        },
        "search": {"mode": "partial"},
        "objective": {"kind": "min_cost_time"},
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    out1, out2 = tmp_path / "out1.json", tmp_path / "out2.json"
    code1 = cli_main(["search", "--scenario", str(path), "--out", str(out1)])
    code2 = cli_main(["search", "--scenario", str(path), "--out", str(out2)])
    identical = code1 == code2 == 0 and out1.read_bytes() == out2.read_bytes()

    model = PerfModel(
        stat=StatFit(0.1 + 0.2, 1e-308, 48.000000000000014, 2 ** -1074),
        parallel=ParallelFit(3.141592653589793, 0.1, 0.05),
        dataset_size=1_000_000,
        fingerprint="determinism-check",
        provenance="full_search",
    )
    store = ModelStore(tmp_path / "store")
    store.save(model)
    loaded = store.load("determinism-check").model
    round_trip = loaded == model
    report(
        8,
        "determinism and round-trip",
        identical and round_trip,
        "byte-identical outcomes, bit-exact store",
    )
