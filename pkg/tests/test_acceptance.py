"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line with its runtime; the lines are repeated in
the "acceptance criteria" section of the pytest terminal summary.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from surrogate_ic import cli
from surrogate_ic.cluster import canonical_labels
from surrogate_ic.continuation import ContinuationSchedule, continuation_solve, snap_pattern
from surrogate_ic.datasets import TOY_SEED, load_faithful_subset, make_regression_toy
from surrogate_ic.estimators import SurrogateFusionClustering
from surrogate_ic.io import write_json, write_path_csv
from surrogate_ic.models import GaussMeansData, LinRegData
from surrogate_ic.objective import Mode, PenaltySpec, SurrogateObjective
from surrogate_ic.oracle import exhaustive_partition_ic, exhaustive_subset_ic
from surrogate_ic.rootfind import DifferentiableTarget, lagrange_step, solve_root
from surrogate_ic.smoothers import Family, Smoother

FAMILIES = list(Family)
FUSION_SEED = 7


def _bisect(f, lo, hi, tol=1e-15):
    flo = f(lo)
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _central(f, x, h):
    """Five-point central difference of ``f`` at ``x``."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _rel(a, b, floor):
    return abs(a - b) / max(abs(b), floor)


# ------------------------------------------------------------------ shared runs


def _toy_runs():
    x, y = make_regression_toy(seed=TOY_SEED)
    data = LinRegData(np.column_stack([np.ones(x.size), x]), y, intercept=True)
    scale = data.coef_scale(data.default_penalized())
    sched = ContinuationSchedule.for_scale(scale, k0=20 / scale)
    penalty = PenaltySpec(Mode.ZERO, Family.SECH, 2.0)
    snap = 1e-4 * scale
    seeds = {"ols": data.refit(np.ones(2, bool)), "zero": np.zeros(2)}
    paths = {name: continuation_solve(data, penalty, sched, s, snap) for name, s in seeds.items()}
    return data, sched, paths


def _fusion_instances(seed=FUSION_SEED, count=25):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(5, 9))
        m = int(rng.integers(1, n))
        gap = 6.0 + rng.uniform(0.0, 2.0)
        out.append(np.concatenate([rng.normal(0.0, 1.0, m), rng.normal(gap, 1.0, n - m)]))
    return out


def _fusion_runs():
    runs = []
    for y in _fusion_instances():
        data = GaussMeansData(y)
        c = math.log(data.n)
        sched = ContinuationSchedule.for_scale(data.scale)
        path = continuation_solve(data, PenaltySpec(Mode.FUSION, Family.SECH, c), sched, y, 1e-4 * data.scale)
        runs.append((data, c, sched, path, exhaustive_partition_ic(data, c)))
    return runs


@pytest.fixture(scope="module")
def toy_runs():
    return _toy_runs()


@pytest.fixture(scope="module")
def fusion_runs():
    t0 = time.perf_counter()
    runs = _fusion_runs()
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def faithful_fit():
    X, _ = load_faithful_subset()
    t0 = time.perf_counter()
    est = SurrogateFusionClustering().fit(X)
    return est, time.perf_counter() - t0


# ------------------------------------------------------------------ criteria


def test_criterion_1_smoother_convergence(criterion):
    with criterion("1 smoother convergence suite") as rep:
        grid = np.linspace(-5.0, 5.0, 1000)
        pos = grid[grid >= 0]
        for fam in FAMILIES:
            for k in (0.5, 1.0, 10.0, 200.0, 1000.0):
                s = Smoother(fam, k)
                assert s.value(0.0) == 1.0
                assert np.all(s.value(np.array([0.0])) == 1.0)
                assert np.array_equal(s.value(grid), s.value(-grid)), "not symmetric"
                vp = s.value(pos)
                assert np.all(np.diff(vp) <= 0), "not non-increasing in |x|"
            for k in (200.0, 500.0, 1e4):
                far = np.concatenate([np.linspace(0.1, 50.0, 1000), -np.linspace(0.1, 50.0, 1000)])
                assert np.all(Smoother(fam, k).value(far) < 1e-4)
    assert rep.elapsed < 1.0


def _smoother_checks(rng, draws):
    worst1 = worst2 = 0.0
    for _ in range(draws):
        fam = FAMILIES[rng.integers(len(FAMILIES))]
        k = float(np.exp(rng.uniform(np.log(0.1), np.log(500.0))))
        x = float(rng.uniform(-4.0, 4.0)) / k
        s = Smoother(fam, k)
        h = 1e-4 / k
        fd1 = _central(s.value, x, h)
        fd2 = _central(s.deriv1, x, h)
        worst1 = max(worst1, _rel(s.deriv1(x), fd1, 1e-6 * k))
        worst2 = max(worst2, _rel(s.deriv2(x), fd2, 1e-6 * k * k))
    return worst1, worst2


def _objective_checks(rng, mode, draws):
    worst_g = worst_h = 0.0
    for _ in range(draws):
        fam = FAMILIES[rng.integers(len(FAMILIES))]
        if mode is Mode.ZERO:
            n, p = 20, 4
            X = np.column_stack([np.ones(n), rng.normal(size=(n, p - 1))])
            y = X @ rng.normal(size=p) + rng.normal(size=n)
            model = LinRegData(X, y, intercept=True)
            theta = rng.normal(scale=0.5, size=p)
        else:
            n = int(rng.integers(3, 9))
            model = GaussMeansData(rng.normal(scale=2.0, size=n))
            theta = rng.normal(scale=2.0, size=n)
        k = float(np.exp(rng.uniform(np.log(0.1), np.log(50.0))))
        obj = SurrogateObjective(model, PenaltySpec(mode, fam, float(rng.uniform(1.0, 4.0))), k)
        j = int(rng.integers(model.q))
        h = 1e-3 / max(k, 1.0)

        def along(t, fn):
            moved = theta.copy()
            moved[j] = t
            return fn(moved)

        fd_g = _central(lambda t: along(t, obj.value), theta[j], h)
        fd_h = _central(lambda t: along(t, lambda th: obj.grad(th, j)), theta[j], h)
        g, hd = obj.grad(theta, j), obj.hess_diag(theta, j)
        assert g == pytest.approx(obj.gradient(theta)[j], rel=1e-12, abs=1e-12)
        assert hd == pytest.approx(obj.hess_diagonal(theta)[j], rel=1e-12, abs=1e-12)
        worst_g = max(worst_g, _rel(g, fd_g, 1e-2))
        worst_h = max(worst_h, _rel(hd, fd_h, 1e-2))
    return worst_g, worst_h


def test_criterion_2_derivatives_match_finite_differences(criterion):
    rng = np.random.default_rng(12345)
    with criterion("2 derivative correctness") as rep:
        d1, d2 = _smoother_checks(rng, 300)
        zg, zh = _objective_checks(rng, Mode.ZERO, 200)
        fg, fh = _objective_checks(rng, Mode.FUSION, 200)
        rep.detail = (
            f"smoother {d1:.1e}/{d2:.1e}, zero {zg:.1e}/{zh:.1e}, fusion {fg:.1e}/{fh:.1e}"
        )
        assert d1 < 1e-5 and zg < 1e-5 and fg < 1e-5
        assert d2 < 1e-4 and zh < 1e-4 and fh < 1e-4
    assert rep.elapsed < 5.0


def test_criterion_3_lagrange_solver(criterion):
    rng = np.random.default_rng(2024)
    with criterion("3 Lagrange solver") as rep:
        for _ in range(50):
            a, b, c, d, e = rng.uniform(-2, 2, size=5)

            def func(x, a=a, b=b, c=c, d=d, e=e):
                return (
                    a * math.sin(b * x) + c * x**3 + d * x + e,
                    a * b * math.cos(b * x) + 3 * c * x**2 + d,
                    -a * b * b * math.sin(b * x) + 6 * c * x,
                    -a * b**3 * math.cos(b * x) + 6 * c,
                )

            x0 = float(rng.uniform(-2, 2))
            f, f1 = func(x0)[:2]
            if abs(f1) < 1e-3:
                continue
            step = lagrange_step(DifferentiableTarget(func), x0, order=1)
            assert step == pytest.approx(x0 - f / f1, rel=1e-14, abs=1e-14)

        sq = DifferentiableTarget(lambda x: (x * x - 2.0, 2.0 * x, 2.0, 0.0))
        root = _bisect(lambda x: x * x - 2.0, 1.0, 2.0)
        errs = [abs(lagrange_step(sq, 1.5, order=m) - root) for m in (1, 2, 3)]
        assert errs[0] >= errs[1] >= errs[2]

        cubic = DifferentiableTarget(lambda x: (x**3 - x - 2.0, 3 * x * x - 1.0, 6 * x, 6.0))
        rep_ = solve_root(cubic, 1.0, order=3, tol=1e-10, max_iter=25)
        assert rep_.converged and rep_.iterations <= 25 and rep_.final_residual < 1e-10
        rep.detail = f"x^2-2 errors {errs[0]:.2e} {errs[1]:.2e} {errs[2]:.2e}; cubic in {rep_.iterations} it"
    assert rep.elapsed < 1.0


def test_criterion_4_regression_optima_reachable(criterion):
    with criterion("4 regression toy: both optima reachable") as rep:
        data, sched, paths = _toy_runs()
        oracle = exhaustive_subset_ic(data, 2.0)
        rows = {tuple(bool(v) for v in s): ic for s, _, ic in oracle.table}
        null_ic, full_ic = rows[(True, False)], rows[(True, True)]
        assert 0 < full_ic - null_ic < 2
        assert sched.k_max >= 20 / data.coef_scale(data.default_penalized())
        ols, zero = paths["ols"], paths["zero"]
        assert ols.pattern.tolist() == [True, True]
        assert zero.pattern.tolist() == [True, False]
        assert abs(ols.polished_ic - full_ic) < 1e-9
        assert abs(zero.polished_ic - null_ic) < 1e-9
        rep.detail = f"margin {full_ic - null_ic:.3f}, seed {TOY_SEED}"
    assert rep.elapsed < 5.0


def test_criterion_5_fusion_matches_partition_oracle(criterion, fusion_runs):
    runs, elapsed = fusion_runs
    with criterion("5 fusion clustering vs partition oracle") as rep:
        hits = within = 0
        for data, c, _, path, oracle in runs:
            same = np.array_equal(canonical_labels(path.pattern), canonical_labels(oracle.best_labels))
            hits += same and abs(path.polished_ic - oracle.best_ic) < 1e-9
            within += path.polished_ic - oracle.best_ic <= c
        rep.detail = f"{hits}/25 oracle minima, {within}/25 within c_n, solve time {elapsed:.1f} s"
        assert hits >= 22
        assert within == 25
    assert elapsed < 60.0


def test_criterion_6_faithful_subset_clusters(criterion, faithful_fit):
    est, elapsed = faithful_fit
    with criterion("6 faithful subset clustering") as rep:
        sizes = np.bincount(est.labels_)
        big = np.flatnonzero(sizes >= 2)
        n = est.labels_.size
        covered = sizes[big].sum() / n
        rest = ~np.isin(est.labels_, big)
        rep.detail = f"groups {sorted(sizes.tolist(), reverse=True)}, coverage {covered:.3f}, split {int(est.split_flags_.sum())}, fit time {elapsed:.1f} s"
        assert big.size == 2
        assert covered >= 0.95
        assert np.all(est.split_flags_[rest])
    assert elapsed < 30.0


def test_criterion_7_stationarity_and_pattern_stability(criterion, toy_runs, fusion_runs, faithful_fit):
    with criterion("7 terminal stationarity and pattern stability") as rep:
        checked = 0
        data, sched, paths = toy_runs
        cases = [(data, PenaltySpec(Mode.ZERO, Family.SECH, 2.0), sched, p) for p in paths.values()]
        for fdata, c, fsched, path, _ in fusion_runs[0]:
            cases.append((fdata, PenaltySpec(Mode.FUSION, Family.SECH, c), fsched, path))
        est, _ = faithful_fit
        X, _ = load_faithful_subset()
        for col, path in zip(X.T, est.paths_):
            gdata = GaussMeansData(col)
            gsched = ContinuationSchedule.for_scale(gdata.scale)
            cases.append((gdata, PenaltySpec(Mode.FUSION, Family.SECH, est.ic_weight_), gsched, path))
        for model, penalty, sc, path in cases:
            term = path.terminal
            if term.converged:
                g = SurrogateObjective(model, penalty, term.k).gradient(term.theta_array)
                assert np.max(np.abs(g)) <= sc.inner_tol
                checked += 1
        stable = 0
        for _, _, _, path, _ in fusion_runs[0]:
            tail = [
                canonical_labels(snap_pattern(r.theta, Mode.FUSION, path.snap_tol)).tolist()
                for r in path.records[-3:]
            ]
            assert tail[0] == tail[1] == tail[2]
            stable += 1
        rep.detail = f"{checked}/{len(cases)} converged terminals stationary, {stable}/25 patterns stable"


def _write_suite_outputs(out):
    args = ["--mode", "select", "--data", "builtin:regression_toy", "--seeds", "ols,zero", "--k0", "100"]
    assert cli.main(args + ["--out", str(out / "suite4")]) == 0
    suite5 = out / "suite5"
    suite5.mkdir()
    runs = _fusion_runs()
    write_path_csv(suite5 / "path.csv", {f"inst{i}": r[3] for i, r in enumerate(runs)})
    write_json(
        suite5 / "summary.json",
        {
            "seed": FUSION_SEED,
            "instances": [
                {"pattern": r[3].pattern, "polished_ic": r[3].polished_ic, "oracle_ic": r[4].best_ic} for r in runs
            ],
        },
    )
    assert cli.main(["--mode", "cluster", "--data", "builtin:faithful_subset", "--out", str(out / "suite6")]) == 0


def test_criterion_8_byte_identical_reruns(criterion, tmp_path):
    with criterion("8 determinism of suites 4-6") as rep:
        a, b = tmp_path / "a", tmp_path / "b"
        _write_suite_outputs(a)
        _write_suite_outputs(b)
        n_files = 0
        for sub in ("suite4", "suite5", "suite6"):
            names = sorted(p.name for p in (a / sub).iterdir())
            assert names == sorted(p.name for p in (b / sub).iterdir())
            match, mismatch, errors = filecmp.cmpfiles(a / sub, b / sub, names, shallow=False)
            assert not mismatch and not errors
            n_files += len(match)
        rep.detail = f"{n_files} files identical"
