"""Exit criteria. Each test records a PASS/FAIL line shown in the terminal summary."""

import time

import numpy as np
import pytest

from hilbertflow.cli import main
from hilbertflow.eigen import eigen_decompose
from hilbertflow.errors import StepError
from hilbertflow.flow import FlowConfig, reduction_step
from hilbertflow.models import build_custom, build_tight_binding, full_matrix
from hilbertflow.reference import (
    TABLE1,
    TABLE1_BETA,
    TABLE1_GAMMA,
    analytic_tight_binding_spectrum,
    compare_table1,
    fixed_point_regression,
    run_table1_flows,
)

from oracles import feshbach_anchor_residual, random_frozen_case, random_symmetric, scan_bisect_nearest_root


@pytest.fixture(scope="module")
def table1_traces():
    return {mode: run_table1_flows(mode) for mode in ("frozen", "running")}


def _initial_spectrum_deviations():
    pub, analytic = {}, 0.0
    for (N, g0), rows in TABLE1.items():
        vals = eigen_decompose(full_matrix(build_tight_binding(N, TABLE1_BETA, TABLE1_GAMMA, g0))).values
        for k, (x, p) in enumerate(zip(vals[:5], rows[N][1]), start=1):
            pub[(N, g0, k)] = abs(x - p)
        exact = analytic_tight_binding_spectrum(N, TABLE1_BETA, TABLE1_GAMMA, g0)
        analytic = max(analytic, np.max(np.abs(vals - exact)))
    return pub, analytic


# The published N=20, g0=20 entry lambda_4 = 3.47 does not round the exact 3.47525;
# every other initial entry is the correctly rounded exact value.
@pytest.mark.xfail(strict=True, reason="published lambda_4 = 3.47 at N=20, g0=20 is 0.0052 from the exact 3.4752")
def test_1_initial_spectra(criterion):
    t0 = time.perf_counter()
    pub, worst_analytic = _initial_spectrum_deviations()
    elapsed = time.perf_counter() - t0
    worst_pub = max(pub.values())
    bad = [key for key, d in pub.items() if d > 0.005]
    ok = not bad and worst_analytic <= 1e-9 and elapsed < 1.0
    criterion("1 initial spectra", ok,
              f"max|published dev|={worst_pub:.4f} (cells over 0.005 as (N, g0, k): {bad}) "
              f"max|analytic dev|={worst_analytic:.1e} t={elapsed:.2f}s")
    assert not bad
    assert worst_analytic <= 1e-9
    assert elapsed < 1.0


def test_1_initial_spectra_single_published_outlier():
    t0 = time.perf_counter()
    pub, worst_analytic = _initial_spectrum_deviations()
    assert time.perf_counter() - t0 < 1.0
    assert worst_analytic <= 1e-9
    bad = {key for key, d in pub.items() if d > 0.005}
    assert bad == {(20, 20.0, 4)}
    assert pub[(20, 20.0, 4)] < 0.0053


def test_2_flow_reproduction(criterion, capsys):
    t0 = time.perf_counter()
    verdicts = [compare_table1(mode) for mode in ("frozen", "running")]
    elapsed = time.perf_counter() - t0
    strict = [v.mode for v in verdicts if v.status == "PASS"]
    fallback = [v.mode for v in verdicts if v.status == "QUALITATIVE"]
    with capsys.disabled():
        for v in verdicts:
            print(f"\n[table] mode={v.mode} status={v.status} failing cells={len(v.failed_cells)}/{len(v.cells)}")
            for c in v.failed_cells[:12]:
                print(f"  N={c.N} g0={c.g0:g} n={c.n} {c.quantity}: published {c.published} "
                      f"computed {c.computed:.4f} (tol {c.tolerance:.3f})")
    ok = bool(strict or fallback) and elapsed < 10.0
    mode_note = f"strict: {strict or 'none'}; qualitative fallback: {fallback or 'none'}"
    criterion("2 flow reproduction", ok, f"{mode_note} t={elapsed:.2f}s")
    assert strict or fallback
    assert elapsed < 10.0


def test_2_frozen_mode_cell_detail(table1_traces):
    """Frozen mode misses only the coupling cells of the (20, 20) block, by a factor of 2."""
    v = compare_table1("frozen", table1_traces["frozen"])
    failed = {(c.N, c.g0, c.n, c.quantity) for c in v.failed_cells}
    assert failed == {(20, 20.0, 10, "g"), (20, 20.0, 5, "g")}
    for c in v.failed_cells:
        assert c.computed / c.published == pytest.approx(2.0, rel=0.01)


def test_3_fixed_point_example(criterion):
    t0 = time.perf_counter()
    checks = [fixed_point_regression(N, 20.0) for N in (5, 10, 20, 50)]
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks) and elapsed < 5.0
    detail = " ".join(f"N={c.N}:{'ok' if c.passed else 'bad'}" for c in checks)
    criterion("3 fixed-point example", ok, f"{detail} t={elapsed:.2f}s")
    for c in checks:
        assert c.trace.completed
        assert c.max_rel_g_change <= 1e-8
        assert c.max_rel_ground_error <= 1e-8
        assert c.global_fixed_point
        assert c.initial_multiplicity == c.N - 1
        assert c.final_multiplicity == c.n_min - 1
    assert elapsed < 5.0


def test_4_residual_oracle(criterion, table1_traces):
    traces = [t for by_mode in table1_traces.values() for t in by_mode.values()]
    traces += [fixed_point_regression(N, 20.0).trace for N in (5, 10, 20, 50)]
    worst_ratio = 0.0
    n_steps = 0
    for t in traces:
        for s in t.steps:
            # residual_tol is 1e-8 * max(1, |lambda|, spectral radius)
            worst_ratio = max(worst_ratio, abs(s.residual) / s.residual_tol)
            n_steps += 1
    residual_ok = worst_ratio <= 1.0

    rng = np.random.default_rng(7)
    worst_dev = 0.0
    compared = skipped = 0
    while compared < 100:
        h, lam = random_frozen_case(rng)
        try:
            _, step, _ = reduction_step(h, lam, FlowConfig(n_min=2, m_track=2))
        except StepError:
            skipped += 1
            continue
        a = eigen_decompose(full_matrix(h)).ground_components
        e = step.build.elim
        f = lambda g: feshbach_anchor_residual(h.eps, h.h1, g, lam, a, 0, e)
        pole = (lam - h.eps[e]) / h.h1[e, e] if h.h1[e, e] != 0 else None
        ref = scan_bisect_nearest_root(f, h.g, pole=pole)
        dev = abs(step.g_after - ref) if ref is not None else np.inf
        worst_dev = max(worst_dev, dev)
        compared += 1
    oracle_ok = worst_dev <= 1e-6
    criterion("4 residual oracle", residual_ok and oracle_ok,
              f"{n_steps} steps, max |res|/tol={worst_ratio:.1e}; "
              f"100 random roots max dev={worst_dev:.1e} ({skipped} without real root skipped)")
    assert residual_ok
    assert oracle_ok


def test_5_eigensolver_properties(criterion):
    rng = np.random.default_rng(11)
    worst = {"orth": 0.0, "recon": 0.0, "trace": 0.0, "resid": 0.0}
    for _ in range(100):
        n = int(rng.integers(1, 51))
        m = random_symmetric(rng, n, scale=rng.uniform(0.01, 100))
        es = eigen_decompose(m)
        v, lam = es.vectors, es.values
        fro = np.linalg.norm(m)
        assert np.all(np.diff(lam) >= 0)
        worst["orth"] = max(worst["orth"], np.max(np.abs(v.T @ v - np.eye(n))) / 1e-10)
        worst["recon"] = max(worst["recon"], np.max(np.abs(v @ np.diag(lam) @ v.T - m)) / (1e-9 * fro))
        worst["trace"] = max(worst["trace"], abs(lam.sum() - np.trace(m)) / (1e-10 * max(1.0, abs(np.trace(m)))))
        res = np.max(np.linalg.norm(m @ v - v * lam, axis=0))
        worst["resid"] = max(worst["resid"], res / (1e-10 * max(1.0, fro)))
    analytic = 0.0
    for n in (2, 5, 10, 20, 50):
        for g in (1.0, 20.0):
            vals = eigen_decompose(full_matrix(build_tight_binding(n, 1.0, 0.5, g))).values
            analytic = max(analytic, np.max(np.abs(vals - analytic_tight_binding_spectrum(n, 1.0, 0.5, g))))
            h1 = 0.5 * np.ones((n, n)) - np.eye(n)
            vals = eigen_decompose(g * h1).values
            exact = np.sort(np.r_[np.full(n - 1, -g), g * 0.5 * (n - 2)])
            analytic = max(analytic, np.max(np.abs(vals - exact)))
    ok = max(worst.values()) <= 1.0 and analytic <= 1e-9
    criterion("5 eigensolver properties", ok,
              " ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f" (fraction of tol); analytic={analytic:.1e}")
    assert max(worst.values()) <= 1.0
    assert analytic <= 1e-9


def test_6_decoupled_invariance(criterion):
    rng = np.random.default_rng(3)
    worst_g = worst_spec = 0.0
    for _ in range(100):
        k = int(rng.integers(3, 9))
        eps = rng.uniform(-1, 1, size=k)
        h1 = random_symmetric(rng, k)
        g = float(rng.uniform(0.2, 5.0))
        top = float(np.max(np.abs(np.linalg.eigvalsh(np.diag(eps) + g * h1))))
        ext = np.zeros((k + 1, k + 1))
        ext[:k, :k] = h1
        ext[k, k] = rng.uniform(-1, 1)
        # keep the appended state well above the block's ground level
        eps_ext = np.r_[eps, top + 5 * g + 5]
        h = build_custom(eps_ext, ext, g)
        lam = eigen_decompose(full_matrix(h)).values[0]
        m = min(k, 5)
        h_next, step, es_next = reduction_step(h, lam, FlowConfig(n_min=k, m_track=m))
        assert step.build.elim == k
        worst_g = max(worst_g, abs(h_next.g - g) / abs(g))
        block = np.linalg.eigvalsh(np.diag(eps) + g * h1)
        scale = max(1.0, np.max(np.abs(block)))
        worst_spec = max(worst_spec, np.max(np.abs(es_next.values - block)) / scale)
    ok = worst_g <= 1e-10 and worst_spec <= 1e-10
    criterion("6 decoupled invariance", ok, f"max rel dg={worst_g:.1e} max rel dspectrum={worst_spec:.1e}")
    assert worst_g <= 1e-10
    assert worst_spec <= 1e-10


COMMANDS = {
    "spectrum": ["spectrum", "--n", "30", "--g0", "20"],
    "flow_csv": ["flow", "--n", "50", "--g0", "20"],
    "flow_json": ["flow", "--n", "20", "--g0", "1", "--format", "json"],
    "table1": ["table1"],
    "fixedpoint": ["fixedpoint", "--format", "json"],
    "sweep": ["sweep", "--grid-n", "10,20", "--grid-g0", "1,20", "--with-degenerate", "--workers", "3"],
}


def test_7_determinism(criterion, tmp_path, capsys):
    mismatched = []
    for name, argv in COMMANDS.items():
        outputs = []
        for rep in range(2):
            path = tmp_path / f"{name}_{rep}.out"
            code = main(argv + ["--out", str(path)])
            assert code == 0, name
            outputs.append(path.read_bytes())
        if outputs[0] != outputs[1] or not outputs[0]:
            mismatched.append(name)
    capsys.readouterr()
    criterion("7 determinism", not mismatched,
              f"{len(COMMANDS)} commands byte-identical" if not mismatched else f"differs: {mismatched}")
    assert not mismatched
