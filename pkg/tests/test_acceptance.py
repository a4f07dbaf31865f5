"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
printed even when output capture is on.
"""
import json
import time

import numpy as np
import pytest
import sympy

from diractree.cli import main
from diractree.decomposition import symmetrization_isometry, verify_decomposition
from diractree.fw_transform import FourierGrid, mode_eigen_check, verify_form_identity
from diractree.halfline import HalflineSpec, eigenvalues
from diractree.spectra import spectral_edge_probe, weyl_residual_dirac, weyl_residual_laplacian
from diractree.tree import (
    TailRule,
    branching_function,
    new_tree,
    reduced_height,
    reduced_height_diverges,
    subtree,
)
from diractree.vertex_conditions import build_vertex_pair, gauge_transform, validate


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return report


def _dyadic():
    return new_tree([1, 2, 2], [0, 1, 2], TailRule(2, "arithmetic", 1.0))


def _ternary():
    return new_tree([1, 3, 2], [0, 1, 2], TailRule(2, "arithmetic", 1.0))


def _doubling():
    return new_tree([1], [0, 1], TailRule(2, "geometric", 1.0, 2.0))


def test_criterion_1_decomposition(verdict):
    start = time.perf_counter()
    details = []
    ok = True
    for name, tree in [("dyadic", _dyadic()), ("b=[1,3,2]", _ternary()), ("doubling edges", _doubling())]:
        rep = verify_decomposition(tree, 1.0, 3, 0.01, (1, 4))
        good = rep.passed and rep.max_distance <= 5 * rep.calibrated_error and rep.full_count > 0
        if name == "dyadic":
            good &= {p["source"] for p in rep.pairs} == {"M_0", "M_1", "M_2"}
        ok &= good
        details.append(f"{name}: {rep.full_count} pairs, max {rep.max_distance:.3g} <= {rep.tol_match:.3g}")
    elapsed = time.perf_counter() - start
    ok &= elapsed <= 120
    verdict(1, ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_2_dispersion(verdict):
    start = time.perf_counter()
    spec = HalflineSpec(0, 1.0, 0.0, (), (), np.pi)
    found = np.array(eigenvalues(spec, (-5.5, 5.5)))
    expected = np.sort(np.concatenate([[-1.0], [s * np.sqrt(1 + n * n) for n in range(1, 6) for s in (-1, 1)]]))
    elapsed = time.perf_counter() - start
    err = np.max(np.abs(found - expected)) if found.shape == expected.shape else np.inf
    verdict(2, err <= 1e-9 and elapsed <= 1, f"max error {err:.3g}, {found.size} modes incl. -c^2, {elapsed:.3f}s")


def test_criterion_3_vertex_algebra(verdict):
    rng = np.random.default_rng(0)
    ok = True
    worst = 0.0
    for b in range(1, 9):
        pair = build_vertex_pair(b)
        A, B = sympy.Matrix(pair.A.tolist()), sympy.Matrix(pair.B.tolist())
        zero = sympy.zeros(pair.v_k, pair.v_k)
        ok &= A * B.T == zero and B * A.T == zero
        ok &= A.row_join(B).rank() == pair.v_k
        ok &= validate(pair).passed
        g = validate(gauge_transform(pair, rng.uniform(0, 2 * np.pi, pair.v_k)))
        ok &= g.passed and g.rank == pair.v_k
        worst = max(worst, g.max_asymmetry)
    verdict(3, ok, f"b_k=1..8 exact; gauge asymmetry {worst:.3g}")


def _random_piecewise(rng, radii):
    deg = rng.integers(0, 7)
    coeffs = rng.standard_normal((len(radii) - 1, 2, deg + 1)) + 1j * rng.standard_normal((len(radii) - 1, 2, deg + 1))
    edges = np.asarray(radii)

    def phi(t):
        idx = np.clip(np.searchsorted(edges, t, side="left") - 1, 0, len(radii) - 2)
        return np.array([[np.polyval(coeffs[i, comp], x) for i, x in zip(idx, t)] for comp in range(2)])

    return phi


def test_criterion_4_isometry(verdict):
    rng = np.random.default_rng(0)
    trees = [_dyadic(), _ternary(), _doubling()]
    worst = 0.0
    for i in range(100):
        tree = trees[i % 3]
        depth = int(rng.integers(1, 4))
        res = symmetrization_isometry(tree, depth, _random_piecewise(rng, tree.radii(depth)))
        worst = max(worst, res.discrepancy)
    verdict(4, worst <= 1e-10, f"100 inputs, max relative discrepancy {worst:.3g}")


def test_criterion_5_weyl(verdict):
    start = time.perf_counter()
    ms = np.arange(4, 10)
    lap = np.array([weyl_residual_laplacian(m, 1.0) for m in ms])
    slope = np.polyfit(ms * np.log(2.0), np.log(lap), 1)[0]
    dirac = [weyl_residual_dirac(int(m), 1.0, 1.0)["residual"] for m in ms]
    decreasing = all(b < a for a, b in zip(dirac, dirac[1:]))
    probe = spectral_edge_probe(_doubling(), 1.0, [1, 2, 3, 4, 5])
    elapsed = time.perf_counter() - start
    ok = abs(slope + 1) <= 0.1 and decreasing and probe.lower_bound_ok and elapsed <= 60
    verdict(5, ok, f"slope {slope:.4f}, Dirac residuals {dirac[0]:.3g}->{dirac[-1]:.3g}, "
                   f"min B_c - c^2 = {min(probe.gaps):.3g}, {elapsed:.1f}s")


def test_criterion_6_fw_identity(verdict):
    start = time.perf_counter()
    grid = FourierGrid(256, 2 * np.pi)
    rng = np.random.default_rng(0)
    ok = True
    worst = 0.0
    for c in (0.5, 1.0, 10.0):
        ok &= mode_eigen_check(c, grid) <= 1e-12
        for _ in range(20):
            u = rng.standard_normal(256) + 1j * rng.standard_normal(256)
            rep = verify_form_identity(u, c, grid)
            ok &= rep.passed
            worst = max(worst, rep.norm_error, rep.form_error)
    elapsed = time.perf_counter() - start
    verdict(6, ok and elapsed <= 1, f"max relative error {worst:.3g}, {elapsed:.3f}s")


def test_criterion_7_geometry(verdict):
    L = reduced_height(_dyadic())
    flagged = reduced_height_diverges(_doubling()) and not reduced_height_diverges(_dyadic())
    rng = np.random.default_rng(0)
    mismatches = 0
    trees = [_dyadic(), _ternary(), _doubling()]
    for i in range(1000):
        tree = trees[i % 3]
        k = int(rng.integers(0, 4))
        s = float(rng.uniform(0, 20))
        sub = subtree(tree, k)
        lhs = branching_function(sub, s)
        rhs = branching_function(tree, tree.radius(k) + s)
        # g(t_k+) = b_0...b_k; compared in integer arithmetic
        mismatches += lhs * tree.product(k) != rhs
    ok = abs(L - 2.0) <= 1e-12 and flagged and mismatches == 0
    verdict(7, ok, f"L(dyadic)={L!r}, divergence flagged={flagged}, subtree mismatches={mismatches}/1000")


def test_criterion_8_determinism(verdict, tmp_path):
    from pathlib import Path
    configs = Path(__file__).resolve().parent.parent / "configs"
    jobs = [("describe", "dyadic.ini"), ("spectrum", "dyadic.ini"), ("decompose-verify", "dyadic.ini"),
            ("weyl", "geometric.ini"), ("fw-check", "fw.ini")]
    ok = True
    for command, config in jobs:
        outs = []
        for i in range(2):
            d = tmp_path / f"{command}-{i}"
            code = main([command, str(configs / config), "--out", str(d)])
            ok &= code == 0
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        ok &= outs[0] == outs[1]
        for name, data in outs[0].items():
            if name.endswith(".json"):
                json.loads(data)
    verdict(8, ok, f"{len(jobs)} commands byte-identical across two runs")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
