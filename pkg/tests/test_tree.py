import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diractree.tree import (
    TailRule,
    TreeError,
    branching_function,
    describe,
    height,
    new_tree,
    reduced_height,
    subtree,
    total_length,
    truncate,
)


def test_valid_dyadic(dyadic):
    assert dyadic.b == (1, 2, 2)
    assert dyadic.branching(10) == 2
    assert dyadic.radius(5) == 5.0


@pytest.mark.parametrize("b, t", [
    ([1, 1, 2], [0, 1, 2]),
    ([1, 2], [0, 2, 1]),
    ([2, 2], [0, 1]),
    ([1, 2], [0.5, 1]),
    ([1, 2], [0, 1, 2, 3]),
])
def test_rejects_invalid(b, t):
    with pytest.raises(TreeError):
        new_tree(b, t)


def test_error_names_rule():
    with pytest.raises(TreeError, match=r"b\[1\] must be >= 2"):
        new_tree([1, 1, 2], [0, 1, 2])


def test_inconsistent_splice():
    with pytest.raises(TreeError, match="tail"):
        new_tree([1, 2, 3], [0, 1, 2], TailRule(2, "arithmetic", 1.0))
    with pytest.raises(TreeError, match="tail"):
        new_tree([1, 2, 2], [0, 1, 2], TailRule(2, "geometric", 1.0, 2.0))


def test_branching_function_examples(dyadic):
    assert branching_function(dyadic, 0.0) == 1
    assert branching_function(dyadic, 1.5) == 2
    assert branching_function(dyadic, 1.0) == 1
    assert branching_function(dyadic, 2.0) == 2
    assert branching_function(dyadic, 2.0001) == 4


def test_branching_function_domain():
    tr = new_tree([1, 2, 2], [0, 1, 2])
    with pytest.raises(TreeError):
        branching_function(tr, -0.1)
    with pytest.raises(TreeError):
        branching_function(tr, 2.0)


def test_height(dyadic, geometric_down, geometric_up):
    assert height(dyadic) == math.inf
    assert height(geometric_up) == math.inf
    # 1 + 1/2 + 1/4 + ... = 2
    assert height(geometric_down) == pytest.approx(2.0, rel=1e-15)
    tr = new_tree([1, 2, 2], [0, 1, 2])
    assert height(tr) == 2.0 and tr.prefix_only


def test_reduced_height_dyadic(dyadic):
    # sum 2^-n
    assert reduced_height(dyadic) == 2.0
    assert reduced_height(dyadic, 1e-14, method="series") == pytest.approx(2.0, abs=1e-14)


def test_reduced_height_divergent(geometric_up):
    assert reduced_height(geometric_up) == math.inf
    assert describe(geometric_up).reduced_height_diverges


def test_reduced_height_prefix():
    assert reduced_height(new_tree([1], [0, 1])) == 1.0


def _exact_partial_sum(b, lengths):
    p, total = 1, Fraction(0)
    for bn, ln in zip(b, lengths):
        p *= bn
        total += Fraction(ln) / p
    return total


def test_reduced_height_closed_vs_exact_oracle(ternary, geometric_down):
    # ternary: 1/1 + 1/3 + 1/6 + 1/12 + ... = 1 + 1/3 * 2 = 5/3
    assert reduced_height(ternary) == pytest.approx(5 / 3, rel=1e-15)
    n = 60
    b = [ternary.branching(j) for j in range(n)]
    lens = [ternary.edge_length(j) for j in range(n)]
    assert float(_exact_partial_sum(b, lens)) == pytest.approx(5 / 3, rel=1e-15)
    b = [geometric_down.branching(j) for j in range(n)]
    lens = [Fraction(1, 2**j) for j in range(n)]
    assert reduced_height(geometric_down) == pytest.approx(float(_exact_partial_sum(b, lens)), rel=1e-15)


def test_total_length(dyadic):
    assert total_length(dyadic, 0) == 0
    assert total_length(dyadic, 2) == 3
    assert total_length(dyadic, 3) == 7
    with pytest.raises(TreeError):
        total_length(new_tree([1, 2], [0, 1, 2]), 3)


@pytest.mark.parametrize("fixture", ["dyadic", "ternary", "geometric_up", "geometric_down"])
def test_total_length_is_integral_of_branching(fixture, request):
    tree = request.getfixturevalue(fixture)
    N = 4
    t = tree.radii(N)
    # g is constant on each (t_n, t_{n+1}], so a midpoint sample is exact
    quad = math.fsum(branching_function(tree, 0.5 * (a + b)) * (b - a) for a, b in zip(t, t[1:]))
    assert total_length(tree, N) == pytest.approx(quad, rel=1e-15)


def test_subtree_identity_shift(dyadic):
    assert subtree(dyadic, 0) == dyadic
    s = subtree(dyadic, 2)
    assert [s.branching(n) for n in range(5)] == [1, 2, 2, 2, 2]
    assert s.radii(3) == [0.0, 1.0, 2.0, 3.0]


def test_subtree_geometric(geometric_up):
    s = subtree(geometric_up, 3)
    assert [s.edge_length(n) for n in range(3)] == [8.0, 16.0, 32.0]


@pytest.mark.parametrize("fixture", ["dyadic", "ternary", "geometric_up"])
def test_subtree_branching_relation(fixture, request):
    tree = request.getfixturevalue(fixture)
    rng = np.random.default_rng(1)
    for k in range(4):
        sub = subtree(tree, k)
        tk = tree.radius(k)
        gk = tree.product(k)
        for s in rng.uniform(0, 10, size=50):
            assert branching_function(sub, s) * gk == branching_function(tree, tk + s)


def test_truncate_counts(dyadic):
    T1 = truncate(dyadic, 1)
    assert len(T1.vertices) == 2 and len(T1.edges) == 1 and T1.edges[0].length == 1
    T2 = truncate(dyadic, 2)
    assert len(T2.vertices) == 4 and len(T2.edges) == 3
    T3 = truncate(dyadic, 3)
    assert len(T3.vertices) == 8 and len(T3.edges) == 7


def test_truncate_structure(ternary):
    T = truncate(ternary, 3)
    assert T.generation_counts() == [1, 1, 3, 6]
    assert len(T.edges) == len(T.vertices) - 1
    for e in T.edges:
        assert e.length == ternary.edge_length(e.generation)
        assert e.head == e.id + 1
    assert len(T.children[0]) == 1
    assert T.interior_vertices() == [1, 2, 3, 4]
    # deterministic
    assert truncate(ternary, 3) == T


tails = st.builds(
    TailRule,
    b_star=st.integers(2, 5),
    rule=st.just("geometric"),
    d=st.floats(0.1, 3.0),
    q=st.floats(0.05, 0.95),
)


@settings(max_examples=60, deadline=None)
@given(tails)
def test_finite_height_implies_finite_reduced_height(tail):
    tree = new_tree([1], [0.0, tail.d], tail)
    assert math.isfinite(height(tree))
    assert math.isfinite(reduced_height(tree))
    closed = reduced_height(tree, 1e-13)
    series = reduced_height(tree, 1e-13, method="series")
    assert closed == pytest.approx(series, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=5), st.integers(2, 4))
def test_reduced_height_partial_sums_monotone(bs, b_star):
    b = [1] + bs + [b_star]
    t = [float(i) for i in range(len(b))]
    tree = new_tree(b, t, TailRule(b_star, "arithmetic", 1.0))
    terms = [tree.edge_length(n) / tree.product(n) for n in range(30)]
    sums = np.cumsum(terms)
    assert min(terms) > 0
    assert np.all(np.diff(sums) >= 0)
    assert sums[-1] <= reduced_height(tree) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=4), st.integers(1, 4))
def test_truncation_generation_counts(bs, N):
    b = [1] + bs
    t = [float(i) for i in range(len(b) + 1)]
    tree = new_tree(b, t)
    N = min(N, len(b))
    T = truncate(tree, N)
    counts = T.generation_counts()
    for n in range(1, N + 1):
        assert counts[n] == tree.product(n - 1)
