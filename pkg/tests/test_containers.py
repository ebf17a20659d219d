import itertools
import random
from collections import Counter
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from rtlab.containers import (
    C_ELL_BOUND,
    DELTA_BOUND_DENOM,
    TAU_THRESHOLD,
    RainbowHypergraphStats,
    build_rainbow_hypergraph,
    codegree,
    codegree_from_rows,
    container_constants,
    container_hypothesis_check,
    delta_tau,
    is_complete_on_complete_host,
    materialize_rows,
    max_codegree,
    max_codegrees_from_rows,
    min_n_for_container,
    structural_codegree,
    structural_max_codegrees,
)
from rtlab.errors import CapExceeded
from rtlab.exactmath import falling_factorial
from rtlab.graphs import complete_graph, turan_graph
from rtlab.templates import Template, complete_template, rainbow_copies
from test_templates import random_template

# ---------------------------------------------------------------------------
# stats of small complete templates


def test_stats_examples(k4, k5):
    stats, rows = build_rainbow_hypergraph(complete_template(k4, 6))
    assert (stats.vertex_count, stats.edge_count) == (36, 720)
    assert stats.average_degree == Fraction(120)
    assert rows is None
    stats5, _ = build_rainbow_hypergraph(complete_template(k5, 6))
    assert stats5.edge_count == 3600
    for r in range(1, 6):
        s, _ = build_rainbow_hypergraph(complete_template(k5, r))
        assert s.edge_count == 0
        assert s.average_degree == 0
        assert s.max_codegrees == (0, 0, 0, 0, 0)


def test_degree_identity_on_materialized(k5):
    rng = random.Random(13)
    for _ in range(15):
        t = random_template(rng, 5, 6)
        stats, rows = build_rainbow_hypergraph(t, materialize=True)
        assert stats.average_degree * stats.vertex_count == 6 * stats.edge_count
        assert rows.shape == (stats.edge_count, 6)
        # row degrees recount the edge total
        if stats.edge_count:
            ids, counts = np.unique(rows, return_counts=True)
            assert counts.sum() == 6 * stats.edge_count


def test_stated_bounds_hold_with_equality_for_complete_templates():
    for n in range(4, 8):
        for r in (6, 7, 12):
            t = complete_template(complete_graph(n), r)
            stats, _ = build_rainbow_hypergraph(t)
            assert stats.vertex_count == r * comb(n, 2)
            assert stats.edge_count == falling_factorial(r, 6) * comb(n, 4)
            assert stats.average_degree == comb(n - 2, 2) * falling_factorial(r - 1, 5)


def test_edge_and_degree_bounds_sweep_r_up_to_12():
    # the stated upper bounds hold across the whole small grid, including
    # the degenerate r < 6 cases where the hypergraph is empty
    for n in range(1, 8):
        for r in range(1, 13):
            t = complete_template(complete_graph(n), r)
            stats, _ = build_rainbow_hypergraph(t, stats_only=True)
            assert stats.edge_count <= falling_factorial(r, 6) * comb(n, 4)
            assert stats.average_degree <= comb(max(n - 2, 0), 2) * falling_factorial(r - 1, 5)


def test_structural_matches_materialized_n7():
    # completes the n <= 7 half of the structural/materialized agreement
    for r in (6, 7):
        t = complete_template(complete_graph(7), r)
        rows = materialize_rows(t)
        base = t.graph.edge_count * r
        assert max_codegrees_from_rows(rows, base) == structural_max_codegrees(7, r)
        rng = random.Random(700 + r)
        for _ in range(15):
            size = rng.randint(2, 6)
            pairs = set()
            while len(pairs) < size:
                pairs.add((rng.randrange(t.graph.edge_count), rng.randint(1, r)))
            pairs = sorted(pairs)
            vids = [e * r + (c - 1) for e, c in pairs]
            assert structural_codegree(t, pairs) == codegree_from_rows(rows, vids)
            assert structural_codegree(t, pairs) == codegree(t, pairs)


# ---------------------------------------------------------------------------
# co-degrees: the canonical pairwise cases, structural vs materialized vs DP


def test_codegree_pairwise_cases(k6):
    t12 = complete_template(k6, 12)
    e01 = k6.edge_id(0, 1)
    e02 = k6.edge_id(0, 2)
    e23 = k6.edge_id(2, 3)
    # shared vertex, distinct colors: (n-3)(r-2)...(r-5)
    assert codegree(t12, [(e01, 1), (e02, 2)]) == 3 * falling_factorial(10, 4) == 15120
    # repeated color kills the co-degree
    assert codegree(t12, [(e01, 1), (e02, 1)]) == 0
    assert codegree(t12, [(e01, 1), (e01, 2)]) == 0
    # disjoint edges at r=6: (r-2)...(r-5)
    t6 = complete_template(k6, 6)
    assert codegree(t6, [(e01, 1), (e23, 2)]) == falling_factorial(4, 4) == 24
    # structural case analysis agrees
    assert structural_codegree(t12, [(e01, 1), (e02, 2)]) == 15120
    assert structural_codegree(t6, [(e01, 1), (e23, 2)]) == 24
    assert structural_codegree(t12, [(e01, 3), (e02, 3)]) == 0


def test_codegree_three_edge_cases(k6):
    t = complete_template(k6, 12)
    e01, e02, e12 = k6.edge_id(0, 1), k6.edge_id(0, 2), k6.edge_id(1, 2)
    e03, e13 = k6.edge_id(0, 3), k6.edge_id(1, 3)
    e34 = k6.edge_id(3, 4)
    tri = [(e01, 1), (e02, 2), (e12, 3)]
    path = [(e01, 1), (e02, 2), (e34, 3)]  # spans 5 vertices: nothing contains it
    star = [(e01, 1), (e02, 2), (e03, 3)]
    pth4 = [(e02, 1), (e01, 2), (e13, 3)]  # path on vertices 2-0-1-3
    assert codegree(t, tri) == 3 * falling_factorial(9, 3)
    assert codegree(t, star) == falling_factorial(9, 3)
    assert codegree(t, pth4) == falling_factorial(9, 3)
    assert codegree(t, path) == 0
    for s in (tri, path, star, pth4):
        assert structural_codegree(t, s) == codegree(t, s)


def test_codegree_size_bounds(k6):
    t = complete_template(k6, 12)
    with pytest.raises(ValueError):
        codegree(t, [(0, 1)])
    with pytest.raises(ValueError):
        codegree(t, [(i, i + 1) for i in range(7)])
    with pytest.raises(ValueError):
        codegree(t, [(0, 13), (1, 1)])


def test_structural_matches_materialized_small_grid():
    for n in (4, 5):
        for r in (6, 7):
            t = complete_template(complete_graph(n), r)
            rows = materialize_rows(t)
            base = t.graph.edge_count * r
            assert max_codegrees_from_rows(rows, base) == structural_max_codegrees(n, r)
            # spot pairwise values across the three evaluation routes
            rng = random.Random(n * 100 + r)
            for _ in range(25):
                size = rng.randint(2, 6)
                pairs = set()
                while len(pairs) < size:
                    pairs.add((rng.randrange(t.graph.edge_count), rng.randint(1, r)))
                pairs = sorted(pairs)
                vids = [e * r + (c - 1) for e, c in pairs]
                want = codegree(t, pairs)
                assert structural_codegree(t, pairs) == want
                assert codegree_from_rows(rows, vids) == want


def test_max_codegree_on_general_templates_matches_enumeration():
    rng = random.Random(0xBEEF)
    for _ in range(12):
        t = random_template(rng, 5, 6)
        rows = materialize_rows(t)
        base = t.graph.edge_count * t.r
        got = max_codegrees_from_rows(rows, base)
        # independent pure-python recount over enumerated copies
        subsets = [Counter() for _ in range(5)]
        for pairs in rainbow_copies(t):
            vids = sorted(e * t.r + (c - 1) for e, c in pairs)
            for j in range(2, 7):
                for sub in itertools.combinations(vids, j):
                    subsets[j - 2][sub] += 1
        expect = tuple(
            max(c.values()) if c else 0 for c in subsets
        )
        assert got == expect
        for j in range(2, 7):
            assert max_codegree(t, j) == expect[j - 2]


def test_max_codegree_structural_path(k6):
    t = complete_template(k6, 12)
    assert max_codegree(t, 6) == 1
    assert max_codegree(t, 2) == 15120
    assert structural_max_codegrees(6, 12) == (15120, 1512, 56, 7, 1)
    assert structural_max_codegrees(3, 12) == (0, 0, 0, 0, 0)
    assert structural_max_codegrees(6, 5) == (0, 0, 0, 0, 0)


def test_codegree_monotone_ladder(k6):
    # Delta_2 >= ... >= Delta_6 whenever the hypergraph is nonempty
    for n in (4, 5, 6):
        for r in (6, 9, 12):
            d = structural_max_codegrees(n, r)
            assert all(a >= b for a, b in zip(d, d[1:]))
            assert d[4] == 1


def test_materialization_cap():
    t = complete_template(complete_graph(6), 12)
    with pytest.raises(CapExceeded):
        materialize_rows(t, cap=10 ** 5)
    stats, rows = build_rainbow_hypergraph(t)  # structural path: no refusal
    assert stats.max_codegrees == (15120, 1512, 56, 7, 1)
    assert rows is None


def test_stats_only_flag():
    # non-complete template over the cap: stats_only yields partial stats
    g = complete_graph(6)
    masks = [(1 << 12) - 1] * g.edge_count
    masks[0] = (1 << 11) - 1  # one list short: structural path unavailable
    t = Template(g, 12, masks)
    with pytest.raises(CapExceeded):
        build_rainbow_hypergraph(t, cap=10 ** 4)
    stats, rows = build_rainbow_hypergraph(t, cap=10 ** 4, stats_only=True)
    assert stats.max_codegrees is None
    assert stats.edge_count > 10 ** 4
    assert rows is None


def test_is_complete_detector(k4):
    assert is_complete_on_complete_host(complete_template(k4, 6))
    assert not is_complete_on_complete_host(
        Template(k4, 6, [0b111110] + [0b111111] * 5)
    )
    assert not is_complete_on_complete_host(complete_template(turan_graph(5, 3), 6))


# ---------------------------------------------------------------------------
# the weighted co-degree functional


def test_delta_tau_zero_codegrees():
    stats = RainbowHypergraphStats(36, 720, Fraction(120), (0, 0, 0, 0, 0))
    assert delta_tau(stats, Fraction(1, 2)) == 0


def test_delta_tau_exact_value(k4):
    stats, _ = build_rainbow_hypergraph(complete_template(k4, 6))
    val = delta_tau(stats, Fraction(1, 2))
    # independent recomputation, reversed summation order and no shortcuts
    deltas = stats.max_codegrees
    weights = [Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]
    acc = Fraction(0)
    for i in (4, 3, 2, 1, 0):
        acc += weights[i] * deltas[i] / (Fraction(120) * Fraction(1, 2) ** (i + 1))
    assert val == 2 ** 14 * acc
    assert val > 0


def test_delta_tau_halves_when_tau_doubles(k4):
    stats, _ = build_rainbow_hypergraph(complete_template(k4, 6))
    assert delta_tau(stats, Fraction(1)) < delta_tau(stats, Fraction(1, 2))


def test_delta_tau_errors(k4):
    stats = RainbowHypergraphStats(36, 0, Fraction(0), (0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        delta_tau(stats, Fraction(1, 2))
    good, _ = build_rainbow_hypergraph(complete_template(k4, 6))
    with pytest.raises(ValueError):
        delta_tau(good, Fraction(0))
    partial = RainbowHypergraphStats(36, 720, Fraction(120), None)
    with pytest.raises(ValueError):
        delta_tau(partial, Fraction(1, 2))


# ---------------------------------------------------------------------------
# hypothesis constants and the threshold search


def test_epsilon_at_perfect_cube():
    rep = container_hypothesis_check(10 ** 6, 12)
    assert rep.details["epsilon_cubed"] == Fraction(1, (110 ** 3) * 10 ** 6)
    lo, hi = rep.details["epsilon_interval"]
    assert lo <= Fraction(1, 11000) <= hi
    assert hi - lo < Fraction(1, 10 ** 30)


def test_tau_condition_fails_at_desk_scale():
    for n in (10, 10 ** 6, 10 ** 12):
        assert not container_hypothesis_check(n, 12).tau_ok


def test_threshold_constants():
    assert TAU_THRESHOLD == Fraction(1, 1200 * 720 ** 2)
    assert DELTA_BOUND_DENOM == 12 * 720
    assert C_ELL_BOUND == 1000 * 6 * 720 ** 3


def test_vacuous_below_six_colors():
    rep = container_hypothesis_check(100, 5)
    assert rep.vacuous
    assert rep.details["hypergraph_edges"] == 0


def test_min_n_boundary_and_monotonicity():
    n_min = min_n_for_container(12)
    assert container_hypothesis_check(n_min, 12).passes
    assert not container_hypothesis_check(n_min - 1, 12).passes
    for extra in (1, 7, 10 ** 6):
        assert container_hypothesis_check(n_min + extra, 12).passes


def test_min_n_nonincreasing_in_r():
    vals = [min_n_for_container(r) for r in (12, 13, 16, 24, 40, 64)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_min_n_requires_six_colors():
    with pytest.raises(ValueError):
        min_n_for_container(5)


def test_conclusion_exponent_reported_at_large_n():
    n_min = min_n_for_container(12)
    rep = container_hypothesis_check(n_min, 12)
    expo = rep.details["conclusion_exponent"]
    assert expo[0] > 0 and expo[0] <= expo[1]


def test_tau_sixth_matches_interval(k4):
    cc = container_constants(10 ** 6, 12)
    lo, hi = cc.tau_interval(30)
    assert lo ** 6 <= cc.tau_sixth <= hi ** 6
