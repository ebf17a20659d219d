import itertools
from math import comb

import pytest

from rtlab.counting import (
    SPLIT_DEPTH,
    _constraint_index,
    _weights_from_prefix,
    bounds_compare,
    brute_force_count,
    count_colorings,
    estimate_partition_work,
    partition_polynomial,
    partition_weights,
    rho_max_search,
)
from rtlab.errors import CapExceeded, UnsupportedSizeError
from rtlab.exactmath import falling_factorial, stirling2_row
from rtlab.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    path_graph,
    turan_graph,
    write_graph6,
)

# ---------------------------------------------------------------------------
# the oracle itself, plus a second pure-python oracle for tiny cases


def pure_python_count(g, r, k=4):
    eids = [
        tuple(g.edge_id(u, v) for u, v in itertools.combinations(q, 2))
        for q in itertools.combinations(range(g.n), k)
        if all(g.has_edge(u, v) for u, v in itertools.combinations(q, 2))
    ]
    good = 0
    for coloring in itertools.product(range(r), repeat=g.edge_count):
        if not any(len({coloring[e] for e in q}) == comb(k, 2) for q in eids):
            good += 1
    return good


def test_brute_force_examples(k4):
    assert brute_force_count(k4, 2, 4) == 64
    assert brute_force_count(k4, 6, 4) == 45936
    assert brute_force_count(path_graph(3), 12, 4) == 144


def test_brute_force_matches_pure_python(k4):
    for r in range(1, 5):
        assert brute_force_count(k4, r, 4) == pure_python_count(k4, r)
    g = Graph.from_mask(5, 0b1010110101)
    for r in (2, 3):
        assert brute_force_count(g, r, 4) == pure_python_count(g, r)


def test_brute_force_cap():
    with pytest.raises(CapExceeded) as exc:
        brute_force_count(complete_graph(5), 12, 4, cap=10 ** 6)
    assert exc.value.estimate == 12 ** 10


# ---------------------------------------------------------------------------
# count_colorings


def test_count_closed_forms_k4(k4):
    for r in range(1, 14):
        expect = r ** 6 - falling_factorial(r, 6)
        assert count_colorings(k4, r, 4) == expect
    assert count_colorings(k4, 5, 4) == 5 ** 6
    assert count_colorings(k4, 6, 4) == 45936
    assert count_colorings(k4, 7, 4) == 112609


def test_count_turan_hosts():
    for n in range(0, 9):
        g = turan_graph(n, 3)
        for r in (1, 6, 12, 13):
            assert count_colorings(g, r, 4) == r ** g.edge_count


def test_count_oracle_equivalence_n4(classes4):
    for g in classes4:
        for r in range(1, 9):
            assert count_colorings(g, r, 4) == brute_force_count(g, r, 4)


def test_count_rejects_bad_params(k4):
    with pytest.raises(ValueError):
        count_colorings(k4, 0, 4)
    with pytest.raises(UnsupportedSizeError):
        count_colorings(k4, 65, 4)
    with pytest.raises(ValueError):
        count_colorings(k4, 6, 2)


def test_count_gallai_triangle_case():
    k3 = complete_graph(3)
    for r in range(1, 10):
        assert count_colorings(k3, r, 3) == r ** 3 - falling_factorial(r, 3)
        assert count_colorings(k3, r, 3) == brute_force_count(k3, r, 3)
    k4 = complete_graph(4)
    for r in (2, 3, 4):
        assert count_colorings(k4, r, 3) == brute_force_count(k4, r, 3)


def test_count_color_symmetry(k4):
    # fixing the color of the first edge splits the count evenly
    for r in (6, 7):
        total = count_colorings(k4, r, 4)
        eids = [tuple(range(6))]
        fixed = 0
        for rest in itertools.product(range(r), repeat=5):
            coloring = (0,) + rest
            if not any(len({coloring[e] for e in q}) == 6 for q in eids):
                fixed += 1
        assert fixed * r == total


def test_count_monotone_in_r(k4, k5):
    for g in (k4, k5, cycle_graph(5)):
        prev = None
        for r in range(1, 13):
            cur = count_colorings(g, r, 4)
            if prev is not None and g.edge_count >= 1:
                assert cur > prev
            prev = cur


def test_count_workers_deterministic(k5):
    g = Graph.from_mask(5, (1 << 10) - 1)  # K5
    assert count_colorings(g, 7, 4, workers=2) == count_colorings(g, 7, 4)
    assert g.edge_count > SPLIT_DEPTH


def test_count_work_cap(k5):
    with pytest.raises(CapExceeded):
        count_colorings(k5, 7, 4, work_cap=10)


# ---------------------------------------------------------------------------
# partition polynomial


def test_polynomial_k4(k4):
    poly = partition_polynomial(k4, 4)
    assert poly.coeffs == (1, 31, 90, 65, 15, 0)
    row = stirling2_row(6)
    assert poly.coeffs[:5] == tuple(row[1:6])
    for r in range(1, 14):
        assert poly.evaluate(r) == count_colorings(k4, r, 4)


def test_polynomial_triangle_unconstrained():
    poly = partition_polynomial(complete_graph(3), 4)
    assert poly.coeffs == (1, 3, 1)


def test_polynomial_consistency_all_n5_classes(classes5):
    for g in classes5:
        poly = partition_polynomial(g, 4)
        for r in range(1, 14):
            assert poly.evaluate(r) == count_colorings(g, r, 4)


def test_polynomial_unconstrained_is_stirling(classes5):
    for g in classes5:
        if g.edge_count and not any(
            all(g.has_edge(u, v) for u, v in itertools.combinations(q, 2))
            for q in itertools.combinations(range(g.n), 4)
        ):
            poly = partition_polynomial(g, 4)
            row = stirling2_row(g.edge_count)
            assert poly.coeffs == tuple(row[1:])


def test_partition_enumeration_matches_stirling_without_shortcut():
    # run the raw enumerator with no constraints; it must count Stirling rows
    for m in (0, 1, 4, 7, 9):
        weights = _weights_from_prefix(m, ((),) * m, (), m, ())
        row = stirling2_row(m)
        expect = [row[0] if m == 0 else 0] + list(row[1:])
        assert weights == expect


def test_partition_identity_total_count():
    # sum_j S2(m, j) r^(j falling) == r^m
    for m in range(0, 11):
        row = stirling2_row(m)
        for r in (1, 2, 5, 13):
            total = sum(row[j] * falling_factorial(r, j) for j in range(m + 1))
            assert total == r ** m


def test_polynomial_eval_nondecreasing_in_r(classes4):
    for g in classes4:
        poly = partition_polynomial(g, 4)
        vals = [poly.evaluate(r) for r in range(0, 10)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_polynomial_edge_cap():
    g = turan_graph(8, 3)  # 21 edges
    with pytest.raises(CapExceeded):
        partition_polynomial(g, 4)
    # K4-free shortcut applies once the cap is raised: no enumeration needed
    poly = partition_polynomial(g, 4, edge_cap=21)
    assert poly.coeffs == tuple(stirling2_row(21)[1:])


def test_partition_weights_max_classes_truncation(k4):
    full = partition_weights(k4, 4)
    trunc = partition_weights(k4, 4, max_classes=3)
    assert trunc[:4] == full[:4]
    assert all(w == 0 for w in trunc[4:])


def test_estimate_partition_work():
    assert estimate_partition_work(6, 6) == sum(stirling2_row(6))
    assert estimate_partition_work(6, 2) == sum(stirling2_row(6)[:3])


def test_constraint_index_orders_by_participation(k5):
    edge_cliques, sizes = _constraint_index(k5, 4)
    assert len(sizes) == 5 and all(s == 6 for s in sizes)
    # K5 is edge-transitive: every edge sits in 3 of the 5 K4s
    assert sorted(len(ec) for ec in edge_cliques) == [3] * 10


# ---------------------------------------------------------------------------
# bounds comparison


def test_bounds_compare_examples():
    v11 = bounds_compare(11, 4)
    assert v11.verdict == "clique-coloring" and (v11.clique_side, v11.turan_side) == (125, 121)
    v12 = bounds_compare(12, 4)
    assert v12.verdict == "turan" and v12.turan_side == 144
    assert bounds_compare(4, 3).verdict == "turan"
    assert bounds_compare(3, 3).verdict == "clique-coloring"  # 2^2 = 4 > 3


def test_bounds_compare_switch_at_12():
    for r in range(1, 65):
        expect = "clique-coloring" if r <= 11 else "turan"
        assert bounds_compare(r, 4).verdict == expect


# ---------------------------------------------------------------------------
# extremal search


def test_search_n4_r5(classes4, k4):
    rep = rho_max_search(4, 5, 4)
    assert rep.best_graph6 == write_graph6(k4)
    assert rep.best_count == 5 ** 6
    assert len(rep.table) == 11
    assert all(int(cnt) >= 1 for _, cnt in rep.table)


def test_search_n4_r12(k4):
    rep = rho_max_search(4, 12, 4)
    assert rep.best_count == max(12 ** 5, 12 ** 6 - falling_factorial(12, 6))
    assert rep.best_count == 2320704
    assert rep.best_graph6 == write_graph6(k4)
    assert rep.turan_count == 12 ** 5
    assert rep.best_attains_turan_bound


def test_search_n5_r6_reports_comparison():
    rep = rho_max_search(5, 6, 4)
    assert len(rep.table) == 34
    assert rep.turan_exponent == 8
    assert rep.turan_count == 6 ** 8
    assert rep.best_count >= rep.turan_count
    assert rep.best_count == max(int(c) for _, c in rep.table)


def test_search_deterministic_across_workers():
    a = rho_max_search(4, 12, 4, workers=1)
    b = rho_max_search(4, 12, 4, workers=2)
    assert a == b


def test_search_tie_break_lexicographic():
    # at r=1 every class has exactly one coloring: tie broken by graph6
    rep = rho_max_search(3, 1, 4)
    assert rep.best_count == 1
    codes = [write_graph6(g) for g in __import__("rtlab.graphs", fromlist=["enumerate_graphs"]).enumerate_graphs(3)]
    assert rep.best_graph6 == min(codes)


def test_search_external_stream(k5):
    rep = rho_max_search(5, 6, 4, graphs=[k5, turan_graph(5, 3)])
    assert len(rep.table) == 2
    assert rep.best_count == max(count_colorings(k5, 6, 4), 6 ** 8)
    with pytest.raises(ValueError):
        rho_max_search(5, 6, 4, graphs=[complete_graph(4)])


def test_search_work_cap_refusal():
    with pytest.raises(CapExceeded) as exc:
        rho_max_search(6, 12, 4, work_cap=10 ** 5)
    assert exc.value.estimate > 10 ** 5


def test_search_internal_cap():
    with pytest.raises(UnsupportedSizeError):
        rho_max_search(7, 6, 4)
