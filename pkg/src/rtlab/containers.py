"""Rainbow hypergraph of a template: degrees, co-degrees, and the exact
evaluation of the container-theorem hypothesis constants.

The hypergraph H of a template has vertex set E(G) x [r]; its hyperedges
are the rainbow K4 copies, so H is 6-uniform.  Two evaluation paths exist
and must agree where they overlap:

  * materialized: explicit hyperedge rows (any template, capped size);
  * structural: closed-form co-degree case analysis, valid for complete
    templates on complete hosts at any n.

Comparisons involving the container thresholds contain sqrt and cube-root
terms; they are decided without floating point, either by integer
cross-powering (the tau condition is cleared of radicals by raising both
sides to the sixth power) or by certified rational intervals refined until
the two sides separate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import CapExceeded
from .exactmath import (
    cbrt_interval,
    falling_factorial,
    iv_add,
    iv_div,
    iv_exact,
    iv_le,
    iv_mul,
    iv_pow,
    ln_interval,
    sqrt_interval,
)
from .graphs import k4_subgraphs
from .templates import Template, _k4_edge_ids, count_distinct_choices, count_rainbow_copies

ELL = 6
# weights of the co-degree functional at uniformity 6: leading 2^14 with
# inner factors 1, 1/2, 1/4, 1/8, 1/16 on Delta_2..Delta_6
DELTA_LEAD = 2 ** 14
DELTA_WEIGHTS = (
    Fraction(1),
    Fraction(1, 2),
    Fraction(1, 4),
    Fraction(1, 8),
    Fraction(1, 16),
)
TAU_THRESHOLD = Fraction(1, 200 * ELL * factorial(ELL) ** 2)
DELTA_BOUND_DENOM = 12 * factorial(ELL)
C_ELL_BOUND = 1000 * ELL * factorial(ELL) ** 3  # reported constant c(ell)
# tau = TAU_SCALE_SQ^(1/2) * 2^9 * n^(-1/3): keep the radicand exact
TAU_RADICAND = 12 * factorial(ELL)  # 8640
TAU_FACTOR = 2 ** 9

DEFAULT_MATERIALIZE_CAP = 10 ** 7


@dataclass(frozen=True)
class RainbowHypergraphStats:
    vertex_count: int
    edge_count: int
    average_degree: Fraction
    max_codegrees: tuple  # (Delta_2, ..., Delta_6) or None if not computed


def is_complete_on_complete_host(t: Template) -> bool:
    """True when the host is K_n and every list is the full color set."""
    g = t.graph
    full = (1 << t.r) - 1
    return g.edge_count == comb(g.n, 2) and all(m == full for m in t.masks)


# ---------------------------------------------------------------------------
# Structural path (complete template on K_n): exact case analysis.

def structural_edge_count(n: int, r: int) -> int:
    return falling_factorial(r, 6) * comb(n, 4)


def structural_average_degree(n: int, r: int) -> Fraction:
    nv = comb(n, 2) * r
    if nv == 0:
        return Fraction(0)
    return Fraction(ELL * structural_edge_count(n, r), nv)


def structural_max_codegrees(n: int, r: int) -> tuple:
    """Exact Delta_2..Delta_6 for the complete template on K_n.

    A j-set of (edge, color) pairs with distinct edges and colors lies in
    (n-3) hyperedges per containing K4 when the edges span 3 vertices and
    in exactly one when they span 4; completions pick 6-j fresh colors.
    """
    if n < 4 or r < 6:
        return (0, 0, 0, 0, 0)
    return (
        (n - 3) * falling_factorial(r - 2, 4),
        (n - 3) * falling_factorial(r - 3, 3),
        falling_factorial(r - 4, 2),
        r - 5,
        1,
    )


def structural_codegree(t: Template, pairs) -> int:
    """Closed-form co-degree for a complete template on K_n."""
    if not is_complete_on_complete_host(t):
        raise ValueError("structural co-degrees need a complete template on K_n")
    g, r = t.graph, t.r
    pairs = sorted(set(pairs))
    q = len(pairs)
    edges = [g.edges[e] for e, _ in pairs]
    colors = [c for _, c in pairs]
    for c in colors:
        if not 1 <= c <= r:
            raise ValueError(f"color {c} outside 1..{r}")
    if len({e for e, _ in pairs}) < q or len(set(colors)) < q:
        return 0
    span = set()
    for u, v in edges:
        span.update((u, v))
    if len(span) > 4:
        return 0
    if len(span) == 4:
        hosts = 1
    elif len(span) == 3:
        hosts = g.n - 3
    else:
        return 0  # < 2 distinct edges cannot happen with q >= 2
    return hosts * falling_factorial(r - q, 6 - q)


# ---------------------------------------------------------------------------
# Materialized path.

def materialize_rows(t: Template, cap: int = DEFAULT_MATERIALIZE_CAP) -> np.ndarray:
    """Explicit hyperedges as sorted rows of six hypergraph-vertex ids,
    id = edge_id * r + (color - 1)."""
    total = count_rainbow_copies(t)
    if total > cap:
        raise CapExceeded(
            f"{total} hyperedges exceeds materialization cap {cap}",
            estimate=total,
            cap=cap,
        )
    r = t.r
    base = t.graph.edge_count * r
    dtype = np.uint16 if base <= 0xFFFF else np.int64
    full = (1 << r) - 1
    chunks = []
    for quad in k4_subgraphs(t.graph):
        eids = _k4_edge_ids(t.graph, quad)
        masks = [t.masks[e] for e in eids]
        offs = np.array([e * r for e in eids], dtype=np.int64)
        if all(m == full for m in masks):
            cnt = falling_factorial(r, 6)
            if cnt == 0:
                continue
            flat = np.fromiter(
                itertools.chain.from_iterable(itertools.permutations(range(r), 6)),
                dtype=np.int64,
                count=cnt * 6,
            )
            rows = flat.reshape(-1, 6) + offs[None, :]
        else:
            sels = list(_iter_color_tuples(masks))
            if not sels:
                continue
            rows = np.array(sels, dtype=np.int64) + offs[None, :]
        chunks.append(np.sort(rows, axis=1).astype(dtype))
    if not chunks:
        return np.empty((0, 6), dtype=dtype)
    return np.vstack(chunks)


def _iter_color_tuples(masks):
    """Distinct-color selections as 0-based color tuples in edge order."""
    order = sorted(range(6), key=lambda i: (bin(masks[i]).count("1"), i))
    chosen = [0] * 6

    def rec(pos, used):
        if pos == 6:
            yield tuple(chosen)
            return
        i = order[pos]
        m = masks[i] & ~used
        while m:
            bit = m & -m
            m ^= bit
            chosen[i] = bit.bit_length() - 1
            yield from rec(pos + 1, used | bit)

    yield from rec(0, 0)


def _combo_key_counts(rows64: np.ndarray, combo, base: int):
    """(keys, counts) for the sub-rows at the given sorted column positions.
    Keys are positional base-`base` encodings, split over two int64 digits
    when one would overflow, so they compare consistently across combos."""
    j = len(combo)
    if base ** j < 2 ** 62:
        keys = rows64[:, combo[0]].copy()
        for c in combo[1:]:
            keys *= base
            keys += rows64[:, c]
        u, cnt = np.unique(keys, return_counts=True)
        return u.reshape(-1, 1), cnt.astype(np.int64)
    half = (j + 1) // 2  # <= 3 digits per word: base^3 < 2^62 for base <= 64*2016
    hi = rows64[:, combo[0]].copy()
    for c in combo[1:half]:
        hi *= base
        hi += rows64[:, c]
    lo = rows64[:, combo[half]].copy()
    for c in combo[half + 1 :]:
        lo *= base
        lo += rows64[:, c]
    u, cnt = np.unique(np.stack([hi, lo], axis=1), axis=0, return_counts=True)
    return u, cnt.astype(np.int64)


def _merge_key_counts(a, b):
    keys = np.concatenate((a[0], b[0]), axis=0)
    counts = np.concatenate((a[1], b[1])).astype(np.float64)
    if keys.shape[1] == 1:
        u, inv = np.unique(keys[:, 0], return_inverse=True)
        u = u.reshape(-1, 1)
    else:
        u, inv = np.unique(keys, axis=0, return_inverse=True)
    summed = np.bincount(inv.ravel(), weights=counts)
    return u, summed.astype(np.int64)


def max_codegrees_from_rows(rows: np.ndarray, base: int) -> tuple:
    """Delta_2..Delta_6 by direct subset counting over explicit rows: every
    j-subset of a row occurs at some sorted column combination, so per-combo
    key counting followed by a cross-combo merge is exhaustive."""
    e = len(rows)
    if e == 0:
        return (0, 0, 0, 0, 0)
    rows64 = rows.astype(np.int64)
    out = []
    for j in range(2, 7):
        merged = None
        for combo in itertools.combinations(range(6), j):
            pair = _combo_key_counts(rows64, combo, base)
            merged = pair if merged is None else _merge_key_counts(merged, pair)
        out.append(int(merged[1].max()))
    return tuple(out)


def codegree_from_rows(rows: np.ndarray, vids) -> int:
    """Number of explicit rows containing every given hypergraph vertex."""
    if len(rows) == 0:
        return 0
    mask = np.ones(len(rows), dtype=bool)
    for v in vids:
        mask &= (rows == v).any(axis=1)
    return int(np.count_nonzero(mask))


def codegree(t: Template, pairs) -> int:
    """Exact co-degree of a set of (edge_id, color) pairs: the number of
    rainbow copies containing all of them.  Works on any template by
    counting distinct-color completions inside each containing K4."""
    pairs = sorted(set(pairs))
    q = len(pairs)
    if not 2 <= q <= 6:
        raise ValueError("co-degree sets have 2..6 pairs")
    g, r = t.graph, t.r
    used = 0
    eset = []
    for e, c in pairs:
        if not 0 <= e < g.edge_count:
            raise ValueError(f"edge id {e} out of range")
        if not 1 <= c <= r:
            raise ValueError(f"color {c} outside 1..{r}")
        used_bit = 1 << (c - 1)
        if used & used_bit:
            return 0  # repeated color
        used |= used_bit
        eset.append(e)
    if len(set(eset)) < q:
        return 0  # repeated edge with different colors
    eset = set(eset)
    total = 0
    for quad in k4_subgraphs(g):
        eids = _k4_edge_ids(g, quad)
        if not eset <= set(eids):
            continue
        ok = True
        rest = []
        for e in eids:
            m = t.masks[e]
            match = [c for ee, c in pairs if ee == e]
            if match:
                if not m >> (match[0] - 1) & 1:
                    ok = False
                    break
            else:
                rest.append(m)
        if ok:
            total += count_distinct_choices(rest, forbidden=used)
    return total


def max_codegree(t: Template, j: int, cap: int = DEFAULT_MATERIALIZE_CAP) -> int:
    """Maximum j-co-degree: structural for complete templates on K_n,
    otherwise computed from materialized hyperedges (capped)."""
    if not 2 <= j <= 6:
        raise ValueError("j must be in 2..6")
    if is_complete_on_complete_host(t):
        return structural_max_codegrees(t.graph.n, t.r)[j - 2]
    rows = materialize_rows(t, cap)
    return max_codegrees_from_rows(rows, t.graph.edge_count * t.r)[j - 2]


def build_rainbow_hypergraph(
    t: Template,
    materialize: bool = False,
    cap: int = DEFAULT_MATERIALIZE_CAP,
    stats_only: bool = False,
):
    """Stats of the rainbow hypergraph, optionally with explicit rows.

    Returns (stats, rows); rows is None unless materialize is set.  For a
    non-complete template whose hyperedge count exceeds the cap, co-degrees
    cannot be computed: stats_only returns them as None, otherwise the
    call refuses.
    """
    nv = t.graph.edge_count * t.r
    ne = count_rainbow_copies(t)
    avg = Fraction(ELL * ne, nv) if nv else Fraction(0)
    rows = None
    if materialize:
        rows = materialize_rows(t, cap)
        deltas = max_codegrees_from_rows(rows, nv)
    elif is_complete_on_complete_host(t):
        deltas = structural_max_codegrees(t.graph.n, t.r)
    elif ne <= cap:
        deltas = max_codegrees_from_rows(materialize_rows(t, cap), nv)
    elif stats_only:
        deltas = None
    else:
        raise CapExceeded(
            f"{ne} hyperedges exceeds cap {cap}; pass stats_only for partial stats",
            estimate=ne,
            cap=cap,
        )
    return RainbowHypergraphStats(nv, ne, avg, deltas), rows


# ---------------------------------------------------------------------------
# The co-degree functional and the hypothesis checks.

def delta_tau(stats: RainbowHypergraphStats, tau: Fraction) -> Fraction:
    """Exact evaluation of the weighted co-degree functional at rational tau."""
    tau = Fraction(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    if stats.average_degree == 0:
        raise ValueError("undefined average degree: hypergraph has no edges")
    if stats.max_codegrees is None:
        raise ValueError("co-degrees were not computed for these stats")
    total = Fraction(0)
    for i, (w, d) in enumerate(zip(DELTA_WEIGHTS, stats.max_codegrees)):
        total += w * d / (stats.average_degree * tau ** (i + 1))
    return DELTA_LEAD * total


@dataclass(frozen=True)
class ContainerConstants:
    """Exact handles on the threshold quantities at (n, r):
    epsilon = n^(-1/3) / ((r-1)(r-2)) and tau = sqrt(8640) * 512 * n^(-1/3),
    stored through their radical-free powers."""

    n: int
    r: int
    epsilon_cubed: Fraction
    tau_sixth: Fraction
    tau_threshold: Fraction = TAU_THRESHOLD
    c_ell_bound: int = C_ELL_BOUND

    def epsilon_interval(self, digits: int) -> tuple:
        cr = cbrt_interval(Fraction(self.n), digits)
        return iv_div(iv_exact(Fraction(1, (self.r - 1) * (self.r - 2))), cr)

    def tau_interval(self, digits: int) -> tuple:
        s = sqrt_interval(Fraction(TAU_RADICAND), digits)
        cr = cbrt_interval(Fraction(self.n), digits)
        return iv_div(iv_mul(iv_exact(TAU_FACTOR), s), cr)


def container_constants(n: int, r: int) -> ContainerConstants:
    if n < 1:
        raise ValueError("n must be >= 1")
    eps3 = Fraction(1, n * ((r - 1) * (r - 2)) ** 3)
    tau6 = Fraction(TAU_FACTOR ** 6 * TAU_RADICAND ** 3, n ** 2)
    return ContainerConstants(n, r, eps3, tau6)


@dataclass(frozen=True)
class HypothesisReport:
    n: int
    r: int
    vacuous: bool
    tau_ok: bool
    delta_ok: bool
    passes: bool
    details: dict


def _delta_condition_holds(n: int, r: int, digits: int = 40) -> bool:
    """Delta(H, tau) <= epsilon / (12 * 6!) for the complete template on
    K_n, with structural co-degrees; decided by certified intervals."""
    deltas = structural_max_codegrees(n, r)
    if all(d == 0 for d in deltas):
        return True  # empty hypergraph: the functional is identically zero
    davg = structural_average_degree(n, r)
    cc = container_constants(n, r)
    d = digits
    while d <= 1400:
        tau = cc.tau_interval(d)
        lhs = iv_exact(0)
        for i, (w, dd) in enumerate(zip(DELTA_WEIGHTS, deltas)):
            term = iv_div(iv_exact(DELTA_LEAD * w * dd / davg), iv_pow(tau, i + 1))
            lhs = iv_add(lhs, term)
        rhs = iv_div(cc.epsilon_interval(d), iv_exact(DELTA_BOUND_DENOM))
        verdict = iv_le(lhs, rhs)
        if verdict is not None:
            return verdict
        d *= 2
    raise RuntimeError(f"delta condition undecided at n={n}, r={r}")


def _hypothesis_flags(n: int, r: int, digits: int = 40) -> tuple:
    """(vacuous, tau_ok, delta_ok) without any report plumbing.  The tau
    condition is a pure integer comparison and is checked first."""
    cc = container_constants(n, r)
    vacuous = r < 6 or n < 4  # no rainbow copies, empty hypergraph
    tau_ok = cc.tau_sixth < TAU_THRESHOLD ** 6
    if vacuous:
        return vacuous, tau_ok, True
    return vacuous, tau_ok, _delta_condition_holds(n, r, digits)


def container_hypothesis_check(n: int, r: int, digits: int = 40) -> HypothesisReport:
    """Evaluate both container hypothesis conditions for the complete
    template on K_n: tau below its threshold (decided by sixth powers) and
    the co-degree functional below epsilon / (12 * 6!)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    cc = container_constants(n, r)
    vacuous, tau_ok, delta_ok = _hypothesis_flags(n, r, digits)
    eps = cc.epsilon_interval(digits)
    tau = cc.tau_interval(digits)
    details = {
        "ell": ELL,
        "epsilon_cubed": cc.epsilon_cubed,
        "tau_sixth": cc.tau_sixth,
        "tau_threshold": TAU_THRESHOLD,
        "epsilon_interval": eps,
        "tau_interval": tau,
        "epsilon_below_half": 8 * cc.epsilon_cubed < 1,
        "delta_bound_denominator": DELTA_BOUND_DENOM,
        "codegrees": structural_max_codegrees(n, r),
        "average_degree": structural_average_degree(n, r),
        "hypergraph_edges": structural_edge_count(n, r),
        "c_ell_bound": C_ELL_BOUND,
    }
    if tau[1] < 1 and eps[1] < 1:
        # reported size of the container-family exponent:
        # c * N * tau * ln(1/eps) * ln(1/tau)
        nv = r * comb(n, 2)
        ln_inv_eps = _ln_inverse_interval(eps)
        ln_inv_tau = _ln_inverse_interval(tau)
        expo = iv_mul(
            iv_mul(iv_exact(C_ELL_BOUND * nv), tau), iv_mul(ln_inv_eps, ln_inv_tau)
        )
        details["conclusion_exponent"] = expo
    return HypothesisReport(
        n=n,
        r=r,
        vacuous=vacuous,
        tau_ok=tau_ok,
        delta_ok=delta_ok,
        passes=tau_ok and delta_ok,
        details=details,
    )


def _ln_inverse_interval(x: tuple) -> tuple:
    lo, hi = ln_interval(x[0]), ln_interval(x[1])
    return -hi[1], -lo[0]


def min_n_for_container(r: int) -> int:
    """Least n at which both hypothesis conditions hold, by exact binary
    search (the pass predicate is monotone in n)."""
    if r < 6:
        raise ValueError("r must be >= 6 (smaller r has an empty hypergraph)")

    def passes(n):
        _, tau_ok, delta_ok = _hypothesis_flags(n, r)
        return tau_ok and delta_ok

    hi = 1
    while not passes(hi):
        hi *= 2
    lo = hi // 2  # passes(lo) is False (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi
