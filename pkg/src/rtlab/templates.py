"""Color-list templates on a host graph and rainbow K4 counting.

A template assigns each edge a subset of the colors 1..r; an edge coloring
is the all-singleton special case.  A rainbow copy of K4 is a choice of
six (edge, color) pairs whose edges form a K4 and whose colors are
pairwise distinct, each drawn from its edge's list.

Lists are stored as bitmasks (bit c-1 set means color c is allowed);
user-facing colors are always the integers 1..r.
"""

from __future__ import annotations

import itertools
import json

from .errors import UnsupportedSizeError
from .graphs import Graph, k4_subgraphs, parse_graph6, write_graph6

MAX_COLORS = 64


class Template:
    """Per-edge color lists over a fixed host graph.  Immutable."""

    __slots__ = ("graph", "r", "masks")

    def __init__(self, graph: Graph, r: int, masks):
        if not 1 <= r <= MAX_COLORS:
            raise UnsupportedSizeError(f"color count {r} outside 1..{MAX_COLORS}")
        masks = tuple(masks)
        if len(masks) != graph.edge_count:
            raise ValueError(
                f"need {graph.edge_count} lists, got {len(masks)}"
            )
        full = (1 << r) - 1
        for i, m in enumerate(masks):
            if m & ~full:
                raise ValueError(f"list for edge {i} has colors outside 1..{r}")
        self.graph = graph
        self.r = r
        self.masks = masks

    def list_of(self, edge_id: int) -> tuple:
        """Colors of one edge list, ascending, 1-based."""
        m = self.masks[edge_id]
        return tuple(c + 1 for c in range(self.r) if m >> c & 1)

    def list_size(self, edge_id: int) -> int:
        return bin(self.masks[edge_id]).count("1")

    def lists(self) -> tuple:
        return tuple(self.list_of(i) for i in range(len(self.masks)))

    def __eq__(self, other):
        return (
            isinstance(other, Template)
            and self.graph == other.graph
            and self.r == other.r
            and self.masks == other.masks
        )

    def __hash__(self):
        return hash((self.graph, self.r, self.masks))

    def __repr__(self):
        return f"Template(n={self.graph.n}, m={self.graph.edge_count}, r={self.r})"


def colors_to_mask(colors, r: int) -> int:
    m = 0
    for c in colors:
        if not 1 <= c <= r:
            raise ValueError(f"color {c} outside 1..{r}")
        m |= 1 << (c - 1)
    return m


def complete_template(g: Graph, r: int) -> Template:
    full = (1 << r) - 1
    return Template(g, r, (full,) * g.edge_count)


def from_coloring(g: Graph, colors, r: int) -> Template:
    """Singleton-list template of an edge coloring (one color per EdgeId)."""
    colors = list(colors)
    if len(colors) != g.edge_count:
        raise ValueError(f"need {g.edge_count} colors, got {len(colors)}")
    return Template(g, r, tuple(colors_to_mask([c], r) for c in colors))


def is_subtemplate(a: Template, b: Template) -> bool:
    if a.graph != b.graph or a.r != b.r:
        raise ValueError("incompatible templates: host graph and r must match")
    return all(ma & ~mb == 0 for ma, mb in zip(a.masks, b.masks))


def intersect_templates(a: Template, b: Template) -> Template:
    if a.graph != b.graph or a.r != b.r:
        raise ValueError("incompatible templates: host graph and r must match")
    return Template(a.graph, a.r, tuple(x & y for x, y in zip(a.masks, b.masks)))


def lift_template(t: Template, threshold: int = 6) -> Template:
    """Replace every list of size >= threshold by the full color set."""
    full = (1 << t.r) - 1
    return Template(
        t.graph,
        t.r,
        tuple(full if bin(m).count("1") >= threshold else m for m in t.masks),
    )


def list_product(t: Template, v: int) -> int:
    """Product of list sizes over the host edges at v (empty product = 1)."""
    if not 0 <= v < t.graph.n:
        raise ValueError(f"vertex {v} out of range")
    out = 1
    m = t.graph.adj[v]
    while m:
        b = m & -m
        u = b.bit_length() - 1
        m ^= b
        out *= t.list_size(t.graph.edge_id(v, u))
    return out


def r_neighborhood(t: Template, v: int) -> int:
    """Bitset of neighbors joined to v by a full list (|L(uv)| = r)."""
    if not 0 <= v < t.graph.n:
        raise ValueError(f"vertex {v} out of range")
    full = (1 << t.r) - 1
    out = 0
    m = t.graph.adj[v]
    while m:
        b = m & -m
        u = b.bit_length() - 1
        m ^= b
        if t.masks[t.graph.edge_id(v, u)] == full:
            out |= b
    return out


# ---------------------------------------------------------------------------
# Counting distinct-color selections.  Per K4 this is the permanent of the
# 6-row list/color incidence structure; it is computed by a subset DP over
# the six edges (process colors one at a time, each color taken by at most
# one edge), which costs r * 2^6 * 6 instead of visiting every selection.

def count_distinct_choices(masks, forbidden: int = 0) -> int:
    """Number of ways to pick pairwise-distinct colors c_i from masks[i],
    avoiding colors in `forbidden`.  Empty mask list counts 1."""
    q = len(masks)
    if q == 0:
        return 1
    avail = 0
    for m in masks:
        if m & ~forbidden == 0:
            return 0
        avail |= m
    avail &= ~forbidden
    if bin(avail).count("1") < q:
        return 0
    full = (1 << q) - 1
    f = [0] * (full + 1)
    f[0] = 1
    rng = range(q)
    while avail:
        bit = avail & -avail
        avail ^= bit
        which = [i for i in rng if masks[i] & bit]
        for s in range(full, -1, -1):
            fs = f[s]
            if fs:
                for i in which:
                    ib = 1 << i
                    if not s & ib:
                        f[s | ib] += fs
    return f[full]


def _k4_edge_ids(g: Graph, quad) -> tuple:
    a, b, c, d = quad
    return (
        g.edge_id(a, b),
        g.edge_id(a, c),
        g.edge_id(a, d),
        g.edge_id(b, c),
        g.edge_id(b, d),
        g.edge_id(c, d),
    )


def count_rainbow_copies(t: Template) -> int:
    """Exact number of rainbow K4 copies in the template."""
    total = 0
    for quad in k4_subgraphs(t.graph):
        eids = _k4_edge_ids(t.graph, quad)
        total += count_distinct_choices([t.masks[e] for e in eids])
    return total


def has_rainbow_k4(t: Template) -> bool:
    for quad in k4_subgraphs(t.graph):
        eids = _k4_edge_ids(t.graph, quad)
        if count_distinct_choices([t.masks[e] for e in eids]):
            return True
    return False


def _iter_selections(eids, masks):
    """Backtracking enumeration of distinct-color selections, visiting the
    smallest lists first so dead branches die early."""
    order = sorted(range(6), key=lambda i: (bin(masks[i]).count("1"), i))
    chosen = [0] * 6

    def rec(pos: int, used: int):
        if pos == 6:
            yield tuple(
                sorted((eids[i], chosen[i].bit_length()) for i in range(6))
            )
            return
        i = order[pos]
        m = masks[i] & ~used
        while m:
            bit = m & -m
            m ^= bit
            chosen[i] = bit
            yield from rec(pos + 1, used | bit)

    yield from rec(0, 0)


def rainbow_copies(t: Template):
    """Yield every rainbow copy as a tuple of six (edge_id, color) pairs
    sorted by edge id.  K4s are visited in lexicographic vertex order."""
    full = (1 << t.r) - 1
    for quad in k4_subgraphs(t.graph):
        eids = _k4_edge_ids(t.graph, quad)
        masks = [t.masks[e] for e in eids]
        if all(m == full for m in masks):
            # complete lists: selections are exactly the 6-permutations
            for perm in itertools.permutations(range(1, t.r + 1), 6):
                yield tuple(sorted(zip(eids, perm)))
        else:
            yield from _iter_selections(eids, masks)


def count_rainbow_copies_through_triangle(
    t: Template, tri, sub: Graph = None, count_subgraphs: bool = False
) -> int:
    """Rainbow copies whose underlying K4 lies inside `sub` and contains the
    triangle `tri`.  Counts (edge, color) pair sets by default; with
    count_subgraphs=True it counts underlying K4 subgraphs that admit at
    least one rainbow selection instead."""
    g = t.graph
    if sub is None:
        sub = g
    if sub.n != g.n or not set(sub.edges) <= set(g.edges):
        raise ValueError("sub must be a subgraph of the template host")
    a, b, c = tri
    if len({a, b, c}) != 3 or not (
        sub.has_edge(a, b) and sub.has_edge(a, c) and sub.has_edge(b, c)
    ):
        raise ValueError(f"{tri} is not a triangle of the subgraph")
    total = 0
    ext = sub.adj[a] & sub.adj[b] & sub.adj[c]
    while ext:
        bit = ext & -ext
        w = bit.bit_length() - 1
        ext ^= bit
        quad = tuple(sorted((a, b, c, w)))
        eids = _k4_edge_ids(g, quad)
        cnt = count_distinct_choices([t.masks[e] for e in eids])
        total += (1 if cnt else 0) if count_subgraphs else cnt
    return total


# ---------------------------------------------------------------------------
# Serialization: JSON object {graph: graph6, r: int, lists: [[colors]]}
# with lists indexed by EdgeId.

def template_to_dict(t: Template) -> dict:
    return {
        "graph": write_graph6(t.graph),
        "r": t.r,
        "lists": [list(t.list_of(i)) for i in range(t.graph.edge_count)],
    }


def template_from_dict(d: dict) -> Template:
    g = parse_graph6(d["graph"])
    r = int(d["r"])
    lists = d["lists"]
    if len(lists) != g.edge_count:
        raise ValueError(
            f"template has {len(lists)} lists but graph has {g.edge_count} edges"
        )
    return Template(g, r, tuple(colors_to_mask(colors, r) for colors in lists))


def template_to_json(t: Template) -> str:
    return json.dumps(template_to_dict(t), sort_keys=True)


def template_from_json(s: str) -> Template:
    return template_from_dict(json.loads(s))
