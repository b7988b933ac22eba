"""Decidable points of the path-space dynamics and its quotient.

The full boundary path space contains every finite path into a sink plus
all infinite paths.  This module restricts to the decidable points: sink
paths and eventually periodic infinite paths stored as a lasso (finite
prefix plus repeating cycle).  These include every periodic point, which
is all the dichotomy analysis needs.

Eventual equality compares tails at equal indices.  For two lassos that
reduces to equality of their anchored primitive cycles: every eventually
periodic word is tail-equivalent to exactly one purely periodic word,
obtained by unrolling the cycle back to index zero.  For sink paths the
relation is equal length and equal terminal sink; paths of different
lengths into the same sink stay inequivalent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .graph import (condition_K, condition_L, is_minimal, loop_exits, path_at,
                    path_from_edges, path_len, path_range, paths_into,
                    simple_loops)


@dataclass(frozen=True)
class PathPoint:
    """A sink path or a lasso; construct via sink_path() or lasso()."""

    kind: str                  # "sink" or "lasso"
    head: tuple                # path tuple; for sink points the whole path
    cycle: tuple = ()          # edge tuple (no anchor); empty for sink points

    def is_sink_path(self):
        return self.kind == "sink"

    def base_vertex(self, g, m):
        """Range of the m-th edge of the underlying word (source for m=0),
        or None beyond the end of a sink path."""
        if m == 0:
            return self.head[0]
        if self.kind == "sink":
            return g.dst(self.head[m]) if m <= path_len(self.head) else None
        k = path_len(self.head)
        if m <= k:
            return g.dst(self.head[m])
        e = self.cycle[(m - k - 1) % len(self.cycle)]
        return g.dst(e)

    def edge_at(self, m):
        """m-th edge (0-based) of the underlying word, or None past a sink."""
        k = path_len(self.head)
        if m < k:
            return self.head[m + 1]
        if self.kind == "sink":
            return None
        return self.cycle[(m - k) % len(self.cycle)]

    def prefix(self, k):
        """Initial segment of length k as a path tuple, or None if too long."""
        if k == 0:
            return path_at(self.head[0])
        edges = []
        for m in range(k):
            e = self.edge_at(m)
            if e is None:
                return None
            edges.append(e)
        return (self.head[0],) + tuple(edges)


def sink_path(g, path) -> PathPoint:
    if path_range(g, path) not in g.sinks:
        raise ValueError("path does not end at a sink")
    return PathPoint("sink", tuple(path))


def _primitive(cycle):
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(cycle[:d]) * (n // d) == tuple(cycle):
            return tuple(cycle[:d])
    return tuple(cycle)


def lasso(g, prefix, cycle_edges) -> PathPoint:
    """Eventually periodic point prefix . cycle^infinity, canonicalized.

    Canonical form has a primitive cycle and the shortest prefix: while the
    last prefix edge equals the last cycle edge the prefix shrinks and the
    cycle rotates right, which leaves the underlying word unchanged.
    """
    cycle_edges = tuple(cycle_edges)
    if not cycle_edges:
        raise ValueError("empty cycle")
    cpath = path_from_edges(g, cycle_edges)
    if path_range(g, cpath) != cpath[0]:
        raise ValueError("cycle does not close up")
    prefix = tuple(prefix)
    if path_range(g, prefix) != cpath[0]:
        raise ValueError("prefix does not end at the cycle start")
    cycle_edges = _primitive(cycle_edges)
    pedges = list(prefix[1:])
    cyc = list(cycle_edges)
    while pedges and pedges[-1] == cyc[-1]:
        pedges.pop()
        cyc = [cyc[-1]] + cyc[:-1]
    start = g.src(pedges[0]) if pedges else g.src(cyc[0])
    return PathPoint("lasso", (start,) + tuple(pedges), tuple(cyc))


def canonicalize(g, p: PathPoint) -> PathPoint:
    if p.kind == "sink":
        return p
    return lasso(g, p.head, p.cycle)


# -- text syntax -------------------------------------------------------------


def format_point(g, p: PathPoint) -> str:
    if p.kind == "sink":
        if path_len(p.head) == 0:
            return "!%s" % g.vertices[p.head[0]]
        return ".".join(g.edge_names[e] for e in p.head[1:]) + "!"
    head = ".".join(g.edge_names[e] for e in p.head[1:])
    loop = "(%s)*" % ".".join(g.edge_names[e] for e in p.cycle)
    return head + "." + loop if head else loop


def parse_point(g, text) -> PathPoint:
    """Parse 'e1.e2.(e3.e4)*' lassos, 'e1.e2!' sink paths, '!v' vertex points."""
    text = text.strip()
    if text.startswith("!"):
        name = text[1:]
        if name not in g.vertex_index:
            raise ParseError("unknown vertex %r" % name)
        v = g.vertex_index[name]
        if v not in g.sinks:
            raise ParseError("vertex %r is not a sink" % name)
        return PathPoint("sink", path_at(v))

    def resolve(names):
        out = []
        for nm in names:
            if nm not in g.edge_index:
                raise ParseError("unknown edge %r" % nm)
            out.append(g.edge_index[nm])
        return out

    try:
        if text.endswith("!"):
            edges = resolve(n for n in text[:-1].split(".") if n)
            if not edges:
                raise ParseError("empty sink path")
            return sink_path(g, path_from_edges(g, edges))
        if "(" in text:
            head, _, rest = text.partition("(")
            if not rest.endswith(")*"):
                raise ParseError("lasso must end with ')*'")
            cyc = resolve(n for n in rest[:-2].split(".") if n)
            pre = resolve(n for n in head.rstrip(".").split(".") if n)
            if not cyc:
                raise ParseError("empty cycle")
            cyc_path = path_from_edges(g, cyc)
            prefix = path_from_edges(g, pre) if pre else path_at(cyc_path[0])
            return lasso(g, prefix, cyc)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc))
    raise ParseError("unrecognized point syntax %r" % text)


# -- shift and eventual equality ---------------------------------------------


def shift(g, p: PathPoint) -> PathPoint:
    """Drop the first edge; vertex sink points are outside the domain."""
    if p.kind == "sink":
        if path_len(p.head) == 0:
            raise ValueError("vertex sink point has no shift")
        if path_len(p.head) == 1:
            return PathPoint("sink", path_at(g.dst(p.head[1])))
        return PathPoint("sink", (g.dst(p.head[1]),) + p.head[2:])
    if path_len(p.head) > 0:
        new_head = ((g.dst(p.head[1]),) + p.head[2:] if path_len(p.head) > 1
                    else path_at(path_range(g, p.head)))
        return lasso(g, new_head, p.cycle)
    rotated = p.cycle[1:] + p.cycle[:1]
    return lasso(g, path_at(g.src(rotated[0])), rotated)


def anchored_cycle(p: PathPoint):
    """The rotation of the primitive cycle that, repeated from index zero,
    is tail-equivalent to the point."""
    if p.kind != "lasso":
        raise ValueError("sink paths have no cycle")
    k = len(p.cycle)
    j = (-path_len(p.head)) % k
    return p.cycle[j:] + p.cycle[:j]


def eventually_equal(g, p: PathPoint, q: PathPoint) -> bool:
    """Tails agree from some index on (same-index comparison).

    Sink paths: equal length and equal terminal sink.  Lassos: equal
    anchored primitive cycles.  Mixed kinds are never equivalent.
    """
    if p.kind != q.kind:
        return False
    if p.kind == "sink":
        return (path_len(p.head) == path_len(q.head)
                and path_range(g, p.head) == path_range(g, q.head))
    return anchored_cycle(canonicalize(g, p)) == anchored_cycle(canonicalize(g, q))


# -- quotient classes ---------------------------------------------------------


@dataclass(frozen=True)
class QuotientClass:
    """Eventual-equality class, held by a canonical representative.

    Lasso classes are represented by their purely periodic point; sink
    classes by the lexicographically least path of the right length into
    the right sink.
    """

    representative: PathPoint

    def point(self):
        return self.representative


def class_of(g, p: PathPoint) -> QuotientClass:
    if p.kind == "lasso":
        cyc = anchored_cycle(canonicalize(g, p))
        return QuotientClass(lasso(g, path_at(g.src(cyc[0])), cyc))
    n = path_len(p.head)
    w = path_range(g, p.head)
    return QuotientClass(PathPoint("sink", _lex_least_path_into(g, w, n)))


def _lex_least_path_into(g, w, n):
    if n == 0:
        return path_at(w)
    # reach[k]: vertices with a path of length exactly k to w
    reach = [{w}]
    for _ in range(n):
        prev = reach[-1]
        reach.append({g.src(e) for v in prev for e in g.in_edges[v]})
    if not reach[n]:
        raise ValueError("no path of length %d into %s" % (n, g.vertices[w]))
    edges = []
    current = None
    for k in range(n, 0, -1):
        starts = sorted(reach[k]) if current is None else [current]
        candidates = [e for v in starts for e in g.out_edges[v]
                      if g.dst(e) in reach[k - 1]]
        e = min(candidates)
        edges.append(e)
        current = g.dst(e)
    return path_from_edges(g, edges)


def shift_class(g, c: QuotientClass) -> QuotientClass:
    return class_of(g, shift(g, c.representative))


def shift_inverse_class(g, c: QuotientClass) -> QuotientClass:
    """Preimage class under the shift: prepend any admissible edge.

    Well defined because prepending different edges, or prepending onto
    different representatives, leaves the tail unchanged.  A sink class has
    a preimage exactly when a one-longer path into its sink exists.
    """
    rep = c.representative
    if rep.kind == "lasso":
        e = min(g.in_edges[rep.head[0]])
        return class_of(g, lasso(g, (g.src(e), e), rep.cycle))
    n = path_len(rep.head)
    w = path_range(g, rep.head)
    try:
        longer = _lex_least_path_into(g, w, n + 1)
    except ValueError:
        raise ValueError("class has no shift preimage: every representative "
                         "starts at a source")
    return QuotientClass(PathPoint("sink", longer))


# -- basis sets of the quotient topology --------------------------------------


def _reaches_base(g, point: PathPoint, v, n) -> bool:
    """Is there a path from v of some length d landing on the point's base
    vertex at position n + d?

    For sink points only positions up to the path length exist.  For lassos
    the pair (reachable-set, position phase) evolves through finitely many
    states, so the scan is exact: it stops when a joint state repeats.
    """
    if point.kind == "sink":
        klen = path_len(point.head)
        if n > klen:
            return False
        current = {v}
        for d in range(klen - n + 1):
            if point.base_vertex(g, n + d) in current:
                return True
            current = {g.dst(e) for u in current for e in g.out_edges[u]}
        return False
    plen = path_len(point.head)
    cyc = len(point.cycle)
    current = frozenset([v])
    d = 0
    seen = set()
    while True:
        if point.base_vertex(g, n + d) in current:
            return True
        if n + d >= plen:
            state = (current, (n + d - plen) % cyc)
            if state in seen:
                return False
            seen.add(state)
        current = frozenset(g.dst(e) for u in current for e in g.out_edges[u])
        d += 1


def in_basis_set(g, c: QuotientClass, v, n) -> bool:
    """Membership of the class in the basic open set U_{v,n}.

    Well defined on classes: a witness path can always be slid forward
    along the point, so membership only depends on the tail.
    """
    if isinstance(v, str):
        v = g.vertex_index[v]
    if not paths_into(g, v, n):
        raise ValueError("U_{v,n} requires v to receive a length-n path")
    return _reaches_base(g, c.representative, v, n)


# -- orbits and ancestor diagrams ---------------------------------------------


def exit_free_loops(g):
    return [loop for loop in simple_loops(g) if not loop_exits(g, loop)]


def periodic_orbits(g):
    """One orbit per exit-free loop: the classes of all rotations of the
    periodic point, in shift order."""
    orbits = []
    for loop in exit_free_loops(g):
        edges = loop[1:]
        orbit = []
        point = lasso(g, path_at(g.src(edges[0])), edges)
        for _ in range(len(edges)):
            orbit.append(class_of(g, point))
            point = shift(g, point)
        orbits.append(orbit)
    return orbits


def ancestors_diagram(g, point: PathPoint, n_levels):
    """Levelwise node sets of ancestors of the point's base vertices.

    Graph node v at level m is an ancestor when some path from v of length
    d reaches the base vertex at position m + d; for sink points the frozen
    tail node beyond the path length belongs to the point itself.
    Returns a list over levels of sorted node labels.
    """
    out = []
    klen = path_len(point.head) if point.kind == "sink" else None
    for m in range(n_levels + 1):
        nodes = []
        for v in range(g.n_vertices):
            if paths_into(g, v, m) and _reaches_base(g, point, v, m):
                # a sink block is frozen from birth, so it carries its level
                if v in g.sinks:
                    nodes.append("%s^(%d)" % (g.vertices[v], m))
                else:
                    nodes.append(g.vertices[v])
        if point.kind == "sink" and m > klen:
            w = path_range(g, point.head)
            nodes.append("%s^(%d)" % (g.vertices[w], klen))
        out.append(sorted(nodes))
    return out


def dichotomy_report(g):
    """Dichotomy verdicts with witnesses.

    When condition (L) fails the witnesses are the periodic orbits of the
    exit-free loops; when it holds, each loop is listed with a refuting
    exit edge.
    """
    loops = simple_loops(g)
    loop_info = []
    for loop in loops:
        exits = loop_exits(g, loop)
        loop_info.append({
            "loop": [g.edge_names[e] for e in loop[1:]],
            "exits": [g.edge_names[e] for e in exits],
            "exit_free": not exits,
        })
    orbits = [[format_point(g, c.point()) for c in orbit] for orbit in periodic_orbits(g)]
    return {
        "condition_L": condition_L(g),
        "condition_K": condition_K(g),
        "minimal": is_minimal(g),
        "loops": loop_info,
        "periodic_orbits": orbits,
    }
