"""Finite directed multigraphs and their combinatorial decision procedures.

Orientation convention: an edge e runs from s(e) to r(e), paths compose
left to right (r(mu_i) = s(mu_{i+1})), and n_v counts edges RECEIVED by v.
The Cuntz-Krieger relation reads S*_e S_e = P_{r(e)}.  Most graph-algebra
software uses the opposite convention, so matrices produced here are the
transposes of what such tools would print.

Paths are encoded as tuples (start_vertex_index, edge_index, ...); the
one-element tuple (v,) is the length-0 path anchored at v.  Edge indices
follow declaration order, which is also the lexicographic order used for
all canonical forms.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundExceededError, OracleMismatchError, ParseError

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class Graph:
    """Finite directed multigraph with named vertices and ordered edges."""

    def __init__(self, vertices, edges, edge_names=None):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        for v in self.vertices:
            if not _NAME_RE.match(v):
                raise ValueError("bad vertex name %r" % (v,))
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = tuple((int(s), int(r)) for s, r in edges)
        n = len(self.vertices)
        for s, r in self.edges:
            if not (0 <= s < n and 0 <= r < n):
                raise ValueError("edge endpoint out of range")
        if edge_names is None:
            edge_names = tuple("e%d" % (i + 1) for i in range(len(self.edges)))
        self.edge_names = tuple(edge_names)
        if len(set(self.edge_names)) != len(self.edge_names):
            raise ValueError("duplicate edge names")
        self.edge_index = {name: i for i, name in enumerate(self.edge_names)}
        self.out_edges = tuple(
            tuple(i for i, (s, _) in enumerate(self.edges) if s == v) for v in range(n))
        self.in_edges = tuple(
            tuple(i for i, (_, r) in enumerate(self.edges) if r == v) for v in range(n))
        self.n_in = tuple(len(self.in_edges[v]) for v in range(n))
        self.sinks = frozenset(v for v in range(n) if not self.out_edges[v])
        self.sources = frozenset(v for v in range(n) if not self.in_edges[v])

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def src(self, e):
        return self.edges[e][0]

    def dst(self, e):
        return self.edges[e][1]

    def __eq__(self, other):
        return (isinstance(other, Graph)
                and self.vertices == other.vertices and self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return "Graph(%d vertices, %d edges)" % (self.n_vertices, self.n_edges)


# ---------------------------------------------------------------------------
# Paths


def path_at(v):
    """Length-0 path anchored at vertex index v."""
    return (v,)


def path_from_edges(g, edge_ids):
    edge_ids = tuple(edge_ids)
    if not edge_ids:
        raise ValueError("empty edge list needs an anchor; use path_at")
    p = (g.src(edge_ids[0]),) + edge_ids
    _validate_path(g, p)
    return p


def _validate_path(g, p):
    for a, b in zip(p[1:], p[2:]):
        if g.dst(a) != g.src(b):
            raise ValueError("edges do not compose: %s" % (p,))
    if len(p) > 1 and g.src(p[1]) != p[0]:
        raise ValueError("anchor does not match first edge")


def path_len(p):
    return len(p) - 1

def path_source(g, p):
    return p[0]

def path_range(g, p):
    return g.dst(p[-1]) if len(p) > 1 else p[0]

def path_concat(g, p, q):
    """Concatenation p then q; requires r(p) = s(q)."""
    if path_range(g, p) != q[0]:
        raise ValueError("paths do not compose")
    return p + q[1:]

def path_edges(p):
    return p[1:]

def format_path(g, p):
    if len(p) == 1:
        return g.vertices[p[0]]
    return ".".join(g.edge_names[e] for e in p[1:])


def paths_of_length(g, n):
    """All paths of length n in lexicographic (edge index) order."""
    if n == 0:
        return [path_at(v) for v in range(g.n_vertices)]
    out = []

    def grow(p, k):
        if k == 0:
            out.append(p)
            return
        for e in g.out_edges[path_range(g, p)]:
            grow(p + (e,), k - 1)

    for v in range(g.n_vertices):
        grow(path_at(v), n)
    return out


def paths_into(g, v, n):
    """Paths of length n with range v, lexicographic order."""
    return [p for p in paths_of_length(g, n) if path_range(g, p) == v]


def count_paths_into(g, n):
    """Vector m with m[v] = number of length-n paths ending at v."""
    m = [1] * g.n_vertices
    for _ in range(n):
        nxt = [0] * g.n_vertices
        for e in range(g.n_edges):
            s, r = g.edges[e]
            nxt[r] += m[s]
        m = nxt
    return m


# ---------------------------------------------------------------------------
# Parsing and serialization


def parse_graph(text, strict=False):
    """Parse the line-oriented text format or the JSON object format.

    Text lines are ``vertex <name>`` declarations or ``<src> -> <dst>``
    edges; ``#`` starts a comment; repeated edge lines denote parallel
    edges.  Vertices are ordered by first mention unless declared.  In
    strict mode an edge may only reference declared vertices.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("invalid JSON: %s" % exc, line=exc.lineno)
        return graph_from_json_obj(obj)

    vertices = []
    seen = set()
    declared = set()
    edges = []

    def intern(name, line_no, is_decl):
        if not _NAME_RE.match(name):
            raise ParseError("bad name %r" % name, line=line_no)
        if name not in seen:
            if strict and not is_decl:
                raise ParseError("undeclared vertex %r" % name, line=line_no)
            seen.add(name)
            vertices.append(name)
        return name

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertex "):
            name = line[len("vertex "):].strip()
            if name in declared:
                raise ParseError("duplicate vertex declaration %r" % name, line=line_no)
            declared.add(name)
            intern(name, line_no, True)
            continue
        if "->" in line:
            left, _, right = line.partition("->")
            src, dst = left.strip(), right.strip()
            if not src or not dst:
                raise ParseError("malformed edge line %r" % raw.strip(), line=line_no)
            intern(src, line_no, False)
            intern(dst, line_no, False)
            edges.append((src, dst))
            continue
        raise ParseError("unrecognized line %r" % raw.strip(), line=line_no)

    index = {v: i for i, v in enumerate(vertices)}
    return Graph(vertices, [(index[s], index[r]) for s, r in edges])


def graph_from_json_obj(obj):
    try:
        vertices = list(obj["vertices"])
        raw_edges = list(obj["edges"])
    except (KeyError, TypeError) as exc:
        raise ParseError("expected keys 'vertices' and 'edges' (%s)" % exc)
    names = [str(v) for v in vertices]
    index = {v: i for i, v in enumerate(names)}
    edges = []
    for k, e in enumerate(raw_edges):
        try:
            s, r = str(e["src"]), str(e["dst"])
        except (KeyError, TypeError):
            raise ParseError("edge %d needs 'src' and 'dst'" % k)
        if s not in index or r not in index:
            raise ParseError("edge %d references undeclared vertex" % k)
        edges.append((index[s], index[r]))
    return Graph(names, edges)


def graph_to_text(g):
    lines = ["vertex %s" % v for v in g.vertices]
    lines += ["%s -> %s" % (g.vertices[s], g.vertices[r]) for s, r in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_json_obj(g):
    return {
        "vertices": list(g.vertices),
        "edges": [{"src": g.vertices[s], "dst": g.vertices[r]} for s, r in g.edges],
    }


def graph_to_dot(g):
    lines = ["digraph {"]
    for v in g.vertices:
        lines.append('  "%s";' % v)
    for i, (s, r) in enumerate(g.edges):
        lines.append('  "%s" -> "%s" [label="%s"];'
                     % (g.vertices[s], g.vertices[r], g.edge_names[i]))
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix of exact rationals indexed by the vertex order."""

    entries: tuple
    labels: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)

    @property
    def size(self):
        return len(self.entries)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def mul(self, other):
        n = self.size
        bt = list(zip(*other.entries))
        rows = tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
                     for row in self.entries)
        return RationalMatrix(rows, self.labels)

    def power(self, n):
        result = RationalMatrix(
            tuple(tuple(Fraction(int(i == j)) for j in range(self.size))
                  for i in range(self.size)), self.labels)
        for _ in range(n):
            result = result.mul(self)
        return result

    def column_sums(self):
        return [sum(self.entries[i][j] for i in range(self.size))
                for j in range(self.size)]

    def to_json(self):
        return [[str(x) for x in row] for row in self.entries]


def adjacency_matrix(g) -> RationalMatrix:
    """A(v, w) = number of edges from v to w."""
    n = g.n_vertices
    a = [[0] * n for _ in range(n)]
    for s, r in g.edges:
        a[s][r] += 1
    return RationalMatrix(tuple(tuple(row) for row in a), g.vertices)


def transition_matrix(g) -> RationalMatrix:
    """Column-normalized adjacency: entry (v, w) is A(v, w)/n_w, 0 if no edge."""
    a = adjacency_matrix(g)
    rows = []
    for v in range(g.n_vertices):
        row = []
        for w in range(g.n_vertices):
            c = a[v, w]
            row.append(c / g.n_in[w] if c else Fraction(0))
        rows.append(tuple(row))
    return RationalMatrix(tuple(rows), g.vertices)


def is_partially_stochastic(m: RationalMatrix) -> bool:
    """True when every column sums to exactly 0 or exactly 1."""
    for row in m.entries:
        for x in row:
            if x < 0:
                raise ValueError("negative entry %s" % x)
    return all(s == 0 or s == 1 for s in m.column_sums())


# ---------------------------------------------------------------------------
# Interaction powers (dual oracle)


def powers_by_stochastic(g, n_max):
    """{n <= n_max : the n-th power of the transition matrix is partially stochastic}."""
    p = transition_matrix(g)
    result = set()
    q = p
    for n in range(1, n_max + 1):
        if is_partially_stochastic(q):
            result.add(n)
        q = q.mul(p)
    return result


def powers_by_path_condition(g, n_max):
    """{n : no length-n path shares its range with a shorter source-rooted path}."""
    nv = g.n_vertices
    # reach[k][w]: some length-k path ends at w; src_reach: one starting at a source
    reach = [[True] * nv]
    src_reach = [[v in g.sources for v in range(nv)]]
    for _ in range(n_max):
        prev_r, prev_s = reach[-1], src_reach[-1]
        nr = [False] * nv
        ns = [False] * nv
        for e in range(g.n_edges):
            s, r = g.edges[e]
            if prev_r[s]:
                nr[r] = True
            if prev_s[s]:
                ns[r] = True
        reach.append(nr)
        src_reach.append(ns)
    result = set()
    for n in range(1, n_max + 1):
        bad = any(
            reach[n][w] and any(src_reach[k][w] for k in range(n))
            for w in range(nv))
        if not bad:
            result.add(n)
    return result


def interaction_powers(g, n_max):
    """Powers n <= n_max whose iterated pair still satisfies the interaction axioms.

    Computed twice, by the partially-stochastic matrix criterion and by the
    path criterion, and asserted equal; a mismatch is an implementation bug.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    a = powers_by_stochastic(g, n_max)
    b = powers_by_path_condition(g, n_max)
    if a != b:
        raise OracleMismatchError(
            "power oracles disagree: stochastic=%s path=%s" % (sorted(a), sorted(b)))
    return a


def is_cstar_dynamical(g) -> bool:
    """True when paths of equal length into a common vertex all start at
    sources or all start at non-sources (for every length).

    The pair of indicator vectors evolves under a fixed boolean map, so the
    scan terminates exactly when a state repeats.
    """
    nv = g.n_vertices
    s_vec = tuple(v in g.sources for v in range(nv))
    ns_vec = tuple(v not in g.sources for v in range(nv))
    seen = set()
    while (s_vec, ns_vec) not in seen:
        seen.add((s_vec, ns_vec))
        if any(a and b for a, b in zip(s_vec, ns_vec)):
            return False
        new_s = [False] * nv
        new_ns = [False] * nv
        for e in range(g.n_edges):
            src, dst = g.edges[e]
            if s_vec[src]:
                new_s[dst] = True
            if ns_vec[src]:
                new_ns[dst] = True
        s_vec, ns_vec = tuple(new_s), tuple(new_ns)
    return True


def transfer_is_multiplicative(g) -> bool:
    """The transfer side of the graph interaction is multiplicative exactly
    when no two edges share a range vertex."""
    return all(n <= 1 for n in g.n_in)


# ---------------------------------------------------------------------------
# Loops and the dichotomy conditions


def simple_loops(g):
    """All simple loops, one per rotation class, canonically rotated.

    A loop is a path mu_1..mu_n with s(mu_1) = r(mu_n) whose intermediate
    range vertices are distinct from the start.  Enumeration anchors each
    loop at its minimal vertex (Johnson-style restriction to vertices >= v)
    and then rotates to the lexicographically least edge sequence.
    """
    found = []

    def search(base, vertex, edges_so_far, visited):
        for e in g.out_edges[vertex]:
            w = g.dst(e)
            if w == base:
                found.append(edges_so_far + (e,))
            elif w > base and w not in visited:
                search(base, w, edges_so_far + (e,), visited | {w})

    for base in range(g.n_vertices):
        search(base, base, (), {base})
    loops = sorted(canonical_rotation(g, path_from_edges(g, c)) for c in found)
    return sorted(loops, key=lambda p: (path_len(p), p[1:]))


def canonical_rotation(g, loop):
    """Rotate a loop to its lexicographically least edge-id sequence."""
    edges = loop[1:]
    best = min(edges[i:] + edges[:i] for i in range(len(edges)))
    return path_from_edges(g, best)


def loop_exits(g, loop):
    """Edges leaving a loop vertex that are not the loop edge at that spot."""
    exits = []
    for i, e in enumerate(loop[1:]):
        v = g.src(e)
        for f in g.out_edges[v]:
            if f != e:
                exits.append(f)
    return sorted(set(exits))


def _reachable_from(g, start_vertices):
    seen = set(start_vertices)
    frontier = list(start_vertices)
    while frontier:
        v = frontier.pop()
        for e in g.out_edges[v]:
            w = g.dst(e)
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen


def condition_L(g) -> bool:
    """Every simple loop has an exit."""
    return all(loop_exits(g, loop) for loop in simple_loops(g))


def induced_subgraph(g, vertex_set):
    """Full subgraph on the given vertex indices (edge names preserved)."""
    keep = sorted(vertex_set)
    old_to_new = {v: i for i, v in enumerate(keep)}
    names = [g.vertices[v] for v in keep]
    edges = []
    edge_names = []
    for e, (s, r) in enumerate(g.edges):
        if s in old_to_new and r in old_to_new:
            edges.append((old_to_new[s], old_to_new[r]))
            edge_names.append(g.edge_names[e])
    return Graph(names, edges, edge_names)


def _condition_K_by_restriction(g):
    for hs in all_hereditary_saturated(g):
        complement = set(range(g.n_vertices)) - set(hs)
        if not condition_L(induced_subgraph(g, complement)):
            return False
    return True


def _condition_K_by_return_exits(g):
    # every loop needs an exit from which the loop is reachable again
    for loop in simple_loops(g):
        loop_vertices = {g.src(e) for e in loop[1:]}
        ok = False
        for f in loop_exits(g, loop):
            if _reachable_from(g, {g.dst(f)}) & loop_vertices:
                ok = True
                break
        if not ok:
            return False
    return True


def condition_K(g) -> bool:
    """Condition (L) persists on every complement of a hereditary saturated set.

    Cross-checked against the returning-exit formulation; disagreement is a
    hard internal failure.
    """
    a = _condition_K_by_restriction(g)
    b = _condition_K_by_return_exits(g)
    if a != b:
        raise OracleMismatchError(
            "condition (K) formulations disagree: restriction=%s return-exit=%s" % (a, b))
    return a


# ---------------------------------------------------------------------------
# Hereditary saturated sets


def hereditary_saturated_closure(g, seed):
    """Least superset of seed closed under the hereditary and saturation rules."""
    current = set()
    for v in seed:
        if isinstance(v, str):
            if v not in g.vertex_index:
                raise ValueError("unknown vertex %r" % v)
            current.add(g.vertex_index[v])
        else:
            if not 0 <= v < g.n_vertices:
                raise ValueError("vertex index out of range: %r" % v)
            current.add(v)
    changed = True
    while changed:
        changed = False
        for e in range(g.n_edges):
            s, r = g.edges[e]
            if s in current and r not in current:
                current.add(r)
                changed = True
        for v in range(g.n_vertices):
            if v in current or v in g.sinks:
                continue
            if all(g.dst(e) in current for e in g.out_edges[v]):
                current.add(v)
                changed = True
    return frozenset(current)


def all_hereditary_saturated(g, max_vertices=20):
    """Every hereditary and saturated vertex set, smallest first.

    Enumerates all subsets, so it is guarded by a vertex bound.
    """
    n = g.n_vertices
    if n > max_vertices:
        raise BoundExceededError(
            "subset enumeration needs %d <= %d vertices" % (n, max_vertices))
    out_masks = [0] * n
    for e in range(g.n_edges):
        s, r = g.edges[e]
        out_masks[s] |= 1 << r
    non_sinks = [v for v in range(n) if v not in g.sinks]
    result = []
    for mask in range(1 << n):
        ok = True
        for v in non_sinks:
            inside = bool(mask >> v & 1)
            fed = (out_masks[v] & ~mask) == 0
            if inside != fed:  # hereditary iff saturated combined rule
                ok = False
                break
        if ok:
            result.append(frozenset(v for v in range(n) if mask >> v & 1))
    return sorted(result, key=lambda s: (len(s), sorted(s)))


def is_minimal(g) -> bool:
    lattice = all_hereditary_saturated(g)
    return len(lattice) <= 2 and all(s in (frozenset(), frozenset(range(g.n_vertices)))
                                     for s in lattice)


def verdicts(g) -> dict:
    """Structure verdicts derived from the dichotomy and the ideal lattice.

    The simplicity verdict is a sufficient criterion and is reported as
    criteria met or not met, never as a non-existence claim.
    """
    l_holds = condition_L(g)
    k_holds = condition_K(g)
    minimal = is_minimal(g)
    simple = l_holds and minimal
    purely_infinite = (not g.sinks) and l_holds
    return {
        "topologically_free": l_holds,
        "free": k_holds,
        "minimal": minimal,
        "simple": {
            "criteria_met": simple,
            "reason": ("topologically free and minimal" if simple else
                       "condition (L) fails" if not l_holds else
                       "nontrivial hereditary saturated sets exist"),
        },
        "purely_infinite": {
            "holds": purely_infinite,
            "reason": ("no sinks and every loop has an exit" if purely_infinite else
                       "graph has sinks" if g.sinks else
                       "condition (L) fails"),
        },
    }
