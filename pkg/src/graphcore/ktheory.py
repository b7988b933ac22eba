"""K-groups of the graph algebra from the vertex map, with a presented-group
oracle built out of the truncated core description.

The integer map on vertex generators sends a non-sink v to
v - sum over edges leaving v of their range vertices.  Its cokernel gives
the even K-group and its kernel the odd one.  Some sources print the two
assignments the other way around; composing the exact sequence with the
generator-level isomorphisms forces the ordering used here, and the
one-vertex n-loop family (matrix [1-n], even group Z/(n-1)) pins it down
independently.  The report carries a note so the choice is never silent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import (AbelianGroup, IntMatrix, cokernel_group, kernel_group,
                    kernel_lattice, quotient_of_lattices)
from .graph import count_paths_into

DIRECTION_NOTE = (
    "even K-group = cokernel(delta), odd K-group = kernel(delta); "
    "fixed by the exact sequence and validated on one-vertex n-loop "
    "graphs, where the even group must be Z/(n-1)"
)


def delta_matrix(g) -> IntMatrix:
    """Rows indexed by all vertices, columns by non-sinks; column v is
    the indicator of v minus the row counts of ranges of edges out of v."""
    non_sinks = [v for v in range(g.n_vertices) if v not in g.sinks]
    cols = []
    for v in non_sinks:
        col = [0] * g.n_vertices
        col[v] += 1
        for e in g.out_edges[v]:
            col[g.dst(e)] -= 1
        cols.append(col)
    rows = tuple(tuple(col[w] for col in cols) for w in range(g.n_vertices))
    return IntMatrix(rows,
                     row_labels=g.vertices,
                     col_labels=tuple(g.vertices[v] for v in non_sinks))


def k_groups(g) -> tuple:
    """(K0, K1) of the graph algebra: cokernel and kernel of the vertex map."""
    d = delta_matrix(g)
    return cokernel_group(d), kernel_group(d)


# ---------------------------------------------------------------------------
# Truncated presentation of K0 of the core


@dataclass(frozen=True)
class K0Presentation:
    """Generators (v, k) for v receiving a length-k path, k <= level, with
    one relation row per non-sink generator below the top level."""

    graph: object
    level: int
    generators: tuple          # tuples (vertex_index, k)
    relations: IntMatrix       # rows over the generator order
    level_rank: int            # rank of the top finite level

    def gen_index(self, v, k):
        return self.generators.index((v, k))

    def gen_labels(self):
        g = self.graph
        return ["%s^(%d)" % (g.vertices[v], k) for v, k in self.generators]


def k0_core_presentation(g, level) -> K0Presentation:
    if level < 1:
        raise ValueError("level must be at least 1")
    counts = [count_paths_into(g, k) for k in range(level + 1)]
    gens = [(v, k) for k in range(level + 1)
            for v in range(g.n_vertices) if counts[k][v] > 0]
    index = {vk: i for i, vk in enumerate(gens)}
    rows = []
    for v, k in gens:
        if k == level or v in g.sinks:
            continue
        row = [0] * len(gens)
        row[index[(v, k)]] += 1
        for e in g.out_edges[v]:
            row[index[(g.dst(e), k + 1)]] -= 1
        rows.append(tuple(row))
    # rank of the top level: one block per receiving vertex plus every
    # frozen sink block of each lower length
    level_rank = sum(1 for v in range(g.n_vertices)
                     if counts[level][v] > 0 and v not in g.sinks)
    level_rank += sum(1 for k in range(level + 1)
                      for v in g.sinks if counts[k][v] > 0)
    return K0Presentation(g, level, tuple(gens), IntMatrix(tuple(rows)), level_rank)


def hstar_action(pres: K0Presentation) -> IntMatrix:
    """Matrix of the transfer-induced map on the truncated generators.

    Level-(k+1) generators drop to level k; non-sink level-0 generators are
    forced by the relations to map to the sum of their successors at level
    0.  Columns are indexed by the domain generators (everything except
    sink generators at level 0), rows by all generators.
    """
    g = pres.graph
    gens = pres.generators
    index = {vk: i for i, vk in enumerate(gens)}
    domain = [vk for vk in gens if not (vk[1] == 0 and vk[0] in g.sinks)]
    cols = []
    for v, k in domain:
        col = [0] * len(gens)
        if k > 0:
            col[index[(v, k - 1)]] += 1
        else:
            for e in g.out_edges[v]:
                col[index[(g.dst(e), 0)]] += 1
        cols.append(col)
    rows = tuple(tuple(col[i] for col in cols) for i in range(len(gens)))
    return IntMatrix(rows,
                     row_labels=tuple(pres.gen_labels()),
                     col_labels=tuple("%s^(%d)" % (g.vertices[v], k)
                                      for v, k in domain))


@dataclass(frozen=True)
class TruncatedSequenceResult:
    k0: AbelianGroup
    k1: AbelianGroup
    level: int
    stabilized: bool


def _sequence_groups_at(g, level):
    """(coker, ker) of (inclusion - transfer) on the truncated presentation."""
    pres = k0_core_presentation(g, level)
    gens = pres.generators
    index = {vk: i for i, vk in enumerate(gens)}
    domain = [vk for vk in gens if not (vk[1] == 0 and vk[0] in g.sinks)]
    h = hstar_action(pres)
    # image vectors (identity - transfer) per domain generator
    t_cols = []
    for j, (v, k) in enumerate(domain):
        col = [-h.entries[i][j] for i in range(len(gens))]
        col[index[(v, k)]] += 1
        t_cols.append(col)
    rel_rows = pres.relations.entries
    # cokernel: quotient the free group on all generators by the relation
    # vectors and the image vectors together (vectors enter as columns)
    all_cols = [list(row) for row in rel_rows] + t_cols
    if all_cols:
        stacked = IntMatrix(tuple(zip(*all_cols)))
    else:
        stacked = IntMatrix(tuple(() for _ in gens))
    k0 = cokernel_group(stacked)
    # kernel of the induced map: solutions x with Tx in the relation span,
    # modulo the relations themselves (which are honest solutions)
    n_dom = len(domain)
    if n_dom == 0:
        return k0, AbelianGroup(0)
    combined_cols = [list(c) for c in t_cols]
    for row in rel_rows:
        combined_cols.append([-x for x in row])
    combined = IntMatrix(tuple(zip(*combined_cols)))
    solutions = kernel_lattice(combined)
    x_parts = [vec[:n_dom] for vec in solutions]
    dom_index = {vk: i for i, vk in enumerate(domain)}
    rel_in_domain = []
    for row in rel_rows:
        vec = [0] * n_dom
        for i, vk in enumerate(gens):
            if row[i]:
                vec[dom_index[vk]] = row[i]
        rel_in_domain.append(vec)
    k1 = quotient_of_lattices(x_parts, rel_in_domain, n_dom)
    return k0, k1


def truncated_sequence_oracle(g, level) -> TruncatedSequenceResult:
    """Independent route to the K-groups through the presented core.

    Computes kernel and cokernel of (inclusion - transfer) on generators
    truncated at the given level, and reports whether the answer agrees
    with the level below (empirical stabilization).
    """
    if level < 2:
        raise ValueError("level must be at least 2")
    k0, k1 = _sequence_groups_at(g, level)
    prev_k0, prev_k1 = _sequence_groups_at(g, level - 1)
    return TruncatedSequenceResult(k0, k1, level,
                                   stabilized=(k0, k1) == (prev_k0, prev_k1))
