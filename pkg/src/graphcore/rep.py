"""Truncated path-space representation: an operator-theoretic oracle.

The Hilbert space has orthonormal basis {delta_alpha} over all paths of
length at most L (length 0 = vertices).  Generators act by prefixing:

    S_e delta_alpha = delta_{e alpha}   if r(e) = s(alpha) and |alpha| < L
    P_v delta_alpha = [s(alpha) = v] delta_alpha

with images that would exceed length L truncated to zero, and
S = sum_e S_e / sqrt(n_{r(e)}) exactly over RadicalScalar coefficients.

Window discipline: truncation corrupts a relation only where an operator
would create a path of length L+1, or where a basis stub is shorter than
any genuine point of the path space (a non-sink vertex has no length-0
continuation, so sum_e S_e S*_e misses delta_v).  Every check below states
its exact valid window; boundary behavior is exposed, not hidden.
"""

from __future__ import annotations

import random

from .errors import BoundExceededError
from .exact import RadicalScalar
from .graph import path_at, path_len, path_range
from . import core_algebra as ca


class TruncatedRep:
    """Representation data: the graph, the depth, and the ordered basis."""

    def __init__(self, graph, depth, max_basis=200_000):
        if depth < 1:
            raise ValueError("depth must be at least 1")
        self.graph = graph
        self.depth = depth
        basis = []
        frontier = [path_at(v) for v in range(graph.n_vertices)]
        for _ in range(depth + 1):
            basis.extend(frontier)
            if len(basis) > max_basis:
                raise BoundExceededError("basis size exceeds %d" % max_basis)
            nxt = []
            for p in frontier:
                for e in graph.out_edges[path_range(graph, p)]:
                    nxt.append(p + (e,))
            frontier = nxt
        self.basis = sorted(basis, key=lambda p: (path_len(p), p))
        self.index = {p: i for i, p in enumerate(self.basis)}

    # -- operators as maps on sparse vectors {path: RadicalScalar} ----------

    def apply_edge(self, e, vec):
        g, L = self.graph, self.depth
        out = {}
        for p, c in vec.items():
            if g.dst(e) == p[0] and path_len(p) < L:
                _vacc(out, (g.src(e), e) + p[1:], c)
        return out

    def apply_edge_star(self, e, vec):
        out = {}
        for p, c in vec.items():
            if path_len(p) >= 1 and p[1] == e:
                tail = (self.graph.dst(p[1]),) + p[2:]
                _vacc(out, tail, c)
        return out

    def apply_s(self, vec):
        g, L = self.graph, self.depth
        out = {}
        for p, c in vec.items():
            if path_len(p) >= L:
                continue
            for e in g.in_edges[p[0]]:
                _vacc(out, (g.src(e), e) + p[1:], c * RadicalScalar.inv_sqrt(g.n_in[p[0]]))
        return out

    def apply_s_star(self, vec):
        g = self.graph
        out = {}
        for p, c in vec.items():
            if path_len(p) >= 1:
                tail = (g.dst(p[1]),) + p[2:]
                _vacc(out, tail, c * RadicalScalar.inv_sqrt(g.n_in[tail[0]]))
        return out

    def apply_vertex(self, v, vec):
        return {p: c for p, c in vec.items() if p[0] == v}

    def apply_elem(self, a, vec):
        """Action of a core element by prefix replacement.

        (mu, nu) maps delta_{nu alpha'} to delta_{mu alpha'}; images longer
        than the depth are truncated to zero.
        """
        g, L = self.graph, self.depth
        out = {}
        for (mu, nu), coeff in a.terms.items():
            k = path_len(nu)
            for p, c in vec.items():
                if path_len(p) < k or p[:k + 1] != nu:
                    continue
                img = mu + p[k + 1:]
                if path_len(img) <= L:
                    _vacc(out, img, coeff * c)
        return out

    def window(self, max_len):
        return [p for p in self.basis if path_len(p) <= max_len]

    def matrix_of(self, apply_fn):
        """Dense column list of an operator, for dumps and float checks."""
        cols = []
        for p in self.basis:
            img = apply_fn({p: RadicalScalar.from_rational(1)})
            col = [RadicalScalar() for _ in self.basis]
            for q, c in img.items():
                col[self.index[q]] = c
            cols.append(col)
        return [[cols[j][i] for j in range(len(self.basis))]
                for i in range(len(self.basis))]

    def dump_matrix(self, apply_fn):
        """Coordinate-list dump 'row col value', basis order, zero rows skipped."""
        lines = []
        for j, p in enumerate(self.basis):
            img = apply_fn({p: RadicalScalar.from_rational(1)})
            for q in sorted(img, key=lambda t: (path_len(t), t)):
                lines.append("%d %d %s" % (self.index[q], j, img[q]))
        return "\n".join(lines) + "\n"


def _vacc(d, key, coeff):
    cur = d.get(key)
    if cur is None:
        if not coeff.is_zero():
            d[key] = coeff
    else:
        s = cur + coeff
        if s.is_zero():
            del d[key]
        else:
            d[key] = s


def _unit_vec(p):
    return {p: RadicalScalar.from_rational(1)}


def build_rep(g, depth, max_basis=200_000) -> TruncatedRep:
    return TruncatedRep(g, depth, max_basis)


# ---------------------------------------------------------------------------
# Oracle checks


def check_forward_transfer(g, level, depth) -> bool:
    """Matrix oracle for the symbolic forward and transfer maps.

    For every matrix unit a of the given level, compares the symbolic image
    against conjugation by S.  The forward identity pi(forward(a)) = S pi(a) S*
    holds on the whole depth-L basis (stripping before prefixing never
    overflows); the transfer identity is compared on inputs of length at
    most L-1, its exact valid window.
    """
    if level + 1 > depth:
        raise ValueError("need level + 1 <= depth")
    rep = TruncatedRep(g, depth)
    window = rep.window(depth - 1)
    for mu, nu in ca.level_basis_pairs(g, level):
        a = ca.matrix_unit(g, mu, nu)
        fa = ca.forward_map(a)
        ta = ca.transfer_map(a)
        for p in rep.basis:
            vec = _unit_vec(p)
            lhs = rep.apply_elem(fa, vec)
            rhs = rep.apply_s(rep.apply_elem(a, rep.apply_s_star(vec)))
            if lhs != rhs:
                return False
        for p in window:
            vec = _unit_vec(p)
            lhs = rep.apply_elem(ta, vec)
            rhs = rep.apply_s_star(rep.apply_elem(a, rep.apply_s(vec)))
            if lhs != rhs:
                return False
    return True


def ck_window_check(g, depth) -> bool:
    """Cuntz-Krieger relations on their exact truncation windows.

    S*_e S_e = P_{r(e)} on inputs of length at most L-1; the summation
    relation P_v = sum_{s(e)=v} S_e S*_e on inputs of length 1..L-1 plus
    sink vertices (a non-sink vertex stub is a truncation artifact); the
    reconstruction S_e = sqrt(n_{r(e)}) pi(s_e s*_e) S on the full basis.
    """
    if depth < 2:
        raise ValueError("need depth at least 2")
    rep = TruncatedRep(g, depth)
    window = rep.window(depth - 1)
    sum_window = [p for p in window if path_len(p) >= 1 or p[0] in g.sinks]
    for e in range(g.n_edges):
        pr = g.dst(e)
        for p in window:
            vec = _unit_vec(p)
            lhs = rep.apply_edge_star(e, rep.apply_edge(e, vec))
            rhs = rep.apply_vertex(pr, vec)
            if lhs != rhs:
                return False
    for v in range(g.n_vertices):
        if v in g.sinks:
            continue
        for p in sum_window:
            vec = _unit_vec(p)
            acc = {}
            for e in g.out_edges[v]:
                for q, c in rep.apply_edge(e, rep.apply_edge_star(e, vec)).items():
                    _vacc(acc, q, c)
            if acc != rep.apply_vertex(v, vec):
                return False
    for e in range(g.n_edges):
        unit_ee = ca.matrix_unit(g, (g.src(e), e), (g.src(e), e))
        scale = RadicalScalar.sqrt(g.n_in[g.dst(e)])
        for p in rep.basis:
            vec = _unit_vec(p)
            lhs = rep.apply_edge(e, vec)
            rhs = {q: scale * c
                   for q, c in rep.apply_elem(unit_ee, rep.apply_s(vec)).items()}
            rhs = {q: c for q, c in rhs.items() if not c.is_zero()}
            if lhs != rhs:
                return False
    return True


def ck_boundary_defects(g, depth):
    """Witnesses that the relations genuinely fail off the valid windows.

    Returns a list of (relation, basis_path) pairs: 'isometry' defects on
    the top level where S_e truncates, 'summation' defects at non-sink
    vertex stubs.  Used by tests to demonstrate the truncation boundary.
    """
    rep = TruncatedRep(g, depth)
    defects = []
    top = [p for p in rep.basis if path_len(p) == depth]
    for e in range(g.n_edges):
        for p in top:
            vec = _unit_vec(p)
            lhs = rep.apply_edge_star(e, rep.apply_edge(e, vec))
            if lhs != rep.apply_vertex(g.dst(e), vec):
                defects.append(("isometry", p))
    for v in range(g.n_vertices):
        if v in g.sinks:
            continue
        vec = _unit_vec(path_at(v))
        acc = {}
        for e in g.out_edges[v]:
            for q, c in rep.apply_edge(e, rep.apply_edge_star(e, vec)).items():
                _vacc(acc, q, c)
        if acc != rep.apply_vertex(v, vec):
            defects.append(("summation", path_at(v)))
    return defects


def power_partial_isometry_check(g, n, depth) -> bool:
    """S^n (S^n)* S^n = S^n on inputs of length at most depth - n.

    On that window no application overflows the truncation, so the check
    decides exactly whether the n-th power averages to a partial isometry.
    """
    if n >= depth + 1 or n < 1:
        raise ValueError("need 1 <= n <= depth")
    rep = TruncatedRep(g, depth)

    def s_power(vec, k):
        for _ in range(k):
            vec = rep.apply_s(vec)
        return vec

    def s_power_star(vec, k):
        for _ in range(k):
            vec = rep.apply_s_star(vec)
        return vec

    for p in rep.window(depth - n):
        vec = _unit_vec(p)
        sn = s_power(vec, n)
        lhs = s_power(s_power_star(sn, n), n)
        if lhs != sn:
            return False
    return True


def positivity_spot_check(g, level, samples=5, seed=0) -> bool:
    """Floating-point evidence that both maps are positive.

    Draws random self-adjoint-free elements b, forms b* b, applies each map,
    and checks the matrix has no eigenvalue below -1e-9.  This is the one
    deliberately non-exact check in the package.
    """
    import numpy as np

    rng = random.Random(seed)
    rep = TruncatedRep(g, level + 2)
    pairs = ca.level_basis_pairs(g, level)
    for _ in range(samples):
        terms = {}
        for pair in pairs:
            if rng.random() < 0.4:
                terms[pair] = RadicalScalar.from_rational(rng.randint(-3, 3))
        b = ca.CoreElement(g, level, terms)
        bb = b.adjoint() * b
        for image in (ca.forward_map(bb), ca.transfer_map(bb)):
            mat = rep.matrix_of(lambda v, a=image: rep.apply_elem(a, v))
            arr = np.array([[float(x) for x in row] for row in mat])
            if not np.allclose(arr, arr.T, atol=1e-9):
                return False
            if np.linalg.eigvalsh(arr).min() < -1e-9:
                return False
    return True
