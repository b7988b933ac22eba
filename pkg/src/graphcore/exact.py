"""Exact scalars and integer matrix normal forms.

Scalars are finite rational combinations sum q_m * sqrt(m) over squarefree
positive integers m; the sqrt(1) slot carries the rational part.  Equality
of such sums is plain coefficient equality because square roots of distinct
squarefree integers are linearly independent over the rationals.

Integer matrices use arbitrary-precision ints throughout.  The Smith normal
form routine returns unimodular transforms and is self-verifying: every
decomposition is checked by multiplication before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def square_decompose(n: int) -> tuple[int, int]:
    """Write n = k*k*s with s squarefree; returns (k, s)."""
    if n <= 0:
        raise ValueError("expected a positive integer, got %r" % (n,))
    k, s = 1, 1
    d = 2
    while d * d <= n:
        c = 0
        while n % d == 0:
            n //= d
            c += 1
        k *= d ** (c // 2)
        if c % 2:
            s *= d
        d += 1
    return k, s * n


class RadicalScalar:
    """Exact number of the form sum over squarefree m of q_m * sqrt(m)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        # terms: mapping squarefree m -> Fraction, zeros dropped
        t = {}
        if terms:
            for m, q in terms.items():
                q = Fraction(q)
                if q:
                    t[m] = q
        self._terms = t

    @staticmethod
    def from_rational(q) -> "RadicalScalar":
        return RadicalScalar({1: Fraction(q)})

    @staticmethod
    @lru_cache(maxsize=None)
    def sqrt(n: int) -> "RadicalScalar":
        """Exact square root of a positive integer: sqrt(n) = k*sqrt(s)."""
        k, s = square_decompose(n)
        return RadicalScalar({s: Fraction(k)})

    @staticmethod
    @lru_cache(maxsize=None)
    def inv_sqrt(n: int) -> "RadicalScalar":
        """1/sqrt(n), rationalized as sqrt(n)/n."""
        k, s = square_decompose(n)
        return RadicalScalar({s: Fraction(k, n)})

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return set(self._terms) <= {1}

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational value: %s" % self)
        return self._terms.get(1, Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self._terms)
        for m, q in other._terms.items():
            r = t.get(m, 0) + q
            if r:
                t[m] = r
            else:
                t.pop(m, None)
        out = RadicalScalar.__new__(RadicalScalar)
        out._terms = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = RadicalScalar.__new__(RadicalScalar)
        out._terms = {m: -q for m, q in self._terms.items()}
        return out

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = {}
        for m1, q1 in self._terms.items():
            for m2, q2 in other._terms.items():
                # sqrt(m1)*sqrt(m2) = g*sqrt((m1/g)*(m2/g)) with g = gcd
                g = math.gcd(m1, m2)
                m = (m1 // g) * (m2 // g)
                q = q1 * q2 * g
                r = t.get(m, 0) + q
                if r:
                    t[m] = r
                else:
                    t.pop(m, None)
        out = RadicalScalar.__new__(RadicalScalar)
        out._terms = t
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    def __float__(self):
        return float(sum(float(q) * math.sqrt(m) for m, q in self._terms.items()))

    def __repr__(self):
        return "RadicalScalar(%s)" % str(self)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms):
            q = self._terms[m]
            if m == 1:
                parts.append(str(q))
            else:
                parts.append("%s*sqrt(%d)" % (q, m))
        return "+".join(parts).replace("+-", "-")


def _coerce(x):
    if isinstance(x, RadicalScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return RadicalScalar.from_rational(x)
    return NotImplemented


RADICAL_ZERO = RadicalScalar()
RADICAL_ONE = RadicalScalar.from_rational(1)


# ---------------------------------------------------------------------------
# Integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with optional row/column labels."""

    entries: tuple
    row_labels: tuple = None
    col_labels: tuple = None

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        if self.row_labels is not None and len(self.row_labels) != len(rows):
            raise ValueError("row label count mismatch")
        if self.col_labels is not None and rows and len(self.col_labels) != len(rows[0]):
            raise ValueError("col label count mismatch")

    @property
    def nrows(self):
        return len(self.entries)

    @property
    def ncols(self):
        return len(self.entries[0]) if self.entries else 0

    @staticmethod
    def from_rows(rows, row_labels=None, col_labels=None):
        return IntMatrix(tuple(tuple(r) for r in rows), row_labels, col_labels)

    @staticmethod
    def identity(n):
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(r, c):
        return IntMatrix(tuple(tuple(0 for _ in range(c)) for _ in range(r)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self):
        return IntMatrix(tuple(zip(*self.entries)) if self.entries else ())

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch %sx%s * %sx%s"
                             % (self.nrows, self.ncols, other.nrows, other.ncols))
        bt = list(zip(*other.entries)) if other.entries else []
        rows = tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
                     for row in self.entries)
        return IntMatrix(rows)

    def stack_below(self, other: "IntMatrix") -> "IntMatrix":
        if self.entries and other.entries and self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.entries + other.entries)

    def diagonal(self):
        return [self.entries[i][i] for i in range(min(self.nrows, self.ncols))]

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def rank(self) -> int:
        """Rank over the rationals by fraction-free elimination."""
        a = [list(r) for r in self.entries]
        nr, nc = self.nrows, self.ncols
        r = 0
        for c in range(nc):
            piv = None
            for i in range(r, nr):
                if a[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            for i in range(r + 1, nr):
                if a[i][c]:
                    f1, f2 = a[i][c], a[r][c]
                    a[i] = [x * f2 - y * f1 for x, y in zip(a[i], a[r])]
            r += 1
            if r == nr:
                break
        return r

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)


@dataclass(frozen=True)
class SmithDecomposition:
    """U*M*W = D with U, W unimodular and D in divisibility-chain form."""

    u: IntMatrix
    d: IntMatrix
    w: IntMatrix

    def diagonal(self):
        return self.d.diagonal()

    def rank(self):
        return sum(1 for x in self.diagonal() if x != 0)


class SmithVerificationError(RuntimeError):
    """The computed decomposition failed its own consistency check."""


def _exgcd_transform(a: int, b: int):
    """Unimodular 2x2 matrix ((x, y), (u, v)), det +-1, sending the column
    (a, b) to (+-gcd(a, b), 0).

    When a divides b the top row is (1, 0), so eliminating with an already
    sufficient pivot never rewrites the pivot row; the reduction loop in
    smith_normal_form relies on that to terminate.
    """
    if b == 0:
        return 1, 0, 0, 1
    if a != 0 and b % a == 0:
        return 1, 0, -(b // a), 1
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    g, x, y = old_r, old_s, old_t
    if g < 0:
        g, x, y = -g, -x, -y
    # bottom row annihilates (a, b); determinant (xa + yb)/g = 1
    return x, y, -(b // g), a // g


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Smith normal form via 2x2 extended-gcd transforms.

    Each pivot column and row is cleared by unimodular row/column
    combinations that replace the pivot with a gcd, so the pivot shrinks
    through a divisor chain and intermediate entries stay tame.
    Non-divisible remaining entries are folded into the pivot row, which
    strictly shrinks the pivot as well.  The result is verified
    (U*M*W == D, |det| = 1, divisibility chain) before returning.
    """
    nr, nc = m.nrows, m.ncols
    a = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    w = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in w:
            row[i], row[j] = row[j], row[i]

    def combine_rows(i, j):
        # rows (i, j) <- unimodular combination clearing a[j][column of i's pivot]
        x, y, p, q = _exgcd_transform(a[i][i_col], a[j][i_col])
        a[i], a[j] = ([x * s + y * t for s, t in zip(a[i], a[j])],
                      [p * s + q * t for s, t in zip(a[i], a[j])])
        u[i], u[j] = ([x * s + y * t for s, t in zip(u[i], u[j])],
                      [p * s + q * t for s, t in zip(u[i], u[j])])

    def combine_cols(i, j):
        x, y, p, q = _exgcd_transform(a[i_row][i], a[i_row][j])
        for row in a:
            row[i], row[j] = x * row[i] + y * row[j], p * row[i] + q * row[j]
        for row in w:
            row[i], row[j] = x * row[i] + y * row[j], p * row[i] + q * row[j]

    t = 0
    while t < min(nr, nc):
        piv = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best, piv = x, (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        i_col = i_row = t
        while True:
            for i in range(t + 1, nr):
                if a[i][t]:
                    combine_rows(t, i)
            if any(a[t][j] for j in range(t + 1, nc)):
                for j in range(t + 1, nc):
                    if a[t][j]:
                        combine_cols(t, j)
                if any(a[i][t] for i in range(t + 1, nr)):
                    continue
            # pivot must divide every remaining entry for the chain to hold
            culprit = None
            for i in range(t + 1, nr):
                if any(x % a[t][t] for x in a[i][t + 1:]):
                    culprit = i
                    break
            if culprit is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[culprit])]
            u[t] = [x + y for x, y in zip(u[t], u[culprit])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    um = IntMatrix.from_rows(u)
    dm = IntMatrix.from_rows(a)
    wm = IntMatrix.from_rows(w)
    dec = SmithDecomposition(um, dm, wm)
    _verify_smith(m, dec)
    return dec


def _verify_smith(m, dec):
    prod = dec.u.mul(m).mul(dec.w)
    if prod.entries != dec.d.entries:
        raise SmithVerificationError("U*M*W != D")
    for i in range(dec.d.nrows):
        for j in range(dec.d.ncols):
            if i != j and dec.d.entries[i][j]:
                raise SmithVerificationError("D not diagonal")
    diag = dec.d.diagonal()
    nz = [x for x in diag if x]
    if any(x < 0 for x in diag):
        raise SmithVerificationError("negative diagonal entry")
    if len(nz) != len([x for x in diag[:len(nz)] if x]):
        raise SmithVerificationError("zero before nonzero on the diagonal")
    for x, y in zip(nz, nz[1:]):
        if y % x:
            raise SmithVerificationError("divisibility chain broken")
    if dec.u.nrows and abs(dec.u.determinant()) != 1:
        raise SmithVerificationError("U not unimodular")
    if dec.w.nrows and abs(dec.w.determinant()) != 1:
        raise SmithVerificationError("W not unimodular")


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank plus cyclic factors in divisibility order."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative rank")
        for d in self.torsion:
            if d <= 1:
                raise ValueError("torsion entries must exceed 1")
        for x, y in zip(self.torsion, self.torsion[1:]):
            if y % x:
                raise ValueError("torsion not in divisibility order")

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def to_json(self):
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append("Z^%d" % self.free_rank)
        parts.extend("Z/%d" % d for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def kernel_group(m: IntMatrix) -> AbelianGroup:
    """Kernel of the map Z^cols -> Z^rows given by m (always free)."""
    r = smith_normal_form(m).rank()
    return AbelianGroup(m.ncols - r)


def cokernel_group(m: IntMatrix) -> AbelianGroup:
    """Cokernel Z^rows / im(m): free part plus the diagonal torsion."""
    dec = smith_normal_form(m)
    diag = dec.diagonal()
    torsion = tuple(d for d in diag if d > 1)
    return AbelianGroup(m.nrows - dec.rank(), torsion)


def kernel_lattice(m: IntMatrix) -> list:
    """Basis (list of length-ncols int vectors) of the integer kernel of m."""
    dec = smith_normal_form(m)
    diag = dec.diagonal()
    cols = []
    wt = list(zip(*dec.w.entries)) if dec.w.entries else []
    for j in range(m.ncols):
        dj = diag[j] if j < len(diag) else 0
        if dj == 0:
            cols.append(list(wt[j]))
    return cols


def quotient_of_lattices(ambient: list, sub: list, dim: int) -> AbelianGroup:
    """The group (lattice spanned by ambient) / (lattice spanned by sub).

    Vectors live in Z^dim and sub must be contained in the ambient span.
    """
    if not ambient:
        if any(any(x for x in v) for v in sub):
            raise ValueError("sub lattice not inside the ambient lattice")
        return AbelianGroup(0)
    amb = IntMatrix.from_rows(list(zip(*ambient)))  # dim x k, columns span
    dec = smith_normal_form(amb)
    diag = dec.diagonal()
    rank = dec.rank()
    # ambient lattice basis: b_j = d_j * (Uinv e_j); coordinates of v in this
    # basis are (U v)_j / d_j, and (U v)_j must vanish for j >= rank.
    coords = []
    for v in sub:
        uv = [sum(dec.u.entries[i][k] * v[k] for k in range(dim)) for i in range(dim)]
        for j in range(rank, dim):
            if uv[j]:
                raise ValueError("sub lattice not inside the ambient lattice")
        for j in range(rank):
            if uv[j] % diag[j]:
                raise ValueError("sub vector outside the ambient lattice")
        coords.append([uv[j] // diag[j] for j in range(rank)])
    if not coords:
        return AbelianGroup(rank)
    cm = IntMatrix.from_rows(list(zip(*coords)))  # rank x |sub|
    return cokernel_group(cm)
