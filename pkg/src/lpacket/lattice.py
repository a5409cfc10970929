"""Exact integer and rational linear algebra on free modules of finite rank.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries.
Vectors are plain tuples.  Nothing in this module touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Sequence

Matrix = tuple[tuple, ...]
Vector = tuple


# ---------------------------------------------------------------------------
# small matrix helpers


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def shape(a: Matrix, ncols: int | None = None) -> tuple[int, int]:
    if not a:
        return 0, (ncols or 0)
    return len(a), len(a[0])


def transpose(a: Matrix, nrows: int | None = None) -> Matrix:
    if not a:
        return tuple(() for _ in range(nrows or 0))
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return ()
    bt = transpose(b, len(a[0]))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v: Sequence, a: Matrix) -> Vector:
    if not a:
        return ()
    return tuple(sum(x * a[i][j] for i, x in enumerate(v)) for j in range(len(a[0])))


def dot(u: Sequence, v: Sequence) -> Fraction | int:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((x * y for x, y in zip(u, v)), 0)


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    return tuple(c * x for x in v)


def normalize(v: Sequence) -> Vector:
    """Turn integral Fractions into ints so equal vectors hash equally."""
    out = []
    for x in v:
        if isinstance(x, Fraction) and x.denominator == 1:
            x = x.numerator
        out.append(x)
    return tuple(out)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def to_int(v: Sequence) -> tuple[int, ...]:
    if not is_integral(v):
        raise ValueError(f"vector {v} is not integral")
    return tuple(int(Fraction(x)) for x in v)


def mat_to_int(a: Matrix) -> Matrix:
    return tuple(to_int(r) for r in a)


def determinant(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def row_reduce(a: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and its pivot columns."""
    m = [[Fraction(x) for x in row] for row in a]
    pivots: list[int] = []
    if not m:
        return m, pivots
    r = 0
    for c in range(len(m[0])):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_of(a: Matrix) -> int:
    return len(row_reduce(a)[1])


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    red, piv = row_reduce(as_matrix(aug))
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(normalize(row[n:]) for row in red[:n])


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """A rational solution x of a x = b, or None when inconsistent.

    Free variables are set to zero, so the solution is unique exactly when
    ``a`` has full column rank.
    """
    m = len(a)
    if m == 0:
        return None if any(b) else ()
    n = len(a[0])
    aug = as_matrix([list(a[i]) + [b[i]] for i in range(m)])
    red, piv = row_reduce(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return normalize(x)


def solve_left(basis_rows: Matrix, v: Sequence) -> Vector | None:
    """Coordinates c with sum_k c_k * basis_rows[k] = v."""
    if not basis_rows:
        return () if not any(v) else None
    return solve(transpose(basis_rows), v)


def frac_part(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def matrix_power_order(a: Matrix, bound: int = 10_000) -> int:
    """Multiplicative order of a square matrix; raises if not finite within bound."""
    n = len(a)
    ident = identity(n)
    cur = a
    for k in range(1, bound + 1):
        if cur == ident:
            return k
        cur = mat_mul(cur, a)
    raise ValueError("automorphism does not have finite order")


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Lattice:
    """A free Z-module Z^rank; labels only matter for reporting."""

    rank: int
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(f"e{i + 1}" for i in range(self.rank)))
        elif len(self.basis_labels) != self.rank:
            raise ValueError("one label per basis vector required")

    def contains(self, v: Sequence) -> bool:
        return len(v) == self.rank and is_integral(v)


@dataclass(frozen=True)
class LatticeMap:
    """Integer matrix (target.rank x source.rank) acting on column vectors."""

    source: Lattice
    target: Lattice
    matrix: Matrix

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.target.rank or any(len(r) != self.source.rank for r in m):
            raise ValueError("matrix shape does not match source/target ranks")
        if any(Fraction(x).denominator != 1 for r in m for x in r):
            raise ValueError("lattice maps must have integer entries")

    def __call__(self, v: Sequence) -> Vector:
        return mat_vec(self.matrix, v)

    @classmethod
    def from_columns(cls, source: Lattice, target: Lattice, columns: Sequence[Sequence]) -> LatticeMap:
        cols = as_matrix(columns)
        return cls(source, target, transpose(cols, target.rank) if cols else zeros(target.rank, 0))

    def compose(self, other: LatticeMap) -> LatticeMap:
        """self after other."""
        if other.target.rank != self.source.rank:
            raise ValueError("ranks do not compose")
        return LatticeMap(other.source, self.target, _mul_shaped(self.matrix, other.matrix, self.target.rank, other.source.rank))


def _mul_shaped(a: Matrix, b: Matrix, m: int, n: int) -> Matrix:
    if m == 0:
        return ()
    if n == 0 or not b:
        return zeros(m, n)
    return mat_mul(a, b)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z/d_1 x ... x Z/d_k with d_i | d_{i+1}.

    ``generators`` are coset representatives (vectors in the ambient lattice)
    of the cyclic factors; ``free_rank`` records the discarded free part of the
    quotient this group came from.
    """

    invariant_factors: tuple[int, ...] = ()
    generators: tuple[Vector, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        d = self.invariant_factors
        if any(x < 2 for x in d):
            raise ValueError("invariant factors must be at least 2")
        if any(d[i + 1] % d[i] for i in range(len(d) - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        if self.generators and len(self.generators) != len(d):
            raise ValueError("one generator per invariant factor")

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def elements(self) -> list[Vector]:
        """All elements as integer combinations of the generators (empty for the trivial group)."""
        if not self.invariant_factors:
            return []
        dim = len(self.generators[0])
        out = []
        for coeffs in product(*(range(d) for d in self.invariant_factors)):
            v = (0,) * dim
            for c, g in zip(coeffs, self.generators):
                v = vadd(v, vscale(c, g))
            out.append(v)
        return out

    def describe(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


# ---------------------------------------------------------------------------
# Smith normal form and friends


def smith_normal_form(m: LatticeMap | Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U * M * V = D, U and V unimodular.

    D is diagonal with nonnegative entries forming a divisibility chain.
    """
    if isinstance(m, LatticeMap):
        rows, cols, a0 = m.target.rank, m.source.rank, m.matrix
    else:
        a0 = as_matrix(m)
        rows, cols = shape(a0)
    a = [[int(x) for x in r] for r in a0]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, rows)) or any(a[t][j] for j in range(t + 1, cols)):
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p), None)
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        if a[t][t] == 0:
            break
    return as_matrix(u), as_matrix(a), as_matrix(v)


def diagonal_entries(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(shape(d)))]


def cokernel_torsion(m: LatticeMap) -> FiniteAbelianGroup:
    """Torsion subgroup of target / image(m), with coset representatives."""
    u, d, _ = smith_normal_form(m)
    diag = diagonal_entries(d)
    nonzero = sum(1 for x in diag if x)
    free = m.target.rank - nonzero
    uinv = inverse(u) if u else ()
    factors, gens = [], []
    for i, x in enumerate(diag):
        if x > 1:
            factors.append(x)
            gens.append(tuple(uinv[r][i] for r in range(m.target.rank)))
    return FiniteAbelianGroup(tuple(factors), tuple(gens), free)


def kernel_basis(a: Matrix, ncols: int) -> list[Vector]:
    """A Z-basis of the (saturated) integer kernel of ``a``."""
    if not a:
        return [tuple(r) for r in identity(ncols)]
    _, d, v = smith_normal_form(a)
    r = sum(1 for x in diagonal_entries(d) if x)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]


def hermite_normal_form(gens: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Row-style Hermite normal form: a canonical basis of the span of the rows.

    Pivots are positive and entries above each pivot lie in [0, pivot).
    """
    rows = [list(to_int(r)) for r in gens if any(r)]
    out: list[list[int]] = []
    col = 0
    while rows and col < dim:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                (nxt if r[col] != 0 else rest).append(r)
            live = nxt
        p = live[0]
        if p[col] < 0:
            p = [-a for a in p]
        for r in out:
            q = r[col] // p[col]
            r[:] = [a - q * b for a, b in zip(r, p)]
        out.append(p)
        rows = [r for r in rest if any(r)]
        col += 1
    return tuple(tuple(r) for r in out)


def row_span_basis(gens: Sequence[Sequence[int]], dim: int) -> Matrix:
    """A canonical Z-basis (Hermite normal form rows) of the span of integer rows."""
    return hermite_normal_form(gens, dim)


def _check_automorphism(l: Lattice, auto: LatticeMap) -> int:
    if auto.source.rank != l.rank or auto.target.rank != l.rank:
        raise ValueError("automorphism must be an endomorphism of the lattice")
    if abs(determinant(auto.matrix)) != 1:
        raise ValueError("map is not invertible over Z")
    return matrix_power_order(auto.matrix) if l.rank else 1


def _minus_identity(auto: LatticeMap) -> Matrix:
    n = auto.source.rank
    return tuple(tuple(auto.matrix[i][j] - (1 if i == j else 0) for j in range(n)) for i in range(n))


def fixed_sublattice(l: Lattice, auto: LatticeMap) -> tuple[Lattice, LatticeMap]:
    """The sublattice fixed by ``auto`` together with its inclusion map."""
    _check_automorphism(l, auto)
    basis = kernel_basis(_minus_identity(auto), l.rank)
    fixed = Lattice(len(basis), tuple(f"f{i + 1}" for i in range(len(basis))))
    return fixed, LatticeMap.from_columns(fixed, l, basis)


def coinvariants_mod_torsion(l: Lattice, auto: LatticeMap) -> tuple[Lattice, LatticeMap]:
    """l / saturation((auto - 1) l) together with the quotient map."""
    _check_automorphism(l, auto)
    n = l.rank
    if n == 0:
        return Lattice(0), LatticeMap(l, Lattice(0), ())
    u, d, _ = smith_normal_form(_minus_identity(auto))
    r = sum(1 for x in diagonal_entries(d) if x)
    rows = u[r:]
    quot = Lattice(n - r, tuple(f"q{i + 1}" for i in range(n - r)))
    return quot, LatticeMap(l, quot, rows)


def induced_pairing(projection: LatticeMap, embedding: LatticeMap) -> Matrix | None:
    """Matrix P with x . (E f) = (pi x) . (P f) for a projection pi of X and embedding E into the dual.

    Returns None when the dot product does not factor through the projection.
    """
    pm, f = projection.matrix, embedding.matrix
    n, r = projection.source.rank, projection.target.rank
    k = embedding.source.rank
    if r == 0 or k == 0:
        return tuple(() for _ in range(r))
    cols = [solve(transpose(pm, n), tuple(f[i][j] for i in range(n))) for j in range(k)]
    if any(c is None for c in cols):
        return None
    return transpose(as_matrix(cols), r)


def in_span(basis_rows: Matrix, v: Sequence, integral: bool = True) -> bool:
    """Whether v is a (integer) combination of the given rows."""
    c = solve_left(basis_rows, v)
    return c is not None and (not integral or is_integral(c))
