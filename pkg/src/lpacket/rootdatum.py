"""Based root data, diagram automorphisms, the relative datum and Weyl words.

Conventions
-----------
A datum stores its character lattice X and cocharacter lattice X^ in dual
bases, so the perfect pairing is the dot product of coordinate vectors.
Roots live in X, coroots in X^, index-aligned; positive roots come first and
the first ``rank`` positive roots are the simple ones in Dynkin order.

Simple reflections are labelled 1..l everywhere a word is involved, matching
the usual Bourbaki numbering.  A word (i1, ..., ik) denotes the product
s_i1 s_i2 ... s_ik acting on column vectors, so s_ik acts first.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Sequence

from .lattice import (
    Lattice,
    LatticeMap,
    Matrix,
    Vector,
    as_matrix,
    coinvariants_mod_torsion,
    cokernel_torsion,
    determinant,
    dot,
    fixed_sublattice,
    induced_pairing,
    identity,
    inverse,
    is_integral,
    mat_mul,
    mat_vec,
    normalize,
    rank_of,
    row_span_basis,
    solve,
    solve_left,
    to_int,
    transpose,
    vadd,
    vscale,
)

F = Fraction
h = F(1, 2)


class RootDatumError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ambient realizations


def _e(i: int, dim: int, c=1) -> tuple:
    return tuple(F(c) if k == i else F(0) for k in range(dim))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def ambient_simple_roots(family: str, n: int) -> list[tuple]:
    """Simple roots in the standard Euclidean realization of each family."""
    if family == "A":
        if n < 1:
            raise RootDatumError("A_n needs n >= 1")
        d = n + 1
        return [_sub(_e(i, d), _e(i + 1, d)) for i in range(n)]
    if family in "BCD":
        lo = {"B": 2, "C": 2, "D": 3}[family]
        if n < lo:
            raise RootDatumError(f"{family}_n needs n >= {lo}")
        out = [_sub(_e(i, n), _e(i + 1, n)) for i in range(n - 1)]
        if family == "B":
            out.append(_e(n - 1, n))
        elif family == "C":
            out.append(_e(n - 1, n, 2))
        else:
            out.append(_add(_e(n - 2, n), _e(n - 1, n)))
        return out
    if family == "E":
        if n == 6:
            return [
                (-h, h, h, h, h, h, h, -h),
                (F(1), F(1), F(0), F(0), F(0), F(0), F(0), F(0)),
                (-h, h, -h, -h, -h, -h, -h, h),
                _sub(_e(2, 8), _e(1, 8)),
                _sub(_e(3, 8), _e(2, 8)),
                _sub(_e(4, 8), _e(3, 8)),
            ]
        if n == 7:
            return [
                (h, -h, -h, -h, -h, -h, -h, h),
                _add(_e(0, 8), _e(1, 8)),
                _sub(_e(1, 8), _e(0, 8)),
                _sub(_e(2, 8), _e(1, 8)),
                _sub(_e(3, 8), _e(2, 8)),
                _sub(_e(4, 8), _e(3, 8)),
                _sub(_e(5, 8), _e(4, 8)),
            ]
        if n == 8:
            return [
                (h, -h, -h, -h, -h, -h, -h, h),
                _add(_e(0, 8), _e(1, 8)),
            ] + [_sub(_e(k, 8), _e(k - 1, 8)) for k in range(1, 7)]
        raise RootDatumError("E_n exists only for n = 6, 7, 8")
    if family == "F":
        if n != 4:
            raise RootDatumError("F_n exists only for n = 4")
        return [
            _sub(_e(1, 4), _e(2, 4)),
            _sub(_e(2, 4), _e(3, 4)),
            _e(3, 4),
            (h, -h, -h, -h),
        ]
    if family == "G":
        if n != 2:
            raise RootDatumError("G_n exists only for n = 2")
        return [(F(1), F(-1), F(0)), (F(-2), F(1), F(1))]
    raise RootDatumError(f"unknown family {family!r}")


def _coroot(a: tuple) -> tuple:
    n2 = dot(a, a)
    return tuple(F(2) * x / n2 for x in a)


@dataclass(frozen=True)
class Ambient:
    """Euclidean pictures of a datum, used for display and coordinate fixtures.

    ``x_basis`` / ``xc_basis`` give the ambient image of each basis vector of X
    and X^; ``weights`` / ``coweights`` are the fundamental (co)weights.
    """

    x_basis: tuple[tuple, ...]
    xc_basis: tuple[tuple, ...]
    weights: tuple[tuple, ...]
    coweights: tuple[tuple, ...]

    def dual(self) -> Ambient:
        return Ambient(self.xc_basis, self.x_basis, self.coweights, self.weights)

    def of_x(self, coords: Sequence) -> tuple:
        return _combine(coords, self.x_basis)

    def of_xc(self, coords: Sequence) -> tuple:
        return _combine(coords, self.xc_basis)


def _combine(coords, basis) -> tuple:
    dim = len(basis[0]) if basis else 0
    out = (F(0),) * dim
    for c, b in zip(coords, basis):
        out = tuple(o + c * x for o, x in zip(out, b))
    return normalize(out)


# ---------------------------------------------------------------------------
# the datum


@dataclass(frozen=True)
class DiagramAutomorphism:
    """A Dynkin diagram symmetry with its action on X and X^ (column vectors)."""

    permutation: tuple[int, ...]
    on_x: LatticeMap
    on_xc: LatticeMap
    order: int

    @property
    def is_identity(self) -> bool:
        return self.permutation == tuple(range(len(self.permutation)))


@dataclass(frozen=True, eq=False)
class BasedRootDatum:
    character_lattice: Lattice
    cocharacter_lattice: Lattice
    roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    simple_indices: tuple[int, ...]
    type_label: str = ""
    reduced: bool = True
    ambient: Ambient | None = None
    twist: DiagramAutomorphism | None = None
    coroot_type_label: str = ""

    def __eq__(self, other):
        if not isinstance(other, BasedRootDatum):
            return NotImplemented
        return (
            self.character_lattice.rank == other.character_lattice.rank
            and self.roots == other.roots
            and self.coroots == other.coroots
            and self.simple_indices == other.simple_indices
            and self.reduced == other.reduced
        )

    def __hash__(self):
        return hash((self.roots, self.coroots, self.simple_indices))

    # basic shape -------------------------------------------------------

    @property
    def rank(self) -> int:
        """Rank of the lattices (not the semisimple rank)."""
        return self.character_lattice.rank

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_indices)

    @property
    def pairing(self) -> Matrix:
        return identity(self.rank)

    @property
    def is_semisimple(self) -> bool:
        return self.semisimple_rank == self.rank

    @property
    def simple_roots(self) -> tuple[Vector, ...]:
        return tuple(self.roots[i] for i in self.simple_indices)

    @property
    def simple_coroots(self) -> tuple[Vector, ...]:
        return tuple(self.coroots[i] for i in self.simple_indices)

    @cached_property
    def cartan_matrix(self) -> Matrix:
        """C[i][j] = <alpha_i, alpha_j^>."""
        return tuple(tuple(dot(a, c) for c in self.simple_coroots) for a in self.simple_roots)

    @cached_property
    def root_index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def coroot_index(self) -> dict[Vector, int]:
        return {c: i for i, c in enumerate(self.coroots)}

    @cached_property
    def root_coordinates(self) -> tuple[tuple[int, ...], ...]:
        """Expansion of every root in the simple roots."""
        return tuple(to_int(solve_left(as_matrix(self.simple_roots), r)) for r in self.roots)

    @cached_property
    def coroot_coordinates(self) -> tuple[tuple[int, ...], ...]:
        """Expansion of every coroot in the simple coroots."""
        return tuple(to_int(solve_left(as_matrix(self.simple_coroots), c)) for c in self.coroots)

    @cached_property
    def positive(self) -> tuple[bool, ...]:
        return tuple(sum(c) > 0 for c in self.root_coordinates)

    @property
    def positive_indices(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.positive) if p)

    def is_positive_coroot(self, v: Vector) -> bool:
        return self.positive[self.coroot_index[normalize(v)]]

    def is_positive_root(self, v: Vector) -> bool:
        return self.positive[self.root_index[normalize(v)]]

    @cached_property
    def highest_root_index(self) -> int:
        best = max(self.positive_indices, key=lambda i: (sum(self.root_coordinates[i]), self.root_coordinates[i]))
        return best

    @property
    def highest_root(self) -> Vector:
        return self.roots[self.highest_root_index]

    @property
    def highest_root_marks(self) -> tuple[int, ...]:
        return self.root_coordinates[self.highest_root_index]

    @property
    def family(self) -> str:
        return self.type_label.lstrip("0123456789")

    # reflections ---------------------------------------------------------

    def reflection_xc(self, k: int) -> Matrix:
        """Matrix of s_alpha on X^ for root index k: v -> v - <alpha, v> alpha^."""
        a, c = self.roots[k], self.coroots[k]
        n = self.rank
        return tuple(tuple((1 if i == j else 0) - c[i] * a[j] for j in range(n)) for i in range(n))

    def reflection_x(self, k: int) -> Matrix:
        """Matrix of s_alpha on X: x -> x - <x, alpha^> alpha."""
        a, c = self.roots[k], self.coroots[k]
        n = self.rank
        return tuple(tuple((1 if i == j else 0) - a[i] * c[j] for j in range(n)) for i in range(n))

    @cached_property
    def simple_reflections(self) -> tuple[Matrix, ...]:
        return tuple(self.reflection_xc(k) for k in self.simple_indices)

    def check_axioms(self) -> list[str]:
        """Root datum axioms verified by direct enumeration; returns violations."""
        bad = []
        roots = set(self.roots)
        coroots = set(self.coroots)
        if len(roots) != len(self.roots) or len(self.roots) != len(self.coroots):
            bad.append("roots or coroots repeated / misaligned")
        for k, (a, c) in enumerate(zip(self.roots, self.coroots)):
            if dot(a, c) != 2:
                bad.append(f"<alpha, alpha^> != 2 for root {k}")
            sx = self.reflection_x(k)
            sxc = self.reflection_xc(k)
            if {normalize(mat_vec(sx, b)) for b in self.roots} != roots:
                bad.append(f"s_{k} does not permute roots")
            if {normalize(mat_vec(sxc, b)) for b in self.coroots} != coroots:
                bad.append(f"s_{k} does not permute coroots")
            for j, b in enumerate(self.roots):
                if normalize(mat_vec(sx, b)) in self.root_index:
                    img = self.root_index[normalize(mat_vec(sx, b))]
                    if normalize(mat_vec(sxc, self.coroots[j])) != self.coroots[img]:
                        bad.append(f"reflection {k} breaks root/coroot alignment at {j}")
                        break
            if any(not isinstance(x, int) and F(x).denominator != 1 for x in a + c):
                bad.append(f"root {k} not integral")
        if rank_of(as_matrix(self.simple_roots)) != len(self.simple_indices) if self.simple_indices else False:
            bad.append("simple roots dependent")
        for coords in self.root_coordinates:
            if not (all(x >= 0 for x in coords) or all(x <= 0 for x in coords)):
                bad.append("root with mixed-sign simple expansion")
                break
        return bad

    def cartan_type(self) -> str:
        return classify_cartan(self.cartan_matrix, reduced=self.reduced)


# ---------------------------------------------------------------------------
# root systems from Cartan matrices


def cartan_from_ambient(simple: Sequence[tuple]) -> Matrix:
    co = [_coroot(a) for a in simple]
    return tuple(tuple(int(dot(a, c)) for c in co) for a in simple)


def generate_roots(cartan: Matrix) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """All roots (simple-root coordinates) and aligned coroots (simple-coroot coordinates).

    Order: positive roots by height then reverse-lexicographically, so the
    simple roots come first in their given order; negatives follow in the same
    order.
    """
    l = len(cartan)
    start = [(tuple(1 if k == i else 0 for k in range(l)),) * 2 for i in range(l)]
    seen = {s[0]: s[1] for s in start}
    queue = deque(start)
    while queue:
        r, c = queue.popleft()
        for j in range(l):
            pr = sum(r[i] * cartan[i][j] for i in range(l))
            pc = sum(c[i] * cartan[j][i] for i in range(l))
            r2 = tuple(r[i] - (pr if i == j else 0) for i in range(l))
            c2 = tuple(c[i] - (pc if i == j else 0) for i in range(l))
            if r2 not in seen:
                seen[r2] = c2
                queue.append((r2, c2))
    pos = sorted((r for r in seen if sum(r) > 0), key=lambda r: (sum(r), tuple(-x for x in r)))
    neg = [tuple(-x for x in r) for r in pos]
    roots = pos + neg
    return roots, [seen[r] for r in roots]


# ---------------------------------------------------------------------------
# classification


def _components(cartan: Matrix) -> list[list[int]]:
    l = len(cartan)
    seen, comps = set(), []
    for s in range(l):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(l):
                if j not in seen and cartan[i][j] != 0:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _classify_component(c: Matrix, nodes: list[int]) -> str:
    k = len(nodes)
    if k == 1:
        return "A1"
    adj = {i: [j for j in nodes if j != i and c[i][j] != 0] for i in nodes}
    bonds = {(i, j): c[i][j] * c[j][i] for i in nodes for j in adj[i]}
    edges = sum(len(v) for v in adj.values()) // 2
    if edges != k - 1:
        raise RootDatumError("Cartan matrix is not of finite type (cycle)")
    mult = max(bonds.values())
    degrees = {i: len(adj[i]) for i in nodes}
    if mult == 3:
        if k != 2:
            raise RootDatumError("triple bond outside G2")
        return "G2"
    if mult == 2:
        if max(degrees.values()) > 2:
            raise RootDatumError("branched diagram with a double bond")
        ends = [i for i in nodes if degrees[i] == 1]
        path = _walk(adj, min(ends))
        (a, b) = next(e for e, m in bonds.items() if m == 2)
        pos = sorted((path.index(a), path.index(b)))
        if k == 4 and pos == [1, 2]:
            return "F4"
        if pos != [0, 1] and pos != [k - 2, k - 1]:
            raise RootDatumError("double bond in unexpected position")
        if pos == [0, 1]:
            path = path[::-1]
        # path now ends with the double bond; compare lengths of the last two nodes
        p, q = path[-2], path[-1]
        last_short = abs(c[p][q]) == 2  # <alpha_p, alpha_q^> = -2 means alpha_q short
        if k == 2:
            first, second = sorted((p, q))
            second_short = abs(c[first][second]) == 2
            return "B2" if second_short else "C2"
        return f"B{k}" if last_short else f"C{k}"
    if max(degrees.values()) <= 2:
        return f"A{k}"
    branch = [i for i in nodes if degrees[i] == 3]
    if len(branch) != 1 or max(degrees.values()) > 3:
        raise RootDatumError("diagram is not of finite type")
    centre = branch[0]
    arms = []
    for start in adj[centre]:
        length, prev, cur = 1, centre, start
        while True:
            nxt = [j for j in adj[cur] if j != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{k}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    raise RootDatumError("diagram is not of finite type")


def _walk(adj, start) -> list[int]:
    path, prev = [start], None
    while True:
        nxt = [j for j in adj[path[-1]] if j != prev]
        if not nxt:
            return path
        prev = path[-1]
        path.append(nxt[0])


def classify_cartan(cartan: Matrix, reduced: bool = True) -> str:
    """Cartan type label such as "A3", "C2", "A1xA1" or "BC2" ("" for rank 0).

    For rank two with a double bond the label is B2 when the second simple
    root is the short one and C2 otherwise.
    """
    if not cartan:
        return ""
    labels = []
    for comp in _components(cartan):
        lab = _classify_component(cartan, comp)
        labels.append(lab)
    if not reduced:
        if len(labels) != 1:
            return "x".join(labels) + "(nonreduced)"
        return "BC" + labels[0][1:]
    return "x".join(labels)


_WEYL_ORDER = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "G2": 12}


def weyl_group_order(label: str) -> int:
    """Order of the Weyl group of a (possibly reducible) Cartan type label."""
    if not label:
        return 1
    total = 1
    for part in label.split("x"):
        if part in _WEYL_ORDER:
            total *= _WEYL_ORDER[part]
            continue
        m = re.fullmatch(r"(A|B|C|D|BC)(\d+)", part)
        if not m:
            raise RootDatumError(f"cannot size Weyl group of {part!r}")
        fam, n = m.group(1), int(m.group(2))
        if fam == "A":
            total *= factorial(n + 1)
        elif fam == "D":
            total *= 2 ** (n - 1) * factorial(n)
        else:
            total *= 2**n * factorial(n)
    return total


# ---------------------------------------------------------------------------
# construction of standard data


LABEL_RE = re.compile(r"^(?:([23]))?([A-G])(\d+)$")

_MAX_RANK = {"A": 8, "B": 8, "C": 8, "D": 8}
_TWISTS = {("2", "A"), ("2", "D"), ("2", "E"), ("3", "D")}


def parse_label(label: str) -> tuple[str | None, str, int]:
    m = LABEL_RE.match(label.strip())
    if not m:
        raise RootDatumError(f"unknown type label {label!r}")
    twist, fam, n = m.group(1), m.group(2), int(m.group(3))
    if fam in _MAX_RANK and not (1 <= n <= _MAX_RANK[fam]):
        raise RootDatumError(f"rank {n} not supported for {fam}")
    if twist and (twist, fam) not in _TWISTS:
        raise RootDatumError(f"no twisted form {label!r}")
    if twist == "2" and fam == "A" and n < 2:
        raise RootDatumError("2A_n needs n >= 2")
    if twist == "2" and fam == "D" and n < 3:
        raise RootDatumError("2D_n needs n >= 3")
    if twist == "2" and fam == "E" and n != 6:
        raise RootDatumError("only 2E6 is twisted")
    if twist == "3" and (fam, n) != ("D", 4):
        raise RootDatumError("only 3D4 has a triality twist")
    ambient_simple_roots(fam, n)  # validates (family, rank)
    return twist, fam, n


def twist_permutation(twist: str, fam: str, n: int) -> tuple[int, ...]:
    """Standard diagram symmetry (0-based permutation of simple roots)."""
    if twist == "2" and fam == "A":
        return tuple(n - 1 - i for i in range(n))
    if twist == "2" and fam == "D":
        p = list(range(n))
        p[n - 2], p[n - 1] = n - 1, n - 2
        return tuple(p)
    if twist == "3" and fam == "D":
        return (2, 1, 3, 0)  # alpha1 -> alpha3 -> alpha4 -> alpha1
    if twist == "2" and fam == "E":
        return (5, 1, 4, 3, 2, 0)
    raise RootDatumError(f"no twist {twist}{fam}{n}")


def _weight_basis(cartan: Matrix, isogeny: str | Sequence[Sequence[int]]) -> Matrix:
    """Basis of X in fundamental-weight coordinates."""
    l = len(cartan)
    if isogeny == "sc":
        return identity(l)
    if isogeny == "ad":
        return as_matrix(cartan)
    gens = as_matrix(isogeny)
    if any(len(r) != l for r in gens) or not all(is_integral(r) for r in gens):
        raise RootDatumError("lattice generators must be integer rows in fundamental-weight coordinates")
    basis = row_span_basis([to_int(r) for r in gens] + [tuple(r) for r in cartan], l)
    if len(basis) != l:
        raise RootDatumError("lattice has the wrong rank")
    span = row_span_basis([to_int(r) for r in gens], l)
    if len(span) != l or any(solve_left(span, r) is None or not is_integral(solve_left(span, r)) for r in cartan):
        raise RootDatumError("lattice does not contain the root lattice")
    return span


def datum_from_cartan(
    cartan: Matrix,
    isogeny: str | Sequence[Sequence[int]] = "sc",
    type_label: str = "",
    ambient_simple: Sequence[tuple] | None = None,
) -> BasedRootDatum:
    """Semisimple datum with root system of the given Cartan matrix.

    ``isogeny`` is "sc" (X = weight lattice), "ad" (X = root lattice) or
    integer generator rows of X in fundamental-weight coordinates.
    """
    l = len(cartan)
    roots_s, coroots_s = generate_roots(cartan)
    bw = _weight_basis(cartan, isogeny)
    bw_inv = inverse(bw)
    roots, coroots = [], []
    for r, c in zip(roots_s, coroots_s):
        wcoords = tuple(sum(r[i] * cartan[i][j] for i in range(l)) for j in range(l))
        xr = normalize(tuple(sum(wcoords[i] * bw_inv[i][j] for i in range(l)) for j in range(l)))
        xc = tuple(sum(bw[k][j] * c[j] for j in range(l)) for k in range(l))
        roots.append(to_int(xr))
        coroots.append(to_int(xc))
    amb = None
    if ambient_simple is not None:
        co = [_coroot(a) for a in ambient_simple]
        cinv = inverse(cartan)
        # fundamental weights: sum_i (C^-1)[j][i] alpha_i ; fundamental coweights: sum_k (C^-T)[i][k] alpha_k^
        weights = tuple(_combine(cinv[j], ambient_simple) for j in range(l))
        cinv_t = transpose(cinv)
        coweights = tuple(_combine(cinv_t[i], co) for i in range(l))
        x_basis = tuple(_combine(bw[k], weights) for k in range(l))
        # X^ basis is dual: the k-th vector is sum_j (bw^-1)[j][k] alpha_j^
        bwt_inv = transpose(bw_inv)
        xc_basis = tuple(_combine(bwt_inv[k], co) for k in range(l))
        amb = Ambient(tuple(x_basis), tuple(xc_basis), tuple(normalize(w) for w in weights), coweights)
    label = type_label or classify_cartan(cartan)
    return BasedRootDatum(
        Lattice(l, tuple(f"x{i + 1}" for i in range(l))),
        Lattice(l, tuple(f"y{i + 1}" for i in range(l))),
        tuple(roots),
        tuple(coroots),
        tuple(range(l)),
        label,
        True,
        amb,
        None,
        label,
    )


def standard_datum(type_label: str, isogeny: str | Sequence[Sequence[int]] = "sc") -> BasedRootDatum:
    """The datum of an irreducible type, split or with its standard twist attached."""
    twist, fam, n = parse_label(type_label)
    simple = ambient_simple_roots(fam, n)
    cartan = cartan_from_ambient(simple)
    d = datum_from_cartan(cartan, isogeny, f"{fam}{n}", simple)
    if twist:
        sigma = diagram_automorphism(d, twist_permutation(twist, fam, n))
        d = replace(d, twist=sigma, type_label=f"{twist}{fam}{n}")
    return d


def with_central_torus(d: BasedRootDatum, k: int) -> BasedRootDatum:
    """Direct product of ``d`` with a rank-k torus (roots padded by zeros)."""
    pad = (0,) * k
    n = d.rank + k
    return BasedRootDatum(
        Lattice(n),
        Lattice(n),
        tuple(r + pad for r in d.roots),
        tuple(c + pad for c in d.coroots),
        d.simple_indices,
        d.type_label + (f"+T{k}" if k else ""),
        d.reduced,
        None,
        None,
        d.coroot_type_label,
    )


def diagram_automorphism(d: BasedRootDatum, perm: Sequence[int]) -> DiagramAutomorphism:
    """Lift a permutation of the simple roots to X and X^ (must preserve both lattices)."""
    perm = tuple(perm)
    l = d.semisimple_rank
    if sorted(perm) != list(range(l)):
        raise RootDatumError("not a permutation of the simple roots")
    c = d.cartan_matrix
    if any(c[perm[i]][perm[j]] != c[i][j] for i in range(l) for j in range(l)):
        raise RootDatumError("permutation is not a Dynkin diagram symmetry")
    if not d.is_semisimple:
        raise RootDatumError("diagram automorphisms are only lifted for semisimple data")
    simple = as_matrix(d.simple_roots)
    # sigma(alpha_i) = alpha_perm(i): matrix M on X with M * alpha_i = alpha_perm(i)
    target = as_matrix([d.simple_roots[perm[i]] for i in range(l)])
    m = mat_mul(transpose(target), inverse(transpose(simple)))
    if not all(is_integral(r) for r in m):
        raise RootDatumError("the lattice is not stable under the diagram automorphism")
    m = tuple(to_int(r) for r in m)
    mc = tuple(to_int(r) for r in transpose(inverse(m)))
    for i in range(l):
        if normalize(mat_vec(mc, d.simple_coroots[i])) != d.simple_coroots[perm[i]]:
            raise RootDatumError("automorphism does not carry simple coroots to simple coroots")
    order = 1
    p = perm
    while p != tuple(range(l)):
        p = tuple(perm[x] for x in p)
        order += 1
    return DiagramAutomorphism(perm, LatticeMap(d.character_lattice, d.character_lattice, m),
                               LatticeMap(d.cocharacter_lattice, d.cocharacter_lattice, mc), order)


def identity_automorphism(d: BasedRootDatum) -> DiagramAutomorphism:
    n = d.rank
    return DiagramAutomorphism(tuple(range(d.semisimple_rank)),
                               LatticeMap(d.character_lattice, d.character_lattice, identity(n)),
                               LatticeMap(d.cocharacter_lattice, d.cocharacter_lattice, identity(n)), 1)


def dual_datum(d: BasedRootDatum) -> BasedRootDatum:
    """Swap X with X^ and roots with coroots."""
    tw = None
    if d.twist is not None:
        s = d.twist
        tw = DiagramAutomorphism(s.permutation, s.on_xc, s.on_x, s.order)
    return BasedRootDatum(
        d.cocharacter_lattice,
        d.character_lattice,
        d.coroots,
        d.roots,
        d.simple_indices,
        d.coroot_type_label or d.type_label,
        _coroots_reduced(d),
        d.ambient.dual() if d.ambient else None,
        tw,
        d.type_label,
    )


def _coroots_reduced(d: BasedRootDatum) -> bool:
    cs = set(d.coroots)
    return not any(vscale(2, c) in cs for c in d.coroots)


# ---------------------------------------------------------------------------
# relative datum


@dataclass(frozen=True)
class RelativeDatum:
    """The relative datum with the maps that produced it.

    ``restriction`` maps X onto Y (= coinvariants mod torsion); ``fixed_basis``
    columns give the basis of Y^ = (X^)^sigma inside X^, dual to Y's basis.
    ``root_fibres[k]`` lists the absolute roots restricting to relative root k.
    """

    datum: BasedRootDatum
    restriction: Matrix
    fixed_basis: Matrix
    root_fibres: tuple[tuple[int, ...], ...]


def relative_datum(d: BasedRootDatum, sigma: DiagramAutomorphism | None = None) -> RelativeDatum:
    if sigma is None:
        sigma = d.twist or identity_automorphism(d)
    if set(normalize(mat_vec(sigma.on_x.matrix, r)) for r in d.roots) != set(d.roots):
        raise RootDatumError("sigma does not permute the roots")
    if {normalize(mat_vec(sigma.on_x.matrix, r)) for r in d.simple_roots} != set(d.simple_roots):
        raise RootDatumError("sigma does not preserve the simple roots")
    n = d.rank
    ycheck, emb = fixed_sublattice(d.cocharacter_lattice, sigma.on_xc)
    ylat, proj = coinvariants_mod_torsion(d.character_lattice, sigma.on_x)
    r = ylat.rank
    if ycheck.rank != r:
        raise RootDatumError("fixed and coinvariant ranks differ")
    f = emb.matrix  # n x r, columns are the fixed basis
    pm = proj.matrix  # r x n
    # the pairing x . (F c) factors through pm as (pm x) . (H c); F H^-1 is then dual to pm
    hmat = induced_pairing(proj, emb)
    if hmat is None:
        raise RootDatumError("fixed sublattice is not dual to the coinvariants")
    if r and abs(determinant(hmat)) != 1:
        raise RootDatumError("induced pairing is not perfect")
    fdual = mat_mul(f, inverse(hmat)) if r else tuple(() for _ in range(n))
    fdual = tuple(to_int(row) for row in fdual)

    restricted = [to_int(mat_vec(pm, a)) for a in d.roots]
    order: list[Vector] = []
    fibres: dict[Vector, list[int]] = {}
    for k, a in enumerate(restricted):
        if not any(a):
            raise RootDatumError("root restricts to zero")
        if a not in fibres:
            fibres[a] = []
            order.append(a)
        fibres[a].append(k)
    rel_set = set(order)

    def to_ycheck(v: Vector) -> Vector:
        c = solve(fdual, v) if r else ()
        if c is None or not is_integral(c):
            raise RootDatumError("coroot sum is not in the fixed lattice")
        return to_int(c)

    rel_coroots = []
    for a in order:
        s = (0,) * n
        for k in fibres[a]:
            s = vadd(s, d.coroots[k])
        if vscale(2, a) in rel_set:
            s = vscale(2, s)
        rel_coroots.append(to_ycheck(s))
    simple = []
    for i in d.simple_indices:
        a = restricted[i]
        k = order.index(a)
        if k not in simple:
            simple.append(k)
    reduced = not any(vscale(2, a) in rel_set for a in order)
    # reorder: positive roots first by height, keeping simple ones first in orbit order
    simple_rows = as_matrix([order[k] for k in simple])
    coords = [to_int(solve_left(simple_rows, a)) if simple else () for a in order]
    pos = [k for k in range(len(order)) if sum(coords[k]) > 0]
    pos_sorted = sorted(pos, key=lambda k: (sum(coords[k]), simple.index(k) if k in simple else len(simple), tuple(-x for x in coords[k])))
    neg_sorted = [order.index(tuple(-x for x in order[k])) for k in pos_sorted]
    perm = pos_sorted + neg_sorted
    roots = tuple(order[k] for k in perm)
    coroots = tuple(rel_coroots[k] for k in perm)
    simple_idx = tuple(perm.index(k) for k in simple)
    cart = tuple(tuple(dot(roots[i], coroots[j]) for j in simple_idx) for i in simple_idx)
    root_label = classify_cartan(cart, reduced)
    cor_cart = tuple(tuple(dot(coroots[i], roots[j]) for j in simple_idx) for i in simple_idx)
    coroot_reduced = not any(vscale(2, c) in set(coroots) for c in coroots)
    coroot_label = classify_cartan(cor_cart, coroot_reduced)
    rel = BasedRootDatum(
        Lattice(r, tuple(f"y{i + 1}" for i in range(r))),
        Lattice(r, tuple(f"v{i + 1}" for i in range(r))),
        roots,
        coroots,
        simple_idx,
        root_label,
        reduced,
        None,
        None,
        coroot_label,
    )
    return RelativeDatum(rel, pm, fdual, tuple(tuple(fibres[order[k]]) for k in perm))


def sigma_orbits_of_roots(d: BasedRootDatum, sigma: DiagramAutomorphism) -> list[frozenset[int]]:
    seen, out = set(), []
    for k, a in enumerate(d.roots):
        if k in seen:
            continue
        orbit, cur = set(), a
        while True:
            idx = d.root_index[cur]
            if idx in orbit:
                break
            orbit.add(idx)
            cur = normalize(mat_vec(sigma.on_x.matrix, cur))
        seen |= orbit
        out.append(frozenset(orbit))
    return out


# ---------------------------------------------------------------------------
# Weyl group elements


@dataclass(frozen=True)
class WeylElement:
    """An element of W acting on X^ (column vectors); ``word`` may be empty when unknown."""

    word: tuple[int, ...]
    matrix: Matrix

    def __mul__(self, other: WeylElement) -> WeylElement:
        return WeylElement(self.word + other.word, mat_mul(self.matrix, other.matrix))

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def act(self, v: Sequence) -> Vector:
        return normalize(mat_vec(self.matrix, v))

    def act_dual(self, x: Sequence) -> Vector:
        """Action on the dual lattice (inverse transpose)."""
        return normalize(mat_vec(transpose(inverse(self.matrix)), x))


def weyl_element(d: BasedRootDatum, word: Sequence[int]) -> WeylElement:
    """Product s_w1 ... s_wk of simple reflections (labels 1..l) acting on X^."""
    m = identity(d.rank)
    for i in word:
        if not 1 <= i <= d.semisimple_rank:
            raise RootDatumError(f"simple reflection label {i} out of range")
        m = mat_mul(m, d.simple_reflections[i - 1])
    return WeylElement(tuple(word), m)


def inversion_count(d: BasedRootDatum, w: WeylElement) -> int:
    """Number of positive coroots sent to negative coroots."""
    return sum(1 for k in d.positive_indices if not d.is_positive_coroot(w.act(d.coroots[k])))


def reduced_word(d: BasedRootDatum, w: WeylElement) -> tuple[int, ...]:
    """Reduced expression by descent: strip the first simple reflection with w(alpha_i^) < 0."""
    word: list[int] = []
    m = w.matrix
    simple_co = d.simple_coroots
    while True:
        for i, c in enumerate(simple_co):
            if not d.is_positive_coroot(normalize(mat_vec(m, c))):
                m = mat_mul(m, d.simple_reflections[i])
                word.append(i + 1)
                break
        else:
            break
    if m != identity(d.rank):
        raise RootDatumError("element is not in the Weyl group")
    return tuple(reversed(word))


def with_reduced_word(d: BasedRootDatum, w: WeylElement) -> WeylElement:
    return WeylElement(reduced_word(d, w), w.matrix)


def longest_element(d: BasedRootDatum, subset: Sequence[int] | None = None) -> WeylElement:
    """Longest element of the parabolic subgroup on the given simple labels (all if None)."""
    labels = list(range(1, d.semisimple_rank + 1)) if subset is None else sorted(subset)
    m = identity(d.rank)
    word: list[int] = []
    while True:
        for i in labels:
            if d.is_positive_coroot(normalize(mat_vec(m, d.simple_coroots[i - 1]))):
                m = mat_mul(m, d.simple_reflections[i - 1])
                word.append(i)
                break
        else:
            return WeylElement(tuple(word), m)


def enumerate_weyl_group(d: BasedRootDatum, limit: int = 200_000) -> list[WeylElement]:
    """All elements with reduced words, breadth first (for small groups)."""
    start = WeylElement((), identity(d.rank))
    seen = {start.matrix: start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for i, s in enumerate(d.simple_reflections):
                m = mat_mul(w.matrix, s)
                if m not in seen:
                    e = WeylElement(w.word + (i + 1,), m)
                    seen[m] = e
                    nxt.append(e)
                    if len(seen) > limit:
                        raise RootDatumError("Weyl group too large to enumerate")
        frontier = nxt
    return list(seen.values())


def all_reduced_words(d: BasedRootDatum, w: WeylElement) -> list[tuple[int, ...]]:
    """Every reduced expression of w (exhaustive descent tree)."""
    ident = identity(d.rank)
    memo: dict[Matrix, list[tuple[int, ...]]] = {}

    def rec(m: Matrix) -> list[tuple[int, ...]]:
        if m == ident:
            return [()]
        if m in memo:
            return memo[m]
        out = []
        for i, c in enumerate(d.simple_coroots):
            if not d.is_positive_coroot(normalize(mat_vec(m, c))):
                for word in rec(mat_mul(m, d.simple_reflections[i])):
                    out.append(word + (i + 1,))
        memo[m] = out
        return out

    return rec(w.matrix)


def relative_weyl_check(d: BasedRootDatum, sigma: DiagramAutomorphism | None = None) -> tuple[bool, str]:
    """Restriction to Y^ maps W^sigma injectively onto W(relative datum)."""
    if sigma is None:
        sigma = d.twist or identity_automorphism(d)
    rel = relative_datum(d, sigma)
    fb = rel.fixed_basis
    s = sigma.on_xc.matrix
    images = {}
    for w in enumerate_weyl_group(d):
        if mat_mul(w.matrix, s) != mat_mul(s, w.matrix):
            continue
        cols = transpose(mat_mul(w.matrix, fb), d.rank) if rel.datum.rank else ()
        restricted = tuple(solve(fb, col) for col in cols)
        if any(c is None or not is_integral(c) for c in restricted):
            return False, f"element {w.word} does not preserve the fixed lattice"
        m = transpose(as_matrix([to_int(c) for c in restricted]), rel.datum.rank) if restricted else ()
        if m in images:
            return False, f"elements {images[m]} and {w.word} restrict to the same map"
        images[m] = w.word
    target = {e.matrix for e in enumerate_weyl_group(rel.datum)}
    if set(images) != target:
        return False, f"|W^sigma| = {len(images)} but |W(relative)| = {len(target)}"
    return True, f"|W^sigma| = |W(relative)| = {len(target)}"


# ---------------------------------------------------------------------------
# lattices between root and weight lattice


def intermediate_lattices(type_label: str) -> list[Matrix]:
    """Generator rows (fundamental-weight coordinates) of every lattice Q <= X <= P."""
    twist, fam, n = parse_label(type_label)
    cartan = cartan_from_ambient(ambient_simple_roots(fam, n))
    l = len(cartan)
    ident = Lattice(l)
    grp = cokernel_torsion(LatticeMap(ident, ident, transpose(cartan)))
    elems = grp.elements() or [(0,) * l]
    subgroups = set()
    for k in range(len(elems) + 1):
        if k > 2:
            break
        for gens in combinations(elems, k):
            rows = [tuple(r) for r in cartan] + [to_int(g) for g in gens]
            subgroups.add(row_span_basis(rows, l))
    # finite groups here have at most two generators
    return sorted(subgroups)
