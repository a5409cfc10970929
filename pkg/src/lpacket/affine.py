"""Extended affine Weyl group, the fundamental alcove and its symmetry group Omega.

Everything here is phrased for a datum ``d`` whose alcove lives in
V = X^(d) (x) Q: the walls are the simple roots of ``d`` together with the
affine functional 1 - theta (theta the highest root), and the translation
lattice is X^(d).  To get the alcove on the character side of a group, pass
the dual of its (relative) datum; to get the building-side alcove whose
mark-one vertices are the hyperspecial ones, pass the datum itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .lattice import (
    Lattice,
    LatticeMap,
    Vector,
    as_matrix,
    cokernel_torsion,
    FiniteAbelianGroup,
    dot,
    frac_part,
    identity,
    inverse,
    is_integral,
    mat_vec,
    normalize,
    solve_left,
    transpose,
    vadd,
    vscale,
    vsub,
)
from .rootdatum import (
    BasedRootDatum,
    WeylElement,
    longest_element,
    reduced_word,
)


class AlcoveError(ValueError):
    pass


@dataclass(frozen=True)
class AffineTransform:
    """v -> linear(v) + translation, composed as (w1,t1)(w2,t2) = (w1 w2, w1 t2 + t1)."""

    linear: WeylElement
    translation: Vector

    def __call__(self, v: Sequence) -> Vector:
        return normalize(vadd(mat_vec(self.linear.matrix, v), self.translation))

    def __mul__(self, other: AffineTransform) -> AffineTransform:
        return AffineTransform(
            self.linear * other.linear,
            normalize(vadd(mat_vec(self.linear.matrix, other.translation), self.translation)),
        )

    def inverse(self) -> AffineTransform:
        m = inverse(self.linear.matrix)
        m = tuple(tuple(int(x) for x in row) for row in m)
        w = WeylElement(tuple(reversed(self.linear.word)), m)
        return AffineTransform(w, normalize(vscale(-1, mat_vec(m, self.translation))))

    def __eq__(self, other):
        return (
            isinstance(other, AffineTransform)
            and self.linear.matrix == other.linear.matrix
            and normalize(self.translation) == normalize(other.translation)
        )

    def __hash__(self):
        return hash((self.linear.matrix, normalize(self.translation)))

    @property
    def key(self) -> tuple:
        return (self.linear.matrix, normalize(self.translation))

    @classmethod
    def identity(cls, n: int) -> AffineTransform:
        return cls(WeylElement((), identity(n)), (0,) * n)


@dataclass(frozen=True)
class AlcovePoint:
    """A point of the closed alcove with its barycentric coordinates a_0..a_l."""

    coordinates: Vector
    barycentric: tuple[Fraction, ...]

    @property
    def denominator(self) -> int:
        d = 1
        for a in self.barycentric:
            d = d * Fraction(a).denominator // _gcd(d, Fraction(a).denominator)
        return d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class OmegaElement:
    """An alcove symmetry: the transform, the vertex that 0 is sent to, and its class in X^/ZPhi^.

    ``permutation[j]`` is the index of the vertex (equivalently the wall) that
    vertex j is carried to; index 0 is the affine node.
    """

    transform: AffineTransform
    vertex_image: int
    permutation: tuple[int, ...]
    iota_class: tuple[Fraction, ...]

    @property
    def is_identity(self) -> bool:
        return self.vertex_image == 0

    @property
    def label(self) -> str:
        return "1" if self.vertex_image == 0 else f"w[{self.vertex_image}]"


@dataclass(frozen=True, eq=False)
class Alcove:
    datum: BasedRootDatum
    marks: tuple[int, ...]
    highest_root: Vector
    highest_coroot: Vector
    coweights: tuple[Vector, ...]
    vertices: tuple[Vector, ...]
    barycenter: Vector
    full_datum: BasedRootDatum | None = None

    @property
    def source_datum(self) -> BasedRootDatum:
        """The datum the alcove was built from (non-reduced data keep their multipliable roots here)."""
        return self.full_datum or self.datum

    @property
    def rank(self) -> int:
        return self.datum.semisimple_rank

    @property
    def coxeter_number(self) -> int:
        return sum(self.marks)

    @property
    def lattice_rank(self) -> int:
        return self.datum.rank

    @property
    def walls(self) -> tuple[tuple[Vector, Fraction], ...]:
        """Affine functionals (linear part, constant): a_0 = 1 - theta, a_i = alpha_i."""
        zero = Fraction(0)
        return ((vscale(-1, self.highest_root), Fraction(1)),) + tuple((a, zero) for a in self.datum.simple_roots)

    def barycentric(self, x: Sequence) -> tuple[Fraction, ...]:
        rest = tuple(Fraction(dot(a, x)) for a in self.datum.simple_roots)
        return (1 - Fraction(dot(self.highest_root, x)),) + rest

    def from_barycentric(self, coords: Sequence) -> AlcovePoint:
        """Point sum a_i * coweight_i from a_1..a_l (or a_0..a_l, a_0 then checked)."""
        coords = tuple(Fraction(c) for c in coords)
        l = self.rank
        if len(coords) == l + 1:
            given0, coords = coords[0], coords[1:]
        else:
            given0 = None
        if len(coords) != l:
            raise AlcoveError(f"expected {l} barycentric coordinates, got {len(coords)}")
        x = (Fraction(0),) * self.lattice_rank
        for a, w in zip(coords, self.coweights):
            x = vadd(x, vscale(a, w))
        x = normalize(x)
        bary = self.barycentric(x)
        if given0 is not None and given0 != bary[0]:
            raise AlcoveError("a_0 inconsistent with sum n_i a_i = 1")
        return AlcovePoint(x, bary)

    def point(self, x: Sequence) -> AlcovePoint:
        x = normalize(x)
        bary = self.barycentric(x)
        if any(a < 0 for a in bary):
            raise AlcoveError("point lies outside the closed alcove")
        return AlcovePoint(x, bary)

    def contains(self, x: Sequence) -> bool:
        return all(a >= 0 for a in self.barycentric(x))

    def is_interior(self, x: Sequence) -> bool:
        return all(a > 0 for a in self.barycentric(x))

    def affine_reflection(self, i: int) -> AffineTransform:
        """Reflection in wall i (0 is the affine wall theta = 1)."""
        d = self.datum
        if i == 0:
            m = d.reflection_xc(d.highest_root_index)
            return AffineTransform(WeylElement((0,), m), self.highest_coroot)
        return AffineTransform(WeylElement((i,), d.simple_reflections[i - 1]), (0,) * d.rank)

    def class_key(self, v: Sequence) -> tuple[Fraction, ...]:
        """Fractional parts of v in the simple coroot basis: a key for v mod ZPhi^."""
        c = solve_left(as_matrix(self.datum.simple_coroots), v)
        if c is None:
            raise AlcoveError("vector not in the span of the coroots")
        return tuple(frac_part(x) for x in c)

    @cached_property
    def omega(self) -> tuple[OmegaElement, ...]:
        return tuple(omega_group(self))

    @cached_property
    def omega_by_vertex(self) -> dict[int, OmegaElement]:
        return {o.vertex_image: o for o in self.omega}

    def vertex_permutation(self, g: AffineTransform) -> tuple[int, ...] | None:
        """Images of the vertices as vertex indices, or None if g does not preserve the alcove."""
        index = {v: i for i, v in enumerate(self.vertices)}
        out = []
        for v in self.vertices:
            j = index.get(g(v))
            if j is None:
                return None
            out.append(j)
        return tuple(out)


def build_alcove(d: BasedRootDatum) -> Alcove:
    """Fundamental alcove of an irreducible semisimple datum (see module docstring)."""
    if d.semisimple_rank == 0:
        raise AlcoveError("rank-0 datum: the alcove is a single point")
    if not d.is_semisimple:
        raise AlcoveError("alcove operations need a semisimple datum")
    if "x" in d.cartan_type():
        raise AlcoveError("alcove operations need an irreducible datum")
    full = None
    if not d.reduced:
        full, d = d, _nonmultipliable_subdatum(d)
    marks = d.highest_root_marks
    theta = d.highest_root
    theta_co = d.coroots[d.highest_root_index]
    simple = as_matrix(d.simple_roots)
    inv = inverse(simple)
    l = d.semisimple_rank
    coweights = tuple(normalize(tuple(inv[r][j] for r in range(l))) for j in range(l))
    vertices = ((Fraction(0),) * l,) + tuple(normalize(vscale(Fraction(1, n), w)) for n, w in zip(marks, coweights))
    h = 1 + sum(marks)
    total = (Fraction(0),) * l
    for w in coweights:
        total = vadd(total, w)
    bary = normalize(vscale(Fraction(1, h), total))
    half_sum = (Fraction(0),) * l
    for k in d.positive_indices:
        half_sum = vadd(half_sum, vscale(Fraction(1, 2), d.coroots[k]))
    if normalize(half_sum) != normalize(total):
        raise AlcoveError("sum of fundamental coweights differs from the half-sum of positive coroots")
    return Alcove(d, (1,) + tuple(marks), theta, theta_co, coweights, vertices, bary, full)


def _nonmultipliable_subdatum(d: BasedRootDatum) -> BasedRootDatum:
    """Drop roots a with 2a also a root, leaving a reduced system with the same Weyl group."""
    keep = [k for k, r in enumerate(d.roots) if vscale(2, r) not in d.root_index]
    roots = tuple(d.roots[k] for k in keep)
    coroots = tuple(d.coroots[k] for k in keep)
    simple = []
    for i in d.simple_indices:
        r = d.roots[i]
        r2 = vscale(2, r)
        simple.append(keep.index(d.root_index[r2]) if r2 in d.root_index else keep.index(i))
    return BasedRootDatum(d.character_lattice, d.cocharacter_lattice, roots, coroots, tuple(simple),
                          d.type_label, True, None, None, d.coroot_type_label)


def _extended_permutation(a: Alcove, w: WeylElement) -> tuple[int, ...] | None:
    """How w permutes {-theta} + simple roots (index 0 is -theta), acting on X(d)."""
    d = a.datum
    dual_action = transpose(inverse(w.matrix))
    ext = [normalize(vscale(-1, a.highest_root))] + [normalize(r) for r in d.simple_roots]
    index = {r: i for i, r in enumerate(ext)}
    out = []
    for r in ext:
        j = index.get(normalize(mat_vec(dual_action, r)))
        if j is None:
            return None
        out.append(j)
    return tuple(out)


def omega_group(a: Alcove) -> list[OmegaElement]:
    """Alcove symmetries in W x| X^, one for each mark-1 vertex lying in X^.

    For a mark-one vertex i the element is translation by the coweight
    composed with w_0^{J} w_0, J the simple labels other than i.  Each element
    is checked to permute the vertices and to fix the barycenter, and the
    three descriptions of its class in X^/ZPhi^ are compared.
    """
    d = a.datum
    l = a.rank
    w0 = longest_element(d)
    out = []
    for i in range(l + 1):
        if a.marks[i] != 1:
            continue
        if i == 0:
            g = AffineTransform.identity(d.rank)
        else:
            t = a.coweights[i - 1]
            if not is_integral(t):
                continue
            wj = longest_element(d, [j for j in range(1, l + 1) if j != i])
            lin = wj * w0
            lin = WeylElement(reduced_word(d, lin), lin.matrix)
            g = AffineTransform(lin, tuple(int(x) for x in t))
        perm = a.vertex_permutation(g)
        if perm is None or perm[0] != i:
            raise AlcoveError(f"element for vertex {i} does not preserve the alcove")
        if g(a.barycenter) != a.barycenter:
            raise AlcoveError(f"element for vertex {i} moves the barycenter")
        if _extended_permutation(a, g.linear) != perm:
            raise AlcoveError(f"linear part for vertex {i} does not permute the extended simple roots")
        keys = iota_descriptions(a, g, i)
        if len(set(keys.values())) != 1:
            raise AlcoveError(f"iota descriptions disagree for vertex {i}: {keys}")
        out.append(OmegaElement(g, i, perm, keys["translation"]))
    return out


def iota_descriptions(a: Alcove, g: AffineTransform, vertex: int) -> dict[str, tuple[Fraction, ...]]:
    """Three descriptions of the class of g in X^/ZPhi^: barycenter displacement, translation, coweight."""
    disp = vsub(a.barycenter, mat_vec(g.linear.matrix, a.barycenter))
    cw = a.coweights[vertex - 1] if vertex else (0,) * a.lattice_rank
    return {
        "displacement": a.class_key(disp),
        "translation": a.class_key(g.translation),
        "coweight": a.class_key(cw),
    }


def omega_structure(a: Alcove) -> FiniteAbelianGroup:
    """X^ / ZPhi^ computed by Smith normal form, independently of the alcove."""
    d = a.datum
    n = d.rank
    lat = Lattice(n)
    cols = d.simple_coroots
    src = Lattice(len(cols))
    return cokernel_torsion(LatticeMap(src, lat, transpose(as_matrix(cols), n)))


def omega_multiply(a: Alcove, x: OmegaElement, y: OmegaElement) -> OmegaElement:
    g = x.transform * y.transform
    return a.omega_by_vertex[a.vertices.index(g(a.vertices[0]))]


def omega_is_closed(a: Alcove) -> bool:
    """Closure under composition, with products landing on the listed transforms."""
    by_vertex = a.omega_by_vertex
    for x in a.omega:
        for y in a.omega:
            g = x.transform * y.transform
            j = a.vertex_permutation(g)
            if j is None or j[0] not in by_vertex or by_vertex[j[0]].transform != g:
                return False
    return True


def omega_order(a: Alcove, x: OmegaElement) -> int:
    g, k = x.transform, 1
    ident = AffineTransform.identity(a.lattice_rank)
    while g != ident:
        g = g * x.transform
        k += 1
    return k


def omega_act_barycentric(x: OmegaElement, bary: Sequence) -> tuple[Fraction, ...]:
    """Barycentric coordinates of the image point: a_{perm(j)}(g x) = a_j(x)."""
    out = [Fraction(0)] * len(bary)
    for j, p in enumerate(x.permutation):
        out[p] = Fraction(bary[j])
    return tuple(out)


def hyperspecial_vertices(a: Alcove) -> list[tuple[int, Vector]]:
    """Vertices on which every root takes integer values, the origin included.

    For a reduced datum these are exactly the mark-one vertices; for a
    non-reduced one the multipliable roots rule out some special vertices.
    """
    roots = a.source_datum.simple_roots
    return [
        (i, v)
        for i, v in enumerate(a.vertices)
        if a.marks[i] == 1 and all(Fraction(dot(r, v)).denominator == 1 for r in roots)
    ]


def hyperspecial_classes(a: Alcove) -> list[list[int]]:
    """Mark-one vertices grouped by their class modulo the lattice X^(d)."""
    groups: dict[tuple, list[int]] = {}
    for i, v in hyperspecial_vertices(a):
        key = tuple(frac_part(x) for x in v)
        groups.setdefault(key, []).append(i)
    return sorted(groups.values())


def reduce_to_alcove(a: Alcove, x: Sequence, canonical: bool = False) -> tuple[AlcovePoint, AffineTransform]:
    """Move x into the closed alcove, returning the point and g with g(x) = point.

    Repeatedly reflects in the lowest-index violated wall, which lands on the
    unique point of the affine-Weyl orbit in the closed alcove.  With
    ``canonical`` the result is further moved by Omega to the orbit point with
    the smallest barycentric tuple, so the output depends only on the orbit
    under the whole extended group.
    """
    x = normalize(x)
    g = AffineTransform.identity(a.lattice_rank)
    cur = x
    for _ in range(100_000):
        bary = a.barycentric(cur)
        bad = next((i for i, v in enumerate(bary) if v < 0), None)
        if bad is None:
            break
        s = a.affine_reflection(bad)
        cur = s(cur)
        g = s * g
    else:
        raise AlcoveError("alcove reduction did not terminate")
    if canonical:
        best = (a.barycentric(cur), cur, g)
        for o in a.omega:
            y = o.transform(cur)
            by = a.barycentric(y)
            if by < best[0]:
                best = (by, y, o.transform * g)
        _, cur, g = best
    return AlcovePoint(cur, a.barycentric(cur)), g


def canonical_barycentric(a: Alcove, bary: Sequence) -> tuple[Fraction, ...]:
    """Smallest barycentric tuple in the Omega-orbit of a closed-alcove point."""
    return min(omega_act_barycentric(o, bary) for o in a.omega)


def barycentric_points(a: Alcove, bound: int) -> Iterator[tuple[Fraction, ...]]:
    """All closed-alcove points whose barycentric coordinates have denominator <= bound.

    Yields distinct (a_0, ..., a_l) with sum n_i a_i = 1.
    """
    seen = set()
    marks = a.marks
    for q in range(1, bound + 1):
        for ks in _compositions(marks, q):
            pt = tuple(Fraction(k, q) for k in ks)
            if pt not in seen:
                seen.add(pt)
                yield pt


def _compositions(marks: Sequence[int], total: int) -> Iterator[tuple[int, ...]]:
    if not marks:
        if total == 0:
            yield ()
        return
    n = marks[0]
    for k in range(total // n + 1):
        for rest in _compositions(marks[1:], total - k * n):
            yield (k,) + rest
