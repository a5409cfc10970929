"""Stabilizers of character points and the Levi / isogeny torsion comparisons."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .affine import (
    AffineTransform,
    Alcove,
    AlcoveError,
    AlcovePoint,
    OmegaElement,
    omega_act_barycentric,
)
from .lattice import (
    FiniteAbelianGroup,
    Lattice,
    LatticeMap,
    Vector,
    as_matrix,
    cokernel_torsion,
    dot,
    is_integral,
    solve_left,
    to_int,
    transpose,
)
from .rootdatum import (
    BasedRootDatum,
    classify_cartan,
    weyl_group_order,
)

ENUMERATION_LIMIT = 20_000
CHECK_LIMIT = 2_000


@dataclass(frozen=True)
class RGroupData:
    """Stabilizer data of a closed-alcove point.

    The reflection part is kept as its generating walls; ``reflection_elements``
    enumerates it when it is small enough.
    """

    alcove: Alcove
    point: AlcovePoint
    fixed_walls: tuple[int, ...]
    omega_x: tuple[OmegaElement, ...]
    reflection_type: str
    semidirect_check: bool
    semidirect_method: str

    @property
    def stabilizer_reflections(self) -> tuple[AffineTransform, ...]:
        """Generators of the reflection part: the affine simple reflections through the point."""
        return tuple(self.alcove.affine_reflection(i) for i in self.fixed_walls)

    @property
    def reflection_order(self) -> int:
        return weyl_group_order(self.reflection_type)

    @property
    def order(self) -> int:
        return self.reflection_order * len(self.omega_x)

    @property
    def r_order(self) -> int:
        return len(self.omega_x)

    def reflection_elements(self, limit: int = ENUMERATION_LIMIT) -> list[AffineTransform]:
        return list(generate_group(self.stabilizer_reflections, self.alcove.lattice_rank, limit))

    def stabilizer_full(self, limit: int = ENUMERATION_LIMIT) -> list[AffineTransform]:
        """All of the stabilizer as products r * w (r in Omega_x, w in the reflection part)."""
        refl = self.reflection_elements(limit)
        return [o.transform * w for o in self.omega_x for w in refl]


def generate_group(gens: Sequence[AffineTransform], n: int, limit: int = ENUMERATION_LIMIT) -> Iterator[AffineTransform]:
    """Breadth-first closure of a finite group of affine transforms."""
    start = AffineTransform.identity(n)
    seen = {start.key}
    frontier = [start]
    yield start
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h.key not in seen:
                    seen.add(h.key)
                    if len(seen) > limit:
                        raise AlcoveError("stabilizer too large to enumerate")
                    nxt.append(h)
                    yield h
        frontier = nxt


def _wall_subdiagram_type(a: Alcove, walls: Sequence[int]) -> str:
    """Cartan type of the affine simple reflections in the given walls."""
    d = a.datum
    lin = [(-1 if i == 0 else 1, d.highest_root_index if i == 0 else d.simple_indices[i - 1]) for i in walls]
    roots = [tuple(sgn * x for x in d.roots[k]) for sgn, k in lin]
    coroots = [tuple(sgn * x for x in d.coroots[k]) for sgn, k in lin]
    cart = tuple(tuple(dot(r, c) for c in coroots) for r in roots)
    return classify_cartan(cart)


def stabilizer(a: Alcove, x: AlcovePoint | Sequence, check_limit: int = CHECK_LIMIT) -> RGroupData:
    """Stabilizer of a closed-alcove point in the extended affine Weyl group.

    The reflection part is generated by the walls through x; Omega_x is the set
    of alcove symmetries fixing x.  The semidirect decomposition is checked by
    enumeration when the stabilizer has at most ``check_limit`` elements and
    structurally otherwise.
    """
    if not isinstance(x, AlcovePoint):
        x = a.point(x)
    if any(v < 0 for v in x.barycentric):
        raise AlcoveError("point lies outside the closed alcove")
    walls = tuple(i for i, v in enumerate(x.barycentric) if v == 0)
    omega_x = tuple(o for o in a.omega if o.transform(x.coordinates) == x.coordinates)
    rtype = _wall_subdiagram_type(a, walls)
    ok, method = _semidirect(a, walls, omega_x, rtype, check_limit)
    return RGroupData(a, x, walls, omega_x, rtype, ok, method)


def _semidirect(a: Alcove, walls, omega_x, rtype, limit: int) -> tuple[bool, str]:
    wallset = set(walls)
    # Omega_x normalizes the reflection part: it permutes the walls through x.
    for o in omega_x:
        if {o.permutation[i] for i in walls} != wallset:
            return False, "omega element does not permute the walls through the point"
    size = weyl_group_order(rtype)
    if size * len(omega_x) > limit:
        # Omega meets the affine Weyl group trivially: a non-identity alcove symmetry moves vertex 0,
        # while the affine Weyl group acts simply transitively on alcoves.
        ok = all(o.vertex_image != 0 for o in omega_x if not o.is_identity)
        return ok, "structural"
    gens = [a.affine_reflection(i) for i in walls]
    refl = list(generate_group(gens, a.lattice_rank, max(limit, size)))
    if len(refl) != size:
        return False, f"reflection part has {len(refl)} elements, expected {size}"
    keys = {g.key for g in refl}
    products = set()
    for o in omega_x:
        if not o.is_identity and o.transform.key in keys:
            return False, "omega element lies in the reflection part"
        for w in refl:
            products.add((o.transform * w).key)
    if len(products) != len(refl) * len(omega_x):
        return False, "factorization is not unique"
    return True, "enumerated"


def omega_x_by_barycentric(a: Alcove, x: AlcovePoint) -> tuple[OmegaElement, ...]:
    """Omega elements whose facet permutation leaves the barycentric vector unchanged."""
    return tuple(o for o in a.omega if omega_act_barycentric(o, x.barycentric) == tuple(x.barycentric))


# ---------------------------------------------------------------------------
# Levi subsets and torsion comparisons


def levi_subset(d: BasedRootDatum, positive_part: Sequence) -> tuple[int, ...]:
    """Simple labels (1-based) whose coroots vanish on the given vector of X (x) Q."""
    if len(positive_part) != d.rank:
        raise ValueError(f"expected a vector of length {d.rank}")
    return tuple(i + 1 for i, c in enumerate(d.simple_coroots) if dot(positive_part, c) == 0)


def root_lattice_torsion(d: BasedRootDatum, labels: Sequence[int] | None = None) -> FiniteAbelianGroup:
    """Torsion of X / Z{alpha_i : i in labels} (all simple roots by default)."""
    labels = range(1, d.semisimple_rank + 1) if labels is None else labels
    cols = [d.simple_roots[i - 1] for i in labels]
    n = d.rank
    if not cols:
        return FiniteAbelianGroup((), (), n)
    return cokernel_torsion(LatticeMap(Lattice(len(cols)), Lattice(n), transpose(as_matrix(cols), n)))


@dataclass(frozen=True)
class InjectionCertificate:
    """Result of checking that a map of finite abelian groups is injective."""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    injective: bool
    witness: Vector | None = None
    images: tuple[tuple[Vector, Vector], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class LeviData:
    datum: BasedRootDatum
    labels: tuple[int, ...]
    certificate: InjectionCertificate


def _in_lattice(rows: Sequence[Vector], v: Sequence) -> bool:
    if not any(v):
        return True
    if not rows:
        return False
    c = solve_left(as_matrix(rows), v)
    return c is not None and is_integral(c)


def levi_datum(d: BasedRootDatum, labels: Sequence[int]) -> LeviData:
    """Sub-datum on the simple labels, with the torsion map X/ZE' -> X/ZE certified injective.

    A torsion class of X/ZE' is rationally in the span of E'; if it dies in X/ZE
    its integral expansion in E is supported on E', so it was already zero.
    Both the direct membership test and this support argument are checked.
    """
    labels = tuple(sorted(set(labels)))
    if any(not 1 <= i <= d.semisimple_rank for i in labels):
        raise ValueError("labels must name simple roots")
    keep = [k for k, c in enumerate(d.root_coordinates) if all(c[i] == 0 for i in range(len(c)) if i + 1 not in labels)]
    roots = tuple(d.roots[k] for k in keep)
    coroots = tuple(d.coroots[k] for k in keep)
    simple = tuple(keep.index(d.simple_indices[i - 1]) for i in labels)
    sub = BasedRootDatum(d.character_lattice, d.cocharacter_lattice, roots, coroots, simple,
                         classify_cartan(tuple(tuple(dot(roots[i], coroots[j]) for j in simple) for i in simple)))
    src = root_lattice_torsion(d, labels)
    tgt = root_lattice_torsion(d)
    sub_rows = [d.simple_roots[i - 1] for i in labels]
    all_rows = list(d.simple_roots)
    images = []
    for g in src.elements():
        if not any(g):
            continue
        if _in_lattice(sub_rows, g):
            continue
        expansion = solve_left(as_matrix(all_rows), g) if all_rows else None
        dies = expansion is not None and is_integral(expansion)
        if dies:
            return LeviData(sub, labels, InjectionCertificate(src, tgt, False, to_int(g)))
        if expansion is not None and any(expansion[i] != 0 for i in range(len(all_rows)) if i + 1 not in labels):
            return LeviData(sub, labels, InjectionCertificate(src, tgt, False, to_int(g)))
        images.append((to_int(g), to_int(g)))
    return LeviData(sub, labels, InjectionCertificate(src, tgt, True, None, tuple(images)))


def sc_comparison(d: BasedRootDatum) -> InjectionCertificate:
    """X/ZPhi -> P/ZPhi via x -> (<x, alpha_i^>)_i, certified injective on torsion.

    The target is computed in fundamental-weight coordinates, where the root
    lattice is spanned by the rows of the Cartan matrix.
    """
    if d.semisimple_rank == 0:
        raise ValueError("semisimple rank zero")
    cart = d.cartan_matrix
    l = d.semisimple_rank
    src = root_lattice_torsion(d)
    tgt = cokernel_torsion(LatticeMap(Lattice(l), Lattice(l), transpose(cart, l)))
    if src.order == 1:
        return InjectionCertificate(src, tgt, True)
    images = []
    seen = {}
    for g in src.elements():
        w = tuple(int(dot(g, c)) for c in d.simple_coroots)
        c = solve_left(cart, w)
        key = tuple(Fraction(x) % 1 for x in c)
        if key in seen and seen[key] != _class_of(d, g):
            return InjectionCertificate(src, tgt, False, to_int(g))
        seen[key] = _class_of(d, g)
        images.append((to_int(g), w))
    if len(seen) != src.order:
        return InjectionCertificate(src, tgt, False, None, tuple(images))
    return InjectionCertificate(src, tgt, True, None, tuple(images))


def _class_of(d: BasedRootDatum, g: Vector) -> tuple:
    c = solve_left(as_matrix(d.simple_roots), g)
    if c is None:
        return ("outside", tuple(g))
    return tuple(Fraction(x) % 1 for x in c)
