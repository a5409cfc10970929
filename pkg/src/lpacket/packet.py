"""The Q/Z pairing, Keys cocycle coefficients and the packet identity check.

A ``PacketSetting`` bundles the two alcoves attached to a group:

* the character alcove, in Y (x) Q with walls given by the relative coroots;
  its symmetry group Omega acts on character points and contains the R-groups;
* the building alcove, in Y^ (x) Q with walls given by the relative roots;
  its integral mark-one vertices are the hyperspecial vertices.

Both are indexed by the same simple labels 1..l.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Sequence

from .affine import (
    Alcove,
    AlcovePoint,
    OmegaElement,
    build_alcove,
    hyperspecial_vertices,
    omega_structure,
    reduce_to_alcove,
)
from .lattice import FiniteAbelianGroup, Vector, dot, normalize, vsub, vscale
from .rgroup import RGroupData, stabilizer
from .rootdatum import (
    BasedRootDatum,
    DiagramAutomorphism,
    RelativeDatum,
    WeylElement,
    dual_datum,
    reduced_word,
    relative_datum,
    weyl_element,
)


@dataclass(frozen=True, order=True)
class QmodZ:
    """An element of Q/Z stored as a reduced fraction in [0, 1)."""

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        n, d = self.numerator % self.denominator, self.denominator
        g = gcd(n, d) or 1
        object.__setattr__(self, "numerator", n // g)
        object.__setattr__(self, "denominator", d // g)

    @classmethod
    def of(cls, x) -> QmodZ:
        f = Fraction(x)
        return cls(f.numerator, f.denominator)

    def __add__(self, other: QmodZ) -> QmodZ:
        return QmodZ.of(self.fraction + other.fraction)

    def __sub__(self, other: QmodZ) -> QmodZ:
        return QmodZ.of(self.fraction - other.fraction)

    def __neg__(self) -> QmodZ:
        return QmodZ.of(-self.fraction)

    def __mul__(self, k: int) -> QmodZ:
        if not isinstance(k, int):
            return NotImplemented
        return QmodZ.of(self.fraction * k)

    __rmul__ = __mul__

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def is_zero(self) -> bool:
        return self.numerator == 0

    def __str__(self) -> str:
        return "0" if self.numerator == 0 else f"{self.numerator}/{self.denominator}"


ZERO = QmodZ(0)


@dataclass(frozen=True, eq=False)
class PacketSetting:
    datum: BasedRootDatum
    relative: RelativeDatum
    characters: Alcove
    building: Alcove

    @property
    def rel(self) -> BasedRootDatum:
        return self.relative.datum

    @property
    def rank(self) -> int:
        return self.rel.semisimple_rank

    @cached_property
    def omega(self) -> tuple[OmegaElement, ...]:
        return self.characters.omega

    @cached_property
    def hyperspecial(self) -> tuple[int, ...]:
        """Labels of hyperspecial vertices (0 is the origin)."""
        return tuple(i for i, _ in hyperspecial_vertices(self.building))

    def coweight(self, vertex: int) -> Vector:
        """The hyperspecial vertex with the given label, as a vector of Y^ (x) Q."""
        return self.building.vertices[vertex]

    def class_of(self, vertex: int) -> tuple:
        """Class of a hyperspecial vertex modulo the lattice Y^."""
        return tuple(Fraction(x) % 1 for x in self.coweight(vertex))

    @cached_property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        groups: dict[tuple, list[int]] = {}
        for i in self.hyperspecial:
            groups.setdefault(self.class_of(i), []).append(i)
        return tuple(sorted(tuple(g) for g in groups.values()))

    def omega_element(self, vertex: int) -> OmegaElement:
        try:
            return self.characters.omega_by_vertex[vertex]
        except KeyError:
            raise ValueError(f"no Omega element sends 0 to vertex {vertex}") from None

    def point(self, barycentric: Sequence) -> AlcovePoint:
        """Character point sum a_i x_i from a_1..a_l, moved into the closed alcove if needed."""
        p = self.characters.from_barycentric(barycentric)
        if all(a >= 0 for a in p.barycentric):
            return p
        q, _ = reduce_to_alcove(self.characters, p.coordinates)
        return q

    def rgroup(self, x: AlcovePoint) -> RGroupData:
        return stabilizer(self.characters, x)

    def omega_group_structure(self) -> FiniteAbelianGroup:
        return omega_structure(self.characters)


def packet_setting(d: BasedRootDatum, sigma: DiagramAutomorphism | None = None) -> PacketSetting:
    rel = relative_datum(d, sigma)
    return PacketSetting(d, rel, build_alcove(dual_datum(rel.datum)), build_alcove(rel.datum))


# ---------------------------------------------------------------------------
# pairing and characters


def pairing(s: PacketSetting, vertex: int, r: OmegaElement) -> QmodZ:
    """(omega, iota(r)) mod Z: the hyperspecial coweight against the translation of r."""
    return QmodZ.of(dot(s.coweight(vertex), r.transform.translation))


def pairing_table(s: PacketSetting) -> dict[tuple[int, int], QmodZ]:
    return {(v, r.vertex_image): pairing(s, v, r) for v in s.hyperspecial for r in s.omega}


@dataclass(frozen=True)
class ZetaData:
    point: AlcovePoint
    r_elements: tuple[OmegaElement, ...]
    characters: dict[int, tuple[QmodZ, ...]]
    surjective: bool

    @property
    def fibers(self) -> list[tuple[int, ...]]:
        groups: dict[tuple, list[int]] = {}
        for v, ch in self.characters.items():
            groups.setdefault(ch, []).append(v)
        return sorted(tuple(g) for g in groups.values())


def zeta(s: PacketSetting, x: AlcovePoint) -> ZetaData:
    """omega -> rho_omega restricted to R = Omega_x, with surjectivity counted exactly."""
    r_elems = s.rgroup(x).omega_x
    chars = {v: tuple(pairing(s, v, r) for r in r_elems) for v in s.hyperspecial}
    distinct = {chars[c[0]] for c in s.classes}
    return ZetaData(x, r_elems, chars, len(distinct) == len(r_elems))


# ---------------------------------------------------------------------------
# Keys cocycle


def reflect(s: PacketSetting, label: int, x: Sequence) -> Vector:
    """Linear simple reflection on Y (x) Q: x - <x, alpha_i^> alpha_i."""
    rel = s.rel
    k = rel.simple_indices[label - 1]
    return normalize(vsub(x, vscale(dot(x, rel.coroots[k]), rel.roots[k])))


def keys_base(s: PacketSetting, x: Sequence, vertex: int, label: int) -> QmodZ:
    """<x, alpha_i^> mod Z when alpha_i(omega) = 1, and 0 otherwise."""
    rel = s.rel
    k = rel.simple_indices[label - 1]
    if dot(rel.roots[k], s.coweight(vertex)) != 1:
        return ZERO
    return QmodZ.of(dot(x, rel.coroots[k]))


@dataclass(frozen=True)
class CocycleCoefficient:
    point: Vector
    vertex: int
    element: WeylElement
    word_used: tuple[int, ...]
    value: QmodZ
    terms: tuple[QmodZ, ...] = field(default=(), compare=False)


def cocycle(s: PacketSetting, x: AlcovePoint | Sequence, vertex: int, word: Sequence[int]) -> CocycleCoefficient:
    """c(omega, s_i1 ... s_ik) by peeling letters from the right.

    c_x(omega, w1 w2) = c_{w2 x}(omega, w1) + c_x(omega, w2), so the letter i_j
    contributes keys_base at the point s_{i_j+1} ... s_ik x.
    """
    start = x.coordinates if isinstance(x, AlcovePoint) else normalize(x)
    cur = start
    total = ZERO
    terms = []
    for letter in reversed(tuple(word)):
        t = keys_base(s, cur, vertex, letter)
        terms.append(t)
        total = total + t
        cur = reflect(s, letter, cur)
    elem = weyl_element(s.characters.datum, word)
    return CocycleCoefficient(start, vertex, elem, tuple(word), total, tuple(reversed(terms)))


@dataclass(frozen=True)
class WordComparison:
    word: tuple[int, ...]
    reduced: tuple[int, ...]
    value: QmodZ
    reduced_value: QmodZ

    @property
    def agree(self) -> bool:
        return self.value == self.reduced_value


def compare_with_reduced_word(s: PacketSetting, x: Sequence, vertex: int, word: Sequence[int]) -> WordComparison:
    """Evaluate the cocycle on an arbitrary word and on a reduced word for the same element.

    Only reduced words are used elsewhere; this records whether a non-reduced
    word happens to give the same value.
    """
    d = s.characters.datum
    red = reduced_word(d, weyl_element(d, word))
    return WordComparison(tuple(word), red, cocycle(s, x, vertex, word).value, cocycle(s, x, vertex, red).value)


# ---------------------------------------------------------------------------
# the identity and the packet table


@dataclass(frozen=True)
class Check:
    point: tuple[Fraction, ...]
    vertex: int
    element: int
    word: tuple[int, ...]
    cocycle: QmodZ
    pairing: QmodZ

    @property
    def ok(self) -> bool:
        return self.cocycle == self.pairing


@dataclass(frozen=True)
class VerifyReport:
    point: AlcovePoint
    r_order: int
    checks: tuple[Check, ...]
    semidirect: bool

    @property
    def failures(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if not c.ok)

    @property
    def ok(self) -> bool:
        return not self.failures and self.semidirect


def verify_main_theorem(s: PacketSetting, x: AlcovePoint) -> VerifyReport:
    """Compare the cocycle value with the pairing for every r in Omega_x and every hyperspecial vertex."""
    data = s.rgroup(x)
    checks = []
    for r in data.omega_x:
        word = r.transform.linear.word
        for v in s.hyperspecial:
            c = cocycle(s, x, v, word)
            checks.append(Check(tuple(x.barycentric), v, r.vertex_image, word, c.value, pairing(s, v, r)))
    return VerifyReport(x, len(data.omega_x), tuple(checks), data.semidirect_check)


@dataclass(frozen=True)
class PacketTable:
    point: AlcovePoint
    r_elements: tuple[int, ...]
    rows: tuple[tuple[int, tuple[QmodZ, ...]], ...]
    fibers: tuple[tuple[int, ...], ...]


def packet_table(s: PacketSetting, x: AlcovePoint) -> PacketTable:
    """For each hyperspecial class: the character of R it is spherical for, and the fibers of zeta."""
    z = zeta(s, x)
    reps = [c[0] for c in s.classes]
    rows = tuple((v, z.characters[v]) for v in reps)
    groups: dict[tuple, list[int]] = {}
    for v, ch in rows:
        groups.setdefault(ch, []).append(v)
    fibers = tuple(sorted(tuple(g) for g in groups.values()))
    return PacketTable(x, tuple(r.vertex_image for r in z.r_elements), rows, fibers)


# ---------------------------------------------------------------------------
# explicit words for the Omega generators of each classical and exceptional type


def _block(start: int, stop: int) -> tuple[int, ...]:
    step = 1 if stop >= start else -1
    return tuple(range(start, stop + step, step))


def _d_blocks(n: int, odd_end: int, even_end: int) -> tuple[int, ...]:
    """... B_3 B_2 B_1 with B_k = s_k ... s_{n-2} followed by one of s_{n-1}, s_n."""
    word: tuple[int, ...] = ()
    for k in range(1, n):
        body = tuple(range(k, n - 1))
        end = odd_end if (n - k) % 2 else even_end
        word = body + (end,) + word
    return word


def reference_words(family: str, n: int) -> dict[int, tuple[int, ...]]:
    """Words for the linear parts of Omega elements, keyed by the vertex that 0 is sent to.

    A, C, E6, E7 and the D_n element for vertex 1 are the displayed products;
    the B_n word and the remaining D_n words are reconstructed from the
    displayed block patterns (each is checked against the computed element).
    """
    if family == "A":
        return {1: _block(1, n)}
    if family == "B":
        word: tuple[int, ...] = ()
        for k in range(1, n + 1):
            word += _block(n, k)
        return {n: word}
    if family == "C":
        return {1: _block(1, n - 1) + (n,) + _block(n - 1, 1)}
    if family == "D":
        vertex_n = _d_blocks(n, n, n - 1)
        swap = {n - 1: n, n: n - 1}
        return {
            1: tuple(range(1, n - 1)) + (n,) + _block(n - 1, 1),
            n: vertex_n,
            n - 1: tuple(swap.get(i, i) for i in vertex_n),
        }
    if family == "E" and n == 6:
        return {1: (1, 3, 4, 5, 6, 2, 4, 5, 3, 4, 1, 3, 2, 4, 5, 6)}
    if family == "E" and n == 7:
        return {7: (7, 6, 5, 4, 3, 2, 1, 4, 3, 5, 4, 2, 6, 5, 4, 3, 1, 7, 6, 5, 4, 2, 3, 4, 5, 6, 7)}
    return {}
