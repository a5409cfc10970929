from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lpacket.lattice import (
    FiniteAbelianGroup,
    Lattice,
    LatticeMap,
    coinvariants_mod_torsion,
    cokernel_torsion,
    determinant,
    diagonal_entries,
    fixed_sublattice,
    hermite_normal_form,
    in_span,
    induced_pairing,
    kernel_basis,
    mat_mul,
    smith_normal_form,
    transpose,
)

from oracles import invariant_factors

small = st.integers(min_value=-6, max_value=6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def unimodular(n):
    """Random unimodular matrices as products of elementary operations."""
    ops = st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-3, 3)), max_size=8)

    def build(steps):
        m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for i, j, k in steps:
            if i != j:
                m[i] = [a + k * b for a, b in zip(m[i], m[j])]
            else:
                m[i] = [-a for a in m[i]]
        return tuple(tuple(r) for r in m)

    return ops.map(build)


def as_map(m):
    rows, cols = len(m), len(m[0])
    return LatticeMap(Lattice(cols), Lattice(rows), tuple(tuple(r) for r in m))


def test_snf_identity():
    u, d, v = smith_normal_form(((1, 0), (0, 1)))
    assert d == ((1, 0), (0, 1))


def test_snf_zero():
    _, d, _ = smith_normal_form(((0,),))
    assert d == ((0,),)


def test_snf_cartan_a2():
    _, d, _ = smith_normal_form(((2, -1), (-1, 2)))
    assert diagonal_entries(d) == [1, 3]


@given(matrices())
def test_snf_factorization(m):
    u, d, v = smith_normal_form(tuple(tuple(r) for r in m))
    assert mat_mul(mat_mul(u, tuple(tuple(r) for r in m)), v) == d
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    diag = diagonal_entries(d)
    for i in range(len(d)):
        for j in range(len(d[0])):
            if i != j:
                assert d[i][j] == 0
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert diag[: len(nonzero)] == nonzero


@given(matrices(3, 3))
def test_snf_matches_determinantal_divisors(m):
    _, d, _ = smith_normal_form(tuple(tuple(r) for r in m))
    assert [x for x in diagonal_entries(d) if x] == invariant_factors(m)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n), unimodular(n), unimodular(n))))
def test_cokernel_isomorphism_invariant(data):
    m, p, q = data
    m = tuple(tuple(r) for r in m)
    a = cokernel_torsion(as_map(m)).invariant_factors
    b = cokernel_torsion(as_map(mat_mul(mat_mul(p, m), q))).invariant_factors
    assert a == b


def test_cokernel_examples():
    a2 = as_map(((2, -1), (-1, 2)))
    assert cokernel_torsion(a2).invariant_factors == (3,)
    assert cokernel_torsion(as_map(((1, 0), (0, 1)))).invariant_factors == ()
    d4 = ((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2))
    g = cokernel_torsion(as_map(d4))
    assert g.invariant_factors == (2, 2) and not g.is_cyclic and g.order == 4


def test_cokernel_free_rank_reported():
    g = cokernel_torsion(as_map(((2,), (0,))))
    assert g.invariant_factors == (2,) and g.free_rank == 1


def test_trivial_group():
    g = FiniteAbelianGroup((), (), 0)
    assert g.order == 1 and g.invariant_factors == ()


def test_fixed_sublattice_examples():
    z2 = Lattice(2)
    f, emb = fixed_sublattice(z2, LatticeMap(z2, z2, ((1, 0), (0, 1))))
    assert f.rank == 2
    f, emb = fixed_sublattice(z2, LatticeMap(z2, z2, ((0, 1), (1, 0))))
    assert f.rank == 1
    col = tuple(r[0] for r in emb.matrix)
    assert col in ((1, 1), (-1, -1))
    q, proj = coinvariants_mod_torsion(z2, LatticeMap(z2, z2, ((0, 1), (1, 0))))
    assert q.rank == 1
    q, proj = coinvariants_mod_torsion(z2, LatticeMap(z2, z2, ((1, 0), (0, 1))))
    assert q.rank == 2


def test_a3_folding_on_coweights():
    # the diagram flip of A3 on fundamental coweight coordinates permutes them
    z3 = Lattice(3)
    flip = LatticeMap(z3, z3, ((0, 0, 1), (0, 1, 0), (1, 0, 0)))
    f, emb = fixed_sublattice(z3, flip)
    assert f.rank == 2
    q, proj = coinvariants_mod_torsion(z3, flip)
    assert abs(determinant(induced_pairing(proj, emb))) == 1


def test_rejects_non_invertible():
    z2 = Lattice(2)
    with pytest.raises(ValueError):
        fixed_sublattice(z2, LatticeMap(z2, z2, ((2, 0), (0, 1))))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(unimodular(n), st.sampled_from([1, 2, 3, 4, 6]))))
def test_fixed_and_coinvariants_are_dual(data):
    p, k = data
    n = len(p)
    # conjugate a cyclic coordinate shift (order n) into a random basis
    shift = tuple(tuple(1 if j == (i + 1) % n else 0 for j in range(n)) for i in range(n))
    pinv = tuple(tuple(int(x) for x in r) for r in _inverse(p))
    auto = mat_mul(mat_mul(p, shift), pinv)
    lat = Lattice(n)
    f, emb = fixed_sublattice(lat, LatticeMap(lat, lat, auto))
    # the coinvariants of the contragredient pair with the fixed vectors perfectly
    dual = tuple(tuple(int(x) for x in r) for r in transpose(_inverse(auto)))
    q, proj = coinvariants_mod_torsion(lat, LatticeMap(lat, lat, dual))
    assert f.rank == q.rank
    if f.rank:
        pairing = induced_pairing(proj, emb)
        assert all(x == int(x) for row in pairing for x in row)
        assert abs(determinant(pairing)) == 1


def _inverse(m):
    from lpacket.lattice import inverse

    return inverse(m)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=5))
def test_hermite_form_is_canonical_basis(rows):
    h = hermite_normal_form(rows, 3)
    for r in rows:
        assert in_span(h, r) if h else not any(r)
    # same lattice from a shuffled, redundant generating set
    h2 = hermite_normal_form(list(reversed(rows)) + [[a + b for a, b in zip(rows[0], rows[-1])]], 3)
    assert h == h2


def test_kernel_basis():
    k = kernel_basis(((1, 1, 1),), 3)
    assert len(k) == 2
    assert all(sum(v) == 0 for v in k)


def test_group_elements_enumerate_quotient():
    g = cokernel_torsion(as_map(((2, 0), (0, 4))))
    assert g.invariant_factors == (2, 4)
    assert len(g.elements()) == 8
    assert len({tuple(Fraction(x) % 1 for x in (e[0] / 2, e[1] / 4)) for e in g.elements()}) == 8
