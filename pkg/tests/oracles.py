"""Independent reference computations used to check the library.

Nothing here calls the library's Smith form, alcove or Omega code; the
oracles work from determinantal divisors, explicit group closures and the
Euclidean coordinates of the standard realizations.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    sign, out = 1, Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * out


def invariant_factors(m):
    """Invariant factors from determinantal divisors d_k = gcd of k x k minors."""
    rows, cols = len(m), len(m[0]) if m else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, int(det([[m[r][c] for c in cs] for r in rs])))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def closure(gens):
    """All products of the generating matrices (finite groups only)."""
    n = len(gens[0])
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def reflection_matrix(root, coroot):
    """v -> v - <root, v> coroot, on the coroot side."""
    n = len(root)
    return tuple(tuple((1 if i == j else 0) - coroot[i] * root[j] for j in range(n)) for i in range(n))


def brute_force_stabilizer(roots, coroots, x, bound=3):
    """All (w, t) in W x| Z^n with |t|_inf <= bound fixing x, W generated by the given reflections.

    ``roots`` pair with vectors of the translation lattice Z^n; ``coroots`` live in it.
    """
    gens = [reflection_matrix(r, c) for r, c in zip(roots, coroots)]
    out = set()
    for w in closure(gens):
        t = tuple(Fraction(a) - b for a, b in zip(x, mat_vec(w, x)))
        if all(c.denominator == 1 and abs(c) <= bound for c in t):
            out.add((w, tuple(int(c) for c in t)))
    return out


def a_n_b_coordinates(a):
    """Coordinates b_1..b_{n+1} of sum a_i x_i for A_n, from the closed formula."""
    n = len(a)
    out = []
    for i in range(1, n + 2):
        s = Fraction(0)
        for k in range(1, n + 1):
            s += (-k if k < i else n + 1 - k) * Fraction(a[k - 1])
        out.append(s / (n + 1))
    return out


def weighted_lattice_points(marks, q):
    """Nonnegative integer solutions of sum marks[i] k_i = q, by brute force."""
    ranges = [range(q // m + 1) for m in marks]
    return [ks for ks in product(*ranges) if sum(m * k for m, k in zip(marks, ks)) == q]
