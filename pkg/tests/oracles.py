"""Independent reference computations used by the tests.

Nothing here touches the branching rule.
"""
from fractions import Fraction
from itertools import product
from math import factorial


def complete_homogeneous(k, xs):
    """h_k(xs) by the one-variable-at-a-time recursion."""
    if k < 0:
        return 0
    h = [1] + [0] * k  # h_j of no variables
    for x in xs:
        for j in range(1, k + 1):
            h[j] = h[j] + x * h[j - 1]
    return h[k]


def det(rows):
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return out


def schur_jacobi_trudi(lam, xs):
    """s_lam(xs) = det(h_{lam_i - i + j}); lam a partition (trailing zeros allowed)."""
    lam = [v for v in lam if v > 0]
    if not lam:
        return Fraction(1)
    n = len(lam)
    return det([[complete_homogeneous(lam[i] - i + j, xs) for j in range(n)] for i in range(n)])


def ssyt_count(lam, N):
    """Number of semistandard tableaux of shape lam with entries in 1..N (brute force)."""
    cells = [(i, j) for i, row in enumerate(lam) for j in range(row)]
    count = 0
    for fill in product(range(1, N + 1), repeat=len(cells)):
        t = dict(zip(cells, fill))
        ok = all(
            (j == 0 or t[(i, j - 1)] <= v) and (i == 0 or t[(i - 1, j)] < v)
            for (i, j), v in t.items()
        )
        count += ok
    return count


def _rising(x, n):
    out = Fraction(1)
    for k in range(n):
        out *= x + k
    return out


def _compositions(k, n):
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


def one_row_jack(k, xs, theta):
    """Monic one-row Jack polynomial P_(k)(xs; theta) from its generating function

        prod_i (1 - x_i t)^(-theta) = sum_k (theta)_k / k! P_(k) t^k.
    """
    theta = Fraction(theta)
    total = Fraction(0)
    for alpha in _compositions(k, len(xs)):
        term = Fraction(1)
        for a, x in zip(alpha, xs):
            term *= _rising(theta, a) / factorial(a) * Fraction(x) ** a
        total += term
    return total * factorial(k) / _rising(theta, k)
