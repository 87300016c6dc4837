"""Binomials, Catalan numbers and the two unitriangular coefficient families
used by the bipartite boundary formulas.

All values are exact integers.  Binomials with out-of-range arguments are 0,
matching the convention that factorials of negative integers kill a term.
"""

from __future__ import annotations

import math
from fractions import Fraction


def binomial(n, k):
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def catalan(h):
    """h-th Catalan number for integer h >= 0, and 0 otherwise.

    Accepts Fractions so that `catalan(Fraction(n, 2))` implements the
    half-integer convention directly.
    """
    if isinstance(h, Fraction):
        if h.denominator != 1:
            return 0
        h = h.numerator
    if not isinstance(h, int) or h < 0:
        return 0
    return math.comb(2 * h, h) // (h + 1)


def catalan_half(n):
    """Cat(n/2): nonzero only for even nonnegative n."""
    if n < 0 or n % 2:
        return 0
    return catalan(n // 2)


def a_coeff(m, k):
    """Ballot-type coefficient (2k+1)/(2m+1) * C(2m+1, m-k); integer."""
    if k < 0 or k > m:
        return 0
    num = (2 * k + 1) * binomial(2 * m + 1, m - k)
    assert num % (2 * m + 1) == 0
    return num // (2 * m + 1)


def b_coeff(n, m):
    """Signed inverse family (-1)^(n+m) * C(n+m, 2m)."""
    v = binomial(n + m, 2 * m)
    return -v if (n + m) % 2 else v


def fact0(n):
    """factorial with the negative-argument-kills-the-term convention."""
    if n < 0:
        return 0
    return math.factorial(n)


def check_ab_inverse(size):
    """A and B are mutually inverse unitriangular matrices up to `size`."""
    for m in range(size + 1):
        for l in range(size + 1):
            s = sum(a_coeff(m, k) * b_coeff(k, l) for k in range(size + 1))
            if s != (1 if m == l else 0):
                return (m, l, s)
    return None
