"""Generating functions of irreducible maps with a controlled outer boundary.

Everything here is a polynomial in the solved kernel data (R, S, V_k) with
exact rational coefficients: boundary series for fixed outer degree, their
pointed and simple-boundary variants, two-marked-face series and annular
series for a second girth parameter.  Wherever two independent routes exist
(derivative vs. closed form) both are computed and compared.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from .series import Series, xvar
from .paths import path_poly
from .tables import binomial, catalan, catalan_half, fact0
from .kernel import KernelState, KernelError


class BoundaryError(Exception):
    pass


def boundary_gf(n, kernel):
    """Series of d-irreducible maps with outer degree n (path-sum route)."""
    if n < 0:
        raise BoundaryError("negative outer degree")
    R, S = kernel.R, kernel.S
    total = path_poly(n, 0, R, S, nonneg=True)
    for k in range(1, n + 1):
        vk = kernel.slice_gf(k)
        if vk.is_zero():
            continue
        total = total - path_poly(n, k, R, S, nonneg=True) * vk
    return total


def boundary_gf_bipartite(n, kernel):
    """Bipartite closed form; only the kernel's R enters.

    An odd outer degree is a parity violation: the result is the zero series
    and a warning is emitted.
    """
    spec = kernel.spec
    if not spec.bipartite:
        raise BoundaryError("kernel is not bipartite")
    if n % 2:
        warnings.warn("odd outer degree in bipartite mode yields zero")
        return spec.zero()
    m, b = n // 2, kernel.d // 2
    R = kernel.R
    if m < b:
        return spec.zero() + catalan(m)
    if m == b:
        return spec.z() + catalan(b)
    total = spec.zero()
    for l in range(0, b):
        c = Fraction((b - l) * binomial(b + l, 2 * l) * catalan(l), m - l)
        term = (R ** (m - l)) * c
        total = total + (term if (b - l - 1) % 2 == 0 else -term)
    for deg in spec.face_degrees:
        j = deg // 2
        if j >= b + 1:
            c = Fraction((b + j) * binomial(2 * j - 1, j + b), m + j)
            total = total - spec.x(deg) * (R ** (m + j)) * c
    return total * binomial(2 * m, m - b)


def pointing_gf(n, kernel):
    """Pointed boundary series, computed two ways and cross-checked.

    The z-derivative of the boundary series must equal the single lattice
    path polynomial in (R, S) of span d.  Raises on any mismatch, reporting
    the offending monomial.  Returns the common value (order reduced by one,
    as for any formal derivative).
    """
    d = kernel.d
    lhs = boundary_gf(n, kernel).derivative("z")
    rhs = path_poly(n, d, kernel.R, kernel.S).truncate(lhs.order)
    diff = lhs - rhs
    if not diff.is_zero():
        exp = min(diff.terms, key=lambda e: (sum(e), e))
        raise BoundaryError("pointing mismatch at n=%d, d=%d, monomial %r: %s"
                            % (n, d, exp, diff.terms[exp]))
    return rhs


def annular_gf(n, dprime, kernel):
    """Annular series (I, I~) for a second girth parameter d'.

    I counts the irreducible annular maps, I~ the quasi-irreducible ones;
    the wrapped variant always satisfies I~ = I * R^d'.
    """
    if n < 0 or dprime < 0:
        raise BoundaryError("need n, d' >= 0")
    R, S = kernel.R, kernel.S
    sep = path_poly(n, dprime, R, S)
    quasi = path_poly(n, -dprime, R, S)
    if quasi != sep * (R ** dprime):
        raise BoundaryError("annular wrap relation violated at n=%d d'=%d"
                            % (n, dprime))
    return sep, quasi


def two_face_gf(m, mprime, kernel):
    """Closed form for bipartite maps with two marked faces of degrees
    2m and 2m' (both above the girth bound)."""
    spec = kernel.spec
    if not spec.bipartite:
        raise BoundaryError("two-face closed form is bipartite")
    b = kernel.d // 2
    if m <= b or mprime <= b:
        raise BoundaryError("marked faces must have degree above the bound")
    c = Fraction((m - b) * (mprime - b) * binomial(2 * m, m - b)
                 * binomial(2 * mprime, mprime - b), m + mprime)
    return (kernel.R ** (m + mprime)) * c


def two_face_check(m, mprime, kernel):
    """Derivative route vs. closed form for the two-face series.

    The derivative route marks a face of degree 2m' in the boundary series
    (2m' times the formal x-derivative).  Returns the common value.
    """
    spec = kernel.spec
    deg = 2 * mprime
    if deg not in spec.face_degrees:
        raise BoundaryError("kernel lacks the weight x_%d" % deg)
    F = boundary_gf_bipartite(2 * m, kernel)
    lhs = F.derivative(xvar(deg)) * (2 * mprime)
    rhs = two_face_gf(m, mprime, kernel).truncate(lhs.order)
    diff = lhs - rhs
    if not diff.is_zero():
        exp = min(diff.terms, key=lambda e: (sum(e), e))
        raise BoundaryError("two-face mismatch at (m=%d, m'=%d), monomial %r: %s"
                            % (m, mprime, exp, diff.terms[exp]))
    return rhs


def simple_boundary_gf(p, kernel):
    """Quadrangular-family series with a simple outer boundary of length 2p.

    Substitutes the renormalized weight into the known two-term expression;
    valid on a pure d=4 kernel.
    """
    if kernel.d != 4 or kernel.spec.face_degrees:
        raise BoundaryError("simple-boundary form implemented for the pure "
                            "quadrangular family")
    if p < 1:
        raise BoundaryError("need p >= 1")
    r = kernel.R
    x4 = (r - 1) * (r ** 3).inverse()   # renormalized weight of a square
    pref = Fraction(fact0(3 * p - 3), fact0(p) * fact0(2 * p - 1))
    series = (x4 ** (p - 1)) * (r ** (3 * p - 2)) * p \
        + (x4 ** p) * (r ** (3 * p)) * (2 - 3 * p)
    return series * pref


def simple_boundary_coeff(p, k):
    """Closed coefficient for the simple-boundary quadrangular series.

    Factorials of negative integers kill the term.
    """
    num = fact0(3 * p - 3) * fact0(2 * k - p - 1)
    den_a = fact0(p - 3) * fact0(2 * p - 1)
    den_b = fact0(k) * fact0(k - p + 1)
    if num == 0 or den_a == 0 or den_b == 0:
        return 0
    value = Fraction(num, den_a * den_b)
    assert value.denominator == 1
    return int(value)


def hypergeom_low_identity(b, m, l):
    """Direct-summation check of the Cat-side binomial contraction."""
    from .tables import a_coeff, b_coeff
    lhs = sum(a_coeff(m, k) * b_coeff(k, l) for k in range(l, b))
    sign = 1 if (b - l - 1) % 2 == 0 else -1
    rhs = Fraction(sign * (b - l) * binomial(2 * m, m - b) * binomial(b + l, 2 * l),
                   m - l)
    return Fraction(lhs) == rhs


def hypergeom_high_identity(b, m, j):
    """Direct-summation check of the weight-side binomial contraction."""
    from .tables import a_coeff
    lhs = sum(a_coeff(m, k) * binomial(2 * j - 1, j + k) for k in range(b, m + 1))
    rhs = Fraction((b + j) * binomial(2 * m, m - b) * binomial(2 * j - 1, j + b),
                   m + j)
    return Fraction(lhs) == rhs


def boundary_table_csv(rows):
    """Render (n, d, monomial, coefficient) rows as CSV lines."""
    lines = ["n,d,monomial,coefficient"]
    for n, d, mono, coeff in rows:
        lines.append("%d,%d,%s,%s" % (n, d, mono, coeff))
    return "\n".join(lines) + "\n"


def series_rows(n, d, series):
    """Deterministic (lexicographic) row listing for one boundary series."""
    rows = []
    for exp in sorted(series.terms):
        mono = " ".join("%s^%d" % (v, e) for v, e in zip(series.vars, exp) if e) or "1"
        rows.append((n, d, mono, series.terms[exp]))
    return rows
