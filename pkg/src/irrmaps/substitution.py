"""Renormalized face weights: the substitution route to irreducible maps.

The girth-d series G_d (maps of girth d with outer degree d) is the
compositional link between consecutive irreducibility levels: replacing the
weight of minimal faces by G_d removes the constraint, and its compositional
inverse X_d reinstates it.  Iterating downward produces the full ladder of
renormalized weights, expressing any irreducible boundary series in terms of
the unconstrained one.  The weakly-irreducible series for outer degree d is a
simple affine expression in X_d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .series import Series, xvar, merge_vars
from .paths import path_poly
from .tables import catalan_half
from .kernel import WeightSpec, solve_kernel
from .boundary import boundary_gf


class SubstitutionError(Exception):
    pass


def _drop_z(series, order):
    zero = Series.zero((), order)
    out = series.substitute("z", zero)
    return out


def girth_gf(d, max_degree, order):
    """Series of rooted maps of girth d and outer degree d.

    Variables are the face weights x_d .. x_{max_degree}; the defining kernel
    one level down is solved with its minimal-face weight switched off.
    """
    if d < 1:
        raise SubstitutionError("need d >= 1")
    spec = WeightSpec(d - 1, order, tuple(range(d, max_degree + 1)))
    kern = solve_kernel(spec)
    F = boundary_gf(d, kern)
    return _drop_z(F, order) - catalan_half(d)


@dataclass
class SubstitutionLadder:
    """The girth series, its inverse, and the downward weight ladder."""

    d: int
    max_degree: int
    order: int
    G: Series
    X: Series                      # X_d(z; x_{d+1}, ...)
    ladder: dict = field(repr=False)   # j -> X_j^{(d)} for 1 <= j <= d


def _split_head(G, name):
    """Split off the part of G free of the named variable.

    The head comes back without the variable in its tuple, so it can be fed
    into substitutions for that same variable without name capture.
    """
    i = G.vars.index(name)
    a_terms = {e: c for e, c in G.terms.items() if e[i] == 0}
    head = Series(G.vars, G.order, a_terms, _clean=False)
    return head.drop_variable(name), G - head


def _invert_girth_series(G, d, order):
    """Compositional inverse of G in its minimal-weight variable, evaluated
    at a target value with zero constant term."""
    head, core = _split_head(G, xvar(d))
    if core.coeff_of(**{xvar(d): 1}) != 1:
        raise SubstitutionError("girth series must be unit-linear in its "
                                "minimal face weight")
    D = core.revert(xvar(d))
    return head, D


def x_at_zero(j, max_degree, order):
    """X_j(0; x_{j+1}, ..): the renormalized weight with minimal faces off."""
    G = girth_gf(j, max_degree, order)
    head, D = _invert_girth_series(G, j, order)
    return D.substitute(xvar(j), -head)


def renormalized_ladder(d, max_degree, order):
    """Build X_d and the full downward ladder of renormalized weights."""
    if d < 1:
        raise SubstitutionError("need d >= 1")
    G = girth_gf(d, max_degree, order)
    head, D = _invert_girth_series(G, d, order)
    target_vars = merge_vars(("z",),
                             tuple(xvar(j) for j in range(d + 1, max_degree + 1)))
    zser = Series.variable("z", target_vars, order)
    X = D.substitute(xvar(d), zser - head.embed(target_vars))
    ladder = {d: X}
    for j in range(d - 1, 0, -1):
        xj0 = x_at_zero(j, max_degree, order)
        reps = {xvar(i): ladder[i] for i in range(j + 1, d + 1) if xvar(i) in xj0.vars}
        ladder[j] = xj0.substitute_many(reps) if reps else xj0
    return SubstitutionLadder(d, max_degree, order, G, X, ladder)


def check_substitution(d, n, max_degree, order):
    """Exactness report for the substitution identities at one (d, n).

    Checks the one-step identity (girth series replaces the weight z) and
    the d-fold ladder identity down to unconstrained maps.  Returns a dict
    mapping check names to None (pass) or the offending monomial.
    """
    if d < 1:
        raise SubstitutionError("need d >= 1")
    report = {}
    # one step: F_n at level d-1 with minimal faces off vs composition
    spec_low = WeightSpec(d - 1, order, tuple(range(d, max_degree + 1)))
    lhs = _drop_z(boundary_gf(n, solve_kernel(spec_low)), order)
    spec_high = WeightSpec(d, order, tuple(range(d + 1, max_degree + 1)))
    F_high = boundary_gf(n, solve_kernel(spec_high))
    G = girth_gf(d, max_degree, order)
    rhs = F_high.substitute("z", G)
    report["one-step"] = _residual(lhs - rhs)
    # full ladder down to unconstrained maps
    lad = renormalized_ladder(d, max_degree, order)
    spec0 = WeightSpec(0, order, tuple(range(1, max_degree + 1)))
    F0 = boundary_gf(n, solve_kernel(spec0))
    F0 = _drop_z(F0, order)
    reps = {xvar(j): lad.ladder[j] for j in range(1, d + 1)}
    composed = F0.substitute_many(reps)
    report["ladder"] = _residual(composed - F_high.embed(composed.vars))
    return report


def _residual(diff):
    if diff.is_zero():
        return None
    exp = min(diff.terms, key=lambda e: (sum(e), e))
    return (diff.vars, exp, diff.terms[exp])


def diagonal_gf(G):
    """Series of girth-d maps carrying at least one antipodal diagonal path
    (even d), expressed through the girth series itself."""
    return (G * G) * (1 + G).inverse()


@dataclass
class WeakIrreducibleGF:
    d: int
    H: Series
    X: Series


def weak_irreducible_H(kernel):
    """Weakly irreducible maps with outer degree d, from the solved kernel.

    Uses the practical expression for X_d through the next-to-top slice
    series rather than an explicit reversion.
    """
    spec, d = kernel.spec, kernel.d
    if d < 1:
        raise SubstitutionError("need d >= 1")
    R, S = kernel.R, kernel.S
    num = kernel.V[d - 2] if d >= 1 else spec.zero()
    for j in spec.face_degrees:
        if j >= d + 1:
            num = num - spec.x(j) * path_poly(j - 1, -d + 1, R, S)
    X = num * (R ** (d - 1)).inverse()
    z = spec.z()
    H = z * 2 - X
    if d % 2 == 0:
        one = spec.zero() + 1
        H = H + (z ** 3) * (one + z).inverse() * Fraction(d, 2)
    return WeakIrreducibleGF(d, H, X)


def ih_relation_residual(kernel, weak):
    """Residual of the identity tying R^d to the pointed weak series."""
    d = kernel.d
    Hp = weak.H.derivative("z")
    Rd = (kernel.R ** d).truncate(Hp.order)
    one = Rd.one_like()
    z = Series.variable("z", Hp.vars, Hp.order) if "z" in Hp.vars else None
    if d % 2:
        denom = one * 2 - Hp
    else:
        denom = one * 2 - Hp + z * d + \
            (z * 2 + z * z) * ((one + z) ** 2).inverse() * Fraction(-d, 2)
    return Rd * denom - one
