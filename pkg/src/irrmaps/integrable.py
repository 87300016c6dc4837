"""Distance- and depth-refined kernels and their discrete integrable structure.

Adding a bound on slice depth refines every kernel entry V_k into a family
V_{k,p}; the refined system couples neighbouring depths and, for the small
dissection families, collapses to three-term recurrences for a sequence T_i
whose coefficients stabilize in i.  Those recurrences admit closed product
solutions in an auxiliary series y with zero constant term, and conserved
quantities that reproduce the fixed-boundary series independently of i.

Every computation here is a forward sweep over a (index, degree) grid: all
couplings carry at least one weight factor, so degree-n coefficients only ever
consume lower degrees, making the two-sided recurrences well founded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .series import Series, xvar
from .paths import z_weighted, path_poly
from .kernel import WeightSpec, solve_kernel, KernelError
from .boundary import boundary_gf


class IntegrableError(Exception):
    pass


# -- depth-refined kernel -------------------------------------------------------

@dataclass
class DistanceKernel:
    """Depth-refined slice column: V[k][p] for -1 <= k <= d, 0 <= p <= p_max."""

    spec: WeightSpec
    p_max: int
    V: dict = field(repr=False)

    @property
    def d(self):
        return self.spec.d

    def v(self, k, p):
        if p < 0:
            return self.spec.zero()
        if p > self.p_max:
            raise IntegrableError("depth %d beyond solved window" % p)
        return self.V[k][p]

    def r(self, p):
        """R_p = 1 + V_{0,p-1}; R_0 = 0 by convention."""
        if p == 0:
            return self.spec.zero()
        return 1 + self.v(0, p - 1)

    def s(self, p):
        return self.v(-1, p)


def solve_distance_kernel(spec, p_max):
    """Fixed point of the depth-refined system on a padded (k, p) grid.

    Cells at depth <= p_max are exact to the truncation order; the pad
    absorbs the upward depth references of the quadratic terms.
    """
    d, N = spec.d, spec.order
    reach = max(1, d - 1, d + max(spec.face_degrees, default=0))
    pad = p_max + reach * N + 2
    zero = spec.zero()
    z = spec.z()
    V = {k: [zero] * (pad + 1) for k in range(-1, d + 1)}
    for _ in range(N + d + 5):
        new = {k: list(col) for k, col in V.items()}
        for p in range(0, pad + 1):
            # top rows: explicit height-weighted path sums over the weights
            for k in (d, d - 1):
                new[k][p] = _top_row(spec, V, k, p)
        for k in range(d - 2, -2, -1):
            for p in range(0, pad + 1):
                acc = zero
                if k == d - 2:
                    acc = acc + z
                if p >= 1:
                    for m in range(1, k + 2):
                        if p + m <= pad:
                            acc = acc + new[m][p - 1] * new[k - m][p + m]
                    acc = acc + new[k + 2][p - 1]
                new[k][p] = acc
        if new == V:
            return DistanceKernel(spec, p_max, V)
        V = new
    raise IntegrableError("depth-refined system did not stabilize; this is a bug")


def _top_row(spec, V, k, p):
    total = spec.zero()
    degs = [j for j in spec.face_degrees if j >= k + 2]
    if not degs:
        return total
    n_max = max(degs) - 1
    zero = spec.zero()
    pad = len(V[0]) - 1
    # heights beyond the grid only feed the inexact pad zone; zero is fine there
    down = {m: (1 + V[0][m - 1] if m - 1 <= pad else zero)
            for m in range(1, p + k + 1 + n_max + 2)}
    level = {m: (V[-1][m] if m <= pad else zero)
             for m in range(0, p + k + 1 + n_max + 2)}
    one = spec.zero() + 1
    for j in degs:
        total = total + spec.x(j) * z_weighted(j - 1, p + k + 1, p,
                                               down, level, one=one)
    return total


# -- hierarchies ------------------------------------------------------------------

_FAMILIES = (3, 4, 6, 8)


def hierarchy(family, order, i_max):
    """T_i sequence of the family's three-term-type recurrence.

    Returns T[0..i_max] as univariate series in z, solved jointly on the
    (index, degree) grid with the family's initial zeros.
    """
    if family not in _FAMILIES:
        raise IntegrableError("family must be one of %r" % (_FAMILIES,))
    pad = {3: 1, 4: 1, 6: 2, 8: 3}[family]
    lo = -(pad - 1)
    hi = i_max + pad * (order + 1)
    vars = ("z",)
    zero = Series.zero(vars, order)
    one = Series.constant(1, vars, order)
    z = Series.variable("z", vars, order)
    T = {i: zero for i in range(lo, hi + 1)}

    def get(i):
        return T.get(i, zero)

    for _ in range(order + 2):
        new = dict(T)
        for i in range(1, hi + 1):
            if family == 4:
                rhs = one + z * get(i - 1) * get(i + 1)
            elif family == 3:
                rhs = one + (z ** 2) * get(i - 1) * get(i) * get(i + 1)
            elif family == 6:
                rhs = one + z * (get(i - 2) * get(i + 1) + get(i - 1) * get(i + 1)
                                 + get(i - 1) * get(i + 2)) \
                    - (z ** 2) * get(i - 2) * get(i) * get(i + 2)
            else:  # family == 8
                rhs = one \
                    + z * (get(i - 3) * get(i + 1) + get(i - 2) * get(i + 1)
                           + get(i - 1) * get(i + 1) + get(i - 2) * get(i + 2)
                           + get(i - 1) * get(i + 2) + get(i - 1) * get(i + 3)) \
                    - (z ** 2) * (get(i - 2) * get(i) * get(i + 2)
                                  + get(i - 3) * get(i - 1) * get(i + 2)
                                  + get(i - 3) * get(i) * get(i + 2)
                                  + get(i - 3) * get(i) * get(i + 3)
                                  + get(i - 2) * get(i) * get(i + 3)
                                  + get(i - 2) * get(i + 1) * get(i + 3)) \
                    + (z ** 3) * get(i - 3) * get(i - 1) * get(i + 1) * get(i + 3)
            new[i] = rhs
        if new == T:
            break
        T = new
    return [T[i] for i in range(0, i_max + 1)]


def homogeneous_t(family, order):
    """Stable limit of the hierarchy: T with r = 1 + zT solving the pure kernel."""
    d = family
    kern = solve_kernel(WeightSpec.pure(d, order + 1))
    if d == 3:
        # s = zT for the triangular family
        return _shift_down(kern.S, 1, order)
    return _shift_down(kern.R - 1, 1, order)


def _shift_down(series, by, order):
    terms = {}
    i = series.vars.index("z")
    for e, c in series.terms.items():
        if e[i] < by:
            if c:
                raise IntegrableError("series not divisible by z^%d" % by)
            continue
        terms[e[:i] + (e[i] - by,) + e[i + 1:]] = c
    return Series(series.vars, order, terms)


# -- closed product forms ----------------------------------------------------------

def _y_fixed_point(rhs, order, vars=("z",)):
    """Unique power-series branch y with y(0) = 0 of y = rhs(y)."""
    y = Series.zero(vars, order)
    for _ in range(order + 2):
        new = rhs(y)
        if new == y:
            return y
        y = new
    raise IntegrableError("y-branch iteration did not stabilize")


def closed_form_check(family, order, i_max):
    """Product-form solutions vs. recurrence output; exact equality report."""
    if family == 4:
        T = hierarchy(4, order, i_max + 1)
        Tinf = homogeneous_t(4, order)
        y = _y_fixed_point(lambda y: (Tinf.truncate(order) * Series.variable("z", ("z",), order)) * (1 + y * y), order)
        report = {}
        for i in range(0, i_max + 1):
            prod = Tinf.truncate(order) * (1 - y ** i) * (1 - y ** (i + 5))
            den = (1 - y ** (i + 2)) * (1 - y ** (i + 3))
            report["T_%d" % i] = (T[i] == prod * den.inverse())
        # r_i = 1 + z T_{i-1}, product form in the same y
        kern = solve_kernel(WeightSpec.pure(4, order))
        r = kern.R
        z = Series.variable("z", ("z",), order)
        for i in range(1, i_max + 1):
            ri = 1 + z * T[i - 1]
            prod = r * (1 - y ** i) * (1 - y ** (i + 3))
            den = (1 - y ** (i + 1)) * (1 - y ** (i + 2))
            report["r_%d" % i] = (ri == (prod * den.inverse()).truncate(ri.order))
        return report
    if family == 3:
        T = hierarchy(3, order, i_max + 1)
        kern = solve_kernel(WeightSpec.pure(3, order + 1))
        s = kern.S
        z = Series.variable("z", ("z",), order)
        y = _y_fixed_point(lambda y: (s.truncate(order) ** 2) * (1 + y + y * y), order)
        report = {}
        for i in range(0, i_max + 1):
            si = z * T[i]
            prod = s.truncate(order) * (1 - y ** i) * (1 - y ** (i + 3))
            den = (1 - y ** (i + 1)) * (1 - y ** (i + 2))
            report["s_%d" % i] = (si == (prod * den.inverse()).truncate(si.order))
        r = kern.R.truncate(order)
        for i in range(1, i_max + 1):
            ri = 1 + (z * T[i - 1]) * (z * T[i])
            prod = r * (1 - y ** i) * (1 - y ** (i + 2))
            den = (1 - y ** (i + 1)) ** 2
            report["r_%d" % i] = (ri == (prod * den.inverse()).truncate(ri.order))
        return report
    raise IntegrableError("closed product forms cover the 3- and 4-families")


def closed_form_check_baseline(kind, order, i_max):
    """Product forms for the unconstrained distance systems.

    ``kind`` is "quad" (weights x2, x4) or "tri" (weights x1, x2, x3).
    """
    if kind == "quad":
        R = quad_baseline_r(order, i_max + 4)
        vars = R[1].vars
        x2 = Series.variable("x2", vars, order)
        x4 = Series.variable("x4", vars, order)
        Rh = _quad_homogeneous(order)
        y = _y_fixed_point(lambda y: x4 * Rh * Rh * (1 + y + y * y), order, vars)
        report = {}
        for i in range(1, i_max + 1):
            prod = Rh * (1 - y ** i) * (1 - y ** (i + 3))
            den = (1 - y ** (i + 1)) * (1 - y ** (i + 2))
            report["R_%d" % i] = (R[i] == prod * den.inverse())
        return report
    if kind == "tri":
        R, S = tri_baseline_rs(order, i_max + 4)
        vars = R[1].vars
        x3 = Series.variable("x3", vars, order)
        Rh, Sh = _tri_homogeneous(order)
        y = _y_fixed_point(lambda y: (x3 ** 2) * (Rh ** 3) * ((1 + y) ** 2), order, vars)
        report = {}
        for i in range(1, i_max + 1):
            prod = Rh * (1 - y ** i) * (1 - y ** (i + 2))
            den = (1 - y ** (i + 1)) ** 2
            report["R_%d" % i] = (R[i] == prod * den.inverse())
            corr = x3 * Rh * Rh * (y ** (i - 1)) * (1 - y) * (1 - y * y)
            den2 = (1 - y ** i) * (1 - y ** (i + 1))
            report["S_%d" % (i - 1)] = (S[i - 1] == Sh - corr * den2.inverse())
        return report
    raise IntegrableError("kind must be 'quad' or 'tri'")


# -- unconstrained distance systems (baselines) ------------------------------------

def quad_baseline_r(order, i_top):
    """R_i for maps with bivalent and tetravalent faces; R_0 = 0."""
    vars = ("x2", "x4")
    zero = Series.zero(vars, order)
    one = Series.constant(1, vars, order)
    x2 = Series.variable("x2", vars, order)
    x4 = Series.variable("x4", vars, order)
    hi = i_top + order + 2
    R = {i: zero for i in range(0, hi + 2)}
    for _ in range(order + 2):
        new = dict(R)
        for i in range(1, hi + 1):
            new[i] = one + x2 * new[i] + x4 * new[i] * (new[i - 1] + new[i] + new[i + 1])
        if new == R:
            break
        R = new
    return {i: R[i] for i in range(0, i_top + 1)}


def _quad_homogeneous(order):
    vars = ("x2", "x4")
    one = Series.constant(1, vars, order)
    x2 = Series.variable("x2", vars, order)
    x4 = Series.variable("x4", vars, order)
    R = Series.zero(vars, order)
    for _ in range(order + 2):
        new = one + x2 * R + x4 * R * R * 3
        if new == R:
            break
        R = new
    return R


def tri_baseline_rs(order, i_top):
    """R_i, S_i for maps with faces of degree at most 3; R_0 = 0."""
    vars = ("x1", "x2", "x3")
    zero = Series.zero(vars, order)
    one = Series.constant(1, vars, order)
    x1 = Series.variable("x1", vars, order)
    x2 = Series.variable("x2", vars, order)
    x3 = Series.variable("x3", vars, order)
    hi = i_top + order + 2
    R = {i: zero for i in range(0, hi + 2)}
    S = {i: zero for i in range(-1, hi + 2)}
    for _ in range(order + 2):
        newR, newS = dict(R), dict(S)
        for i in range(1, hi + 1):
            newR[i] = one + x2 * newR[i] + x3 * newR[i] * (newS[i - 1] + newS[i])
            newS[i - 1] = x1 + x2 * newS[i - 1] \
                + x3 * (newS[i - 1] * newS[i - 1] + newR[i - 1] + newR[i])
        if newR == R and newS == S:
            break
        R, S = newR, newS
    return ({i: R[i] for i in range(0, i_top + 1)},
            {i: S[i] for i in range(0, i_top + 1)})


def _tri_homogeneous(order):
    vars = ("x1", "x2", "x3")
    one = Series.constant(1, vars, order)
    x1 = Series.variable("x1", vars, order)
    x2 = Series.variable("x2", vars, order)
    x3 = Series.variable("x3", vars, order)
    R = Series.zero(vars, order)
    S = Series.zero(vars, order)
    for _ in range(order + 2):
        newR = one + x2 * R + x3 * R * S * 2
        newS = x1 + x2 * S + x3 * (S * S + R * 2)
        if newR == R and newS == S:
            break
        R, S = newR, newS
    return R, S


# -- conserved quantities ------------------------------------------------------------

def conserved_quantities(kind, order, i_range):
    """Evaluate the conserved expressions for each i and compare with the
    fixed-boundary series.  Returns {name: True/False}."""
    report = {}
    if kind == "quad0":
        top = max(i_range) + 3
        R = quad_baseline_r(order, top)
        vars = R[1].vars
        x4 = Series.variable("x4", vars, order)
        kern = solve_kernel(WeightSpec(0, order, (2, 4)))
        F2 = _drop_var(boundary_gf(2, kern), "z")
        F4 = _drop_var(boundary_gf(4, kern), "z")
        for i in i_range:
            got2 = R[i] - x4 * R[i - 1] * R[i] * R[i + 1]
            got4 = R[i] * (R[i] + R[i + 1]) \
                - (R[i] + R[i + 1] + R[i + 2]) * (x4 * R[i - 1] * R[i] * R[i + 1])
            report["F2@i=%d" % i] = (got2 == F2)
            report["F4@i=%d" % i] = (got4 == F4)
        return report
    if kind == "quad4":
        T = hierarchy(4, order, max(i_range) + 3)
        z = Series.variable("z", ("z",), order)
        one = Series.constant(1, ("z",), order)
        r = {i: one + z * T[i - 1] if i >= 1 else Series.zero(("z",), order)
             for i in range(0, max(i_range) + 3)}
        kern = solve_kernel(WeightSpec.pure(4, order))
        X4 = (kern.R - 1) * (kern.R ** 3).inverse()
        for i in i_range:
            got2 = r[i] - X4 * r[i - 1] * r[i] * r[i + 1]
            got4 = r[i] * (r[i] + r[i + 1]) \
                - (r[i] + r[i + 1] + r[i + 2]) * (X4 * r[i - 1] * r[i] * r[i + 1])
            report["f2@i=%d" % i] = (got2 == one)
            report["f4@i=%d" % i] = (got4 == one * 2 + z)
        return report
    if kind == "tri3":
        T = hierarchy(3, order, max(i_range) + 3)
        z = Series.variable("z", ("z",), order)
        one = Series.constant(1, ("z",), order)
        s = {i: z * T[i] for i in range(0, max(i_range) + 3)}
        r = {i: one + s[i - 1] * s[i] if i >= 1 else Series.zero(("z",), order)
             for i in range(0, max(i_range) + 3)}
        kern = solve_kernel(WeightSpec.pure(3, order))
        X3 = kern.S * (kern.R ** 2).inverse()
        for i in i_range:
            mark = X3 * r[i - 1] * r[i]
            got1 = s[i - 1] - mark
            got2 = s[i - 1] ** 2 + r[i] - (s[i - 1] + s[i]) * mark
            got3 = s[i - 1] ** 3 + r[i] * (s[i - 1] * 2 + s[i]) \
                - (s[i - 1] ** 2 + s[i - 1] * s[i] + s[i] ** 2 + r[i] + r[i + 1]) * mark
            report["f1@i=%d" % i] = got1.is_zero()
            report["f2@i=%d" % i] = (got2 == one)
            report["f3@i=%d" % i] = (got3 == z)
        return report
    raise IntegrableError("kind must be quad0, quad4 or tri3")


def _drop_var(series, name):
    return series.drop_variable(name) if name in series.vars else series
