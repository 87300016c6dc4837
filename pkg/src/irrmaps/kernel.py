"""Coupled slice system for maps with a girth-type irreducibility constraint.

For a given parameter d, the column of slice generating functions V_k
(-1 <= k <= d) solves

    V_k = z [k = d-2]  +  sum_{m=1}^{k+1} V_m V_{k-m}  +  V_{k+2}

for -1 <= k <= d-2, closed off at the top by explicit lattice-path sums over
the face weights for k = d-1, d.  The solution is found as a fixed point,
degree by degree; R = 1 + V_0 and S = V_{-1}.  The bipartite specialization
solves the halved system in U_k = V_{2k}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .series import Series, xvar, assert_nonneg_integer_coeffs
from .paths import path_poly, q_inverse
from .tables import binomial, catalan, fact0


class KernelError(Exception):
    pass


@dataclass(frozen=True)
class WeightSpec:
    """Which faces carry weights, and how far series are expanded.

    ``face_degrees`` lists the degrees j > d whose faces carry a weight x_j;
    faces of degree d always carry the weight z.  ``order`` is the truncation
    order (total degree in z and the x_j).
    """

    d: int
    order: int
    face_degrees: tuple = ()
    bipartite: bool = False

    def __post_init__(self):
        if self.d < 0 or self.order < 0:
            raise KernelError("need d >= 0 and order >= 0")
        degs = tuple(sorted(self.face_degrees))
        object.__setattr__(self, "face_degrees", degs)
        if any(j <= self.d for j in degs):
            raise KernelError("face weights must have degree > d")
        if self.bipartite:
            if self.d % 2:
                raise KernelError("bipartite requires even d")
            if any(j % 2 for j in degs):
                raise KernelError("bipartite requires even face degrees")

    @staticmethod
    def pure(d, order):
        return WeightSpec(d, order, ())

    @staticmethod
    def up_to(d, max_degree, order, bipartite=False):
        if max_degree < d:
            raise KernelError("max face degree below d")
        step = 2 if bipartite else 1
        start = d + 2 if bipartite else d + 1
        degs = tuple(range(start, max_degree + 1, step))
        return WeightSpec(d, order, degs, bipartite)

    @property
    def variables(self):
        return ("z",) + tuple(xvar(j) for j in self.face_degrees)

    def zero(self):
        return Series.zero(self.variables, self.order)

    def z(self):
        return Series.variable("z", self.variables, self.order)

    def x(self, j):
        return Series.variable(xvar(j), self.variables, self.order)


@dataclass
class KernelState:
    """Solved slice column for one weight specification."""

    spec: WeightSpec
    V: dict = field(repr=False)

    @property
    def d(self):
        return self.spec.d

    @property
    def R(self):
        return 1 + self.V[0]

    @property
    def S(self):
        return self.V[-1]

    def U(self, k):
        """Bipartite view U_k = V_{2k}."""
        return self.V[2 * k]

    def slice_gf(self, k):
        """V_k for any k >= -1, via the stored column or the top formulas."""
        if k <= self.d:
            return self.V[k]
        return high_slice_gf(self.spec, self.R, self.S, k)

    def to_json_dict(self):
        return {
            "d": self.spec.d,
            "order": self.spec.order,
            "face_degrees": list(self.spec.face_degrees),
            "bipartite": self.spec.bipartite,
            "V": {str(k): v.to_json_dict() for k, v in sorted(self.V.items())},
        }

    @staticmethod
    def from_json_dict(data):
        spec = WeightSpec(data["d"], data["order"],
                          tuple(data["face_degrees"]), data["bipartite"])
        V = {int(k): Series.from_json_dict(v) for k, v in data["V"].items()}
        return KernelState(spec, V)


def high_slice_gf(spec, R, S, k):
    """Slice generating function for k >= d-1 as a weighted path sum."""
    if k < spec.d - 1:
        raise KernelError("formula only valid for k >= d-1")
    total = spec.zero()
    for j in spec.face_degrees:
        if j >= k + 2:
            total = total + spec.x(j) * path_poly(j - 1, -k - 1, R, S)
    return total


def solve_kernel(spec):
    """Fixed point of the coupled slice system, exact to the truncation order.

    Sweeps update the two explicit top rows first, then descend k = d-2 .. -1;
    iteration stops when a sweep leaves the state unchanged.
    """
    d, zero = spec.d, spec.zero()
    V = {k: zero for k in range(-1, d + 1)}
    z = spec.z()
    for _ in range(spec.order + d + 5):
        R, S = 1 + V[0], V[-1]
        new = dict(V)
        new[d] = high_slice_gf(spec, R, S, d)
        new[d - 1] = high_slice_gf(spec, R, S, d - 1)
        for k in range(d - 2, -2, -1):
            acc = zero
            if k == d - 2:
                acc = acc + z
            for m in range(1, k + 2):
                acc = acc + new[m] * new[k - m]
            new[k] = acc + new[k + 2]
        if new == V:
            return _finish(spec, V)
        V = new
    raise KernelError("slice system did not stabilize; this is a bug")


def solve_kernel_bipartite(spec):
    """Solve the halved system for even d; agrees with solve_kernel."""
    if not spec.bipartite:
        raise KernelError("spec is not bipartite")
    b = spec.d // 2
    zero = spec.zero()
    z = spec.z()
    U = {k: zero for k in range(0, b + 1)}
    for _ in range(spec.order + b + 5):
        R = 1 + U[0]
        new = dict(U)
        new[b] = _bipartite_top(spec, R, b)
        for k in range(b - 1, -1, -1):
            acc = zero
            if k == b - 1:
                acc = acc + z
            for m in range(1, k + 1):
                acc = acc + new[m] * new[k - m]
            new[k] = acc + new[k + 1]
        if new == U:
            V = {2 * k: u for k, u in U.items()}
            for k in range(-1, spec.d + 1, 1):
                if k % 2 or k == -1:
                    V[k] = zero
            return _finish(spec, V)
        U = new
    raise KernelError("bipartite slice system did not stabilize; this is a bug")


def _bipartite_top(spec, R, b):
    total = spec.zero()
    for deg in spec.face_degrees:
        j = deg // 2
        if j >= b + 1:
            total = total + spec.x(deg) * (R ** (j + b)) * binomial(2 * j - 1, j + b)
    return total


def _finish(spec, V):
    state = KernelState(spec, V)
    if state.R.constant_term() != 1:
        raise KernelError("R must have constant term 1")
    for k, v in V.items():
        if v.constant_term() != 0:
            raise KernelError("V_%d has a nonzero constant term" % k)
        assert_nonneg_integer_coeffs(v, "in V_%d" % k)
    if spec.bipartite and not state.S.is_zero():
        raise KernelError("bipartite kernel must have S = 0")
    return state


# -- triangular elimination ----------------------------------------------------

GENERAL_SEED_VARS = ("v0", "vm")   # seeds with indices 0 and -1
BIPARTITE_SEED_VAR = ("u0",)


@dataclass(frozen=True)
class TildePolynomial:
    index: int
    bipartite: bool
    poly: Series


def eliminate_tilde(k, bipartite=False, order=None):
    """Express the k-th column entry in the two bottom seeds by the
    triangular recursion (single seed in the bipartite case)."""
    if k < 1:
        raise KernelError("elimination starts at index 1")
    if order is None:
        order = k + 2
    if bipartite:
        u0 = Series.variable("u0", BIPARTITE_SEED_VAR, order)
        col = {0: u0}
        for i in range(0, k):
            # row i: col[i] = sum_{m=1}^{i} col[m] col[i-m] + col[i+1]
            acc = u0.zero_like()
            for m in range(1, i + 1):
                acc = acc + col[m] * col[i - m]
            col[i + 1] = col[i] - acc
        return TildePolynomial(k, True, col[k])
    v0 = Series.variable("v0", GENERAL_SEED_VARS, order)
    vm = Series.variable("vm", GENERAL_SEED_VARS, order)
    col = {-1: vm, 0: v0}
    for i in range(-1, k - 1):
        # row i: col[i] = sum_{m=1}^{i+1} col[m] col[i-m] + col[i+2]
        acc = v0.zero_like()
        for m in range(1, i + 2):
            acc = acc + col[m] * col[i - m]
        col[i + 2] = col[i] - acc
    return TildePolynomial(k, False, col[k])


def tilde_lagrange_bipartite(k, order=None):
    """Closed form of the bipartite elimination polynomial."""
    if order is None:
        order = k + 2
    u0 = Series.variable("u0", BIPARTITE_SEED_VAR, order)
    total = u0.zero_like()
    for p in range(1, k + 1):
        c = Fraction(binomial(k, p) * binomial(k, p - 1), k)
        total = total + ((-u0) ** p) * c
    return -total


def tilde_conjecture_general(k, order=None):
    """Conjectured closed form of the general elimination polynomial.

    Verified empirically against the recursion; a mismatch means the
    conjecture is violated, not that the solver is wrong.
    """
    if order is None:
        order = k + 2
    v0 = Series.variable("v0", GENERAL_SEED_VARS, order)
    vm = Series.variable("vm", GENERAL_SEED_VARS, order)
    total = v0.zero_like()
    if k % 2:  # index 2j-1
        j = (k + 1) // 2
        for m in range(0, j):
            for kk in range(0, j - m):
                c = Fraction(binomial(j + m - 1, kk + 2 * m)
                             * binomial(j + m, kk + 2 * m)
                             * binomial(kk + 2 * m, 2 * m), 2 * m + 1)
                total = total + ((-vm) ** (2 * m + 1)) * ((-v0) ** kk) * c
    else:      # index 2j
        j = k // 2
        for m in range(0, j + 1):
            for kk in range(0, j - m + 1):
                if kk + m < 1:
                    continue
                if m == 0:
                    c = Fraction(binomial(j - 1, kk - 1) * binomial(j, kk - 1), kk)
                else:
                    c = Fraction(binomial(j + m - 1, kk + 2 * m - 1)
                                 * binomial(j + m, kk + 2 * m - 1)
                                 * binomial(kk + 2 * m - 1, 2 * m - 1), 2 * m)
                total = total + ((-vm) ** (2 * m)) * ((-v0) ** kk) * c
    return -total


# -- closed algebraic equations -------------------------------------------------

def general_closed_residuals(kernel):
    """Residuals of the two closed equations that pin down R and S.

    Both series must vanish identically on a correctly solved kernel.
    The first equation only exists for d >= 2.
    """
    spec, d = kernel.spec, kernel.d
    R, S = kernel.R, kernel.S
    out = {}
    if d >= 2:
        eq1 = spec.zero()
        for j in range(0, (d - 1) // 2 + 1):
            eq1 = eq1 + q_inverse(d - 1, 2 * j, R, S) * catalan(j)
        for j in spec.face_degrees:
            if j >= d + 1:
                eq1 = eq1 + spec.x(j) * path_poly(j - 1, -d, R, S)
        out["closed-eq-low"] = eq1
    if d >= 1:
        eq2 = spec.z()
        for j in range(0, d // 2 + 1):
            eq2 = eq2 + q_inverse(d, 2 * j, R, S) * catalan(j)
        for j in spec.face_degrees:
            if j >= d + 2:
                eq2 = eq2 + spec.x(j) * path_poly(j - 1, -d - 1, R, S)
        out["closed-eq-high"] = eq2
    return out


def bipartite_closed_residuals(kernel):
    """Residuals of the two equivalent single equations for R (even d)."""
    spec = kernel.spec
    b = kernel.d // 2
    if kernel.d % 2 or b < 1:
        raise KernelError("bipartite closed equations need even d >= 2")
    R = kernel.R
    tail = spec.z()
    for deg in spec.face_degrees:
        j = deg // 2
        if j >= b + 1:
            tail = tail + spec.x(deg) * (R ** (b + j)) * binomial(2 * j - 1, j + b)
    eq_binom = tail
    for l in range(0, b + 1):
        c = binomial(b + l, 2 * l) * catalan(l)
        term = (R ** (b - l)) * c
        eq_binom = eq_binom + (term if (b - l) % 2 == 0 else -term)
    eq_lagrange = tail
    one = spec.zero() + 1
    for p in range(1, b + 1):
        c = Fraction(binomial(b, p) * binomial(b, p - 1), b)
        eq_lagrange = eq_lagrange + ((one - R) ** p) * c
    return {"closed-eq-binomial": eq_binom, "closed-eq-lagrange": eq_lagrange}


def verify_algebraic(kernel):
    """Substitute the solved kernel into every applicable closed equation.

    Returns a report mapping check names to None (pass) or the first
    offending monomial with its value.
    """
    report = {}
    residuals = {}
    if kernel.d >= 1:
        residuals.update(general_closed_residuals(kernel))
    if kernel.spec.bipartite and kernel.d >= 2:
        residuals.update(bipartite_closed_residuals(kernel))
    for name, series in residuals.items():
        if series.is_zero():
            report[name] = None
        else:
            exp = min(series.terms, key=lambda e: (sum(e), e))
            report[name] = (exp, series.terms[exp])
    return report


def lagrange_r_coeff(powers):
    """Explicit coefficient of prod x_{2j}^{n_j} in the d = 0 bipartite R.

    ``powers`` maps j to n_j (faces of degree 2j).
    """
    total = sum(j * n for j, n in powers.items())
    shifted = 1 + sum((j - 1) * n for j, n in powers.items())
    value = Fraction(fact0(total), fact0(shifted))
    for j, n in powers.items():
        value *= Fraction(binomial(2 * j - 1, j) ** n, fact0(n))
    assert value.denominator == 1
    return int(value)
