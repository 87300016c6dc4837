"""Truncated multivariate formal power series over exact rationals.

A series lives in Q[[vars]] truncated at a fixed total degree.  Variables are
named strings; the canonical ordering puts ``z`` first, then face weights
``x4``, ``x5``, ... by index, then any other symbols alphabetically.  All
coefficients are ``fractions.Fraction`` and no zero coefficient is ever
stored.  Arithmetic never widens the truncation order: the result of a binary
operation carries the minimum of the operand orders.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product


class SeriesError(Exception):
    pass


class VariableMismatch(SeriesError):
    """Binary arithmetic on series with different variable sets."""


class OrderExceeded(SeriesError):
    """A coefficient beyond the truncation order was requested."""


def var_sort_key(name):
    if name == "z":
        return (0, 0, "")
    if name.startswith("x") and name[1:].isdigit():
        return (1, int(name[1:]), "")
    return (2, 0, name)


def xvar(j):
    """Name of the weight variable attached to faces of degree ``j``."""
    return "x%d" % j


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError("expected int or Fraction, got %r" % (c,))


class Series:
    """One truncated series: variable tuple, order bound, sparse term dict."""

    __slots__ = ("vars", "order", "terms")

    def __init__(self, vars, order, terms, _clean=True):
        self.vars = tuple(vars)
        if list(self.vars) != sorted(self.vars, key=var_sort_key):
            raise SeriesError("variables not in canonical order: %r" % (self.vars,))
        self.order = order
        if _clean:
            terms = {e: _as_fraction(c) for e, c in terms.items()
                     if sum(e) <= order and c != 0}
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(vars, order):
        return Series(vars, order, {}, _clean=False)

    @staticmethod
    def constant(c, vars, order):
        c = _as_fraction(c)
        zero_exp = (0,) * len(vars)
        return Series(vars, order, {zero_exp: c} if c else {})

    @staticmethod
    def variable(name, vars, order):
        vars = tuple(vars)
        if name not in vars:
            raise SeriesError("%s not among %r" % (name, vars))
        exp = tuple(1 if v == name else 0 for v in vars)
        return Series(vars, order, {exp: Fraction(1)})

    def one_like(self):
        return Series.constant(1, self.vars, self.order)

    def zero_like(self):
        return Series.zero(self.vars, self.order)

    # -- bookkeeping -------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def coeff(self, exp):
        """Exact coefficient of the given exponent vector.

        Raises :class:`OrderExceeded` when the monomial lies beyond the
        truncation order, since an absent coefficient there is unknown
        rather than zero.
        """
        exp = tuple(exp)
        if len(exp) != len(self.vars):
            raise SeriesError("exponent length %d != %d variables"
                              % (len(exp), len(self.vars)))
        if sum(exp) > self.order:
            raise OrderExceeded("monomial %r exceeds truncation order %d"
                                % (exp, self.order))
        return self.terms.get(exp, Fraction(0))

    def coeff_of(self, **powers):
        exp = tuple(powers.get(v, 0) for v in self.vars)
        leftovers = set(powers) - set(self.vars)
        if leftovers:
            raise SeriesError("unknown variables %r" % (leftovers,))
        return self.coeff(exp)

    def truncate(self, order):
        if order >= self.order:
            return self
        return Series(self.vars, order,
                      {e: c for e, c in self.terms.items() if sum(e) <= order},
                      _clean=False)

    def embed(self, vars):
        """Reinterpret in a larger variable set (superset, canonical order)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        if not set(self.vars) <= set(vars):
            raise SeriesError("cannot embed %r into %r" % (self.vars, vars))
        pos = [vars.index(v) for v in self.vars]
        n = len(vars)
        terms = {}
        for e, c in self.terms.items():
            new = [0] * n
            for p, ei in zip(pos, e):
                new[p] = ei
            terms[tuple(new)] = c
        return Series(vars, self.order, terms, _clean=False)

    def drop_variable(self, name):
        """Remove a variable the series does not actually use."""
        i = self.vars.index(name)
        for e in self.terms:
            if e[i]:
                raise SeriesError("series still involves %s" % name)
        vars = self.vars[:i] + self.vars[i + 1:]
        terms = {e[:i] + e[i + 1:]: c for e, c in self.terms.items()}
        return Series(vars, self.order, terms, _clean=False)

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Series):
            if other.vars != self.vars:
                raise VariableMismatch("%r vs %r" % (self.vars, other.vars))
            return other
        return Series.constant(other, self.vars, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        terms = dict(self.terms) if self.order == order else \
            {e: c for e, c in self.terms.items() if sum(e) <= order}
        for e, c in other.terms.items():
            if sum(e) > order:
                continue
            s = terms.get(e, Fraction(0)) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Series(self.vars, order, terms, _clean=False)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.vars, self.order,
                      {e: -c for e, c in self.terms.items()}, _clean=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return self.zero_like()
            return Series(self.vars, self.order,
                          {e: c * v for e, v in self.terms.items()}, _clean=False)
        other = self._coerce(other)
        order = min(self.order, other.order)
        terms = {}
        bi = [(sum(e), e, c) for e, c in other.terms.items()]
        for ea, ca in self.terms.items():
            da = sum(ea)
            if da > order:
                continue
            for db, eb, cb in bi:
                if da + db > order:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                s = terms.get(e)
                terms[e] = ca * cb if s is None else s + ca * cb
        return Series(self.vars, order,
                      {e: c for e, c in terms.items() if c}, _clean=False)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise SeriesError("negative power; use inverse() explicitly")
        result = self.one_like()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.vars, self.order)
        if not isinstance(other, Series):
            return NotImplemented
        return (self.vars == other.vars and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, self.order, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------

    def derivative(self, name):
        """Formal partial derivative; result order drops by one."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            new = e[:i] + (e[i] - 1,) + e[i + 1:]
            terms[new] = c * e[i]
        return Series(self.vars, self.order - 1, terms, _clean=False)

    def inverse(self):
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term()
        if c0 == 0:
            raise SeriesError("inverse of a series with zero constant term")
        # self = c0 (1 + u) with u of positive valuation
        u = (self - c0) * Fraction(1, c0)
        result = self.one_like()
        power = self.one_like()
        for _ in range(self.order):
            power = power * (-u)
            if power.is_zero():
                break
            result = result + power
        return result * Fraction(1, c0)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            return self * Fraction(c.denominator, c.numerator)
        return self * self._coerce(other).inverse()

    # -- composition ---------------------------------------------------------

    def substitute(self, name, g):
        """Replace variable ``name`` by the series ``g`` (zero constant term).

        The result lives in the union of the remaining variables and the
        variables of ``g``, truncated at the common order.
        """
        if isinstance(g, (int, Fraction)):
            if _as_fraction(g) != 0:
                raise SeriesError("substitution value must have zero constant term")
            g = Series.zero((), self.order)
        if g.constant_term() != 0:
            raise SeriesError("substitution value must have zero constant term")
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        allvars = tuple(sorted(set(rest) | set(g.vars), key=var_sort_key))
        order = min(self.order, g.order)
        g = g.embed(allvars).truncate(order)
        # split self by the power of the substituted variable
        by_power = {}
        for e, c in self.terms.items():
            p = e[i]
            rest_exp = e[:i] + e[i + 1:]
            by_power.setdefault(p, {})[rest_exp] = c
        result = Series.zero(allvars, order)
        gpow = Series.constant(1, allvars, order)
        pos = [allvars.index(v) for v in rest]
        for p in range(0, max(by_power) + 1 if by_power else 0):
            if p > 0:
                gpow = gpow * g
                if gpow.is_zero() and p not in by_power:
                    # all higher powers vanish as well
                    if all(q < p for q in by_power):
                        break
            part = by_power.get(p)
            if not part:
                continue
            terms = {}
            for re, c in part.items():
                new = [0] * len(allvars)
                for q, ei in zip(pos, re):
                    new[q] = ei
                terms[tuple(new)] = c
            result = result + Series(allvars, order, terms) * gpow
        return result

    def substitute_many(self, mapping):
        """Simultaneously replace several variables by series."""
        mapping = {k: v for k, v in mapping.items()}
        for k in mapping:
            if k not in self.vars:
                raise SeriesError("unknown variable %s" % k)
        rest = tuple(v for v in self.vars if v not in mapping)
        allvars = set(rest)
        order = self.order
        for g in mapping.values():
            if isinstance(g, Series):
                allvars |= set(g.vars)
                order = min(order, g.order)
        allvars = tuple(sorted(allvars, key=var_sort_key))
        reps = {}
        for k, g in mapping.items():
            if isinstance(g, (int, Fraction)):
                g = Series.constant(g, allvars, order)
            if g.constant_term() != 0:
                raise SeriesError("substitution value must have zero constant term")
            reps[k] = g.embed(allvars).truncate(order)
        pos = {v: allvars.index(v) for v in rest}
        pow_cache = {k: [Series.constant(1, allvars, order)] for k in reps}

        def power(k, p):
            cache = pow_cache[k]
            while len(cache) <= p:
                cache.append(cache[-1] * reps[k])
            return cache[p]

        result = Series.zero(allvars, order)
        for e, c in self.terms.items():
            mono = [0] * len(allvars)
            term = None
            dead = False
            for v, ei in zip(self.vars, e):
                if ei == 0:
                    continue
                if v in reps:
                    f = power(v, ei)
                    if f.is_zero():
                        dead = True
                        break
                    term = f if term is None else term * f
                else:
                    mono[pos[v]] = ei
            if dead:
                continue
            base = Series(allvars, order, {tuple(mono): c})
            result = result + (base if term is None else base * term)
        return result

    def revert(self, name):
        """Compositional inverse in one variable.

        ``self`` must have zero constant term in ``name`` direction overall
        (no term free of ``name``) and an invertible linear coefficient.
        Returns ``h`` with ``self(h) = name`` to the truncation order.
        """
        i = self.vars.index(name)
        by_power = {}
        for e, c in self.terms.items():
            p = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            d = by_power.setdefault(p, {})
            d[rest] = d.get(rest, Fraction(0)) + c
        if 0 in by_power and any(c for c in by_power[0].values()):
            raise SeriesError("series has terms free of %s; remove them first" % name)
        a1 = Series(self.vars, self.order, by_power.get(1, {}))
        if a1.constant_term() == 0:
            raise SeriesError("linear coefficient in %s is not invertible" % name)
        a1_inv = a1.inverse()
        var = Series.variable(name, self.vars, self.order)
        higher = [(p, Series(self.vars, self.order, d))
                  for p, d in sorted(by_power.items()) if p >= 2]
        h = var * a1_inv
        for _ in range(self.order):
            acc = self.zero_like()
            for p, ap in higher:
                hp = h ** p
                if hp.is_zero():
                    continue
                acc = acc + ap * hp
            new = (var - acc) * a1_inv
            if new == h:
                break
            h = new
        return h

    # -- serialization --------------------------------------------------------

    def to_json_dict(self):
        items = sorted(self.terms.items())
        return {
            "vars": list(self.vars),
            "order": self.order,
            "terms": [{"exp": list(e),
                       "num": str(c.numerator),
                       "den": str(c.denominator)} for e, c in items],
        }

    @staticmethod
    def from_json_dict(d):
        terms = {tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"]))
                 for t in d["terms"]}
        return Series(tuple(d["vars"]), d["order"], terms)

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def loads(s):
        return Series.from_json_dict(json.loads(s))

    # -- display ---------------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "<0 + O(%d)>" % (self.order + 1)
        bits = []
        for e, c in sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0])):
            mono = "*".join("%s^%d" % (v, p) if p > 1 else v
                            for v, p in zip(self.vars, e) if p)
            if mono:
                bits.append("%s*%s" % (c, mono) if c != 1 else mono)
            else:
                bits.append(str(c))
        return "<" + " + ".join(bits) + " + O(%d)>" % (self.order + 1)


def merge_vars(*var_tuples):
    s = set()
    for t in var_tuples:
        s |= set(t)
    return tuple(sorted(s, key=var_sort_key))


def align(*series):
    """Embed several series into their common variable set and order."""
    vars = merge_vars(*(s.vars for s in series))
    order = min(s.order for s in series)
    return tuple(s.embed(vars).truncate(order) for s in series)


def assert_nonneg_integer_coeffs(s, context=""):
    """Combinatorial output series must count something."""
    for e, c in s.terms.items():
        if c.denominator != 1 or c < 0:
            raise SeriesError("non-combinatorial coefficient %s at %r %s"
                              % (c, e, context))
    return s
