"""Three-step lattice path polynomials.

Paths take up-steps (+1), down-steps (-1) and level-steps (0).  A down-step
carries a weight r and a level-step a weight s; in the height-refined variant
the weights depend on the height at which the step occurs.  The closed-form
polynomials evaluate exactly on any ring elements (Fractions or Series).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .series import Series, align


class PathError(Exception):
    pass


def _powers(x, n):
    """[x^0 .. x^n] with x a Fraction or Series."""
    out = [1 if isinstance(x, (int, Fraction)) else x.one_like()]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def path_poly(n, k, r, s, nonneg=False):
    """Generating polynomial of three-step paths from (0,0) to (n,k).

    With ``nonneg`` the paths must stay at height >= 0 (then k >= 0 is
    required).  Down-steps are weighted ``r``, level-steps ``s``.  For k <= 0
    the unconstrained polynomial satisfies P_k = r^(-k) P_(-k).
    """
    if n < 0:
        raise PathError("negative length")
    if nonneg and k < 0:
        raise PathError("nonnegative paths cannot end below 0")
    terms = []
    j = max(0, -k)
    while n - 2 * j - k >= 0:
        down, level = j, n - 2 * j - k
        if nonneg:
            c = Fraction((k + 1) * factorial(n),
                         factorial(j) * factorial(j + k + 1) * factorial(level))
        else:
            c = Fraction(factorial(n),
                         factorial(j) * factorial(j + k) * factorial(level))
        assert c.denominator == 1
        terms.append((j, level, int(c)))
        j += 1
    return _eval_rs(terms, r, s)


def q_inverse(n, k, r, s):
    """Row (n,k) of the inverse of the nonnegative-path unitriangular matrix."""
    if not 0 <= k <= n:
        raise PathError("need 0 <= k <= n")
    rp = _powers(r, (n - k) // 2)
    sp = _powers(s, n - k)
    total = None
    for j in range(0, (n - k) // 2 + 1):
        level = n - 2 * j - k
        c = Fraction(factorial(n - j),
                     factorial(k) * factorial(j) * factorial(level))
        assert c.denominator == 1
        sign = -1 if (j + level) % 2 else 1
        term = rp[j] * sp[level] * (sign * int(c))
        total = term if total is None else total + term
    return total


def _eval_rs(terms, r, s):
    if not terms:
        if isinstance(r, Series):
            return r.zero_like()
        if isinstance(s, Series):
            return s.zero_like()
        return Fraction(0)
    if isinstance(r, Series) and isinstance(s, Series):
        r, s = align(r, s)
    max_j = max(j for j, _, _ in terms)
    max_l = max(l for _, l, _ in terms)
    rp = _powers(r, max_j)
    sp = _powers(s, max_l)
    total = None
    for j, level, c in terms:
        term = rp[j] * sp[level] * c
        total = term if total is None else total + term
    return total


def path_oracle(n, k, r, s, nonneg=False):
    """Brute-force sum over all 3^n step words; used only as a test oracle."""
    if n > 14:
        raise PathError("oracle capped at n <= 14")
    if isinstance(r, Series) and isinstance(s, Series):
        r, s = align(r, s)
        one = r.one_like()
    else:
        one = Fraction(1)
    total = None

    def rec(pos, height, weight):
        nonlocal total
        if pos == n:
            if height == k:
                total = weight if total is None else total + weight
            return
        # prune: cannot reach k any more
        if abs(k - height) > n - pos:
            return
        rec(pos + 1, height + 1, weight)
        if not nonneg or height >= 1:
            rec(pos + 1, height - 1, weight * r)
        rec(pos + 1, height, weight * s)

    rec(0, 0, one)
    if total is None:
        total = one * 0
    return total


def z_weighted(n, p, p_end, down_weights, level_weights, nonneg=False, one=None):
    """Height-weighted path polynomial by dynamic programming.

    Paths of length ``n`` from height ``p`` to ``p_end``; a down-step from
    height m+1 to m is weighted ``down_weights[m+1]`` and a level-step at
    height m is weighted ``level_weights[m]``.  Heights are implicitly
    nonnegative: the down-step weight at height 0 is pinned to zero, so paths
    dipping below 0 do not contribute.  With ``nonneg`` the floor is raised to
    the start height ``p``.

    The weight tables are mappings from heights to ring elements; a missing
    weight at a reachable height is an error.  ``one`` is the ring unit and is
    inferred from the weights when omitted.
    """
    if n < 0 or p < 0 or p_end < 0:
        raise PathError("invalid path parameters")
    floor = p if nonneg else 0
    if one is None:
        sample = next(iter(level_weights.values()), None)
        if sample is None:
            sample = next(iter(down_weights.values()), None)
        one = sample.one_like() if isinstance(sample, Series) else Fraction(1)
    zero = one * 0

    def down(m):
        if m == 0:
            return zero
        try:
            return down_weights[m]
        except KeyError:
            raise PathError("missing down-step weight at height %d" % m)

    def level(m):
        try:
            return level_weights[m]
        except KeyError:
            raise PathError("missing level-step weight at height %d" % m)

    # state[h] = weighted sum over path prefixes ending at height h
    state = {p: one}
    for _ in range(n):
        nxt = {}
        for h, w in state.items():
            nxt[h + 1] = nxt.get(h + 1, zero) + w
            if h - 1 >= floor:
                nxt[h - 1] = nxt.get(h - 1, zero) + w * down(h)
            nxt[h] = nxt.get(h, zero) + w * level(h)
        state = nxt
    return state.get(p_end, zero)
