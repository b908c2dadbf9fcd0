"""Moment / free-cumulant combinatorics.

Conversions between raw moments and free cumulants use the recursion

    m_n = sum_{s=1}^{n} kappa_s * sum_{i_1+...+i_s = n-s} m_{i_1}...m_{i_s}

with m_0 = 1, evaluated with whatever scalar type the input carries
(floats, complex, Fraction).  Noncrossing partitions and the Kreweras
complement are enumerated exactly at small order; they feed the
multiplicative moment formula

    m_n(ab) = sum_{pi in NC(n)} kappa_pi(a) * m_{Kr(pi)}(b)

which serves as an independent cross-check on analytic convolutions.
"""

from bisect import bisect_left
from functools import lru_cache
from itertools import combinations

_MAX_NC_ORDER = 12
_MAX_PRODUCT_ORDER = 8


def _ordered_products(moments, s, n):
    """sum over i_1+...+i_s = n of m_{i_1}...m_{i_s}, with m_0 = 1."""
    # table[j] = sum over compositions of j into the parts seen so far
    table = [1] + list(moments[:n])
    acc = table[: n + 1]
    for _ in range(s - 1):
        acc = [sum(acc[i] * table[j - i] for i in range(j + 1)) for j in range(n + 1)]
    return acc[n]


def moments_to_free_cumulants(moments):
    """Free cumulants kappa_1..kappa_K from raw moments m_1..m_K."""
    moments = list(moments)
    kappa = []
    for n in range(1, len(moments) + 1):
        rest = sum(
            kappa[s - 1] * _ordered_products(moments, s, n - s)
            for s in range(1, n)
        )
        kappa.append(moments[n - 1] - rest)
    return kappa


def free_cumulants_to_moments(cumulants):
    """Raw moments m_1..m_K from free cumulants kappa_1..kappa_K."""
    cumulants = list(cumulants)
    moments = []
    for n in range(1, len(cumulants) + 1):
        moments.append(sum(
            cumulants[s - 1] * _ordered_products(moments, s, n - s)
            for s in range(1, n + 1)
        ))
    return moments


def _intervals(lo, hi):
    """Noncrossing partitions of the integer interval [lo, hi]."""
    if lo > hi:
        return [()]
    out = []
    pool = range(lo + 1, hi + 1)
    for k in range(hi - lo + 1):
        for rest in combinations(pool, k):
            block = (lo,) + rest
            pieces = [[]]
            bounds = list(block) + [hi + 1]
            for i in range(len(block)):
                gap = _intervals(bounds[i] + 1, bounds[i + 1] - 1)
                pieces = [p + list(g) for p in pieces for g in gap]
            out.extend(tuple([block] + p) for p in pieces)
    return out


@lru_cache(maxsize=None)
def noncrossing_partitions(n):
    """All noncrossing partitions of {1..n} as tuples of sorted blocks."""
    if not 1 <= n <= _MAX_NC_ORDER:
        raise ValueError(f"noncrossing enumeration supports 1 <= n <= {_MAX_NC_ORDER}")
    parts = _intervals(1, n)
    return tuple(tuple(sorted(p, key=min)) for p in parts)


def _blocks_cross(b, c):
    """True if sorted blocks b and c cross on the line."""
    gaps = {bisect_left(b, x) for x in c}
    if len(gaps) == 1:
        return False
    return gaps != {0, len(b)}  # fully outside the span is nesting, not crossing


def _union_noncrossing(pi, sigma):
    """Noncrossing test for pi on odd slots interleaved with sigma on even."""
    odd = [tuple(2 * i - 1 for i in blk) for blk in pi]
    even = [tuple(2 * i for i in blk) for blk in sigma]
    return not any(_blocks_cross(b, c) for b in odd for c in even)


@lru_cache(maxsize=None)
def _kreweras_table(n):
    table = {}
    by_count = {}
    for sigma in noncrossing_partitions(n):
        by_count.setdefault(len(sigma), []).append(sigma)
    for pi in noncrossing_partitions(n):
        target = n + 1 - len(pi)
        matches = [s for s in by_count.get(target, ())
                   if _union_noncrossing(pi, s)]
        assert len(matches) == 1, "Kreweras complement must be unique"
        table[pi] = matches[0]
    return table


def kreweras_complement(pi, n):
    """Complement of pi in NC(n): the largest sigma with pi u sigma noncrossing."""
    pi = tuple(sorted((tuple(sorted(b)) for b in pi), key=min))
    return _kreweras_table(n)[pi]


def free_multiplicative_moments(moments_a, moments_b, order):
    """Moments of the free product ab from the moments of a and b.

    Exact combinatorial evaluation; quadratic blowup in the Catalan
    numbers caps the order at 8.
    """
    if not 1 <= order <= _MAX_PRODUCT_ORDER:
        raise ValueError(f"product moment formula supports 1 <= order <= {_MAX_PRODUCT_ORDER}")
    if len(moments_a) < order or len(moments_b) < order:
        raise ValueError("need at least `order` moments of each factor")
    kappa_a = moments_to_free_cumulants(list(moments_a)[:order])
    mb = list(moments_b)
    out = []
    for n in range(1, order + 1):
        table = _kreweras_table(n)
        total = 0
        for pi in noncrossing_partitions(n):
            term = 1
            for blk in pi:
                term *= kappa_a[len(blk) - 1]
            for blk in table[pi]:
                term *= mb[len(blk) - 1]
            total += term
        out.append(total)
    return out
