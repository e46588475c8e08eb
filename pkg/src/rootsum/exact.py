"""Exact big-integer and rational arithmetic.

Integer m-th roots, Bernoulli numbers, Faulhaber power sums, and closed
forms for the floor sums

    A(n, m) = sum_{k=1..n} floor(k^(1/m))

evaluated with integer arithmetic only.  No floating point is used
anywhere in this module, so results are independent of the FP
environment and exact at any magnitude.
"""

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import ConsistencyError

__all__ = [
    "integer_nth_root",
    "BernoulliTable",
    "bernoulli",
    "faulhaber_sum",
    "FloorSumResult",
    "floor_sqrt_sum",
    "floor_root_sum",
    "floor_root_sum_special",
]


def integer_nth_root(n: int, m: int) -> int:
    """Largest r with r^m <= n, exact for arbitrary-size n.

    m = 2 uses math.isqrt (exact by contract).  Larger m uses Newton
    iteration on integers, seeded from the bit length for huge n and
    from a float root otherwise; a final correction loop enforces the
    bracketing postcondition r^m <= n < (r+1)^m unconditionally.
    """
    if m < 1:
        raise ValueError(f"root index must be >= 1, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if m == 1 or n < 2:
        return n
    if m == 2:
        return math.isqrt(n)
    if m >= n.bit_length():
        # 2^m > n >= 2, so the root is 1
        return 1
    if n.bit_length() <= 52:
        r = int(n ** (1.0 / m))
    else:
        # start above the true root and descend monotonically
        r = 1 << -(-n.bit_length() // m)
        while True:
            s = ((m - 1) * r + n // r ** (m - 1)) // m
            if s >= r:
                break
            r = s
    while r**m > n:
        r -= 1
    while (r + 1) ** m <= n:
        r += 1
    return r


class BernoulliTable:
    """Memoized Bernoulli numbers B_0, B_1, ... as exact Fractions.

    Convention B_1 = -1/2 (forced by requiring the Faulhaber closed form
    with its (-1)^k factor to reproduce sum k = n(n+1)/2).  Entries are
    generated by the recurrence sum_{j=0..n} C(n+1, j) B_j = 0 and are
    append-only: concurrent reads are safe, extension is serialized.
    """

    def __init__(self):
        self._values: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def get(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError(f"Bernoulli index must be >= 0, got {k}")
        if k >= len(self._values):
            self._extend(k)
        return self._values[k]

    def prefix(self, k: int) -> tuple[Fraction, ...]:
        """B_0 .. B_k as a tuple (used to test regeneration determinism)."""
        self.get(k)
        return tuple(self._values[: k + 1])

    def _extend(self, k: int) -> None:
        with self._lock:
            values = self._values
            while len(values) <= k:
                n = len(values)
                acc = sum(comb(n + 1, j) * values[j] for j in range(n))
                values.append(Fraction(-acc, n + 1))


_BERNOULLI = BernoulliTable()


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k with B_1 = -1/2."""
    return _BERNOULLI.get(k)


@lru_cache(maxsize=4096)
def faulhaber_sum(n: int, m: int) -> int:
    """sum_{k=1..n} k^m via the Bernoulli closed form.

    (1/(m+1)) * sum_{k=0..m} (-1)^k C(m+1, k) B_k n^(m+1-k).  The
    rational intermediate must cancel to an integer; a remainder means
    the Bernoulli convention or a transcription is wrong, and raises.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if m < 0:
        raise ValueError(f"exponent must be >= 0, got {m}")
    if n == 0:
        return 0
    acc = Fraction(0)
    for k in range(m + 1):
        b = bernoulli(k)
        if not b:
            continue
        term = comb(m + 1, k) * b * n ** (m + 1 - k)
        acc += -term if k & 1 else term
    acc /= m + 1
    if acc.denominator != 1:
        raise ConsistencyError(
            f"Faulhaber sum for n={n}, m={m} is not an integer: {acc}"
        )
    return int(acc)


@dataclass(frozen=True)
class FloorSumResult:
    """Closed-form value of sum_{k=1..n} floor(k^(1/m)).

    root is floor(n^(1/m)); total is the exact sum.
    """

    n: int
    m: int
    root: int
    total: int


def floor_sqrt_sum(n: int) -> FloorSumResult:
    """sum_{k=1..n} floor(sqrt(k)) = (1/6) M (6n + 5 - 3M - 2M^2), M = floor(sqrt(n)).

    Division by 6 is checked to be exact at runtime.  n = 0 returns the
    empty sum.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return FloorSumResult(0, 2, 0, 0)
    root = math.isqrt(n)
    t = root * (6 * n + 5 - 3 * root - 2 * root * root)
    if t % 6:
        raise ConsistencyError(f"floor_sqrt_sum({n}): {t} not divisible by 6")
    return FloorSumResult(n, 2, root, t // 6)


def floor_root_sum(n: int, m: int) -> FloorSumResult:
    """sum_{k=1..n} floor(k^(1/m)) for any m >= 2, via Faulhaber.

    With M = floor(n^(1/m)):

        total = M (n - M^m + 1) + M^(m+1) - sum_{k=1..M} k^m

    which follows from summing the constant-value runs between
    consecutive m-th powers and telescoping.  All integer arithmetic.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return FloorSumResult(0, m, 0, 0)
    root = integer_nth_root(n, m)
    total = root * (n - root**m + 1) + root ** (m + 1) - faulhaber_sum(root, m)
    return FloorSumResult(n, m, root, total)


def floor_root_sum_special(n: int, m: int) -> int:
    """The dedicated closed forms for m = 3, 4, 5 (cross-check path).

    Independent transcriptions of the printed polynomial forms; each
    division is checked exact.  Must always agree with floor_root_sum.
    """
    if m not in (3, 4, 5):
        raise ValueError(f"special closed forms exist for m in {{3,4,5}}, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0
    r = integer_nth_root(n, m)
    if m == 3:
        t, d = r * (4 * n + 4 - r - 2 * r**2 - r**3), 4
    elif m == 4:
        t, d = r * (30 * n + 31 - 6 * r**4 - 15 * r**3 - 10 * r**2), 30
    else:
        t, d = r * (12 * n + 12 - 2 * r**5 - 6 * r**4 - 5 * r**3 + r), 12
    if t % d:
        raise ConsistencyError(f"floor_root_sum_special({n}, {m}): {t} not divisible by {d}")
    return t // d
