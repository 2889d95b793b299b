"""Growth bounds with saturating evaluation.

Bounds map lengths to required branching widths.  Evaluation is exact
integer arithmetic saturating at a configurable cap; once a value passes
the cap it becomes the sticky marker HUGE, which compares above every
integer.  All rules clamp below at 2, so every bound takes values in
[2, infinity) as the calculus expects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

DEFAULT_CAP = 2**63 - 1


class _Huge:
    _instance = None

    def __new__(cls) -> "_Huge":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HUGE"


HUGE = _Huge()
SatInt = Union[int, _Huge]


def is_huge(x: SatInt) -> bool:
    return isinstance(x, _Huge)


def sat_leq(a: SatInt, b: SatInt) -> bool:
    """a <= b with HUGE as the top element (HUGE <= HUGE holds)."""
    if is_huge(a):
        return is_huge(b)
    if is_huge(b):
        return True
    return a <= b


def sat_geq(a: SatInt, b: SatInt) -> bool:
    return sat_leq(b, a)


def sat_min(a: SatInt, b: SatInt) -> SatInt:
    return a if sat_leq(a, b) else b


def sat_max(a: SatInt, b: SatInt) -> SatInt:
    return b if sat_leq(a, b) else a


def _clamp(x: int, cap: int) -> SatInt:
    return HUGE if x > cap else x


@dataclass(frozen=True)
class Bound:
    """Base class; subclasses define _raw on plain ints."""

    def eval(self, n: SatInt) -> SatInt:
        # Saturation is sticky: a huge argument yields a huge value.
        if is_huge(n):
            return HUGE
        raw = self._raw(n)
        if is_huge(raw):
            return HUGE
        return _clamp(max(2, raw), self.cap)

    def _raw(self, n: int) -> SatInt:
        raise NotImplementedError

    @property
    def cap(self) -> int:
        return getattr(self, "_cap", DEFAULT_CAP)


@dataclass(frozen=True)
class Const(Bound):
    c: int
    _cap: int = DEFAULT_CAP

    def _raw(self, n: int) -> SatInt:
        return self.c


@dataclass(frozen=True)
class Pow2(Bound):
    _cap: int = DEFAULT_CAP

    def _raw(self, n: int) -> SatInt:
        if n > 256 and 2**256 > self.cap:
            return HUGE
        return 2**n


@dataclass(frozen=True)
class Linear(Bound):
    a: int
    b: int
    _cap: int = DEFAULT_CAP

    def _raw(self, n: int) -> SatInt:
        return self.a * n + self.b


@dataclass(frozen=True)
class Iterate(Bound):
    base: Bound
    k: int
    _cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("iteration depth must be >= 1")

    def eval(self, n: SatInt) -> SatInt:
        return eval_iterate(self.base, self.k, n)

    def _raw(self, n: int) -> SatInt:
        return self.eval(n)


@dataclass(frozen=True)
class DiagIterate(Bound):
    """n maps to base iterated max(n, 1) times at n."""

    base: Bound
    _cap: int = DEFAULT_CAP

    def eval(self, n: SatInt) -> SatInt:
        if is_huge(n):
            return HUGE
        return eval_iterate(self.base, max(n, 1), n)

    def _raw(self, n: int) -> SatInt:
        return self.eval(n)


@dataclass(frozen=True)
class PiecewiseIterate(Bound):
    """base iterated k times on the k-th threshold interval.

    thresholds = (a_1, a_2, ...) with an implicit a_0 = -1; the value at n
    is base iterated k times, for the least k with n <= a_k.  Thresholds
    must be nondecreasing under the saturating order.  Evaluation past the
    last threshold raises: the rule is a truncation and says so.
    """

    base: Bound
    thresholds: tuple[SatInt, ...]
    _cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if not self.thresholds:
            raise ValueError("need at least one threshold")
        prev: SatInt = -1
        for t in self.thresholds:
            if not sat_leq(prev, t):
                raise ValueError("thresholds must be nondecreasing")
            prev = t

    def eval(self, n: SatInt) -> SatInt:
        if is_huge(n):
            return HUGE
        for k, a_k in enumerate(self.thresholds, start=1):
            if sat_leq(n, a_k):
                return eval_iterate(self.base, k, n)
        raise ValueError("piecewise rule truncated below n=%r" % (n,))

    def _raw(self, n: int) -> SatInt:
        return self.eval(n)


@dataclass(frozen=True)
class FiniteTable(Bound):
    values: tuple[int, ...]
    tail: Bound
    _cap: int = DEFAULT_CAP

    def _raw(self, n: int) -> SatInt:
        if n < len(self.values):
            return self.values[n]
        return self.tail.eval(n)


@dataclass(frozen=True)
class SumBound(Bound):
    parts: tuple[Bound, ...]
    _cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("sum needs at least two parts")

    def _raw(self, n: int) -> SatInt:
        total = 0
        for p in self.parts:
            v = p.eval(n)
            if is_huge(v):
                return HUGE
            total += v
        return total


@dataclass(frozen=True)
class Scaled(Bound):
    factor: int
    base: Bound
    _cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if self.factor < 1:
            raise ValueError("scale factor must be >= 1")

    def _raw(self, n: int) -> SatInt:
        v = self.base.eval(n)
        if is_huge(v):
            return HUGE
        return self.factor * v


def bound_sum(*parts: Bound) -> Bound:
    return SumBound(tuple(parts))


def scaled(factor: int, base: Bound) -> Bound:
    if factor == 1:
        return base
    if isinstance(base, Scaled):
        return Scaled(factor * base.factor, base.base)
    return Scaled(factor, base)


def eval_iterate(f: Bound, k: int, n: SatInt) -> SatInt:
    """f iterated k times at n; k = 0 is the identity."""
    if k < 0:
        raise ValueError("iteration depth must be >= 0")
    x = n
    for _ in range(k):
        x = f.eval(x)
        if is_huge(x):
            return HUGE
    return x


# === witness sequences ===


@dataclass(frozen=True)
class Seq:
    """Base class for integer threshold sequences indexed from 1."""

    def eval(self, k: int) -> SatInt:
        raise NotImplementedError


@dataclass(frozen=True)
class AffineSeq(Seq):
    a: int
    b: int = 0

    def eval(self, k: int) -> SatInt:
        if k < 1:
            raise ValueError("sequences are indexed from 1")
        return self.a * k + self.b


@dataclass(frozen=True)
class TableSeq(Seq):
    """Listed values for k = 1..len, holding the last value afterwards."""

    values: tuple[SatInt, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("table sequence needs values")

    def eval(self, k: int) -> SatInt:
        if k < 1:
            raise ValueError("sequences are indexed from 1")
        if k <= len(self.values):
            return self.values[k - 1]
        return self.values[-1]


@dataclass(frozen=True)
class SquaredIndexSeq(Seq):
    """k maps to base evaluated at k*k."""

    base: Seq

    def eval(self, k: int) -> SatInt:
        if k < 1:
            raise ValueError("sequences are indexed from 1")
        return self.base.eval(k * k)


# === verification ===


@dataclass(frozen=True)
class GGReport:
    """Outcome of a horizon-bounded iterate-domination check."""

    passed: bool
    levels: int
    horizon: int
    failure: tuple[int, int] | None = None
    saturated_comparisons: int = 0

    def __bool__(self) -> bool:
        return self.passed


def gg_verify(h: Bound, g: Bound, w: Seq, levels: int, horizon: int) -> GGReport:
    """Check that h(n) >= g iterated k times at n, for every k <= levels
    and every n with w(k) < n <= horizon.

    The witness sequence must be nondecreasing over the checked levels.
    Comparisons where both sides saturated count as passes and are tallied
    separately; the report means "verified up to this horizon".
    """
    if levels < 1 or horizon < 0:
        raise ValueError("need levels >= 1 and horizon >= 0")
    saturated = 0
    prev: SatInt = w.eval(1)
    for k in range(2, levels + 1):
        cur = w.eval(k)
        if not sat_leq(prev, cur):
            raise ValueError("witness sequence decreases at k=%d" % k)
        prev = cur
    for k in range(1, levels + 1):
        d_k = w.eval(k)
        if is_huge(d_k):
            continue
        for n in range(max(d_k + 1, 0), horizon + 1):
            lhs = h.eval(n)
            rhs = eval_iterate(g, k, n)
            if not sat_geq(lhs, rhs):
                return GGReport(False, levels, horizon, failure=(k, n), saturated_comparisons=saturated)
            if is_huge(lhs) and is_huge(rhs):
                saturated += 1
    return GGReport(True, levels, horizon, saturated_comparisons=saturated)


def is_quick(h: Bound, upto: int) -> bool:
    """h(n) >= 2^n and h nondecreasing, checked for all n <= upto."""
    prev: SatInt = 2
    for n in range(upto + 1):
        v = h.eval(n)
        target = 2**n
        if not sat_geq(v, target):
            return False
        if not sat_leq(prev, v):
            return False
        prev = v
    return True


def pointwise_geq(f: Bound, g: Bound, lo: int, hi: int) -> tuple[bool, int | None]:
    """f(n) >= g(n) for all lo <= n <= hi; returns (ok, first failing n)."""
    for n in range(lo, hi + 1):
        if not sat_geq(f.eval(n), g.eval(n)):
            return False, n
    return True, None


@dataclass(frozen=True)
class DensityResult:
    f: PiecewiseIterate
    wf: TableSeq
    wh: SquaredIndexSeq


def density_construct(
    h: Bound,
    g: Bound,
    w: Seq,
    levels: int = 3,
    horizon: int = 8,
    piece_count: int = 16,
    tight: bool = False,
) -> DensityResult:
    """Build an intermediate bound f sitting between g and h.

    Requires that w witnesses h dominating the iterates of g (verified up
    to the given horizon first).  The k-th threshold is g iterated k*k
    times at w((k+1)^2); f equals g iterated k times on the k-th interval.
    Returned witnesses: wf (the shifted thresholds) for f over g, and
    wh (w at squared indices) for h over f.  With tight=True the
    thresholds use the smaller exponent k*k - k.
    """
    pre = gg_verify(h, g, w, levels, horizon)
    if not pre.passed:
        raise ValueError("witness fails at (k, n)=%r; cannot build density bound" % (pre.failure,))
    thresholds: list[SatInt] = []
    for k in range(1, piece_count + 1):
        exponent = k * k - k if tight else k * k
        d = w.eval((k + 1) * (k + 1))
        a_k = HUGE if is_huge(d) else eval_iterate(g, exponent, d)
        if thresholds and not sat_leq(thresholds[-1], a_k):
            a_k = thresholds[-1]
        thresholds.append(a_k)
        if is_huge(a_k):
            break
    f = PiecewiseIterate(g, tuple(thresholds))
    # wf(k) = a_{k-1}: below each threshold the next iterate takes over.
    wf = TableSeq((-1,) + tuple(thresholds))
    wh = SquaredIndexSeq(w)
    return DensityResult(f=f, wf=wf, wh=wh)


@dataclass(frozen=True)
class ProductReport:
    quick: bool
    holds: bool
    threshold: int | None
    horizon: int
    failure: int | None = None


def bounded_product_bound(h: Bound, horizon: int) -> ProductReport:
    """Let g(n) be the product of h(m) for m < n; check g <= h iterated
    three times, for all n <= horizon, and report where domination begins.
    """
    if not is_quick(h, horizon):
        return ProductReport(quick=False, holds=False, threshold=None, horizon=horizon)
    product: SatInt = 1
    holds: list[bool] = []
    for n in range(horizon + 1):
        rhs = eval_iterate(h, 3, n)
        holds.append(sat_leq(product, rhs))
        v = h.eval(n)
        if is_huge(product) or is_huge(v):
            product = HUGE
        else:
            nxt = product * v
            product = _clamp(nxt, h.cap)
    if all(holds):
        threshold = 0
        for n in range(horizon, -1, -1):
            if not holds[n]:
                threshold = n + 1
                break
        return ProductReport(quick=True, holds=True, threshold=threshold, horizon=horizon)
    first_bad = holds.index(False)
    return ProductReport(quick=True, holds=False, threshold=None, horizon=horizon, failure=first_bad)
