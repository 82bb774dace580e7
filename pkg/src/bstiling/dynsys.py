"""Piecewise linear maps on an interval, their orbits, and balanced representations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

PREFER_HALVING = "prefer-halving"
PREFER_THREE_HALVES = "prefer-three-halves"
FAIL_IF_AMBIGUOUS = "fail-if-ambiguous"
POLICIES = (PREFER_HALVING, PREFER_THREE_HALVES, FAIL_IF_AMBIGUOUS)


class DomainError(ValueError):
    pass


class NoPreimage(DomainError):
    pass


class AmbiguousPreimage(DomainError):
    pass


@dataclass(frozen=True)
class Branch:
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    slope: Fraction

    def contains(self, x) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def __str__(self):
        left = "[" if self.lo_closed else "]"
        right = "]" if self.hi_closed else "["
        return f"{left}{self.lo};{self.hi}{right} x{self.slope}"


@dataclass(frozen=True)
class PiecewiseLinearMap:
    branches: tuple[Branch, ...]

    def __post_init__(self):
        bs = sorted(self.branches, key=lambda br: (br.lo, not br.lo_closed))
        for left, right in zip(bs, bs[1:]):
            # consecutive branches must meet with exactly one of them owning the endpoint
            if left.hi != right.lo or left.hi_closed == right.lo_closed:
                raise ValueError(f"branches {left} and {right} do not partition the domain")
        object.__setattr__(self, "branches", tuple(bs))

    @property
    def lo(self) -> Fraction:
        return self.branches[0].lo

    @property
    def hi(self) -> Fraction:
        return self.branches[-1].hi

    def contains(self, x) -> bool:
        return any(br.contains(x) for br in self.branches)

    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(sorted({br.slope for br in self.branches}))


def kari_map() -> PiecewiseLinearMap:
    """x -> 2x on [2/3, 1], x -> (2/3)x on ]1, 2]."""
    return PiecewiseLinearMap((
        Branch(Fraction(2, 3), Fraction(1), True, True, Fraction(2)),
        Branch(Fraction(1), Fraction(2), False, True, Fraction(2, 3)),
    ))


def apply(f: PiecewiseLinearMap, x) -> tuple[Fraction, Fraction]:
    """Return (q*x, q) where q is the slope of the branch containing x."""
    x = Fraction(x)
    for br in f.branches:
        if br.contains(x):
            return br.slope * x, br.slope
    raise DomainError(f"{x} is outside the domain [{f.lo};{f.hi}]")


def preimages(f: PiecewiseLinearMap, x) -> list[tuple[Fraction, Fraction]]:
    """All (y, q) with y in the branch of slope q and q*y == x."""
    x = Fraction(x)
    out = []
    for br in f.branches:
        if br.slope == 0:
            continue
        y = x / br.slope
        if br.contains(y):
            out.append((y, br.slope))
    return out


@dataclass(frozen=True)
class Orbit:
    """A finite window k_min..k_max of an orbit: x_k = q_k * x_{k-1}.

    ``q_k`` is undefined (None) at k_min, where the window starts.
    """

    k_min: int
    k_max: int
    points: dict = field(hash=False)

    def __post_init__(self):
        if set(self.points) != set(range(self.k_min, self.k_max + 1)):
            raise ValueError("orbit points must cover k_min..k_max exactly")

    def covers(self, k: int) -> bool:
        return self.k_min <= k <= self.k_max

    def x(self, k: int) -> Fraction:
        return self.points[k][0]

    def q(self, k: int) -> Optional[Fraction]:
        return self.points[k][1]

    def values(self) -> list[Fraction]:
        return [self.points[k][0] for k in range(self.k_min, self.k_max + 1)]

    def to_json(self) -> list:
        return [[k, str(x), None if q is None else str(q)]
                for k, (x, q) in sorted(self.points.items())]

    @classmethod
    def from_json(cls, data) -> "Orbit":
        pts = {int(k): (Fraction(x), None if q is None else Fraction(q)) for k, x, q in data}
        return cls(min(pts), max(pts), pts)


def orbit_forward(f: PiecewiseLinearMap, x0, steps: int) -> Orbit:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    x = Fraction(x0)
    if not f.contains(x):
        raise DomainError(f"{x} is outside the domain")
    pts = {0: (x, None)}
    for k in range(1, steps + 1):
        x, q = apply(f, x)
        pts[k] = (x, q)
    return Orbit(0, steps, pts)


def _choose(cands, policy, x):
    if not cands:
        raise NoPreimage(f"no branch has a preimage of {x}")
    if policy == FAIL_IF_AMBIGUOUS:
        if len(cands) > 1:
            raise AmbiguousPreimage(f"{x} has preimages {[str(y) for y, _ in cands]}")
        return cands[0]
    if policy == PREFER_HALVING:
        return max(cands, key=lambda c: c[1])
    if policy == PREFER_THREE_HALVES:
        return min(cands, key=lambda c: c[1])
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def orbit_backward(f: PiecewiseLinearMap, x0, steps: int, policy: str = PREFER_HALVING) -> Orbit:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    x = Fraction(x0)
    if not f.contains(x):
        raise DomainError(f"{x} is outside the domain")
    pts = {0: [x, None]}
    for k in range(0, -steps, -1):
        y, q = _choose(preimages(f, x), policy, x)
        pts[k][1] = q
        pts[k - 1] = [y, None]
        x = y
    return Orbit(-steps, 0, {k: tuple(v) for k, v in pts.items()})


def make_orbit(f: PiecewiseLinearMap, x0, back: int, fwd: int, policy: str = PREFER_HALVING) -> Orbit:
    """Orbit window -back..fwd with x_0 = x0."""
    left = orbit_backward(f, x0, back, policy)
    right = orbit_forward(f, x0, fwd)
    pts = dict(left.points)
    pts.update({k: v for k, v in right.points.items() if k > 0})
    return Orbit(-back, fwd, pts)


def has_periodic_point_upto(f: PiecewiseLinearMap, N: int) -> bool:
    """Does some product of between 1 and N branch slopes equal 1?

    For a map whose branches are all linear this is the only way T^k(x) = x
    can hold with x != 0.  Only the multiset of slopes matters, so products
    are tracked level by level as a set of values.
    """
    slopes = f.slopes()
    level = {Fraction(1)}
    for _ in range(N):
        level = {v * s for v in level for s in slopes}
        if 1 in level:
            return True
    return False


@dataclass(frozen=True)
class BalancedRepSpec:
    x: Fraction
    r: Fraction = Fraction(0)


def balanced_digit(spec: BalancedRepSpec, k: int) -> int:
    x, r = Fraction(spec.x), Fraction(spec.r)
    return math.floor((r + k) * x) - math.floor((r + k - 1) * x)


def balanced_digits(spec: BalancedRepSpec, k_start: int, length: int) -> list[int]:
    return [balanced_digit(spec, k) for k in range(k_start, k_start + length)]


def interval_average(spec: BalancedRepSpec, k_start: int, length: int) -> Fraction:
    """Average of B_j for j = k_start+1 .. k_start+length."""
    if length < 1:
        raise ValueError("length must be positive")
    return Fraction(sum(balanced_digits(spec, k_start + 1, length)), length)
