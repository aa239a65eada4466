"""Direct orbit simulation: saddle connections, rigid partitions, periodic
components traced from a witness point, minimal-support estimates and the
one-sided support distance rho.

All hits are exact coefficient-wise equalities.  Supports are finite unions
of open intervals kept in canonical form: sorted, with touching or
overlapping intervals merged.
"""
import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator, List, Optional, Sequence, Tuple

from app.errors import CapExceeded, EmptyInput, OrbitHalted, OutOfRange, PreconditionViolation
from app.iet import Direction, Iet, evaluate, one_sided_limits
from app.models import CapsConfig, Interval
from app.scalar import Scalar

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_ATTEMPTS = 16


# ---------------------------------------------------------------------------
# Interval unions
# ---------------------------------------------------------------------------


def merge_intervals(intervals: Sequence[Interval]) -> List[Interval]:
    ordered = sorted((iv for iv in intervals if iv[0] < iv[1]), key=lambda iv: iv[0])
    merged: List[Interval] = []
    for left, right in ordered:
        if merged and left <= merged[-1][1]:
            if right > merged[-1][1]:
                merged[-1] = (merged[-1][0], right)
        else:
            merged.append((left, right))
    return merged


def measure(intervals: Sequence[Interval]) -> Scalar:
    if not intervals:
        raise EmptyInput("measure of an empty union")
    total = intervals[0][0].basis.zero()
    for left, right in merge_intervals(intervals):
        total = total + (right - left)
    return total


def clip(intervals: Sequence[Interval], window: Interval) -> List[Interval]:
    low, high = window
    clipped = []
    for left, right in intervals:
        left, right = max(left, low), min(right, high)
        if left < right:
            clipped.append((left, right))
    return clipped


def gaps(window: Interval, covered: Sequence[Interval]) -> List[Interval]:
    """Open intervals of *window* of positive length not covered by *covered*."""
    cursor, high = window
    result = []
    for left, right in merge_intervals(clip(covered, window)):
        if cursor < left:
            result.append((cursor, left))
        cursor = max(cursor, right)
    if cursor < high:
        result.append((cursor, high))
    return result


def push_forward(T: Iet, intervals: Sequence[Interval]) -> List[Interval]:
    """T applied to a union of open intervals, up to finitely many points."""
    bps = T.breakpoints
    images: List[Interval] = []
    for left, right in intervals:
        i = max(bisect.bisect_right(bps, left), 1)
        while i <= T.n and bps[i - 1] < right:
            lo, hi = max(left, bps[i - 1]), min(right, bps[i])
            if lo < hi:
                a, b = T.piece(i, lo), T.piece(i, hi)
                images.append((a, b) if a < b else (b, a))
            i += 1
    return images


def _sample_fractions() -> Iterator[Fraction]:
    denominator = 2
    while True:
        for numerator in range(1, denominator):
            if gcd(numerator, denominator) == 1:
                yield Fraction(numerator, denominator)
        denominator += 1


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


@dataclass
class Orbit:
    points: List[Scalar]
    halted: bool = False

    @property
    def halt_point(self) -> Optional[Scalar]:
        return self.points[-1] if self.halted else None


def orbit(T: Iet, x: Scalar, N: int, direction: Direction = Direction.FORWARD) -> Orbit:
    """Up to N exact iterates of x; stops at the first point where the map is undefined."""
    x = T.basis.zero() + x
    if x.sign < 0 or x > T.total:
        raise OutOfRange(f"{x} is outside [0, {T.total}]")
    points = [x]
    for _ in range(N):
        image = evaluate(T, points[-1], direction)
        if image is None:
            return Orbit(points, halted=True)
        points.append(image)
    return Orbit(points)


# ---------------------------------------------------------------------------
# Saddle connections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleConnection:
    start: int
    side: str
    end: int
    length: int
    itinerary: Tuple[Scalar, ...]

    def is_trivial(self, n: int) -> bool:
        return self.end in (0, n)

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "side": self.side,
            "end": self.end,
            "length": self.length,
            "itinerary": [p.to_json() for p in self.itinerary],
        }


def breakpoint_index(T: Iet, x: Scalar) -> Optional[int]:
    idx = bisect.bisect_left(T.breakpoints, x)
    if idx < len(T.breakpoints) and T.breakpoints[idx] == x:
        return idx
    return None


def saddle_connections(T: Iet, cap: int) -> List[SaddleConnection]:
    """Scan the 2n one-sided starts; *cap* bounds the T applications after the limit."""
    found: List[SaddleConnection] = []
    for limit in one_sided_limits(T):
        itinerary = [T.breakpoints[limit.index], limit.value]
        point = limit.value
        for steps in range(cap + 1):
            end = breakpoint_index(T, point)
            if end is not None:
                found.append(
                    SaddleConnection(limit.index, limit.side, end, steps + 1, tuple(itinerary))
                )
                break
            if steps == cap:
                break
            point = evaluate(T, point)
            itinerary.append(point)
    logger.debug("%d saddle connections found to depth %d", len(found), cap)
    return found


def nontrivial_saddle_connections(T: Iet, cap: int) -> List[SaddleConnection]:
    return [c for c in saddle_connections(T, cap) if not c.is_trivial(T.n)]


# ---------------------------------------------------------------------------
# Rigid partitions
# ---------------------------------------------------------------------------


@dataclass
class RigidPartition:
    depth: int
    cells: List[Interval] = field(default_factory=list)


def rigid_partition(T: Iet, N: int) -> RigidPartition:
    if N < 0:
        raise PreconditionViolation(f"partition depth must be >= 0, got {N}")
    zero, c = T.breakpoints[0], T.total
    cuts = set()
    for x in T.breakpoints:
        current = x
        for t in range(N + 1):
            if zero < current < c:
                cuts.add(current)
            if t == N:
                break
            current = evaluate(T, current, Direction.BACKWARD)
            if current is None:
                break
    ends = [zero] + sorted(cuts) + [c]
    return RigidPartition(depth=N, cells=list(zip(ends[:-1], ends[1:])))


# ---------------------------------------------------------------------------
# Periodic components
# ---------------------------------------------------------------------------


@dataclass
class PeriodicComponent:
    """The cycle of a maximal rigid interval J through a witness point."""

    support: List[Interval]
    rigid_interval: Interval
    period: int
    cycle_length: int
    flipped: bool
    witness: Scalar


def periodic_profile(T: Iet, witness: Scalar, cap: int) -> PeriodicComponent:
    """Trace the orbit of *witness* back to itself and measure its periodic component.

    Raises CapExceeded when the witness does not return within *cap* steps and
    OrbitHalted when its orbit meets a singular point.
    """
    w = T.basis.zero() + witness
    left = right = T.total
    orientation = 1
    orientations = [1]
    point = w
    for step in range(1, cap + 1):
        i = T.locate(point)
        if i is None:
            raise OrbitHalted(f"orbit of {w} meets singular point {point}", point=point, step=step - 1)
        low, high = T.interval(i)
        room_left, room_right = point - low, high - point
        if orientation < 0:
            room_left, room_right = room_right, room_left
        left, right = min(left, room_left), min(right, room_right)
        point = T.piece(i, point)
        orientation *= T.perm.theta[i - 1]
        orientations.append(orientation)
        if point == w:
            break
    else:
        raise CapExceeded(f"orbit of {w} does not return within {cap} steps")

    if orientation > 0:
        rigid = (w - left, w + right)
    else:
        radius = min(left, right)
        rigid = (w - radius, w + radius)

    # first return of J: the first iterate of w landing back inside J
    current = w
    cycle = [rigid]
    for cycle_length in range(1, step + 1):
        current = evaluate(T, current)
        if rigid[0] < current < rigid[1]:
            break
        cycle.append(push_forward(T, [cycle[-1]])[0])
    period = cycle_length if orientations[cycle_length] > 0 else 2 * cycle_length
    flipped = period == 2 * cycle_length
    support = merge_intervals(cycle)
    logger.debug(
        "periodic component through %s: period=%d cycle=%d flipped=%s",
        w, period, cycle_length, flipped,
    )
    return PeriodicComponent(
        support=support,
        rigid_interval=rigid,
        period=period,
        cycle_length=cycle_length,
        flipped=flipped,
        witness=w,
    )


def profile_in_gap(T: Iet, gap: Interval, cap: int, skip_aperiodic: bool = False) -> PeriodicComponent:
    """periodic_profile at the first sample point of *gap* whose orbit avoids singular points.

    With *skip_aperiodic*, sample points that do not return within *cap* are
    passed over too; CapExceeded is raised only when no sample is periodic.
    """
    width = gap[1] - gap[0]
    last: Optional[Exception] = None
    for attempt, fraction in enumerate(_sample_fractions()):
        if attempt == DEFAULT_SAMPLE_ATTEMPTS:
            break
        try:
            return periodic_profile(T, gap[0] + width * fraction, cap)
        except OrbitHalted as exc:
            last = last if isinstance(last, CapExceeded) else exc
        except CapExceeded as exc:
            if not skip_aperiodic:
                raise
            last = exc
    if isinstance(last, CapExceeded):
        raise CapExceeded(f"no sample point of {gap} returns within {cap}")
    raise OrbitHalted(f"no sample point of {gap} avoids the singular orbits: {last}")


def periodic_components_oracle(
    T: Iet, caps: CapsConfig, skip_aperiodic: bool = False
) -> List[PeriodicComponent]:
    """Brute-force periodic components from the cells of a rigid partition."""
    partition = rigid_partition(T, caps.partition_depth)
    components: List[PeriodicComponent] = []
    covered: List[Interval] = []
    skipped: List[Interval] = []
    for cell in partition.cells:
        while True:
            open_gaps = gaps(cell, merge_intervals(covered + skipped))
            if not open_gaps:
                break
            try:
                component = profile_in_gap(T, open_gaps[0], caps.orbit_cap, skip_aperiodic)
            except CapExceeded:
                if not skip_aperiodic:
                    raise
                logger.debug("gap %s skipped: no return within %d", open_gaps[0], caps.orbit_cap)
                skipped.append(open_gaps[0])
                continue
            components.append(component)
            covered = merge_intervals(covered + component.support)
    components.sort(key=lambda comp: comp.support[0][0])
    return components


# ---------------------------------------------------------------------------
# Minimal components and distances
# ---------------------------------------------------------------------------


@dataclass
class MinimalSupportEstimate:
    """Cells of a rigid partition visited by a finite orbit; an outer approximation only."""

    support: List[Interval]
    depth: int
    steps: int
    measure_half: Scalar
    measure: Scalar
    total: Scalar

    @property
    def coverage(self) -> float:
        return float(self.measure) / float(self.total)

    @property
    def coverage_half(self) -> float:
        return float(self.measure_half) / float(self.total)

    @property
    def stable(self) -> bool:
        return self.measure_half == self.measure


def minimal_support_estimate(
    T: Iet, x: Scalar, N: int, depth: Optional[int] = None
) -> MinimalSupportEstimate:
    if depth is None:
        depth = CapsConfig().partition_depth
    traced = orbit(T, x, N)
    if traced.halted:
        raise OrbitHalted(
            f"orbit of {x} meets singular point {traced.halt_point}",
            point=traced.halt_point,
            step=len(traced.points) - 1,
        )
    start = traced.points[0]
    if any(point == start for point in traced.points[1:]):
        raise PreconditionViolation(f"{start} is periodic; it lies in a periodic component")

    partition = rigid_partition(T, depth)
    ends = [cell[0] for cell in partition.cells] + [T.total]
    visited: List[Interval] = []
    half: List[Interval] = []
    for k, point in enumerate(traced.points):
        idx = bisect.bisect_left(ends, point)
        if ends[idx] == point:
            continue
        visited.append(partition.cells[idx - 1])
        if k <= N // 2:
            half.append(partition.cells[idx - 1])
    support = merge_intervals(visited)
    return MinimalSupportEstimate(
        support=support,
        depth=depth,
        steps=N,
        measure_half=measure(half) if half else T.basis.zero(),
        measure=measure(support) if support else T.basis.zero(),
        total=T.total,
    )


def _distance_to(point: Scalar, intervals: Sequence[Interval]) -> Scalar:
    best = None
    for left, right in intervals:
        if left <= point <= right:
            return point - point
        d = left - point if point < left else point - right
        if best is None or d < best:
            best = d
    return best


def support_distance(X: Sequence[Interval], Y: Sequence[Interval]) -> Scalar:
    """rho(X, Y) = sup over y in Y of d(y, X), evaluated on closures."""
    if not X or not Y:
        raise EmptyInput("support_distance needs two non-empty unions")
    xs = merge_intervals(X)
    candidates = [end for interval in Y for end in interval]
    for (_, a), (b, _) in zip(xs[:-1], xs[1:]):
        middle = (a + b) / 2
        if any(left <= middle <= right for left, right in Y):
            candidates.append(middle)
    return max(_distance_to(point, xs) for point in candidates)
