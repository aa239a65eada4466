"""Interval exchange transformations with flips.

Indices follow the usual mathematical convention in docstrings and public
accessors (intervals 1..n, breakpoints x_0..x_n); tuples are 0-based
internally.
"""
import bisect
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from app.errors import (
    DimensionMismatch,
    InvalidBasis,
    InvalidPermutation,
    NonPositiveLength,
    OutOfRange,
    ParseError,
)
from app.scalar import Basis, Scalar

logger = logging.getLogger(__name__)

Number = Union[Scalar, int, Fraction]


# ---------------------------------------------------------------------------
# Signed permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """The vector p with p_i = theta_i * pi_i."""

    entries: Tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise InvalidPermutation("signed permutation must be non-empty")
        if any(not isinstance(e, int) or isinstance(e, bool) or e == 0 for e in entries):
            raise InvalidPermutation(f"entries must be nonzero integers: {list(entries)}")
        if sorted(abs(e) for e in entries) != list(range(1, len(entries) + 1)):
            raise InvalidPermutation(f"|p| is not a permutation of 1..{len(entries)}: {list(entries)}")

    @classmethod
    def of(cls, *entries: int) -> "SignedPermutation":
        return cls(tuple(entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def pi(self) -> Tuple[int, ...]:
        return tuple(abs(e) for e in self.entries)

    @property
    def theta(self) -> Tuple[int, ...]:
        return tuple(1 if e > 0 else -1 for e in self.entries)

    @property
    def pi_inv(self) -> Tuple[int, ...]:
        """pi_inv[j - 1] is the (1-based) interval sent to position j."""
        inverse = [0] * self.n
        for i, e in enumerate(self.entries, start=1):
            inverse[abs(e) - 1] = i
        return tuple(inverse)

    @property
    def has_flips(self) -> bool:
        return any(e < 0 for e in self.entries)

    @property
    def in_p_star(self) -> bool:
        return abs(self.entries[-1]) != self.n

    @property
    def is_irreducible(self) -> bool:
        running = 0
        for k, value in enumerate(self.pi[:-1], start=1):
            running = max(running, value)
            if running == k:
                return False
        return True

    def to_list(self) -> List[int]:
        return list(self.entries)

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


class Direction(str, Enum):
    FORWARD = "fwd"
    BACKWARD = "bwd"


# ---------------------------------------------------------------------------
# The map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneSidedLimitPoint:
    index: int
    side: str  # "+" or "-"
    value: Scalar


@dataclass(frozen=True)
class Iet:
    """An IET on (0, c) with exact breakpoints x_0..x_n and image breakpoints y_0..y_n."""

    lengths: Tuple[Scalar, ...]
    perm: SignedPermutation
    breakpoints: Tuple[Scalar, ...]
    image_breakpoints: Tuple[Scalar, ...]

    @property
    def n(self) -> int:
        return self.perm.n

    @property
    def basis(self) -> Basis:
        return self.lengths[0].basis

    @property
    def total(self) -> Scalar:
        return self.breakpoints[-1]

    def interval(self, i: int) -> Tuple[Scalar, Scalar]:
        return self.breakpoints[i - 1], self.breakpoints[i]

    def _check_range(self, x: Scalar) -> None:
        if x.sign < 0 or x > self.total:
            raise OutOfRange(f"{x} is outside [0, {self.total}]")

    def locate(self, x: Scalar) -> Optional[int]:
        """Index i with x_{i-1} < x < x_i, or None when x is a breakpoint."""
        self._check_range(x)
        idx = bisect.bisect_left(self.breakpoints, x)
        if self.breakpoints[idx] == x:
            return None
        return idx

    def locate_image(self, y: Scalar) -> Optional[int]:
        self._check_range(y)
        idx = bisect.bisect_left(self.image_breakpoints, y)
        if self.image_breakpoints[idx] == y:
            return None
        return idx

    def piece(self, i: int, x: Scalar) -> Scalar:
        """The affine formula of interval i evaluated at x (also valid at its endpoints)."""
        target = self.perm.pi[i - 1]
        offset = x - self.breakpoints[i - 1]
        if self.perm.theta[i - 1] > 0:
            return self.image_breakpoints[target - 1] + offset
        return self.image_breakpoints[target] - offset

    def derivative(self, x: Scalar) -> Optional[int]:
        i = self.locate(x)
        return None if i is None else self.perm.theta[i - 1]

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.to_list(),
            "lengths": [length.to_json() for length in self.lengths],
            "perm": self.perm.to_list(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Iet":
        if not isinstance(data, dict):
            raise ParseError("IET JSON must be an object")
        missing = [key for key in ("lengths", "perm") if key not in data]
        if missing:
            raise ParseError(f"IET JSON is missing {', '.join(missing)}")
        try:
            basis = Basis(tuple(int(d) for d in data.get("basis", [])))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidBasis):
                raise
            raise ParseError(f"malformed basis: {data.get('basis')!r}") from exc
        if not isinstance(data["lengths"], list) or not isinstance(data["perm"], list):
            raise ParseError("lengths and perm must be arrays")
        lengths = [Scalar.from_json(item, basis) for item in data["lengths"]]
        try:
            perm = SignedPermutation(tuple(int(e) for e in data["perm"]))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidPermutation):
                raise
            raise ParseError(f"malformed perm: {data['perm']!r}") from exc
        return build_iet(lengths, perm, basis=basis)


def as_scalars(values: Iterable[Number], basis: Optional[Basis] = None) -> Tuple[Scalar, ...]:
    values = list(values)
    if basis is None:
        basis = next((v.basis for v in values if isinstance(v, Scalar)), Basis())
    zero = basis.zero()
    return tuple(zero + v for v in values)


def build_iet(
    lengths: Sequence[Number],
    perm: Union[SignedPermutation, Sequence[int]],
    basis: Optional[Basis] = None,
) -> Iet:
    if not isinstance(perm, SignedPermutation):
        perm = SignedPermutation(tuple(perm))
    if len(lengths) != perm.n:
        raise DimensionMismatch(f"{len(lengths)} lengths for a permutation of size {perm.n}")
    scalars = as_scalars(lengths, basis)
    for i, length in enumerate(scalars, start=1):
        if length.sign <= 0:
            raise NonPositiveLength(f"lambda_{i} = {length} is not positive")

    zero = scalars[0].basis.zero()
    xs = [zero]
    for length in scalars:
        xs.append(xs[-1] + length)
    ys = [zero]
    for i in perm.pi_inv:
        ys.append(ys[-1] + scalars[i - 1])
    return Iet(lengths=scalars, perm=perm, breakpoints=tuple(xs), image_breakpoints=tuple(ys))


def evaluate(T: Iet, x: Number, direction: Direction = Direction.FORWARD) -> Optional[Scalar]:
    """T(x) or T^{-1}(x); None where the requested map is undefined."""
    x = T.basis.zero() + x
    if Direction(direction) is Direction.FORWARD:
        i = T.locate(x)
        return None if i is None else T.piece(i, x)
    j = T.locate_image(x)
    if j is None:
        return None
    i = T.perm.pi_inv[j - 1]
    start = T.breakpoints[i - 1]
    if T.perm.theta[i - 1] > 0:
        return start + (x - T.image_breakpoints[j - 1])
    return start + (T.image_breakpoints[j] - x)


def one_sided_limits(T: Iet) -> List[OneSidedLimitPoint]:
    """w_0^+, both limits at every interior singular point, and w_n^-."""
    points: List[OneSidedLimitPoint] = []
    for j in range(T.n + 1):
        x = T.breakpoints[j]
        if j > 0:
            points.append(OneSidedLimitPoint(j, "-", T.piece(j, x)))
        if j < T.n:
            points.append(OneSidedLimitPoint(j, "+", T.piece(j + 1, x)))
    return points


def flipped_fixed_points(T: Iet) -> List[Tuple[int, Scalar]]:
    fixed: List[Tuple[int, Scalar]] = []
    for i in range(1, T.n + 1):
        if T.perm.theta[i - 1] > 0:
            continue
        # x* solves y_{pi(i)} - (x - x_{i-1}) = x
        candidate = (T.image_breakpoints[T.perm.pi[i - 1]] + T.breakpoints[i - 1]) / 2
        left, right = T.interval(i)
        if left < candidate < right:
            fixed.append((i, candidate))
    logger.debug("flipped fixed points of %s: %s", T.perm, fixed)
    return fixed
