"""Signed Rauzy induction.

One step replaces T on (0, c) by its first return map on (0, xi), where xi
cuts off the shorter of the last interval and the interval landing last.
The combinatorics follow the two Rauzy maps a and b (each with a case split
on a flip sign); the lengths transform by the inverse of a unimodular 0/1
matrix.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Set, Tuple

from app.errors import CapExceeded, NotInPStar, PreconditionViolation, TieEncountered
from app.iet import SignedPermutation, as_scalars
from app.scalar import Scalar

logger = logging.getLogger(__name__)

Matrix = List[List[int]]


class StepType(str, Enum):
    A = "a"
    B = "b"
    TIE = "tie"


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(left: Matrix, right: Matrix) -> Matrix:
    size = len(right[0])
    return [
        [sum(row[k] * right[k][j] for k in range(len(right))) for j in range(size)]
        for row in left
    ]


def apply_matrix(matrix: Matrix, vector: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    zero = vector[0].basis.zero()
    result = []
    for row in matrix:
        total = zero
        for coefficient, value in zip(row, vector):
            if coefficient:
                total = total + value * coefficient
        result.append(total)
    return tuple(result)


def determinant(matrix: Matrix) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    m = [list(row) for row in matrix]
    n = len(m)
    sign, previous = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // previous
        previous = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Step records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RauzyStepRecord:
    type: StepType
    matrix: Matrix
    p_before: SignedPermutation
    p_after: SignedPermutation
    xi: Scalar
    lengths_before: Tuple[Scalar, ...]
    lengths_after: Tuple[Scalar, ...]

    def to_dict(self) -> dict:
        return {
            "type": self.type.value,
            "matrix": self.matrix,
            "p_before": self.p_before.to_list(),
            "p_after": self.p_after.to_list(),
            "xi": self.xi.to_json(),
        }


@dataclass
class RauzyTrajectory:
    """Append-only record of consecutive Rauzy steps from (lengths, perm)."""

    lengths: Tuple[Scalar, ...]
    perm: SignedPermutation
    records: List[RauzyStepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def word(self) -> str:
        return "".join(record.type.value for record in self.records)

    @property
    def final_lengths(self) -> Tuple[Scalar, ...]:
        return self.records[-1].lengths_after if self.records else self.lengths

    @property
    def final_perm(self) -> SignedPermutation:
        return self.records[-1].p_after if self.records else self.perm

    @property
    def matrix(self) -> Matrix:
        """M_{c_0} M_{c_1} ... M_{c_{K-1}}, so that lengths = M * final_lengths."""
        cumulative = identity(self.perm.n)
        for record in self.records:
            cumulative = matmul(cumulative, record.matrix)
        return cumulative

    def append(self, record: RauzyStepRecord) -> None:
        self.records.append(record)

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "perm": self.perm.to_list(),
            "final_perm": self.final_perm.to_list(),
            "final_lengths": [length.to_json() for length in self.final_lengths],
            "matrix": self.matrix,
            "steps": [record.to_dict() for record in self.records],
        }


# ---------------------------------------------------------------------------
# Rauzy maps
# ---------------------------------------------------------------------------


def _require_p_star(p: SignedPermutation) -> None:
    if not p.in_p_star:
        raise NotInPStar(f"{p} ends with +-{p.n}; no Rauzy step is defined")


def rauzy_type(lengths: Sequence[Scalar], p: SignedPermutation) -> StepType:
    _require_p_star(p)
    j = p.pi_inv[p.n - 1]
    difference = lengths[j - 1] - lengths[p.n - 1]
    if difference.sign < 0:
        return StepType.A
    if difference.sign > 0:
        return StepType.B
    return StepType.TIE


def rauzy_matrix(p: SignedPermutation, step: StepType) -> Matrix:
    _require_p_star(p)
    n = p.n
    j = p.pi_inv[n - 1]
    m = identity(n) if step is StepType.A else [[0] * n for _ in range(n)]
    if step is StepType.A:
        m[n - 1][j - 1] += 1
        return m
    s = j + (1 + p.theta[j - 1]) // 2
    for i in range(1, j + 1):
        m[i - 1][i - 1] = 1
    m[n - 1][s - 1] = 1
    for i in range(j, n):
        m[i - 1][i] = 1
    return m


def _map_a(p: SignedPermutation) -> Tuple[int, ...]:
    n = p.n
    pi, theta = p.pi, p.theta
    last = pi[n - 1]
    entries = []
    for value, sign in zip(pi, theta):
        if theta[n - 1] > 0:
            if value <= last:
                entries.append(sign * value)
            elif value == n:
                entries.append(sign * (last + 1))
            else:
                entries.append(sign * (value + 1))
        else:
            if value <= last - 1:
                entries.append(sign * value)
            elif value == n:
                entries.append(-sign * last)
            else:
                entries.append(sign * (value + 1))
    return tuple(entries)


def _map_b(p: SignedPermutation) -> Tuple[int, ...]:
    n = p.n
    e = p.entries
    j = p.pi_inv[n - 1]
    if p.theta[j - 1] > 0:
        return e[:j] + (e[n - 1],) + e[j : n - 1]
    return e[: j - 1] + (-e[n - 1],) + e[j - 1 : n - 1]


def rauzy_map(p: SignedPermutation, step: StepType) -> SignedPermutation:
    _require_p_star(p)
    if step is StepType.A:
        return SignedPermutation(_map_a(p))
    if step is StepType.B:
        return SignedPermutation(_map_b(p))
    raise TieEncountered("no Rauzy map is defined for a tie")


def _induced_lengths(lengths: Sequence[Scalar], p: SignedPermutation, step: StepType) -> List[Scalar]:
    n = p.n
    j = p.pi_inv[n - 1]
    new = list(lengths)
    if step is StepType.A:
        new[n - 1] = lengths[n - 1] - lengths[j - 1]
        return new
    remainder = lengths[j - 1] - lengths[n - 1]
    if p.theta[j - 1] > 0:
        pair = [remainder, lengths[n - 1]]
    else:
        pair = [lengths[n - 1], remainder]
    return list(lengths[: j - 1]) + pair + list(lengths[j : n - 1])


def rauzy_step(
    lengths: Sequence[Scalar], p: SignedPermutation
) -> Tuple[Tuple[Scalar, ...], SignedPermutation, RauzyStepRecord]:
    lengths = as_scalars(lengths)
    step = rauzy_type(lengths, p)
    if step is StepType.TIE:
        j = p.pi_inv[p.n - 1]
        raise TieEncountered(f"lambda_{j} = lambda_{p.n} = {lengths[p.n - 1]} for {p}")
    n = p.n
    j = p.pi_inv[n - 1]
    total = sum(lengths[1:], lengths[0])
    xi = total - (lengths[j - 1] if step is StepType.A else lengths[n - 1])
    after = tuple(_induced_lengths(lengths, p, step))
    p_after = rauzy_map(p, step)
    record = RauzyStepRecord(
        type=step,
        matrix=rauzy_matrix(p, step),
        p_before=p,
        p_after=p_after,
        xi=xi,
        lengths_before=tuple(lengths),
        lengths_after=after,
    )
    logger.debug("rauzy step %s: %s -> %s, xi=%s", step.value, p, p_after, xi)
    return after, p_after, record


def induce(lengths: Sequence[Scalar], p: SignedPermutation, steps: int) -> RauzyTrajectory:
    """Apply exactly *steps* Rauzy steps, regardless of reducibility."""
    trajectory = RauzyTrajectory(lengths=as_scalars(lengths), perm=p)
    current_lengths, current = trajectory.lengths, p
    for _ in range(steps):
        current_lengths, current, record = rauzy_step(current_lengths, current)
        trajectory.append(record)
    return trajectory


def finite_expansion(
    lengths: Sequence[Scalar], p: SignedPermutation, cap: int
) -> Tuple[int, RauzyTrajectory]:
    """Least m >= 0 such that the m-th induced permutation is reducible."""
    if not p.has_flips:
        raise PreconditionViolation(f"{p} has no flips; finite expansion is only defined with flips")
    if cap < 1:
        raise PreconditionViolation(f"rauzy cap must be >= 1, got {cap}")
    trajectory = RauzyTrajectory(lengths=as_scalars(lengths), perm=p)
    current_lengths, current = trajectory.lengths, p
    while current.is_irreducible:
        if len(trajectory) >= cap:
            raise CapExceeded(f"{p} still irreducible after {cap} Rauzy steps")
        current_lengths, current, record = rauzy_step(current_lengths, current)
        trajectory.append(record)
    logger.debug("finite expansion of %s: l=%d word=%s", p, len(trajectory), trajectory.word)
    return len(trajectory), trajectory


def forward_set(p: SignedPermutation, depth: int) -> Set[SignedPermutation]:
    """Closure of {p} under a and b, truncated after *depth* applications."""
    if depth < 0:
        raise PreconditionViolation(f"depth must be >= 0, got {depth}")
    seen = {p}
    frontier = deque([(p, 0)])
    while frontier:
        current, level = frontier.popleft()
        if level == depth or not current.in_p_star:
            continue
        for step in (StepType.A, StepType.B):
            image = rauzy_map(current, step)
            if image not in seen:
                seen.add(image)
                frontier.append((image, level + 1))
    return seen
