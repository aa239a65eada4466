"""Block decomposition and the recursive component classification.

A reducible signed permutation splits T into IETs on consecutive invariant
blocks.  Singletons are periodic, oriented blocks passing the depth-checked
Keane condition are minimal, and blocks with flips are Rauzy-induced until
they split again.  A periodic component is recovered at the top level from
the orbit of its witness.  A minimal component found for an induced map is
spread back over its block by pushing the support forward until it returns
to the induction window.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from app.errors import BoundViolation, CapExceeded, DegenerateBlock
from app.iet import Iet, SignedPermutation, as_scalars, build_iet
from app.models import CapsConfig, Component, ComponentReport, Interval
from app.orbits import clip, merge_intervals, nontrivial_saddle_connections, periodic_profile, push_forward
from app.rauzy import RauzyTrajectory, finite_expansion
from app.scalar import Scalar

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    perm: SignedPermutation
    offset: int

    @property
    def size(self) -> int:
        return self.perm.n

    def to_dict(self) -> dict:
        return {"perm": self.perm.to_list(), "offset": self.offset, "size": self.size}


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: Tuple[Block, ...]

    @property
    def s(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(block.size for block in self.blocks)

    def to_dict(self) -> dict:
        return {"s": self.s, "blocks": [block.to_dict() for block in self.blocks]}


def is_irreducible(p: SignedPermutation) -> bool:
    return p.is_irreducible


def decompose(q: SignedPermutation) -> BlockDecomposition:
    """Unique splitting of q into irreducible blocks, each shifted to start at 1."""
    blocks: List[Block] = []
    start, running = 0, 0
    for k, value in enumerate(q.pi, start=1):
        running = max(running, value)
        if running == k:
            entries = tuple(
                (1 if e > 0 else -1) * (abs(e) - start) for e in q.entries[start:k]
            )
            blocks.append(Block(SignedPermutation(entries), start))
            start = k
    return BlockDecomposition(tuple(blocks))


def recombine(decomposition: BlockDecomposition) -> SignedPermutation:
    entries: List[int] = []
    for block in decomposition.blocks:
        entries.extend((1 if e > 0 else -1) * (abs(e) + block.offset) for e in block.perm.entries)
    return SignedPermutation(tuple(entries))


# ---------------------------------------------------------------------------
# Recursive classification
# ---------------------------------------------------------------------------


@dataclass
class _Piece:
    kind: str
    support: List[Interval]
    witness: Scalar

    def shifted(self, offset: Scalar) -> "_Piece":
        return _Piece(
            self.kind,
            [(a + offset, b + offset) for a, b in self.support],
            self.witness + offset,
        )


@dataclass
class _Result:
    pieces: List[_Piece] = field(default_factory=list)
    provenance: List[RauzyTrajectory] = field(default_factory=list)


def _saturate(piece: _Piece, T: Iet, window_end: Scalar, cap: int) -> _Piece:
    """Support of a minimal piece of the map induced on (0, window_end), spread by T over (0, c)."""
    support = list(piece.support)
    frontier = support
    for _ in range(cap):
        frontier = clip(push_forward(T, frontier), (window_end, T.total))
        if not frontier:
            return _Piece(piece.kind, merge_intervals(support), piece.witness)
        support.extend(frontier)
    raise CapExceeded(f"support of {T.perm} did not return to (0, {window_end}) within {cap} steps")


def _classify_oriented(T: Iet, caps: CapsConfig) -> _Piece:
    if all(T.lengths[0].commensurable(length) for length in T.lengths[1:]):
        raise DegenerateBlock(f"oriented block {T.perm} has commensurable lengths")
    connections = nontrivial_saddle_connections(T, caps.keane_depth)
    if connections:
        first = connections[0]
        raise DegenerateBlock(
            f"oriented block {T.perm} has a saddle connection x_{first.start} -> x_{first.end} "
            f"of length {first.length}"
        )
    return _Piece("minimal", [(T.breakpoints[0], T.total)], T.lengths[0] / 2)


def _classify_components(
    lengths: Sequence[Scalar], p: SignedPermutation, caps: CapsConfig, depth: int
) -> _Result:
    if depth > caps.recursion_cap:
        raise CapExceeded(f"classification recursion deeper than {caps.recursion_cap}")
    result = _Result()
    offset = lengths[0] - lengths[0]
    for block in decompose(p).blocks:
        block_lengths = tuple(lengths[block.offset : block.offset + block.size])
        T = build_iet(block_lengths, block.perm)
        if block.size == 1:
            piece = _Piece("periodic", [(T.breakpoints[0], T.total)], T.total / 2)
            result.pieces.append(piece.shifted(offset))
        elif not block.perm.has_flips:
            result.pieces.append(_classify_oriented(T, caps).shifted(offset))
        else:
            steps, trajectory = finite_expansion(block_lengths, block.perm, caps.rauzy_cap)
            logger.debug(
                "block %s at offset %d splits after %d steps: %s",
                block.perm, block.offset, steps, trajectory.final_perm,
            )
            inner = _classify_components(
                trajectory.final_lengths, trajectory.final_perm, caps, depth + 1
            )
            result.provenance.append(trajectory)
            result.provenance.extend(inner.provenance)
            window_end = sum(trajectory.final_lengths[1:], trajectory.final_lengths[0])
            for piece in inner.pieces:
                if piece.kind == "minimal":
                    piece = _saturate(piece, T, window_end, caps.orbit_cap)
                result.pieces.append(piece.shifted(offset))
        offset = offset + T.total
    return result


def classify(
    lengths: Sequence[Scalar],
    p: SignedPermutation,
    caps: Optional[CapsConfig] = None,
    enforce_bound: bool = True,
) -> ComponentReport:
    """Periodic and minimal components of the IET (lengths, p).

    Raises TieEncountered or CapExceeded from the induction, DegenerateBlock
    when an oriented block fails the Keane check, and BoundViolation if the
    resulting counts break n_per + 2 n_min <= n.
    """
    caps = caps or CapsConfig()
    T = build_iet(as_scalars(lengths), p)
    result = _classify_components(T.lengths, p, caps, depth=0)

    components: List[Component] = []
    for piece in result.pieces:
        if piece.kind == "minimal":
            components.append(Component("minimal", piece.support, piece.witness))
            continue
        profile = periodic_profile(T, piece.witness, caps.orbit_cap)
        components.append(
            Component(
                "periodic",
                profile.support,
                piece.witness,
                period=profile.period,
                cycle_length=profile.cycle_length,
                flipped=profile.flipped,
            )
        )
    components.sort(key=lambda c: c.support[0][0])

    report = ComponentReport(n=p.n, components=components, provenance=tuple(result.provenance))
    if enforce_bound and not check_component_bound(report, p.n):
        raise BoundViolation(f"{report.summary} for {p}")
    logger.debug("classified %s: %s", p, report.summary)
    return report


def check_component_bound(report: ComponentReport, n: int) -> bool:
    return report.n_per + 2 * report.n_min <= n
