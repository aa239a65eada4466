"""Example factories: length vectors in a Rauzy cone and permutations with a
prescribed number of periodic and minimal components.
"""
import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from app.errors import DimensionMismatch, InvalidCounts, NonPositiveLength, TargetMismatch, WordInapplicable
from app.iet import SignedPermutation, as_scalars, build_iet
from app.rauzy import StepType, apply_matrix, identity, matmul, rauzy_map, rauzy_matrix
from app.scalar import Basis, Scalar

logger = logging.getLogger(__name__)

Word = Union[str, Sequence[StepType]]

COEFFICIENT_RANGE = (1, 20)


# ---------------------------------------------------------------------------
# Cone sampling
# ---------------------------------------------------------------------------


def parse_word(word: Word) -> List[StepType]:
    steps = []
    for letter in word:
        try:
            step = StepType(letter.lower()) if isinstance(letter, str) else StepType(letter)
        except ValueError as exc:
            raise WordInapplicable(f"unknown step {letter!r} in {word!r}") from exc
        if step is StepType.TIE:
            raise WordInapplicable("a step word may only contain a and b")
        steps.append(step)
    return steps


def _random_rational(rng: random.Random) -> Fraction:
    low, high = COEFFICIENT_RANGE
    return Fraction(rng.randint(low, high), rng.randint(low, high))


def sample_mu(n: int, seed, basis: Optional[Basis] = None) -> Tuple[Scalar, ...]:
    """mu_i = a_i + b_i sqrt(d_i) over distinct radicands d_i; rationally independent."""
    basis = basis or Basis.primes(max(2, n))
    if len(basis.radicands) < n:
        raise DimensionMismatch(f"basis {basis.to_list()} has fewer than {n} radicands")
    rng = random.Random(f"{seed}:cone")
    mu = []
    for d in basis.radicands[:n]:
        a, b = _random_rational(rng), _random_rational(rng)
        mu.append(basis.rational(a) + basis.sqrt(d) * b)
    return tuple(mu)


def cone_sample(
    p: SignedPermutation,
    word: Word,
    seed=0,
    basis: Optional[Basis] = None,
    mu: Optional[Sequence[Scalar]] = None,
) -> Tuple[Scalar, ...]:
    """A length vector whose Rauzy trajectory from p follows *word* exactly."""
    matrix = identity(p.n)
    current = p
    for position, step in enumerate(parse_word(word)):
        if not current.in_p_star:
            raise WordInapplicable(
                f"step {position} of {word!r}: {current} ends with +-{current.n}"
            )
        matrix = matmul(matrix, rauzy_matrix(current, step))
        current = rauzy_map(current, step)

    if mu is None:
        mu = sample_mu(p.n, seed, basis)
    if len(mu) != p.n:
        raise DimensionMismatch(f"mu has {len(mu)} entries for a permutation of size {p.n}")
    mu = as_scalars(mu, next((m.basis for m in mu if isinstance(m, Scalar)), basis or Basis()))
    if any(m.sign <= 0 for m in mu):
        raise NonPositiveLength("mu must be entrywise positive")
    return apply_matrix(matrix, mu)


# ---------------------------------------------------------------------------
# Prescribed component counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionSpec:
    n: int
    k: int
    ell: int
    seed: int = 0

    @property
    def is_admissible(self) -> bool:
        n, k, ell = self.n, self.k, self.ell
        if k == n and ell == 0 and n >= 1:
            return True
        return k >= 1 and 1 <= ell and 2 * ell < n and k + 2 * ell <= n

    @property
    def r(self) -> int:
        """Size of the leading minimal block."""
        return self.n - self.k - 2 * (self.ell - 1)


@dataclass
class Construction:
    spec: ConstructionSpec
    perm: SignedPermutation
    lengths: Tuple[Scalar, ...]
    target: SignedPermutation
    word: str

    def to_dict(self) -> dict:
        data = build_iet(self.lengths, self.perm).to_dict()
        data["expected"] = {"n_per": self.spec.k, "n_min": self.spec.ell}
        data["target"] = self.target.to_list()
        data["word"] = self.word
        data["seed"] = self.spec.seed
        return data


def target_permutation(spec: ConstructionSpec) -> SignedPermutation:
    """The reducible permutation reached after n - 1 b-steps.

    It splits into a reversal block (r, ..., 1), ell - 1 transposed pairs and
    k flipped singletons.
    """
    n, k, ell = spec.n, spec.k, spec.ell
    if k == n and ell == 0:
        return SignedPermutation(tuple(-i for i in range(1, n + 1)))
    r = spec.r
    entries = list(range(r, 0, -1))
    for t in range(ell - 1):
        a = r + 2 * t + 1
        entries += [a + 1, a]
    entries += [-i for i in range(n - k + 1, n + 1)]
    return SignedPermutation(tuple(entries))


def theorem_c_permutation(target: SignedPermutation) -> SignedPermutation:
    """The p with p_1 = -n whose (n-1)-fold b-image is *target*."""
    n = target.n
    q = target.entries
    return SignedPermutation((-n,) + tuple(-q[n - 1 - i] for i in range(1, n)))


def construct_theorem_c(spec: ConstructionSpec, basis: Optional[Basis] = None) -> Construction:
    if not spec.is_admissible:
        raise InvalidCounts(
            f"no irreducible {spec.n}-IET with flips has {spec.k} periodic and {spec.ell} minimal components"
        )
    target = target_permutation(spec)
    p = theorem_c_permutation(target)

    image = p
    for _ in range(spec.n - 1):
        image = rauzy_map(image, StepType.B)
    if image != target:
        raise TargetMismatch(f"b^{spec.n - 1}({p}) = {image}, expected {target}")

    word = "b" * (spec.n - 1)
    lengths = cone_sample(p, word, spec.seed, basis=basis)
    logger.debug("construction (%d,%d,%d): p=%s q=%s", spec.n, spec.k, spec.ell, p, target)
    return Construction(spec=spec, perm=p, lengths=lengths, target=target, word=word)


def admissible_specs(max_n: int, seed: int = 0) -> Iterator[ConstructionSpec]:
    for n in range(1, max_n + 1):
        for k in range(0, n + 1):
            for ell in range(0, n + 1):
                spec = ConstructionSpec(n, k, ell, seed)
                if spec.is_admissible:
                    yield spec


# ---------------------------------------------------------------------------
# Random flipped permutations
# ---------------------------------------------------------------------------


def sample_flip_permutation(n: int, rng: random.Random) -> SignedPermutation:
    """Uniform among irreducible signed permutations of size n with at least one flip."""
    while True:
        values = list(range(1, n + 1))
        rng.shuffle(values)
        signs = [rng.choice((-1, 1)) for _ in range(n)]
        p = SignedPermutation(tuple(s * v for s, v in zip(signs, values)))
        if p.has_flips and p.is_irreducible:
            return p


def flip_permutations(n: int) -> List[SignedPermutation]:
    """Every irreducible signed permutation of size n with at least one flip."""
    found = []
    for values in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((-1, 1), repeat=n):
            p = SignedPermutation(tuple(s * v for s, v in zip(signs, values)))
            if p.has_flips and p.is_irreducible:
                found.append(p)
    return found
