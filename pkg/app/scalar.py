"""Exact arithmetic in Q(sqrt(d1), ..., sqrt(dm)).

A :class:`Scalar` stores one rational coefficient per subset S of the basis
radicands; the subset stands for the field element sqrt(prod(S)).  With
multiplicatively independent square-free radicands these elements are
linearly independent over Q, so equality and zero tests are exact and
coefficient-wise.  Signs are decided by interval enclosures of the square
roots, doubling the precision until the enclosure excludes zero.
"""
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Tuple, Union

from app.errors import BasisMismatch, InvalidBasis, ParseError, PreconditionViolation

Key = FrozenSet[int]
Rational = Union[int, Fraction]

_EMPTY: Key = frozenset()
START_PRECISION_BITS = 64


# ---------------------------------------------------------------------------
# Integer helpers
# ---------------------------------------------------------------------------


def _prime_factors(value: int) -> List[int]:
    factors: List[int] = []
    d = 2
    while d * d <= value:
        while value % d == 0:
            factors.append(d)
            value //= d
        d += 1
    if value > 1:
        factors.append(value)
    return factors


def _first_primes(count: int) -> List[int]:
    primes: List[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


@lru_cache(maxsize=4096)
def _sqrt_floor(product: int, bits: int) -> int:
    """floor(sqrt(product) * 2**bits)."""
    return math.isqrt(product << (2 * bits))


def _product(values: Iterable[int]) -> int:
    result = 1
    for v in values:
        result *= v
    return result


def _enclosure(numerators: Dict[Key, int], bits: int) -> Tuple[int, int]:
    """Integer bounds on 2**bits * sum(a_S * sqrt(prod S))."""
    low = high = 0
    for key, a in numerators.items():
        if not key:
            low += a << bits
            high += a << bits
            continue
        floor = _sqrt_floor(_product(key), bits)
        if a > 0:
            low += a * floor
            high += a * (floor + 1)
        else:
            low += a * (floor + 1)
            high += a * floor
    return low, high


# ---------------------------------------------------------------------------
# Basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Basis:
    """Square-free radicands adjoined to Q, sorted ascending."""

    radicands: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        rads = self.radicands
        if list(rads) != sorted(set(rads)):
            raise InvalidBasis(f"radicands must be distinct and sorted ascending: {list(rads)}")
        pivots: Dict[int, FrozenSet[int]] = {}
        for d in rads:
            if not isinstance(d, int) or isinstance(d, bool) or d < 2:
                raise InvalidBasis(f"radicand must be an integer >= 2: {d!r}")
            factors = _prime_factors(d)
            if len(set(factors)) != len(factors):
                raise InvalidBasis(f"radicand {d} is not square-free")
            # Gaussian elimination over GF(2) on prime supports
            vector = frozenset(factors)
            while vector:
                top = max(vector)
                if top not in pivots:
                    pivots[top] = vector
                    break
                vector = vector ^ pivots[top]
            else:
                raise InvalidBasis(
                    f"radicand {d} is a product of other radicands up to squares"
                )

    @classmethod
    def of(cls, *radicands: int) -> "Basis":
        return cls(tuple(radicands))

    @classmethod
    def primes(cls, count: int) -> "Basis":
        """Basis of the first *count* primes."""
        return cls(tuple(_first_primes(count)))

    def zero(self) -> "Scalar":
        return Scalar(self, {})

    def one(self) -> "Scalar":
        return Scalar(self, {_EMPTY: Fraction(1)})

    def rational(self, value: Rational) -> "Scalar":
        return Scalar(self, {_EMPTY: Fraction(value)})

    def sqrt(self, radicand: int) -> "Scalar":
        """sqrt(radicand) where radicand is a product of basis radicands."""
        key = self.subset_for(radicand)
        if key is None:
            raise BasisMismatch(f"sqrt({radicand}) is not in Q{self.label()}")
        return Scalar(self, {key: Fraction(1)})

    def subset_for(self, product: int):
        for size in range(len(self.radicands) + 1):
            for subset in combinations(self.radicands, size):
                if _product(subset) == product:
                    return frozenset(subset)
        return None

    def label(self) -> str:
        if not self.radicands:
            return ""
        return "(" + ", ".join(f"sqrt({d})" for d in self.radicands) + ")"

    def to_list(self) -> List[int]:
        return list(self.radicands)


# ---------------------------------------------------------------------------
# Scalar
# ---------------------------------------------------------------------------


class Scalar:
    """Immutable element of the field generated by a :class:`Basis`."""

    def __init__(self, basis: Basis, coeffs: Dict[Key, Fraction]) -> None:
        self._basis = basis
        self._coeffs = {k: Fraction(v) for k, v in coeffs.items() if v != 0}

    @property
    def basis(self) -> Basis:
        return self._basis

    @property
    def coefficients(self) -> Dict[Key, Fraction]:
        return dict(self._coeffs)

    @property
    def constant(self) -> Fraction:
        return self._coeffs.get(_EMPTY, Fraction(0))

    # ------------------------------------------------------------------
    # Coercion
    # ------------------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other._basis != self._basis:
                raise BasisMismatch(
                    f"cannot combine Q{self._basis.label()} with Q{other._basis.label()}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._basis.rational(other)
        return NotImplemented

    # ------------------------------------------------------------------
    # Field operations
    # ------------------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        coeffs = dict(self._coeffs)
        for key, value in other._coeffs.items():
            coeffs[key] = coeffs.get(key, Fraction(0)) + value
        return Scalar(self._basis, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(self._basis, {k: -v for k, v in self._coeffs.items()})

    def __pos__(self) -> "Scalar":
        return self

    def __sub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        coeffs: Dict[Key, Fraction] = {}
        for s, a in self._coeffs.items():
            for t, b in other._coeffs.items():
                key = s ^ t
                value = a * b * _product(s & t)
                coeffs[key] = coeffs.get(key, Fraction(0)) + value
        return Scalar(self._basis, coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.is_rational:
            raise PreconditionViolation("division is only defined by rationals")
        divisor = other.constant
        if divisor == 0:
            raise ZeroDivisionError("division of a Scalar by zero")
        return Scalar(self._basis, {k: v / divisor for k, v in self._coeffs.items()})

    def __abs__(self) -> "Scalar":
        return -self if self.sign < 0 else self

    # ------------------------------------------------------------------
    # Predicates
    # ------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_rational(self) -> bool:
        return all(key == _EMPTY for key in self._coeffs)

    @cached_property
    def sign(self) -> int:
        if self.is_zero:
            return 0
        if self.is_rational:
            return 1 if self.constant > 0 else -1
        quick = self._float_sign()
        if quick:
            return quick
        denominator = 1
        for c in self._coeffs.values():
            denominator = denominator * c.denominator // math.gcd(denominator, c.denominator)
        numerators = {key: c.numerator * (denominator // c.denominator) for key, c in self._coeffs.items()}
        bits = START_PRECISION_BITS
        while True:
            low, high = _enclosure(numerators, bits)
            if low > 0:
                return 1
            if high < 0:
                return -1
            bits *= 2

    def _float_sign(self) -> int:
        """Sign from a double-precision sum when its rounding error bound allows; 0 otherwise."""
        try:
            terms = [float(c) * math.sqrt(_product(key)) for key, c in self._coeffs.items()]
            total = math.fsum(terms)
        except OverflowError:
            return 0
        bound = (len(terms) + 4) * 2.0 ** -50 * sum(abs(t) for t in terms) + 1e-290
        if total > bound:
            return 1
        if total < -bound:
            return -1
        return 0

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar) and other._basis != self._basis:
            return self.is_rational and other.is_rational and self.constant == other.constant
        coerced = self._coerce(other) if isinstance(other, (Scalar, int, Fraction)) else NotImplemented
        if coerced is NotImplemented:
            return NotImplemented
        return self._coeffs == coerced._coeffs

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.constant)
        return hash((self._basis, frozenset(self._coeffs.items())))

    def _compare(self, other) -> int:
        other = self._coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare Scalar with {type(other).__name__}")
        return (self - other).sign

    def __lt__(self, other) -> bool:
        return self._compare(other) < 0

    def __le__(self, other) -> bool:
        return self._compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self._compare(other) > 0

    def __ge__(self, other) -> bool:
        return self._compare(other) >= 0

    # ------------------------------------------------------------------
    # Conversion
    # ------------------------------------------------------------------

    def commensurable(self, other: "Scalar") -> bool:
        """True when other is a rational multiple of self (both nonzero)."""
        other = self._coerce(other)
        if self.is_zero or other.is_zero or set(self._coeffs) != set(other._coeffs):
            return False
        ratios = {other._coeffs[k] / v for k, v in self._coeffs.items()}
        return len(ratios) == 1

    def __float__(self) -> float:
        return float(sum(float(c) * math.sqrt(_product(k)) for k, c in self._coeffs.items()))

    def sorted_terms(self) -> List[Tuple[List[int], Fraction]]:
        terms = [(sorted(k), v) for k, v in self._coeffs.items()]
        terms.sort(key=lambda item: (len(item[0]), item[0]))
        return terms

    def to_json(self) -> dict:
        return {
            "coeffs": [
                [radicands, f"{value.numerator}/{value.denominator}"]
                for radicands, value in self.sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, data, basis: Basis) -> "Scalar":
        """Decode ``{"coeffs": [[[d, ...], "p/q"], ...]}``; bare numbers and strings are accepted too."""
        if isinstance(data, (int, str)) and not isinstance(data, bool):
            return cls.parse(str(data), basis)
        if not isinstance(data, dict) or not isinstance(data.get("coeffs"), list):
            raise ParseError(f"malformed scalar: {data!r}")
        coeffs: Dict[Key, Fraction] = {}
        for term in data["coeffs"]:
            try:
                radicands, value = term
                key = frozenset(int(d) for d in radicands)
                coefficient = Fraction(str(value))
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"malformed scalar term {term!r}: {exc}") from exc
            if len(key) != len(radicands) or not key <= set(basis.radicands):
                raise ParseError(f"term {term!r} uses radicands outside basis {basis.to_list()}")
            coeffs[key] = coeffs.get(key, Fraction(0)) + coefficient
        return cls(basis, coeffs)

    _TERM = re.compile(
        r"([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(?:sqrt\(\s*(\d+)\s*\))?"
    )

    @classmethod
    def parse(cls, text: str, basis: Basis) -> "Scalar":
        """Parse expressions such as ``1/2``, ``1+sqrt(2)`` or ``3*sqrt(6) - 1/2``."""
        source = text.replace(" ", "")
        if not source:
            raise ParseError("empty scalar expression")
        result = basis.zero()
        position = 0
        while position < len(source):
            match = cls._TERM.match(source, position)
            if match is None or match.end() == position or not (match.group(2) or match.group(3)):
                raise ParseError(f"cannot parse scalar {text!r} at offset {position}")
            if match.group(0).endswith("*") and not match.group(3):
                raise ParseError(f"dangling operator in {text!r} at offset {match.end() - 1}")
            if position > 0 and not match.group(1):
                raise ParseError(f"missing operator in {text!r} at offset {position}")
            sign = -1 if match.group(1) == "-" else 1
            coefficient = Fraction(match.group(2)) if match.group(2) else Fraction(1)
            term = basis.rational(sign * coefficient)
            if match.group(3):
                term = term * basis.sqrt(int(match.group(3)))
            result = result + term
            position = match.end()
        return result

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for radicands, value in self.sorted_terms():
            if radicands:
                root = f"sqrt({_product(radicands)})"
                body = root if abs(value) == 1 else f"{abs(value)}*{root}"
            else:
                body = str(abs(value))
            parts.append(("-" if value < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for op, body in parts[1:]:
            text += f" {op} {body}"
        return text


# ---------------------------------------------------------------------------
# Functional API
# ---------------------------------------------------------------------------


def scalar_arith(op: str, a: Scalar, b: Scalar) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown scalar operation: {op!r}")


def scalar_sign(a: Scalar) -> int:
    return a.sign


def scalar_is_rational(a: Scalar) -> bool:
    return a.is_rational
