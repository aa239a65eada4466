"""Property-based tests for exact scalar arithmetic.

Properties covered:
  Property 4 – Field operations are exact (commutativity, associativity, distributivity)
  Property 5 – Signs agree with a 50-digit decimal evaluation
  Property 6 – A scalar is zero exactly when its sign is zero
  Property 7 – Text and JSON encodings decode to the same value
"""
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest

from hypothesis import given, settings, strategies as st

from app.scalar import Basis, Scalar

BASIS = Basis.of(2, 3, 5)
KEYS = [frozenset(), frozenset({2}), frozenset({3}), frozenset({5}), frozenset({2, 3}), frozenset({2, 5}),
        frozenset({3, 5}), frozenset({2, 3, 5})]


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------

coefficients = st.fractions(min_value=-50, max_value=50, max_denominator=60)

scalars = st.dictionaries(st.sampled_from(KEYS), coefficients, max_size=4).map(
    lambda coeffs: Scalar(BASIS, coeffs)
)


def _decimal(value: Scalar) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 60
        total = Decimal(0)
        for key, c in value.coefficients.items():
            root = Decimal(1)
            for d in key:
                root *= Decimal(d).sqrt()
            total += Decimal(c.numerator) / Decimal(c.denominator) * root
        return total


# ---------------------------------------------------------------------------
# Property 4: Field operations are exact
# ---------------------------------------------------------------------------

@given(a=scalars, b=scalars, c=scalars)
@settings(max_examples=100)
@pytest.mark.property_test
def test_field_axioms(a, b, c):
    """Property 4: Ring identities hold exactly."""
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    assert (a + b) - b == a


@given(a=scalars, q=st.fractions(min_value=1, max_value=100, max_denominator=100))
@settings(max_examples=100)
@pytest.mark.property_test
def test_rational_division_inverts_multiplication(a, q):
    """Property 4 (partial): Division by a nonzero rational undoes multiplication."""
    assert (a * q) / q == a


# ---------------------------------------------------------------------------
# Property 5: Signs agree with decimal evaluation
# ---------------------------------------------------------------------------

@given(a=scalars)
@settings(max_examples=200)
@pytest.mark.property_test
def test_sign_matches_decimal(a):
    """Property 5: Whenever |value| exceeds 1e-40 the exact sign equals the decimal sign."""
    approx = _decimal(a)
    if abs(approx) > Decimal("1e-40"):
        assert a.sign == (1 if approx > 0 else -1)


@given(a=scalars, b=scalars)
@settings(max_examples=100)
@pytest.mark.property_test
def test_comparison_is_consistent(a, b):
    """Property 5 (partial): Exactly one of a < b, a == b, a > b holds."""
    assert [a < b, a == b, a > b].count(True) == 1


# ---------------------------------------------------------------------------
# Property 6: Zero iff sign zero
# ---------------------------------------------------------------------------

@given(a=scalars)
@settings(max_examples=100)
@pytest.mark.property_test
def test_zero_iff_sign_zero(a):
    """Property 6: sign(a) == 0 exactly when a has no nonzero coefficient."""
    assert (a.sign == 0) == a.is_zero
    assert (a * a).sign >= 0


# ---------------------------------------------------------------------------
# Property 7: Encodings decode to the same value
# ---------------------------------------------------------------------------

@given(a=scalars)
@settings(max_examples=100)
@pytest.mark.property_test
def test_text_and_json_agree(a):
    """Property 7: str() parses back, and JSON decodes back, to the same scalar."""
    assert Scalar.parse(str(a), BASIS) == a
    assert Scalar.from_json(a.to_json(), BASIS) == a


@given(a=scalars)
@settings(max_examples=100)
@pytest.mark.property_test
def test_equal_scalars_hash_equally(a):
    """Property 7 (partial): Rebuilt scalars are interchangeable dictionary keys."""
    rebuilt = Scalar.from_json(a.to_json(), BASIS)
    assert hash(rebuilt) == hash(a)
    assert {a: 1}[rebuilt] == 1


@given(q=st.fractions(min_value=-100, max_value=100, max_denominator=100))
@settings(max_examples=50)
@pytest.mark.property_test
def test_rational_scalars_behave_like_fractions(q):
    """Property 7 (partial): Rational scalars compare and hash like Fraction."""
    value = BASIS.rational(q)
    assert value == q
    assert hash(value) == hash(Fraction(q))
    assert value.is_rational
