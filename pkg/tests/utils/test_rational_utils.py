from decimal import Decimal
from fractions import Fraction

import pytest

from app.utils.rational_utils import (
    format_decimal,
    format_exact,
    format_percent,
    parse_rational,
    parse_rational_list,
)


@pytest.mark.parametrize(
    ("raw", "expected"),
    [
        (7, Fraction(7)),
        ("8.8", Fraction(44, 5)),
        (" 107/3 ", Fraction(107, 3)),
        (8.8, Fraction(44, 5)),
        (Decimal("0.25"), Fraction(1, 4)),
        (Fraction(2, 3), Fraction(2, 3)),
        ("-1.5", Fraction(-3, 2)),
    ],
)
def test_parse_rational(raw, expected):
    assert parse_rational(raw) == expected


@pytest.mark.parametrize(
    "raw",
    [True, False, float("inf"), float("nan"), Decimal("Infinity"), "", "   ", "abc", "1/0", None, [1]],
)
def test_parse_rational_rejects(raw):
    with pytest.raises(ValueError):
        parse_rational(raw)


def test_parse_rational_list():
    assert parse_rational_list(["1", 2, "1/2"]) == [Fraction(1), Fraction(2), Fraction(1, 2)]


@pytest.mark.parametrize(
    ("value", "expected"),
    [(Fraction(40), "40"), (Fraction(107, 3), "107/3"), (Fraction(-3, 2), "-3/2"), (Fraction(0), "0")],
)
def test_format_exact(value, expected):
    assert format_exact(value) == expected


@pytest.mark.parametrize(
    ("value", "digits", "expected"),
    [
        (Fraction(107, 3), 15, "35.6666666666667"),
        (Fraction(107, 3), 4, "35.67"),
        (Fraction(40), 15, "40"),
        (Fraction(1, 4), 15, "0.25"),
        (Fraction(193, 10), 15, "19.3"),
        (Fraction(0), 15, "0"),
    ],
)
def test_format_decimal(value, digits, expected):
    assert format_decimal(value, digits) == expected


def test_format_percent():
    assert format_percent(Fraction(34, 107)) == "31.78%"
    assert format_percent(Fraction(1, 8), places=1) == "12.5%"
    assert format_percent(Fraction(0)) == "0.00%"
