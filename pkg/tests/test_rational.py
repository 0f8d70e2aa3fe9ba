from fractions import Fraction as F

import pytest

from nrb import InputError, decimal_approx, format_rational, parse_rational


def test_accepts_fraction_int_and_strings():
    assert parse_rational(F(3, 7)) == F(3, 7)
    assert parse_rational(5) == 5
    assert parse_rational("2/6") == F(1, 3)
    assert parse_rational("-4") == -4
    assert parse_rational(" 7/2 ") == F(7, 2)


def test_decimal_strings_convert_exactly():
    assert parse_rational("0.4") == F(2, 5)
    assert parse_rational("0.35") == F(7, 20)
    assert parse_rational("-1.25") == F(-5, 4)


@pytest.mark.parametrize("bad", [0.4, float("nan"), True, False, None,
                                 "1/0", "abc", "1e3/2", "", "3/",
                                 [1], {"a": 1}])
def test_rejects_non_rationals(bad):
    with pytest.raises(InputError):
        parse_rational(bad)


def test_format_round_trips():
    for v in [F(0), F(-3, 7), F(10), F(22, 7)]:
        assert parse_rational(format_rational(v)) == v


def test_decimal_approx_rounds_half_even():
    assert decimal_approx(F(2, 3)) == "0.666666666667"
    assert decimal_approx(F(1, 10)) == "0.100000000000"
    assert decimal_approx(F(1, 3), places=2) == "0.33"
    assert decimal_approx(F(-1, 8), places=2) == "-0.12"
    assert decimal_approx(F(3, 8), places=2) == "0.38"
