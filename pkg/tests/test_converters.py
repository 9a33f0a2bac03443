"""Tests for type converters."""

import pytest

from relu_sgd_lab.harness.converters import U64_MAX, format_float, parse_seed, safe_float, safe_int


class TestSafeFloat:
    """Tests for safe_float function."""

    def test_valid_string(self):
        """Test conversion of a numeric string with whitespace."""
        assert safe_float(" 0.25 ") == 0.25

    def test_integer(self):
        """Test conversion of an integer."""
        assert safe_float(3) == 3.0

    @pytest.mark.parametrize("value", [None, "", "   ", "abc", "nan", "inf", "-inf", True])
    def test_rejected(self, value):
        """Test that unusable and non-finite values return None."""
        assert safe_float(value) is None


class TestSafeInt:
    """Tests for safe_int function."""

    def test_valid_string(self):
        """Test conversion of valid integer string."""
        assert safe_int("42") == 42

    def test_integral_float_string(self):
        """Test conversion of a float string without fractional part."""
        assert safe_int("3.0") == 3

    @pytest.mark.parametrize("value", [str(2**53 + 1), str(U64_MAX), 2**53 + 1])
    def test_large_integers_exact(self, value):
        """Test that integers above 2^53 keep every digit."""
        assert safe_int(value) == int(value)

    @pytest.mark.parametrize("value", [None, "3.14", "invalid", "1e400"])
    def test_rejected(self, value):
        """Test that fractional or invalid values return None."""
        assert safe_int(value) is None


class TestParseSeed:
    """Tests for parse_seed function."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("0", 0),
            ("42", 42),
            ("0xff", 255),
            (" 7 ", 7),
            (str(U64_MAX), U64_MAX),
        ],
    )
    def test_valid(self, text, expected):
        """Test decimal and hexadecimal seeds."""
        assert parse_seed(text) == expected

    @pytest.mark.parametrize("text", ["-1", str(U64_MAX + 1), "seed", "1.5"])
    def test_invalid(self, text):
        """Test negative, oversized and non-integer seeds."""
        with pytest.raises(ValueError):
            parse_seed(text)


class TestFormatFloat:
    """Tests for format_float function."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            (None, ""),
            (0.1, "0.1"),
            (64.0, "64.0"),
            (1e-300, "1e-300"),
            (-0.502272, "-0.502272"),
        ],
    )
    def test_repr(self, value, expected):
        """Test shortest round-trip representation."""
        assert format_float(value) == expected

    def test_round_trip(self):
        """Test that the string parses back to the same float."""
        value = 1.0 / 77.0
        assert float(format_float(value)) == value
