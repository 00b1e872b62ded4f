"""Tests for Puiseux arcs and tangency orders."""

from fractions import Fraction

import pytest

from lipknot.arc_geometry import (
    ArcError,
    ArcSyntaxError,
    PuiseuxArc,
    TangencyOrder,
    as_rational,
    bridge_corner_arcs,
    format_arc,
    log_log_slope,
    parse_puiseux_arc,
    sample_arc,
    tord,
)


# =============================================================================
# PARSING
# =============================================================================

class TestParsing:
    """Arc text in, exact series out."""

    def test_parse_simple_arc(self):
        arc = parse_puiseux_arc("x=t; y=t^(3/2)")
        assert arc.coordinate("x") == ((Fraction(1), Fraction(1)),)
        assert arc.coordinate("y") == ((Fraction(3, 2), Fraction(1)),)
        assert arc.coordinate("z") == ()
        assert arc.dimension == 4

    def test_coefficients_and_signs(self):
        arc = parse_puiseux_arc("x=-t^2 + 1/2*t^3")
        assert arc.coordinate("x") == (
            (Fraction(2), Fraction(-1)),
            (Fraction(3), Fraction(1, 2)),
        )

    def test_explicit_zero_coordinate(self):
        arc = parse_puiseux_arc("x=t; z=0")
        assert arc.coordinate("z") == ()

    def test_default_truncation_is_top_exponent_plus_slack(self):
        arc = parse_puiseux_arc("x=t^2", slack=1)
        assert arc.truncation_order == Fraction(3)

    def test_declared_truncation(self):
        arc = parse_puiseux_arc("x=t + O(t^5)")
        assert arc.truncation_order == Fraction(5)

    def test_format_round_trip(self):
        text = "x=t^2 - t^3; y=-t^(3/2)"
        assert format_arc(parse_puiseux_arc(text)) == text

    def test_syntax_error_reports_position(self):
        """Garbage after the first coordinate is located exactly."""
        with pytest.raises(ArcSyntaxError) as exc_info:
            parse_puiseux_arc("x=t; q=t")
        assert exc_info.value.position == 5

    def test_duplicate_coordinate_rejected(self):
        with pytest.raises(ArcSyntaxError) as exc_info:
            parse_puiseux_arc("x=t; x=t^2")
        assert "twice" in str(exc_info.value)

    def test_w_not_available_in_dimension_three(self):
        with pytest.raises(ArcSyntaxError):
            parse_puiseux_arc("w=t", dimension=3)

    def test_non_positive_exponent_rejected(self):
        with pytest.raises(ArcError):
            PuiseuxArc.from_coordinates({"x": [(0, 1)]})

    def test_as_rational(self):
        assert as_rational("3/2") == Fraction(3, 2)
        assert as_rational(2) == Fraction(2)
        with pytest.raises(ArcError):
            as_rational("three")


# =============================================================================
# TANGENCY ORDER
# =============================================================================

class TestTangencyOrder:
    """tord is the least exponent of the difference."""

    def test_tord_of_distinct_arcs(self):
        a = parse_puiseux_arc("x=t; y=t^2")
        b = parse_puiseux_arc("x=t; y=-t^2")
        assert tord(a, b) == 2

    def test_tord_is_symmetric(self):
        a = parse_puiseux_arc("x=t; y=t^(3/2)")
        b = parse_puiseux_arc("x=t")
        assert tord(a, b) == tord(b, a) == Fraction(3, 2)

    def test_identical_arcs_are_truncation_limited(self):
        a = parse_puiseux_arc("x=t^2")
        result = tord(a, a)
        assert result.is_infinite
        assert result.truncation_limited
        assert result == float("inf")

    def test_difference_beyond_truncation_is_ignored(self):
        a = parse_puiseux_arc("x=t + O(t^2)")
        b = parse_puiseux_arc("x=t + t^3")
        assert tord(a, b).is_infinite

    def test_ultrametric(self):
        arcs = [
            parse_puiseux_arc("x=t; y=t^2"),
            parse_puiseux_arc("x=t; y=t^2 + t^(5/2)"),
            parse_puiseux_arc("x=t; y=-t^2"),
            parse_puiseux_arc("x=t; z=t^(3/2)"),
            *bridge_corner_arcs(3, 2),
        ]
        for a in arcs:
            for b in arcs:
                for c in arcs:
                    if a is b or b is c or a is c:
                        continue
                    assert not tord(a, c) < min(tord(a, b), tord(b, c))

    def test_ordering_against_numbers(self):
        assert TangencyOrder(Fraction(3, 2)) > 1
        assert TangencyOrder(Fraction(3, 2)) < TangencyOrder(None)

    def test_dimension_mismatch(self):
        a = parse_puiseux_arc("x=t", dimension=3)
        b = parse_puiseux_arc("x=t", dimension=4)
        with pytest.raises(ArcError) as exc_info:
            tord(a, b)
        assert "Dimension mismatch" in str(exc_info.value)


# =============================================================================
# BRIDGE CORNERS
# =============================================================================

class TestBridgeCorners:
    """The four boundary arcs of a (3, 2)-bridge."""

    def test_corner_pattern(self):
        m, n, m_prime, n_prime = bridge_corner_arcs(3, 2)
        assert tord(m, n) == 2
        assert tord(m_prime, n_prime) == 2
        assert tord(m, n_prime) == 2
        assert tord(n, m_prime) == 2
        assert tord(m, m_prime) == 3
        assert tord(n, n_prime) == 3

    def test_exponent_constraint(self):
        with pytest.raises(ArcError):
            bridge_corner_arcs(2, 2)
        with pytest.raises(ArcError):
            bridge_corner_arcs(3, 1)

    def test_numeric_slopes_within_five_percent(self):
        m, n, m_prime, _ = bridge_corner_arcs(3, 2)
        assert log_log_slope(m, n) == pytest.approx(2, rel=0.05)
        assert log_log_slope(m, m_prime) == pytest.approx(3, rel=0.05)

    def test_sample_arc_range(self):
        m = bridge_corner_arcs(3, 2).m
        assert sample_arc(m, 1.0) == (1.0, 1.0, 0.0, 0.0)
        with pytest.raises(ArcError):
            sample_arc(m, 0.0)
