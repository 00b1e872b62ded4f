"""Tests for Laurent polynomials, the Kauffman bracket, Jones and linking numbers."""

import random
from fractions import Fraction

import pytest

from lipknot.invariants import (
    UNLINK_FACTOR,
    CrossingLimitError,
    LaurentPoly,
    PolynomialError,
    component_jones,
    gauss_linking_integral,
    gauss_linking_number,
    hopf_embedding,
    invariant_profile,
    jones,
    kauffman_bracket,
    kauffman_bracket_bruteforce,
    linking_number,
    pairwise_linking_numbers,
    split_embedding,
    torus_link_embedding,
    writhe,
)
from lipknot.link_core import (
    DiagramError,
    connected_sum,
    disjoint_union,
    mirror,
    parse_braid,
    parse_pd,
    random_braid_diagram,
    random_insertion,
    reidemeister,
    triangle_faces,
)
from lipknot.corpus import corpus, names

HOPF = "X[1,4,2,3] X[3,2,4,1]"
TREFOIL = "braid 2: s1 s1 s1"
FIGURE_EIGHT = "braid 3: s1 s2^-1 s1 s2^-1"
CINQUEFOIL = "braid 2: s1 s1 s1 s1 s1"
TORUS_2_4 = "braid 2: s1 s1 s1 s1"
LEFT_TREFOIL_PD = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"


def poly(mapping, variable="t"):
    return LaurentPoly.from_mapping({Fraction(e): c for e, c in mapping.items()}, variable)


# =============================================================================
# LAURENT POLYNOMIALS
# =============================================================================

class TestLaurentPoly:
    """Exact sparse arithmetic."""

    def test_arithmetic(self):
        a = poly({1: 1, -1: 1})
        assert a * a == poly({2: 1, 0: 2, -2: 1})
        assert (a - a).is_zero()
        assert a + 1 == poly({1: 1, 0: 1, -1: 1})

    def test_inverse_of_unit_monomial(self):
        m = LaurentPoly.monomial(-1, 3, "A")
        assert m ** -1 == LaurentPoly.monomial(-1, -3, "A")
        assert m * m ** -1 == LaurentPoly.one("A")

    def test_non_unit_has_no_inverse(self):
        with pytest.raises(PolynomialError):
            poly({1: 1, 0: 1}) ** -1

    def test_mixed_variables_rejected(self):
        with pytest.raises(PolynomialError):
            LaurentPoly.one("t") + LaurentPoly.one("A")

    def test_serialize_and_parse(self):
        p = poly({Fraction(-5, 2): -1, Fraction(-1, 2): -1, 3: 2})
        text = p.serialize()
        assert text == "-1*t^(-5/2) + -1*t^(-1/2) + 2*t^3"
        assert LaurentPoly.parse(text) == p

    def test_zero_serializes(self):
        assert LaurentPoly().serialize() == "0"
        assert LaurentPoly.parse("0").is_zero()

    def test_human_form(self):
        assert str(poly({1: 1, 3: 1, 4: -1})) == "t + t^3 - t^4"

    def test_inverted(self):
        assert poly({1: 1, 3: 1, 4: -1}).inverted() == poly({-1: 1, -3: 1, -4: -1})


# =============================================================================
# BRACKET AND JONES
# =============================================================================

class TestBracket:
    """State sums against known values and the brute-force oracle."""

    def test_hopf_bracket(self):
        assert kauffman_bracket(parse_pd(HOPF)) == poly({4: -1, -4: -1}, "A")

    def test_free_loops(self):
        assert kauffman_bracket(parse_pd("O")) == LaurentPoly.one("A")
        assert jones(parse_pd("O O")) == UNLINK_FACTOR

    def test_matches_bruteforce(self):
        for text in (TREFOIL, FIGURE_EIGHT, CINQUEFOIL):
            d = parse_braid(text)
            assert kauffman_bracket(d) == kauffman_bracket_bruteforce(d)

    def test_kink_multiplies_by_minus_a_cubed(self):
        d = parse_braid(TREFOIL)
        before = kauffman_bracket(d)
        after = kauffman_bracket(reidemeister(d, "R1+", 2, sign=1))
        factors = {LaurentPoly.monomial(-1, 3, "A"), LaurentPoly.monomial(-1, -3, "A")}
        assert any(after == before * f for f in factors)

    def test_crossing_limit(self):
        with pytest.raises(CrossingLimitError):
            kauffman_bracket(parse_braid(TREFOIL), crossing_limit=2)
        with pytest.raises(CrossingLimitError):
            kauffman_bracket_bruteforce(parse_braid(CINQUEFOIL), limit=4)


class TestJones:
    """Known Jones polynomials."""

    def test_unknot(self):
        assert jones(parse_pd("O")) == LaurentPoly.one()

    def test_trefoil(self):
        assert jones(parse_braid(TREFOIL)) == poly({1: 1, 3: 1, 4: -1})

    def test_figure_eight(self):
        assert jones(parse_braid(FIGURE_EIGHT)) == poly({-2: 1, -1: -1, 0: 1, 1: -1, 2: 1})

    def test_cinquefoil(self):
        assert jones(parse_braid(CINQUEFOIL)) == poly({2: 1, 4: 1, 5: -1, 6: 1, 7: -1})

    def test_hopf_links(self):
        half = Fraction(1, 2)
        assert jones(parse_pd(HOPF)) == poly({-half: -1, -5 * half: -1})
        assert jones(parse_braid("braid 2: s1 s1")) == poly({half: -1, 5 * half: -1})

    def test_mirror_inverts_variable(self):
        for text in (TREFOIL, FIGURE_EIGHT):
            d = parse_braid(text)
            assert jones(mirror(d)) == jones(d).inverted()

    def test_component_jones_of_hopf(self):
        assert component_jones(parse_pd(HOPF)) == [LaurentPoly.one(), LaurentPoly.one()]

    def test_left_trefoil_pd(self):
        assert jones(parse_pd(LEFT_TREFOIL_PD)) == poly({-4: -1, -3: 1, -1: 1})

    @pytest.mark.parametrize("text", ["X[1,2,2,3] X[3,4,4,1]", "braid 3: s1 s2", "braid 2: s1", "braid 3: s1^-1 s2"])
    def test_unknot_diagrams(self, text):
        d = parse_braid(text) if text.startswith("braid") else parse_pd(text)
        assert jones(d) == LaurentPoly.one()

    def test_every_kink_keeps_jones(self):
        d = parse_braid(FIGURE_EIGHT)
        expected = jones(d)
        for label in d.labels:
            for sign in (1, -1):
                for side in (1, -1):
                    kinked = reidemeister(d, "R1+", label, sign=sign, side=side)
                    assert jones(kinked) == expected
                    assert jones(reidemeister(kinked, "R1-")) == expected


# =============================================================================
# LINKING NUMBERS
# =============================================================================

class TestLinking:
    """Diagram counts and the Gauss integral oracle."""

    def test_hopf(self):
        d = parse_pd(HOPF)
        assert writhe(d) == -2
        assert linking_number(d, 0, 1) == -1

    def test_torus_link(self):
        assert pairwise_linking_numbers(parse_braid(TORUS_2_4)) == [2]

    def test_bad_component_indices(self):
        d = parse_pd(HOPF)
        with pytest.raises(DiagramError):
            linking_number(d, 0, 0)
        with pytest.raises(DiagramError):
            linking_number(d, 0, 5)

    def test_gauss_integral_agrees_with_diagrams(self):
        cases = (
            (hopf_embedding(), abs(linking_number(parse_pd(HOPF), 0, 1))),
            (split_embedding(), 0),
            (torus_link_embedding(), 2),
        )
        for (first, second), expected in cases:
            value = gauss_linking_integral(first, second)
            assert abs(abs(value) - expected) < 1e-3

    def test_gauss_linking_number_rounds(self):
        first, second = torus_link_embedding()
        assert abs(gauss_linking_number(first, second)) == 2
        assert gauss_linking_number(*split_embedding(), tolerance=1e-3) == 0

    def test_gauss_linking_number_rejects_non_integers(self):
        with pytest.raises(ValueError) as exc_info:
            gauss_linking_number(*hopf_embedding(), tolerance=-1.0)
        assert "not within" in str(exc_info.value)

    def test_gauss_integral_rejects_touching_curves(self):
        first, _ = hopf_embedding()
        with pytest.raises(ValueError):
            gauss_linking_integral(first, first)


# =============================================================================
# PROFILES
# =============================================================================

class TestProfile:
    """Comparison objects."""

    def test_hopf_profile(self):
        profile = invariant_profile(parse_pd(HOPF))
        assert profile.component_count == 2
        assert profile.linking_numbers == (-1,)
        assert profile.witnesses()["linking_numbers"] == (1,)
        assert "whole_jones" not in profile.witnesses()

    def test_mirrored_profile(self):
        d = parse_braid(TREFOIL)
        assert invariant_profile(d).mirrored() == invariant_profile(mirror(d))

    def test_chirality_visible_to_identity_comparison(self):
        d = parse_braid(TREFOIL)
        assert invariant_profile(d).witnesses() != invariant_profile(mirror(d)).witnesses()




# =============================================================================
# SURGERY
# =============================================================================

class TestSurgery:
    """Jones under sums and unions."""

    def test_connected_sum_multiplies(self):
        t, f = parse_braid(TREFOIL), parse_braid(FIGURE_EIGHT)
        assert jones(connected_sum(t, 0, f, 0)) == jones(t) * jones(f)

    def test_square_of_trefoil(self):
        t = parse_braid(TREFOIL)
        assert jones(connected_sum(t, 0, t, 0)) == jones(t) * jones(t)

    def test_disjoint_union_adds_unlink_factor(self):
        t, h = parse_braid(TREFOIL), parse_pd(HOPF)
        assert jones(disjoint_union(t, h)) == jones(t) * jones(h) * UNLINK_FACTOR


# =============================================================================
# PROPERTY SUITES
# =============================================================================

@pytest.mark.slow
class TestRandomDiagrams:
    """Seeded random diagrams."""

    def test_dp_matches_bruteforce(self):
        rng = random.Random(2024)
        for _ in range(100):
            d = random_braid_diagram(rng, max_strands=4, max_length=14)
            assert kauffman_bracket(d) == kauffman_bracket_bruteforce(d)

    def test_dp_matches_bruteforce_on_corpus(self):
        for name in names():
            if name == "ex3.pair":
                continue
            d = corpus(name).diagram
            if d.n_crossings <= 16:
                assert kauffman_bracket(d) == kauffman_bracket_bruteforce(d), name

    def test_invariants_survive_random_moves(self):
        rng = random.Random(11)
        for _ in range(200):
            d = random_braid_diagram(rng, max_length=4)
            profile = invariant_profile(d)
            moved = d
            for _ in range(10):
                moved, _ = random_insertion(moved, rng)
            assert invariant_profile(moved) == profile

    def test_bracket_exact_under_r2_and_r3(self):
        rng = random.Random(5)
        for _ in range(40):
            d = random_braid_diagram(rng, max_strands=4, max_length=8)
            before = kauffman_bracket(d)
            face = next((f for f in d.faces if len(set(f.edges)) >= 2), None)
            if face is not None:
                e1, e2 = sorted(set(face.edges))[:2]
                pushed = reidemeister(d, "R2+", (e1, e2), face=face.index)
                assert kauffman_bracket(pushed) == before
            if triangle_faces(d):
                assert kauffman_bracket(reidemeister(d, "R3")) == before
