"""Tests for germs: documents, bridge operations, tangent cones and universal germs."""

from fractions import Fraction

import pytest

from lipknot.corpus import corpus
from lipknot.germ_model import (
    BridgeError,
    Germ,
    GermError,
    PinchError,
    PinchPair,
    attach_knot,
    break_bridge,
    build_universal,
    germ_hash,
    insert_bridge,
    load_germ,
    locate_face,
    mirror_germ,
    plain_germ,
    save_germ,
    tangent_cone,
    twist_bridge,
)
from lipknot.invariants import LaurentPoly, component_jones, invariant_profile, jones
from lipknot.link_core import disjoint_union, parse_braid, parse_pd

KINKED_UNKNOT = "X[1,2,2,3] X[3,4,4,1]"
TREFOIL = "braid 2: s1 s1 s1"
FIGURE_EIGHT = "braid 3: s1 s2^-1 s1 s2^-1"


@pytest.fixture
def base():
    return plain_germ(parse_pd(KINKED_UNKNOT), label="base")


@pytest.fixture
def bridged(base):
    return insert_bridge(base, None, (1, 3), 3, 2, site_id="b1")


# =============================================================================
# DOCUMENTS
# =============================================================================

class TestDocuments:
    """save_germ / load_germ."""

    def test_round_trip(self, bridged):
        document = save_germ(bridged)
        assert document["ambient_dimension"] == 4
        assert document["bridges"][0]["q"] == "3"
        assert load_germ(document) == bridged

    def test_round_trip_after_surgery(self, bridged):
        twisted = twist_bridge(bridged, "b1", 2)
        document = save_germ(twisted)
        assert save_germ(load_germ(document)) == document
        assert germ_hash(load_germ(document)) == germ_hash(twisted)

    def test_minimal_germ(self):
        g = load_germ({"label": "u", "diagram": {"pd": "O", "free_loops": 0}})
        assert not g.is_decorated
        assert g.diagram.n_components == 1

    def test_schema_violation(self):
        with pytest.raises(GermError) as exc_info:
            load_germ({"label": "u"})
        assert exc_info.value.violations

    def test_unsupported_dimension(self):
        with pytest.raises(GermError) as exc_info:
            load_germ({"label": "u", "ambient_dimension": 3, "diagram": {"pd": "O", "free_loops": 0}})
        assert "unsupported dimension" in str(exc_info.value)

    def test_dangling_edge_reference(self, bridged):
        document = save_germ(bridged)
        document["bridges"][0]["edges"] = [1, 99]
        with pytest.raises(GermError) as exc_info:
            load_germ(document)
        assert any("dangling" in v for v in exc_info.value.violations)

    def test_beta_equal_to_q_rejected(self, bridged):
        document = save_germ(bridged)
        document["bridges"][0]["beta"] = "3"
        with pytest.raises(GermError):
            load_germ(document)

    def test_hash_ignores_label_and_history(self, bridged):
        renamed = Germ(bridged.diagram, bridged.bridges, bridged.pinches, label="other")
        assert germ_hash(renamed) == germ_hash(bridged)


# =============================================================================
# BRIDGES
# =============================================================================

class TestInsertBridge:
    """Bridges are decoration only."""

    def test_registers_site(self, base, bridged):
        assert bridged.site("b1").edges == (1, 3)
        assert bridged.diagram == base.diagram
        assert invariant_profile(bridged.diagram) == invariant_profile(base.diagram)
        assert bridged.history[-1]["op"] == "insert_bridge"

    def test_face_is_located_automatically(self, base, bridged):
        assert bridged.site("b1").face == locate_face(base.diagram, 1, 3)

    def test_exponents_checked(self, base):
        with pytest.raises(BridgeError):
            insert_bridge(base, None, (1, 3), 3, 3)
        with pytest.raises(BridgeError):
            insert_bridge(base, None, (1, 3), 3, 1)

    def test_edges_must_share_a_face(self):
        d = disjoint_union(parse_pd(KINKED_UNKNOT), parse_pd(KINKED_UNKNOT))
        g = plain_germ(d)
        e1, e2 = d.components[0][0], d.components[1][0]
        with pytest.raises(BridgeError):
            insert_bridge(g, None, (e1, e2), 3, 2)
        with pytest.raises(BridgeError) as exc_info:
            insert_bridge(g, 0, (e1, e2), 3, 2)
        assert "co-facial" in str(exc_info.value)

    def test_duplicate_site_id(self, bridged):
        with pytest.raises(BridgeError):
            insert_bridge(bridged, None, (1, 3), 5, 2, site_id="b1")


class TestBreakBridge:
    """Band smoothing at a bridge site."""

    def test_break_gives_two_unlinked_circles(self, bridged):
        broken = break_bridge(bridged, "b1")
        profile = invariant_profile(broken.diagram)
        assert profile.component_count == 2
        assert profile.linking_numbers == (0,)
        assert profile.component_jones == (LaurentPoly.one(), LaurentPoly.one())
        assert broken.bridges == ()
        assert broken.history[-1]["p"] == "4"

    def test_p_must_exceed_q(self, bridged):
        with pytest.raises(BridgeError) as exc_info:
            break_bridge(bridged, "b1", p=3)
        assert "p > q" in str(exc_info.value)

    def test_unknown_site(self, bridged):
        with pytest.raises(BridgeError):
            break_bridge(bridged, "nope")

    def test_parallel_strands_rejected(self, base):
        g = insert_bridge(base, None, (1, 2), 3, 2, site_id="b1")
        with pytest.raises(BridgeError) as exc_info:
            break_bridge(g, "b1")
        assert "parallel" in str(exc_info.value)

    def test_component_count_changes_by_one(self):
        t = plain_germ(parse_braid(TREFOIL))
        face, a, b = next(
            (f, a, b) for f in t.diagram.faces for a in f.edges for b in f.edges
            if a != b and set(f.sides_of(a)) & set(f.sides_of(b))
        )
        broken = break_bridge(insert_bridge(t, face.index, (a, b), 3, 2, site_id="s"), "s")
        assert abs(broken.diagram.n_components - 1) == 1


class TestTwistBridge:
    """Full twists of the bridge band."""

    @pytest.mark.parametrize("k", [1, -1, 2, -3])
    def test_twists_link_the_broken_circles(self, bridged, k):
        twisted = twist_bridge(bridged, "b1", k)
        assert twisted.diagram.n_crossings == bridged.diagram.n_crossings + 2 * abs(k)
        assert twisted.site("b1").q == 3
        broken = break_bridge(twisted, "b1")
        lk, = invariant_profile(broken.diagram).linking_numbers
        assert abs(lk) == abs(k)

    def test_twist_signs(self, bridged):
        twisted = twist_bridge(bridged, "b1", -2)
        new = twisted.diagram.crossings
        assert sum(1 for c in new if c.sign < 0) >= 4

    def test_zero_twist_rejected(self, bridged):
        with pytest.raises(BridgeError):
            twist_bridge(bridged, "b1", 0)

    def test_twist_keeps_knot_type(self, bridged):
        twisted = twist_bridge(bridged, "b1", 3)
        assert jones(twisted.diagram) == LaurentPoly.one()


# =============================================================================
# KNOTS AND MIRRORS
# =============================================================================

class TestAttachKnot:
    """Connected sum onto one component."""

    def test_attach_unknot_is_identity(self, bridged):
        attached = attach_knot(bridged, 0, parse_pd("O"))
        assert invariant_profile(attached.diagram) == invariant_profile(bridged.diagram)

    def test_attach_trefoil_multiplies_jones(self, bridged):
        trefoil = parse_braid(TREFOIL)
        attached = attach_knot(bridged, 0, trefoil)
        assert jones(attached.diagram) == jones(bridged.diagram) * jones(trefoil)
        assert len(attached.bridges) == 1

    def test_decorations_still_break(self, bridged):
        attached = attach_knot(bridged, 0, parse_braid(FIGURE_EIGHT))
        broken = break_bridge(attached, "b1")
        assert broken.diagram.n_components == 2

    def test_multi_component_knot_rejected(self, bridged):
        with pytest.raises(GermError):
            attach_knot(bridged, 0, parse_pd("X[1,4,2,3] X[3,2,4,1]"))

    def test_bad_component(self, bridged):
        with pytest.raises(GermError):
            attach_knot(bridged, 3, parse_braid(TREFOIL))


class TestMirror:
    def test_mirror_flips_every_crossing(self, bridged):
        mirrored = mirror_germ(bridged)
        assert sorted(c.sign for c in mirrored.diagram.crossings) == [1, 1]
        assert len(mirrored.bridges) == 1

    @pytest.mark.parametrize(
        "name",
        ["ex2.X1", "ex2.X2", "universal.unknot", "universal.trefoil", "universal.fig8", "universal.5_1"],
    )
    def test_decorations_follow_the_mirror(self, name):
        g = corpus(name)
        mirrored = mirror_germ(g)
        labels = set(mirrored.diagram.labels)
        assert [p.tord for p in mirrored.pinches] == [p.tord for p in g.pinches]
        assert all(set(p.arcs) <= labels for p in mirrored.pinches)
        assert len(mirrored.bridges) == len(g.bridges)
        assert save_germ(load_germ(save_germ(mirrored))) == save_germ(mirrored)

        cone, mirrored_cone = tangent_cone(g), tangent_cone(mirrored)
        assert mirrored_cone.diagram.n_components == cone.diagram.n_components
        assert len(mirrored_cone.incidences) == len(cone.incidences)
        assert sorted(map(str, component_jones(mirrored_cone.diagram))) == sorted(
            str(p.inverted()) for p in component_jones(cone.diagram)
        )


# =============================================================================
# TANGENT CONES
# =============================================================================

class TestTangentCone:
    """Pinches split components or record incidences."""

    def test_straight_cone_is_the_link(self):
        g = plain_germ(parse_braid(TREFOIL))
        cone = tangent_cone(g)
        assert cone.diagram.n_components == 1
        assert cone.incidences == ()
        assert jones(cone.diagram) == jones(g.diagram)

    def test_bridge_contributes_a_pinch(self, bridged):
        cone = tangent_cone(bridged)
        assert cone.diagram.n_components == 2
        assert cone.incidences == ((0, 1),)
        assert cone.tords == (Fraction(2),)

    def test_idempotent(self, bridged):
        cone = tangent_cone(bridged)
        again = tangent_cone(cone.as_germ())
        assert again.diagram.n_components == cone.diagram.n_components
        assert again.incidences == cone.incidences
        assert again.tords == cone.tords
        assert sorted(map(str, component_jones(again.diagram))) == sorted(map(str, component_jones(cone.diagram)))

    def test_components_are_sublinks(self, bridged):
        cone = tangent_cone(twist_bridge(bridged, "b1", 1))
        assert [c.n_components for c in cone.components] == [1, 1]

    def test_tord_must_exceed_one(self):
        with pytest.raises(PinchError):
            PinchPair((1, 3), Fraction(1))


# =============================================================================
# UNIVERSAL GERMS
# =============================================================================

class TestBuildUniversal:
    """A trivial knot whose tangent cone is two copies of K."""

    def test_unknot(self):
        g = build_universal(parse_pd("O"))
        assert g.diagram.n_components == 1
        assert len(g.pinches) == 1
        cone = tangent_cone(g)
        assert component_jones(cone.diagram) == [LaurentPoly.one(), LaurentPoly.one()]

    @pytest.mark.parametrize("text", [TREFOIL, FIGURE_EIGHT])
    def test_cone_is_two_copies(self, text):
        k = parse_braid(text)
        g = build_universal(k, Fraction(3, 2))
        assert g.diagram.n_components == 1
        assert jones(g.diagram) == LaurentPoly.one()
        cone = tangent_cone(g)
        assert cone.diagram.n_components == 2
        assert len(cone.incidences) == 1
        assert component_jones(cone.diagram) == [jones(k), jones(k)]

    def test_multi_component_rejected(self):
        with pytest.raises(GermError):
            build_universal(parse_pd("X[1,4,2,3] X[3,2,4,1]"))

    def test_beta_must_exceed_one(self):
        with pytest.raises(PinchError):
            build_universal(parse_braid(TREFOIL), 1)
