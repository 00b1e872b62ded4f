"""Tests for the non-equivalence certifier."""

import copy
from fractions import Fraction

import pytest

from lipknot.certifier import (
    CertificationError,
    bridge_break_test,
    certify,
    compare,
    pinched_profile,
    replay_certificate,
    sampaio_test,
)
from lipknot.constants import DISTINGUISHED, INCONCLUSIVE, METHOD_BRIDGE_BREAK, METHOD_SAMPAIO
from lipknot.corpus import corpus
from lipknot.germ_model import attach_knot, insert_bridge, mirror_germ, plain_germ, tangent_cone
from lipknot.invariants import invariant_profile
from lipknot.link_core import parse_braid, parse_pd
from lipknot.validator import validate_document

TREFOIL = "braid 2: s1 s1 s1"


@pytest.fixture(scope="module")
def ex3():
    return corpus("ex3.pair")


# =============================================================================
# COMPARISON
# =============================================================================

class TestCompare:
    """Profiles agree as-is or after mirroring."""

    def test_chiral_knots_agree_up_to_mirror(self):
        d = parse_braid(TREFOIL)
        mirrored = mirror_germ(plain_germ(d)).diagram
        assert compare(invariant_profile(d), invariant_profile(mirrored)) is None

    def test_witness_names_first_difference(self):
        witness = compare(invariant_profile(parse_pd("O")), invariant_profile(parse_pd("O O")))
        assert witness.invariant == "component_count"
        assert (witness.left, witness.right) == (1, 2)

    def test_pinched_profile(self, ex3):
        profile = pinched_profile(tangent_cone(ex3[0]))
        values = profile.witnesses()
        assert values["component_count"] == 2
        assert len(values["pinch_incidences"]) == 1


# =============================================================================
# METHODS
# =============================================================================

class TestTangentConeMethod:
    """Tangent-cone comparison."""

    def test_pinched_trefoil_sums_distinguished(self):
        verdict = sampaio_test(corpus("ex2.X1"), corpus("ex2.X2"))
        assert verdict.kind == DISTINGUISHED
        assert verdict.method == METHOD_SAMPAIO
        assert verdict.witness.invariant == "component_jones"

    def test_bridge_pair_inconclusive(self, ex3):
        verdict = sampaio_test(*ex3)
        assert verdict.kind == INCONCLUSIVE
        assert verdict.witness is None
        assert verdict.note

    def test_universal_germs_distinguish_knots(self):
        verdict = sampaio_test(corpus("universal.trefoil"), corpus("universal.fig8"))
        assert verdict.distinguished


class TestBridgeBreak:
    """Breaking matched bridges."""

    def test_ex3_distinguished_by_linking(self, ex3):
        verdict = bridge_break_test(*ex3)
        assert verdict.kind == DISTINGUISHED
        assert verdict.method == METHOD_BRIDGE_BREAK
        assert verdict.witness.invariant == "linking_numbers"

    def test_same_germ_inconclusive(self, ex3):
        assert bridge_break_test(ex3[1], ex3[1]).kind == INCONCLUSIVE

    def test_mirror_inconclusive(self, ex3):
        assert bridge_break_test(ex3[1], mirror_germ(ex3[1])).kind == INCONCLUSIVE

    def test_needs_bridges(self, ex3):
        with pytest.raises(CertificationError) as exc_info:
            bridge_break_test(ex3[0], plain_germ(parse_pd("O")))
        assert "no bridge sites" in str(exc_info.value)

    def test_p_must_exceed_q(self, ex3):
        with pytest.raises(CertificationError):
            bridge_break_test(*ex3, p=Fraction(3))

    def test_larger_p_same_verdict(self, ex3):
        assert bridge_break_test(*ex3, p=Fraction(9, 2)).kind == DISTINGUISHED

    def test_bridge_signature_mismatch(self, ex3):
        x = ex3[0]
        other = insert_bridge(plain_germ(x.diagram, label="other"), None, (1, 3), 5, 2, site_id="b1")
        verdict = bridge_break_test(x, other)
        assert verdict.kind == DISTINGUISHED
        assert verdict.witness.invariant == "bridge_signature"

    @pytest.mark.parametrize("i,j", [(0, 1), (1, 2), (2, 5), (3, 4)])
    def test_twist_family(self, i, j):
        verdict = bridge_break_test(corpus(f"twist.{i}"), corpus(f"twist.{j}"))
        assert verdict.kind == DISTINGUISHED

    def test_opposite_twists_agree_up_to_mirror(self):
        verdict = bridge_break_test(corpus("twist.2"), corpus("twist.-2"))
        assert verdict.kind == INCONCLUSIVE

    def test_attached_knot_keeps_the_distinction(self, ex3):
        trefoil = parse_braid(TREFOIL)
        x, y = (attach_knot(g, 0, trefoil) for g in ex3)
        assert sampaio_test(x, y).kind == INCONCLUSIVE
        verdict = bridge_break_test(x, y)
        assert verdict.kind == DISTINGUISHED
        assert verdict.witness.invariant == "linking_numbers"


# =============================================================================
# CERTIFICATES
# =============================================================================

class TestCertify:
    """Combined certificates and replay."""

    def test_ex3_certificate(self, ex3):
        certificate = certify(*ex3)
        assert certificate.kind == DISTINGUISHED
        assert certificate.verdict(METHOD_SAMPAIO).kind == INCONCLUSIVE
        assert certificate.verdict(METHOD_BRIDGE_BREAK).kind == DISTINGUISHED
        assert [t.op for t in certificate.trace] == ["tangent_cone", "tangent_cone", "break_bridge", "break_bridge"]

    def test_only_cone_test_without_bridges(self):
        certificate = certify(corpus("ex2.X1"), corpus("ex2.X2"))
        assert [v.method for v in certificate.verdicts] == [METHOD_SAMPAIO]
        assert certificate.kind == DISTINGUISHED

    @pytest.mark.parametrize("name", ["ex3.X", "ex3.Y", "ex2.X2", "universal.trefoil"])
    def test_self_and_mirror_inconclusive(self, name):
        g = corpus(name)
        assert certify(g, g).kind == INCONCLUSIVE
        assert certify(g, mirror_germ(g)).kind == INCONCLUSIVE

    def test_symmetric_kind(self, ex3):
        assert certify(ex3[0], ex3[1]).kind == certify(ex3[1], ex3[0]).kind

    def test_document_matches_schema(self, ex3):
        document = certify(*ex3).to_dict()
        assert validate_document(document, "certificate").is_valid
        assert document["inputs"][0]["label"] == "ex3.X"

    def test_replay(self, ex3):
        document = certify(*ex3).to_dict()
        replayed = replay_certificate(document, *ex3)
        assert replayed.kind == DISTINGUISHED

    def test_replay_rejects_other_inputs(self, ex3):
        document = certify(*ex3).to_dict()
        with pytest.raises(CertificationError) as exc_info:
            replay_certificate(document, ex3[0], corpus("twist.2"))
        assert "recorded hashes" in str(exc_info.value)

    def test_replay_detects_tampering(self, ex3):
        document = copy.deepcopy(certify(*ex3).to_dict())
        document["verdicts"][1]["kind"] = INCONCLUSIVE
        with pytest.raises(CertificationError):
            replay_certificate(document, *ex3)

    def test_replay_rejects_malformed_document(self, ex3):
        with pytest.raises(CertificationError):
            replay_certificate({"kind": "Maybe"}, *ex3)
