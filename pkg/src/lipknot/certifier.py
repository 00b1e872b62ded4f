"""One-sided non-equivalence tests for pairs of germs.

Two methods are run: comparing tangent cones (pinched links), and breaking
matching bridges and comparing the resulting links. Each produces a Verdict
that is either Distinguished, with a witness invariant, or Inconclusive.
Nothing here ever claims two germs are equivalent.

Every comparison is made both as-is and against the global mirror of the
second germ, since ambient homeomorphisms may reverse orientation.
"""

import hashlib
import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from lipknot import __version__
from lipknot.constants import DISTINGUISHED, INCONCLUSIVE, METHOD_BRIDGE_BREAK, METHOD_SAMPAIO
from lipknot.germ_model import (
    Germ,
    GermError,
    PinchedLink,
    break_bridge,
    germ_hash,
    tangent_cone,
)
from lipknot.invariants import LaurentPoly, Profile, component_jones, invariant_profile
from lipknot.validator import validate_document

logger = logging.getLogger(__name__)


class CertificationError(ValueError):
    """Raised when a test's preconditions fail or a certificate does not replay."""
    pass


# --- Pinched profiles ---

def _key(poly: LaurentPoly) -> str:
    return poly.serialize()


@dataclass(frozen=True)
class PinchedProfile:
    """Per-component Jones multiset plus which components touch which."""

    component_jones: Tuple[LaurentPoly, ...]
    incidences: Tuple[Tuple[LaurentPoly, LaurentPoly], ...]

    def mirrored(self) -> "PinchedProfile":
        return PinchedProfile(
            tuple(p.inverted() for p in self.component_jones),
            tuple((a.inverted(), b.inverted()) for a, b in self.incidences),
        )

    def witnesses(self) -> Dict[str, object]:
        return {
            "component_count": len(self.component_jones),
            "component_jones": tuple(sorted(_key(p) for p in self.component_jones)),
            "pinch_incidences": tuple(sorted(
                tuple(sorted((_key(a), _key(b)))) for a, b in self.incidences
            )),
        }

    def to_dict(self) -> Dict[str, Any]:
        values = self.witnesses()
        return {
            "component_count": values["component_count"],
            "component_jones": list(values["component_jones"]),
            "pinch_incidences": [list(pair) for pair in values["pinch_incidences"]],
        }


def pinched_profile(cone: PinchedLink) -> PinchedProfile:
    per_component = component_jones(cone.diagram)
    incidences = tuple((per_component[a], per_component[b]) for a, b in cone.incidences)
    return PinchedProfile(tuple(per_component), incidences)


# --- Verdicts and certificates ---

@dataclass(frozen=True)
class Witness:
    invariant: str
    left: Any
    right: Any

    def to_dict(self) -> Dict[str, Any]:
        return {"invariant": self.invariant, "left": _plain(self.left), "right": _plain(self.right)}


@dataclass(frozen=True)
class Verdict:
    kind: str
    method: str
    witness: Optional[Witness] = None
    note: str = ""
    mirror_checked: bool = True

    @property
    def distinguished(self) -> bool:
        return self.kind == DISTINGUISHED

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "method": self.method, "mirror_checked": self.mirror_checked}
        if self.witness is not None:
            data["witness"] = self.witness.to_dict()
        if self.note:
            data["note"] = self.note
        return data


@dataclass(frozen=True)
class TraceEntry:
    op: str
    args: Dict[str, Any]
    result_hash: str

    def to_dict(self) -> Dict[str, Any]:
        return {"op": self.op, "args": dict(self.args), "result_hash": self.result_hash}


@dataclass(frozen=True)
class Certificate:
    inputs: Tuple[Tuple[str, str], ...]
    verdicts: Tuple[Verdict, ...]
    trace: Tuple[TraceEntry, ...] = field(default=())

    @property
    def kind(self) -> str:
        return DISTINGUISHED if any(v.distinguished for v in self.verdicts) else INCONCLUSIVE

    def verdict(self, method: str) -> Optional[Verdict]:
        return next((v for v in self.verdicts if v.method == method), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "version": __version__,
            "inputs": [{"label": label, "hash": digest} for label, digest in self.inputs],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "trace": [t.to_dict() for t in self.trace],
        }


def _plain(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    return value


def _digest(payload: Any) -> str:
    return hashlib.sha256(json.dumps(_plain(payload), sort_keys=True).encode()).hexdigest()


def _cone_hash(cone: PinchedLink) -> str:
    document = cone.to_dict()
    document.pop("label")
    return _digest(document)


def compare(left, right) -> Optional[Witness]:
    """
    None when the profiles agree as-is or after mirroring right; otherwise
    the first invariant that tells them apart.
    """
    ours = left.witnesses()
    direct = right.witnesses()
    mirrored = right.mirrored().witnesses()
    if ours == direct or ours == mirrored:
        return None
    keys = list(ours)
    for key in keys:
        if ours.get(key) != direct.get(key) and ours.get(key) != mirrored.get(key):
            return Witness(key, ours.get(key), direct.get(key))
    key = next(k for k in keys if ours.get(k) != direct.get(k))
    return Witness(key, ours.get(key), direct.get(key))


# --- Methods ---

def sampaio_test(g1: Germ, g2: Germ, trace: Optional[List[TraceEntry]] = None) -> Verdict:
    """
    Distinguish germs whose tangent cones have different pinched links.

    Bi-Lipschitz ambient equivalence of germs implies topological ambient
    equivalence of their tangent cones, so a difference here is a proof.
    """
    profiles = []
    for g in (g1, g2):
        cone = tangent_cone(g)
        if trace is not None:
            trace.append(TraceEntry("tangent_cone", {"germ": g.label}, _cone_hash(cone)))
        profiles.append(pinched_profile(cone))

    witness = compare(profiles[0], profiles[1])
    if witness is None:
        return Verdict(INCONCLUSIVE, METHOD_SAMPAIO, note="tangent cones agree on every tested invariant")
    logger.info("Tangent cones of %s and %s differ in %s", g1.label, g2.label, witness.invariant)
    return Verdict(DISTINGUISHED, METHOD_SAMPAIO, witness)


def default_break_exponent(*germs: Germ) -> Fraction:
    return max(site.q for g in germs for site in g.bridges) + 1


def _classes(g: Germ) -> Dict[Tuple[Fraction, Fraction], List[str]]:
    found: Dict[Tuple[Fraction, Fraction], List[str]] = {}
    for site in g.bridges:
        found.setdefault((site.q, site.beta), []).append(site.id)
    return found


def _bijections(c1: Dict, c2: Dict):
    keys = sorted(c1)
    per_class = [
        [dict(zip(c1[key], image)) for image in itertools.permutations(c2[key])]
        for key in keys
    ]
    for choice in itertools.product(*per_class):
        mapping: Dict[str, str] = {}
        for part in choice:
            mapping.update(part)
        yield mapping


def bridge_break_test(
    g1: Germ,
    g2: Germ,
    p: Optional[Fraction] = None,
    trace: Optional[List[TraceEntry]] = None,
) -> Verdict:
    """
    Break matching bridges and compare the links that remain.

    A bi-Lipschitz ambient equivalence carries (q, beta)-bridges to
    (q, beta)-bridges, and breaking corresponding bridges keeps the germs
    equivalent. Every bijection between same-type sites is tried; the germs
    are Distinguished only if each bijection fails, both as-is and mirrored.

    Raises:
        CertificationError: a germ has no bridges, or p is not above every q.
    """
    for g in (g1, g2):
        if not g.bridges:
            raise CertificationError(f"Germ {g.label!r} has no bridge sites")
    floor = default_break_exponent(g1, g2) - 1
    if p is None:
        p = floor + 1
    elif Fraction(p) <= floor:
        raise CertificationError(f"Break exponent p={p} must exceed every bridge q (max q={floor})")
    p = Fraction(p)

    c1, c2 = _classes(g1), _classes(g2)
    shape1 = {key: len(ids) for key, ids in c1.items()}
    shape2 = {key: len(ids) for key, ids in c2.items()}
    if shape1 != shape2:
        left = sorted(f"q={q}, beta={b}" for (q, b), n in shape1.items() for _ in range(n))
        right = sorted(f"q={q}, beta={b}" for (q, b), n in shape2.items() for _ in range(n))
        return Verdict(
            DISTINGUISHED,
            METHOD_BRIDGE_BREAK,
            Witness("bridge_signature", left, right),
            note="bridge counts per (q, beta) differ; relies on the bridge mapping property applied per site",
        )

    def profile_of(g: Germ, site_ids: Sequence[str]) -> Profile:
        broken = g
        for site_id in site_ids:
            broken = break_bridge(broken, site_id, p)
        if trace is not None:
            trace.append(TraceEntry(
                "break_bridge", {"germ": g.label, "sites": list(site_ids), "p": str(p)}, germ_hash(broken)
            ))
        return invariant_profile(broken.diagram)

    all1 = profile_of(g1, [s.id for s in g1.bridges])
    all2 = profile_of(g2, [s.id for s in g2.bridges])
    single1 = {s.id: profile_of(g1, [s.id]) for s in g1.bridges} if len(g1.bridges) > 1 else {}
    single2 = {s.id: profile_of(g2, [s.id]) for s in g2.bridges} if len(g2.bridges) > 1 else {}

    first_witness: Optional[Witness] = None
    for mapping in _bijections(c1, c2):
        pairs = [(all1, all2)] + [(single1[a], single2[b]) for a, b in sorted(mapping.items()) if single1]
        for flip in (False, True):
            mismatch = None
            for left, right in pairs:
                target = right.mirrored() if flip else right
                if left.witnesses() != target.witnesses():
                    mismatch = (left, right)
                    break
            if mismatch is None:
                logger.debug("Bijection %s matches (mirrored=%s)", mapping, flip)
                return Verdict(INCONCLUSIVE, METHOD_BRIDGE_BREAK, note="broken links agree on every tested invariant")
            if first_witness is None:
                first_witness = compare(*mismatch) or _first_difference(*mismatch)

    logger.info("Broken links of %s and %s differ in %s", g1.label, g2.label, first_witness.invariant)
    return Verdict(DISTINGUISHED, METHOD_BRIDGE_BREAK, first_witness)


def _first_difference(left: Profile, right: Profile) -> Witness:
    ours, theirs = left.witnesses(), right.witnesses()
    key = next((k for k in ours if ours.get(k) != theirs.get(k)), "component_count")
    return Witness(key, ours.get(key), theirs.get(key))


def certify(g1: Germ, g2: Germ, p: Optional[Fraction] = None) -> Certificate:
    """Run the tangent-cone test, then the bridge test when both germs carry bridges."""
    trace: List[TraceEntry] = []
    verdicts = [sampaio_test(g1, g2, trace)]
    if g1.bridges and g2.bridges:
        verdicts.append(bridge_break_test(g1, g2, p, trace))
    elif g1.bridges or g2.bridges:
        logger.info("Only one germ carries bridges; skipping the bridge test")
    certificate = Certificate(
        inputs=((g1.label, germ_hash(g1)), (g2.label, germ_hash(g2))),
        verdicts=tuple(verdicts),
        trace=tuple(trace),
    )
    logger.info("Certificate for %s vs %s: %s", g1.label, g2.label, certificate.kind)
    return certificate


def replay_certificate(document: Dict[str, Any], g1: Germ, g2: Germ) -> Certificate:
    """
    Re-run certify on the recorded inputs and check it reproduces the document.

    Raises:
        CertificationError: schema violation, input hash mismatch, or any
            verdict, witness or trace hash that differs on replay.
    """
    result = validate_document(document, "certificate", "<certificate>")
    if not result.is_valid:
        raise CertificationError("Certificate violates schema:\n" + "\n".join(result.errors))
    recorded = [entry["hash"] for entry in document["inputs"]]
    actual = [germ_hash(g1), germ_hash(g2)]
    if recorded != actual:
        raise CertificationError("Input germs do not match the certificate's recorded hashes")

    p = None
    for entry in document["trace"]:
        if entry["op"] == "break_bridge":
            p = Fraction(entry["args"]["p"])
            break
    try:
        replayed = certify(g1, g2, p)
    except GermError as e:
        raise CertificationError(f"Replay failed: {e}")
    fresh = replayed.to_dict()
    for key in ("kind", "verdicts", "trace"):
        if fresh[key] != document[key]:
            raise CertificationError(f"Replay differs in {key!r}")
    return replayed
