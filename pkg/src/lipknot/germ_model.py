"""Surface germs in R^4 as decorated link diagrams.

A germ is carried by its link: a LinkDiagram plus metric decorations.
Bridge sites mark two co-facial strands carrying a (q, beta)-bridge; pinch
pairs mark two arcs whose tangency order exceeds 1, so they meet in the
tangent cone. Only break_bridge, twist_bridge and attach_knot change the
diagram; everything else is bookkeeping that is re-validated on every step.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from lipknot.arc_geometry import ArcError, as_rational
from lipknot.link_core import (
    DiagramError,
    LinkDiagram,
    _Builder,
    connected_sum_with_map,
    mirror,
    parse_pd,
    reidemeister,
    serialize_pd,
    sublink,
)
from lipknot.validator import validate_document

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int, str]

SUPPORTED_DIMENSION = 4
DEFAULT_UNIVERSAL_BETA = Fraction(3, 2)


class GermError(ValueError):
    """Raised when a germ or germ document is invalid."""

    def __init__(self, message: str, violations: Optional[List[str]] = None):
        self.violations = list(violations or [])
        if self.violations:
            message = message + ":\n" + "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(message)


class BridgeError(GermError):
    """Raised when a bridge operation's preconditions fail."""
    pass


class PinchError(GermError):
    """Raised for pinch pairs that cannot meet in the tangent cone."""
    pass


def _rational(value: Rational, name: str) -> Fraction:
    try:
        return as_rational(value)
    except ArcError as e:
        raise GermError(f"{name}: {e}")


@dataclass(frozen=True)
class BridgeSite:
    """A (q, beta)-bridge carried by edges e1, e2 along a shared face."""

    id: str
    edges: Tuple[int, int]
    face: int
    q: Fraction
    beta: Fraction
    p: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "id": self.id,
            "edges": list(self.edges),
            "face": self.face,
            "q": str(self.q),
            "beta": str(self.beta),
        }
        if self.p is not None:
            data["p"] = str(self.p)
        return data


@dataclass(frozen=True)
class PinchPair:
    """Two arc markers (edge labels) with tangency order tord > 1."""

    arcs: Tuple[int, int]
    tord: Fraction

    def __post_init__(self):
        if self.tord <= 1:
            raise PinchError(f"Pinch pair {self.arcs} has tord {self.tord}; pinching needs tord > 1")

    def to_dict(self) -> Dict[str, Any]:
        return {"arcs": list(self.arcs), "tord": str(self.tord)}


def _violations(g: "Germ") -> List[str]:
    d = g.diagram
    labels = set(d.endpoints)
    found = []
    seen_ids = set()
    for site in g.bridges:
        if site.id in seen_ids:
            found.append(f"bridge {site.id}: duplicate id")
        seen_ids.add(site.id)
        if not 1 < site.beta < site.q:
            found.append(f"bridge {site.id}: need 1 < beta < q, got q={site.q}, beta={site.beta}")
        if site.p is not None and site.p <= site.q:
            found.append(f"bridge {site.id}: need p > q, got p={site.p}, q={site.q}")
        e1, e2 = site.edges
        missing = [e for e in site.edges if e not in labels]
        if missing:
            found.append(f"bridge {site.id}: dangling edge reference {missing}")
            continue
        if e1 == e2:
            found.append(f"bridge {site.id}: edges must differ")
        if not 0 <= site.face < len(d.faces):
            found.append(f"bridge {site.id}: face {site.face} does not exist")
        elif not {e1, e2} <= set(d.faces[site.face].edges):
            found.append(f"bridge {site.id}: edges {e1}, {e2} do not both border face {site.face}")
    for pinch in g.pinches:
        missing = [e for e in pinch.arcs if e not in labels]
        if missing:
            found.append(f"pinch {pinch.arcs}: dangling edge reference {missing}")
        if pinch.arcs[0] == pinch.arcs[1]:
            found.append(f"pinch {pinch.arcs}: arcs must lie on different edges")
    return found


@dataclass(frozen=True)
class Germ:
    diagram: LinkDiagram
    bridges: Tuple[BridgeSite, ...] = ()
    pinches: Tuple[PinchPair, ...] = ()
    label: str = "germ"
    history: Tuple[Dict[str, Any], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bridges", tuple(self.bridges))
        object.__setattr__(self, "pinches", tuple(self.pinches))
        object.__setattr__(self, "history", tuple(self.history))
        found = _violations(self)
        if found:
            raise GermError(f"Invalid germ {self.label!r}", found)

    def site(self, site_id: str) -> BridgeSite:
        for site in self.bridges:
            if site.id == site_id:
                return site
        raise BridgeError(f"No bridge site {site_id!r} in germ {self.label!r}")

    @property
    def is_decorated(self) -> bool:
        return bool(self.bridges or self.pinches)


def _record(g: Germ, op: str, **args) -> Tuple[Dict[str, Any], ...]:
    entry = {"op": op}
    entry.update({k: (str(v) if isinstance(v, Fraction) else v) for k, v in args.items()})
    return g.history + (entry,)


# --- Documents ---

def save_germ(g: Germ) -> Dict[str, Any]:
    """Germ -> JSON-ready document."""
    crossings_only = LinkDiagram(g.diagram.crossings, 0)
    return {
        "label": g.label,
        "ambient_dimension": SUPPORTED_DIMENSION,
        "diagram": {"pd": serialize_pd(crossings_only), "free_loops": g.diagram.free_loops},
        "bridges": [site.to_dict() for site in g.bridges],
        "pinches": [pinch.to_dict() for pinch in g.pinches],
        "history": [dict(entry) for entry in g.history],
    }


def load_germ(document: Any, source: str = "<germ>") -> Germ:
    """
    Document -> Germ, checking the schema and every germ invariant.

    Raises:
        GermError: schema violation, unsupported dimension, dangling edge
            reference or exponent constraint violation.
    """
    result = validate_document(document, "germ", source)
    if not result.is_valid:
        raise GermError(f"{source} violates the germ schema", result.errors)

    dimension = document.get("ambient_dimension", SUPPORTED_DIMENSION)
    if dimension != SUPPORTED_DIMENSION:
        raise GermError(
            f"{source}: unsupported dimension {dimension}; only germs in R^{SUPPORTED_DIMENSION} are modeled"
        )

    pd_text = document["diagram"]["pd"]
    try:
        parsed = parse_pd(pd_text) if pd_text.strip() else LinkDiagram()
        diagram = LinkDiagram(parsed.crossings, parsed.free_loops + document["diagram"]["free_loops"])
    except DiagramError as e:
        raise GermError(f"{source}: bad diagram: {e}")

    bridges = []
    for entry in document.get("bridges", []):
        bridges.append(BridgeSite(
            id=entry["id"],
            edges=tuple(entry["edges"]),
            face=entry["face"],
            q=_rational(entry["q"], f"bridge {entry['id']} q"),
            beta=_rational(entry["beta"], f"bridge {entry['id']} beta"),
            p=_rational(entry["p"], f"bridge {entry['id']} p") if "p" in entry else None,
        ))
    pinches = [
        PinchPair(tuple(entry["arcs"]), _rational(entry["tord"], "pinch tord"))
        for entry in document.get("pinches", [])
    ]
    return Germ(diagram, tuple(bridges), tuple(pinches), document["label"], tuple(document.get("history", [])))


def germ_hash(g: Germ) -> str:
    """sha256 of the germ's content; label and history are excluded."""
    document = save_germ(g)
    content = {key: document[key] for key in ("diagram", "bridges", "pinches")}
    return hashlib.sha256(json.dumps(content, sort_keys=True).encode()).hexdigest()


def plain_germ(d: LinkDiagram, label: str = "germ") -> Germ:
    """The straight cone over a link: no decorations."""
    return Germ(d, label=label)


# --- Decoration bookkeeping ---

def _common_side(d: LinkDiagram, face_index: int, e1: int, e2: int) -> Optional[int]:
    face = d.faces[face_index]
    common = set(face.sides_of(e1)) & set(face.sides_of(e2))
    return max(common) if common else None


def locate_face(d: LinkDiagram, e1: int, e2: int) -> int:
    """A face bordered by both edges, preferring one where they run coherently."""
    shared = [f for f in d.faces if e1 in f.edges and e2 in f.edges]
    if not shared:
        raise BridgeError(f"Edges {e1} and {e2} share no face")
    for face in shared:
        if _common_side(d, face.index, e1, e2) is not None:
            return face.index
    return shared[0].index


def _coherent_anywhere(d: LinkDiagram, e1: int, e2: int) -> bool:
    return any(
        _common_side(d, f.index, e1, e2) is not None
        for f in d.faces if e1 in f.edges and e2 in f.edges
    )


def _carry(
    g: Germ,
    diagram: LinkDiagram,
    label_map: Dict[int, int],
    history: Tuple[Dict[str, Any], ...],
    drop: Optional[str] = None,
    retarget: Optional[Tuple[str, Tuple[int, int]]] = None,
    label: Optional[str] = None,
) -> Germ:
    """Move g's decorations onto a rebuilt diagram via an old -> new label map."""
    bridges = []
    for site in g.bridges:
        if site.id == drop:
            continue
        if retarget is not None and site.id == retarget[0]:
            e1, e2 = retarget[1]
        else:
            e1, e2 = (label_map[e] for e in site.edges)
        bridges.append(replace(site, edges=(e1, e2), face=locate_face(diagram, e1, e2)))
    pinches = tuple(
        PinchPair(tuple(label_map[x] for x in pinch.arcs), pinch.tord) for pinch in g.pinches
    )
    return Germ(diagram, tuple(bridges), pinches, label or g.label, history)


def _next_site_id(g: Germ) -> str:
    taken = {site.id for site in g.bridges}
    n = len(taken) + 1
    while f"b{n}" in taken:
        n += 1
    return f"b{n}"


# --- Operations ---

def insert_bridge(
    g: Germ,
    face: Optional[int],
    edge_pair: Sequence[int],
    q: Rational,
    beta: Rational,
    site_id: Optional[str] = None,
) -> Germ:
    """
    Register a (q, beta)-bridge on two co-facial edges.

    The diagram is unchanged; the bridge is metric decoration until it is
    broken or twisted. face=None picks a shared face automatically.
    """
    q = _rational(q, "q")
    beta = _rational(beta, "beta")
    if not 1 < beta < q:
        raise BridgeError(f"Invalid bridge exponents: need 1 < beta < q, got q={q}, beta={beta}")
    e1, e2 = edge_pair
    d = g.diagram
    for edge in (e1, e2):
        if edge not in d.endpoints:
            raise BridgeError(f"Edge {edge} is not in the diagram")
    if e1 == e2:
        raise BridgeError("Bridge edges must differ")
    if face is None:
        face = locate_face(d, e1, e2)
    if not 0 <= face < len(d.faces) or not {e1, e2} <= set(d.faces[face].edges):
        raise BridgeError(f"Edges {e1} and {e2} are not co-facial along face {face}")

    site_id = site_id or _next_site_id(g)
    if any(site.id == site_id for site in g.bridges):
        raise BridgeError(f"Bridge id {site_id!r} already used")
    site = BridgeSite(site_id, (e1, e2), face, q, beta)
    logger.debug("Bridge %s on edges %d, %d (face %d)", site_id, e1, e2, face)
    return replace(
        g,
        bridges=g.bridges + (site,),
        history=_record(g, "insert_bridge", site=site_id, edges=[e1, e2], face=face, q=q, beta=beta),
    )


def break_bridge(g: Germ, site_id: str, p: Optional[Rational] = None) -> Germ:
    """
    Replace a bridge by its broken form: an oriented band smoothing.

    Edges e1 (u1 -> v1) and e2 (u2 -> v2) become u1 -> v2 and u2 -> v1. The
    strands must run anti-parallel along the shared face.

    Raises:
        BridgeError: unknown site, p <= q, or parallel strands.
    """
    site = g.site(site_id)
    p = site.q + 1 if p is None else _rational(p, "p")
    if p <= site.q:
        raise BridgeError(f"Breaking needs p > q, got p={p}, q={site.q}")
    d = g.diagram
    e1, e2 = site.edges
    if _common_side(d, site.face, e1, e2) is None:
        raise BridgeError(
            f"Bridge {site_id}: edges {e1} and {e2} run parallel along face {site.face}; "
            "band smoothing would need an orientation reversal"
        )

    builder = _Builder()
    tails = builder.add_diagram(d)
    builder.smooth(tails[e1], tails[e2])
    diagram, label_of = builder.to_diagram()
    if abs(diagram.n_components - d.n_components) != 1:
        raise BridgeError(f"Bridge {site_id}: smoothing did not change the component count by one")

    label_map = {label: label_of[slot] for label, slot in tails.items()}
    history = _record(g, "break_bridge", site=site_id, q=site.q, beta=site.beta, p=p)
    logger.debug("Broke %s: %d -> %d components", site_id, d.n_components, diagram.n_components)
    return _carry(g, diagram, label_map, history, drop=site_id)


# Ring positions around a twist crossing, counterclockwise.
_BR, _TR, _TL, _BL = range(4)


def twist_bridge(g: Germ, site_id: str, k: int) -> Germ:
    """
    Give the bridge band k full twists (2|k| crossings of sign sgn(k)).

    Edge e2 is pulled into the shared face as a finger whose two legs wind
    around each other; the finger tip becomes the bridge's new second edge,
    so breaking afterwards links the two resulting circles k times.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k == 0:
        raise BridgeError(f"Twist count must be a non-zero integer, got {k!r}")
    site = g.site(site_id)
    d = g.diagram
    e1, e2 = site.edges
    side = _common_side(d, site.face, e1, e2)
    if side is None:
        side = d.faces[site.face].dart_of(e2)[1]
    sign = 1 if k > 0 else -1

    def pos(ring: int) -> int:
        return ring if side < 0 else 3 - ring

    builder = _Builder()
    tails = builder.add_diagram(d)
    start = tails[e2]
    finish = builder.link[start]

    count = 2 * abs(k)
    rings = []
    for i in range(1, count + 1):
        descending, ascending = ((_TR, _BL), (_BR, _TL)) if i % 2 else ((_TL, _BR), (_BL, _TR))
        rings.append(builder.place_signed(
            tuple(pos(r) for r in descending), tuple(pos(r) for r in ascending), sign
        ))

    def at(i: int, ring: int):
        return rings[i - 1][pos(ring)]

    builder.connect(start, at(1, _TR))
    for i in range(1, count):
        if i % 2:
            builder.connect(at(i, _BL), at(i + 1, _TL))
            builder.connect(at(i + 1, _TR), at(i, _BR))
        else:
            builder.connect(at(i, _BR), at(i + 1, _TR))
            builder.connect(at(i + 1, _TL), at(i, _BL))
    tip = at(count, _BR)
    builder.connect(tip, at(count, _BL))
    builder.connect(at(1, _TL), finish)

    diagram, label_of = builder.to_diagram()
    label_map = {label: label_of[slot] for label, slot in tails.items()}
    new_edges = (label_map[e1], label_of[tip])
    history = _record(g, "twist_bridge", site=site_id, k=k)
    logger.debug("Twisted %s by %d: %d crossings added", site_id, k, count)
    return _carry(g, diagram, label_map, history, retarget=(site_id, new_edges))


def attach_knot(g: Germ, component: int, knot: LinkDiagram, edge: Optional[int] = None) -> Germ:
    """Connected sum of a knot onto one component; decorations follow their edges."""
    if knot.n_components != 1:
        raise GermError(f"attach_knot needs a one-component knot, got {knot.n_components} components")
    d = g.diagram
    if not 0 <= component < d.n_components:
        raise GermError(f"Component index {component} out of range for {d.n_components} component(s)")
    comp = d.components[component]
    if edge is None and comp:
        used = {e for site in g.bridges for e in site.edges} | {e for pinch in g.pinches for e in pinch.arcs}
        free = [e for e in comp if e not in used]
        edge = min(free) if free else min(comp)
    try:
        diagram, label_map, _ = connected_sum_with_map(d, component, knot, 0, edge1=edge)
    except DiagramError as e:
        raise GermError(str(e))
    history = _record(g, "attach_knot", component=component, knot=serialize_pd(knot))
    return _carry(g, diagram, label_map, history)


def mirror_germ(g: Germ, label: Optional[str] = None) -> Germ:
    """The image of g under a reflection of R^4: every crossing flipped."""
    builder = _Builder()
    tails = builder.add_diagram(mirror(g.diagram))
    diagram, label_of = builder.to_diagram()
    label_map = {l: label_of[slot] for l, slot in tails.items()}
    return _carry(g, diagram, label_map, _record(g, "mirror"), label=label or f"mirror({g.label})")


# --- Tangent cone ---

@dataclass(frozen=True)
class PinchedLink:
    """
    The link of a tangent cone: a diagram whose components touch at points.

    incidences[i] = (a, b) says components a and b meet; arcs[i] are the edge
    labels carrying that contact and tords[i] its tangency order.
    """

    diagram: LinkDiagram
    incidences: Tuple[Tuple[int, int], ...] = ()
    arcs: Tuple[Tuple[int, int], ...] = ()
    tords: Tuple[Fraction, ...] = ()
    label: str = "cone"

    @property
    def components(self) -> Tuple[LinkDiagram, ...]:
        return tuple(sublink(self.diagram, [i]) for i in range(self.diagram.n_components))

    def as_germ(self) -> Germ:
        """The pinched link as an undecorated-bridge germ; its tangent cone is itself."""
        pinches = tuple(PinchPair(pair, tord) for pair, tord in zip(self.arcs, self.tords))
        return Germ(self.diagram, pinches=pinches, label=self.label)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "pd": serialize_pd(self.diagram),
            "components": self.diagram.n_components,
            "incidences": [
                {"components": list(pair), "arcs": list(arcs), "tord": str(tord)}
                for pair, arcs, tord in zip(self.incidences, self.arcs, self.tords)
            ],
        }


def _on_same_component(builder: _Builder, start, target) -> bool:
    slot = start
    while True:
        if slot == target:
            return True
        head = builder.link[slot]
        slot = (head[0], (head[1] + 2) % 4)
        if slot == start:
            return False


def tangent_cone(g: Germ) -> PinchedLink:
    """
    Collapse every pinch and bridge of g onto its tangent cone.

    Each pinch, and each bridge (as a pinch of order beta), makes its two arcs
    meet. Arcs on one component split it by an oriented smoothing; arcs on
    different components only record an incidence.

    Raises:
        PinchError: arcs on one component that do not run coherently along a
            shared face.
    """
    d = g.diagram
    pairs = [(pinch.arcs, pinch.tord) for pinch in g.pinches]
    pairs += [(site.edges, site.beta) for site in g.bridges]
    for arcs, tord in pairs:
        if tord <= 1:
            raise PinchError(f"Arcs {arcs} have tord {tord}; they do not meet in the tangent cone")

    builder = _Builder()
    tails = builder.add_diagram(d)
    for (a, b), tord in pairs:
        if _on_same_component(builder, tails[a], tails[b]):
            if not _coherent_anywhere(d, a, b):
                raise PinchError(f"Arcs on edges {a} and {b} share one component but no coherent face")
            builder.smooth(tails[a], tails[b])
    try:
        diagram, label_of = builder.to_diagram()
    except DiagramError as e:
        raise PinchError(f"Pinches of {g.label!r} cannot be realized together: {e}")

    contacts = []
    for (a, b), tord in pairs:
        la, lb = label_of[tails[a]], label_of[tails[b]]
        ca, cb = diagram.component_of(la), diagram.component_of(lb)
        if ca > cb:
            ca, cb, la, lb = cb, ca, lb, la
        contacts.append(((ca, cb), (la, lb), tord))
    contacts.sort()
    logger.debug("Tangent cone of %s: %d components, %d contacts", g.label, diagram.n_components, len(contacts))
    return PinchedLink(
        diagram,
        tuple(c[0] for c in contacts),
        tuple(c[1] for c in contacts),
        tuple(c[2] for c in contacts),
        label=f"cone({g.label})",
    )


# --- Universal construction ---

# Ring positions around a doubling-grid crossing, counterclockwise.
_GE, _GN, _GW, _GS = range(4)
_CW, _CCW = 0, 1


def build_universal(knot: LinkDiagram, beta: Rational = DEFAULT_UNIVERSAL_BETA, label: Optional[str] = None) -> Germ:
    """
    The germ whose tangent cone is knot pinched against its reverse.

    knot is doubled into two anti-parallel copies (blackboard framing), the
    copies are banded together at one edge and the band is marked as a pinch
    of order beta. Tangent cones of these germs realize every knot.
    """
    beta = _rational(beta, "beta")
    if beta <= 1:
        raise PinchError(f"Universal construction needs beta > 1, got {beta}")
    if knot.n_components != 1:
        raise GermError(f"Universal construction needs a knot, got {knot.n_components} components")
    if not knot.crossings:
        knot = reidemeister(knot, "R1+", "O")

    builder = _Builder()
    ends: Dict[Tuple[int, int, int], Any] = {}
    for ci, crossing in enumerate(knot.crossings):
        grid = {}
        for x in (-1, 1):
            for y in (-1, 1):
                vertical = (_GS, _GN) if x < 0 else (_GN, _GS)
                horizontal = (_GW, _GE) if y > 0 else (_GE, _GW)
                grid[(x, y)] = builder.place(vertical, horizontal, over=1)
        builder.connect(grid[(-1, -1)][_GN], grid[(-1, 1)][_GS])
        builder.connect(grid[(1, -1)][_GN], grid[(1, 1)][_GS])
        builder.connect(grid[(-1, 1)][_GE], grid[(1, 1)][_GW])
        builder.connect(grid[(-1, -1)][_GE], grid[(1, -1)][_GW])
        ends.update({
            (ci, 0, _CW): grid[(-1, -1)][_GS], (ci, 0, _CCW): grid[(1, -1)][_GS],
            (ci, 1, _CW): grid[(1, -1)][_GE], (ci, 1, _CCW): grid[(1, 1)][_GE],
            (ci, 2, _CW): grid[(1, 1)][_GN], (ci, 2, _CCW): grid[(-1, 1)][_GN],
            (ci, 3, _CW): grid[(-1, 1)][_GW], (ci, 3, _CCW): grid[(-1, -1)][_GW],
        })

    for (tc, ti), (hc, hi) in knot.endpoints.values():
        builder.connect(ends[(tc, ti, _CCW)], ends[(hc, hi, _CW)])
        builder.connect(ends[(tc, ti, _CW)], ends[(hc, hi, _CCW)])

    first = min(knot.endpoints)
    (tc, ti), (hc, hi) = knot.endpoints[first]
    left_tail, right_tail = ends[(tc, ti, _CCW)], ends[(hc, hi, _CCW)]
    builder.smooth(left_tail, right_tail)
    diagram, label_of = builder.to_diagram()
    if diagram.n_components != 1:
        raise GermError(f"Doubling produced {diagram.n_components} components; expected a knot")

    pinch = PinchPair((label_of[left_tail], label_of[right_tail]), beta)
    germ = Germ(diagram, pinches=(pinch,), label=label or "universal")
    return replace(germ, history=_record(germ, "build_universal", knot=serialize_pd(knot), beta=beta))
