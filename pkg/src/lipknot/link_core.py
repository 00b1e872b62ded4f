"""Oriented link diagrams: PD codes, braid closures, faces and Reidemeister moves.

Conventions
-----------
A crossing lists its four edge labels counterclockwise, starting from the
incoming under-strand, so the under-strand runs slot 0 -> slot 2. The
over-strand enters at slot 3 on a positive crossing and at slot 1 on a
negative one. Faces are traced so that the face lies to the right of travel.

Diagrams are immutable. Surgery goes through a private slot-graph builder
and comes back out as a freshly labeled diagram: labels run 1, 2, 3, ...
along each component in its direction of travel.
"""

import logging
import random
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

Slot = Tuple[int, int]  # (crossing index, slot index)
Component = Tuple[int, ...]  # edge labels in travel order; () is a free loop

MOVES = ("R1+", "R1-", "R2+", "R2-", "R3")


class DiagramError(ValueError):
    """Raised when a diagram violates a structural invariant."""

    def __init__(self, message: str, violations: Optional[List[str]] = None):
        self.violations = list(violations or [])
        if self.violations:
            message = message + ":\n" + "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(message)


class PDSyntaxError(DiagramError):
    """Raised when PD or braid text cannot be tokenized."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ReidemeisterError(DiagramError):
    """Raised when a move's pattern is absent at the requested location."""
    pass


@dataclass(frozen=True)
class Crossing:
    """Four edge labels counterclockwise from the incoming under-strand, plus sign."""

    labels: Tuple[int, int, int, int]
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != 4:
            raise DiagramError(f"Crossing needs 4 labels, got {len(self.labels)}")
        if self.sign not in (1, -1):
            raise DiagramError(f"Crossing sign must be +1 or -1, got {self.sign}")

    @property
    def over_in(self) -> int:
        return 3 if self.sign > 0 else 1

    @property
    def over_out(self) -> int:
        return 1 if self.sign > 0 else 3

    def is_incoming(self, slot: int) -> bool:
        return slot == 0 or slot == self.over_in

    def __str__(self) -> str:
        return "X[{},{},{},{}]".format(*self.labels)


@dataclass(frozen=True)
class Face:
    """A face of the projection: (edge, side) incidences in boundary order.

    side is +1 when the boundary runs along the edge's orientation (the face
    is then on the edge's right) and -1 otherwise. Faces of free loops carry
    no incidences and record the loop index instead.
    """

    index: int
    incidences: Tuple[Tuple[int, int], ...]
    darts: Tuple[Slot, ...] = ()
    loop: Optional[int] = None

    @property
    def edges(self) -> Tuple[int, ...]:
        return tuple(label for label, _ in self.incidences)

    def sides_of(self, label: int) -> Tuple[int, ...]:
        return tuple(side for edge, side in self.incidences if edge == label)

    def dart_of(self, label: int) -> Tuple[Slot, int]:
        """First dart of this face running along the given edge, with its side."""
        for slot, (edge, side) in zip(self.darts, self.incidences):
            if edge == label:
                return slot, side
        raise DiagramError(f"Edge {label} does not border face {self.index}")


@dataclass(frozen=True)
class LinkDiagram:
    """An oriented link diagram: crossings plus crossing-free circles."""

    crossings: Tuple[Crossing, ...] = ()
    free_loops: int = 0

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        if self.free_loops < 0:
            raise DiagramError(f"free_loops must be non-negative, got {self.free_loops}")
        violations = _structure_violations(self)
        if violations:
            raise DiagramError("Invalid link diagram", violations)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def labels(self) -> List[int]:
        return sorted(self.endpoints)

    @cached_property
    def endpoints(self) -> Dict[int, Tuple[Slot, Slot]]:
        """label -> (tail slot, head slot)."""
        tails: Dict[int, Slot] = {}
        heads: Dict[int, Slot] = {}
        for ci, crossing in enumerate(self.crossings):
            for i, label in enumerate(crossing.labels):
                (heads if crossing.is_incoming(i) else tails)[label] = (ci, i)
        return {label: (tails[label], heads[label]) for label in tails}

    def label_at(self, slot: Slot) -> int:
        return self.crossings[slot[0]].labels[slot[1]]

    def is_outgoing(self, slot: Slot) -> bool:
        return not self.crossings[slot[0]].is_incoming(slot[1])

    def is_over(self, slot: Slot) -> bool:
        return slot[1] % 2 == 1

    def partner(self, slot: Slot) -> Slot:
        tail, head = self.endpoints[self.label_at(slot)]
        return head if slot == tail else tail

    @cached_property
    def components(self) -> Tuple[Component, ...]:
        comps: List[Component] = []
        seen = set()
        for start in sorted(self.endpoints):
            if start in seen:
                continue
            comp = []
            label = start
            while label not in seen:
                seen.add(label)
                comp.append(label)
                ci, i = self.endpoints[label][1]
                label = self.crossings[ci].labels[(i + 2) % 4]
            comps.append(tuple(comp))
        comps.extend(() for _ in range(self.free_loops))
        return tuple(comps)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component_of(self, label: int) -> int:
        for index, comp in enumerate(self.components):
            if label in comp:
                return index
        raise DiagramError(f"Unknown edge label {label}")

    def strand_components(self, ci: int) -> Tuple[int, int]:
        """(under component, over component) at crossing ci."""
        crossing = self.crossings[ci]
        return (
            self.component_of(crossing.labels[0]),
            self.component_of(crossing.labels[crossing.over_in]),
        )

    @cached_property
    def faces(self) -> Tuple[Face, ...]:
        found: List[Face] = []
        seen = set()
        for ci in range(len(self.crossings)):
            for i in range(4):
                start = (ci, i)
                if start in seen:
                    continue
                darts = []
                slot = start
                while slot not in seen:
                    seen.add(slot)
                    darts.append(slot)
                    y, j = self.partner(slot)
                    slot = (y, (j + 1) % 4)
                incidences = tuple(
                    (self.label_at(s), 1 if self.is_outgoing(s) else -1) for s in darts
                )
                found.append(Face(len(found), incidences, tuple(darts)))
        for loop in range(self.free_loops):
            found.append(Face(len(found), (), (), loop=loop))
            found.append(Face(len(found), (), (), loop=loop))
        return tuple(found)

    def pieces(self) -> List[List[int]]:
        """Crossing indices grouped by connected piece of the projection."""
        parent = list(range(len(self.crossings)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for tail, head in self.endpoints.values():
            parent[find(tail[0])] = find(head[0])
        groups: Dict[int, List[int]] = {}
        for ci in range(len(self.crossings)):
            groups.setdefault(find(ci), []).append(ci)
        return sorted(groups.values())

    def __str__(self) -> str:
        return serialize_pd(self)


def _structure_violations(d: LinkDiagram) -> List[str]:
    """Every broken invariant of d, or [] when d is a valid planar diagram."""
    counts: Counter = Counter(label for c in d.crossings for label in c.labels)
    violations = [
        f"label {label} appears {count} time(s), expected 2"
        for label, count in sorted(counts.items()) if count != 2
    ]
    if violations:
        return violations

    ends: Dict[int, List[bool]] = {}
    for crossing in d.crossings:
        for i, label in enumerate(crossing.labels):
            ends.setdefault(label, []).append(crossing.is_incoming(i))
    violations = [
        f"edge {label} has {'two heads' if all(flags) else 'two tails'}"
        for label, flags in sorted(ends.items()) if flags[0] == flags[1]
    ]
    if violations:
        return violations

    piece_of = {}
    for index, piece in enumerate(d.pieces()):
        for ci in piece:
            piece_of[ci] = index
    face_counts: Counter = Counter(
        piece_of[face.darts[0][0]] for face in d.faces if face.darts
    )
    for index, piece in enumerate(d.pieces()):
        expected = len(piece) + 2
        if face_counts[index] != expected:
            violations.append(
                f"non-planar incidence: piece with {len(piece)} crossing(s) traces "
                f"{face_counts[index]} faces, Euler count needs {expected}"
            )
    return violations


class _Builder:
    """Mutable slot graph used for surgery.

    Crossings are keyed by integer ids; link pairs up the two slots of every
    edge. Orientation is implicit in over_in.
    """

    def __init__(self):
        self.over_in: Dict[int, int] = {}
        self.link: Dict[Slot, Slot] = {}
        self.free_loops = 0
        self._next_id = 0

    def add_diagram(self, d: LinkDiagram) -> Dict[int, Slot]:
        """Copy d in; returns edge label -> tail slot."""
        base = self._next_id
        for ci, crossing in enumerate(d.crossings):
            self.over_in[base + ci] = crossing.over_in
        self._next_id += len(d.crossings)
        tails = {}
        for label, (tail, head) in d.endpoints.items():
            t = (base + tail[0], tail[1])
            self.connect(t, (base + head[0], head[1]))
            tails[label] = t
        self.free_loops += d.free_loops
        return tails

    def new_crossing(self, over_in: int) -> int:
        cid = self._next_id
        self._next_id += 1
        self.over_in[cid] = over_in
        return cid

    def place(self, first: Tuple[int, int], second: Tuple[int, int], over: int) -> Dict[int, Slot]:
        """
        Add a crossing described by ring positions.

        Ring positions 0..3 run counterclockwise around the new crossing. Each
        strand is given as (entry, exit) positions, which must be opposite;
        over picks which strand (0 or 1) passes over. Returns position -> slot.
        """
        strands = (first, second)
        for entry, exit_ in strands:
            if (entry - exit_) % 4 != 2:
                raise DiagramError(f"Strand ends {entry},{exit_} are not opposite")
        under_in = strands[1 - over][0]
        cid = self.new_crossing((strands[over][0] - under_in) % 4)
        return {r: (cid, (r - under_in) % 4) for r in range(4)}

    def place_signed(self, first: Tuple[int, int], second: Tuple[int, int], sign: int) -> Dict[int, Slot]:
        """Like place, choosing the over strand that gives the crossing this sign."""
        wanted = 3 if sign > 0 else 1
        strands = (first, second)
        for over in (0, 1):
            if (strands[over][0] - strands[1 - over][0]) % 4 == wanted:
                return self.place(first, second, over)
        raise DiagramError(f"Strands {first}, {second} cannot form a crossing")

    def connect(self, a: Slot, b: Slot) -> None:
        self.link[a] = b
        self.link[b] = a

    def is_out(self, slot: Slot) -> bool:
        cid, i = slot
        return i == 2 or i == (self.over_in[cid] + 2) % 4

    def smooth(self, tail1: Slot, tail2: Slot) -> None:
        """Oriented band move: edges u1->v1 and u2->v2 become u1->v2 and u2->v1."""
        head1, head2 = self.link[tail1], self.link[tail2]
        self.connect(tail1, head2)
        self.connect(tail2, head1)

    def remove_crossing(self, cid: int) -> None:
        """Delete a crossing, letting both strands pass straight through."""
        oi = self.over_in.pop(cid)
        for a, b in ((0, 2), (oi, (oi + 2) % 4)):
            in_slot, out_slot = (cid, a), (cid, b)
            upstream = self.link.pop(in_slot)
            downstream = self.link.pop(out_slot)
            if upstream == out_slot:
                self.free_loops += 1
            else:
                self.connect(upstream, downstream)

    def to_diagram(self) -> Tuple[LinkDiagram, Dict[Slot, int]]:
        """Freeze into a canonically labeled diagram; returns (diagram, tail slot -> label)."""
        label_of: Dict[Slot, int] = {}
        comps: List[List[Slot]] = []
        for start in sorted(s for s in self.link if self.is_out(s)):
            if start in label_of:
                continue
            comp = []
            slot = start
            while slot not in label_of:
                label_of[slot] = len(label_of) + 1
                comp.append(slot)
                head = self.link[slot]
                slot = (head[0], (head[1] + 2) % 4)
            comps.append(comp)

        cids = sorted(self.over_in)
        crossings, order = self._freeze(cids, label_of)
        rank = {cids[k]: r for r, k in enumerate(order)}

        # Purely-over two-edge components are labeled so that the lower label
        # enters the first listed crossing; parse_pd reads orientation back that way.
        swapped = False
        for comp in comps:
            if len(comp) != 2 or not all(s[1] % 2 == 1 for s in comp):
                continue
            lo, hi = comp
            if rank[self.link[hi][0]] < rank[self.link[lo][0]]:
                label_of[lo], label_of[hi] = label_of[hi], label_of[lo]
                swapped = True
        if swapped:
            crossings, order = self._freeze(cids, label_of)

        diagram = LinkDiagram(tuple(crossings[k] for k in order), self.free_loops)
        return diagram, label_of

    def _freeze(self, cids: List[int], label_of: Dict[Slot, int]):
        at = dict(label_of)
        at.update({self.link[t]: label for t, label in label_of.items()})
        crossings = [
            Crossing(tuple(at[(cid, i)] for i in range(4)), 1 if self.over_in[cid] == 3 else -1)
            for cid in cids
        ]
        order = sorted(range(len(crossings)), key=lambda k: (min(crossings[k].labels), crossings[k].labels))
        return crossings, order


def relabel(d: LinkDiagram) -> LinkDiagram:
    """Canonical relabeling: consecutive labels along components, sorted crossings."""
    builder = _Builder()
    builder.add_diagram(d)
    return builder.to_diagram()[0]


# --- Parsing and serialization ---

_PD_TOKEN = re.compile(
    r"(?:X\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]|(O)(?:\s*\[\s*\])?)\s*,?\s*"
)
_PD_WRAPPER = re.compile(r"^\s*PD\s*\[(.*)\]\s*$", re.S)


def _orient(quads: List[Tuple[int, int, int, int]]) -> List[int]:
    """Choose the over-strand entry slot of every crossing from edge continuity."""
    occurrences: Dict[int, List[Slot]] = {}
    for ci, quad in enumerate(quads):
        for i, label in enumerate(quad):
            occurrences.setdefault(label, []).append((ci, i))
    over_in: List[Optional[int]] = [None] * len(quads)

    def incoming(slot: Slot) -> Optional[bool]:
        ci, i = slot
        if i % 2 == 0:
            return i == 0
        if over_in[ci] is None:
            return None
        return i == over_in[ci]

    def settle(slot: Slot, is_in: bool) -> bool:
        ci, i = slot
        wanted = i if is_in else (i + 2) % 4
        if over_in[ci] is None:
            over_in[ci] = wanted
            return True
        if over_in[ci] != wanted:
            raise DiagramError(f"Inconsistent orientation at crossing {ci}")
        return False

    def propagate() -> None:
        changed = True
        while changed:
            changed = False
            for label, (s, t) in occurrences.items():
                a, b = incoming(s), incoming(t)
                if a is None and b is not None:
                    changed |= settle(s, not b)
                elif b is None and a is not None:
                    changed |= settle(t, not a)
                elif a is not None and a == b:
                    raise DiagramError(f"Edge {label} has {'two heads' if a else 'two tails'}")

    propagate()
    for ci, quad in enumerate(quads):
        if over_in[ci] is None:
            # Component that never passes under: labels are read as increasing.
            u, v = quad[1], quad[3]
            over_in[ci] = 1 if (v == u + 1 or u > v + 1) else 3
            logger.debug("Crossing %d orientation chosen by label order", ci)
            propagate()
    return over_in


def parse_pd(text: str) -> LinkDiagram:
    """
    Parse PD text such as "X[1,4,2,3] X[3,2,4,1]" with optional "O" free loops.

    Crossing signs are derived from the orientation implied by the under
    strands. A component that never passes under is oriented by increasing
    labels.

    Raises:
        PDSyntaxError: on malformed text.
        DiagramError: on bad label counts, inconsistent orientation or non-planar data.
    """
    body, offset = text, 0
    wrapped = _PD_WRAPPER.match(text)
    if wrapped:
        body, offset = wrapped.group(1), wrapped.start(1)

    quads: List[Tuple[int, int, int, int]] = []
    loops = 0
    pos = 0
    while pos < len(body) and body[pos].isspace():
        pos += 1
    while pos < len(body):
        m = _PD_TOKEN.match(body, pos)
        if not m:
            raise PDSyntaxError("Expected X[a,b,c,d] or O", offset + pos)
        if m.group(5):
            loops += 1
        else:
            quads.append(tuple(int(m.group(k)) for k in range(1, 5)))
        pos = m.end()
    if not quads and not loops:
        raise PDSyntaxError("Empty PD code", offset)

    counts: Counter = Counter(label for quad in quads for label in quad)
    bad = [f"label {label} appears {n} time(s), expected 2" for label, n in sorted(counts.items()) if n != 2]
    if bad:
        raise DiagramError("Invalid PD code", bad)

    over_in = _orient(quads)
    crossings = [Crossing(quad, 1 if oi == 3 else -1) for quad, oi in zip(quads, over_in)]
    diagram = LinkDiagram(tuple(crossings), loops)
    logger.debug("Parsed PD with %d crossings, %d components", diagram.n_crossings, diagram.n_components)
    return diagram


_BRAID_RE = re.compile(r"^\s*braid\s+(\d+)\s*:(.*)$", re.S | re.I)
_GENERATOR_RE = re.compile(r"s(\d+)(\^\s*(?:-1|\(\s*-1\s*\))|\^\s*1)?$")

# Ring positions around a braid crossing, counterclockwise.
_SE, _NE, _NW, _SW = range(4)


def parse_braid(text: str) -> LinkDiagram:
    """
    Closure of a braid word, e.g. "braid 3: s1 s2^-1 s1 s2^-1".

    Strands run left to right and are numbered from the top; s_i crosses
    strands i and i+1 positively. Strands never touched by the word close up
    into free loops.
    """
    m = _BRAID_RE.match(text)
    if not m:
        raise PDSyntaxError("Expected 'braid <n>: <word>'", 0)
    n = int(m.group(1))
    if n < 1:
        raise DiagramError("Braid needs at least one strand")

    builder = _Builder()
    first_head: List[Optional[Slot]] = [None] * n
    current_tail: List[Optional[Slot]] = [None] * n

    for token in re.finditer(r"\S+", m.group(2)):
        g = _GENERATOR_RE.match(token.group())
        if not g:
            raise PDSyntaxError(f"Bad generator {token.group()!r}", m.start(2) + token.start())
        index = int(g.group(1))
        if not 1 <= index < n:
            raise DiagramError(f"Generator s{index} needs index in 1..{n - 1} for {n} strands")
        positive = not (g.group(2) and "-1" in g.group(2))
        ring = builder.place((_NW, _SE), (_SW, _NE), over=0 if positive else 1)
        upper, lower = index - 1, index
        for position, entry in ((upper, ring[_NW]), (lower, ring[_SW])):
            if current_tail[position] is None:
                first_head[position] = entry
            else:
                builder.connect(current_tail[position], entry)
        current_tail[upper] = ring[_NE]
        current_tail[lower] = ring[_SE]

    for position in range(n):
        if current_tail[position] is None:
            builder.free_loops += 1
        else:
            builder.connect(current_tail[position], first_head[position])
    return builder.to_diagram()[0]


def serialize_pd(d: LinkDiagram) -> str:
    """Canonical PD text: crossings sorted by least label, then one O per free loop."""
    ordered = sorted(d.crossings, key=lambda c: (min(c.labels), c.labels))
    return " ".join([str(c) for c in ordered] + ["O"] * d.free_loops)


def trace_components(d: LinkDiagram) -> List[Component]:
    """Components as edge-label cycles; free loops come last as ()."""
    return list(d.components)


def faces(d: LinkDiagram) -> List[Face]:
    return list(d.faces)


def shared_faces(d: LinkDiagram, e1: int, e2: int) -> List[Face]:
    """Faces bordered by both edges."""
    return [f for f in d.faces if e1 in f.edges and e2 in f.edges]


# --- Building operations ---

def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> LinkDiagram:
    builder = _Builder()
    builder.add_diagram(d1)
    builder.add_diagram(d2)
    return builder.to_diagram()[0]


def _check_component(d: LinkDiagram, index: int) -> Component:
    if not 0 <= index < d.n_components:
        raise DiagramError(f"Component index {index} out of range for {d.n_components} component(s)")
    return d.components[index]


def connected_sum_with_map(
    d1: LinkDiagram,
    c1: int,
    d2: LinkDiagram,
    c2: int,
    edge1: Optional[int] = None,
    edge2: Optional[int] = None,
) -> Tuple[LinkDiagram, Dict[int, int], Dict[int, int]]:
    """connected_sum that also reports where the old edge labels of d1 and d2 went."""
    comp1 = _check_component(d1, c1)
    comp2 = _check_component(d2, c2)
    for comp, edge, name in ((comp1, edge1, "edge1"), (comp2, edge2, "edge2")):
        if edge is not None and edge not in comp:
            raise DiagramError(f"{name}={edge} is not on the chosen component")

    builder = _Builder()
    tails1 = builder.add_diagram(d1)
    tails2 = builder.add_diagram(d2)
    if not comp1 or not comp2:
        # Summing with a crossing-free circle just drops that circle.
        builder.free_loops -= 1
    else:
        e1 = edge1 if edge1 is not None else min(comp1)
        e2 = edge2 if edge2 is not None else min(comp2)
        builder.smooth(tails1[e1], tails2[e2])
        logger.debug("Connected sum at edges %d and %d", e1, e2)

    diagram, label_of = builder.to_diagram()
    map1 = {label: label_of[slot] for label, slot in tails1.items()}
    map2 = {label: label_of[slot] for label, slot in tails2.items()}
    return diagram, map1, map2


def connected_sum(
    d1: LinkDiagram,
    c1: int,
    d2: LinkDiagram,
    c2: int,
    edge1: Optional[int] = None,
    edge2: Optional[int] = None,
) -> LinkDiagram:
    """
    Band component c1 of d1 to component c2 of d2.

    The band joins edge1 and edge2 (default: the lowest label on each
    component), so the result has one component fewer than the union.
    """
    return connected_sum_with_map(d1, c1, d2, c2, edge1, edge2)[0]


def mirror(d: LinkDiagram) -> LinkDiagram:
    """Swap over and under at every crossing; labels are kept."""
    flipped = []
    for c in d.crossings:
        a, b, x, y = c.labels
        if c.sign > 0:
            flipped.append(Crossing((y, a, b, x), -1))
        else:
            flipped.append(Crossing((b, x, y, a), 1))
    return LinkDiagram(tuple(flipped), d.free_loops)


def reverse_components(d: LinkDiagram, indices: Iterable[int]) -> LinkDiagram:
    """Reverse the orientation of the chosen components; labels are kept."""
    chosen = set(indices)
    for index in chosen:
        _check_component(d, index)
    flip = {label for index in chosen for label in d.components[index]}

    result = []
    for c in d.crossings:
        labels = c.labels
        over_in = c.over_in
        if labels[0] in flip:
            labels = labels[2:] + labels[:2]
            over_in = (over_in + 2) % 4
        if labels[over_in] in flip:
            over_in = (over_in + 2) % 4
        result.append(Crossing(labels, 1 if over_in == 3 else -1))
    return LinkDiagram(tuple(result), d.free_loops)


def sublink(d: LinkDiagram, keep: Iterable[int]) -> LinkDiagram:
    """Forget every component not in keep; their crossings are deleted."""
    kept = set(keep)
    for index in kept:
        _check_component(d, index)
    dropped = [index for index in range(d.n_components) if index not in kept]
    dropped_labels = {label for index in dropped for label in d.components[index]}

    builder = _Builder()
    builder.add_diagram(d)
    for ci, crossing in enumerate(d.crossings):
        if any(label in dropped_labels for label in crossing.labels):
            builder.remove_crossing(ci)
    # Every dropped component is now a free loop of its own.
    builder.free_loops -= len(dropped)
    return builder.to_diagram()[0]


# --- Reidemeister moves ---

# (sign, side) -> (first pass entry, second pass entry) for a new kink.
_KINKS = {(1, 1): (3, 0), (-1, 1): (0, 1), (1, -1): (0, 3), (-1, -1): (1, 0)}

# Ring positions around the crossings of an R2 finger, counterclockwise.
_E, _N, _W, _S = range(4)

Location = Union[None, int, str, Tuple[int, int]]


def _kink(d: LinkDiagram, location: Location, sign: int, side: int) -> LinkDiagram:
    if (sign, side) not in _KINKS:
        raise ReidemeisterError(f"R1+ needs sign and side in (+1, -1), got {sign}, {side}")
    first, second = _KINKS[(sign, side)]
    builder = _Builder()
    tails = builder.add_diagram(d)
    cid = builder.new_crossing(second if first == 0 else first)
    builder.connect((cid, (first + 2) % 4), (cid, second))

    if location is None or location == "O":
        if d.free_loops == 0:
            raise ReidemeisterError("R1+ on a free loop needs a diagram with a free loop")
        builder.free_loops -= 1
        builder.connect((cid, (second + 2) % 4), (cid, first))
    else:
        if location not in tails:
            raise ReidemeisterError(f"R1+ location {location!r} is not an edge label")
        tail = tails[location]
        head = builder.link[tail]
        builder.connect(tail, (cid, first))
        builder.connect((cid, (second + 2) % 4), head)
    return builder.to_diagram()[0]


def kink_crossings(d: LinkDiagram) -> List[int]:
    """Crossings that close off a one-edge face."""
    found = {face.darts[0][0] for face in d.faces if len(face.darts) == 1}
    return sorted(found)


def _unkink(d: LinkDiagram, location: Location) -> LinkDiagram:
    kinks = kink_crossings(d)
    if not kinks:
        raise ReidemeisterError("R1-: no kink present")
    if location is None:
        location = kinks[0]
    if location not in kinks:
        raise ReidemeisterError(f"R1-: no kink at crossing {location}")
    builder = _Builder()
    builder.add_diagram(d)
    builder.remove_crossing(location)
    return builder.to_diagram()[0]


def _finger(d: LinkDiagram, location: Location, over: Optional[int], face: Optional[int]) -> LinkDiagram:
    if not isinstance(location, tuple) or len(location) != 2:
        raise ReidemeisterError("R2+ location must be a pair of edge labels")
    e1, e2 = location
    if e1 == e2:
        raise ReidemeisterError("R2+ needs two different edges")
    candidates = shared_faces(d, e1, e2)
    if face is not None:
        candidates = [f for f in candidates if f.index == face]
    if not candidates:
        raise ReidemeisterError(f"R2+: edges {e1} and {e2} do not share a face")
    region = candidates[0]
    over = e1 if over is None else over
    if over not in (e1, e2):
        raise ReidemeisterError(f"R2+: over edge {over} must be {e1} or {e2}")

    _, side1 = region.dart_of(e1)
    _, side2 = region.dart_of(e2)

    def along(entry: int, exit_: int, side: int) -> Tuple[int, int]:
        return (entry, exit_) if side > 0 else (exit_, entry)

    # In the face, e2 runs east along the top and e1 runs west along the
    # bottom; e1 is pushed up across e2 and back.
    builder = _Builder()
    tails = builder.add_diagram(d)
    over_strand = 0 if over == e1 else 1
    right = builder.place(along(_S, _N, side1), along(_W, _E, side2), over_strand)
    left = builder.place(along(_N, _S, side1), along(_W, _E, side2), over_strand)

    def dart_ends(label: int, side: int) -> Tuple[Slot, Slot]:
        tail = tails[label]
        head = builder.link[tail]
        return (tail, head) if side > 0 else (head, tail)

    start1, end1 = dart_ends(e1, side1)
    start2, end2 = dart_ends(e2, side2)
    builder.connect(start1, right[_S])
    builder.connect(right[_N], left[_N])
    builder.connect(left[_S], end1)
    builder.connect(start2, left[_W])
    builder.connect(left[_E], right[_W])
    builder.connect(right[_E], end2)
    return builder.to_diagram()[0]


def _is_r2_bigon(d: LinkDiagram, face: Face) -> bool:
    if len(face.darts) != 2 or face.darts[0][0] == face.darts[1][0]:
        return False
    for label in set(face.edges):
        tail, head = d.endpoints[label]
        if tail[0] != head[0] and d.is_over(tail) and d.is_over(head):
            return True
    return False


def _unfinger(d: LinkDiagram, location: Location) -> LinkDiagram:
    bigons = [f for f in d.faces if _is_r2_bigon(d, f)]
    if location is None:
        if not bigons:
            raise ReidemeisterError("R2-: no removable bigon present")
        region = bigons[0]
    else:
        region = next((f for f in bigons if f.index == location), None)
        if region is None:
            raise ReidemeisterError(f"R2-: face {location} is not a removable bigon")
    builder = _Builder()
    builder.add_diagram(d)
    for ci in sorted({slot[0] for slot in region.darts}):
        builder.remove_crossing(ci)
    return builder.to_diagram()[0]


def _triangle_strands(d: LinkDiagram, face: Face) -> Optional[List[Tuple[Slot, Slot]]]:
    """(tail slot, head slot) of each side of a movable triangle, else None."""
    if len(face.darts) != 3 or len({slot[0] for slot in face.darts}) != 3:
        return None
    sides = [d.endpoints[label] for label in face.edges]
    if len({label for label in face.edges}) != 3:
        return None
    if not any(d.is_over(tail) and d.is_over(head) for tail, head in sides):
        return None
    return sides


def triangle_faces(d: LinkDiagram) -> List[int]:
    """Face indices where an R3 move applies."""
    return [f.index for f in d.faces if _triangle_strands(d, f) is not None]


def _slide(d: LinkDiagram, location: Location) -> LinkDiagram:
    movable = triangle_faces(d)
    if location is None:
        if not movable:
            raise ReidemeisterError("R3: no movable triangle present")
        location = movable[0]
    if location not in movable:
        raise ReidemeisterError(f"R3: face {location} is not a movable triangle")
    sides = _triangle_strands(d, d.faces[location])

    labels = [list(c.labels) for c in d.crossings]
    for tail, head in sides:
        side_label = d.label_at(tail)
        before = d.label_at((tail[0], (tail[1] + 2) % 4))
        after = d.label_at((head[0], (head[1] + 2) % 4))
        # The strand now meets the crossing it used to reach second first.
        labels[tail[0]][(tail[1] + 2) % 4] = side_label
        labels[tail[0]][tail[1]] = after
        labels[head[0]][head[1]] = before
        labels[head[0]][(head[1] + 2) % 4] = side_label
    moved = tuple(Crossing(tuple(l), c.sign) for l, c in zip(labels, d.crossings))
    return relabel(LinkDiagram(moved, d.free_loops))


def reidemeister(
    d: LinkDiagram,
    move: str,
    location: Location = None,
    *,
    sign: int = 1,
    side: int = 1,
    over: Optional[int] = None,
    face: Optional[int] = None,
) -> LinkDiagram:
    """
    Apply one Reidemeister move.

    Locations by move:
        R1+  edge label, or None / "O" to kink a free loop (sign, side pick the kink)
        R1-  crossing index of a kink (None: first kink)
        R2+  (e1, e2) co-facial edges; e1 is pushed across e2 (over picks the top edge)
        R2-  face index of a bigon (None: first)
        R3   face index of a triangle (None: first)

    Raises:
        ReidemeisterError: if the pattern is not present at location.
    """
    move = move.replace("−", "-").upper()
    if move == "R1+":
        result = _kink(d, location, sign, side)
    elif move == "R1-":
        result = _unkink(d, location)
    elif move == "R2+":
        result = _finger(d, location, over, face)
    elif move == "R2-":
        result = _unfinger(d, location)
    elif move == "R3":
        result = _slide(d, location)
    else:
        raise ReidemeisterError(f"Unknown move {move!r}; expected one of {', '.join(MOVES)}")
    logger.debug("%s at %r: %d -> %d crossings", move, location, d.n_crossings, result.n_crossings)
    return result


# --- Random diagrams for property suites ---

def random_braid_diagram(rng: random.Random, max_strands: int = 3, max_length: int = 6) -> LinkDiagram:
    """Closure of a random braid word with up to max_length letters."""
    strands = rng.randint(2, max_strands)
    length = rng.randint(1, max_length)
    word = " ".join(
        f"s{rng.randint(1, strands - 1)}" + ("^-1" if rng.random() < 0.5 else "")
        for _ in range(length)
    )
    return parse_braid(f"braid {strands}: {word}")


def random_insertion(d: LinkDiagram, rng: random.Random) -> Tuple[LinkDiagram, str]:
    """One random crossing-creating (or R3) move; returns (diagram, move name)."""
    if not d.crossings:
        return reidemeister(d, "R1+", "O", sign=rng.choice((1, -1)), side=rng.choice((1, -1))), "R1+"

    options = ["R1+", "R2+"]
    if triangle_faces(d):
        options.append("R3")
    move = rng.choice(options)

    if move == "R1+":
        label = rng.choice(d.labels)
        return reidemeister(d, "R1+", label, sign=rng.choice((1, -1)), side=rng.choice((1, -1))), move
    if move == "R3":
        return reidemeister(d, "R3", rng.choice(triangle_faces(d))), move

    regions = [f for f in d.faces if len(set(f.edges)) >= 2]
    region = rng.choice(regions)
    e1, e2 = rng.sample(sorted(set(region.edges)), 2)
    return reidemeister(d, "R2+", (e1, e2), face=region.index, over=rng.choice((e1, e2))), move
