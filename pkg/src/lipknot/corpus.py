"""Named germs: the worked examples, the twist family and universal germs.

Every entry is built deterministically from a short diagram transcription
plus germ operations, so the corpus doubles as a regression fixture.
"""

import logging
import re
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from lipknot.germ_model import (
    DEFAULT_UNIVERSAL_BETA,
    Germ,
    PinchPair,
    build_universal,
    insert_bridge,
    locate_face,
    plain_germ,
    twist_bridge,
)
from lipknot.link_core import LinkDiagram, connected_sum_with_map, parse_braid, parse_pd

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised for a corpus name that does not exist."""
    pass


KNOTS: Dict[str, str] = {
    "unknot": "O",
    "trefoil": "braid 2: s1 s1 s1",
    "fig8": "braid 3: s1 s2^-1 s1 s2^-1",
    "5_1": "braid 2: s1 s1 s1 s1 s1",
}

# A once-curled unknot: two kinks facing each other across an inner face.
EX3_BASE_PD = "X[1,2,2,3] X[3,4,4,1]"
EX3_BRIDGE_EDGES = (1, 3)
EX3_Q = Fraction(3)
EX3_BETA = Fraction(2)
EX2_TORD = Fraction(3, 2)
TWIST_RANGE = range(-5, 6)

_TWIST_NAME = re.compile(r"^twist\.(-?\d+)$")


def knot(name: str) -> LinkDiagram:
    """Diagram of a named knot (see KNOTS)."""
    if name not in KNOTS:
        raise CorpusError(f"Unknown knot {name!r}; expected one of {', '.join(KNOTS)}")
    text = KNOTS[name]
    return parse_braid(text) if text.startswith("braid") else parse_pd(text)


def _ex3_x(label: str = "ex3.X") -> Germ:
    base = plain_germ(parse_pd(EX3_BASE_PD), label=label)
    e1, e2 = EX3_BRIDGE_EDGES
    face = locate_face(base.diagram, e1, e2)
    return insert_bridge(base, face, EX3_BRIDGE_EDGES, EX3_Q, EX3_BETA, site_id="b1")


def _twist(k: int) -> Germ:
    x = _ex3_x(label=f"twist.{k}")
    return x if k == 0 else twist_bridge(x, "b1", k)


def _trefoil_sum() -> Tuple[LinkDiagram, Dict[int, int], Dict[int, int], LinkDiagram]:
    trefoil = knot("trefoil")
    diagram, map1, map2 = connected_sum_with_map(trefoil, 0, trefoil, 0)
    return diagram, map1, map2, trefoil


def _ex2_x1() -> Germ:
    # Pinch the neck of the connected sum: the cone splits it back into both trefoils.
    diagram, map1, map2, trefoil = _trefoil_sum()
    edge = min(trefoil.components[0])
    pinch = PinchPair((map1[edge], map2[edge]), EX2_TORD)
    return Germ(diagram, pinches=(pinch,), label="ex2.X1")


def _ex2_x2() -> Germ:
    # Pinch a corner of one crossing of the second summand instead.
    diagram, _, map2, trefoil = _trefoil_sum()
    marker = map2[trefoil.crossings[0].labels[2]]
    crossing = next(c for c in diagram.crossings if c.labels[2] == marker)
    slots = (0, 1) if crossing.sign > 0 else (1, 2)
    pinch = PinchPair(tuple(crossing.labels[s] for s in slots), EX2_TORD)
    return Germ(diagram, pinches=(pinch,), label="ex2.X2")


def names() -> List[str]:
    """Every corpus name, sorted; twist.k is listed for the tested range."""
    listed = ["ex2.X1", "ex2.X2", "ex3.X", "ex3.Y", "ex3.pair"]
    listed += [f"twist.{k}" for k in TWIST_RANGE]
    listed += [f"universal.{name}" for name in KNOTS]
    return sorted(listed)


def corpus(name: str) -> Union[Germ, Tuple[Germ, Germ]]:
    """
    Build a named corpus object.

    Names: ex2.X1, ex2.X2, ex3.X, ex3.Y, ex3.pair (returns both), twist.<k>
    for any integer k, universal.<knot> for knot in KNOTS.

    Raises:
        CorpusError: unknown name.
    """
    logger.debug("Building corpus entry %s", name)
    if name == "ex3.X":
        return _ex3_x()
    if name == "ex3.Y":
        return twist_bridge(_ex3_x(label="ex3.Y"), "b1", 1)
    if name == "ex3.pair":
        return corpus("ex3.X"), corpus("ex3.Y")
    if name == "ex2.X1":
        return _ex2_x1()
    if name == "ex2.X2":
        return _ex2_x2()
    twist = _TWIST_NAME.match(name)
    if twist:
        return _twist(int(twist.group(1)))
    if name.startswith("universal."):
        key = name.split(".", 1)[1]
        if key in KNOTS:
            return build_universal(knot(key), DEFAULT_UNIVERSAL_BETA, label=name)
    raise CorpusError(f"Unknown corpus entry {name!r}; see `lipknot corpus list`")
