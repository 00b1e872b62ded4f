"""Static SVG drawings of diagrams and germs.

The layout is schematic: crossings sit on a circle and edges are cubic
curves leaving each crossing along its slot directions. Under-strands are
drawn with a gap at the crossing. Output depends only on the input, so two
renders of the same object are byte-identical.
"""

import logging
import math
from pathlib import Path
from typing import List, Tuple, Union

from lipknot.germ_model import Germ, PinchedLink
from lipknot.link_core import LinkDiagram, Slot

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

SIZE = 400
RADIUS = 130
SLOT_OFFSET = 12
GAP = 5
PULL = 45
LOOP_RADIUS = 25


class RenderError(ValueError):
    """Raised when an SVG cannot be written."""
    pass


def _fmt(p: Point) -> str:
    return f"{p[0]:.2f} {p[1]:.2f}"


class _Layout:
    def __init__(self, d: LinkDiagram):
        self.d = d
        n = d.n_crossings
        centre = SIZE / 2
        self.centres: List[Point] = []
        self.angles: List[float] = []
        for ci in range(n):
            angle = 2 * math.pi * ci / n if n else 0.0
            r = RADIUS if n > 1 else 0.0
            self.centres.append((centre + r * math.cos(angle), centre + r * math.sin(angle)))
            # Slot 0 faces the canvas centre so the under strand runs radially.
            self.angles.append(angle + math.pi)

    def direction(self, slot: Slot) -> Point:
        ci, i = slot
        theta = self.angles[ci] + i * math.pi / 2
        return math.cos(theta), -math.sin(theta)

    def at(self, slot: Slot, distance: float) -> Point:
        cx, cy = self.centres[slot[0]]
        dx, dy = self.direction(slot)
        return cx + distance * dx, cy + distance * dy

    def edge(self, label: int) -> str:
        tail, head = self.d.endpoints[label]
        return "C {} {} {}".format(
            _fmt(self.at(tail, SLOT_OFFSET + PULL)),
            _fmt(self.at(head, SLOT_OFFSET + PULL)),
            _fmt(self.at(head, SLOT_OFFSET)),
        )

    def midpoint(self, label: int) -> Point:
        tail, head = self.d.endpoints[label]
        a, b = self.at(tail, SLOT_OFFSET + PULL), self.at(head, SLOT_OFFSET + PULL)
        return (a[0] + b[0]) / 2, (a[1] + b[1]) / 2

    def component_path(self, comp) -> str:
        first_tail = self.d.endpoints[comp[0]][0]
        parts = [f"M {_fmt(self.at(first_tail, SLOT_OFFSET))}"]
        for label in comp:
            parts.append(self.edge(label))
            head = self.d.endpoints[label][1]
            exit_slot = (head[0], (head[1] + 2) % 4)
            if self.d.is_over(head):
                parts.append(f"L {_fmt(self.at(exit_slot, SLOT_OFFSET))}")
            else:
                parts.append(f"L {_fmt(self.at(head, GAP))}")
                parts.append(f"M {_fmt(self.at(exit_slot, GAP))}")
                parts.append(f"L {_fmt(self.at(exit_slot, SLOT_OFFSET))}")
        return " ".join(parts)


def _loop_path(index: int) -> str:
    x = SIZE + 20 + index * (2 * LOOP_RADIUS + 20)
    y = SIZE / 2
    r = LOOP_RADIUS
    return f"M {x:.2f} {y:.2f} a {r} {r} 0 1 0 {2 * r} 0 a {r} {r} 0 1 0 {-2 * r} 0 Z"


def render_svg(obj: Union[LinkDiagram, Germ, PinchedLink]) -> str:
    """SVG text for a diagram, a germ (with bridge and pinch labels) or a pinched link."""
    bridges, pinches = (), ()
    if isinstance(obj, Germ):
        d, bridges = obj.diagram, obj.bridges
        pinches = tuple((p.arcs, p.tord) for p in obj.pinches)
    elif isinstance(obj, PinchedLink):
        d = obj.diagram
        pinches = tuple(zip(obj.arcs, obj.tords))
    else:
        d = obj

    layout = _Layout(d)
    width = SIZE + d.free_loops * (2 * LOOP_RADIUS + 20) + (20 if d.free_loops else 0)
    body: List[str] = []
    loop_index = 0
    for comp in d.components:
        if comp:
            path = layout.component_path(comp)
        else:
            path = _loop_path(loop_index)
            loop_index += 1
        body.append(f'<path class="component" d="{path}" stroke="black" fill="none" stroke-width="2"/>')
    for x, y in layout.centres:
        body.append(f'<circle class="crossing" cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="gray"/>')

    def annotate(kind: str, a: int, b: int, text: str) -> None:
        p, q = layout.midpoint(a), layout.midpoint(b)
        mx, my = (p[0] + q[0]) / 2, (p[1] + q[1]) / 2
        body.append(
            f'<line class="{kind}" x1="{p[0]:.2f}" y1="{p[1]:.2f}" x2="{q[0]:.2f}" y2="{q[1]:.2f}" '
            f'stroke="steelblue" stroke-dasharray="4 3"/>'
        )
        body.append(
            f'<text class="{kind}-label" x="{mx:.2f}" y="{my:.2f}" font-family="monospace" '
            f'font-size="10" fill="steelblue">{text}</text>'
        )

    for site in bridges:
        annotate("bridge", *site.edges, f"q={site.q}, β={site.beta}")
    for (a, b), tord in pinches:
        annotate("pinch", a, b, f"tord={tord}")

    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {SIZE}" width="{width}" height="{SIZE}">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def write_svg(obj: Union[LinkDiagram, Germ, PinchedLink], path: Union[str, Path]) -> Path:
    """
    Render obj and write it to path.

    Raises:
        RenderError: the path cannot be written.
    """
    target = Path(path)
    try:
        target.write_text(render_svg(obj), encoding="utf-8")
    except OSError as e:
        raise RenderError(f"Cannot write SVG to {target}: {e.strerror or e}")
    logger.info("Wrote %s", target)
    return target
