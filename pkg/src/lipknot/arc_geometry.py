"""Exact Puiseux arcs: parsing, tangency order and bridge corner arcs.

An arc is a finite vector Puiseux series in t with rational exponents and
rational coefficients, one series per coordinate of R^3 or R^4. Everything
here is exact (Fraction) except sample_arc and log_log_slope, which exist to
feed numeric oracles.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from lipknot.constants import ARC_COORDINATES, DEFAULT_ARC_SLACK, SLOPE_WINDOW

Term = Tuple[Fraction, Fraction]  # (exponent, coefficient)
RationalLike = Union[Fraction, int, str]


class ArcError(ValueError):
    """Raised for invalid arcs or arc operations."""
    pass


class ArcSyntaxError(ArcError):
    """Raised when arc text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def as_rational(value: RationalLike) -> Fraction:
    """Coerce int, Fraction or 'p/q' text to a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ArcError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ArcError(f"Not a rational: {value!r}")
    raise ArcError(f"Not a rational: {value!r}")


@dataclass(frozen=True)
class PuiseuxArc:
    """A truncated vector Puiseux series gamma(t), t in [0, 1]."""

    dimension: int
    terms: Tuple[Tuple[Term, ...], ...]
    truncation_order: Fraction

    def __post_init__(self):
        if self.dimension not in (3, 4):
            raise ArcError(f"Arc dimension must be 3 or 4, got {self.dimension}")
        if len(self.terms) != self.dimension:
            raise ArcError(
                f"Expected {self.dimension} coordinate series, got {len(self.terms)}"
            )
        for name, series in zip(ARC_COORDINATES, self.terms):
            previous = None
            for exponent, coefficient in series:
                if exponent <= 0:
                    raise ArcError(f"Non-positive exponent {exponent} in coordinate {name}")
                if coefficient == 0:
                    raise ArcError(f"Zero coefficient stored in coordinate {name}")
                if previous is not None and exponent <= previous:
                    raise ArcError(f"Exponents not strictly increasing in coordinate {name}")
                previous = exponent
            if series and series[-1][0] >= self.truncation_order:
                raise ArcError(
                    f"Term t^{series[-1][0]} in coordinate {name} is beyond "
                    f"truncation order {self.truncation_order}"
                )

    @classmethod
    def from_coordinates(
        cls,
        coordinates: Dict[str, Sequence[Tuple[RationalLike, RationalLike]]],
        dimension: int = 4,
        truncation_order: Optional[RationalLike] = None,
        slack: RationalLike = DEFAULT_ARC_SLACK,
    ) -> "PuiseuxArc":
        """Build an arc from {coord: [(exponent, coefficient), ...]}, merging like terms."""
        names = ARC_COORDINATES[:dimension]
        unknown = set(coordinates) - set(names)
        if unknown:
            raise ArcError(f"Unknown coordinates for dimension {dimension}: {sorted(unknown)}")

        series = []
        for name in names:
            merged: Dict[Fraction, Fraction] = {}
            for exponent, coefficient in coordinates.get(name, ()):
                exponent = as_rational(exponent)
                if exponent <= 0:
                    raise ArcError(f"Non-positive exponent {exponent} in coordinate {name}")
                merged[exponent] = merged.get(exponent, Fraction(0)) + as_rational(coefficient)
            series.append(tuple(sorted((e, c) for e, c in merged.items() if c != 0)))

        if truncation_order is None:
            top = max((s[-1][0] for s in series if s), default=Fraction(0))
            truncation = top + as_rational(slack)
        else:
            truncation = as_rational(truncation_order)
        return cls(dimension=dimension, terms=tuple(series), truncation_order=truncation)

    def coordinate(self, name: str) -> Tuple[Term, ...]:
        return self.terms[ARC_COORDINATES.index(name)]

    def __str__(self) -> str:
        return format_arc(self)


@total_ordering
@dataclass(frozen=True)
class TangencyOrder:
    """tord value; value None means no difference seen below the truncation order."""

    value: Optional[Fraction]
    truncation_order: Optional[Fraction] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def truncation_limited(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, Fraction(0)) if self.value is None else (0, self.value)

    @staticmethod
    def _coerce(other) -> Optional["TangencyOrder"]:
        if isinstance(other, TangencyOrder):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return TangencyOrder(Fraction(other))
        if isinstance(other, float) and math.isinf(other) and other > 0:
            return TangencyOrder(None)
        return None

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __str__(self) -> str:
        if self.value is None:
            return "inf (truncation-limited)"
        return str(self.value)


class BridgeCorners(NamedTuple):
    """The four boundary arcs m, n, m', n' shared by a bridge and its broken form."""

    m: PuiseuxArc
    n: PuiseuxArc
    m_prime: PuiseuxArc
    n_prime: PuiseuxArc


# --- Parsing ---

_COORD_RE = re.compile(r"\s*([xyzw])\s*=\s*")
_SIGN_RE = re.compile(r"\s*([+-])\s*")
_COEF_RE = re.compile(r"(\d+(?:\s*/\s*\d+)?)\s*(\*)?\s*")
_T_RE = re.compile(r"t\s*")
_POWER_RE = re.compile(r"\^\s*(?:\(\s*(-?\d+(?:\s*/\s*\d+)?)\s*\)|(-?\d+))\s*")
_BIG_O_RE = re.compile(r"O\s*\(\s*t\s*(?:\^\s*(?:\(\s*(\d+(?:\s*/\s*\d+)?)\s*\)|(\d+)))?\s*\)\s*")


def _parse_exponent(match: "re.Match") -> Fraction:
    text = match.group(1) or match.group(2)
    return Fraction(text.replace(" ", ""))


def _parse_series(text: str, pos: int, end: int, name: str):
    """Parse one coordinate's right-hand side; returns (terms, declared_order)."""
    terms: List[Tuple[Fraction, Fraction]] = []
    declared: Optional[Fraction] = None
    first = True

    while True:
        while pos < end and text[pos].isspace():
            pos += 1
        if pos >= end:
            if first:
                raise ArcSyntaxError(f"Empty expression for coordinate {name}", pos)
            break

        sign = Fraction(1)
        m = _SIGN_RE.match(text, pos, end)
        if m:
            sign = Fraction(-1) if m.group(1) == "-" else Fraction(1)
            pos = m.end()
        elif not first:
            raise ArcSyntaxError("Expected '+' or '-' between terms", pos)
        first = False

        m = _BIG_O_RE.match(text, pos, end)
        if m:
            if sign < 0:
                raise ArcSyntaxError("Order term must be added, not subtracted", pos)
            order_text = m.group(1) or m.group(2) or "1"
            declared = Fraction(order_text.replace(" ", ""))
            pos = m.end()
            continue

        coefficient = Fraction(1)
        has_coefficient = False
        m = _COEF_RE.match(text, pos, end)
        if m:
            coefficient = Fraction(m.group(1).replace(" ", ""))
            has_coefficient = True
            pos = m.end()
            if m.group(2) and not _T_RE.match(text, pos, end):
                raise ArcSyntaxError("Expected 't' after '*'", pos)

        m = _T_RE.match(text, pos, end)
        if m:
            term_pos = pos
            pos = m.end()
            exponent = Fraction(1)
            m = _POWER_RE.match(text, pos, end)
            if m:
                exponent = _parse_exponent(m)
                pos = m.end()
            if exponent <= 0:
                raise ArcSyntaxError(f"Non-positive exponent {exponent}", term_pos)
        elif has_coefficient:
            if coefficient != 0:
                raise ArcSyntaxError("Non-positive exponent 0 (constant term)", pos)
            continue
        else:
            raise ArcSyntaxError("Expected a term", pos)

        if coefficient != 0:
            terms.append((exponent, sign * coefficient))

    return terms, declared


def parse_puiseux_arc(
    text: str,
    dimension: int = 4,
    slack: Optional[RationalLike] = None,
) -> PuiseuxArc:
    """
    Parse arc text such as "x=t^2; y=-t^(3/2) + 1/2*t^3; z=0".

    Coordinates are drawn from x, y, z, w; omitted coordinates are zero. A
    coordinate may end with "+ O(t^r)" to declare the truncation order;
    otherwise it is the largest exponent present plus the slack.

    Raises:
        ArcSyntaxError: with the 0-based position of the offending character.
    """
    if slack is None:
        from lipknot.config import load_config
        slack = load_config().arc_slack

    names = ARC_COORDINATES[:dimension]
    coordinates: Dict[str, List[Tuple[Fraction, Fraction]]] = {}
    declared_orders: List[Fraction] = []

    pos = 0
    length = len(text)
    while pos < length:
        stop = text.find(";", pos)
        stop = length if stop < 0 else stop
        if text[pos:stop].strip():
            m = _COORD_RE.match(text, pos, stop)
            if not m:
                skip = pos
                while skip < stop and text[skip].isspace():
                    skip += 1
                raise ArcSyntaxError("Expected '<coord>=' with coord in x, y, z, w", skip)
            name = m.group(1)
            if name not in names:
                raise ArcSyntaxError(f"Coordinate {name} not available in dimension {dimension}", m.start(1))
            if name in coordinates:
                raise ArcSyntaxError(f"Coordinate {name} assigned twice", m.start(1))
            terms, declared = _parse_series(text, m.end(), stop, name)
            coordinates[name] = terms
            if declared is not None:
                declared_orders.append(declared)
        pos = stop + 1

    truncation = min(declared_orders) if declared_orders else None
    return PuiseuxArc.from_coordinates(
        coordinates, dimension=dimension, truncation_order=truncation, slack=slack
    )


def _format_exponent(exponent: Fraction) -> str:
    if exponent.denominator == 1:
        return f"t^{exponent.numerator}" if exponent != 1 else "t"
    return f"t^({exponent.numerator}/{exponent.denominator})"


def format_arc(arc: PuiseuxArc) -> str:
    """Inverse of parse_puiseux_arc (zero coordinates omitted)."""
    parts = []
    for name, series in zip(ARC_COORDINATES, arc.terms):
        if not series:
            continue
        text = ""
        for i, (exponent, coefficient) in enumerate(series):
            sign = "-" if coefficient < 0 else ("+" if i else "")
            magnitude = abs(coefficient)
            prefix = "" if magnitude == 1 else f"{magnitude}*"
            joiner = " " if i else ""
            text += f"{joiner}{sign}{' ' if i else ''}{prefix}{_format_exponent(exponent)}"
        parts.append(f"{name}={text}")
    return "; ".join(parts) if parts else "x=0"


# --- Tangency ---

def _difference(a: PuiseuxArc, b: PuiseuxArc, below: Fraction) -> List[Dict[Fraction, Fraction]]:
    diffs = []
    for sa, sb in zip(a.terms, b.terms):
        d: Dict[Fraction, Fraction] = {}
        for e, c in sa:
            if e < below:
                d[e] = d.get(e, Fraction(0)) + c
        for e, c in sb:
            if e < below:
                d[e] = d.get(e, Fraction(0)) - c
        diffs.append({e: c for e, c in d.items() if c != 0})
    return diffs


def tord(a: PuiseuxArc, b: PuiseuxArc) -> TangencyOrder:
    """
    Tangency order of two arcs: least exponent of |b(t) - a(t)|.

    The difference is only trusted below the common truncation order; if it
    vanishes there the result is infinite and flagged truncation-limited.
    """
    if a.dimension != b.dimension:
        raise ArcError(f"Dimension mismatch: {a.dimension} vs {b.dimension}")
    common = min(a.truncation_order, b.truncation_order)
    exponents = [e for diff in _difference(a, b, common) for e in diff]
    if not exponents:
        return TangencyOrder(None, truncation_order=common)
    return TangencyOrder(min(exponents), truncation_order=common)


def bridge_corner_arcs(q: RationalLike, beta: RationalLike) -> BridgeCorners:
    """
    The arcs x = +-t^beta, y = +-t^q, z = w = 0 bounding a (q, beta)-bridge.

    m and n lie on y = +t^q (the T+ side), m' and n' on y = -t^q; m and m'
    have x = +t^beta.
    """
    q = as_rational(q)
    beta = as_rational(beta)
    if not (1 < beta < q):
        raise ArcError(f"Invalid bridge exponents: need 1 < beta < q, got q={q}, beta={beta}")

    def _arc(sx: int, sy: int) -> PuiseuxArc:
        return PuiseuxArc.from_coordinates({"x": [(beta, sx)], "y": [(q, sy)]})

    return BridgeCorners(m=_arc(1, 1), n=_arc(-1, 1), m_prime=_arc(1, -1), n_prime=_arc(-1, -1))


# --- Numerics ---

def sample_arc(a: PuiseuxArc, t: float) -> Tuple[float, ...]:
    """Evaluate each coordinate series at 0 < t <= 1."""
    if not (0 < t <= 1):
        raise ArcError(f"Sample parameter must satisfy 0 < t <= 1, got {t}")
    return tuple(
        float(sum(float(c) * t ** float(e) for e, c in series))
        for series in a.terms
    )


def log_log_slope(
    a: PuiseuxArc,
    b: PuiseuxArc,
    window: Tuple[float, float] = SLOPE_WINDOW,
    samples: int = 64,
) -> float:
    """Least-squares slope of log|a(t) - b(t)| against log t over the window."""
    if a.dimension != b.dimension:
        raise ArcError(f"Dimension mismatch: {a.dimension} vs {b.dimension}")
    ts = np.geomspace(window[0], window[1], samples)
    distances = np.array([
        np.linalg.norm(np.subtract(sample_arc(a, t), sample_arc(b, t))) for t in ts
    ])
    if np.any(distances <= 0):
        raise ArcError("Arcs meet inside the sampling window; slope undefined")
    slope, _ = np.polyfit(np.log(ts), np.log(distances), 1)
    return float(slope)
