"""Link invariants: writhe, linking numbers, Kauffman bracket, Jones polynomial.

The bracket follows <X[a,b,c,d]> = A <P[a,b] P[c,d]> + A^-1 <P[a,d] P[b,c]>
with loop value d = -A^2 - A^-2 and <unknot> = 1. Jones is
(-A^3)^-w <D> read in t = A^-4.
"""

import itertools
import logging
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from lipknot.link_core import DiagramError, LinkDiagram, sublink

logger = logging.getLogger(__name__)

Mapping = Dict[int, int]  # A-exponent -> coefficient


class CrossingLimitError(ValueError):
    """Raised when a diagram is too large for the requested state sum."""
    pass


class PolynomialError(ValueError):
    pass


# --- Laurent polynomials ---

_TERM_RE = re.compile(r"\s*([+-]?\s*\d+)\s*\*\s*([At])\s*\^\s*(?:\(\s*(-?\d+(?:/\d+)?)\s*\)|(-?\d+))\s*")


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients and rational exponents."""

    terms: Tuple[Tuple[Fraction, int], ...] = ()
    variable: str = "t"

    def __post_init__(self):
        if self.variable not in ("A", "t"):
            raise PolynomialError(f"Variable must be 'A' or 't', got {self.variable!r}")
        previous = None
        for exponent, coefficient in self.terms:
            if coefficient == 0:
                raise PolynomialError("Zero coefficient stored")
            if exponent.denominator not in (1, 2, 4):
                raise PolynomialError(f"Exponent {exponent} has denominator outside 1, 2, 4")
            if previous is not None and exponent <= previous:
                raise PolynomialError("Exponents must be strictly increasing")
            previous = exponent

    @classmethod
    def from_mapping(cls, mapping: Dict, variable: str = "t") -> "LaurentPoly":
        terms = tuple(sorted((Fraction(e), int(c)) for e, c in mapping.items() if c != 0))
        return cls(terms, variable)

    @classmethod
    def monomial(cls, coefficient: int, exponent=0, variable: str = "t") -> "LaurentPoly":
        return cls.from_mapping({Fraction(exponent): coefficient}, variable)

    @classmethod
    def one(cls, variable: str = "t") -> "LaurentPoly":
        return cls.monomial(1, 0, variable)

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Inverse of serialize()."""
        text = text.strip()
        if text in ("0", "0*t", "0*A"):
            return cls((), "t")
        mapping: Dict[Fraction, int] = {}
        variable = None
        for chunk in text.split(" + "):
            m = _TERM_RE.fullmatch(chunk)
            if not m:
                raise PolynomialError(f"Bad polynomial term {chunk!r}")
            if variable is not None and m.group(2) != variable:
                raise PolynomialError("Mixed variables in polynomial")
            variable = m.group(2)
            exponent = Fraction(m.group(3) or m.group(4))
            mapping[exponent] = mapping.get(exponent, 0) + int(m.group(1).replace(" ", ""))
        return cls.from_mapping(mapping, variable)

    def as_dict(self) -> Dict[Fraction, int]:
        return dict(self.terms)

    def _check(self, other: "LaurentPoly") -> None:
        if self.variable != other.variable:
            raise PolynomialError(f"Variable mismatch: {self.variable} vs {other.variable}")

    def _lift(self, other) -> "LaurentPoly":
        if isinstance(other, int) and not isinstance(other, bool):
            return LaurentPoly.monomial(other, 0, self.variable)
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        merged = self.as_dict()
        for e, c in other.terms:
            merged[e] = merged.get(e, 0) + c
        return LaurentPoly.from_mapping(merged, self.variable)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(tuple((e, -c) for e, c in self.terms), self.variable)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        product: Dict[Fraction, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                product[e1 + e2] = product.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly.from_mapping(product, self.variable)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if power < 0:
            if len(self.terms) != 1 or abs(self.terms[0][1]) != 1:
                raise PolynomialError("Only unit monomials have inverses")
            (e, c), = self.terms
            return LaurentPoly.monomial(c ** -power, e * power, self.variable)
        result = LaurentPoly.one(self.variable)
        for _ in range(power):
            result = result * self
        return result

    def inverted(self) -> "LaurentPoly":
        """Substitute variable -> 1/variable."""
        return LaurentPoly.from_mapping({-e: c for e, c in self.terms}, self.variable)

    def in_t(self) -> "LaurentPoly":
        """Rewrite an A-polynomial in t = A^-4."""
        if self.variable == "t":
            return self
        return LaurentPoly.from_mapping({-e / 4: c for e, c in self.terms}, "t")

    def is_zero(self) -> bool:
        return not self.terms

    def serialize(self) -> str:
        """Exact form: c*t^(p/q) terms joined by ' + ', exponents ascending."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            power = str(e.numerator) if e.denominator == 1 and e >= 0 else f"({e})"
            parts.append(f"{c}*{self.variable}^{power}")
        return " + ".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        text = ""
        for i, (e, c) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if e == 0:
                body = str(magnitude)
            else:
                power = "" if e == 1 else (f"^{e}" if e.denominator == 1 else f"^({e})")
                body = ("" if magnitude == 1 else str(magnitude)) + self.variable + power
            if i == 0:
                text = ("-" if c < 0 else "") + body
            else:
                text += f" {sign} {body}"
        return text


_DELTA: Mapping = {2: -1, -2: -1}


def _mul(p: Mapping, q: Mapping) -> Mapping:
    out: Mapping = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _delta_power(k: int) -> Mapping:
    result: Mapping = {0: 1}
    for _ in range(k):
        result = _mul(result, _DELTA)
    return result


def _limit(value: Optional[int], field: str) -> int:
    if value is not None:
        return value
    from lipknot.config import load_config
    return getattr(load_config(), field)


# --- Writhe and linking ---

def writhe(d: LinkDiagram) -> int:
    return sum(c.sign for c in d.crossings)


def linking_number(d: LinkDiagram, c1: int, c2: int) -> int:
    """Half the signed count of crossings between components c1 and c2."""
    for index in (c1, c2):
        if not 0 <= index < d.n_components:
            raise DiagramError(f"Component index {index} out of range for {d.n_components} component(s)")
    if c1 == c2:
        raise DiagramError("Linking number needs two different components")
    total = 0
    for ci, crossing in enumerate(d.crossings):
        if set(d.strand_components(ci)) == {c1, c2}:
            total += crossing.sign
    if total % 2:
        raise DiagramError(f"Odd signed crossing count {total} between components {c1} and {c2}")
    return total // 2


def pairwise_linking_numbers(d: LinkDiagram) -> List[int]:
    return [
        linking_number(d, i, j)
        for i, j in itertools.combinations(range(d.n_components), 2)
    ]


# --- Kauffman bracket ---

def _smoothings(labels: Sequence[int]):
    a, b, c, e = labels
    return (((a, b), (c, e)), 1), (((a, e), (b, c)), -1)


def _processing_order(d: LinkDiagram) -> List[int]:
    """Greedy order keeping the frontier of half-processed edges small."""
    remaining = set(range(d.n_crossings))
    seen: Counter = Counter()
    order = []
    while remaining:
        best = min(
            remaining,
            key=lambda ci: (-sum(1 for label in d.crossings[ci].labels if seen[label] == 1), ci),
        )
        remaining.discard(best)
        order.append(best)
        seen.update(d.crossings[best].labels)
    return order


def _join(partner: Dict[int, int], x: int, y: int) -> bool:
    """Join arc ends x and y; True when that closes a loop."""
    if x == y:
        return True
    if partner.get(x) == y:
        del partner[x]
        del partner[y]
        return True
    end_x = partner.pop(x) if x in partner else x
    end_y = partner.pop(y) if y in partner else y
    partner[end_x] = end_y
    partner[end_y] = end_x
    return False


def _finish(total: Mapping, closed: bool, free_loops: int) -> LaurentPoly:
    extra = free_loops if closed else max(free_loops - 1, 0)
    return LaurentPoly.from_mapping(_mul(total, _delta_power(extra)), "A")


def kauffman_bracket(d: LinkDiagram, crossing_limit: Optional[int] = None) -> LaurentPoly:
    """
    Kauffman bracket by a state sum over a planar sweep.

    Crossings are absorbed one at a time; states that pair up the open edge
    ends the same way are merged, so the cost follows the frontier width
    rather than 2^n.

    Raises:
        CrossingLimitError: above the configured crossing limit.
    """
    limit = _limit(crossing_limit, "crossing_limit")
    if d.n_crossings > limit:
        raise CrossingLimitError(f"{d.n_crossings} crossings exceeds the limit of {limit}")
    if not d.crossings:
        return _finish({0: 1}, False, d.free_loops)

    states: Dict[Tuple[frozenset, bool], Mapping] = {(frozenset(), False): {0: 1}}
    widest = 0
    for ci in _processing_order(d):
        merged: Dict[Tuple[frozenset, bool], Mapping] = {}
        for (key, closed), poly in states.items():
            for pairs, shift in _smoothings(d.crossings[ci].labels):
                partner = dict(key)
                loops = sum(_join(partner, x, y) for x, y in pairs)
                powers = 0
                now_closed = closed
                if loops:
                    powers = loops if closed else loops - 1
                    now_closed = True
                term = {e + shift: c for e, c in poly.items()}
                if powers:
                    term = _mul(term, _delta_power(powers))
                target = merged.setdefault((frozenset(partner.items()), now_closed), {})
                for e, c in term.items():
                    target[e] = target.get(e, 0) + c
        states = {k: {e: c for e, c in v.items() if c} for k, v in merged.items()}
        widest = max(widest, len(states))

    total: Mapping = {}
    closed = False
    for (key, flag), poly in states.items():
        closed = closed or flag
        for e, c in poly.items():
            total[e] = total.get(e, 0) + c
    logger.debug("Bracket of %d crossings, widest frontier %d states", d.n_crossings, widest)
    return _finish({e: c for e, c in total.items() if c}, closed, d.free_loops)


def kauffman_bracket_bruteforce(d: LinkDiagram, limit: Optional[int] = None) -> LaurentPoly:
    """Exhaustive 2^n state sum; an oracle for kauffman_bracket."""
    limit = _limit(limit, "bruteforce_limit")
    if d.n_crossings > limit:
        raise CrossingLimitError(f"{d.n_crossings} crossings exceeds the brute-force limit of {limit}")
    if not d.crossings:
        return _finish({0: 1}, False, d.free_loops)

    labels = d.labels
    total: Mapping = {}
    for choice in itertools.product((0, 1), repeat=d.n_crossings):
        parent = {label: label for label in labels}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        exponent = 0
        for crossing, pick in zip(d.crossings, choice):
            pairs, shift = _smoothings(crossing.labels)[pick]
            exponent += shift
            for x, y in pairs:
                parent[find(x)] = find(y)
        loops = len({find(label) for label in labels}) + d.free_loops
        for e, c in _mul({exponent: 1}, _delta_power(loops - 1)).items():
            total[e] = total.get(e, 0) + c
    return LaurentPoly.from_mapping(total, "A")


def jones(d: LinkDiagram, crossing_limit: Optional[int] = None) -> LaurentPoly:
    """Jones polynomial in t: (-A^3)^-w <D> with t = A^-4."""
    w = writhe(d)
    normalized = kauffman_bracket(d, crossing_limit) * LaurentPoly.monomial((-1) ** (w % 2), -3 * w, "A")
    return normalized.in_t()


UNLINK_FACTOR = LaurentPoly.from_mapping({Fraction(1, 2): -1, Fraction(-1, 2): -1}, "t")


# --- Numeric linking oracle ---

def gauss_linking_integral(first: np.ndarray, second: np.ndarray, min_separation: float = 1e-6) -> float:
    """
    Gauss linking integral of two closed polylines of shape (N, 3).

    Each pair of segments contributes its exact solid-angle term, so the sum
    is an integer up to floating error for well separated curves.
    """
    ls = np.asarray(first, dtype=float)
    ks = np.asarray(second, dtype=float)
    if ls.ndim != 2 or ks.ndim != 2 or ls.shape[1] != 3 or ks.shape[1] != 3:
        raise ValueError("Polylines must have shape (N, 3)")
    if not np.allclose(ls[0], ls[-1]):
        ls = np.vstack((ls, ls[:1]))
    if not np.allclose(ks[0], ks[-1]):
        ks = np.vstack((ks, ks[:1]))

    gaps = np.linalg.norm(ls[:, None, :] - ks[None, :, :], axis=-1)
    if gaps.min() < min_separation:
        raise ValueError(f"Polylines intersect within tolerance {min_separation}")

    # Segment endpoints: l_j -> l_{j+1} against k_i -> k_{i+1}.
    l0, l1 = ls[:-1][None, :, :], ls[1:][None, :, :]
    k0, k1 = ks[:-1][:, None, :], ks[1:][:, None, :]
    a = l0 - k0
    b = l0 - k1
    c = l1 - k1
    d = l1 - k0

    def dot(u, v):
        return np.sum(u * v, axis=-1)

    p = dot(a, np.cross(b, c))
    an, bn, cn, dn = (np.linalg.norm(v, axis=-1) for v in (a, b, c, d))
    d1 = an * bn * cn + dot(a, b) * cn + dot(b, c) * an + dot(c, a) * bn
    d2 = an * dn * cn + dot(a, d) * cn + dot(d, c) * an + dot(c, a) * dn
    total = np.sum(np.arctan2(p, d1) + np.arctan2(p, d2))
    return float(total / (2 * np.pi))


def gauss_linking_number(first: np.ndarray, second: np.ndarray, tolerance: Optional[float] = None) -> int:
    """
    The Gauss integral rounded to an integer.

    Raises:
        ValueError: the integral is further than tolerance from every integer.
    """
    tolerance = _limit(tolerance, "gauss_tolerance")
    value = gauss_linking_integral(first, second)
    nearest = int(round(value))
    if abs(value - nearest) > tolerance:
        raise ValueError(f"Gauss integral {value:.6f} is not within {tolerance} of an integer")
    logger.debug("Gauss integral %.6f -> %d", value, nearest)
    return nearest


def _circle(center, u, v, samples: int) -> np.ndarray:
    s = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    return np.asarray(center) + np.outer(np.cos(s), u) + np.outer(np.sin(s), v)


def hopf_embedding(samples: int = 400) -> Tuple[np.ndarray, np.ndarray]:
    """Unit circle in the xy-plane and a unit circle in the xz-plane through its center."""
    first = _circle((0, 0, 0), (1, 0, 0), (0, 1, 0), samples)
    second = _circle((1, 0, 0), (1, 0, 0), (0, 0, 1), samples)
    return first, second


def split_embedding(samples: int = 400) -> Tuple[np.ndarray, np.ndarray]:
    first = _circle((0, 0, 0), (1, 0, 0), (0, 1, 0), samples)
    second = _circle((10, 0, 0), (1, 0, 0), (0, 1, 0), samples)
    return first, second


def torus_link_embedding(samples: int = 800, major: float = 2.0, minor: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """The (2,4) torus link: two parallel (1,2) curves on a standard torus."""
    s = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    curves = []
    for j in range(2):
        theta = 2 * s + j * np.pi
        radius = major + minor * np.cos(theta)
        curves.append(np.column_stack((radius * np.cos(s), radius * np.sin(s), minor * np.sin(theta))))
    return curves[0], curves[1]


# --- Profiles ---

def _poly_key(poly: LaurentPoly) -> str:
    return poly.serialize()


@dataclass(frozen=True)
class Profile:
    """Comparison object for links.

    component_jones holds the Jones polynomial of each component with every
    other component forgotten; linking_numbers holds lk(i, j) for i < j.
    Both are sorted by canonical serialization.
    """

    component_count: int
    component_jones: Tuple[LaurentPoly, ...]
    linking_numbers: Tuple[int, ...]
    whole_jones: LaurentPoly

    def __post_init__(self):
        if len(self.component_jones) != self.component_count:
            raise ValueError("One Jones polynomial per component required")
        pairs = self.component_count * (self.component_count - 1) // 2
        if len(self.linking_numbers) != pairs:
            raise ValueError(f"Expected {pairs} linking numbers, got {len(self.linking_numbers)}")

    def mirrored(self) -> "Profile":
        """Profile of the mirror image: t -> 1/t and linking numbers negated."""
        return Profile(
            self.component_count,
            tuple(sorted((p.inverted() for p in self.component_jones), key=_poly_key)),
            tuple(sorted(-lk for lk in self.linking_numbers)),
            self.whole_jones.inverted(),
        )

    def witnesses(self) -> Dict[str, object]:
        """Orientation-insensitive comparison values keyed by invariant name."""
        values: Dict[str, object] = {
            "component_count": self.component_count,
            "component_jones": tuple(_poly_key(p) for p in self.component_jones),
            "linking_numbers": tuple(sorted(abs(lk) for lk in self.linking_numbers)),
        }
        if self.component_count == 1:
            values["whole_jones"] = _poly_key(self.whole_jones)
        return values

    def to_dict(self) -> Dict[str, object]:
        return {
            "component_count": self.component_count,
            "component_jones": [_poly_key(p) for p in self.component_jones],
            "linking_numbers": list(self.linking_numbers),
            "whole_jones": _poly_key(self.whole_jones),
        }


def component_jones(d: LinkDiagram, crossing_limit: Optional[int] = None) -> List[LaurentPoly]:
    """Jones polynomial of each component on its own, in component order."""
    return [jones(sublink(d, [index]), crossing_limit) for index in range(d.n_components)]


def invariant_profile(d: LinkDiagram, crossing_limit: Optional[int] = None) -> Profile:
    per_component = sorted(component_jones(d, crossing_limit), key=_poly_key)
    profile = Profile(
        component_count=d.n_components,
        component_jones=tuple(per_component),
        linking_numbers=tuple(sorted(pairwise_linking_numbers(d))),
        whole_jones=jones(d, crossing_limit),
    )
    logger.debug("Profile: %s", profile.to_dict())
    return profile
