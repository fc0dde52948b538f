"""Exact Newton polygon geometry on rational dot sets.

Dots are support points (i, q) of a BiSeries (or polynomial): i the Z-power,
q the rational W-exponent.  The polygon is the lower-left hull; its edge
co-slopes (the y/x ratio of a line's intercepts, i.e. minus the slope) grow
strictly from the bottom edge upward.  The support-line scan through
(1, h-1) computes the gradient degree of a polar from the polygon of F_Z.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientTruncation, NoDots
from .series import INF, BiSeries


@dataclass(frozen=True)
class Edge:
    right: tuple          # (i, q) with the larger i
    left: tuple           # (i, q) with the smaller i
    coslope: Fraction


@dataclass(frozen=True)
class NewtonPolygon:
    dots: tuple           # all support dots, sorted
    vertices: tuple       # hull vertices, rightmost (largest i) first
    edges: tuple          # Edge tuple, ascending co-slope (E_1 first)

    @property
    def coslopes(self):
        return tuple(e.coslope for e in self.edges)

    @property
    def tan_theta_1(self):
        return self.edges[0].coslope if self.edges else None

    @property
    def tan_theta_top(self):
        return self.edges[-1].coslope if self.edges else None

    @property
    def top_edge(self):
        """The edge whose left vertex sits in column 0, when present."""
        if self.edges and self.edges[-1].left[0] == 0:
            return self.edges[-1]
        return None

    def supports_on_or_above(self, coslope: Fraction, anchor) -> bool:
        """True when every dot lies on or above the line of the given
        co-slope through ``anchor`` (exact rational test)."""
        ai, aq = anchor
        ref = aq + coslope * ai
        return all(q + coslope * i >= ref for i, q in self.dots)


def _dots_of(obj):
    if isinstance(obj, BiSeries):
        return [(i, Fraction(q)) for i, q in obj.dots(certified_only=True)]
    return [(int(i), Fraction(q)) for i, q in obj]


def build_polygon(source) -> NewtonPolygon:
    """Lower hull of the dot set of a BiSeries (or iterable of dots)."""
    dots = sorted(set(_dots_of(source)))
    if not dots:
        raise NoDots("cannot build a Newton polygon with no dots")
    # one representative per column: the lowest q
    lowest = {}
    for i, q in dots:
        if i not in lowest or q < lowest[i]:
            lowest[i] = q
    pts = sorted(lowest.items())            # ascending i
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep the chain convex from below
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    # drop the flat tail right of the lowest vertex: those edges have
    # non-positive co-slope and play no role for root orders
    edges = []
    for a, b in zip(hull, hull[1:]):
        co = (a[1] - b[1]) / (b[0] - a[0])
        edges.append(Edge(right=b, left=a, coslope=co))
    edges = [e for e in edges if e.coslope > 0]
    if edges:
        # vertices rightmost first, edges ascending co-slope
        edges = list(reversed(edges))
        vertices = [edges[0].right] + [e.left for e in edges]
    else:
        vertices = [min(hull, key=lambda p: (p[1], p[0]))]
    return NewtonPolygon(dots=tuple(dots), vertices=tuple(vertices),
                         edges=tuple(edges))


def weighted_order(G: BiSeries, e) -> Fraction:
    """O_w(e)(G) = min over support of (i*e + q), weight e on Z and 1 on W."""
    form, order = weighted_initial_form(G, e)
    return order


def weighted_initial_form(G: BiSeries, e):
    """(initial form, weighted order) of G under weights Z -> e, W -> 1.

    Raises InsufficientTruncation when the certified support cannot rule out
    a lighter term hiding beyond the truncation bound.
    """
    e = Fraction(e)
    dots = G.dots(certified_only=True)
    if not dots:
        raise NoDots("weighted initial form of an (effectively) zero series")
    best = min(i * e + q for i, q in dots)
    if G.trunc_order is not INF and best > G.trunc_order:
        raise InsufficientTruncation(
            f"weighted order {best} exceeds certified depth {G.trunc_order}")
    keep = {(i, q): c for (i, q), c in G.terms.items()
            if i * e + q == best and (G.trunc_order is INF or q <= G.trunc_order)}
    form = BiSeries(keep, exact=G.exact, trunc_order=G.trunc_order)
    return form, best


def sigma_star_support_line(fz_polygon: NewtonPolygon, h):
    """Steepest-touching support line through (1, h-1) over the shifted dots.

    Every dot (i, q) of F_Z, shifted to (i+1, q), must lie on or above the
    line; sigma* is its co-slope, attained by the returned touching dots.
    """
    h = Fraction(h)
    candidates = [(i, q) for i, q in fz_polygon.dots if i >= 1]
    if not candidates:
        raise NoDots("F_Z has no dots right of column 0")
    sigma = max((h - 1 - q) / i for i, q in candidates)
    touching = tuple(sorted((i, q) for i, q in candidates
                            if (h - 1 - q) / i == sigma))
    return sigma, touching
