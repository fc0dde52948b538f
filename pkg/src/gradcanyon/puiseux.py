"""Newton-Puiseux expansion of bivariate germs and polar extraction.

The expansion walks the classical polygon iteration: pick an edge of
co-slope mu, solve the edge polynomial for leading coefficients, shift
Z -> Z + c W^mu and recurse.  Exact squarefree factorization over QQ(i) is
done first, so every bundle's multiplicity is exact and edge polynomials
only branch on genuinely distinct roots.  Exponents are exact rationals
throughout; coefficients are complex floats, shadowed by exact Gaussian
rationals whenever the edge roots can be verified exactly.

Polars are the local Newton-Puiseux roots of f_z; each carries
h = O_W(f(gamma(W), W)), the vanishing order of f along the polar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .errors import (IndeterminateAtTruncation, NotMiniRegular,
                     SolverDivergence)
from .polycore import BiPoly
from .rational import QI, reconstruct_qi
from .series import (INF, BiSeries, PuiseuxSeries, bipoly_to_biseries,
                     same_conjugate_class, substitute_shift)

_CLUSTER_TOL = 1e-7


# ---------------------------------------------------------------------------
# simultaneous root iteration (Aberth-Ehrlich)
# ---------------------------------------------------------------------------

def aberth_roots(coeffs, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
    """All complex roots of sum coeffs[k] x^k by Aberth-Ehrlich iteration.

    ``coeffs`` is low-to-high with a nonzero leading entry.  Raises
    SolverDivergence if the simultaneous iteration fails to settle.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    radius = 1.0 + max(abs(c[:-1] / c[-1]))
    k = np.arange(n)
    x = 0.9 * radius * np.exp(2j * np.pi * (k + 0.25) / n) + 0.1j
    dcoef = c[1:] * np.arange(1, n + 1)
    for _ in range(max_iter):
        p = np.polyval(c[::-1], x)
        dp = np.polyval(dcoef[::-1], x)
        ratio = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.0)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        inv_sum = (1.0 / diff).sum(axis=1) - 1.0   # remove the diagonal 1/1
        denom = 1.0 - ratio * inv_sum
        step = np.where(denom != 0, ratio / np.where(denom == 0, 1, denom), ratio)
        x = x - step
        if np.max(np.abs(step) / (1.0 + np.abs(x))) < tol:
            return x
    raise SolverDivergence(
        f"Aberth iteration did not converge for degree {n} "
        f"(residual {np.max(np.abs(np.polyval(c[::-1], x))):.2e})")


def _cluster(roots, tol=_CLUSTER_TOL):
    """Group numerically coincident roots; returns [(center, count)]."""
    out = []
    for r in sorted(roots, key=lambda v: (v.real, v.imag)):
        for slot in out:
            if abs(slot[0] - r) <= tol * (1.0 + abs(r)):
                slot[0] = (slot[0] * slot[1] + r) / (slot[1] + 1)
                slot[1] += 1
                break
        else:
            out.append([r, 1])
    return [(complex(r), int(k)) for r, k in out]


# ---------------------------------------------------------------------------
# edge polynomials
# ---------------------------------------------------------------------------

def _edge_roots(edge_coeffs, is_exact):
    """Distinct nonzero roots of an edge polynomial with multiplicities.

    Returns [(complex root, exact QI or None, multiplicity)].  Exact inputs
    are squarefree-factored over QQ(i) first so the iteration only ever sees
    simple roots; numeric inputs fall back to clustering.
    """
    if is_exact:
        out = []
        for fac, mult in exact.univariate_sqf_roots_structure(edge_coeffs):
            deg = len(fac) - 1
            if deg < 1:
                continue
            if deg == 1:
                root = -fac[0] / fac[1]
                out.append((complex(root), root, mult))
                continue
            for r in aberth_roots([complex(c) for c in fac]):
                cand = reconstruct_qi(r, max_den=64)
                if cand is not None:
                    val = QI(0)
                    for k, ck in enumerate(fac):
                        val = val + ck * cand**k
                    if not val:
                        out.append((complex(cand), cand, mult))
                        continue
                out.append((complex(r), None, mult))
        return [t for t in out if t[0] != 0]
    coeffs = [complex(c) for c in edge_coeffs]
    roots = aberth_roots(coeffs)
    return [(r, None, k) for r, k in _cluster(roots) if abs(r) > 1e-13]


def _shift_once(G: BiSeries, mu: Fraction, c, exact_c) -> BiSeries:
    """G(Z + c W^mu, W), expanding binomially column by column."""
    use_exact = G.exact and exact_c is not None
    if not use_exact and G.exact:
        G = G.to_numeric()
    coef = exact_c if use_exact else complex(c)
    zero = QI(0) if use_exact else 0.0
    out = {}
    # binomial table up to the z-degree
    zdeg = G.z_degree()
    binom = [[1] * (k + 1) for k in range(zdeg + 1)]
    for n in range(2, zdeg + 1):
        for k in range(1, n):
            binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k]
    cpow = [QI(1) if use_exact else 1.0 + 0.0j]
    for _ in range(zdeg):
        cpow.append(cpow[-1] * coef)
    for (i, q), a in G.terms.items():
        for k in range(i + 1):
            key = (k, q + mu * (i - k))
            term = a * cpow[i - k] * (QI(binom[i][k]) if use_exact else float(binom[i][k]))
            out[key] = out.get(key, zero) + term
    return BiSeries(out, exact=use_exact, trunc_order=G.trunc_order)


# ---------------------------------------------------------------------------
# the polygon iteration
# ---------------------------------------------------------------------------

def _z_valuation(G: BiSeries) -> int:
    """Largest k with Z^k dividing G (on the certified support)."""
    return min((i for i, _ in G.terms), default=0)


def _positive_edges(G: BiSeries, prev: Fraction):
    """Lower-hull edges of co-slope > prev, as (mu, [(i, q), ...]) lists."""
    lowest = {}
    for (i, q) in G.dots(certified_only=False):
        if i not in lowest or q < lowest[i]:
            lowest[i] = q
    pts = sorted(lowest.items())
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    edges = []
    for a, b in zip(hull, hull[1:]):
        mu = (a[1] - b[1]) / (b[0] - a[0])     # co-slope, a left of b
        if mu > prev:
            dots = [(i, q) for (i, q) in G.terms
                    if q + mu * i == a[1] + mu * a[0]]
            edges.append((mu, sorted(dots)))
    return edges


def _expand(G: BiSeries, prev, prefix, budget: int, trunc: Fraction, out: list):
    """Collect the ``budget`` roots of G of order > prev extending prefix."""
    if budget == 0:
        return
    val = _z_valuation(G)
    if val > 0:
        # the prefix itself is a root (exactly when G is exact)
        depth = INF if (G.exact and G.trunc_order is INF) \
            else max(trunc, prefix[-1][0] if prefix else Fraction(0))
        for _ in range(val):
            out.append(PuiseuxSeries(list(prefix), depth))
            budget -= 1
        if budget <= 0:
            if budget < 0:
                raise ArithmeticError("root budget overdrawn at exact factor")
            return
        G = BiSeries({(i - val, q): c for (i, q), c in G.terms.items()},
                     exact=G.exact, trunc_order=G.trunc_order)
    edges = _positive_edges(G, prev)
    # emit a branch once it is certified deep enough and fully split
    if budget == 1 and prefix and prefix[-1][0] > trunc:
        out.append(PuiseuxSeries(list(prefix), prefix[-1][0]))
        return
    if not edges:
        raise ArithmeticError("polygon exhausted before the root budget")
    used = 0
    for mu, dots in edges:
        if budget == 1 and mu > trunc and prefix:
            out.append(PuiseuxSeries(list(prefix), max(trunc, prefix[-1][0])))
            return
        i_lo = min(i for i, _ in dots)
        i_hi = max(i for i, _ in dots)
        coeffs = [QI(0) if G.exact else 0.0] * (i_hi - i_lo + 1)
        for i, q in dots:
            coeffs[i - i_lo] = G.terms[(i, q)]
        for root, exact_root, mult in _edge_roots(coeffs, G.exact):
            shifted = _shift_once(G, mu, root, exact_root)
            _expand(shifted, mu, prefix + [(mu, root, exact_root)],
                    mult, trunc, out)
            used += mult
    if used != budget:
        raise ArithmeticError(
            f"edge accounting found {used} branches, expected {budget}")


@dataclass(frozen=True)
class RootBundle:
    """A conjugate class of Newton-Puiseux roots with exact multiplicity."""
    series: PuiseuxSeries
    multiplicity: int
    conjugate_class_size: int

    @property
    def slots(self) -> int:
        """Number of root-list entries this bundle accounts for."""
        return self.multiplicity * self.conjugate_class_size


def newton_puiseux_roots(g: BiPoly, trunc) -> list:
    """Local Newton-Puiseux roots of g (order > 0), bundled by conjugacy.

    g must be mini-regular in z.  Each bundle's series is certified at least
    to ``trunc`` and deep enough that distinct bundles are separated.
    """
    if not g or g.z_degree() < 1:
        raise ValueError("newton_puiseux_roots needs deg_z g >= 1")
    if not g.is_mini_regular():
        raise NotMiniRegular("g is not mini-regular in z")
    trunc = Fraction(trunc)
    bundles = []
    for fac_terms, mult in exact.squarefree_decomposition(g.terms):
        fac = BiPoly(fac_terms)
        if fac.z_degree() < 1:
            continue
        budget = min((i for (i, j) in fac.terms if j == 0), default=None)
        if budget is None:
            raise NotMiniRegular("squarefree factor vanishes on w = 0")
        if budget == 0:
            continue                      # no local roots in this factor
        branches: list = []
        _expand(bipoly_to_biseries(fac), Fraction(0), [], budget, trunc,
                branches)
        # group the branches of this factor into conjugate classes
        remaining = list(branches)
        while remaining:
            rep = remaining.pop(0)
            cls = [rep]
            rest = []
            for other in remaining:
                if same_conjugate_class(rep, other):
                    cls.append(other)
                else:
                    rest.append(other)
            remaining = rest
            n = rep.puiseux_mult
            if len(cls) != n:
                raise ArithmeticError(
                    f"conjugate class size {len(cls)} != ramification {n}")
            bundles.append(RootBundle(series=rep, multiplicity=mult,
                                      conjugate_class_size=n))
    total = sum(b.slots for b in bundles)
    expected = min(i for (i, j) in g.terms if j == 0)
    if total != expected:
        raise ArithmeticError(
            f"bundles cover {total} roots, expected {expected}")
    return bundles


# ---------------------------------------------------------------------------
# polars and the vanishing order h
# ---------------------------------------------------------------------------

@dataclass
class PolarRecord:
    """A polar bundle with its h-value; gradient degree filled in later."""
    root: RootBundle
    h: object                 # Fraction or math.inf
    h_coeff: object           # leading coefficient of F(0, W), None when h = inf
    d_gr: object = None       # Fraction or math.inf, set by canyon analysis
    canyon_id: object = None

    @property
    def series(self) -> PuiseuxSeries:
        return self.root.series


def h_value(f: BiPoly, gamma: PuiseuxSeries):
    """(h, a) with F(0, W) = a W^h + ...; (inf, None) when f(gamma) = 0.

    The infinite case is only reported when an exact check confirms gamma is
    a root of f: either the shift is exact and entire, or gamma matches a
    branch of gcd(f, f_z).  Otherwise the truncated evidence raises
    IndeterminateAtTruncation.
    """
    F = substitute_shift(f, gamma)
    col = [(q, c) for q, c in F.column(0)
           if F.trunc_order is INF or q <= F.trunc_order]
    if col:
        return col[0][0], col[0][1]
    if F.exact and F.trunc_order is INF:
        return INF, None
    # truncated residual vanished; confirm against the multiple-root locus
    d = BiPoly(exact.gcd(f.terms, f.diff_z().terms))
    if d.z_degree() >= 1:
        Fd = substitute_shift(d, gamma)
        dcol = [(q, c) for q, c in Fd.column(0)
                if Fd.trunc_order is INF or q <= Fd.trunc_order]
        if not dcol:
            return INF, None
    raise IndeterminateAtTruncation(
        "f(gamma) vanishes to the truncation bound but gamma is not "
        "certified as a root of f; expand deeper")


def polars(f: BiPoly, trunc=None) -> list:
    """Polar bundles of f (roots of f_z) with their h-values.

    The default truncation is 2*(1 + max h), found by a bootstrap pass and
    deepened automatically; pass ``trunc`` to override.
    """
    if not f.is_mini_regular():
        raise NotMiniRegular("f is not mini-regular in z")
    m = f.order()
    if m is None or m < 2:
        raise ValueError("polars need O(f) >= 2")
    fz = f.diff_z()
    guess = Fraction(trunc) if trunc is not None else Fraction(2 * (1 + f.degree()))
    for _ in range(6):
        bundles = newton_puiseux_roots(fz, guess)
        try:
            records = []
            for b in bundles:
                h, a = h_value(f, b.series)
                records.append(PolarRecord(root=b, h=h, h_coeff=a))
        except IndeterminateAtTruncation:
            guess *= 2
            continue
        finite = [r.h for r in records if r.h is not INF]
        needed = 2 * (1 + max(finite, default=Fraction(1)))
        if trunc is None and needed > guess:
            guess = needed
            continue
        return records
    raise IndeterminateAtTruncation(
        f"polar expansion did not stabilize below truncation {guess}")


def residual_magnitudes(g: BiPoly, series: PuiseuxSeries, t_values):
    """|g(series(t^N), t^N)| on a t-grid, for residual-certification checks."""
    from numpy.polynomial import polynomial as npp
    C = g.coeff_matrix()
    n = series.puiseux_mult
    out = []
    for t in t_values:
        z = series.eval_t(complex(t), n)
        w = complex(t) ** n
        out.append(abs(complex(npp.polyval2d(z, w, C))))
    return out
