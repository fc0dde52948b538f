"""Truncated Newton-Puiseux series and bivariate fractional-power series.

A ``PuiseuxSeries`` is a finite sum of terms c * y^q with strictly increasing
rational exponents, plus a certification bound ``trunc_order``: exponents
above the bound are unknown (infinity means the stored terms are the whole
series).  Coefficients are complex floats, each optionally shadowed by an
exact Gaussian rational when the expansion produced one.

``BiSeries`` is the same idea in two variables: the shifted germ
F(Z, W) = f(Z + gamma(W), W) and everything derived from it (derivatives,
products, weighted initial forms) live on an exact support lattice
(i, q) in Z^(>=0) x Q.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .errors import IndeterminateAtTruncation, InsufficientTruncation
from .polycore import BiPoly, ComplexPoint
from .rational import QI

INF = math.inf

_CLEAN_TOL = 1e-12


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _root_of_unity_factor(num: int, den: int):
    """exp(2*pi*i * num/den) as (complex, exact QI or None)."""
    num %= den
    z = cmath.exp(2j * cmath.pi * num / den)
    exact = None
    if num * 4 % den == 0:
        exact = {0: QI(1), 1: QI(0, 1), 2: QI(-1), 3: QI(0, -1)}[num * 4 // den % 4]
    return z, exact


class PuiseuxSeries:
    """Finite fractional power series with a certified truncation bound."""

    __slots__ = ("terms", "trunc_order")

    def __init__(self, terms, trunc_order=INF):
        clean = []
        for item in sorted(terms, key=lambda t: t[0]):
            q, c = item[0], item[1]
            exact_c = item[2] if len(item) > 2 else None
            if exact_c is not None and not isinstance(exact_c, QI):
                exact_c = QI(exact_c)
            if exact_c is not None:
                c = complex(exact_c)
            c = complex(c)
            if c != 0 and not (trunc_order is not INF and q > trunc_order):
                clean.append((Fraction(q), c, exact_c))
        self.terms = tuple(clean)
        self.trunc_order = trunc_order

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def order(self):
        return self.terms[0][0] if self.terms else INF

    def leading_coefficient(self):
        return self.terms[0][1] if self.terms else 0.0

    @property
    def puiseux_mult(self) -> int:
        n = 1
        for q, _, _ in self.terms:
            n = _lcm(n, q.denominator)
        return n

    @property
    def coeffs_exact(self) -> bool:
        return all(e is not None for _, _, e in self.terms)

    @property
    def entire(self) -> bool:
        """True when the stored terms are certified to be the whole series."""
        return self.trunc_order is INF

    def coefficient(self, q: Fraction) -> complex:
        for qq, c, _ in self.terms:
            if qq == q:
                return c
        return 0.0

    # -- derived series -------------------------------------------------------

    def truncate(self, bound: Fraction, keep_equal: bool = True) -> "PuiseuxSeries":
        kept = [(q, c, e) for q, c, e in self.terms
                if q < bound or (keep_equal and q == bound)]
        t = self.trunc_order if self.trunc_order is INF else min(self.trunc_order, bound)
        # dropping known terms makes the stored prefix exact only up to bound
        if self.trunc_order is INF and len(kept) < len(self.terms):
            t = bound
        return PuiseuxSeries(kept, t if t is not INF else INF)

    def with_term(self, q, c, exact_c=None) -> "PuiseuxSeries":
        q = Fraction(q)
        items = [t for t in self.terms if t[0] != q]
        prev = self.coefficient(q)
        newc = prev + complex(c)
        pe = None
        if exact_c is not None:
            old = next((e for qq, _, e in self.terms if qq == q), QI(0))
            if old is not None and isinstance(exact_c, QI):
                pe = old + exact_c
        if newc != 0 or pe:
            items.append((q, newc, pe))
        return PuiseuxSeries(items, self.trunc_order)

    def derivative(self) -> "PuiseuxSeries":
        out = []
        for q, c, e in self.terms:
            if q == 0:
                continue
            out.append((q - 1, c * float(q), e * QI(q) if e is not None else None))
        t = self.trunc_order if self.trunc_order is INF else self.trunc_order - 1
        return PuiseuxSeries(out, t)

    def conjugates(self):
        """All N conjugates, k-th rotating each coefficient by e^(2 pi i k q)."""
        if self.is_zero:
            return [self]
        n = self.puiseux_mult
        out = []
        for k in range(n):
            terms = []
            for q, c, e in self.terms:
                rot, rot_exact = _root_of_unity_factor(k * q.numerator * (n // q.denominator), n)
                terms.append((q, c * rot,
                              e * rot_exact if (e is not None and rot_exact is not None) else None))
            out.append(PuiseuxSeries(terms, self.trunc_order))
        return out

    def eval_t(self, t, ramification: int):
        """Evaluate with y = t^ramification; every q*ramification is integral."""
        acc = 0.0 + 0.0j
        for q, c, _ in self.terms:
            k = q * ramification
            if k.denominator != 1:
                raise ValueError(f"exponent {q} not integral at ramification {ramification}")
            acc = acc + c * t ** int(k)
        return acc

    def __repr__(self):
        return f"PuiseuxSeries({format_series(self)!r})"

    def __eq__(self, other):
        return (isinstance(other, PuiseuxSeries)
                and self.terms == other.terms
                and self.trunc_order == other.trunc_order)

    def __hash__(self):
        return hash((self.terms, self.trunc_order))


def format_series(s: PuiseuxSeries, max_terms: int = 6) -> str:
    if s.is_zero:
        return "0"
    parts = []
    for q, c, e in s.terms[:max_terms]:
        if q == 0:
            mono = ""
        elif q == 1:
            mono = "y"
        else:
            mono = f"y^{q}"
        if e is not None:
            cs = str(e)
        else:
            cs = f"{c:.6g}".replace("(", "").replace(")", "")
        parts.append(f"{cs}*{mono}" if mono else cs)
    if len(s.terms) > max_terms:
        parts.append("...")
    body = " + ".join(parts)
    if s.trunc_order is not INF:
        body += f" + O(y^{s.trunc_order})"
    return body


def zero_series(trunc_order=INF) -> PuiseuxSeries:
    return PuiseuxSeries((), trunc_order)


def monomial_series(q, c, exact_c=None, trunc_order=INF) -> PuiseuxSeries:
    return PuiseuxSeries([(Fraction(q), c, exact_c)], trunc_order)


# ---------------------------------------------------------------------------
# order of a difference, conjugate classes, contact order
# ---------------------------------------------------------------------------

def _diff_terms(a: PuiseuxSeries, b: PuiseuxSeries):
    """Merged (q, coefficient difference) pairs, ascending in q."""
    qs = sorted({q for q, _, _ in a.terms} | {q for q, _, _ in b.terms})
    return [(q, a.coefficient(q) - b.coefficient(q)) for q in qs]


def _scale(a: PuiseuxSeries, b: PuiseuxSeries) -> float:
    vals = [abs(c) for _, c, _ in a.terms] + [abs(c) for _, c, _ in b.terms]
    return max(vals, default=1.0)


def difference_order(a: PuiseuxSeries, b: PuiseuxSeries, tol: float = _CLEAN_TOL):
    """(order, certified): smallest exponent where a and b differ.

    ``certified`` is False when no difference was seen up to the common
    truncation bound, in which case ``order`` is that bound (a lower bound).
    """
    bound = min(a.trunc_order, b.trunc_order)
    tol_eff = tol * _scale(a, b)
    for q, d in _diff_terms(a, b):
        if q > bound:
            break
        if abs(d) > tol_eff:
            return q, True
    return bound, False


def same_conjugate_class(a: PuiseuxSeries, b: PuiseuxSeries, tol: float = _CLEAN_TOL) -> bool:
    """True when b coincides with some conjugate of a up to the common bound."""
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    if a.puiseux_mult != b.puiseux_mult:
        return False
    for conj in a.conjugates():
        order, certified = difference_order(conj, b, tol)
        if not certified:
            if order is INF or (conj.entire and b.entire):
                return True
            # identical through the bound counts as the same class
            return True
    return False


def contact_order(alpha: PuiseuxSeries, beta: PuiseuxSeries, tol: float = _CLEAN_TOL):
    """Contact order of the two arcs: infinity on the same conjugate class,
    otherwise the maximum order of coincidence over conjugate pairs."""
    if same_conjugate_class(alpha, beta, tol):
        return INF
    best = None
    undecided = None
    for ca in alpha.conjugates():
        for cb in beta.conjugates():
            order, certified = difference_order(ca, cb, tol)
            if certified:
                best = order if best is None else max(best, order)
            else:
                undecided = order if undecided is None else max(undecided, order)
    if undecided is not None and (best is None or undecided >= best):
        raise IndeterminateAtTruncation(
            f"contact order only bounded below by truncation {undecided}")
    return best


def evaluate_arc(gamma: PuiseuxSeries, u: complex, e, y: complex) -> ComplexPoint:
    """Point (gamma(y) + u y^e, y) via the principal ramified parameter.

    With N the lcm of gamma's ramification and den(e), set t = y^(1/N)
    (principal branch); all exponents become integral in t.
    """
    e = Fraction(e)
    n = _lcm(gamma.puiseux_mult, e.denominator)
    t = complex(y) ** (1.0 / n) if y != 0 else 0.0j
    z = gamma.eval_t(t, n) + u * t ** int(e * n)
    return ComplexPoint(z, t**n)


# ---------------------------------------------------------------------------
# bivariate fractional-power series
# ---------------------------------------------------------------------------

class BiSeries:
    """Sparse series sum c_(i,q) Z^i W^q, i integer >= 0, q rational.

    ``exact`` marks QI coefficients; ``trunc_order`` certifies the W-depth:
    terms with q <= trunc_order are correct, beyond is unknown.
    """

    __slots__ = ("terms", "exact", "trunc_order")

    def __init__(self, terms=None, exact=False, trunc_order=INF):
        self.exact = exact
        self.trunc_order = trunc_order
        clean = {}
        if terms:
            if exact:
                for (i, q), c in terms.items():
                    if not isinstance(c, QI):
                        c = QI(c)
                    if c:
                        clean[(int(i), Fraction(q))] = c
            else:
                scale = max((abs(complex(c)) for c in terms.values()), default=0.0)
                tol = _CLEAN_TOL * scale
                for (i, q), c in terms.items():
                    c = complex(c)
                    if abs(c) > tol:
                        clean[(int(i), Fraction(q))] = c
        self.terms = clean

    # -- ring operations ------------------------------------------------------

    def _promote(self, other: "BiSeries"):
        if self.exact == other.exact:
            return self, other
        a = self if not self.exact else self.to_numeric()
        b = other if not other.exact else other.to_numeric()
        return a, b

    def to_numeric(self) -> "BiSeries":
        if not self.exact:
            return self
        return BiSeries({k: complex(c) for k, c in self.terms.items()},
                        exact=False, trunc_order=self.trunc_order)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        a, b = self._promote(other)
        out = dict(a.terms)
        zero = QI(0) if a.exact else 0.0
        for k, c in b.terms.items():
            out[k] = out.get(k, zero) + c
        return BiSeries(out, exact=a.exact,
                        trunc_order=min(a.trunc_order, b.trunc_order))

    def __neg__(self):
        return BiSeries({k: -c for k, c in self.terms.items()},
                        exact=self.exact, trunc_order=self.trunc_order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "BiSeries") -> "BiSeries":
        a, b = self._promote(other)
        out = {}
        zero = QI(0) if a.exact else 0.0
        for (i1, q1), c1 in a.terms.items():
            for (i2, q2), c2 in b.terms.items():
                k = (i1 + i2, q1 + q2)
                out[k] = out.get(k, zero) + c1 * c2
        # a product is certified only where each factor is: the cheapest
        # uncertified cross term sits at (order of one) + (trunc of other)
        t = min(a.trunc_order + b.w_order(), b.trunc_order + a.w_order()) \
            if a.terms and b.terms else min(a.trunc_order, b.trunc_order)
        return BiSeries(out, exact=a.exact, trunc_order=t)

    def scaled(self, c) -> "BiSeries":
        if self.exact and isinstance(c, QI):
            return BiSeries({k: v * c for k, v in self.terms.items()},
                            exact=True, trunc_order=self.trunc_order)
        c = complex(c)
        return BiSeries({k: complex(v) * c for k, v in self.terms.items()},
                        exact=False, trunc_order=self.trunc_order)

    # -- calculus ---------------------------------------------------------------

    def diff_z(self) -> "BiSeries":
        out = {}
        for (i, q), c in self.terms.items():
            if i > 0:
                out[(i - 1, q)] = c * (QI(i) if self.exact else float(i))
        return BiSeries(out, exact=self.exact, trunc_order=self.trunc_order)

    def diff_w(self) -> "BiSeries":
        out = {}
        for (i, q), c in self.terms.items():
            if q != 0:
                out[(i, q - 1)] = c * (QI(q) if self.exact else float(q))
        t = self.trunc_order if self.trunc_order is INF else self.trunc_order - 1
        return BiSeries(out, exact=self.exact, trunc_order=t)

    # -- structure ----------------------------------------------------------------

    def w_order(self):
        return min((q for _, q in self.terms), default=INF)

    def dots(self, certified_only: bool = True):
        """Support points (i, q); restricted to the certified depth by default."""
        if certified_only and self.trunc_order is not INF:
            return [k for k in self.terms if k[1] <= self.trunc_order]
        return list(self.terms)

    def column(self, i: int):
        """The coefficient series of Z^i as sorted (q, coefficient) pairs."""
        out = [(q, c) for (ii, q), c in self.terms.items() if ii == i]
        out.sort(key=lambda t: t[0])
        return out

    def z_degree(self):
        return max((i for i, _ in self.terms), default=-1)

    def eval_numeric(self, zval, t, ramification: int):
        acc = 0.0 + 0.0j
        for (i, q), c in self.terms.items():
            k = q * ramification
            if k.denominator != 1:
                raise ValueError("ramification does not clear exponents")
            acc = acc + complex(c) * zval**i * t ** int(k)
        return acc

    def __repr__(self):
        n = len(self.terms)
        return f"BiSeries({n} terms, exact={self.exact}, trunc={self.trunc_order})"


def bipoly_to_biseries(f: BiPoly) -> BiSeries:
    return BiSeries({(i, Fraction(j)): c for (i, j), c in f.terms.items()},
                    exact=True, trunc_order=INF)


def substitute_shift(f: BiPoly, gamma: PuiseuxSeries, trunc=None) -> BiSeries:
    """F(Z, W) = f(Z + gamma(W), W) on the exact support lattice.

    The result is certified to gamma's own truncation bound; asking for a
    deeper ``trunc`` raises InsufficientTruncation.  Exact arithmetic is used
    whenever gamma's coefficients are exact, bypassing the cleanup tolerance.
    """
    certified = gamma.trunc_order
    if trunc is not None and certified is not INF and Fraction(trunc) > certified:
        raise InsufficientTruncation(
            f"shift certified only to W^{certified}, requested {trunc}")
    exact = gamma.coeffs_exact
    if exact:
        shift_terms = {(1, Fraction(0)): QI(1)}
        for q, _, e in gamma.terms:
            shift_terms[(0, q)] = shift_terms.get((0, q), QI(0)) + e
    else:
        shift_terms = {(1, Fraction(0)): 1.0 + 0.0j}
        for q, c, _ in gamma.terms:
            shift_terms[(0, q)] = shift_terms.get((0, q), 0.0) + c
    shift = BiSeries(shift_terms, exact=exact, trunc_order=INF)

    powers = {0: BiSeries({(0, Fraction(0)): QI(1) if exact else 1.0},
                          exact=exact, trunc_order=INF)}
    for k in range(1, f.z_degree() + 1):
        powers[k] = powers[k - 1] * shift

    out = BiSeries({}, exact=exact, trunc_order=INF)
    for (i, j), c in f.terms.items():
        mono = BiSeries({(0, Fraction(j)): c if exact else complex(c)},
                        exact=exact, trunc_order=INF)
        out = out + powers[i] * mono
    out.trunc_order = certified
    return out
