"""Exact bivariate polynomials and pointwise curvature of their level sets.

``BiPoly`` stores a sparse term map (i, j) -> QI for z^i w^j.  Everything a
germ analysis needs downstream lives here: parsing, exact derivatives,
leading-form structure, mini-regularization by an exact unitary change of
coordinates, and the numeric curvature evaluator

    K = 2 |delta|^2 / (|f_z|^2 + |f_w|^2)^3,
    delta = 2 f_z f_w f_zw - f_zz f_w^2 - f_ww f_z^2,

which is the (sign-flipped) Gauss curvature of the Riemann surface f = c.
"""

from __future__ import annotations

import functools
import re as _re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npp

from . import exact
from .errors import (ExhaustedCandidates, NotMiniRegular,
                     PolynomialSyntaxError, VanishingGradient)
from .rational import QI, QI_ONE, QI_ZERO


class BiPoly:
    """Immutable sparse bivariate polynomial over the Gaussian rationals."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if not isinstance(c, QI):
                c = QI(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("BiPoly is immutable")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, QI_ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return BiPoly(out)

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QI):
            return BiPoly({k: c * other for k, c in self.terms.items()})
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                s = out.get(k, QI_ZERO) + c1 * c2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return BiPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            return self * QI(other) if not isinstance(other, QI) else self * other
        return NotImplemented

    def __pow__(self, n: int):
        out, base = BiPoly({(0, 0): QI_ONE}), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and structure ---------------------------------------------

    def diff_z(self):
        return BiPoly({(i - 1, j): c * QI(i)
                       for (i, j), c in self.terms.items() if i > 0})

    def diff_w(self):
        return BiPoly({(i, j - 1): c * QI(j)
                       for (i, j), c in self.terms.items() if j > 0})

    def order(self):
        """Total order O(f) = min(i + j); None for the zero polynomial."""
        if not self.terms:
            return None
        return min(i + j for i, j in self.terms)

    def degree(self):
        if not self.terms:
            return None
        return max(i + j for i, j in self.terms)

    def z_degree(self):
        return max((i for i, _ in self.terms), default=-1)

    def w_degree(self):
        return max((j for _, j in self.terms), default=-1)

    def lowest_form(self):
        """Homogeneous form of degree O(f)."""
        m = self.order()
        return BiPoly({(i, j): c for (i, j), c in self.terms.items()
                       if i + j == m})

    def is_mini_regular(self):
        """True when the lowest form contains z^m, m = O(f)."""
        m = self.order()
        return m is not None and (m, 0) in self.terms

    def coefficient(self, i, j):
        return self.terms.get((i, j), QI_ZERO)

    def eval_qi(self, z: QI, w: QI) -> QI:
        acc = QI_ZERO
        for (i, j), c in self.terms.items():
            acc = acc + c * z**i * w**j
        return acc

    def compose_linear(self, a: QI, b: QI, c: QI, d: QI) -> "BiPoly":
        """f(a z + b w, c z + d w) by exact binomial expansion."""
        znew = BiPoly({(1, 0): a, (0, 1): b})
        wnew = BiPoly({(1, 0): c, (0, 1): d})
        zp = {0: BiPoly({(0, 0): QI_ONE})}
        wp = {0: BiPoly({(0, 0): QI_ONE})}
        for k in range(1, self.z_degree() + 1):
            zp[k] = zp[k - 1] * znew
        for k in range(1, self.w_degree() + 1):
            wp[k] = wp[k - 1] * wnew
        out = BiPoly()
        for (i, j), coef in self.terms.items():
            out = out + (zp[i] * wp[j]) * coef
        return out

    def coeff_matrix(self) -> np.ndarray:
        """Dense complex coefficient array C with C[i, j] <-> z^i w^j."""
        C = np.zeros((self.z_degree() + 1, self.w_degree() + 1), dtype=complex)
        for (i, j), c in self.terms.items():
            C[i, j] = complex(c)
        return C

    def max_coeff_abs(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def __repr__(self):
        return f"BiPoly({format_poly(self)!r})"


# ---------------------------------------------------------------------------
# parsing / printing
# ---------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(\d+)|([zw])|(\^)|(\*)|(/)|([+-])|(\()|(\))|(i)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if m.group(10) is not None:
            ch = m.group(10)
            if ch == ".":
                raise PolynomialSyntaxError(
                    "non-rational coefficient literal", m.start(10))
            raise PolynomialSyntaxError(f"unexpected character {ch!r}",
                                        m.start(10))
        for gi, kind in ((1, "int"), (2, "var"), (3, "^"), (4, "*"),
                         (5, "/"), (6, "sign"), (7, "("), (8, ")"),
                         (9, "i")):
            if m.group(gi) is not None:
                tokens.append((kind, m.group(gi), m.start(gi)))
                break
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None):
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise PolynomialSyntaxError(
                f"expected {kind}, found {tok[1]!r}", tok[2])
        self.k += 1
        return tok

    def parse(self) -> BiPoly:
        total = {}
        sign = 1
        kind, val, pos = self.peek()
        if kind == "sign":
            sign = -1 if val == "-" else 1
            self.take()
        while True:
            coef, iz, jw = self.term()
            if sign < 0:
                coef = -coef
            key = (iz, jw)
            s = total.get(key, QI_ZERO) + coef
            if s:
                total[key] = s
            else:
                total.pop(key, None)
            kind, val, pos = self.peek()
            if kind == "end":
                break
            if kind != "sign":
                raise PolynomialSyntaxError(
                    f"expected '+' or '-', found {val!r}", pos)
            sign = -1 if val == "-" else 1
            self.take()
        return BiPoly(total)

    def term(self):
        coef = None
        kind, val, pos = self.peek()
        if kind == "int":
            coef = QI(self.rational())
        elif kind == "(":
            coef = self.complex_coef()
        if coef is not None and self.peek()[0] == "*":
            self.take()
        iz = jw = 0
        seen = coef is not None
        kind, val, pos = self.peek()
        if kind == "var" and val == "z":
            self.take()
            iz = self.exponent()
            seen = True
            if self.peek()[0] == "*":
                self.take()
            kind, val, pos = self.peek()
        if kind == "var" and val == "w":
            self.take()
            jw = self.exponent()
            seen = True
        if not seen:
            kind, val, pos = self.peek()
            raise PolynomialSyntaxError(
                f"expected a term, found {val!r}", pos)
        return (coef if coef is not None else QI_ONE), iz, jw

    def exponent(self) -> int:
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("int")
            return int(tok[1])
        return 1

    def rational(self) -> Fraction:
        tok = self.take("int")
        num = int(tok[1])
        if self.peek()[0] == "/":
            self.take()
            den_tok = self.take("int")
            den = int(den_tok[1])
            if den == 0:
                raise PolynomialSyntaxError("zero denominator", den_tok[2])
            return Fraction(num, den)
        return Fraction(num)

    def signed_rational(self) -> Fraction:
        sign = 1
        if self.peek()[0] == "sign":
            sign = -1 if self.take()[1] == "-" else 1
        return sign * self.rational()

    def complex_coef(self) -> QI:
        self.take("(")
        re_part = self.signed_rational()
        sign_tok = self.take("sign")
        s = -1 if sign_tok[1] == "-" else 1
        im_part = s * self.rational()
        self.take("*")
        self.take("i")
        self.take(")")
        return QI(re_part, im_part)


def parse_polynomial(text: str) -> BiPoly:
    """Parse the term grammar ``[coef][*][z[^n]][*][w[^n]]`` joined by +/-.

    Coefficients are integers, fractions ``p/q`` or Gaussian rationals
    ``(a+b*i)``.  Terms with equal exponents are summed; zero sums drop out.
    """
    if not text or not text.strip():
        raise PolynomialSyntaxError("empty polynomial", 0)
    return _Parser(text).parse()


def _fmt_coef(c: QI) -> str:
    return str(c)


def format_poly(f: BiPoly) -> str:
    """Canonical text form (ascending total degree, z-power descending)."""
    if not f.terms:
        return "0"
    keys = sorted(f.terms, key=lambda k: (k[0] + k[1], -k[0]))
    parts = []
    for i, j in keys:
        c = f.terms[(i, j)]
        mono = "*".join(p for p in (
            f"z^{i}" if i > 1 else ("z" if i == 1 else ""),
            f"w^{j}" if j > 1 else ("w" if j == 1 else "")) if p)
        neg = c.im == 0 and c.re < 0
        cc = -c if neg else c
        if not mono:
            body = _fmt_coef(cc)
        elif cc == QI_ONE:
            body = mono
        else:
            body = f"{_fmt_coef(cc)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# curvature evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexPoint:
    z: complex
    w: complex


class CurvatureField:
    """Vectorized evaluator for K and the bordered-Hessian determinant.

    Caches the six numeric coefficient matrices of f and its derivatives so
    quadrature can stream millions of points through polyval2d.
    """

    def __init__(self, f: BiPoly):
        self.f = f
        self.scale = f.max_coeff_abs()
        fz, fw = f.diff_z(), f.diff_w()
        self._c = {name: g.coeff_matrix() for name, g in (
            ("f", f), ("fz", fz), ("fw", fw),
            ("fzz", fz.diff_z()), ("fzw", fz.diff_w()), ("fww", fw.diff_w()))}

    def _ev(self, name, z, w):
        return npp.polyval2d(z, w, self._c[name])

    def value(self, z, w):
        return self._ev("f", z, w)

    def grad(self, z, w):
        return self._ev("fz", z, w), self._ev("fw", z, w)

    def delta(self, z, w):
        fz = self._ev("fz", z, w)
        fw = self._ev("fw", z, w)
        return (2.0 * fz * fw * self._ev("fzw", z, w)
                - self._ev("fzz", z, w) * fw * fw
                - self._ev("fww", z, w) * fz * fz)

    def grad_norm2(self, z, w):
        fz, fw = self.grad(z, w)
        return np.abs(fz) ** 2 + np.abs(fw) ** 2

    def curvature(self, z, w):
        """K at arrays of points; no gradient guard (quadrature path)."""
        g2 = self.grad_norm2(z, w)
        d = self.delta(z, w)
        return 2.0 * np.abs(d) ** 2 / g2**3


@functools.lru_cache(maxsize=64)
def curvature_field(f: BiPoly) -> CurvatureField:
    return CurvatureField(f)


def gauss_curvature(f: BiPoly, p: ComplexPoint, tol: float = 1e-12):
    """(K, delta) at a single point; K >= 0 and delta the 3x3 determinant.

    Raises VanishingGradient when ||grad f|| falls below
    tol * (1 + max coefficient magnitude), where curvature is undefined.
    """
    fld = curvature_field(f)
    fz, fw = fld.grad(complex(p.z), complex(p.w))
    g2 = abs(fz) ** 2 + abs(fw) ** 2
    tol_eff = tol * (1.0 + fld.scale)
    if g2 < tol_eff * tol_eff:
        raise VanishingGradient(
            f"gradient norm {g2 ** 0.5:.3e} below tolerance at {p}")
    d = complex(fld.delta(complex(p.z), complex(p.w)))
    return 2.0 * abs(d) ** 2 / g2**3, d


# ---------------------------------------------------------------------------
# leading-form structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingFormAnalysis:
    m: int
    r: int
    roots: tuple          # ((z_i: complex, multiplicity), ...)
    degenerate: bool


def leading_form_analysis(f: BiPoly, cluster_tol: float = 1e-8) -> LeadingFormAnalysis:
    """Factor the lowest form H_m(z, w) = c prod (z - z_i w)^{m_i}.

    Exact squarefree factorization over QQ(i) separates the multiplicities;
    numeric roots of each squarefree factor are merged only across
    conjugate-precision noise (cluster_tol, relative).
    """
    if not f:
        raise ValueError("leading_form_analysis needs f != 0")
    m = f.order()
    if m < 1:
        raise ValueError("f must vanish at the origin")
    H = f.lowest_form()
    if (m, 0) not in H.terms:
        raise NotMiniRegular("H_m(1,0) = 0; apply mini_regularize first")
    # H_m(z, 1) as univariate coefficients, degree exactly m
    coeffs = [QI_ZERO] * (m + 1)
    for (i, j), c in H.terms.items():
        coeffs[i] = c
    roots = []
    for fac_coeffs, mult in exact.univariate_sqf_roots_structure(coeffs):
        if len(fac_coeffs) <= 1:
            continue
        arr = np.array([complex(c) for c in fac_coeffs][::-1])
        for rt in np.roots(arr):
            roots.append([complex(rt), mult])
    # merge numeric noise
    merged = []
    for rt, mult in sorted(roots, key=lambda t: (t[0].real, t[0].imag)):
        for slot in merged:
            if abs(slot[0] - rt) <= cluster_tol * (1.0 + abs(rt)):
                slot[1] += mult
                break
        else:
            merged.append([rt, mult])
    total = sum(mult for _, mult in merged)
    if total != m:
        raise ArithmeticError(
            f"leading-form multiplicities sum to {total}, expected {m}")
    merged.sort(key=lambda t: (abs(t[0]), t[0].real, t[0].imag))
    r = len(merged)
    return LeadingFormAnalysis(m=m, r=r,
                               roots=tuple((rt, mult) for rt, mult in merged),
                               degenerate=r < m)


# ---------------------------------------------------------------------------
# mini-regularization
# ---------------------------------------------------------------------------

def _unitary_catalog():
    """Exact unitary 2x2 matrices with unit columns built from Pythagorean
    triples and quadruples; first column (a, c) spans the new z-direction."""
    cols = []
    triples = [(3, 4, 5), (4, 3, 5), (5, 12, 13), (12, 5, 13),
               (8, 15, 17), (15, 8, 17), (7, 24, 25), (20, 21, 29)]
    for p, q, r in triples:
        cols.append((QI(Fraction(p, r)), QI(Fraction(q, r))))
        cols.append((QI(Fraction(p, r)), QI(Fraction(-q, r))))
    quads = [(1, 2, 2, 3), (2, 3, 6, 7), (1, 4, 8, 9), (4, 4, 7, 9),
             (2, 6, 9, 11), (6, 6, 7, 11), (3, 4, 12, 13), (2, 5, 14, 15)]
    for p, q, s, r in quads:
        cols.append((QI(Fraction(p, r), Fraction(q, r)), QI(Fraction(s, r))))
        cols.append((QI(Fraction(s, r)), QI(Fraction(p, r), Fraction(q, r))))
        cols.append((QI(Fraction(p, r), Fraction(-q, r)), QI(Fraction(-s, r))))
    matrices = []
    for a, c in cols:
        # U = [[a, -conj(c)], [c, conj(a)]] is unitary when |a|^2+|c|^2 = 1
        matrices.append((a, -c.conj(), c, a.conj()))
    return matrices


_CATALOG = _unitary_catalog()
_IDENTITY = (QI_ONE, QI_ZERO, QI_ZERO, QI_ONE)


def mini_regularize(f: BiPoly, seed: int = 0):
    """Return (g, U) with g = f o U mini-regular in z and U exact unitary.

    The identity is returned untouched when f is already mini-regular; other
    candidates come from a fixed catalog of exact unit-modulus matrices,
    rotated deterministically by ``seed``, and the defining property
    H_m(g)(1, 0) != 0 is verified exactly.
    """
    if not f:
        raise ValueError("mini_regularize needs f != 0")
    if f.is_mini_regular():
        return f, _IDENTITY
    H = f.lowest_form()
    n = len(_CATALOG)
    for k in range(n):
        a, b, c, d = _CATALOG[(k + seed) % n]
        if H.eval_qi(a, c):      # first column must avoid the root directions
            g = f.compose_linear(a, b, c, d)
            if not g.is_mini_regular():
                raise ArithmeticError("unitary candidate failed exact check")
            return g, (a, b, c, d)
    raise ExhaustedCandidates(
        f"no mini-regularizing unitary among {n} exact candidates")
