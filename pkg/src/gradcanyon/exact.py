"""Exact polynomial algebra over the Gaussian rationals, via sympy.

Squarefree decomposition, gcd and resultants are classical computer-algebra
infrastructure; we delegate them to sympy's QQ_I domain and keep the package's
own ``BiPoly`` as the working representation everywhere else.
"""

from __future__ import annotations

from fractions import Fraction

import sympy

from .rational import QI

_Z, _W = sympy.symbols("z w")


def to_sympy(terms: dict) -> sympy.Poly:
    """Build a sympy Poly over QQ_I from a {(i, j): QI} term map."""
    expr = sympy.Integer(0)
    for (i, j), c in terms.items():
        coef = sympy.Rational(c.re.numerator, c.re.denominator) \
            + sympy.Rational(c.im.numerator, c.im.denominator) * sympy.I
        expr += coef * _Z**i * _W**j
    return sympy.Poly(expr, _Z, _W, domain="QQ_I")


def from_sympy(poly: sympy.Poly) -> dict:
    """Inverse of :func:`to_sympy`; returns a {(i, j): QI} term map."""
    out = {}
    for (i, j), coef in poly.terms():
        re, im = coef.as_real_imag()
        q = QI(Fraction(re.p, re.q), Fraction(im.p, im.q))
        if q:
            out[(i, j)] = q
    return out


def squarefree_decomposition(terms: dict):
    """Multivariate squarefree decomposition f = unit * prod A_k^k.

    Returns a list of (term-map, k) with the A_k squarefree and pairwise
    coprime, plus the constant content folded into the first factor.
    """
    poly = to_sympy(terms)
    coeff, factors = sympy.sqf_list(poly)
    out = []
    for fac, mult in factors:
        fmap = from_sympy(fac)
        out.append((fmap, int(mult)))
    if out and coeff != 1:
        re, im = sympy.sympify(coeff).as_real_imag()
        c = QI(Fraction(re.p, re.q), Fraction(im.p, im.q))
        first, mult = out[0]
        if mult == 1:
            out[0] = ({k: v * c for k, v in first.items()}, 1)
        else:
            out.insert(0, ({(0, 0): c}, 1))
    return out


def gcd(terms_a: dict, terms_b: dict) -> dict:
    return from_sympy(sympy.gcd(to_sympy(terms_a), to_sympy(terms_b)))


def resultant_z(terms_a: dict, terms_b: dict) -> dict:
    """Resultant with respect to z; result is a polynomial in w alone."""
    res = sympy.resultant(to_sympy(terms_a), to_sympy(terms_b), _Z)
    poly = sympy.Poly(res, _Z, _W, domain="QQ_I")
    return from_sympy(poly)


def univariate_sqf_roots_structure(coeffs: list):
    """Squarefree structure of a univariate polynomial over QQ_I.

    ``coeffs`` is a low-to-high list of QI.  Returns a list of
    (squarefree-factor coefficient list, multiplicity).
    """
    x = sympy.Symbol("x")
    expr = sympy.Integer(0)
    for k, c in enumerate(coeffs):
        coef = sympy.Rational(c.re.numerator, c.re.denominator) \
            + sympy.Rational(c.im.numerator, c.im.denominator) * sympy.I
        expr += coef * x**k
    poly = sympy.Poly(expr, x, domain="QQ_I")
    _, factors = sympy.sqf_list(poly)
    out = []
    for fac, mult in factors:
        deg = fac.degree()
        cl = [QI(0)] * (deg + 1)
        for (k,), coef in fac.terms():
            re, im = coef.as_real_imag()
            cl[k] = QI(Fraction(re.p, re.q), Fraction(im.p, im.q))
        out.append((cl, int(mult)))
    return out
