"""Text form of integer polynomials in ``x``.

Grammar (whitespace ignored)::

    poly := term (('+'|'-') term)*
    term := [coeff]['*']['x'['^' exp]]

A leading sign on the first term is also accepted.
"""

from __future__ import annotations

import re

from ..errors import PolynomialSyntaxError

_TERM = re.compile(r"(?P<c>\d+)?(?P<star>\*)?(?:(?P<x>x)(?:\^(?P<e>\d+))?)?$")


def parse_poly(text: str) -> list[int]:
    """Coefficients, lowest degree first, with trailing zeros stripped."""
    s = "".join(text.split())
    if not s:
        raise PolynomialSyntaxError("empty polynomial")
    pieces = re.split(r"([+-])", s)
    # pieces alternate term, sign, term, ...
    signs, terms = [], []
    sign = 1
    if pieces[0] == "":
        pieces = pieces[1:]
        if not pieces:
            raise PolynomialSyntaxError(text)
        sign = 1 if pieces[0] == "+" else -1
        pieces = pieces[1:]
    terms.append(pieces[0])
    signs.append(sign)
    for k in range(1, len(pieces), 2):
        signs.append(1 if pieces[k] == "+" else -1)
        terms.append(pieces[k + 1])
    coeffs: dict[int, int] = {}
    for sg, t in zip(signs, terms):
        m = _TERM.match(t)
        if not t or m is None:
            raise PolynomialSyntaxError(f"bad term {t!r} in {text!r}")
        c, star, x, e = m.group("c"), m.group("star"), m.group("x"), m.group("e")
        if star and not (c and x):
            raise PolynomialSyntaxError(f"dangling '*' in {t!r}")
        if c is None and x is None:
            raise PolynomialSyntaxError(f"empty term in {text!r}")
        coef = int(c) if c is not None else 1
        exp = (int(e) if e is not None else 1) if x else 0
        coeffs[exp] = coeffs.get(exp, 0) + sg * coef
    deg = max((k for k, v in coeffs.items() if v), default=-1)
    return [coeffs.get(k, 0) for k in range(deg + 1)]


def format_poly(coeffs) -> str:
    """Canonical text, highest degree first, e.g. ``x^6-793*x^3+226981``."""
    out = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[k])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "x" if k == 1 else f"x^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        out.append((sign, body))
    if not out:
        return "0"
    first_sign, first = out[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        s += sign + body
    return s
