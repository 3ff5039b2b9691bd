"""System-file parsing, canonical text formatting, and JSON encoding.

File format: a header line ``<kind> <nvars> <ndeform> [precision]`` followed
by one polynomial per line.  Kinds: ``QQ``, ``CC``, ``GF(p)``, ``QQ[[v]]``
(the last requires a deformation-variable count and a precision).  Ambient
variables are named x1..xn with aliases x, y, z accepted for n <= 3;
deformation variables are v1..vm with alias v for m = 1.  Blank lines and
``#`` comments are ignored.

Printing is canonical: terms in graded-lex descending order, rationals as
p/q in lowest terms, series by graded-lex ascending exponent.  Parsing then
printing is the identity on canonical files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, ShapeError
from .hensel import DeformedSystem
from .polynomials import Polynomial, grlex_key, monomial_one
from .scalars import QQ, ComplexField, PrimeField, SeriesRing, TruncatedSeries

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+|\.\d*(?:[eE][+-]?\d+)?|[eE][+-]?\d+)?)"
    r"|(?P<name>[a-zA-Z][a-zA-Z0-9]*)"
    r"|(?P<op>[-+*^()])"
    r")"
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, line_no: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line=line_no, column=pos + 1
            )
        for kind in ("number", "name", "op"):
            if m.group(kind) is not None:
                out.append(_Token(kind, m.group(kind), line_no, m.start(kind) + 1))
                break
        pos = m.end()
    return out


class _VariableTable:
    """Maps variable names to (is_deformation, index)."""

    def __init__(self, nvars: int, ndeform: int):
        self.nvars = nvars
        self.ndeform = ndeform
        table = {}
        for i in range(nvars):
            table[f"x{i + 1}"] = (False, i)
        if nvars <= 3:
            for alias, i in zip("xyz", range(nvars)):
                table[alias] = (False, i)
        for j in range(ndeform):
            table[f"v{j + 1}"] = (True, j)
        if ndeform == 1:
            table["v"] = (True, 0)
        self.table = table

    def lookup(self, tok: _Token):
        hit = self.table.get(tok.text)
        if hit is None:
            raise ParseError(
                f"unknown variable {tok.text!r}", line=tok.line, column=tok.column
            )
        return hit


def _parse_number(tok: _Token, allow_decimal: bool):
    if "/" in tok.text:
        num, den = tok.text.split("/")
        if den == "0":
            raise ParseError("zero denominator", line=tok.line, column=tok.column)
        return Fraction(int(num), int(den))
    if any(c in tok.text for c in ".eE"):
        if not allow_decimal:
            raise ParseError(
                "decimal literals only allowed over CC",
                line=tok.line,
                column=tok.column,
            )
        return float(tok.text)
    return Fraction(int(tok.text))


def _parse_terms(tokens: list, vt: _VariableTable, allow_decimal: bool):
    """Sum of sign-prefixed products; yields (coeff, xexp, vexp) triples."""
    i = 0
    n = len(tokens)
    terms = []
    sign = 1
    expect_term = True
    while i < n:
        tok = tokens[i]
        if tok.kind == "op" and tok.text in "+-":
            if expect_term and tok.text == "-":
                sign = -sign
            elif expect_term:
                pass
            else:
                sign = -1 if tok.text == "-" else 1
                expect_term = True
            i += 1
            continue
        if not expect_term:
            raise ParseError(
                f"expected '+' or '-' before {tok.text!r}",
                line=tok.line,
                column=tok.column,
            )
        coeff = Fraction(1)
        xexp = [0] * vt.nvars
        vexp = [0] * vt.ndeform
        while True:
            tok = tokens[i]
            if tok.kind == "number":
                coeff = coeff * _parse_number(tok, allow_decimal)
                i += 1
            elif tok.kind == "name":
                is_v, idx = vt.lookup(tok)
                power = 1
                i += 1
                if i < n and tokens[i].kind == "op" and tokens[i].text == "^":
                    i += 1
                    if i >= n or tokens[i].kind != "number" or not tokens[i].text.isdigit():
                        where = tokens[i] if i < n else tok
                        raise ParseError(
                            "exponent must be a non-negative integer",
                            line=where.line,
                            column=where.column,
                        )
                    power = int(tokens[i].text)
                    i += 1
                if is_v:
                    vexp[idx] += power
                else:
                    xexp[idx] += power
            else:
                raise ParseError(
                    f"unexpected token {tok.text!r}", line=tok.line, column=tok.column
                )
            if i < n and tokens[i].kind == "op" and tokens[i].text == "*":
                i += 1
                if i >= n:
                    raise ParseError("dangling '*'", line=tok.line, column=tok.column)
                continue
            break
        terms.append((sign * coeff, tuple(xexp), tuple(vexp)))
        sign = 1
        expect_term = False
    if expect_term and terms:
        raise ParseError("dangling sign", line=tokens[-1].line, column=tokens[-1].column)
    return terms


@dataclass
class ParsedSystem:
    """A parsed system file: polynomials plus the declared ambient."""

    kind: str
    domain: object
    nvars: int
    ndeform: int
    precision: int | None
    polynomials: list
    deformed: DeformedSystem | None


def parse_polynomial(text: str, domain, nvars: int, line_no: int = 1) -> Polynomial:
    """One polynomial over a plain field domain."""
    vt = _VariableTable(nvars, 0)
    allow_decimal = isinstance(domain, ComplexField)
    tokens = _tokenize(text, line_no)
    if not tokens:
        raise ParseError("empty polynomial", line=line_no)
    terms = _parse_terms(tokens, vt, allow_decimal)
    acc: dict = {}
    for coeff, xexp, _ in terms:
        if isinstance(coeff, float):
            value = complex(coeff)
        elif isinstance(domain, ComplexField):
            value = complex(coeff)
        else:
            value = domain.from_fraction(coeff)
        acc[xexp] = domain.add(acc.get(xexp, domain.zero), value)
    return Polynomial.from_terms(domain, nvars, acc)


def parse_deformed_polynomial(
    text: str, ring: SeriesRing, nvars: int, line_no: int = 1
) -> Polynomial:
    """One polynomial with truncated-series coefficients."""
    vt = _VariableTable(nvars, ring.num_vars)
    tokens = _tokenize(text, line_no)
    if not tokens:
        raise ParseError("empty polynomial", line=line_no)
    terms = _parse_terms(tokens, vt, allow_decimal=False)
    acc: dict = {}
    for coeff, xexp, vexp in terms:
        series_terms = acc.setdefault(xexp, {})
        series_terms[vexp] = series_terms.get(vexp, Fraction(0)) + coeff
    out = {}
    for xexp, series_terms in acc.items():
        out[xexp] = ring.from_coeffs(
            {ve: ring.base.from_fraction(c) for ve, c in series_terms.items()}
        )
    return Polynomial.from_terms(ring, nvars, out)


def parse_system(path: str) -> ParsedSystem:
    """Parse and fully validate a system file."""
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    lines = []
    for i, line in enumerate(raw_lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            lines.append((i, stripped))
    if not lines:
        raise ParseError("empty system file", line=1)
    header_no, header = lines[0]
    fields = header.split()
    if len(fields) < 3:
        raise ParseError(
            "header needs: kind, variable count, deformation count", line=header_no
        )
    kind = fields[0]
    try:
        nvars = int(fields[1])
        ndeform = int(fields[2])
    except ValueError:
        raise ParseError("variable counts must be integers", line=header_no) from None
    if nvars < 1 or ndeform < 0:
        raise ParseError("need nvars >= 1 and ndeform >= 0", line=header_no)
    precision = None
    if len(fields) >= 4:
        try:
            precision = int(fields[3])
        except ValueError:
            raise ParseError("precision must be an integer", line=header_no) from None

    gf = re.fullmatch(r"GF\((\d+)\)", kind)
    if kind == "QQ[[v]]":
        if ndeform < 1:
            raise ParseError(
                "deformed systems need at least one deformation variable",
                line=header_no,
            )
        if precision is None:
            raise ParseError("deformed systems need a precision field", line=header_no)
        ring = SeriesRing(QQ, ndeform, precision)
        polys = [
            parse_deformed_polynomial(text, ring, nvars, line_no)
            for line_no, text in lines[1:]
        ]
        if not polys:
            raise ParseError("no polynomials after the header", line=header_no)
        try:
            deformed = DeformedSystem(polys, ring, nvars)
        except ShapeError as exc:
            raise ParseError(str(exc), line=header_no) from None
        return ParsedSystem(
            kind=kind,
            domain=ring,
            nvars=nvars,
            ndeform=ndeform,
            precision=precision,
            polynomials=polys,
            deformed=deformed,
        )
    if ndeform != 0:
        raise ParseError(
            f"kind {kind} does not admit deformation variables", line=header_no
        )
    if kind == "QQ":
        domain = QQ
    elif kind == "CC":
        domain = ComplexField()
    elif gf:
        domain = PrimeField(int(gf.group(1)))
    else:
        raise ParseError(f"unknown scalar kind {kind!r}", line=header_no)
    polys = [
        parse_polynomial(text, domain, nvars, line_no) for line_no, text in lines[1:]
    ]
    if not polys:
        raise ParseError("no polynomials after the header", line=header_no)
    return ParsedSystem(
        kind=kind,
        domain=domain,
        nvars=nvars,
        ndeform=ndeform,
        precision=precision,
        polynomials=polys,
        deformed=None,
    )


# ---------------------------------------------------------------------------
# canonical formatting
# ---------------------------------------------------------------------------


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_monomial(exp, prefix: str = "x") -> str:
    parts = []
    for i, e in enumerate(exp):
        if e == 1:
            parts.append(f"{prefix}{i + 1}")
        elif e > 1:
            parts.append(f"{prefix}{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


def format_series(ring: SeriesRing, s: TruncatedSeries) -> str:
    if not s.coeffs:
        return "0"
    parts = []
    for exp in sorted(s.coeffs, key=grlex_key):
        c = s.coeffs[exp]
        mono = format_monomial(exp, prefix="v")
        coeff = format_rational(c) if not isinstance(c, complex) else repr(c)
        if mono == "1":
            parts.append(coeff)
        elif coeff == "1":
            parts.append(mono)
        elif coeff == "-1":
            parts.append(f"-{mono}")
        else:
            parts.append(f"{coeff}*{mono}")
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _format_field_scalar(domain, c) -> str:
    if isinstance(domain, ComplexField):
        if c.imag == 0:
            return repr(c.real)
        return repr(c)
    if isinstance(domain, PrimeField):
        return str(c)
    return format_rational(c)


def format_polynomial(p: Polynomial) -> str:
    """Canonical text: graded-lex descending terms."""
    if p.is_zero():
        return "0"
    dom = p.domain
    one_exp = monomial_one(p.nvars)
    pieces = []
    if isinstance(dom, SeriesRing):
        for xexp, series in p.sorted_terms("grlex", reverse=True):
            for vexp in sorted(series.coeffs, key=grlex_key):
                coeff_txt = format_rational(series.coeffs[vexp])
                monos = [
                    m
                    for m in (
                        format_monomial(vexp, prefix="v"),
                        format_monomial(xexp),
                    )
                    if m != "1"
                ]
                if not monos:
                    pieces.append(coeff_txt)
                elif coeff_txt == "1":
                    pieces.append("*".join(monos))
                elif coeff_txt == "-1":
                    pieces.append("-" + "*".join(monos))
                else:
                    pieces.append("*".join([coeff_txt] + monos))
    else:
        for exp, c in p.sorted_terms("grlex", reverse=True):
            coeff_txt = _format_field_scalar(dom, c)
            mono = format_monomial(exp)
            if exp == one_exp:
                pieces.append(coeff_txt)
            elif coeff_txt == "1":
                pieces.append(mono)
            elif coeff_txt == "-1":
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{coeff_txt}*{mono}")
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += f" - {piece[1:]}"
        else:
            out += f" + {piece}"
    return out


def format_system(parsed: ParsedSystem) -> str:
    """Canonical file text for a parsed system (round-trips)."""
    header = f"{parsed.kind} {parsed.nvars} {parsed.ndeform}"
    if parsed.precision is not None:
        header += f" {parsed.precision}"
    lines = [header]
    lines.extend(format_polynomial(p) for p in parsed.polynomials)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------


def scalar_to_json(domain, c):
    """Canonical JSON value for one scalar of the given domain."""
    if isinstance(domain, SeriesRing):
        return {
            format_monomial(exp, prefix="v"): format_rational(v)
            for exp, v in sorted(c.coeffs.items(), key=lambda kv: grlex_key(kv[0]))
        }
    if isinstance(domain, ComplexField):
        return [c.real, c.imag]
    if isinstance(domain, PrimeField):
        return int(c)
    return format_rational(c)


def polynomial_to_json(p: Polynomial):
    """Sorted {monomial text: scalar json} map."""
    return {
        format_monomial(exp): scalar_to_json(p.domain, c)
        for exp, c in p.sorted_terms("grlex", reverse=False)
    }


def dump_json(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, allow_nan=False)
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)
