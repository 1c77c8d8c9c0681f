"""Exact multivariate polynomials with rational coefficients.

``ExactPoly`` is a small immutable dict-of-monomials type used for parsing,
printing and certificate serialisation.  Heavy lifting (resultants, gcds,
factorisation) converts to python-flint and back.

Variables are always kept in a canonical order: generator labels first
(alphabetically), then the parameters ``Z`` and ``T``, then the main
variable ``X``.  Exponent tuples follow that order.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from flint import fmpq, fmpq_mpoly_ctx, fmpq_poly

from ..errors import PolySyntaxError

MAIN_VAR = "X"
_TRAILING = ("Z", "T", "X")

Number = Union[int, Fraction]


def var_key(name: str):
    if name in _TRAILING:
        return (1, _TRAILING.index(name), name)
    return (0, 0, name)


def canonical_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


def to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, fmpq):
        return Fraction(int(q.p), int(q.q))
    return Fraction(q)


def to_fmpq(c: Number) -> fmpq:
    c = Fraction(c)
    return fmpq(c.numerator, c.denominator)


def mpoly_ctx(variables: tuple[str, ...]) -> fmpq_mpoly_ctx:
    return fmpq_mpoly_ctx.get(tuple(variables), "lex")


class ExactPoly:
    """Immutable polynomial in a canonical tuple of variables over Q."""

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping | None = None):
        variables = tuple(variables)
        if variables != canonical_vars(variables):
            raise ValueError(f"variables must be distinct and canonically ordered: {variables}")
        clean = {}
        n = len(variables)
        for exps, c in (terms or {}).items():
            c = to_fraction(c)
            if not c:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for variables {variables}")
            clean[exps] = clean.get(exps, 0) + c
            if not clean[exps]:
                del clean[exps]
        self.variables = variables
        self.terms = clean
        self._hash = None

    # ----- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c: Number, variables: Iterable[str] = ()) -> "ExactPoly":
        variables = canonical_vars(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "ExactPoly":
        variables = canonical_vars(list(variables or ()) + [name])
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] | None = None) -> "ExactPoly":
        return parse_poly(text, variables)

    @classmethod
    def from_coefficients(cls, coeffs, var: str = MAIN_VAR) -> "ExactPoly":
        """Build sum(coeffs[i] * var**i); coefficients may be numbers or ExactPoly."""
        result = cls((), {})
        x = cls.var(var)
        power = cls.constant(1)
        for c in coeffs:
            result = result + power * c
            power = power * x
        return result

    @classmethod
    def from_fmpq_poly(cls, p: fmpq_poly, var: str = MAIN_VAR) -> "ExactPoly":
        return cls((var,), {(i,): to_fraction(c) for i, c in enumerate(p.coeffs())})

    @classmethod
    def from_mpoly(cls, m) -> "ExactPoly":
        names = tuple(m.context().names())
        poly = cls(canonical_vars(names), {})
        order = [poly.variables.index(v) for v in names]
        terms = {}
        for exps, c in m.to_dict().items():
            e = [0] * len(names)
            for src, dst in enumerate(order):
                e[dst] = exps[src]
            terms[tuple(e)] = to_fraction(c)
        return cls(poly.variables, terms)

    # ----- conversions ---------------------------------------------------
    def to_mpoly(self, variables: tuple[str, ...] | None = None):
        variables = tuple(variables or self.variables) or ("X",)
        ctx = mpoly_ctx(variables)
        idx = [variables.index(v) for v in self.variables]
        data = {}
        for exps, c in self.terms.items():
            e = [0] * len(variables)
            for src, dst in enumerate(idx):
                e[dst] = exps[src]
            data[tuple(e)] = to_fmpq(c)
        return ctx.from_dict(data)

    def to_fmpq_poly(self, var: str = MAIN_VAR) -> fmpq_poly:
        extra = self.free_symbols - {var}
        if extra:
            raise ValueError(f"{self} is not univariate in {var} (also uses {sorted(extra)})")
        if var not in self.variables:
            return fmpq_poly([to_fmpq(self.constant_value())]) if self.terms else fmpq_poly([])
        i = self.variables.index(var)
        coeffs = [fmpq(0)] * (self.degree(var) + 1)
        for exps, c in self.terms.items():
            coeffs[exps[i]] = to_fmpq(c)
        return fmpq_poly(coeffs)

    def with_variables(self, variables: Iterable[str]) -> "ExactPoly":
        variables = canonical_vars(variables)
        missing = self.free_symbols - set(variables)
        if missing:
            raise ValueError(f"cannot drop used variables {sorted(missing)}")
        idx = {v: variables.index(v) for v in self.variables if v in variables}
        terms = {}
        for exps, c in self.terms.items():
            e = [0] * len(variables)
            for v, k in zip(self.variables, exps):
                if k:
                    e[idx[v]] = k
            terms[tuple(e)] = c
        return ExactPoly(variables, terms)

    def trimmed(self) -> "ExactPoly":
        """Drop variables that do not occur."""
        return self.with_variables(self.free_symbols)

    # ----- inspection ----------------------------------------------------
    @property
    def free_symbols(self) -> set[str]:
        used = set()
        for exps in self.terms:
            for v, e in zip(self.variables, exps):
                if e:
                    used.add(v)
        return used

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.free_symbols

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def degree(self, var: str = MAIN_VAR) -> int:
        if not self.terms:
            return -1
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficients(self, var: str = MAIN_VAR) -> list["ExactPoly"]:
        """Coefficients in ``var`` from degree 0 upwards, as polys in the other variables."""
        rest = tuple(v for v in self.variables if v != var)
        if var not in self.variables:
            return [self] if self.terms else []
        i = self.variables.index(var)
        buckets: list[dict] = [dict() for _ in range(self.degree(var) + 1)]
        for exps, c in self.terms.items():
            buckets[exps[i]][exps[:i] + exps[i + 1:]] = c
        return [ExactPoly(rest, b) for b in buckets]

    def leading_coefficient(self, var: str = MAIN_VAR) -> "ExactPoly":
        coeffs = self.coefficients(var)
        return coeffs[-1] if coeffs else ExactPoly()

    def is_monic(self, var: str = MAIN_VAR) -> bool:
        lc = self.leading_coefficient(var)
        return lc.is_constant() and lc.constant_value() == 1

    # ----- arithmetic ----------------------------------------------------
    def _lift(self, other) -> tuple["ExactPoly", "ExactPoly"]:
        if not isinstance(other, ExactPoly):
            other = ExactPoly.constant(other)
        if other.variables == self.variables:
            return self, other
        variables = canonical_vars(self.variables + other.variables)
        return self.with_variables(variables), other.with_variables(variables)

    def __add__(self, other):
        try:
            a, b = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, 0) + c
        return ExactPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            a, b = self._lift(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._lift(other)
        except TypeError:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return ExactPoly(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ExactPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "ExactPoly":
        c = Fraction(c)
        return ExactPoly(self.variables, {e: v * c for e, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactPoly.constant(other)
        if not isinstance(other, ExactPoly):
            return NotImplemented
        return self.trimmed().terms == other.trimmed().terms and (
            self.free_symbols == other.free_symbols
        )

    def __hash__(self):
        if self._hash is None:
            t = self.trimmed()
            self._hash = hash((t.variables, frozenset(t.terms.items())))
        return self._hash

    # ----- calculus and substitution ---------------------------------------
    def diff(self, var: str = MAIN_VAR) -> "ExactPoly":
        if var not in self.variables:
            return ExactPoly(self.variables, {})
        i = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                terms[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return ExactPoly(self.variables, terms)

    def subs(self, mapping: Mapping[str, object]) -> "ExactPoly":
        """Substitute numbers or ExactPolys for variables (simultaneously)."""
        mapping = {v: val for v, val in mapping.items() if v in self.variables}
        if not mapping:
            return self
        if all(not isinstance(v, ExactPoly) for v in mapping.values()):
            # fast path: numeric substitution
            keep = tuple(v for v in self.variables if v not in mapping)
            vals = [(i, Fraction(mapping[v])) for i, v in enumerate(self.variables) if v in mapping]
            keep_idx = [i for i, v in enumerate(self.variables) if v not in mapping]
            terms: dict = {}
            for e, c in self.terms.items():
                for i, val in vals:
                    if e[i]:
                        c = c * val ** e[i]
                if c:
                    key = tuple(e[i] for i in keep_idx)
                    terms[key] = terms.get(key, 0) + c
            return ExactPoly(keep, terms)
        keep = [v for v in self.variables if v not in mapping]
        result = ExactPoly((), {})
        powers: dict = {}
        for e, c in self.terms.items():
            term = ExactPoly.constant(c)
            for v, k in zip(self.variables, e):
                if not k:
                    continue
                if v in mapping:
                    key = (v, k)
                    if key not in powers:
                        val = mapping[v]
                        val = val if isinstance(val, ExactPoly) else ExactPoly.constant(val)
                        powers[key] = val ** k
                    term = term * powers[key]
                else:
                    term = term * ExactPoly.var(v) ** k
            result = result + term
        # keep untouched variables even if they vanished
        return result.with_variables(canonical_vars(list(result.variables) + keep))

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        value = self.subs(point)
        return value.constant_value()

    def rename(self, mapping: Mapping[str, str]) -> "ExactPoly":
        return self.subs({old: ExactPoly.var(new) for old, new in mapping.items()})

    # ----- content ---------------------------------------------------------
    def primitive_part(self, var: str = MAIN_VAR) -> "ExactPoly":
        """Remove the content over Q[other variables]; integral coefficients, positive lc."""
        if self.is_zero():
            return self
        m = self.to_mpoly()
        coeffs = [c for c in self.coefficients(var) if not c.is_zero()]
        g = None
        for c in coeffs:
            cm = c.with_variables(self.variables).to_mpoly()
            g = cm if g is None else g.gcd(cm)
        q = ExactPoly.from_mpoly(m / g if g is not None else m)
        q = q.with_variables(canonical_vars(q.variables + self.variables))
        return q.integral_normalised(var)

    def integral_normalised(self, var: str = MAIN_VAR) -> "ExactPoly":
        """Scale by a rational so coefficients are coprime integers and lc is positive."""
        if self.is_zero():
            return self
        from math import gcd, lcm

        den = 1
        num = 0
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        for c in self.terms.values():
            num = gcd(num, (c * den).numerator)
        scale = Fraction(den, num)
        lc = self.leading_coefficient(var)
        lead = max(lc.terms.items())[1] if lc.terms else Fraction(1)
        if lead < 0:
            scale = -scale
        return self.scale(scale)

    # ----- printing ----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        # main variable first: X^3 + T*X + T rather than T*X + T + X^3
        for exps in sorted(self.terms, key=lambda e: e[::-1], reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in reversed(list(zip(self.variables, exps))) if e
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"ExactPoly({str(self)!r})"


class RatExpr:
    """A quotient num/den where den does not involve the main variable."""

    __slots__ = ("num", "den")

    def __init__(self, num: ExactPoly, den: ExactPoly | None = None):
        if den is None:
            den = ExactPoly.constant(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @classmethod
    def parse(cls, spec) -> "RatExpr":
        if isinstance(spec, RatExpr):
            return spec
        if isinstance(spec, ExactPoly):
            return cls(spec)
        if isinstance(spec, str):
            return cls(parse_poly(spec))
        return cls(parse_poly(spec["num"]), parse_poly(spec.get("den", "1")))

    def to_json(self):
        if self.den == 1:
            return str(self.num)
        return {"num": str(self.num), "den": str(self.den)}

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^|[+\-*/()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("int", int(num)))
        elif ident is not None:
            tokens.append(("var", ident))
        else:
            tokens.append(("op", op))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok != ("op", op):
            raise PolySyntaxError(f"expected {op!r}, got {tok[1]!r}")

    def parse(self) -> ExactPoly:
        value = self.expr()
        if self.peek()[0] != "end":
            raise PolySyntaxError(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self) -> ExactPoly:
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> ExactPoly:
        value = self.unary()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                value = value * self.unary()
            elif tok[0] in ("int", "var") or tok == ("op", "("):
                raise PolySyntaxError("implicit multiplication is not allowed; use '*'")
            else:
                return value

    def unary(self) -> ExactPoly:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> ExactPoly:
        base = self.primary()
        if self.peek() == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise PolySyntaxError("exponent must be a non-negative integer literal")
            return base ** tok[1]
        return base

    def primary(self) -> ExactPoly:
        tok = self.take()
        kind, val = tok
        if kind == "int":
            if self.peek() == ("op", "/"):
                self.take()
                den = self.take()
                if den[0] != "int":
                    raise PolySyntaxError("'/' is only allowed inside fraction literals a/b")
                if den[1] == 0:
                    raise PolySyntaxError("zero denominator in fraction literal")
                return ExactPoly.constant(Fraction(val, den[1]))
            return ExactPoly.constant(val)
        if kind == "var":
            return ExactPoly.var(val)
        if tok == ("op", "("):
            value = self.expr()
            self.expect_op(")")
            return value
        if tok == ("op", "/"):
            raise PolySyntaxError("'/' is only allowed inside fraction literals a/b")
        raise PolySyntaxError(f"unexpected token {val!r}")


def parse_poly(text: str, variables: Iterable[str] | None = None) -> ExactPoly:
    """Parse ``text`` exactly, e.g. ``"X^3 + (T-1)*X + 1/2"``."""
    if not isinstance(text, str):
        raise PolySyntaxError(f"expected a string, got {type(text).__name__}")
    if "/" in text and re.search(r"[A-Za-z_)]\s*/|/\s*[A-Za-z_(]", text):
        raise PolySyntaxError("'/' is only allowed inside fraction literals a/b")
    poly = _Parser(text).parse().trimmed()
    if variables is not None:
        poly = poly.with_variables(variables)
    return poly


def as_poly(value, variables: Iterable[str] | None = None) -> ExactPoly:
    if isinstance(value, ExactPoly):
        return value if variables is None else value.with_variables(variables)
    if isinstance(value, str):
        return parse_poly(value, variables)
    return ExactPoly.constant(value, variables or ())
