"""Presented number fields, towers and factorisation over them.

Every ``NumberField`` keeps an absolute presentation Q[theta]/(m) next to
the tower of relative steps it was built from.  Tower generators are stored
as polynomials in theta, so arithmetic is always plain reduction modulo m.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd, isqrt
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from flint import fmpq, fmpq_mat, fmpq_mpoly_ctx, fmpq_poly, fmpz, nmod_poly

from ..errors import DegreeCapExceeded, NotIrreducibleDefiningPoly, ZeroPolynomial
from .factor import DEFAULT_FACTOR_CAP, FactorList, canonical_integers, factor_fmpq, fmpq_key, fmpq_monic
from .poly import MAIN_VAR, ExactPoly, as_poly, canonical_vars, to_fmpq, to_fraction

DEFAULT_DEGREE_CAP = 24
OVERRIDE_DEGREE_CAP = 36

_XY = fmpq_mpoly_ctx.get(("X", "Y"), "lex")


def _fmpq_poly_str(p: fmpq_poly, var: str) -> str:
    return str(ExactPoly.from_fmpq_poly(p, var))


@dataclass(frozen=True)
class TowerStep:
    generator: str
    poly: ExactPoly  # in X, coefficients in earlier generators

    def to_json(self):
        return {"generator": self.generator, "poly": str(self.poly)}


class NumberField:
    """Absolute field Q[theta]/(minpoly) with a named tower of generators."""

    def __init__(
        self,
        minpoly: fmpq_poly,
        steps: Sequence[TowerStep],
        gens: Mapping[str, fmpq_poly],
        prim_expr: ExactPoly,
        label: str = "theta",
        base: "NumberField | None" = None,
        cap: int = DEFAULT_DEGREE_CAP,
    ):
        self.minpoly = fmpq_monic(minpoly)
        self.steps = tuple(steps)
        self.gens = dict(gens)
        self.prim_expr = prim_expr
        self.label = label
        self.base = base
        self.cap = cap
        self._hash = None

    # ----- construction ---------------------------------------------------
    @classmethod
    def rationals(cls) -> "NumberField":
        return cls(fmpq_poly([0, 1]), (), {}, ExactPoly.constant(0), label="theta")

    @classmethod
    def from_poly(cls, poly, label: str = "a", cap: int = DEFAULT_DEGREE_CAP) -> "NumberField":
        """Q[label]/(poly); poly is given in X."""
        return cls.rationals().extend(poly, label, cap=cap)

    @classmethod
    def from_steps(cls, steps: Iterable, cap: int = DEFAULT_DEGREE_CAP) -> "NumberField":
        field = cls.rationals()
        for step in steps:
            if isinstance(step, TowerStep):
                gen, poly = step.generator, step.poly
            elif isinstance(step, Mapping):
                gen, poly = step["generator"], step["poly"]
            else:
                gen, poly = step
            field = field.extend(poly, gen, cap=cap)
        return field

    def extend(self, poly, label: str, cap: int | None = None) -> "NumberField":
        """Adjoin a root ``label`` of ``poly`` (in X over this field)."""
        cap = cap or self.cap
        if label in self.gens or label in ("X", "Y"):
            raise ValueError(f"generator label {label!r} already used or reserved")
        if isinstance(poly, KPoly):
            g = poly.monic()
            poly = self.kpoly_expr(g)
        else:
            poly = as_poly(poly)
            g = KPoly.from_expr(self, poly).monic()
        n = g.degree()
        if n < 1:
            raise NotIrreducibleDefiningPoly(f"defining polynomial {poly} has degree < 1")
        d = self.degree
        if n * d > cap:
            raise DegreeCapExceeded(f"absolute degree {n * d} exceeds cap {cap}")
        step = TowerStep(label, poly)
        if d == 1:
            m = fmpq_poly([c[0] if c.degree() >= 0 else 0 for c in g.coeffs])
            _, facs = factor_fmpq(m, max(cap, DEFAULT_FACTOR_CAP))
            if len(facs) != 1 or facs[0][1] != 1:
                raise NotIrreducibleDefiningPoly(f"{poly} is not irreducible over Q")
            # earlier degree-one steps stay in the tower as rational constants
            root = -self.minpoly[0] / self.minpoly[1]
            gens = {k: fmpq_poly([v(root)]) for k, v in self.gens.items()}
            gens[label] = fmpq_poly([0, 1])
            return NumberField(m, self.steps + (step,), gens, ExactPoly.var(label), label=label, base=self, cap=cap)
        fl = factor_over_number_field(g, self)
        if not fl.is_irreducible:
            raise NotIrreducibleDefiningPoly(f"{poly} is not irreducible over the base field")
        theta_old = self.prim_expr
        for c in range(1, 1000):
            shifted = g.shift(-c)  # g(X - c*theta)
            norm = shifted.norm()
            if norm.gcd(norm.derivative()).degree() > 0:
                continue
            new = NumberField(norm, (), {}, ExactPoly(), cap=cap)
            # theta_old is the common root of m(Y) and g(Z - cY, Y) over the new field
            z = fmpq_poly([0, 1])
            h = _substitute_main(g, self, new, z, -c)
            m_over_new = KPoly(new, [fmpq_poly(c0) for c0 in self.minpoly.coeffs()])
            common = h.gcd(m_over_new)
            if common.degree() != 1:
                raise NotIrreducibleDefiningPoly("primitive element reconstruction failed")
            theta_img = (-common.coeffs[0]) % new.minpoly
            rho_img = (z - c * theta_img) % new.minpoly
            gens = {k: v(theta_img) % new.minpoly for k, v in self.gens.items()}
            gens[label] = rho_img
            prim = ExactPoly.var(label) + theta_old.scale(c)
            return NumberField(norm, self.steps + (step,), gens, prim, label="theta", base=self, cap=cap)
        raise NotIrreducibleDefiningPoly("no primitive element found")

    # ----- basic data --------------------------------------------------------
    @property
    def degree(self) -> int:
        return self.minpoly.degree()

    @property
    def generator_labels(self) -> list[str]:
        return [s.generator for s in self.steps]

    def tower(self) -> list["NumberField"]:
        chain = []
        f = self
        while f is not None:
            chain.append(f)
            f = f.base
        return list(reversed(chain))

    def is_rational(self) -> bool:
        return self.degree == 1

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly and self.steps == other.steps

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.minpoly), tuple(s.generator for s in self.steps)))
        return self._hash

    def __repr__(self):
        if not self.steps:
            return "NumberField(Q)"
        desc = ", ".join(f"{s.generator}: {s.poly}" for s in self.steps)
        return f"NumberField({desc})"

    def to_json(self):
        return {
            "steps": [s.to_json() for s in self.steps],
            "minpoly": _fmpq_poly_str(self.minpoly, "X"),
            "primitive_element": str(self.prim_expr),
        }

    @classmethod
    def from_json(cls, data, cap: int = OVERRIDE_DEGREE_CAP) -> "NumberField":
        field = cls.from_steps(data["steps"], cap=cap)
        if "minpoly" in data and _fmpq_poly_str(field.minpoly, "X") != data["minpoly"]:
            raise NotIrreducibleDefiningPoly("stored absolute minimal polynomial does not match the tower")
        return field

    # ----- elements ----------------------------------------------------------
    def element(self, value) -> "NFElem":
        """Element from a number, an NFElem, or an expression in generator labels."""
        if isinstance(value, NFElem):
            if value.field is self:
                return value
            if value.field.minpoly == self.minpoly:
                return NFElem(self, value.poly)
            raise ValueError("element belongs to a different field")
        if isinstance(value, fmpq_poly):
            return NFElem(self, value)
        if isinstance(value, (int, Fraction, fmpq)):
            return NFElem(self, fmpq_poly([to_fmpq(to_fraction(value))]))
        expr = as_poly(value)
        return NFElem(self, self._eval(expr))

    def _eval(self, expr: ExactPoly) -> fmpq_poly:
        unknown = expr.free_symbols - set(self.gens)
        if unknown:
            raise ValueError(f"unknown generators {sorted(unknown)} for {self!r}")
        total = fmpq_poly([])
        powers: dict = {}
        for exps, c in expr.terms.items():
            term = fmpq_poly([to_fmpq(c)])
            for v, e in zip(expr.variables, exps):
                if e:
                    key = (v, e)
                    if key not in powers:
                        powers[key] = _powmod(self.gens[v], e, self.minpoly)
                    term = (term * powers[key]) % self.minpoly
            total += term
        return total % self.minpoly

    def gen(self, label: str | None = None) -> "NFElem":
        if label is None:
            return NFElem(self, fmpq_poly([0, 1]) % self.minpoly)
        return NFElem(self, self.gens[label])

    def zero(self) -> "NFElem":
        return NFElem(self, fmpq_poly([]))

    def one(self) -> "NFElem":
        return NFElem(self, fmpq_poly([1]))

    def basis_vector(self, a: "NFElem") -> list[Fraction]:
        coeffs = [to_fraction(c) for c in a.poly.coeffs()]
        return coeffs + [Fraction(0)] * (self.degree - len(coeffs))

    def tower_monomials(self) -> list[tuple[int, ...]]:
        degs = [s.poly.degree() for s in self.steps]
        out = [()]
        for d in degs:
            out = [e + (k,) for e in out for k in range(d)]
        return out

    def _tower_inverse(self):
        if getattr(self, "_tower_inv", None) is None:
            labels = self.generator_labels
            cols = []
            for exps in self.tower_monomials():
                v = fmpq_poly([1])
                for lbl, e in zip(labels, exps):
                    v = (v * _powmod(self.gens[lbl], e, self.minpoly)) % self.minpoly
                cols.append(self.basis_vector(NFElem(self, v)))
            n = self.degree
            M = fmpq_mat(n, n, [to_fmpq(cols[j][i]) for i in range(n) for j in range(n)])
            self._tower_inv = M.inv()
        return self._tower_inv

    def express(self, a: "NFElem") -> ExactPoly:
        """Reduced expression of ``a`` in the tower generators."""
        if self.degree == 1:
            return ExactPoly.constant(a.rational_value())
        inv = self._tower_inverse()
        n = self.degree
        vec = fmpq_mat(n, 1, [to_fmpq(c) for c in self.basis_vector(a)])
        coords = inv * vec
        labels = self.generator_labels
        order = canonical_vars(labels)
        perm = [labels.index(v) for v in order]
        terms = {}
        for k, exps in enumerate(self.tower_monomials()):
            c = coords[k, 0]
            if c != 0:
                terms[tuple(exps[i] for i in perm)] = to_fraction(c)
        return ExactPoly(order, terms).trimmed()

    def kpoly_expr(self, f: "KPoly", var: str = MAIN_VAR) -> ExactPoly:
        out = ExactPoly()
        x = ExactPoly.var(var)
        for i, c in enumerate(f.coeffs):
            out = out + self.express(NFElem(self, c)) * x**i
        return out

    def poly(self, expr, var: str = MAIN_VAR) -> "KPoly":
        return KPoly.from_expr(self, as_poly(expr), var)


def _powmod(p: fmpq_poly, e: int, m: fmpq_poly) -> fmpq_poly:
    result = fmpq_poly([1])
    base = p % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def _substitute_main(g: "KPoly", old: NumberField, new: NumberField, z: fmpq_poly, c: int) -> "KPoly":
    """g(Z + c*Y) with coefficients' theta_old replaced by Y, as a KPoly in Y over ``new``.

    Here Z is the generator of ``new`` (given as fmpq_poly ``z``).
    """
    terms = {}
    for i, coeff in enumerate(g.coeffs):
        for j, a in enumerate(coeff.coeffs()):
            if a:
                terms[(i, j)] = a
    # G(Z + cY, Y) = sum_{i,j} a_ij (Z + cY)^i Y^j, expanded in Y over Q[Z]
    out: dict[int, fmpq_poly] = {}
    binoms_cache: dict = {}
    for (i, j), a in terms.items():
        # (z + cY)^i = sum_k binom(i,k) c^k Y^k z^(i-k)
        for k in range(i + 1):
            key = i - k
            if key not in binoms_cache:
                binoms_cache[key] = _powmod(z, key, new.minpoly)
            coeff = binoms_cache[key] * (a * comb(i, k) * (c**k))
            out[j + k] = (out.get(j + k, fmpq_poly([])) + coeff) % new.minpoly
    n = max(out) + 1 if out else 0
    return KPoly(new, [out.get(i, fmpq_poly([])) for i in range(n)])


class NFElem:
    """Element of a NumberField, stored as a reduced polynomial in theta."""

    __slots__ = ("field", "poly")

    def __init__(self, field: NumberField, poly: fmpq_poly):
        self.field = field
        self.poly = poly % field.minpoly

    def _coerce(self, other) -> "NFElem":
        if isinstance(other, NFElem):
            return other
        return self.field.element(other)

    def __add__(self, other):
        return NFElem(self.field, self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __sub__(self, other):
        return NFElem(self.field, self.poly - self._coerce(other).poly)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return NFElem(self.field, -self.poly)

    def __mul__(self, other):
        return NFElem(self.field, self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return NFElem(self.field, _powmod(self.poly, e, self.field.minpoly))

    def inverse(self) -> "NFElem":
        if self.poly.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = self.poly.xgcd(self.field.minpoly)
        return NFElem(self.field, s / g[0])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, NFElem):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.poly == other.poly

    def __hash__(self):
        return hash(str(self.poly))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_rational(self) -> bool:
        return self.poly.degree() <= 0

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return to_fraction(self.poly[0]) if self.poly.degree() == 0 else Fraction(0)

    def apply(self, image: fmpq_poly) -> "NFElem":
        """Substitute theta -> image (an automorphism or embedding image)."""
        return NFElem(self.field, self.poly(image))

    def charpoly(self) -> fmpq_poly:
        ctx = _XY
        m = _XY.from_dict({(0, j): a for j, a in enumerate(self.field.minpoly.coeffs()) if a})
        terms = {(1, 0): 1}
        for j, a in enumerate(self.poly.coeffs()):
            if a:
                terms[(0, j)] = terms.get((0, j), 0) - a
        h = ctx.from_dict(terms)
        r = m.resultant(h, "Y")
        coeffs = [fmpq(0)] * (r.degrees()[0] + 1)
        for (i, _), a in r.to_dict().items():
            coeffs[i] = a
        return fmpq_monic(fmpq_poly(coeffs))

    def minpoly(self) -> fmpq_poly:
        cp = self.charpoly()
        _, facs = factor_fmpq(cp, max(cp.degree(), DEFAULT_FACTOR_CAP))
        return facs[0][0]

    def key(self):
        return [to_fraction(c) for c in self.poly.coeffs()]

    def to_expr(self, var: str | None = None) -> str:
        return _fmpq_poly_str(self.poly, var or self.field.label)

    def __str__(self):
        return self.to_expr()

    def __repr__(self):
        return f"NFElem({self.to_expr()})"


class KPoly:
    """Univariate polynomial over a NumberField; coefficients low to high."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: Sequence):
        m = field.minpoly
        cs = [(c.poly if isinstance(c, NFElem) else fmpq_poly(c) if not isinstance(c, fmpq_poly) else c) % m for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_expr(cls, field: NumberField, expr: ExactPoly, var: str = MAIN_VAR) -> "KPoly":
        return cls(field, [field._eval(c) for c in expr.coefficients(var)])

    @classmethod
    def from_fmpq_poly(cls, field: NumberField, p: fmpq_poly) -> "KPoly":
        return cls(field, [fmpq_poly([c]) for c in p.coeffs()])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> fmpq_poly:
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, KPoly) and self.coeffs == other.coeffs

    def __add__(self, other: "KPoly") -> "KPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = fmpq_poly([])
        return KPoly(self.field, [
            (self.coeffs[i] if i < len(self.coeffs) else z) + (other.coeffs[i] if i < len(other.coeffs) else z)
            for i in range(n)
        ])

    def __neg__(self):
        return KPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other: "KPoly") -> "KPoly":
        return self + (-other)

    def __mul__(self, other) -> "KPoly":
        m = self.field.minpoly
        if isinstance(other, NFElem):
            return KPoly(self.field, [(c * other.poly) % m for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return KPoly(self.field, [])
        out = [fmpq_poly([])] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KPoly(self.field, [c % m for c in out])

    def __pow__(self, e: int) -> "KPoly":
        result = KPoly(self.field, [fmpq_poly([1])])
        for _ in range(e):
            result = result * self
        return result

    def _inv(self, c: fmpq_poly) -> fmpq_poly:
        g, s, _ = c.xgcd(self.field.minpoly)
        return s / g[0]

    def monic(self) -> "KPoly":
        if not self.coeffs:
            return self
        inv = self._inv(self.lc())
        m = self.field.minpoly
        return KPoly(self.field, [(c * inv) % m for c in self.coeffs])

    def __divmod__(self, other: "KPoly"):
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        m = self.field.minpoly
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return KPoly(self.field, []), self
        inv = self._inv(other.lc())
        q = [fmpq_poly([])] * dq
        od = other.degree()
        for k in range(dq - 1, -1, -1):
            c = (rem[k + od] * inv) % m
            q[k] = c
            if c.is_zero():
                continue
            for i, b in enumerate(other.coeffs):
                rem[k + i] = (rem[k + i] - c * b) % m
        return KPoly(self.field, q), KPoly(self.field, rem[:od])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def gcd(self, other: "KPoly") -> "KPoly":
        """Monic gcd, computed modularly and verified by exact division."""
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        if self.degree() == 0 or other.degree() == 0:
            return KPoly(self.field, [fmpq_poly([1])])
        if self.field.degree == 1:
            a, b = self.to_fmpq_poly(), other.to_fmpq_poly()
            return KPoly.from_fmpq_poly(self.field, fmpq_monic(a.gcd(b)))
        return _modular_gcd(self, other)

    def euclid_gcd(self, other: "KPoly") -> "KPoly":
        """Plain Euclidean gcd over the field (reference implementation)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, (a % b).monic()
        return a.monic()

    def divides(self, other: "KPoly") -> bool:
        return (other % self).is_zero()

    def derivative(self) -> "KPoly":
        return KPoly(self.field, [c * i for i, c in enumerate(self.coeffs)][1:])

    def shift(self, s: int) -> "KPoly":
        """f(X + s*theta)."""
        if s == 0:
            return self
        m = self.field.minpoly
        lin = KPoly(self.field, [fmpq_poly([0, s]) % m, fmpq_poly([1])])
        result = KPoly(self.field, [])
        for c in reversed(self.coeffs):
            result = result * lin + KPoly(self.field, [c])
        return result

    def evaluate(self, a: NFElem) -> NFElem:
        m = self.field.minpoly
        acc = fmpq_poly([])
        for c in reversed(self.coeffs):
            acc = (acc * a.poly + c) % m
        return NFElem(self.field, acc)

    def apply(self, image: fmpq_poly) -> "KPoly":
        """Apply theta -> image to every coefficient."""
        return KPoly(self.field, [c(image) for c in self.coeffs])

    def norm(self) -> fmpq_poly:
        """Monic norm down to Q: Res_Y(m(Y), f(X, Y))."""
        if self.field.degree == 1:
            return fmpq_monic(fmpq_poly([c[0] if c.degree() >= 0 else 0 for c in self.coeffs]))
        terms = {}
        for i, c in enumerate(self.coeffs):
            for j, a in enumerate(c.coeffs()):
                if a:
                    terms[(i, j)] = a
        F = _XY.from_dict(terms)
        M = _XY.from_dict({(0, j): a for j, a in enumerate(self.field.minpoly.coeffs()) if a})
        r = M.resultant(F, "Y")
        coeffs = [fmpq(0)] * (r.degrees()[0] + 1)
        for (i, _), a in r.to_dict().items():
            coeffs[i] = a
        return fmpq_monic(fmpq_poly(coeffs))

    def is_rational(self) -> bool:
        return all(c.degree() <= 0 for c in self.coeffs)

    def to_fmpq_poly(self) -> fmpq_poly:
        if not self.is_rational():
            raise ValueError("polynomial has irrational coefficients")
        return fmpq_poly([c[0] if c.degree() == 0 else 0 for c in self.coeffs])

    def key(self):
        return (self.degree(), [[to_fraction(a) for a in c.coeffs()] for c in reversed(self.coeffs)])

    def to_expr(self, var: str = MAIN_VAR) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree(), -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = _fmpq_poly_str(c, self.field.label)
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                parts.append(f"({cs})")
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_expr()

    def __repr__(self):
        return f"KPoly({self.to_expr()})"


@lru_cache(maxsize=None)
def _prime(k: int) -> int:
    """The k-th prime below 2^62 counting downwards."""
    start = (1 << 62) - 1 if k == 0 else _prime(k - 1) - 2
    n = start if start % 2 else start - 1
    while not fmpz(n).is_prime():
        n -= 2
    return n


def _rational_reconstruct(a: int, m: int):
    """r/s with r = a*s mod m and |r|, s <= sqrt(m/2), or None."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _reduce_coeff(c: fmpq_poly, p: int, mp: nmod_poly) -> nmod_poly | None:
    den = int(c.denom())
    if den % p == 0:
        return None
    inv = pow(den, -1, p)
    r = nmod_poly([int(x) * inv % p for x in c.numer().coeffs()], p)
    return r % mp if mp is not None else r


def _gcd_mod_p(f: KPoly, g: KPoly, p: int):
    """Monic gcd over F_p[t]/(m), or None if p is unsuitable."""
    m = f.field.minpoly
    if int(m.denom()) % p == 0:
        return None
    mp = nmod_poly([int(x) for x in m.numer().coeffs()], p)
    mp = mp * pow(int(m.denom()), -1, p)
    if mp.degree() != m.degree() or mp.gcd(mp.derivative()).degree() > 0:
        return None

    def red(h):
        out = []
        for c in h.coeffs:
            r = _reduce_coeff(c, p, mp)
            if r is None:
                return None
            out.append(r)
        return out

    a, b = red(f), red(g)
    if a is None or b is None or a[-1].is_zero() or b[-1].is_zero():
        return None

    def monic(h):
        while h and h[-1].is_zero():
            h.pop()
        if not h:
            return h
        g0, s, _ = h[-1].xgcd(mp)
        if g0.degree() != 0:
            raise ZeroDivisionError
        inv = s * pow(int(g0.coeffs()[0]), -1, p)
        return [(c * inv) % mp for c in h]

    def rem(x, y):
        x = list(x)
        dy = len(y) - 1
        while len(x) - 1 >= dy and x:
            c = x[-1]
            if not c.is_zero():
                k = len(x) - 1 - dy
                for i, yc in enumerate(y):
                    x[k + i] = (x[k + i] - c * yc) % mp
            x.pop()
            while x and x[-1].is_zero():
                x.pop()
        return x

    try:
        a, b = monic(a), monic(b)
        while b:
            a, b = b, monic(rem(a, b))
    except ZeroDivisionError:
        return None
    return a


def _modular_gcd(f: KPoly, g: KPoly) -> KPoly:
    K = f.field
    d = K.degree
    best_deg = None
    residues: list[list[int]] = []
    modulus = 1
    previous = None
    k = 0
    while True:
        p = _prime(k)
        k += 1
        gp = _gcd_mod_p(f, g, p)
        if gp is None:
            continue
        deg = len(gp) - 1
        if deg == 0:
            return KPoly(K, [fmpq_poly([1])])
        flat = [int(c.coeffs()[j]) if j < len(c.coeffs()) else 0 for c in gp for j in range(d)]
        if best_deg is None or deg < best_deg:
            best_deg, residues, modulus, previous = deg, flat, p, None
        elif deg > best_deg:
            continue
        else:
            residues = [_crt(r, modulus, x, p) for r, x in zip(residues, flat)]
            modulus *= p
        rec = [_rational_reconstruct(r, modulus) for r in residues]
        if any(r is None for r in rec):
            continue
        if rec == previous or modulus.bit_length() > 4000:
            coeffs = [fmpq_poly([to_fmpq(x) for x in rec[i * d:(i + 1) * d]]) for i in range(best_deg + 1)]
            cand = KPoly(K, coeffs)
            if cand.degree() == best_deg and cand.divides(f) and cand.divides(g):
                return cand
            if modulus.bit_length() > 200000:
                return f.euclid_gcd(g)
        previous = rec


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2
    return r1 + m1 * t


def yun(f: KPoly) -> list[tuple[KPoly, int]]:
    """Yun's squarefree decomposition over a number field (characteristic 0)."""
    f = f.monic()
    d = f.derivative()
    a0 = f.gcd(d)
    b = f // a0
    c = d // a0
    out = []
    i = 1
    while b.degree() > 0:
        dd = c - b.derivative()
        a = b.gcd(dd)
        if a.degree() > 0:
            out.append((a, i))
        b = b // a
        c = dd // a
        i += 1
    return out


def factor_over_number_field(f, K: NumberField, cap: int | None = None) -> FactorList:
    """Factor f over K by the squarefree-norm method with shifted generators."""
    if not isinstance(f, KPoly):
        f = KPoly.from_expr(K, as_poly(f))
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    m = K.minpoly
    if m.gcd(m.derivative()).degree() > 0:
        raise NotIrreducibleDefiningPoly("defining polynomial of the field is not squarefree")
    cap = cap or max(DEFAULT_FACTOR_CAP, (K.degree * max(f.degree(), 1)))
    unit = NFElem(K, f.lc())
    if f.degree() == 0:
        return FactorList((), unit, repr(K))
    if K.degree == 1:
        _, facs = factor_fmpq(f.to_fmpq_poly(), cap)
        out = tuple((KPoly.from_fmpq_poly(K, p), e) for p, e in facs)
        return FactorList(out, unit, repr(K))
    result = []
    for part, mult in yun(f):
        for piece in _factor_squarefree(part, cap):
            result.append((piece, mult))
    result.sort(key=lambda fe: fe[0].key())
    return FactorList(tuple(result), unit, repr(K))


def _factor_squarefree(f: KPoly, cap: int) -> list[KPoly]:
    if f.degree() == 1:
        return [f.monic()]
    for s in canonical_integers():
        shifted = f.shift(s)  # f(X + s*theta)
        norm = shifted.norm()
        if norm.gcd(norm.derivative()).degree() > 0:
            continue
        _, facs = factor_fmpq(norm, cap)
        if len(facs) == 1:
            return [f.monic()]
        pieces = []
        for p, _ in facs:
            g = shifted.gcd(KPoly.from_fmpq_poly(f.field, p))
            pieces.append(g.shift(-s).monic())
        return pieces
    raise AssertionError("unreachable")


def roots_in_field(f, K: NumberField) -> list[NFElem]:
    """All roots of f lying in K, in canonical factor order."""
    fl = factor_over_number_field(f, K)
    return [NFElem(K, -p.coeffs[0]) for p, _ in fl.factors if p.degree() == 1]
