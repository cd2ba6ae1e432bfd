"""Exact sparse multivariate polynomial arithmetic over a rational-function
coefficient field.

Two layers:

* parameter layer: ``ParamPoly`` (exact integer/rational coefficients keyed
  by parameter exponent vectors) and ``ParamRat`` = ParamPoly / ParamPoly,
  the coefficient-field elements;
* differential layer: ``Poly``, sparse polynomials in derivative-tagged
  variables (``DiffVar``) under a pure lexicographic ``MonomialOrder``,
  with ParamRat coefficients.

Floating point is forbidden here; every operation is exact. All values are
immutable after construction, so they are safe to share between threads.

Canonical form of a ParamRat: coefficients are cleared to integers, the
integer gcd across numerator and denominator is 1, numerator and denominator
share no common monomial factor, an exact trial-division pass cancels one
into the other when possible, and the denominator's leading coefficient
(lexicographic in parameter-declaration order) is positive.
"""

from fractions import Fraction
from typing import NamedTuple

from . import _kernels as K
from .errors import (
    DivisionByZero,
    InvalidBlock,
    RingMismatch,
    UnknownVariable,
    ZeroPolynomial,
)

LT, EQ, GT = -1, 0, 1


class DiffVar(NamedTuple):
    """A base variable (state/input/output) tagged with a derivative order."""

    base: str
    order: int

    def raised(self, k=1):
        return DiffVar(self.base, self.order + k)

    def __str__(self):
        if self.order <= 3:
            return self.base + "'" * self.order
        return f"{self.base}^({self.order})"


# ---------------------------------------------------------------------------
# parameter layer
# ---------------------------------------------------------------------------

class ParamPoly:
    """Sparse polynomial in the model parameters with exact coefficients.

    ``terms`` maps exponent tuples (length = number of parameters) to
    nonzero int/Fraction coefficients. Instances are treated as immutable.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None, _checked=False):
        self.n = n
        if terms is None:
            self.terms = {}
        elif _checked:
            self.terms = terms
        else:
            clean = {}
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps!r} for {n} parameters")
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
            self.terms = clean

    # -- constructors

    @classmethod
    def zero(cls, n):
        return cls(n, {}, _checked=True)

    @classmethod
    def const(cls, n, value):
        value = _exact(value)
        if not value:
            return cls.zero(n)
        return cls(n, {(0,) * n: value}, _checked=True)

    @classmethod
    def gen(cls, n, i, power=1):
        exps = [0] * n
        exps[i] = power
        return cls(n, {tuple(exps): 1}, _checked=True)

    # -- predicates

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("not a constant polynomial")
        return Fraction(next(iter(self.terms.values())))

    # -- structure

    def lead(self):
        """(exponent vector, coefficient) of the lexicographically largest
        monomial in parameter-declaration order."""
        if not self.terms:
            raise ZeroPolynomial("zero parameter polynomial has no leading term")
        m = max(self.terms)
        return m, self.terms[m]

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    # -- arithmetic

    def _coerce(self, other):
        if isinstance(other, ParamPoly):
            if other.n != self.n:
                raise RingMismatch("parameter counts differ")
            return other
        return ParamPoly.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        return ParamPoly(self.n, K.dict_add(self.terms, other.terms), _checked=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ParamPoly(self.n, K.dict_sub(self.terms, other.terms), _checked=True)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ParamPoly(self.n, K.dict_neg(self.terms), _checked=True)

    def __mul__(self, other):
        if isinstance(other, ParamPoly):
            if other.n != self.n:
                raise RingMismatch("parameter counts differ")
            return ParamPoly(self.n, K.dict_mul(self.terms, other.terms), _checked=True)
        return ParamPoly(self.n, K.dict_scale(self.terms, _exact(other)), _checked=True)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a parameter polynomial")
        out = ParamPoly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == ParamPoly.const(self.n, other)
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    # -- evaluation / rendering

    def evaluate(self, values):
        """Numeric value at a parameter vector (sequence aligned with the
        declaration order)."""
        total = 0.0
        for exps, c in self.terms.items():
            m = float(c)
            for i, e in enumerate(exps):
                if e:
                    m *= values[i] ** e
            total += m
        return total

    def evaluate_exact(self, values):
        total = Fraction(0)
        for exps, c in self.terms.items():
            m = Fraction(c)
            for i, e in enumerate(exps):
                if e:
                    m *= Fraction(values[i]) ** e
            total += m
        return total

    def primitive(self):
        """Content-free copy with a positive leading coefficient, plus the
        exact scalar that was divided out."""
        if self.is_zero:
            return self, Fraction(0)
        num, scale = _clear_to_int(self)
        g = K.dict_int_content(num.terms)
        if g > 1:
            num = ParamPoly(self.n, K.dict_div_int(num.terms, g), _checked=True)
            scale *= g
        if num.lead()[1] < 0:
            num = -num
            scale = -scale
        return num, scale

    def render(self, names):
        return _render_terms(self.terms, names)

    def __repr__(self):
        return f"ParamPoly({self.terms!r})"


def _exact(value):
    """Accept int/Fraction/str/Decimal; reject floats (exact layer only)."""
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, float):
        raise TypeError("floating point is not allowed in exact arithmetic; "
                        "pass a Fraction or a decimal string")
    return Fraction(value)


def _clear_to_int(p):
    """Scale p so every coefficient is an int; returns (poly, scale) with
    p = poly / scale."""
    denoms = [c.denominator for c in p.terms.values() if isinstance(c, Fraction)]
    if not denoms:
        return p, Fraction(1)
    m = 1
    for d in denoms:
        m = m * d // _gcd(m, d)
    terms = {k: int(c * m) for k, c in p.terms.items()}
    return ParamPoly(p.n, terms, _checked=True), Fraction(m)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def exact_divide(num, den):
    """Exact multivariate quotient num/den in the parameter ring, or None
    when den does not divide num. Coefficients of the quotient may be
    Fractions."""
    if den.is_zero:
        raise DivisionByZero("division of parameter polynomials by zero")
    if num.is_zero:
        return ParamPoly.zero(num.n)
    lm_d, lc_d = den.lead()
    rem = dict(num.terms)
    quot = {}
    while rem:
        lm_r = max(rem)
        if not K.expvec_divides(lm_d, lm_r):
            return None
        c = Fraction(rem[lm_r]) / lc_d
        delta = K.expvec_sub(lm_r, lm_d)
        quot[delta] = c
        K.dict_axpy(rem, -c, delta, den.terms)
    return ParamPoly(num.n, quot, _checked=True)


class ParamRat:
    """Element of the coefficient field: a ratio of ParamPolys in canonical
    form (see module docstring). Construction normalizes."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = ParamPoly.const(num.n, 1)
        if _canonical:
            self.num = num
            self.den = den
            return
        if den.is_zero:
            raise DivisionByZero("zero denominator")
        self.num, self.den = _normalize(num, den)

    @classmethod
    def from_const(cls, n, value):
        value = _exact(value)
        if isinstance(value, Fraction):
            return cls(ParamPoly.const(n, value.numerator),
                       ParamPoly.const(n, value.denominator))
        return cls(ParamPoly.const(n, value), _canonical=False)

    @classmethod
    def zero(cls, n):
        return cls(ParamPoly.zero(n), ParamPoly.const(n, 1), _canonical=True)

    @classmethod
    def one(cls, n):
        return cls(ParamPoly.const(n, 1), ParamPoly.const(n, 1), _canonical=True)

    @classmethod
    def gen(cls, n, i):
        return cls(ParamPoly.gen(n, i), _canonical=False)

    # -- predicates

    @property
    def n(self):
        return self.num.n

    @property
    def is_zero(self):
        return self.num.is_zero

    @property
    def is_one(self):
        return self.num == self.den

    @property
    def is_param_free(self):
        return self.num.is_constant and self.den.is_constant

    def as_fraction(self):
        if not self.is_param_free:
            raise ValueError("coefficient depends on parameters")
        if self.is_zero:
            return Fraction(0)
        return self.num.constant_value() / self.den.constant_value()

    # -- arithmetic

    def _coerce(self, other):
        if isinstance(other, ParamRat):
            if other.n != self.n:
                raise RingMismatch("parameter counts differ")
            return other
        if isinstance(other, ParamPoly):
            return ParamRat(other)
        return ParamRat.from_const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den.terms == other.den.terms:
            return ParamRat(self.num + other.num, self.den)
        return ParamRat(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ParamRat(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return ParamRat.zero(self.n)
        return ParamRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero:
            raise DivisionByZero("inversion of the zero rational function")
        return ParamRat(self.den, self.num)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        return ParamRat(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, (ParamRat, ParamPoly, int, Fraction)):
            other = self._coerce(other)
            return self.num * other.den == other.num * self.den
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return not self.is_zero

    # -- evaluation / rendering

    def evaluate(self, values):
        d = self.den.evaluate(values)
        if d == 0.0:
            raise ZeroDivisionError("denominator vanishes at this parameter point")
        return self.num.evaluate(values) / d

    def render(self, names):
        num = _render_terms(self.num.terms, names)
        if self.den.is_constant and self.den.constant_value() == 1:
            return num
        return f"({num})/({_render_terms(self.den.terms, names)})"

    def __repr__(self):
        return f"ParamRat({self.num.terms!r}, {self.den.terms!r})"


def _rescale_pair(num, den):
    """Scale num/den (jointly, preserving the quotient) so both have integer
    coefficients with no common integer content or monomial factor."""
    num, s_num = _clear_to_int(num)
    den, s_den = _clear_to_int(den)
    if s_num != s_den:
        # num/s_num over den/s_den == (num * s_den) / (den * s_num)
        ratio = s_den / s_num
        num = num * ratio.numerator
        den = den * ratio.denominator
        num, _ = _clear_to_int(num)
        den, _ = _clear_to_int(den)
    g = _gcd(K.dict_int_content(num.terms), K.dict_int_content(den.terms))
    if g > 1:
        num = ParamPoly(num.n, K.dict_div_int(num.terms, g), _checked=True)
        den = ParamPoly(den.n, K.dict_div_int(den.terms, g), _checked=True)
    shift = _common_monomial(num, den)
    if any(shift):
        num = _shift_down(num, shift)
        den = _shift_down(den, shift)
    return num, den


def _normalize(num, den):
    """Canonicalize a num/den pair; see the module docstring for the form."""
    if num.is_zero:
        return ParamPoly.zero(num.n), ParamPoly.const(num.n, 1)
    num, den = _rescale_pair(num, den)
    for _ in range(8):  # each trial division strictly lowers a degree
        if den.is_constant:
            break
        q = exact_divide(num, den)
        if q is not None:
            num, den = _rescale_pair(q, ParamPoly.const(num.n, 1))
            continue
        if not num.is_constant:
            q = exact_divide(den, num)
            if q is not None:
                num, den = _rescale_pair(ParamPoly.const(num.n, 1), q)
                continue
        break
    if den.lead()[1] < 0:
        num, den = -num, -den
    return num, den


def _common_monomial(a, b):
    m = None
    for terms in (a.terms, b.terms):
        for exps in terms:
            m = exps if m is None else K.expvec_min(m, exps)
            if not any(m):
                return m
    return m


def _shift_down(p, shift):
    terms = {K.expvec_sub(exps, shift): c for exps, c in p.terms.items()}
    return ParamPoly(p.n, terms, _checked=True)


def rat_arith(op, a, b=None):
    """Field operations on coefficient values; results are canonical.

    op is one of 'add', 'mul', 'inv' (b unused for 'inv').
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown operation {op!r}")


def _render_terms(terms, names):
    if not terms:
        return "0"
    parts = []
    for exps in sorted(terms, reverse=True):
        c = terms[exps]
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        mono = "*".join(factors)
        c = Fraction(c)
        if not mono:
            body = str(c) if c > 0 else str(-c)
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# differential layer
# ---------------------------------------------------------------------------

class MonomialOrder:
    """Pure lexicographic order given by an ordered variable list (highest
    first). Also serves as the ambient ring description for Poly."""

    __slots__ = ("vars", "index")

    def __init__(self, vars):
        self.vars = tuple(vars)
        self.index = {v: i for i, v in enumerate(self.vars)}
        if len(self.index) != len(self.vars):
            raise ValueError("duplicate variable in monomial order")

    def __len__(self):
        return len(self.vars)

    def __contains__(self, var):
        return var in self.index

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.vars == other.vars

    def __hash__(self):
        return hash(self.vars)

    def exps(self, mono):
        """Exponent tuple for a monomial given as a DiffVar->exponent mapping
        or an already-aligned tuple."""
        if isinstance(mono, tuple):
            if len(mono) != len(self.vars):
                raise UnknownVariable("exponent tuple length does not match the ring")
            return mono
        exps = [0] * len(self.vars)
        for var, e in mono.items():
            i = self.index.get(var)
            if i is None:
                raise UnknownVariable(f"variable {var} not in the monomial order")
            exps[i] = e
        return tuple(exps)

    def compare(self, m1, m2):
        """LT/EQ/GT of two monomials; exponent tuples are aligned highest
        variable first, so this is plain tuple comparison."""
        a, b = self.exps(m1), self.exps(m2)
        if a == b:
            return EQ
        return GT if a > b else LT

    def suffix_start(self, keep):
        """Index k such that keep == vars[k:], else InvalidBlock."""
        keep = set(keep)
        k = len(self.vars) - len(keep)
        if k < 0 or set(self.vars[k:]) != keep:
            raise InvalidBlock("keep-set must be the lowest-ranked suffix of the order")
        return k

    def __repr__(self):
        return "MonomialOrder(" + " > ".join(str(v) for v in self.vars) + ")"


def lex_compare(m1, m2, order):
    return order.compare(m1, m2)


class Poly:
    """Sparse polynomial in DiffVars over ParamRat coefficients.

    terms maps ring-aligned exponent tuples to nonzero ParamRat values.
    """

    __slots__ = ("ring", "n", "terms")

    def __init__(self, ring, terms=None, n=None, _checked=False):
        self.ring = ring
        if n is not None:
            self.n = n
        else:
            rats = [c for c in (terms or {}).values() if isinstance(c, ParamRat)]
            if not rats:
                raise ValueError("parameter count required when no ParamRat "
                                 "coefficient is present")
            self.n = rats[0].n
        if _checked:
            self.terms = terms or {}
            return
        clean = {}
        for mono, c in (terms or {}).items():
            exps = ring.exps(mono)
            if not isinstance(c, ParamRat):
                c = ParamRat.from_const(self.n, c)
            if not c.is_zero:
                prev = clean.get(exps)
                c = c if prev is None else prev + c
                if c.is_zero:
                    del clean[exps]
                else:
                    clean[exps] = c
        self.terms = clean

    # -- constructors

    @classmethod
    def zero(cls, ring, n):
        return cls(ring, {}, n=n, _checked=True)

    @classmethod
    def const(cls, ring, coeff):
        if not isinstance(coeff, ParamRat):
            raise TypeError("constant coefficient must be a ParamRat")
        if coeff.is_zero:
            return cls.zero(ring, coeff.n)
        unit = (0,) * len(ring.vars)
        return cls(ring, {unit: coeff}, n=coeff.n, _checked=True)

    @classmethod
    def var(cls, ring, v, n, power=1):
        i = ring.index.get(v)
        if i is None:
            raise UnknownVariable(f"variable {v} not in the monomial order")
        exps = [0] * len(ring.vars)
        exps[i] = power
        return cls(ring, {tuple(exps): ParamRat.one(n)}, n=n, _checked=True)

    # -- predicates / structure

    @property
    def is_zero(self):
        return not self.terms

    def leading_term(self):
        """(leading monomial exponent tuple, coefficient) under the ring's
        lex order."""
        if not self.terms:
            raise ZeroPolynomial("zero polynomial has no leading term")
        m = max(self.terms)
        return m, self.terms[m]

    def support_vars(self):
        used = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(self.ring.vars[i])
        return used

    def uses_only(self, allowed):
        allowed = set(allowed)
        return all(v in allowed for v in self.support_vars())

    def degree_in(self, var):
        i = self.ring.index[var]
        return max((exps[i] for exps in self.terms), default=0)

    def terms_sorted(self):
        """(exponents, coefficient) pairs, leading monomial first."""
        return [(m, self.terms[m]) for m in sorted(self.terms, reverse=True)]

    # -- arithmetic

    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatch("polynomials live in different rings")

    def __add__(self, other):
        if isinstance(other, (ParamRat, int, Fraction)):
            other = Poly.const(self.ring, self._rat(other))
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            prev = terms.get(m)
            s = c if prev is None else prev + c
            if s.is_zero:
                if prev is not None:
                    del terms[m]
            else:
                terms[m] = s
        return Poly(self.ring, terms, n=self.n, _checked=True)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -self._rat(other))

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()},
                    n=self.n, _checked=True)

    def _rat(self, value):
        if isinstance(value, ParamRat):
            return value
        return ParamRat.from_const(self.n, value)

    def __mul__(self, other):
        if isinstance(other, (ParamRat, int, Fraction)):
            return self.scale(self._rat(other))
        self._check(other)
        out = {}
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = K.expvec_add(ma, mb)
                c = ca * cb
                prev = out.get(m)
                s = c if prev is None else prev + c
                if s.is_zero:
                    if prev is not None:
                        del out[m]
                else:
                    out[m] = s
        return Poly(self.ring, out, n=self.n, _checked=True)

    __rmul__ = __mul__

    def scale(self, c):
        if c.is_zero:
            return Poly.zero(self.ring, self.n)
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()},
                    n=self.n, _checked=True)

    def mul_term(self, c, delta):
        """c * x^delta * self for a ParamRat c and exponent tuple delta."""
        if c.is_zero:
            return Poly.zero(self.ring, self.n)
        return Poly(self.ring,
                    {K.expvec_add(m, delta): v * c for m, v in self.terms.items()},
                    n=self.n, _checked=True)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(self.ring, ParamRat.one(self.n))
        for _ in range(k):
            out = out * self
        return out

    def monic(self):
        if self.is_zero:
            raise ZeroPolynomial("cannot scale the zero polynomial monic")
        _, lc = self.leading_term()
        if lc.is_one:
            return self
        return self.scale(lc.inv())

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.ring == other.ring and self.terms.keys() == other.terms.keys()
                and all(c == other.terms[m] for m, c in self.terms.items()))

    __hash__ = None

    # -- calculus / ring moves

    def diff_wrt(self, var):
        """Formal partial derivative with respect to one ring variable."""
        i = self.ring.index.get(var)
        if i is None:
            raise UnknownVariable(f"variable {var} not in the monomial order")
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if not e:
                continue
            lowered = list(exps)
            lowered[i] = e - 1
            m = tuple(lowered)
            add = c * e
            prev = out.get(m)
            s = add if prev is None else prev + add
            if s.is_zero:
                if prev is not None:
                    del out[m]
            else:
                out[m] = s
        return Poly(self.ring, out, n=self.n, _checked=True)

    def rering(self, new_ring):
        """Rebuild over another variable order; raises UnknownVariable if a
        variable with nonzero exponent is missing from the target."""
        terms = {}
        for exps, c in self.terms.items():
            mono = {self.ring.vars[i]: e for i, e in enumerate(exps) if e}
            terms[new_ring.exps(mono)] = c
        return Poly(new_ring, terms, n=self.n, _checked=True)

    # -- evaluation / rendering

    def evaluate(self, var_values, param_values):
        """Numeric value; var_values maps DiffVar -> float, param_values is
        aligned with parameter declaration order."""
        vals = [var_values[v] for v in self.ring.vars]
        total = 0.0
        for exps, c in self.terms.items():
            m = c.evaluate(param_values)
            for i, e in enumerate(exps):
                if e:
                    m *= vals[i] ** e
            total += m
        return total

    def render(self, names):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms_sorted():
            factors = []
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(str(self.ring.vars[i]))
                elif e > 1:
                    factors.append(f"{self.ring.vars[i]}^{e}")
            mono = "*".join(factors)
            cs = c.render(names)
            negated = False
            if cs == "1" and mono:
                body = mono
            elif cs == "-1" and mono:
                body, negated = mono, True
            else:
                wrapped = f"({cs})" if ("+" in cs or " - " in cs or "/" in cs) else cs
                if wrapped.startswith("-") and "(" not in wrapped:
                    wrapped, negated = wrapped[1:], True
                body = f"{wrapped}*{mono}" if mono else wrapped
            if not parts:
                parts.append(f"-{body}" if negated else body)
            else:
                parts.append(f"- {body}" if negated else f"+ {body}")
        return " ".join(parts)

    def __repr__(self):
        names = [f"a{i + 1}" for i in range(self.n)]
        return f"Poly[{self.render(names)}]"


def leading_term(p, order=None):
    if order is not None and order != p.ring:
        raise RingMismatch("polynomial does not live in the given order")
    return p.leading_term()


def poly_divide(f, divisors, order=None):
    """Multivariate division: f = sum(q_i * g_i) + r with no monomial of r
    divisible by any divisor's leading monomial. Deterministic: the first
    divisor in list order whose leading monomial divides is used."""
    ring = f.ring
    if order is not None and order != ring:
        raise RingMismatch("polynomial does not live in the given order")
    lead = []
    for g in divisors:
        if g.ring != ring:
            raise RingMismatch("divisor lives in a different ring")
        lead.append(g.leading_term())
    quots = [Poly.zero(ring, f.n) for _ in divisors]
    rem = {}
    work = dict(f.terms)
    while work:
        mono = max(work)
        coeff = work[mono]
        for i, (lm, lc) in enumerate(lead):
            if K.expvec_divides(lm, mono):
                q = coeff if lc.is_one else coeff / lc
                delta = K.expvec_sub(mono, lm)
                quots[i] = quots[i] + Poly(ring, {delta: q}, n=f.n, _checked=True)
                _axpy_terms(work, -q, delta, divisors[i].terms)
                break
        else:
            rem[mono] = coeff
            del work[mono]
    return quots, Poly(ring, rem, n=f.n, _checked=True)


def _axpy_terms(work, c, delta, g_terms):
    """In-place work += c * x^delta * g_terms over ParamRat coefficients."""
    for m, v in g_terms.items():
        key = K.expvec_add(m, delta)
        add = c * v
        prev = work.get(key)
        s = add if prev is None else prev + add
        if s.is_zero:
            if prev is not None:
                del work[key]
        else:
            work[key] = s
    return work
