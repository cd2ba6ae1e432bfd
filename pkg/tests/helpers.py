"""Shared construction helpers for the test suite."""

from fractions import Fraction

from paramvariety.algebra import DiffVar, MonomialOrder, ParamPoly, ParamRat, Poly


def pp(n, terms):
    """ParamPoly from {exponent tuple: coefficient}."""
    return ParamPoly(n, dict(terms))


def pr(n, num_terms, den_terms=None):
    num = pp(n, num_terms)
    den = pp(n, den_terms) if den_terms is not None else None
    return ParamRat(num, den)


def agens(n):
    """The parameter generators a1..an as ParamRats."""
    return [ParamRat.gen(n, i) for i in range(n)]


def xy_ring():
    x, y = DiffVar("x", 0), DiffVar("y", 0)
    return MonomialOrder([x, y]), x, y


def poly_of(ring, n, mapping):
    """Poly from {mono mapping or exps: coeff-int/Fraction/ParamRat}."""
    return Poly(ring, mapping, n=n)


def random_parampoly(rng, n, max_terms=3, max_deg=2, coeff=5):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = tuple(rng.randint(0, max_deg) for _ in range(n))
        c = rng.randint(-coeff, coeff)
        if c:
            terms[exps] = terms.get(exps, 0) + c
    return ParamPoly(n, terms)


def random_paramrat(rng, n, allow_zero=False):
    num = random_parampoly(rng, n)
    den = random_parampoly(rng, n)
    while den.is_zero:
        den = random_parampoly(rng, n)
    if not allow_zero:
        while num.is_zero:
            num = random_parampoly(rng, n)
    return ParamRat(num, den)


def random_poly(rng, ring, n, max_terms=4, max_deg=2, rational=False):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = tuple(rng.randint(0, max_deg) if rng.random() < 0.6 else 0
                     for _ in ring.vars)
        if rational:
            c = random_paramrat(rng, n, allow_zero=True)
        else:
            c = ParamRat.from_const(n, Fraction(rng.randint(-5, 5)))
        if not c.is_zero:
            terms[exps] = c
    return Poly(ring, terms, n=n)
