"""Buchberger's algorithm, reduced Groebner bases, and elimination subsets.

The coefficient field is the rational functions in the model parameters
(ParamRat); parameters are never ring variables. Everything is deterministic:
the same generators in any order produce the same reduced basis.
"""

import os
from dataclasses import dataclass

from . import _kernels as K
from .algebra import MonomialOrder, Poly, _axpy_terms
from .errors import RingMismatch, ResourceExhausted, ZeroPolynomial


@dataclass(frozen=True)
class IdealGens:
    gens: tuple
    order: MonomialOrder


@dataclass(frozen=True)
class ReducedGB:
    basis: tuple
    order: MonomialOrder

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


@dataclass(frozen=True)
class GBLimits:
    """Caps that turn runaway lex computations into a loud failure."""

    max_pairs: int = 20000
    max_basis: int = 400

    @classmethod
    def from_env(cls):
        return cls(
            max_pairs=int(os.environ.get("PARAMVARIETY_GB_MAX_PAIRS", cls.max_pairs)),
            max_basis=int(os.environ.get("PARAMVARIETY_GB_MAX_BASIS", cls.max_basis)),
        )


def s_polynomial(f, g, order=None):
    """LCM combination of f and g whose leading terms cancel."""
    if f.ring != g.ring or (order is not None and order != f.ring):
        raise RingMismatch("s-polynomial operands live in different rings")
    lm_f, lc_f = f.leading_term()
    lm_g, lc_g = g.leading_term()
    lcm = K.expvec_lcm(lm_f, lm_g)
    left = f.mul_term(lc_f.inv(), K.expvec_sub(lcm, lm_f))
    right = g.mul_term(lc_g.inv(), K.expvec_sub(lcm, lm_g))
    return left - right


def reduce_poly(p, basis):
    """Full normal form of p against a list of nonzero polynomials: every
    monomial of the result is divisible by no basis leading monomial."""
    if p.is_zero or not basis:
        return p
    lead = [g.leading_term() for g in basis]
    work = dict(p.terms)
    rem = {}
    while work:
        mono = max(work)
        coeff = work[mono]
        for i, (lm, lc) in enumerate(lead):
            if K.expvec_divides(lm, mono):
                q = coeff if lc.is_one else coeff / lc
                _axpy_terms(work, -q, K.expvec_sub(mono, lm), basis[i].terms)
                break
        else:
            rem[mono] = coeff
            del work[mono]
    return Poly(p.ring, rem, n=p.n, _checked=True)


def _as_gens(gens_or_ideal, order):
    if isinstance(gens_or_ideal, IdealGens):
        return list(gens_or_ideal.gens), gens_or_ideal.order
    gens = list(gens_or_ideal)
    if order is None:
        if not gens:
            raise ValueError("empty generator list")
        order = gens[0].ring
    return gens, order


def buchberger(gens_or_ideal, order=None, limits=None):
    """Groebner basis of the ideal generated by the inputs.

    Normal (minimal-LCM) pair selection with Buchberger's coprimality and
    chain criteria. Raises ResourceExhausted with progress information if a
    configured cap is hit.
    """
    gens, order = _as_gens(gens_or_ideal, order)
    limits = limits or GBLimits.from_env()
    basis = []
    for g in gens:
        if g.ring != order:
            raise RingMismatch("generator lives in a different ring")
        if g.is_zero:
            raise ZeroPolynomial("zero polynomial among the ideal generators")
        g = g.monic()
        if not any(g == h for h in basis):
            basis.append(g)
    if not basis:
        raise ValueError("empty generator list")

    lms = [g.leading_term()[0] for g in basis]
    pairs = {}
    done = set()

    def add_pairs(j):
        for i in range(j):
            pairs[(i, j)] = K.expvec_lcm(lms[i], lms[j])

    for j in range(len(basis)):
        add_pairs(j)

    processed = 0
    while pairs:
        processed += 1
        if processed > limits.max_pairs:
            raise ResourceExhausted(
                f"S-pair cap exceeded ({limits.max_pairs}); basis size "
                f"{len(basis)}, {len(pairs)} pairs pending")
        (i, j) = min(pairs, key=lambda ij: (pairs[ij], ij))
        lcm = pairs.pop((i, j))
        done.add((i, j))
        # coprimality criterion: disjoint leading monomials reduce to zero
        if lcm == K.expvec_add(lms[i], lms[j]):
            continue
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if (min(i, k), max(i, k)) in done and (min(j, k), max(j, k)) in done \
                    and K.expvec_divides(lms[k], lcm):
                skip = True
                break
        if skip:
            continue
        r = reduce_poly(s_polynomial(basis[i], basis[j]), basis)
        if r.is_zero:
            continue
        basis.append(r.monic())
        lms.append(r.leading_term()[0])
        if len(basis) > limits.max_basis:
            raise ResourceExhausted(
                f"basis size cap exceeded ({limits.max_basis}); "
                f"{len(pairs)} pairs pending")
        add_pairs(len(basis) - 1)
    return basis


def reduce_basis(gb, order=None):
    """The unique reduced Groebner basis of the ideal spanned by a Groebner
    basis: monic, inter-reduced, sorted ascending by leading monomial."""
    if not gb:
        raise ValueError("empty basis")
    if order is None:
        order = gb[0].ring
    # minimalize: drop elements whose leading monomial another one divides
    polys = sorted((g.monic() for g in gb if not g.is_zero),
                   key=lambda g: g.leading_term()[0])
    minimal = []
    for g in polys:
        lm = g.leading_term()[0]
        if any(K.expvec_divides(h.leading_term()[0], lm) for h in minimal):
            continue
        minimal.append(g)
    # inter-reduce tails to a fixpoint
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(minimal):
            others = minimal[:i] + minimal[i + 1:]
            r = reduce_poly(g, others)
            if not (r == g):
                minimal[i] = r.monic()
                changed = True
    minimal.sort(key=lambda g: g.leading_term()[0])
    return ReducedGB(tuple(minimal), order)


def elimination_subset(gb, keep):
    """Elements of a reduced basis supported on the keep variables only.

    keep must be a downward-closed suffix of the variable order; by the
    elimination theorem the result is a Groebner basis of the elimination
    ideal."""
    if isinstance(gb, ReducedGB):
        order, basis = gb.order, gb.basis
    else:
        basis = tuple(gb)
        order = basis[0].ring
    order.suffix_start(keep)
    keep = set(keep)
    return [g for g in basis if g.uses_only(keep)]
