"""Certifying that the computed algebraic variety has no spurious points.

Walks the elimination-ideal chain of the prolonged system: each eliminated
state-jet variable z_j contributes the set P_j of denominator-cleared
leading coefficients of the basis elements whose leading variable is z_j.
When every P_j contains a unit (a nonzero constant, or a product of
declared-nonzero factors), every partial solution extends, so the variety
equals the set of data-consistent parameters.

Only that sufficient condition is decided automatically; a genuinely empty
intersection in other situations needs radical membership and is reported
as Undetermined with the P_j listed verbatim for manual analysis.

Also provides the numeric counterpart: reconstructing the state jet at a
data point from the basis' triangular elements, used to spot-check that
certified variety points really extend to full solutions.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import DiffVar, ParamPoly, Poly, exact_divide
from .errors import MissingLeading
from .groebner import ReducedGB

VERDICT_CONST = "EmptyByConstant"
VERDICT_ASSUMED = "EmptyByAssumption"
VERDICT_UNKNOWN = "Undetermined"

CERTIFIED = "Certified"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ExtensionEntry:
    index: int            # j, counting from the highest eliminated variable
    var: DiffVar          # z_j
    leading: tuple        # cleared leading coefficients (ParamPoly or Poly)
    verdict: str


@dataclass(frozen=True)
class ExtensionReport:
    entries: tuple
    overall: str
    param_names: tuple

    def render(self):
        lines = ["extension check (leading coefficients per eliminated variable)"]
        width = max(len(str(e.var)) for e in self.entries)
        for e in self.entries:
            rendered = ", ".join(_render_entry(p, self.param_names)
                                 for p in e.leading)
            lines.append(f"  P_{e.index}  z = {str(e.var):<{width}}  "
                         f"{{{rendered}}}  -> {e.verdict}")
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)


def _render_entry(p, names):
    if isinstance(p, ParamPoly):
        return p.render(names)
    return p.render(names)


def _state_jet_vars(model, ring):
    """State-jet variables of the ring, highest first: z_1 ... z_{N(L+1)}."""
    state_names = set(model.states)
    return [v for v in ring.vars if v.base in state_names]


def clear_denominators(poly):
    """Multiply a polynomial through by a common denominator so every
    coefficient becomes a parameter polynomial with integer content, the
    overall content is 1, and the leading term's leading parameter
    coefficient is positive. Returns {monomial exponents: ParamPoly}."""
    from fractions import Fraction

    from . import _kernels as K

    common = ParamPoly.const(poly.n, 1)
    for c in poly.terms.values():
        if c.den.is_constant and c.den.constant_value() == 1:
            continue
        if exact_divide(common, c.den) is None:
            common = common * c.den
    cleared = {}
    for m, c in poly.terms.items():
        q = exact_divide(c.num * common, c.den)
        if q is None:  # cannot happen: den divides common by construction
            raise ArithmeticError("denominator failed to clear")
        cleared[m] = q
    # one common integer scaling keeps the coefficient ratios exact
    lcm = 1
    for p in cleared.values():
        for c in p.terms.values():
            if isinstance(c, Fraction):
                d = c.denominator
                lcm = lcm * d // _gcd_int(lcm, d)
    if lcm > 1:
        cleared = {m: p * lcm for m, p in cleared.items()}
    cleared = {m: ParamPoly(p.n, {e: int(c) for e, c in p.terms.items()},
                            _checked=True)
               for m, p in cleared.items()}
    content = 0
    for p in cleared.values():
        content = _gcd_int(content, K.dict_int_content(p.terms))
        if content == 1:
            break
    if content > 1:
        cleared = {m: ParamPoly(p.n, K.dict_div_int(p.terms, content), _checked=True)
                   for m, p in cleared.items()}
    lead_mono = max(cleared)
    if cleared[lead_mono].lead()[1] < 0:
        cleared = {m: -p for m, p in cleared.items()}
    return cleared


def _gcd_int(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def extension_sets(model, gb):
    """(z_j, P_j) pairs for the Theorem-2 chain, j = 1 .. N*(L+1).

    gb must be the reduced basis of the prolonged system under its jet
    ordering (state jet highest, then output jet, then input jet). For each
    eliminated variable, P_j collects the cleared leading coefficients of
    the basis elements whose leading variable is z_j; an empty P_j is an
    error, since the sufficient condition cannot even be stated.
    """
    basis = gb.basis if isinstance(gb, ReducedGB) else tuple(gb)
    ring = basis[0].ring
    zvars = _state_jet_vars(model, ring)
    by_leading = {}
    for g in basis:
        sup = g.support_vars()
        if not sup:
            continue
        top = min(sup, key=lambda v: ring.index[v])  # highest-ranked variable
        by_leading.setdefault(top, []).append(g)

    sets = []
    for j, z in enumerate(zvars, start=1):
        entries = []
        for g in by_leading.get(z, ()):
            d = g.degree_in(z)
            cleared = clear_denominators(g)
            zi = ring.index[z]
            lead_terms = {}
            for exps, c in cleared.items():
                if exps[zi] != d:
                    continue
                rest = list(exps)
                rest[zi] = 0
                lead_terms[tuple(rest)] = c
            if len(lead_terms) == 1 and not any(next(iter(lead_terms))):
                entry = next(iter(lead_terms.values()))
            else:
                from .algebra import ParamRat
                entry = Poly(ring, {m: ParamRat(p) for m, p in lead_terms.items()},
                             n=g.n, _checked=False)
            entries.append(entry)
        if not entries:
            raise MissingLeading(
                f"no basis element has positive degree in {z}; the extension "
                "condition cannot be evaluated")
        sets.append((z, tuple(_dedupe(entries))))
    return sets


def _dedupe(entries):
    out = []
    for e in entries:
        if not any(_same(e, o) for o in out):
            out.append(e)
    return out


def _same(a, b):
    if isinstance(a, ParamPoly) and isinstance(b, ParamPoly):
        return a == b
    if isinstance(a, Poly) and isinstance(b, Poly):
        return a == b
    return False


def is_unit_under(p, assumptions):
    """True when the parameter polynomial factors (by exact trial division)
    into declared-nonzero factors times a nonzero constant."""
    if p.is_zero:
        return False
    p, _ = p.primitive()
    progress = True
    while progress and not p.is_constant:
        progress = False
        for a in assumptions:
            if a.is_constant:
                continue
            q = exact_divide(p, a)
            if q is not None and not q.is_zero:
                p, _ = q.primitive()
                progress = True
                break
    return p.is_constant and not p.is_zero


def check_extension(sets, assumptions=()):
    """Apply the sufficient condition to the per-variable leading sets.

    Per variable: EmptyByConstant when some cleared coefficient is a nonzero
    constant, EmptyByAssumption when some coefficient is a unit under the
    declared nonzero assumptions, otherwise Undetermined. The overall
    verdict is Certified only when every variable is Empty*.
    """
    entries = []
    for j, (z, leading) in enumerate(sets, start=1):
        verdict = VERDICT_UNKNOWN
        consts = [p for p in leading
                  if isinstance(p, ParamPoly) and p.is_constant and not p.is_zero]
        if consts:
            verdict = VERDICT_CONST
        else:
            for p in leading:
                if isinstance(p, ParamPoly) and is_unit_under(p, assumptions):
                    verdict = VERDICT_ASSUMED
                    break
        entries.append(ExtensionEntry(index=j, var=z, leading=leading,
                                      verdict=verdict))
    overall = CERTIFIED if all(e.verdict != VERDICT_UNKNOWN for e in entries) \
        else INCONCLUSIVE
    return ExtensionReport(entries=tuple(entries), overall=overall,
                           param_names=())


def run_extension_check(model, gb):
    """extension_sets + check_extension with the model's own assumptions."""
    sets = extension_sets(model, gb)
    report = check_extension(sets, model.assume_nonzero)
    return ExtensionReport(entries=report.entries, overall=report.overall,
                           param_names=model.params)


# ---------------------------------------------------------------------------
# numeric state reconstruction (soundness spot-checks, matched re-integration)
# ---------------------------------------------------------------------------

def reconstruct_state_jet(model, gb, jet_values, params, up_to_order=None):
    """Solve the basis' triangular elements numerically for the state jet.

    jet_values maps output/input DiffVars to numbers at one time point;
    parameters are fixed. Works from the lowest eliminated variable upward,
    at each step solving the (univariate) element whose leading variable is
    the one being reconstructed; multiple real roots are disambiguated
    against the remaining candidates. Returns {DiffVar: value} for the state
    jet up to the requested order (default: everything in the ring).
    """
    basis = gb.basis if isinstance(gb, ReducedGB) else tuple(gb)
    ring = basis[0].ring
    values = dict(jet_values)
    pvec = [float(params[p]) for p in model.params]
    state_names = set(model.states)
    zvars = [v for v in reversed(ring.vars) if v.base in state_names]
    if up_to_order is not None:
        zvars = [v for v in zvars if v.order <= up_to_order]

    by_leading = {}
    for g in basis:
        sup = g.support_vars()
        if not sup:
            continue
        top = min(sup, key=lambda v: ring.index[v])
        by_leading.setdefault(top, []).append(g)

    for z in zvars:
        cands = by_leading.get(z)
        if not cands:
            raise MissingLeading(f"no triangular element determines {z}")
        cands = sorted(cands, key=lambda g: g.degree_in(z))
        g = cands[0]
        roots = _univariate_roots(g, z, values, pvec)
        if not roots:
            raise ArithmeticError(f"no real root while reconstructing {z}")
        if len(roots) > 1 and len(cands) > 1:
            def residual(r):
                trial = dict(values)
                trial[z] = r
                return max(abs(_eval_partial(h, trial, pvec)) for h in cands[1:])
            roots.sort(key=residual)
        values[z] = roots[0]
    return {v: values[v] for v in values if v.base in state_names}


def _univariate_roots(g, z, values, pvec):
    zi = g.ring.index[z]
    d = g.degree_in(z)
    coeffs = np.zeros(d + 1)
    for exps, c in g.terms.items():
        m = c.evaluate(pvec)
        for i, e in enumerate(exps):
            if e and i != zi:
                m *= values[g.ring.vars[i]] ** e
        coeffs[d - exps[zi]] += m
    if d == 1:
        if coeffs[0] == 0.0:
            return []
        return [-coeffs[1] / coeffs[0]]
    roots = np.roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
    return sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-9 * scale)


def _eval_partial(g, values, pvec):
    total = 0.0
    for exps, c in g.terms.items():
        m = c.evaluate(pvec)
        for i, e in enumerate(exps):
            if e:
                m *= values[g.ring.vars[i]] ** e
        total += m
    return total
