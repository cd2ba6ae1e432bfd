"""Derivation of the input-output equation basis.

Iterates the prolongation order, computes the reduced Groebner basis, and
extracts the unique state-free element, which is then normalized into the
canonical split

    sum_l c_l(a) * f_l(y-jet, u-jet)  =  rhs(y-jet, u-jet)

where every c_l genuinely depends on a parameter and rhs has parameter-free
coefficients. The theory bounds the required order by the state count, so
exceeding it signals a bug, not a property of the model.
"""

from dataclasses import dataclass

from .algebra import DiffVar, MonomialOrder, Poly
from .errors import InternalError, MultipleIOEquations, NoParameterDependence
from .groebner import buchberger, elimination_subset, reduce_basis
from .model import jet_ring, prolong


@dataclass(frozen=True)
class IOEquationBasis:
    """The normalized input-output equation of a model.

    L is the minimal differentiation order. monos/coeffs list the
    parameter-dependent monomials (exponent tuples over `ring`) in ascending
    lex order with their rational-function coefficients; rhs collects the
    parameter-free part with its sign flipped, mirroring the
    'sum c_l f_l = rhs' layout. full is the monic state-free polynomial
    itself: full == sum(c_l * f_l) - rhs.
    """

    L: int
    ring: MonomialOrder
    monos: tuple
    coeffs: tuple
    rhs: Poly
    full: Poly
    param_names: tuple
    output_name: str = "y"
    input_names: tuple = ()

    @property
    def n_coeffs(self):
        return len(self.coeffs)

    def mono_poly(self, k):
        from .algebra import ParamRat
        n = self.full.n
        return Poly(self.ring, {self.monos[k]: ParamRat.one(n)}, n=n, _checked=True)

    def render(self):
        names = self.param_names
        parts = []
        for mono, coeff in zip(self.monos, self.coeffs):
            mono_s = _render_mono(self.ring, mono)
            parts.append(f"({coeff.render(names)}) * {mono_s}")
        lhs = " + ".join(parts)
        rhs_s = self.rhs.render(names) if not self.rhs.is_zero else "0"
        return f"{lhs} = {rhs_s}"

    def summary(self):
        return (f"L = {self.L}\n"
                f"coefficients = {self.n_coeffs}\n"
                f"{self.render()}\n")


def _render_mono(ring, exps):
    factors = []
    for i, e in enumerate(exps):
        if e == 1:
            factors.append(str(ring.vars[i]))
        elif e > 1:
            factors.append(f"{ring.vars[i]}^{e}")
    return "*".join(factors) if factors else "1"


def _state_free_ring(model, i):
    """The output/input jet subring of the order-i jet ring (a suffix of
    the full lex order, so relative order is preserved)."""
    full = jet_ring(model, i)
    jet_vars = [v for v in full.vars
                if v.base == model.output or v.base in model.inputs]
    return MonomialOrder(jet_vars)


def derive_io_basis(model, limits=None):
    """Run the prolongation loop and return the normalized IO equation.

    Loops i = 1, 2, ...: prolong, reduced basis, state-free subset; stops at
    the first nonempty subset. The subset must stay empty below the minimal
    order and must become nonempty by i = N (state count).
    """
    for i in range(1, model.nstates + 1):
        psys = prolong(model, i)
        gb = buchberger(psys.gens, psys.ring, limits=limits)
        rgb = reduce_basis(gb, psys.ring)
        keep = [v for v in psys.ring.vars
                if v.base == model.output or v.base in model.inputs]
        subset = elimination_subset(rgb, keep)
        if subset:
            if len(subset) > 1:
                raise MultipleIOEquations(
                    f"{len(subset)} state-free elements at order {i}; the "
                    "theory expects exactly one for a scalar output")
            h = subset[0].rering(_state_free_ring(model, i))
            return normalize_io(h, L=i, param_names=model.params,
                                output_name=model.output,
                                input_names=model.inputs)
    raise InternalError(
        f"no state-free element up to order {model.nstates}; this contradicts "
        "the termination bound and signals a bug")


def normalize_io(p, L=None, param_names=None, output_name=None, input_names=()):
    """Normalize a state-free polynomial into an IOEquationBasis.

    p is scaled monic in its lex leading monomial; terms whose coefficients
    are parameter-free move to the right-hand side with flipped sign, the
    rest become (monos, coeffs) in ascending lex order.
    """
    if p.is_zero:
        raise ValueError("cannot normalize the zero polynomial")
    if param_names is None:
        param_names = tuple(f"a{i + 1}" for i in range(p.n))
    if output_name is None:
        output_name = p.ring.vars[0].base
    if L is None:
        L = max(v.order for v in p.ring.vars)
    p = p.monic()
    monos = []
    coeffs = []
    rhs_terms = {}
    for exps in sorted(p.terms):
        c = p.terms[exps]
        if c.is_param_free:
            rhs_terms[exps] = -c
        else:
            monos.append(exps)
            coeffs.append(c)
    if not coeffs:
        raise NoParameterDependence(
            "every coefficient of the input-output equation is parameter-free; "
            "the data imposes no constraint on the parameters")
    rhs = Poly(p.ring, rhs_terms, n=p.n, _checked=True)
    return IOEquationBasis(
        L=L,
        ring=p.ring,
        monos=tuple(monos),
        coeffs=tuple(coeffs),
        rhs=rhs,
        full=p,
        param_names=tuple(param_names),
        output_name=output_name,
        input_names=tuple(input_names),
    )
