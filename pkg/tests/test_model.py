import pytest

from paramvariety.algebra import DiffVar, ParamRat, Poly
from paramvariety.errors import (
    ModelSyntaxError,
    NonPolynomialModel,
    UndeclaredSymbol,
)
from paramvariety.model import (
    jet_ring,
    parse_model,
    prolong,
    total_derivative,
)

from .helpers import random_poly


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_parse_viral(viral_model):
    m = viral_model
    assert m.states == ("x2", "x3")
    assert m.params == ("a4", "a5", "a6", "a7")
    assert m.output == "y"
    assert m.nstates == 2 and not m.inputs
    # dx2/dt = (a4 a7 / a6) x3 - a4 x2, built independently
    ring = m.ring0()
    n = 4
    a4, a5, a6, a7 = (ParamRat.gen(n, i) for i in range(4))
    x2 = Poly.var(ring, DiffVar("x2", 0), n)
    x3 = Poly.var(ring, DiffVar("x3", 0), n)
    assert m.f[0] == x3.scale(a4 * a7 * a6.inv()) - x2.scale(a4)
    assert m.f[1] == x2.scale((1 - a5) * a6) - x3.scale(a7)
    assert m.g == x3
    assert [a.render(m.params) for a in m.assume_nonzero] == ["a6", "a5 - 1"]


def test_parse_lv(lv_model):
    m = lv_model
    assert m.states == ("x1", "x2")
    assert m.params == ("a1", "a2", "a3", "a4", "a5", "a6")
    assert m.horizon == (0.0, 10.0)


def test_empty_file_is_syntax_error():
    with pytest.raises(ModelSyntaxError):
        parse_model("")
    with pytest.raises(ModelSyntaxError):
        parse_model("# nothing but comments\n")


def test_undeclared_symbol():
    src = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = a1*x1 + b2
y = x1
"""
    with pytest.raises(UndeclaredSymbol):
        parse_model(src)


def test_division_by_state_rejected():
    src = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = a1/x1
y = x1
"""
    with pytest.raises(NonPolynomialModel):
        parse_model(src)


def test_output_in_rhs_rejected():
    src = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = a1*y
y = x1
"""
    with pytest.raises(UndeclaredSymbol):
        parse_model(src)


def test_syntax_error_carries_line():
    src = "states: x1\noutput: y\nparams: a1\nhorizon: 0 1\ndx1/dt = a1*)\ny = x1\n"
    with pytest.raises(ModelSyntaxError) as err:
        parse_model(src)
    assert err.value.line == 5


def test_decimal_literals_exact():
    src = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = 0.1*a1*x1
y = x1
"""
    m = parse_model(src)
    coeff = next(iter(m.f[0].terms.values()))
    from fractions import Fraction
    # 0.1 enters exactly as 1/10, not as the binary float
    assert coeff == ParamRat.gen(1, 0) * ParamRat.from_const(1, Fraction(1, 10))


def test_missing_equation():
    src = """
states: x1 x2
output: y
params: a1
horizon: 0 1
dx1/dt = a1*x1
y = x1
"""
    with pytest.raises(ModelSyntaxError):
        parse_model(src)


def test_bad_horizon():
    src = """
states: x1
output: y
params: a1
horizon: 2 1
dx1/dt = a1*x1
y = x1
"""
    with pytest.raises(ModelSyntaxError):
        parse_model(src)


# ---------------------------------------------------------------------------
# total derivative
# ---------------------------------------------------------------------------

def test_derivative_of_output_equation(lv_model):
    # d/dt (y - x1) = y' - x1'
    n = lv_model.nparams
    ring = jet_ring(lv_model, 1)
    p = Poly.var(ring, DiffVar("y", 0), n) - Poly.var(ring, DiffVar("x1", 0), n)
    d = total_derivative(p, lv_model)
    expected = (Poly.var(d.ring, DiffVar("y", 1), n)
                - Poly.var(d.ring, DiffVar("x1", 1), n))
    assert d == expected


def test_derivative_of_constant(lv_model):
    ring = jet_ring(lv_model, 1)
    c = Poly.const(ring, ParamRat.gen(lv_model.nparams, 2))
    assert total_derivative(c, lv_model).is_zero


def test_leibniz_product(lv_model):
    # d/dt (x1 * x2) = x1' x2 + x1 x2'
    n = lv_model.nparams
    ring = jet_ring(lv_model, 1)
    x1 = Poly.var(ring, DiffVar("x1", 0), n)
    x2 = Poly.var(ring, DiffVar("x2", 0), n)
    d = total_derivative(x1 * x2, lv_model)
    r = d.ring
    expected = (Poly.var(r, DiffVar("x1", 1), n) * Poly.var(r, DiffVar("x2", 0), n)
                + Poly.var(r, DiffVar("x1", 0), n) * Poly.var(r, DiffVar("x2", 1), n))
    assert d == expected


def test_derivation_axioms_randomized(lv_model, rng):
    n = lv_model.nparams
    ring = jet_ring(lv_model, 1)
    big = jet_ring(lv_model, 2)
    for _ in range(25):
        p = random_poly(rng, ring, n, max_terms=3, max_deg=2)
        q = random_poly(rng, ring, n, max_terms=3, max_deg=2)
        dp = total_derivative(p, lv_model).rering(big)
        dq = total_derivative(q, lv_model).rering(big)
        dsum = total_derivative(p + q, lv_model).rering(big)
        assert dsum == dp + dq
        dprod = total_derivative(p * q, lv_model).rering(big)
        assert dprod == dp * q.rering(big) + p.rering(big) * dq


# ---------------------------------------------------------------------------
# prolongation
# ---------------------------------------------------------------------------

def test_prolong_counts(viral_model, lv_model):
    for model in (viral_model, lv_model):
        for i in (1, 2, 3):
            psys = prolong(model, i)
            assert len(psys.gens) == model.nstates * i + (i + 1)


def test_prolong_ring_matches_jet_ordering(viral_model):
    psys = prolong(viral_model, 2)
    assert [str(v) for v in psys.ring.vars] == [
        "x3''", "x2''", "x3'", "x2'", "x3", "x2", "y''", "y'", "y"]


def test_prolong_viral_generators(viral_model):
    # the seven order-2 generators, assembled by hand from the model
    psys = prolong(viral_model, 2)
    ring = psys.ring
    n = 4
    a4, a5, a6, a7 = (ParamRat.gen(n, i) for i in range(4))

    def var(base, order):
        return Poly.var(ring, DiffVar(base, order), n)

    f0 = var("x3", 0).scale(a4 * a7 / a6) - var("x2", 0).scale(a4)
    f1 = var("x2", 0).scale((1 - a5) * a6) - var("x3", 0).scale(a7)
    df0 = var("x3", 1).scale(a4 * a7 / a6) - var("x2", 1).scale(a4)
    df1 = var("x2", 1).scale((1 - a5) * a6) - var("x3", 1).scale(a7)
    expected = [
        var("x2", 1) - f0,
        var("x3", 1) - f1,
        var("x2", 2) - df0,
        var("x3", 2) - df1,
        var("y", 0) - var("x3", 0),
        var("y", 1) - var("x3", 1),
        var("y", 2) - var("x3", 2),
    ]
    assert list(psys.gens) == expected


def test_prolong_one_contains_output_equation(decay_model, viral_model):
    for model in (decay_model, viral_model):
        psys = prolong(model, 1)
        ring = psys.ring
        n = model.nparams
        y0 = Poly.var(ring, DiffVar(model.output, 0), n)
        g = model.g.rering(ring)
        assert any(gen == y0 - g for gen in psys.gens)


def test_prolong_nested(viral_model):
    small = prolong(viral_model, 1)
    big = prolong(viral_model, 2)
    lifted = [g.rering(big.ring) for g in small.gens]
    for g in lifted:
        assert any(g == h for h in big.gens)


def test_generators_vanish_on_trajectory(viral_model):
    # evaluate every order-2 generator on the exact derivative jet of a
    # simulated trajectory
    from paramvariety.datalab import integrate_model, jet_at, state_jet

    params = dict(a4=0.3, a5=0.9, a6=1.4, a7=5.0)
    x0 = [params["a7"] / params["a6"] * 2.0e5, 2.0e5]
    grid = [0.0, 0.7, 1.9]
    traj = integrate_model(viral_model, params, x0, grid)
    psys = prolong(viral_model, 2)
    pvec = [params[p] for p in viral_model.params]
    for k, t in enumerate(grid):
        state = traj.states[k]
        jets = state_jet(viral_model, params, state, order=2)
        ys = jet_at(viral_model, params, state, t=t, order=2)
        values = dict(jets)
        for j, yv in enumerate(ys.y_jet):
            values[DiffVar("y", j)] = yv
        scale = max(1.0, max(abs(v) for v in values.values()))
        for gen in psys.gens:
            assert abs(gen.evaluate(values, pvec)) < 1e-8 * scale
