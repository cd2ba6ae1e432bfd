import pytest

from paramvariety.algebra import DiffVar, ParamPoly, ParamRat, Poly
from paramvariety.errors import MissingLeading
from paramvariety.extension import (
    CERTIFIED,
    INCONCLUSIVE,
    VERDICT_ASSUMED,
    VERDICT_CONST,
    VERDICT_UNKNOWN,
    check_extension,
    extension_sets,
    is_unit_under,
    reconstruct_state_jet,
    run_extension_check,
)
from paramvariety.groebner import buchberger, reduce_basis
from paramvariety.model import parse_model, prolong

from .helpers import pp


def _reduced(model, order):
    psys = prolong(model, order)
    return psys, reduce_basis(buchberger(psys.gens, psys.ring), psys.ring)


# ---------------------------------------------------------------------------
# the viral case
# ---------------------------------------------------------------------------

def test_viral_extension_sets(viral_model, viral_rgb):
    sets = extension_sets(viral_model, viral_rgb)
    assert [str(z) for z, _ in sets] == ["x3''", "x2''", "x3'", "x2'", "x3", "x2"]
    n = 4
    one = ParamPoly.const(n, 1)
    factor = pp(n, {(0, 1, 1, 0): 1, (0, 0, 1, 0): -1})  # a5*a6 - a6
    expected = [one, factor, one, factor, one, factor]
    for (z, leading), want in zip(sets, expected):
        assert len(leading) == 1
        assert leading[0] == want


def test_viral_certified_under_assumptions(viral_model, viral_rgb):
    report = run_extension_check(viral_model, viral_rgb)
    assert report.overall == CERTIFIED
    verdicts = [e.verdict for e in report.entries]
    assert verdicts == [VERDICT_CONST, VERDICT_ASSUMED] * 3
    text = report.render()
    assert "a5*a6 - a6" in text and "Certified" in text


def test_viral_inconclusive_without_assumptions(viral_model, viral_rgb):
    sets = extension_sets(viral_model, viral_rgb)
    report = check_extension(sets, ())
    assert report.overall == INCONCLUSIVE
    assert any(e.verdict == VERDICT_UNKNOWN for e in report.entries)


def test_monotone_in_assumptions(viral_model, viral_rgb):
    sets = extension_sets(viral_model, viral_rgb)
    n = 4
    a6 = pp(n, {(0, 0, 1, 0): 1})
    a5m1 = pp(n, {(0, 1, 0, 0): 1, (0, 0, 0, 0): -1})
    spurious = pp(n, {(1, 0, 0, 0): 1})  # a4, irrelevant
    base = check_extension(sets, (a6, a5m1))
    more = check_extension(sets, (a6, a5m1, spurious))
    assert base.overall == CERTIFIED
    assert more.overall == CERTIFIED


def test_unit_detection():
    n = 4
    factor = pp(n, {(0, 1, 1, 0): 1, (0, 0, 1, 0): -1})  # a5*a6 - a6
    a6 = pp(n, {(0, 0, 1, 0): 1})
    a5m1 = pp(n, {(0, 1, 0, 0): 1, (0, 0, 0, 0): -1})
    assert is_unit_under(factor, (a6, a5m1))
    assert not is_unit_under(factor, (a6,))
    assert not is_unit_under(factor, ())
    assert is_unit_under(pp(n, {(0, 0, 0, 0): 7}), ())


def test_all_constant_leading_certified(decay_model):
    _, rgb = _reduced(decay_model, 1)
    report = run_extension_check(decay_model, rgb)
    assert report.overall == CERTIFIED
    assert all(e.verdict == VERDICT_CONST for e in report.entries)
    for e in report.entries:
        assert len(e.leading) == 1
        assert e.leading[0] == ParamPoly.const(1, 1)


# ---------------------------------------------------------------------------
# derived single-state cases
# ---------------------------------------------------------------------------

_QUAD_OBS_X = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = a1*x1^2
y = x1
"""

_QUAD_OBS_X2 = """
states: x1
output: y
params: a1
horizon: 0 1
dx1/dt = a1*x1^2
y = x1^2
"""


def test_quadratic_state_linear_observation():
    # reduced basis is {y' - a1 y^2, x1 - y, x1' - a1 y^2}: the observation
    # y = x1 pins the state linearly, so every leading coefficient is 1
    model = parse_model(_QUAD_OBS_X)
    psys, rgb = _reduced(model, 1)
    n = 1
    ring = psys.ring
    a1 = ParamRat.gen(n, 0)
    y = Poly.var(ring, DiffVar("y", 0), n)
    y1 = Poly.var(ring, DiffVar("y", 1), n)
    x1 = Poly.var(ring, DiffVar("x1", 0), n)
    x1d = Poly.var(ring, DiffVar("x1", 1), n)
    assert list(rgb.basis) == [
        y1 - (y * y).scale(a1),
        x1 - y,
        x1d - (y * y).scale(a1),
    ]
    sets = extension_sets(model, rgb)
    for _, leading in sets:
        assert list(leading) == [ParamPoly.const(n, 1)]
    assert check_extension(sets, ()).overall == CERTIFIED


def test_quadratic_observation_has_parameter_dependent_leading():
    # y = x1^2 leaves x1 determined only up to sign: the x1-leading
    # coefficients include 2 a1 y (state-free but parameter- and
    # data-dependent) next to the constant from x1^2 - y
    model = parse_model(_QUAD_OBS_X2)
    psys, rgb = _reduced(model, 1)
    sets = extension_sets(model, rgb)
    by_var = {str(z): leading for z, leading in sets}
    x1_leads = by_var["x1"]
    assert any(isinstance(p, ParamPoly) and p.is_constant for p in x1_leads)
    assert any(isinstance(p, Poly) or (isinstance(p, ParamPoly)
                                       and not p.is_constant)
               for p in x1_leads)
    # extension still certifies: x1^2 - y always has a root over C
    assert check_extension(sets, ()).overall == CERTIFIED


_UNOBSERVED_FACTOR = """
states: x1 x2
output: y
params: a1
horizon: 0 1
dx1/dt = a1*x1*x2
dx2/dt = 0
y = x1
"""


def test_undetermined_when_leading_needs_data():
    # x2 enters only through a1 x1 x2; its leading coefficient a1 y vanishes
    # wherever y does, so the sufficient condition cannot decide
    model = parse_model(_UNOBSERVED_FACTOR)
    _, rgb = _reduced(model, 1)
    sets = extension_sets(model, rgb)
    report = check_extension(sets, model.assume_nonzero)
    by_var = {str(e.var): e.verdict for e in report.entries}
    assert by_var["x2"] == VERDICT_UNKNOWN
    assert report.overall == INCONCLUSIVE


_INVISIBLE_STATE = """
states: x1 x2
output: y
params: a1 a2
horizon: 0 1
dx1/dt = a1*x1
dx2/dt = a2*x2
y = x1
"""


def test_missing_leading_for_invisible_state():
    model = parse_model(_INVISIBLE_STATE)
    _, rgb = _reduced(model, 1)
    with pytest.raises(MissingLeading):
        extension_sets(model, rgb)


# ---------------------------------------------------------------------------
# soundness spot-check: certified points extend numerically
# ---------------------------------------------------------------------------

def test_certified_points_extend(viral_model, viral_io, viral_rgb):
    from paramvariety.datalab import exact_viral_solution
    from paramvariety.variety import sample_variety, variety_constraints

    cons = variety_constraints(viral_io, [0.8512, 5.76],
                               assumptions=viral_model.assume_nonzero)
    samples = sample_variety(
        cons, ["a4"],
        {"a4": (0.0, 5.76), "a5": (0.0, 1.0), "a7": (0.0, 8.0)}, 8)
    assert samples.points
    # data jets from the generating trajectory (subject 2-D)
    t = 1.8594
    y, y1, y2 = exact_viral_solution(0.16, 0.95, 5.6, 7 / 24, 1.0e6, t)
    jets = {DiffVar("y", 0): y, DiffVar("y", 1): y1, DiffVar("y", 2): y2}
    psys = prolong(viral_model, 2)
    scale = max(abs(v) for v in jets.values())
    for pt in samples.points:
        params = dict(pt)
        params["a6"] = 1.3  # unconstrained by the data; any nonzero value
        states = reconstruct_state_jet(viral_model, viral_rgb, jets, params)
        values = {**jets, **states}
        pvec = [params[p] for p in viral_model.params]
        full_scale = max(scale, max(abs(v) for v in states.values()))
        for gen in psys.gens:
            assert abs(gen.evaluate(values, pvec)) <= 1e-6 * full_scale
