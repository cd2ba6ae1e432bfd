"""Pseudo-data generation and ingestion.

Provides fixed-step RK4 integration with step-halving refinement, exact
output-derivative jets by symbolic push-forward (total derivatives of the
observation polynomial with the state velocity substituted), the
closed-form solution of the two-compartment viral decay model, a central
finite-difference fallback for externally measured series, and the CSV
dataset format shared with the variety estimator.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import DiffVar, MonomialOrder, ParamRat, Poly
from .errors import (
    BlowUp,
    DegenerateEigenvalues,
    InsufficientData,
    JetOrderMismatch,
)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray    # (len(times), N)
    outputs: np.ndarray   # (len(times),)
    params: dict
    x0: np.ndarray


@dataclass(frozen=True)
class JetSample:
    t: float
    y_jet: tuple
    u_jet: tuple = ()
    source: str = "symbolic_pushforward"


@dataclass
class DataSet:
    """Jet samples at measured time points, ready for the linear system.

    y_jets[i] holds (y, y', ..., y^(L)) at times[i]; u_jets[i][m] holds the
    m-th input's jet up to order L-1. sources records provenance per row.
    """

    times: list
    y_jets: list
    u_jets: list = field(default_factory=list)
    unit: str = "days"
    sources: list = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        orders = {len(j) for j in self.y_jets}
        if len(orders) > 1:
            raise JetOrderMismatch("rows carry different jet orders")
        if not self.u_jets:
            self.u_jets = [[] for _ in self.times]
        if not self.sources:
            self.sources = ["measured"] * len(self.times)

    @property
    def order(self):
        return len(self.y_jets[0]) - 1

    def jet_value(self, i, var, output_name, input_names):
        if var.base == output_name:
            if var.order >= len(self.y_jets[i]):
                raise JetOrderMismatch(
                    f"row {i} has jets up to order {len(self.y_jets[i]) - 1}, "
                    f"needed {var.order}")
            return self.y_jets[i][var.order]
        m = input_names.index(var.base)
        jet = self.u_jets[i][m]
        if var.order >= len(jet):
            raise JetOrderMismatch(
                f"input jet of {var.base} too short at row {i}")
        return jet[var.order]


# ---------------------------------------------------------------------------
# numeric evaluation helpers
# ---------------------------------------------------------------------------

def _param_vector(model, params):
    try:
        return [float(params[p]) for p in model.params]
    except KeyError as exc:
        raise ValueError(f"missing value for parameter {exc.args[0]!r}") from None


def check_assumptions(model, params):
    """Raise when a declared-nonzero parameter combination vanishes."""
    values = _param_vector(model, params)
    for poly in model.assume_nonzero:
        if poly.evaluate(values) == 0.0:
            raise ValueError(
                f"parameter point violates nonzero assumption "
                f"{poly.render(model.params)} != 0")


def _compile_poly(p, values):
    """Fast numeric evaluator for a Poly at fixed parameter values; returns
    a function of the ring-aligned variable-value vector."""
    terms = [(c.evaluate(values), exps) for exps, c in p.terms.items()]

    def ev(vals):
        total = 0.0
        for c, exps in terms:
            m = c
            for i, e in enumerate(exps):
                if e:
                    m *= vals[i] ** e
            total += m
        return total

    return ev


def _rhs_function(model, params):
    values = _param_vector(model, params)
    ring = model.ring0()
    fs = [_compile_poly(fi, values) for fi in model.f]
    state_idx = [ring.index[DiffVar(s, 0)] for s in model.states]
    nvars = len(ring.vars)

    def rhs(x):
        vals = [0.0] * nvars
        for i, j in enumerate(state_idx):
            vals[j] = x[i]
        return np.array([f(vals) for f in fs])

    if model.inputs:
        raise NotImplementedError(
            "integration of models with external inputs needs input "
            "trajectories; none of the bundled case studies use them")
    return rhs


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

_BASE_DENSITY = 64     # RK4 substeps per unit time before refinement
_REL_TOL = 1e-8
_MAX_HALVINGS = 3


def _rk4_segment(rhs, x, t0, t1, nsteps):
    h = (t1 - t0) / nsteps
    for k in range(nsteps):
        t_next = t0 + (k + 1) * h
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                k1 = rhs(x)
                k2 = rhs(x + 0.5 * h * k1)
                k3 = rhs(x + 0.5 * h * k2)
                k4 = rhs(x + h * k3)
        except OverflowError:
            raise BlowUp(f"state overflowed near t = {t_next:.6g}",
                         time=t_next) from None
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise BlowUp(f"state became non-finite near t = {t_next:.6g}",
                         time=t_next)
    return x


def integrate_model(model, params, x0, grid, rel_tol=_REL_TOL,
                    max_halvings=_MAX_HALVINGS):
    """Classical RK4 along the given time grid.

    The substep is refined by halving until the outputs change by less than
    rel_tol relative (at most max_halvings extra refinements).
    """
    check_assumptions(model, params)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("grid must be a non-empty 1-D array of times")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid times must be strictly increasing")
    t0, t1 = model.horizon
    if grid[0] < t0 - 1e-12 or grid[-1] > t1 + 1e-12:
        raise ValueError(f"grid leaves the model horizon [{t0}, {t1}]")
    rhs = _rhs_function(model, params)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.nstates,):
        raise ValueError(f"x0 must have {model.nstates} entries")

    def run(mult):
        states = [x0]
        x = x0
        for a, b in zip(grid, grid[1:]):
            nsteps = max(4, math.ceil((b - a) * _BASE_DENSITY)) * mult
            x = _rk4_segment(rhs, x, a, b, nsteps)
            states.append(x)
        return np.array(states)

    states = run(1)
    mult = 1
    for _ in range(max_halvings):
        finer = run(mult * 2)
        scale = np.maximum(1e-300, np.abs(finer))
        if np.max(np.abs(finer - states) / scale) < rel_tol:
            states = finer
            break
        states, mult = finer, mult * 2

    values = _param_vector(model, params)
    g = _compile_poly(model.g, values)
    ring = model.ring0()
    state_idx = [ring.index[DiffVar(s, 0)] for s in model.states]
    nvars = len(ring.vars)
    outputs = []
    for x in states:
        vals = [0.0] * nvars
        for i, j in enumerate(state_idx):
            vals[j] = x[i]
        outputs.append(g(vals))
    return Trajectory(times=grid, states=states, outputs=np.array(outputs),
                      params=dict(params), x0=x0)


# ---------------------------------------------------------------------------
# symbolic push-forward jets
# ---------------------------------------------------------------------------

_jet_cache = {}


def _lie_ring(model, order):
    vars = [DiffVar(s, 0) for s in reversed(model.states)]
    for k in range(order, -1, -1):
        for u in reversed(model.inputs):
            vars.append(DiffVar(u, k))
    return MonomialOrder(vars)


def output_jet_polys(model, order):
    """Symbolic y, y', ..., y^(order) as polynomials in the current state
    and the input jet: repeated total differentiation of the observation
    with x' substituted by the model right-hand side."""
    key = (id(model), order)
    cached = _jet_cache.get(key)
    if cached is not None:
        return cached
    ring = _lie_ring(model, order)
    fs = [fi.rering(ring) for fi in model.f]
    state_vars = [DiffVar(s, 0) for s in model.states]

    def lie(p):
        out = Poly.zero(ring, p.n)
        for sv, fi in zip(state_vars, fs):
            out = out + p.diff_wrt(sv) * fi
        for u in model.inputs:
            for k in range(order):
                uv = DiffVar(u, k)
                d = p.diff_wrt(uv)
                if not d.is_zero:
                    out = out + d * Poly.var(ring, DiffVar(u, k + 1), p.n)
        return out

    jets = [model.g.rering(ring)]
    for _ in range(order):
        jets.append(lie(jets[-1]))
    _jet_cache[key] = (ring, jets)
    return ring, jets


def jet_at(model, params, state, t=0.0, u_jet=(), order=1):
    """Exact output jet (y, y', ..., y^(order)) at one state point.

    Computed by evaluating the symbolic push-forward polynomials; no finite
    differences are involved.
    """
    ring, jets = output_jet_polys(model, order)
    values = _param_vector(model, params)
    vals = [0.0] * len(ring.vars)
    for s, x in zip(model.states, state):
        vals[ring.index[DiffVar(s, 0)]] = float(x)
    for m, u in enumerate(model.inputs):
        jet = u_jet[m] if m < len(u_jet) else ()
        if len(jet) < order:
            raise JetOrderMismatch(
                f"input {u!r} needs a jet of order {order - 1}, got {len(jet) - 1}")
        for k, val in enumerate(jet):
            if DiffVar(u, k) in ring.index:
                vals[ring.index[DiffVar(u, k)]] = float(val)
    evs = [_compile_poly(p, values) for p in jets]
    return JetSample(t=float(t), y_jet=tuple(ev(vals) for ev in evs),
                     u_jet=tuple(tuple(j) for j in u_jet),
                     source="symbolic_pushforward")


def state_jet(model, params, state, order, u_jet=()):
    """Values of every state derivative up to the given order along the
    vector field (x^(k) by iterated substitution of the dynamics)."""
    values = _param_vector(model, params)
    ring = _lie_ring(model, order)
    fs = [fi.rering(ring) for fi in model.f]
    state_vars = [DiffVar(s, 0) for s in model.states]

    def lie(p):
        out = Poly.zero(ring, p.n)
        for sv, fi in zip(state_vars, fs):
            out = out + p.diff_wrt(sv) * fi
        return out

    vals = [0.0] * len(ring.vars)
    for s, x in zip(model.states, state):
        vals[ring.index[DiffVar(s, 0)]] = float(x)
    out = {}
    for s in model.states:
        cur = Poly.var(ring, DiffVar(s, 0), model.nparams)
        out[DiffVar(s, 0)] = _compile_poly(cur, values)(vals)
        for k in range(1, order + 1):
            cur = lie(cur)
            out[DiffVar(s, k)] = _compile_poly(cur, values)(vals)
    return out


# ---------------------------------------------------------------------------
# closed-form viral solution
# ---------------------------------------------------------------------------

def exact_viral_solution(a4, a5, a7, t0, x3_t0, t):
    """(y, y', y'') of the two-compartment viral decay model at time t,
    from the two-exponential closed form with the quasi-steady initial
    condition x2(T0) = (a7/a6) x3(T0).

    The discriminant 2*a4*a7 + a4^2 + a7^2 - 4*a4*a5*a7 must be positive:
    a repeated eigenvalue is not covered by the two-exponential form.
    """
    disc = 2.0 * a4 * a7 + a4 * a4 + a7 * a7 - 4.0 * a4 * a5 * a7
    if disc <= 0.0:
        raise DegenerateEigenvalues(
            f"eigenvalue discriminant {disc:.6g} is not positive")
    root = math.sqrt(disc)
    lam1 = -((a4 + a7) / 2.0) - root / 2.0
    lam2 = -((a4 + a7) / 2.0) + root / 2.0
    b = (a4 + a7 - 2.0 * a5 * a7 + root) / (2.0 * root)
    dt = t - t0
    e1 = math.exp(lam1 * dt) * (1.0 - b)
    e2 = math.exp(lam2 * dt) * b
    y = x3_t0 * (e1 + e2)
    y1 = x3_t0 * (lam1 * e1 + lam2 * e2)
    y2 = x3_t0 * (lam1 * lam1 * e1 + lam2 * lam2 * e2)
    return y, y1, y2


def is_viral_template(model):
    """True when the model is exactly the bundled two-compartment viral
    decay structure (state/parameter names included), so the closed form
    applies."""
    if model.states != ("x2", "x3") or model.params != ("a4", "a5", "a6", "a7"):
        return False
    if model.inputs or model.output != "y":
        return False
    ring = model.ring0()
    n = 4
    a4, a5, a6, a7 = (ParamRat.gen(n, i) for i in range(4))
    x2 = Poly.var(ring, DiffVar("x2", 0), n)
    x3 = Poly.var(ring, DiffVar("x3", 0), n)
    f0 = x3.scale(a4 * a7 / a6) - x2.scale(a4)
    f1 = x2.scale((1 - a5) * a6) - x3.scale(a7)
    return model.f[0] == f0 and model.f[1] == f1 and model.g == x3


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def central_difference(times, values, order):
    """Jets up to the given order from a uniformly sampled series.

    Second-order central stencils inside the grid; one-sided second-order
    stencils at the endpoints, flagged in the returned provenance list.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) != len(values):
        raise ValueError("times and values must have the same length")
    if len(times) < max(4, order + 2):
        raise InsufficientData(
            f"need at least {max(4, order + 2)} samples for order-{order} stencils")
    h = np.diff(times)
    if np.max(np.abs(h - h[0])) > 1e-9 * max(1.0, abs(h[0])):
        raise ValueError("central differences need a uniform grid")
    h = h[0]

    jets = [values]
    for _ in range(order):
        prev = jets[-1]
        d = np.empty_like(prev)
        d[1:-1] = (prev[2:] - prev[:-2]) / (2.0 * h)
        d[0] = (-3.0 * prev[0] + 4.0 * prev[1] - prev[2]) / (2.0 * h)
        d[-1] = (3.0 * prev[-1] - 4.0 * prev[-2] + prev[-3]) / (2.0 * h)
        jets.append(d)
    table = np.column_stack(jets)
    sources = ["finite_difference"] * len(times)
    if order >= 1:
        sources[0] = sources[-1] = "finite_difference_onesided"
    return table, sources


# ---------------------------------------------------------------------------
# dataset construction and CSV
# ---------------------------------------------------------------------------

def make_dataset(model, params, x0, times, order, t0=None, method="symbolic",
                 fd_step=1e-3):
    """Generate a pseudo-data DataSet at the given measurement times.

    method 'symbolic' integrates the state with RK4 and evaluates exact
    push-forward jets; 'exact-viral' uses the closed form (template models
    only); 'finite-difference' differentiates a densely sampled trajectory.
    """
    times = sorted(float(t) for t in times)
    if t0 is None:
        t0 = model.horizon[0]
    if method == "exact-viral":
        if not is_viral_template(model):
            raise ValueError("closed form applies only to the bundled viral "
                             "decay template model")
        if order != 2:
            raise ValueError("the viral closed form provides jets to order 2")
        a4, a5, a7 = (float(params[p]) for p in ("a4", "a5", "a7"))
        x3_t0 = float(x0[1])
        rows = [exact_viral_solution(a4, a5, a7, t0, x3_t0, t) for t in times]
        return DataSet(times=times, y_jets=[tuple(r) for r in rows],
                       sources=["exact_solution"] * len(times))
    if method == "symbolic":
        if times[0] < t0 - 1e-12:
            raise ValueError("measurement times must not precede the initial time")
        grid = [t0] + [t for t in times if t > t0 + 1e-15]
        traj = integrate_model(model, params, x0, grid)
        y_jets = []
        for t in times:
            i = grid.index(t) if t in grid else 0
            sample = jet_at(model, params, traj.states[i], t=t, order=order)
            y_jets.append(sample.y_jet)
        return DataSet(times=times, y_jets=y_jets,
                       sources=["symbolic_pushforward"] * len(times))
    if method == "finite-difference":
        lo = min(t0, times[0])
        hi = times[-1]
        nsteps = max(int(round((hi - lo) / fd_step)), 8)
        grid = np.linspace(lo, hi, nsteps + 1)
        traj = integrate_model(model, params, x0, grid)
        table, sources = central_difference(traj.times, traj.outputs, order)
        idx = [int(np.argmin(np.abs(grid - t))) for t in times]
        return DataSet(times=[float(grid[i]) for i in idx],
                       y_jets=[tuple(table[i]) for i in idx],
                       sources=[sources[i] for i in idx])
    raise ValueError(f"unknown pseudo-data method {method!r}")


def dataset_columns(order, input_names=(), input_order=None):
    cols = ["t", "y"] + [f"y{k}" for k in range(1, order + 1)]
    if input_order is None:
        input_order = max(order - 1, 0)
    for u in input_names:
        cols += [f"{u}_{k}" for k in range(input_order + 1)]
    return cols


def write_dataset(path, dataset, header_comments=()):
    order = dataset.order
    input_names = []
    cols = dataset_columns(order, input_names) + ["source"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        fh.write(f"# unit: {dataset.unit}\n")
        writer = csv.writer(fh)
        writer.writerow(cols)
        for i, t in enumerate(dataset.times):
            row = [f"{t:.17g}"] + [f"{v:.17g}" for v in dataset.y_jets[i]]
            for jet in dataset.u_jets[i]:
                row += [f"{v:.17g}" for v in jet]
            row.append(dataset.sources[i])
            writer.writerow(row)


def read_dataset(path):
    unit = "days"
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line[1:].strip().startswith("unit:"):
                    unit = line.split("unit:", 1)[1].strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([c.strip() for c in line.split(",")])
    if header is None or not rows:
        raise InsufficientData(f"no data rows in {path}")
    ycols = [c for c in header if c == "y" or (c.startswith("y") and c[1:].isdigit())]
    has_source = header[-1] == "source"
    ucols = [c for c in header[1:] if c not in ycols and c != "source"]
    times, y_jets, u_jets, sources = [], [], [], []
    input_names = []
    for c in ucols:
        base = c.rsplit("_", 1)[0]
        if base not in input_names:
            input_names.append(base)
    for row in rows:
        rec = dict(zip(header, row))
        times.append(float(rec["t"]))
        y_jets.append(tuple(float(rec[c]) for c in ycols))
        jets = []
        for u in input_names:
            ks = sorted(int(c.rsplit("_", 1)[1]) for c in ucols
                        if c.rsplit("_", 1)[0] == u)
            jets.append(tuple(float(rec[f"{u}_{k}"]) for k in ks))
        u_jets.append(jets)
        sources.append(rec.get("source", "measured") if has_source else "measured")
    return DataSet(times=times, y_jets=y_jets, u_jets=u_jets, unit=unit,
                   sources=sources)
