"""Assembling and solving the coefficient linear system, and turning the
solved values into the polynomial constraints that cut out the variety of
data-consistent parameters.

Data values entering the constraint polynomials are rationalized exactly
(0.8512 -> 8512/10000); the linear solve itself stays floating point.
"""

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .algebra import ParamPoly, ParamRat
from .errors import IllConditioned, InsufficientData, JetOrderMismatch

COND_THRESHOLD = 1e8


@dataclass(frozen=True)
class SolveResult:
    v: np.ndarray
    residual: float
    cond: float


@dataclass
class VarietyConstraints:
    """The set {a | c_l(a) = v_l} as denominator-cleared polynomial
    equations, together with the numeric vector and solve diagnostics."""

    v: list
    equations: list           # ParamPoly, = 0 each
    param_names: tuple
    assumptions: tuple = ()
    residual: float = 0.0
    cond: float = 0.0

    def render(self):
        lines = []
        for eq in self.equations:
            lines.append(f"{eq.render(self.param_names)} = 0")
        return "\n".join(lines)

    def constraint_params(self):
        """Parameters that actually appear in the constraint equations, in
        declaration order."""
        used = set()
        for eq in self.equations:
            for exps in eq.terms:
                for i, e in enumerate(exps):
                    if e:
                        used.add(i)
        return tuple(self.param_names[i] for i in sorted(used))


def build_linear_system(basis, data):
    """Evaluate the IO-equation monomials on every data row.

    Returns (matrix, rhs) with matrix[i][l] = f_l at row i and
    rhs[i] = the parameter-free side at row i.
    """
    if data.order < basis.L:
        raise JetOrderMismatch(
            f"data carries jets to order {data.order}, the input-output "
            f"equation needs order {basis.L}")
    ring = basis.ring
    K_rows = len(data.times)
    out_name = basis.output_name
    input_names = list(basis.input_names)

    def row_values(i):
        vals = []
        for var in ring.vars:
            vals.append(data.jet_value(i, var, out_name, input_names))
        return vals

    matrix = np.zeros((K_rows, basis.n_coeffs))
    rhs = np.zeros(K_rows)
    rhs_terms = [(exps, float(c.as_fraction())) for exps, c in basis.rhs.terms.items()]
    for i in range(K_rows):
        vals = row_values(i)
        for l, exps in enumerate(basis.monos):
            m = 1.0
            for j, e in enumerate(exps):
                if e:
                    m *= vals[j] ** e
            matrix[i, l] = m
        total = 0.0
        for exps, c in rhs_terms:
            m = c
            for j, e in enumerate(exps):
                if e:
                    m *= vals[j] ** e
            total += m
        rhs[i] = total
    return matrix, rhs


def solve_coefficients(matrix, rhs, cond_threshold=COND_THRESHOLD):
    """Solve for the coefficient values: exact solve when square, least
    squares when overdetermined. Reports the residual norm and a condition
    estimate; refuses rank-deficient or badly conditioned systems."""
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    k, l = matrix.shape
    if k < l:
        raise InsufficientData(
            f"data must be measured for at least {l} time points "
            f"(the number of parameter-dependent monomials); got {k}")
    cond = float(np.linalg.cond(matrix))
    if not math.isfinite(cond) or cond > cond_threshold:
        raise IllConditioned(
            f"coefficient system condition estimate {cond:.3g} exceeds "
            f"{cond_threshold:.3g}; resample the measurement time points")
    if k == l:
        v = np.linalg.solve(matrix, rhs)
    else:
        v, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    residual = float(np.linalg.norm(matrix @ v - rhs))
    return SolveResult(v=v, residual=residual, cond=cond)


def rationalize(x):
    """Exact Fraction for a data value. Floats go through repr, so the
    shortest decimal that round-trips is embedded (0.8512 -> 8512/10000)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(Decimal(repr(float(x))))
    return Fraction(Decimal(str(x)))


def variety_constraints(basis, v, assumptions=(), residual=0.0, cond=0.0):
    """Denominator-cleared polynomial equations c_l(a) = v_l.

    Each equation is q*num_l - p*den_l with v_l = p/q rationalized exactly,
    normalized to integer content 1 and positive leading coefficient; it
    vanishes at a exactly when c_l(a) = v_l and den_l(a) != 0.
    """
    if len(v) != basis.n_coeffs:
        raise ValueError(f"expected {basis.n_coeffs} coefficient values, got {len(v)}")
    equations = []
    for coeff, value in zip(basis.coeffs, v):
        val = rationalize(value)
        eq = coeff.num * val.denominator - coeff.den * val.numerator
        if not eq.is_zero:
            eq = eq.primitive()[0]
        equations.append(eq)
    return VarietyConstraints(
        v=list(v),
        equations=equations,
        param_names=basis.param_names,
        assumptions=tuple(assumptions),
        residual=residual,
        cond=cond,
    )


@dataclass
class SampleResult:
    points: list          # dicts param name -> float
    skipped: int
    free_params: tuple


def sample_variety(constraints, free_params, ranges, n,
                   newton_tol=1e-10, max_iter=60):
    """Sample parameter points on the constraint variety.

    Grids the free parameters over their ranges and solves the remaining
    constraint parameters by damped (Gauss-)Newton from the midpoint of each
    solved parameter's range. Points that leave their declared range,
    violate a nonzero assumption, or fail to converge are skipped, with the
    count reported.
    """
    cparams = constraints.constraint_params()
    free_params = tuple(free_params)
    for p in free_params:
        if p not in cparams:
            raise ValueError(f"free parameter {p!r} does not appear in the "
                             "constraint equations")
    solved = tuple(p for p in cparams if p not in free_params)
    nontrivial = [eq for eq in constraints.equations if not eq.is_zero]
    for p in cparams:
        if p not in ranges:
            raise ValueError(f"no range given for constraint parameter {p!r}")

    names = constraints.param_names
    name_idx = {p: i for i, p in enumerate(names)}
    # row-normalize: rationalized data values can make the cleared integer
    # coefficients huge, and Newton convergence tests must stay in float range
    row_scale = np.array([max(abs(float(c)) for c in eq.terms.values())
                          for eq in nontrivial]) if nontrivial else np.ones(0)

    def eval_eqs(full):
        return np.array([eq.evaluate(full) for eq in nontrivial]) / row_scale

    def eval_jac(full):
        jac = np.zeros((len(nontrivial), len(solved)))
        for r, eq in enumerate(nontrivial):
            for cidx, p in enumerate(solved):
                jac[r, cidx] = _param_partial(eq, name_idx[p]).evaluate(full)
        return jac / row_scale[:, None]

    if free_params:
        per_axis = max(1, round(n ** (1.0 / len(free_params))))
        axes = []
        for p in free_params:
            lo, hi = ranges[p]
            width = hi - lo
            # keep off the exact endpoints, where constraints degenerate
            axes.append(np.linspace(lo + 0.5 * width / per_axis,
                                    hi - 0.5 * width / per_axis, per_axis))
        grids = np.meshgrid(*axes, indexing="ij")
        grid_points = np.column_stack([g.ravel() for g in grids])
    else:
        grid_points = np.zeros((1, 0))

    points = []
    skipped = 0
    for gp in grid_points:
        # parameters outside the constraints play no role; pin them at 1
        full = [1.0] * len(names)
        for p, val in zip(free_params, gp):
            full[name_idx[p]] = float(val)
        for p in solved:
            lo, hi = ranges[p]
            full[name_idx[p]] = 0.5 * (lo + hi)
        ok = _newton(full, solved, name_idx, eval_eqs, eval_jac,
                     newton_tol, max_iter)
        if not ok:
            skipped += 1
            continue
        in_range = all(ranges[p][0] - 1e-9 <= full[name_idx[p]] <= ranges[p][1] + 1e-9
                       for p in cparams)
        ok_assume = all(abs(a.evaluate(full)) > 1e-12
                        for a in constraints.assumptions)
        if not in_range or not ok_assume:
            skipped += 1
            continue
        points.append({p: float(full[name_idx[p]]) for p in cparams})
    return SampleResult(points=points, skipped=skipped, free_params=free_params)


def _newton(full, solved, name_idx, eval_eqs, eval_jac, tol, max_iter):
    if not solved:
        return float(np.linalg.norm(eval_eqs(full))) <= tol
    res = eval_eqs(full)
    norm = float(np.linalg.norm(res))
    for _ in range(max_iter):
        if norm <= tol:
            return True
        jac = eval_jac(full)
        try:
            step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        except np.linalg.LinAlgError:
            return False
        damp = 1.0
        for _ in range(30):
            trial = list(full)
            for p, s in zip(solved, step):
                trial[name_idx[p]] = full[name_idx[p]] + damp * s
            t_res = eval_eqs(trial)
            t_norm = float(np.linalg.norm(t_res))
            if t_norm < norm or t_norm <= tol:
                for p in solved:
                    full[name_idx[p]] = trial[name_idx[p]]
                res, norm = t_res, t_norm
                break
            damp *= 0.5
        else:
            return False
    return norm <= tol


_partial_cache = {}


def _param_partial(poly, i):
    key = (id(poly), i)
    cached = _partial_cache.get(key)
    if cached is not None:
        return cached
    terms = {}
    for exps, c in poly.terms.items():
        e = exps[i]
        if not e:
            continue
        lowered = list(exps)
        lowered[i] = e - 1
        key2 = tuple(lowered)
        terms[key2] = terms.get(key2, 0) + c * e
    out = ParamPoly(poly.n, terms)
    _partial_cache[key] = out
    return out
