"""Posynomial algebra and a geometric-program solver.

A monomial is c * prod x_k^{a_k} with c > 0; a posynomial is a sum of
monomials. Under x = exp(y) each posynomial becomes a log-sum-exp of
affine forms, so the program

    minimize f0(x)  s.t.  f_i(x) <= 1,  g_j(x) = 1,  x in boxes

turns into a smooth convex problem that a damped-Newton barrier method
solves to tight KKT residuals. Monomial equalities are affine in y and
are eliminated up front through a null-space parametrization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg


@dataclass(frozen=True, eq=False)
class Monomial:
    """c * prod_k x_k^{a_k} with c > 0."""

    coeff: float
    exponents: Mapping[str, float]

    def __post_init__(self):
        if not (self.coeff > 0) or not math.isfinite(self.coeff):
            raise ValueError(f"monomial coefficient must be positive, got {self.coeff}")
        object.__setattr__(self, "exponents",
                           {k: float(a) for k, a in self.exponents.items()
                            if a != 0.0})

    def __mul__(self, other):
        if isinstance(other, Monomial):
            exps = dict(self.exponents)
            for k, a in other.exponents.items():
                exps[k] = exps.get(k, 0.0) + a
            return Monomial(self.coeff * other.coeff, exps)
        if isinstance(other, (int, float)):
            return Monomial(self.coeff * other, self.exponents)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * other ** -1 if isinstance(other, Monomial) \
            else self * (1.0 / other)

    def __pow__(self, a: float):
        return Monomial(self.coeff ** a,
                        {k: e * a for k, e in self.exponents.items()})

    def __add__(self, other):
        return Posynomial.wrap(self) + other

    __radd__ = __add__


def variable(name: str) -> Monomial:
    return Monomial(1.0, {name: 1.0})


@dataclass(frozen=True, eq=False)
class Posynomial:
    """Non-empty sum of monomials."""

    terms: Tuple[Monomial, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("posynomial needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    @staticmethod
    def wrap(x) -> "Posynomial":
        if isinstance(x, Posynomial):
            return x
        if isinstance(x, Monomial):
            return Posynomial((x,))
        if isinstance(x, (int, float)):
            return Posynomial((Monomial(float(x), {}),))
        raise TypeError(f"cannot interpret {x!r} as a posynomial")

    def __add__(self, other):
        other = Posynomial.wrap(other)
        return Posynomial(self.terms + other.terms)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            other = Monomial(float(other), {})
        if isinstance(other, Monomial):
            return Posynomial(tuple(t * other for t in self.terms))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, mono: Monomial):
        return self * mono ** -1

    def variables(self) -> set:
        out = set()
        for t in self.terms:
            out.update(t.exponents)
        return out


def evaluate(p, x: Mapping[str, float]) -> float:
    """Value of a posynomial (or monomial) at a positive point."""
    p = Posynomial.wrap(p)
    total = 0.0
    for t in p.terms:
        v = t.coeff
        for k, a in t.exponents.items():
            if k not in x:
                raise KeyError(f"point is missing variable {k!r}")
            v *= x[k] ** a
        total += v
    return total


@dataclass(frozen=True, eq=False)
class GpProblem:
    """minimize objective s.t. each ineq posynomial <= 1, each eq
    monomial == 1, and per-variable box bounds in (0, inf)."""

    objective: Posynomial
    ineq_constraints: Tuple[Posynomial, ...] = ()
    eq_constraints: Tuple[Monomial, ...] = ()
    box: Mapping[str, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "objective", Posynomial.wrap(self.objective))
        object.__setattr__(self, "ineq_constraints",
                           tuple(Posynomial.wrap(c) for c in self.ineq_constraints))
        object.__setattr__(self, "eq_constraints", tuple(self.eq_constraints))
        object.__setattr__(self, "box", dict(self.box))
        for name, (lo, hi) in self.box.items():
            if not (0 < lo <= hi) or not math.isfinite(hi):
                raise ValueError(f"box for {name!r} must satisfy 0 < lo <= hi < inf")
        missing = self.variables() - set(self.box)
        if missing:
            raise ValueError(f"variables without box bounds: {sorted(missing)}")

    def variables(self) -> set:
        out = self.objective.variables()
        for c in self.ineq_constraints:
            out |= c.variables()
        for m in self.eq_constraints:
            out |= set(m.exponents)
        return out


@dataclass(frozen=True)
class GpSolution:
    point: Dict[str, float]
    objective_value: float
    status: str  # optimal | infeasible | max_iter
    kkt_residual: float
    newton_iters: int = 0


class _Lse:
    """Compiled log-sum-exp of affine forms over a subset of variables."""

    __slots__ = ("a", "b", "cols", "kind")

    def __init__(self, a: np.ndarray, b: np.ndarray, cols: np.ndarray,
                 kind: str):
        self.a = a
        self.b = b
        self.cols = cols
        self.kind = kind

    def value(self, y: np.ndarray) -> float:
        z = self.a @ y[self.cols] + self.b
        zmax = z.max()
        return float(zmax + np.log(np.exp(z - zmax).sum()))

    def value_grad(self, y: np.ndarray):
        z = self.a @ y[self.cols] + self.b
        zmax = z.max()
        w = np.exp(z - zmax)
        s = w.sum()
        val = float(zmax + np.log(s))
        w /= s
        return val, self.a.T @ w, w

    def grad_full(self, y: np.ndarray, n: int) -> np.ndarray:
        _, g_loc, _ = self.value_grad(y)
        g = np.zeros(n)
        g[self.cols] = g_loc
        return g


def _compile(p: Posynomial, var_index: Mapping[str, int],
             kind: str, scale: float = 1.0) -> _Lse:
    cols = sorted({var_index[k] for t in p.terms for k in t.exponents})
    pos = {c: j for j, c in enumerate(cols)}
    a = np.zeros((len(p.terms), len(cols)))
    b = np.empty(len(p.terms))
    for r, t in enumerate(p.terms):
        b[r] = math.log(t.coeff * scale)
        for k, e in t.exponents.items():
            a[r, pos[var_index[k]]] = e
    return _Lse(a, b, np.array(cols, dtype=int), kind)


class LogConvexProblem:
    """Log-space form of a GpProblem.

    objective and constraints are log-sum-exps of affine forms in
    y = log x; constraints (posynomial and box alike) mean <= 0; the
    equality system is affine: eq_mat @ y = eq_rhs.
    """

    def __init__(self, problem: GpProblem):
        self.variables = sorted(problem.variables() | set(problem.box))
        self.var_index = {v: i for i, v in enumerate(self.variables)}
        n = len(self.variables)
        self.objective = _compile(problem.objective, self.var_index, "objective")
        cons: List[_Lse] = []
        for c in problem.ineq_constraints:
            cons.append(_compile(c, self.var_index, "posynomial"))
        for name, (lo, hi) in sorted(problem.box.items()):
            i = self.var_index[name]
            if lo == hi:
                # pinned variable: handled as an equality below
                continue
            cons.append(_Lse(np.array([[1.0]]), np.array([-math.log(hi)]),
                             np.array([i]), "box_upper"))
            cons.append(_Lse(np.array([[-1.0]]), np.array([math.log(lo)]),
                             np.array([i]), "box_lower"))
        self.constraints = cons
        rows, rhs = [], []
        for m in problem.eq_constraints:
            row = np.zeros(n)
            for k, e in m.exponents.items():
                row[self.var_index[k]] = e
            rows.append(row)
            rhs.append(-math.log(m.coeff))
        for name, (lo, hi) in sorted(problem.box.items()):
            if lo == hi:
                row = np.zeros(n)
                row[self.var_index[name]] = 1.0
                rows.append(row)
                rhs.append(math.log(lo))
        self.eq_mat = np.array(rows) if rows else np.zeros((0, n))
        self.eq_rhs = np.array(rhs) if rhs else np.zeros(0)
        self._box = dict(problem.box)

    @property
    def dim(self) -> int:
        return len(self.variables)

    def constraint_values(self, y: np.ndarray) -> np.ndarray:
        return np.array([c.value(y) for c in self.constraints])

    def constraint_value_grad(self, k: int, y: np.ndarray):
        val, g_loc, _ = self.constraints[k].value_grad(y)
        g = np.zeros(self.dim)
        g[self.constraints[k].cols] = g_loc
        return val, g

    def objective_value_grad(self, y: np.ndarray):
        val, g_loc, _ = self.objective.value_grad(y)
        g = np.zeros(self.dim)
        g[self.objective.cols] = g_loc
        return val, g

    def center_point(self) -> np.ndarray:
        y = np.zeros(self.dim)
        for name, (lo, hi) in self._box.items():
            y[self.var_index[name]] = 0.5 * (math.log(lo) + math.log(hi))
        return y

    def to_json(self) -> str:
        def dump_lse(l: _Lse):
            return {"kind": l.kind,
                    "cols": [self.variables[c] for c in l.cols],
                    "exponents": l.a.tolist(),
                    "log_coeffs": l.b.tolist()}
        doc = {"variables": self.variables,
               "objective": dump_lse(self.objective),
               "constraints": [dump_lse(c) for c in self.constraints],
               "equalities": {"matrix": self.eq_mat.tolist(),
                              "rhs": self.eq_rhs.tolist()}}
        return json.dumps(doc, indent=2)


def to_log_convex(problem: GpProblem) -> LogConvexProblem:
    return LogConvexProblem(problem)


# ---------------------------------------------------------------------------
# barrier interior-point solver


def _add_lse_hessian(h: np.ndarray, lse: _Lse, y: np.ndarray, w_scale: float,
                     g_scale_outer: float):
    """h += w_scale * hess(LSE) + g_scale_outer * grad grad^T, touching
    only the constraint's local variable block."""
    z = lse.a @ y[lse.cols] + lse.b
    zmax = z.max()
    w = np.exp(z - zmax)
    w /= w.sum()
    aw = lse.a.T @ w
    loc = lse.a.T @ (lse.a * w[:, None]) - np.outer(aw, aw)
    if g_scale_outer != 0.0:
        loc = w_scale * loc + g_scale_outer * np.outer(aw, aw)
    else:
        loc = w_scale * loc
    idx = lse.cols
    h[np.ix_(idx, idx)] += loc


def _newton_barrier(cons: Sequence[_Lse], objective: Optional[_Lse],
                    t_bar: float, y: np.ndarray, n: int,
                    newton_tol: float, max_steps: int):
    """Damped Newton on t_bar*f0(y) - sum log(-f_k(y)). Returns
    (y, steps, converged). y must be strictly feasible. Breaks early
    when the decrement hits its floating-point floor, which large
    barrier parameters reach before the nominal tolerance."""
    steps = 0
    best_dec = math.inf
    stalled = 0
    while steps < max_steps:
        vals = np.empty(len(cons))
        g = np.zeros(n)
        h = np.zeros((n, n))
        if objective is not None:
            _, g0 = objective.value_grad(y)[:2]
            g[objective.cols] += t_bar * g0
            _add_lse_hessian(h, objective, y, t_bar, 0.0)
        for k, c in enumerate(cons):
            v, g_loc, _ = c.value_grad(y)
            vals[k] = v
            g[c.cols] += g_loc / (-v)
            _add_lse_hessian(h, c, y, 1.0 / (-v), 1.0 / v ** 2)
        # solve h d = -g, Jacobi-equilibrated, with a ridge fallback
        scale = np.sqrt(np.maximum(np.diag(h), 1e-300))
        hs = h / scale[:, None] / scale[None, :]
        gs = g / scale
        d = None
        ridge = 0.0
        for _ in range(4):
            try:
                cho = scipy.linalg.cho_factor(
                    hs + ridge * np.eye(n), lower=True)
                d = scipy.linalg.cho_solve(cho, -gs) / scale
                break
            except np.linalg.LinAlgError:
                ridge = max(ridge * 100, 1e-14)
        if d is None:
            d = np.linalg.lstsq(h, -g, rcond=None)[0]
        decrement2 = float(-g @ d)
        if decrement2 / 2.0 <= newton_tol:
            return y, steps, True
        if decrement2 < 1e-6 and decrement2 >= 0.99 * best_dec:
            stalled += 1
            if stalled >= 5:
                return y, steps, True  # numeric floor, as centered as floats allow
        else:
            stalled = 0
        best_dec = min(best_dec, decrement2)
        # backtracking: stay strictly feasible, then Armijo
        alpha = 1.0
        phi0 = barrier_value(cons, objective, t_bar, y, vals)
        for _ in range(80):
            y_new = y + alpha * d
            ok = all(c.value(y_new) < 0 for c in cons)
            if ok:
                phi1 = barrier_value(cons, objective, t_bar, y_new, None)
                if phi1 <= phi0 + 0.25 * alpha * float(g @ d):
                    break
            alpha *= 0.5
        else:
            return y, steps, False
        y = y_new
        steps += 1
    return y, steps, False


def g0_full(lse: _Lse, g_loc: np.ndarray, n: int) -> np.ndarray:
    g = np.zeros(n)
    g[lse.cols] = g_loc
    return g


def barrier_value(cons, objective, t_bar, y, vals):
    if vals is None:
        vals = np.array([c.value(y) for c in cons])
    if np.any(vals >= 0):
        return math.inf
    total = float(-np.log(-vals).sum())
    if objective is not None:
        total += t_bar * objective.value(y)
    return total


def _eliminate_equalities(lcp: LogConvexProblem):
    """Affine reparametrization y = y0 + basis @ z clearing eq_mat y = rhs.
    Returns (y0, basis) or None when the system is inconsistent."""
    n = lcp.dim
    if lcp.eq_mat.shape[0] == 0:
        return np.zeros(n), np.eye(n)
    y0, res, rank, _ = np.linalg.lstsq(lcp.eq_mat, lcp.eq_rhs, rcond=None)
    if np.linalg.norm(lcp.eq_mat @ y0 - lcp.eq_rhs) > 1e-8:
        return None
    basis = scipy.linalg.null_space(lcp.eq_mat)
    return y0, basis


class _Reduced:
    """LSE composed with y = y0 + basis z."""

    def __init__(self, lse: _Lse, y0: np.ndarray, basis: np.ndarray):
        a_full = np.zeros((lse.a.shape[0], len(y0)))
        a_full[:, lse.cols] = lse.a
        a_red = a_full @ basis
        b_red = a_full @ y0 + lse.b
        self.inner = _Lse(a_red, b_red, np.arange(basis.shape[1]), lse.kind)

    def value(self, z):
        return self.inner.value(z)

    def value_grad(self, z):
        return self.inner.value_grad(z)

    @property
    def cols(self):
        return self.inner.cols

    @property
    def a(self):
        return self.inner.a

    @property
    def b(self):
        return self.inner.b


def solve(problem: GpProblem, tol: float = 1e-7,
          max_newton: int = 500, mu: float = 8.0,
          phase1_tol: float = None) -> GpSolution:
    """Solve a geometric program by a log-space barrier method.

    Phase I minimizes the maximum constraint violation s; s* > tol
    certifies infeasibility, a strictly negative s yields the interior
    start for phase II. status is 'optimal' once the duality gap and
    stationarity residual are below tol, 'infeasible' with a phase-I
    certificate, or 'max_iter' after the Newton-step cap.
    """
    if phase1_tol is None:
        phase1_tol = tol
    lcp = to_log_convex(problem)
    if lcp.eq_mat.shape[0] == 0:
        # fast path: constraints keep their local variable blocks
        nz = lcp.dim
        cons = lcp.constraints
        obj = lcp.objective
        z = lcp.center_point()

        def to_point(zz):
            return {v: math.exp(zz[i]) for i, v in enumerate(lcp.variables)}
    else:
        reduction = _eliminate_equalities(lcp)
        if reduction is None:
            return GpSolution(point={}, objective_value=math.nan,
                              status="infeasible", kkt_residual=math.inf)
        y0, basis = reduction
        nz = basis.shape[1]
        cons = [_Reduced(c, y0, basis) for c in lcp.constraints]
        obj = _Reduced(lcp.objective, y0, basis)

        def to_point(zz):
            y = y0 + basis @ zz
            return {v: math.exp(y[i]) for i, v in enumerate(lcp.variables)}

        z = np.linalg.lstsq(basis, lcp.center_point() - y0, rcond=None)[0]
    total_steps = 0

    vals = np.array([c.value(z) for c in cons])
    if nz == 0:
        # fully pinned problem: feasibility is a direct check
        if np.all(vals < 0):
            pt = to_point(z)
            return GpSolution(point=pt,
                              objective_value=evaluate(problem.objective, pt),
                              status="optimal", kkt_residual=0.0)
        return GpSolution(point={}, objective_value=math.nan,
                          status="infeasible",
                          kkt_residual=float(vals.max()))

    if np.any(vals >= -1e-10):
        # ----- phase I on (z, s): minimize s s.t. f_k(z) - s <= 0,
        # which stays a log-sum-exp since LSE(a z + b - s) = f_k(z) - s
        s0 = float(vals.max()) + 1.0
        zs = np.concatenate([z, [s0]])
        p1_cons = []
        for c in cons:
            a_aug = np.hstack([c.a, np.full((c.a.shape[0], 1), -1.0)])
            p1_cons.append(_Lse(a_aug, c.b.copy(),
                                np.append(c.cols, nz), "phase1"))
        p1_obj = _Lse(np.array([[1.0]]), np.array([0.0]),
                      np.array([nz]), "objective")
        t_bar = 1.0
        m = len(p1_cons)
        s_val = s0
        while True:
            zs, steps, converged = _newton_barrier(p1_cons, p1_obj, t_bar, zs,
                                                   nz + 1, 1e-12, max_newton)
            total_steps += steps
            s_val = zs[-1]
            if s_val < -1e-3:
                break  # comfortably interior
            if m / t_bar < 0.1 * phase1_tol:
                break
            if total_steps >= max_newton:
                break
            if not converged and steps == 0:
                total_steps = max_newton  # line search stalled
                break
            t_bar *= mu
        if s_val >= 0:
            if s_val > phase1_tol:
                return GpSolution(point={}, objective_value=math.nan,
                                  status="infeasible",
                                  kkt_residual=float(s_val),
                                  newton_iters=total_steps)
            return GpSolution(point={}, objective_value=math.nan,
                              status="max_iter", kkt_residual=float(s_val),
                              newton_iters=total_steps)
        z = zs[:-1]

    # ----- phase II: follow the central path, advancing the barrier
    # parameter only from centered points so late stages stay sane
    m = len(cons)
    t_bar = 1.0
    retried = False
    while True:
        z, steps, converged = _newton_barrier(
            cons, obj, t_bar, z, nz, 1e-12,
            min(150, max_newton - total_steps))
        total_steps += steps
        if not converged and not retried and total_steps < max_newton:
            retried = True
            continue
        if m / t_bar <= tol:
            break
        if total_steps >= max_newton or not converged:
            pt = to_point(z)
            return GpSolution(point=pt,
                              objective_value=evaluate(problem.objective, pt),
                              status="max_iter", kkt_residual=math.inf,
                              newton_iters=total_steps)
        retried = False
        t_bar *= mu

    def kkt_residual(zz):
        vals = np.array([c.value(zz) for c in cons])
        _, g0 = obj.value_grad(zz)[:2]
        stat = t_bar * g0_full(obj, g0, nz)
        for c, v in zip(cons, vals):
            _, g_loc, _ = c.value_grad(zz)
            stat += g0_full(c, g_loc, nz) / (-v)
        return float(np.linalg.norm(stat, np.inf) / t_bar), float(vals.max())

    # polish stationarity at the final barrier parameter: the gap stop
    # leaves the Newton decrement small but not the raw gradient
    kkt, feas = kkt_residual(z)
    for _ in range(30):
        if kkt <= 0.1 * tol:
            break
        z, steps, moved = _newton_barrier(cons, obj, t_bar, z, nz, 1e-24, 1)
        total_steps += steps
        kkt, feas = kkt_residual(z)
        if steps == 0:
            break
    pt = to_point(z)
    status = "optimal" if (kkt <= tol and feas <= tol) else "max_iter"
    return GpSolution(point=pt,
                      objective_value=evaluate(problem.objective, pt),
                      status=status, kkt_residual=kkt,
                      newton_iters=total_steps)
