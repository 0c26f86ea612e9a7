"""Budgeted resource allocation against the certified infection bounds.

Two problems are assembled as geometric programs over the certificate
vector v and the tunable rates. Without isolation the variables are
per-node infection and recovery rates under prevention/correction cost
curves; with isolation the recovery rates are fixed and the Erlang mean
of each node's removal law is tuned instead, with the diagonal decay
handled through a monomial under-estimator kappa * x^alpha <= x + delta
fitted per node. Baselines (uniform spending and an SIS-style spectral
design that ignores initial conditions) are provided for comparison.

Cost curves follow the normalized forms

    prevention  f(beta)  = c1/beta  + c2   (1 at beta_lo, 0 at beta_hi)
    correction  g(delta) = c3*delta + c4   (1 at delta_hi, 0 at delta_lo)
    isolation   h(gamma) = c5/gamma + c6   (1 at gamma_lo, 0 at gamma_hi)

and the constant offsets are absorbed into the budget so every
constraint stays posynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import bound as bound_mod
from . import gp
from .graph import Graph, degrees
from .phase_type import ErlangSpec, erlang

DEFAULT_EPSILON = 1e-6
_WIDE_BOX = (1e-8, 1e8)


class BudgetModelError(ValueError):
    """Budget cannot cover the fixed cost constants."""


class AllocationInfeasible(RuntimeError):
    """The requested control level is not reachable within the budget."""


class CertificateError(RuntimeError):
    """Solver output failed its own certificate re-validation."""


@dataclass(frozen=True)
class CostModel:
    """Boxes, budget, and the normalized cost constants.

    Exactly one of delta_box (plain mode) and gamma_box (isolation
    mode) must be present.
    """

    beta_box: tuple
    budget: float
    delta_box: Optional[tuple] = None
    gamma_box: Optional[tuple] = None

    def __post_init__(self):
        if (self.delta_box is None) == (self.gamma_box is None):
            raise ValueError("provide exactly one of delta_box and gamma_box")
        for name, box in (("beta", self.beta_box),
                          ("delta", self.delta_box),
                          ("gamma", self.gamma_box)):
            if box is None:
                continue
            lo, hi = box
            if not (0 < lo < hi):
                raise ValueError(f"{name}_box must satisfy 0 < lo < hi")
        if not self.budget > 0:
            raise ValueError("budget must be positive")

    @property
    def mode(self) -> str:
        return "plain" if self.delta_box is not None else "isolation"

    # prevention: f(beta) = c1/beta + c2, f(lo)=1, f(hi)=0
    @property
    def c1(self) -> float:
        lo, hi = self.beta_box
        return lo * hi / (hi - lo)

    @property
    def c2(self) -> float:
        return -self.c1 / self.beta_box[1]

    # correction: g(delta) = c3*delta + c4, g(hi)=1, g(lo)=0
    @property
    def c3(self) -> float:
        lo, hi = self.delta_box
        return 1.0 / (hi - lo)

    @property
    def c4(self) -> float:
        return -self.c3 * self.delta_box[0]

    # isolation: h(gamma) = c5/gamma + c6, h(lo)=1, h(hi)=0
    @property
    def c5(self) -> float:
        lo, hi = self.gamma_box
        return lo * hi / (hi - lo)

    @property
    def c6(self) -> float:
        return -self.c5 / self.gamma_box[1]

    def prevention_cost(self, beta) -> np.ndarray:
        return self.c1 / np.asarray(beta, float) + self.c2

    def correction_cost(self, delta) -> np.ndarray:
        return self.c3 * np.asarray(delta, float) + self.c4

    def isolation_cost(self, gamma) -> np.ndarray:
        return self.c5 / np.asarray(gamma, float) + self.c6

    def absorbed_budget(self, n: int) -> float:
        """Budget left for the variable cost terms after the constant
        offsets of all n nodes are moved to the right-hand side."""
        if self.mode == "plain":
            fixed = n * (self.c2 + self.c4)
        else:
            fixed = n * (self.c2 + self.c6)
        remaining = self.budget - fixed
        if remaining <= 0:
            raise BudgetModelError(
                f"budget {self.budget} cannot cover fixed constants "
                f"(needs > {fixed:.6g})")
        return remaining

    def total_cost(self, beta, second) -> float:
        if self.mode == "plain":
            return float(np.sum(self.prevention_cost(beta)
                                + self.correction_cost(second)))
        return float(np.sum(self.prevention_cost(beta)
                            + self.isolation_cost(second)))


@dataclass(frozen=True)
class MonomialBound:
    """kappa * x^alpha <= x + delta certified on [x_lo, x_hi]."""

    kappa: float
    alpha: float
    x_lo: float
    x_hi: float


def _tightest_kappa(alpha: float, delta: float, x_lo: float,
                    x_hi: float) -> float:
    """min over the range of (x + delta) / x^alpha, attained either at
    the interior stationary point alpha*delta/(1-alpha) or an end."""
    candidates = [x_lo, x_hi]
    if alpha < 1.0:
        x_star = alpha * delta / (1.0 - alpha)
        if x_lo < x_star < x_hi:
            candidates.append(x_star)
    return min((x + delta) * x ** (-alpha) for x in candidates)


def _max_gap(alpha: float, kappa: float, delta: float, x_lo: float,
             x_hi: float) -> float:
    # (x + delta) - kappa x^alpha is convex in x, so ends suffice
    return max((x + delta) - kappa * x ** alpha for x in (x_lo, x_hi))


def fit_monomial_bound(delta: float, x_range, grid_size: int = 10_000
                       ) -> MonomialBound:
    """Fit kappa * x^alpha <= x + delta on x_range, minimizing the
    worst-case slack by golden-section search over alpha in (0, 1],
    with the tightest kappa per alpha in closed form. The result is
    re-verified on a grid of grid_size points.
    """
    x_lo, x_hi = float(x_range[0]), float(x_range[1])
    if not (0 < x_lo <= x_hi):
        raise ValueError("x_range must satisfy 0 < lo <= hi")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if x_lo == x_hi:
        alpha = 1.0
        kappa = (x_lo + delta) / x_lo
    else:
        def objective(alpha):
            return _max_gap(alpha, _tightest_kappa(alpha, delta, x_lo, x_hi),
                            delta, x_lo, x_hi)

        lo, hi = 1e-6, 1.0
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        fc, fd = objective(c), objective(d)
        for _ in range(200):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - inv_phi * (b - a)
                fc = objective(c)
            else:
                a, c, fc = c, d, fd
                d = a + inv_phi * (b - a)
                fd = objective(d)
            if b - a < 1e-12:
                break
        alpha = 0.5 * (a + b)
        if objective(1.0) <= objective(alpha):
            alpha = 1.0  # never do worse than the exponent-one fit
        kappa = _tightest_kappa(alpha, delta, x_lo, x_hi)
    kappa *= 1.0 - 1e-12  # shave so the grid check is roundoff-proof
    xs = np.linspace(x_lo, x_hi, max(2, grid_size))
    if np.any(kappa * xs ** alpha > xs + delta):
        raise RuntimeError("monomial fit failed its own grid verification")
    return MonomialBound(kappa=kappa, alpha=alpha, x_lo=x_lo, x_hi=x_hi)


@dataclass(frozen=True, eq=False)
class AllocationProblem:
    """A GpProblem plus the instance data needed to rebuild and
    re-verify the comparison system from solver output."""

    gp_problem: gp.GpProblem
    graph: Graph
    infected: frozenset
    costs: CostModel
    mode: str                      # plain | isolation
    lambda_cap: Optional[float]    # None means minimize lambda_bar
    epsilon: float
    p: int = 1
    delta_fixed: Optional[np.ndarray] = None
    fits: Optional[tuple] = None


@dataclass(frozen=True, eq=False)
class Allocation:
    """Solved allocation: rates, spent budget, and the certified bound
    with its witness (certificate_v is None only for uncertifiable
    baseline allocations, in which case lambda_bar is unbounded)."""

    mode: str
    beta: np.ndarray
    delta: Optional[np.ndarray]
    gamma: Optional[np.ndarray]
    total_cost: float
    lambda_bar: float
    certificate_v: Optional[np.ndarray]
    strategy: str = "optimized"

    @property
    def is_certified(self) -> bool:
        return self.certificate_v is not None and math.isfinite(self.lambda_bar)

    def to_json_dict(self) -> dict:
        doc = {"mode": self.mode,
               "strategy": self.strategy,
               "lambda_bar": self.lambda_bar if math.isfinite(self.lambda_bar)
               else "unbounded",
               "total_cost": self.total_cost,
               "beta": self.beta.tolist(),
               "certificate_v": None if self.certificate_v is None
               else self.certificate_v.tolist()}
        if self.delta is not None:
            doc["delta"] = self.delta.tolist()
        if self.gamma is not None:
            doc["gamma"] = self.gamma.tolist()
        return doc


def _v(i: int) -> str:
    return f"v_{i}"


def _vp(i: int, l: int) -> str:
    return f"v_{i}_{l}"


def build_problem1(g: Graph, infected, costs: CostModel,
                   lambda_cap: Optional[float] = None,
                   epsilon: float = DEFAULT_EPSILON) -> AllocationProblem:
    """Assemble the plain-mode allocation GP.

    Variables are the certificate entries v_i and the rates beta_i,
    delta_i, plus t = lambda_bar + sigma_I(0) when minimizing. Per
    column j the certificate row inequality becomes the posynomial

        (sum_i v_i J_ii a_ij beta_i + delta_j + eps) / (v_j delta_j) <= 1

    the bound inequality becomes (sum_infected v_i + eps) / t <= 1, and
    the budget uses the constant-absorbed right-hand side. Strictness
    is encoded additively with margin eps so certificates verify at
    absolute slack.
    """
    if costs.mode != "plain":
        raise ValueError("plain-mode cost model required")
    infected = frozenset(int(i) for i in infected)
    if not infected:
        raise ValueError("infected set must be non-empty")
    n = g.node_count
    nbrs = g.neighbor_lists
    sigma_i0 = len(infected)
    budget_rhs = costs.absorbed_budget(n)

    ineqs = []
    # certificate row, one posynomial per column j
    for j in range(n):
        denom = gp.Monomial(1.0, {_v(j): 1.0, f"delta_{j}": 1.0})
        terms = []
        for i in nbrs[j]:
            if i in infected:
                continue  # J_ii = 0
            terms.append(gp.Monomial(1.0, {_v(i): 1.0, f"beta_{i}": 1.0}))
        terms.append(gp.Monomial(1.0, {f"delta_{j}": 1.0}))
        terms.append(gp.Monomial(epsilon, {}))
        ineqs.append(gp.Posynomial(tuple(terms)) / denom)

    # accumulated-infection cap via t = lambda_bar + sigma_I(0)
    bound_terms = [gp.Monomial(1.0, {_v(i): 1.0}) for i in sorted(infected)]
    bound_terms.append(gp.Monomial(epsilon, {}))
    if lambda_cap is None:
        t_mono = gp.Monomial(1.0, {"t": 1.0})
        ineqs.append(gp.Posynomial(tuple(bound_terms)) / t_mono)
        objective = gp.Posynomial((t_mono,))
    else:
        if lambda_cap <= 0:
            raise ValueError("lambda cap must be positive")
        t_const = lambda_cap + sigma_i0
        ineqs.append(gp.Posynomial(tuple(bound_terms)) * (1.0 / t_const))

    # budget with constants absorbed
    budget_terms = []
    for i in range(n):
        budget_terms.append(gp.Monomial(costs.c1 / budget_rhs,
                                        {f"beta_{i}": -1.0}))
        budget_terms.append(gp.Monomial(costs.c3 / budget_rhs,
                                        {f"delta_{i}": 1.0}))
    budget_posy = gp.Posynomial(tuple(budget_terms))
    ineqs.append(budget_posy)
    if lambda_cap is not None:
        # feasibility question: minimizing spend picks a canonical point
        objective = budget_posy

    box = {}
    for i in range(n):
        box[f"beta_{i}"] = costs.beta_box
        box[f"delta_{i}"] = costs.delta_box
        box[_v(i)] = _WIDE_BOX
    if lambda_cap is None:
        box["t"] = _WIDE_BOX

    problem = gp.GpProblem(objective=objective,
                           ineq_constraints=tuple(ineqs), box=box)
    return AllocationProblem(gp_problem=problem, graph=g, infected=infected,
                             costs=costs, mode="plain",
                             lambda_cap=lambda_cap, epsilon=epsilon)


def build_problem2(g: Graph, infected, costs: CostModel,
                   fits: Sequence[MonomialBound], p: int, delta,
                   lambda_cap: Optional[float] = None,
                   epsilon: float = DEFAULT_EPSILON) -> AllocationProblem:
    """Assemble the isolation-mode allocation GP for the Erlang family.

    Each node has one removal law Erlang(p, gamma_i) with -DPi = p/gamma
    identical across phases, so `fits` carries one monomial bound per
    node, reused for every phase. `delta` is the fixed natural-recovery
    rate vector (zero allowed here; the simulator keeps requiring
    positive rates).
    """
    if costs.mode != "isolation":
        raise ValueError("isolation-mode cost model required")
    infected = frozenset(int(i) for i in infected)
    if not infected:
        raise ValueError("infected set must be non-empty")
    n = g.node_count
    if len(fits) != n:
        raise ValueError(f"need one monomial fit per node, got {len(fits)}")
    delta = np.broadcast_to(np.asarray(delta, float), (n,)).copy()
    if np.any(delta < 0):
        raise ValueError("delta must be nonnegative")
    nbrs = g.neighbor_lists
    sigma_i0 = len(infected)
    budget_rhs = costs.absorbed_budget(n)

    ineqs = []
    for j in range(n):
        fit = fits[j]
        for m in range(1, p + 1):  # phase column (j, m), 1-based here
            # denominator: v_{j,m} * kappa_j * (p/gamma_j)^alpha_j
            denom = gp.Monomial(fit.kappa * p ** fit.alpha,
                                {_vp(j, m): 1.0, f"gamma_{j}": -fit.alpha})
            terms = []
            for i in nbrs[j]:
                if i in infected:
                    continue
                terms.append(gp.Monomial(1.0, {_vp(i, 1): 1.0,
                                               f"beta_{i}": 1.0}))
            if m < p:
                terms.append(gp.Monomial(float(p),
                                         {_vp(j, m + 1): 1.0,
                                          f"gamma_{j}": -1.0}))
            else:
                terms.append(gp.Monomial(float(p), {f"gamma_{j}": -1.0}))
            if delta[j] > 0:
                terms.append(gp.Monomial(float(delta[j]), {}))
            terms.append(gp.Monomial(epsilon, {}))
            ineqs.append(gp.Posynomial(tuple(terms)) / denom)

    bound_terms = [gp.Monomial(1.0, {_vp(i, 1): 1.0}) for i in sorted(infected)]
    bound_terms.append(gp.Monomial(epsilon, {}))
    if lambda_cap is None:
        t_mono = gp.Monomial(1.0, {"t": 1.0})
        ineqs.append(gp.Posynomial(tuple(bound_terms)) / t_mono)
        objective = gp.Posynomial((t_mono,))
    else:
        if lambda_cap <= 0:
            raise ValueError("lambda cap must be positive")
        ineqs.append(gp.Posynomial(tuple(bound_terms))
                     * (1.0 / (lambda_cap + sigma_i0)))

    budget_terms = []
    for i in range(n):
        budget_terms.append(gp.Monomial(costs.c1 / budget_rhs,
                                        {f"beta_{i}": -1.0}))
        budget_terms.append(gp.Monomial(costs.c5 / budget_rhs,
                                        {f"gamma_{i}": -1.0}))
    budget_posy = gp.Posynomial(tuple(budget_terms))
    ineqs.append(budget_posy)
    if lambda_cap is not None:
        objective = budget_posy

    box = {}
    for i in range(n):
        box[f"beta_{i}"] = costs.beta_box
        box[f"gamma_{i}"] = costs.gamma_box
        for l in range(1, p + 1):
            box[_vp(i, l)] = _WIDE_BOX
    if lambda_cap is None:
        box["t"] = _WIDE_BOX

    problem = gp.GpProblem(objective=objective,
                           ineq_constraints=tuple(ineqs), box=box)
    return AllocationProblem(gp_problem=problem, graph=g, infected=infected,
                             costs=costs, mode="isolation",
                             lambda_cap=lambda_cap, epsilon=epsilon, p=p,
                             delta_fixed=delta, fits=tuple(fits))


def _system_for(prob: AllocationProblem, beta: np.ndarray,
                second: np.ndarray) -> bound_mod.ComparisonSystem:
    n = prob.graph.node_count
    if prob.mode == "plain":
        j = np.ones(n)
        for i in prob.infected:
            j[i] = 0.0
        a = prob.graph.adjacency_matrix()
        m = (j * beta)[:, None] * a - np.diag(second)
        x0 = np.zeros(n)
        for i in prob.infected:
            x0[i] = 1.0
        return bound_mod.ComparisonSystem(matrix=m, weight_row=second,
                                          initial=x0,
                                          sigma_I0=len(prob.infected))
    laws = [erlang(ErlangSpec(prob.p, float(gm))) for gm in second]
    return bound_mod.isolation_system_from(prob.graph, prob.infected,
                                           prob.delta_fixed, laws, beta)


def _solve_relaxing(problem: gp.GpProblem, tol: float) -> gp.GpSolution:
    """Solve, relaxing the tolerance up to 100x when the barrier hits
    its floating-point centering floor on degenerate instances. The
    achieved tolerance is whatever the returned solution reports."""
    sol = gp.solve(problem, tol=tol)
    while sol.status == "max_iter" and tol < 9e-6:
        tol *= 10.0
        sol = gp.solve(problem, tol=tol)
    return sol


def solve_allocation(prob: AllocationProblem,
                     tol: float = 1e-7) -> Allocation:
    """Solve the assembled GP and re-verify the result: the extracted
    certificate must pass with slack epsilon/2 and the recomputed
    linear-solve bound must not exceed the reported lambda_bar."""
    sol = _solve_relaxing(prob.gp_problem, tol)
    if sol.status == "infeasible":
        raise AllocationInfeasible(
            "budget insufficient for the requested control level"
            if prob.lambda_cap is not None else
            "allocation problem infeasible")
    if sol.status != "optimal":
        raise CertificateError(f"solver did not converge: {sol.status}")
    n = prob.graph.node_count
    beta = np.array([sol.point[f"beta_{i}"] for i in range(n)])
    sigma_i0 = len(prob.infected)
    if prob.mode == "plain":
        second = np.array([sol.point[f"delta_{i}"] for i in range(n)])
        v = np.array([sol.point[_v(i)] for i in range(n)])
    else:
        second = np.array([sol.point[f"gamma_{i}"] for i in range(n)])
        v = np.array([sol.point[_vp(i, l)]
                      for i in range(n) for l in range(1, prob.p + 1)])
    if prob.lambda_cap is None:
        lambda_bar = max(0.0, sol.point["t"] - sigma_i0)
    else:
        lambda_bar = prob.lambda_cap
    sys = _system_for(prob, beta, second)
    if not bound_mod.verify_certificate(sys, v, lambda_bar,
                                        slack=prob.epsilon / 2):
        raise CertificateError("solver output failed certificate validation")
    lb = bound_mod.lambda_bound(sys)
    if not lb <= lambda_bar + 10 * max(tol, 1e-9) * (1 + abs(lambda_bar)):
        raise CertificateError(
            f"recomputed bound {lb} exceeds certified level {lambda_bar}")
    total = prob.costs.total_cost(beta, second)
    return Allocation(mode=prob.mode, beta=beta,
                      delta=second if prob.mode == "plain" else None,
                      gamma=second if prob.mode == "isolation" else None,
                      total_cost=total, lambda_bar=lambda_bar,
                      certificate_v=v, strategy="optimized")


def _certify(g: Graph, infected, costs: CostModel, beta, second,
             delta_fixed=None, p: int = 1,
             strategy: str = "baseline") -> Allocation:
    """Wrap externally chosen rates into an Allocation, synthesizing a
    certificate when the comparison system is Hurwitz."""
    infected = frozenset(int(i) for i in infected)
    n = g.node_count
    if costs.mode == "plain":
        j = np.ones(n)
        for i in infected:
            j[i] = 0.0
        m = (j * beta)[:, None] * g.adjacency_matrix() - np.diag(second)
        x0 = np.zeros(n)
        for i in infected:
            x0[i] = 1.0
        sys = bound_mod.ComparisonSystem(matrix=m, weight_row=second,
                                         initial=x0, sigma_I0=len(infected))
    else:
        laws = [erlang(ErlangSpec(p, float(gm))) for gm in second]
        sys = bound_mod.isolation_system_from(g, infected, delta_fixed,
                                              laws, beta)
    cert = bound_mod.certificate_for(sys, margin=DEFAULT_EPSILON)
    if cert is None:
        lambda_bar, v = bound_mod.UNBOUNDED, None
    else:
        v, lambda_bar = cert
        lambda_bar = max(0.0, lambda_bar)
    return Allocation(mode=costs.mode, beta=np.asarray(beta, float),
                      delta=np.asarray(second, float)
                      if costs.mode == "plain" else None,
                      gamma=np.asarray(second, float)
                      if costs.mode == "isolation" else None,
                      total_cost=costs.total_cost(beta, second),
                      lambda_bar=lambda_bar, certificate_v=v,
                      strategy=strategy)


def baseline_uniform(g: Graph, infected, costs: CostModel,
                     budget: Optional[float] = None,
                     delta_fixed=None, p: int = 1) -> Allocation:
    """Spend the budget equally per node, split equally between the two
    resource types; rates follow by inverting the cost curves. Spending
    saturates at the expensive ends when the budget exceeds 2n."""
    n = g.node_count
    budget = costs.budget if budget is None else budget
    spend = min(1.0, max(0.0, budget / (2.0 * n)))
    # invert f(beta) = spend
    beta = np.full(n, costs.c1 / (spend - costs.c2))
    beta = np.clip(beta, costs.beta_box[0], costs.beta_box[1])
    if costs.mode == "plain":
        second = np.full(n, (spend - costs.c4) / costs.c3)
        second = np.clip(second, costs.delta_box[0], costs.delta_box[1])
    else:
        second = np.full(n, costs.c5 / (spend - costs.c6))
        second = np.clip(second, costs.gamma_box[0], costs.gamma_box[1])
    return _certify(g, infected, costs, beta, second,
                    delta_fixed=delta_fixed, p=p, strategy="uniform")


def baseline_sis_spectral(g: Graph, infected, costs: CostModel,
                          tol: float = 1e-7) -> Allocation:
    """SIS-style spectral design: maximize the decay certificate s with
    v^T (B A - D) <= -s v^T under the same budget and boxes, with no
    masking of initially infected nodes. The returned rates are then
    evaluated under the SIR comparison bound for comparison."""
    if costs.mode != "plain":
        raise ValueError("the SIS baseline is defined for plain mode")
    n = g.node_count
    nbrs = g.neighbor_lists
    budget_rhs = costs.absorbed_budget(n)
    eps = DEFAULT_EPSILON

    ineqs = []
    for j in range(n):
        denom = gp.Monomial(1.0, {_v(j): 1.0, f"delta_{j}": 1.0})
        terms = [gp.Monomial(1.0, {_v(i): 1.0, f"beta_{i}": 1.0})
                 for i in nbrs[j]]
        terms.append(gp.Monomial(1.0, {"s": 1.0, _v(j): 1.0}))
        terms.append(gp.Monomial(eps, {}))
        ineqs.append(gp.Posynomial(tuple(terms)) / denom)
    budget_terms = []
    for i in range(n):
        budget_terms.append(gp.Monomial(costs.c1 / budget_rhs,
                                        {f"beta_{i}": -1.0}))
        budget_terms.append(gp.Monomial(costs.c3 / budget_rhs,
                                        {f"delta_{i}": 1.0}))
    ineqs.append(gp.Posynomial(tuple(budget_terms)))
    box = {"s": (1e-8, 1e4)}
    for i in range(n):
        box[f"beta_{i}"] = costs.beta_box
        box[f"delta_{i}"] = costs.delta_box
        box[_v(i)] = _WIDE_BOX
    problem = gp.GpProblem(
        objective=gp.Posynomial((gp.Monomial(1.0, {"s": -1.0}),)),
        ineq_constraints=tuple(ineqs), box=box)
    sol = _solve_relaxing(problem, tol)
    if sol.status == "infeasible":
        raise AllocationInfeasible("no decay rate is attainable in the boxes")
    if sol.status != "optimal":
        raise CertificateError(f"SIS baseline solve failed: {sol.status}")
    beta = np.array([sol.point[f"beta_{i}"] for i in range(n)])
    delta = np.array([sol.point[f"delta_{i}"] for i in range(n)])
    alloc = _certify(g, infected, costs, beta, delta, strategy="sis_spectral")
    return alloc


def allocation_csv_rows(alloc: Allocation, g: Graph,
                        costs: CostModel) -> list:
    """Rows (node, degree, prevention_cost, correction_cost) matching
    the scatter-plot data layout; the correction column carries the
    isolation cost in isolation mode."""
    degs = degrees(g)
    prev = costs.prevention_cost(alloc.beta)
    if alloc.mode == "plain":
        corr = costs.correction_cost(alloc.delta)
    else:
        corr = costs.isolation_cost(alloc.gamma)
    return [(i, int(degs[i]), float(prev[i]), float(corr[i]))
            for i in range(g.node_count)]
