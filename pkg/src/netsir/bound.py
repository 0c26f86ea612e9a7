"""Linear comparison systems and certified upper bounds on the expected
number of accumulated infections.

Without isolation the comparison matrix is M = J B A - D acting on the
expected infection indicators; with isolation it is the block matrix
oplus_i (Pi'_i)^T + (J B A) kron (u1 1^T) on the expected phase
indicators. Whenever the matrix is Hurwitz the accumulated-infection
functional integrates to -weight_row @ M^{-1} @ initial - sigma_I(0),
and a positive certificate vector witnesses both stability and the
bound (the Metzler matrix equivalence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, PowerIterationError
from .phase_type import PhaseType
from .simulator import EpidemicParams

UNBOUNDED = math.inf
DEFAULT_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class ComparisonSystem:
    """Metzler matrix plus the removal-weight row and initial-condition
    column that close the accumulated-infection bound."""

    matrix: np.ndarray
    weight_row: np.ndarray
    initial: np.ndarray
    sigma_I0: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        w = np.asarray(self.weight_row, dtype=float)
        x0 = np.asarray(self.initial, dtype=float)
        if m.shape[0] != m.shape[1] or w.shape != (m.shape[0],) \
                or x0.shape != (m.shape[0],):
            raise ValueError("inconsistent system dimensions")
        off = m - np.diag(np.diag(m))
        if np.any(off < 0):
            raise ValueError("comparison matrix must be Metzler")
        if np.any(w < 0) or np.any(x0 < 0):
            raise ValueError("weight row and initial must be nonnegative")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "weight_row", w)
        object.__setattr__(self, "initial", x0)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_sir_system(g: Graph, params: EpidemicParams) -> ComparisonSystem:
    """M = J B A - D with J masking initially infected rows,
    weight_row = delta, initial = infected indicator."""
    if params.isolation is not None:
        raise ValueError("params carry isolation laws; use build_isolation_system")
    params.validate_for(g)
    n = g.node_count
    a = g.adjacency_matrix()
    j = np.ones(n)
    for i in params.initially_infected:
        j[i] = 0.0
    m = (j * params.beta)[:, None] * a - np.diag(params.delta)
    x0 = np.zeros(n)
    for i in params.initially_infected:
        x0[i] = 1.0
    return ComparisonSystem(matrix=m, weight_row=params.delta.copy(),
                            initial=x0, sigma_I0=len(params.initially_infected))


def isolation_system_from(g: Graph, infected, delta,
                          laws: Sequence[PhaseType],
                          beta) -> ComparisonSystem:
    """Block comparison system from raw per-node data.

    `laws` are the isolation-time laws (natural recovery not yet folded
    in); delta may be zero entrywise, which models removal by isolation
    only.
    """
    n = g.node_count
    delta = np.broadcast_to(np.asarray(delta, float), (n,))
    beta = np.broadcast_to(np.asarray(beta, float), (n,))
    infected = frozenset(int(i) for i in infected)
    p = laws[0].p
    if any(law.p != p for law in laws):
        raise ValueError("isolation laws must share one phase count")
    a = g.adjacency_matrix()
    j = np.ones(n)
    for i in infected:
        j[i] = 0.0
    jba = (j * beta)[:, None] * a

    big = np.zeros((n * p, n * p))
    weight = np.zeros(n * p)
    for i in range(n):
        pi_prime = laws[i].Pi - delta[i] * np.eye(p)
        big[i * p:(i + 1) * p, i * p:(i + 1) * p] = pi_prime.T
        weight[i * p:(i + 1) * p] = -pi_prime.sum(axis=1)
    u1_ones = np.zeros((p, p))
    u1_ones[0, :] = 1.0
    big += np.kron(jba, u1_ones)
    x0 = np.zeros(n * p)
    for i in infected:
        x0[i * p] = 1.0
    return ComparisonSystem(matrix=big, weight_row=weight, initial=x0,
                            sigma_I0=len(infected))


def build_isolation_system(g: Graph, params: EpidemicParams) -> ComparisonSystem:
    if params.isolation is None:
        raise ValueError("params lack isolation laws; use build_sir_system")
    params.validate_for(g)
    return isolation_system_from(g, params.initially_infected, params.delta,
                                 params.isolation, params.beta)


def is_hurwitz_metzler(m: np.ndarray, tol: float = 1e-10,
                       max_iter: int = 100_000) -> bool:
    """True iff the Metzler matrix has spectral abscissa < -tol.

    Shifts to the nonnegative matrix N = m + c I (c = 1 + max |diag|),
    whose Perron root is the abscissa plus c, and brackets that root
    with Collatz-Wielandt ratio bounds along power iterates. The upper
    bound is rigorous for every strictly positive iterate, so a True
    answer never overcertifies; the lower bound restricts the ratios to
    the dominant support of the iterate, which decides reducible cases
    the plain ratios cannot.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    off = m - np.diag(np.diag(m))
    if np.any(off < 0):
        raise ValueError("matrix must be Metzler")
    n = m.shape[0]
    if n == 1:
        return m[0, 0] < -tol
    c = 1.0 + float(np.max(np.abs(np.diag(m))))
    big = m + c * np.eye(n)
    theta = c - tol  # Hurwitz iff rho(N) < theta
    x = np.full(n, 1.0)
    lb = ub = None
    for _ in range(max_iter):
        y = big @ x
        ratios = y / x
        ub = float(ratios.max())
        support = x > 1e-13 * x.max()
        lb = float(ratios[support].min())
        lb = max(lb, float(np.max(np.diag(big))))
        if ub < theta:
            return True
        if lb >= theta:
            return False
        x = y / y.max()
        x = np.maximum(x, 1e-290)
    raise PowerIterationError(
        f"Perron bracketing undecided after {max_iter} iterations "
        f"(abscissa in [{lb - c:.3e}, {ub - c:.3e}], tol={tol})",
        estimate=ub - c, residual=ub - lb, vector=x)


def lambda_bound(sys: ComparisonSystem) -> float:
    """Certified upper bound on accumulated infections, or the
    UNBOUNDED marker (math.inf) when the comparison matrix is not
    Hurwitz, meaning this instance certifies nothing."""
    try:
        stable = is_hurwitz_metzler(sys.matrix)
    except PowerIterationError:
        return UNBOUNDED
    if not stable:
        return UNBOUNDED
    sol = np.linalg.solve(sys.matrix, sys.initial)
    val = float(-sys.weight_row @ sol) - sys.sigma_I0
    if not np.isfinite(val):
        raise ArithmeticError("singular solve on a Hurwitz comparison matrix")
    return max(0.0, val)


def verify_certificate(sys: ComparisonSystem, v: np.ndarray,
                       lambda_bar: float,
                       slack: float = DEFAULT_SLACK) -> bool:
    """Check the strict certificate inequalities with explicit margin:
    v^T M + weight_row <= -slack entrywise and
    v^T initial <= lambda_bar + sigma_I0 - slack.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (sys.dim,):
        raise ValueError(f"certificate has dim {v.shape}, system {sys.dim}")
    if np.any(v <= 0):
        return False
    row = v @ sys.matrix + sys.weight_row
    if np.any(row > -slack):
        return False
    return float(v @ sys.initial) <= lambda_bar + sys.sigma_I0 - slack


def certificate_for(sys: ComparisonSystem,
                    margin: float = DEFAULT_SLACK) -> Optional[tuple]:
    """Construct (v, lambda_bar) witnessing the bound for a Hurwitz
    system: v solves v^T M = -(weight_row + margin) and lambda_bar is
    v^T initial - sigma_I0 + margin. Returns None when not Hurwitz."""
    try:
        if not is_hurwitz_metzler(sys.matrix):
            return None
    except PowerIterationError:
        return None
    v = np.linalg.solve(sys.matrix.T, -(sys.weight_row + margin))
    if np.any(v <= 0):
        return None
    lam = float(v @ sys.initial) - sys.sigma_I0 + margin
    return v, lam
