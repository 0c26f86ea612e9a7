"""Event-driven exact simulation of the networked SIR process.

Gillespie direct method with per-node rate bookkeeping: a susceptible
node i flips to infected at rate beta_i times its current number of
infected neighbors; an infected node is removed at rate delta_i (or,
with isolation, leaves through the phase machinery of its removal-time
law). Statistically this realizes the Poisson-counter dynamics exactly.

Replica r of a Monte Carlo run consumes the counter-based stream
(seed, r), so serial and parallel execution produce bit-identical
results.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from math import log
from typing import Optional, Sequence

import numpy as np

from .graph import Graph
from .phase_type import PhaseType

EVENT_CAP = 100_000_000
_BATCH = 128  # uniforms drawn per rng call inside the kernels


class EventCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class EpidemicParams:
    """Per-node rates and the initial infected set.

    `isolation`, when present, holds one removal-time law per node
    (all with the same phase count); the natural-recovery exponential
    delta_i is folded in by the simulator via the min-with-exponential
    closure.
    """

    beta: np.ndarray
    delta: np.ndarray
    initially_infected: frozenset
    isolation: Optional[tuple] = None

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        delta = np.asarray(self.delta, dtype=float)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "initially_infected",
                           frozenset(int(i) for i in self.initially_infected))
        if np.any(beta <= 0) or np.any(delta <= 0):
            raise ValueError("beta and delta must be strictly positive")
        if beta.shape != delta.shape or beta.ndim != 1:
            raise ValueError("beta and delta must be equal-length vectors")
        if not self.initially_infected:
            raise ValueError("initially_infected must be non-empty")
        if self.isolation is not None:
            iso = tuple(self.isolation)
            object.__setattr__(self, "isolation", iso)
            if len(iso) != len(beta):
                raise ValueError("need one isolation law per node")
            ps = {d.p for d in iso}
            if len(ps) != 1:
                raise ValueError("isolation laws must share one phase count")

    @classmethod
    def build(cls, n: int, beta, delta, infected, isolation=None):
        """Broadcast scalar rates over n nodes."""
        return cls(beta=np.broadcast_to(np.asarray(beta, float), (n,)).copy(),
                   delta=np.broadcast_to(np.asarray(delta, float), (n,)).copy(),
                   initially_infected=frozenset(infected),
                   isolation=isolation)

    def validate_for(self, g: Graph):
        n = g.node_count
        if len(self.beta) != n:
            raise ValueError(f"rates sized {len(self.beta)}, graph has {n} nodes")
        bad = [i for i in self.initially_infected if not 0 <= i < n]
        if bad:
            raise ValueError(f"initially infected nodes out of range: {bad}")

    @property
    def phase_count(self) -> int:
        return 1 if self.isolation is None else self.isolation[0].p


@dataclass(frozen=True, eq=False)
class SimOutcome:
    """One realization: terminal tallies, the ordered event log and the
    piecewise-constant (t, sigma_S, sigma_I, sigma_R) series sampled at
    event times."""

    final_removed: int
    infections_after_t0: int
    event_log: tuple
    counts_series: np.ndarray


@dataclass(frozen=True)
class LambdaEstimate:
    """Monte Carlo estimate of the expected number of infections after
    time zero."""

    mean: float
    std_error: float
    replicas: int
    seed: int


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Counter-based stream (seed, replica): Philox keyed by seed with
    the counter jumped to block `replica`."""
    bg = np.random.Philox(key=seed)
    return np.random.Generator(bg.jumped(replica))


def _poke_stream(bg: np.random.Philox, replica: int) -> np.random.Generator:
    # cheap in-place equivalent of Philox(key=seed).jumped(replica)
    st = bg.state
    st["state"]["counter"] = np.array([0, 0, replica, 0], dtype=np.uint64)
    st["buffer_pos"] = 4
    st["buffer"] = np.zeros(4, dtype=np.uint64)
    st["has_uint32"] = 0
    st["uinteger"] = 0
    bg.state = st
    return np.random.Generator(bg)


def _run_plain(neigh, beta, delta, infected0, rng, record):
    """Core Gillespie loop for the plain SIR model.

    Returns (ever_infected, event_log, counts_rows); the random stream
    consumed is independent of `record`.
    """
    n = len(neigh)
    status = [0] * n           # 0 S, 1 I, 2 R
    rate = [0.0] * n
    total = 0.0
    n_inf = 0
    for i in infected0:
        status[i] = 1
        rate[i] = delta[i]
        total += delta[i]
        n_inf += 1
    for i in infected0:
        for j in neigh[i]:
            if status[j] == 0:
                rate[j] += beta[j]
                total += beta[j]
    ever_infected = n_inf
    n_rem = 0
    log_rows = [] if record else None
    counts = [(0.0, n - n_inf, n_inf, 0)] if record else None
    t = 0.0
    events = 0
    buf = rng.random(_BATCH).tolist()
    bi = 0
    while n_inf > 0:
        if bi >= _BATCH - 1:
            buf = rng.random(_BATCH).tolist()
            bi = 0
        u1 = buf[bi]
        u2 = buf[bi + 1]
        bi += 2
        t += -log(1.0 - u1) / total
        x = u2 * total
        acc = 0.0
        k = -1
        for i in range(n):
            r = rate[i]
            if r > 0.0:
                acc += r
                if x < acc:
                    k = i
                    break
        if k < 0:
            k = max(range(n), key=lambda i: rate[i])
        if status[k] == 0:
            status[k] = 1
            total += delta[k] - rate[k]
            rate[k] = delta[k]
            n_inf += 1
            ever_infected += 1
            for j in neigh[k]:
                if status[j] == 0:
                    rate[j] += beta[j]
                    total += beta[j]
            if record:
                log_rows.append((t, k, "infect"))
        else:
            status[k] = 2
            total -= rate[k]
            rate[k] = 0.0
            n_inf -= 1
            n_rem += 1
            for j in neigh[k]:
                if status[j] == 0:
                    rate[j] -= beta[j]
                    total -= beta[j]
            if record:
                log_rows.append((t, k, "recover"))
        if record:
            counts.append((t, n - ever_infected, n_inf, n_rem))
        events += 1
        if events >= EVENT_CAP:
            raise EventCapExceeded(f"exceeded {EVENT_CAP} events in one replica")
    return ever_infected, log_rows, counts


def _run_isolation(neigh, beta, delta, pi_rows, exit_w, natural_frac,
                   infected0, rng, record):
    """Gillespie loop with per-node removal phases.

    pi_rows[i][l] lists (m, rate) phase jumps out of phase l under the
    folded generator Pi - delta_i*I; exit_w[i][l] is the matching exit
    rate; natural_frac[i][l] is the probability an exit is a natural
    recovery rather than an isolation.
    """
    n = len(neigh)
    status = [0] * n        # 0 S, 1 I, 2 R
    phase = [0] * n
    rate = [0.0] * n
    total = 0.0
    n_inf = 0
    hold = [[sum(r for _, r in pi_rows[i][l]) + exit_w[i][l]
             for l in range(len(exit_w[i]))] for i in range(n)]
    for i in infected0:
        status[i] = 1
        phase[i] = 0
        rate[i] = hold[i][0]
        total += rate[i]
        n_inf += 1
    for i in infected0:
        for j in neigh[i]:
            if status[j] == 0:
                rate[j] += beta[j]
                total += beta[j]
    ever_infected = n_inf
    n_rem = 0
    log_rows = [] if record else None
    counts = [(0.0, n - n_inf, n_inf, 0)] if record else None
    t = 0.0
    events = 0
    buf = rng.random(_BATCH).tolist()
    bi = 0
    while n_inf > 0:
        if bi >= _BATCH - 2:
            buf = rng.random(_BATCH).tolist()
            bi = 0
        u1 = buf[bi]
        u2 = buf[bi + 1]
        bi += 2
        t += -log(1.0 - u1) / total
        x = u2 * total
        acc = 0.0
        k = -1
        for i in range(n):
            r = rate[i]
            if r > 0.0:
                acc += r
                if x < acc:
                    k = i
                    break
        if k < 0:
            k = max(range(n), key=lambda i: rate[i])
        if status[k] == 0:
            status[k] = 1
            phase[k] = 0
            total += hold[k][0] - rate[k]
            rate[k] = hold[k][0]
            n_inf += 1
            ever_infected += 1
            for j in neigh[k]:
                if status[j] == 0:
                    rate[j] += beta[j]
                    total += beta[j]
            if record:
                log_rows.append((t, k, "infect"))
        else:
            l = phase[k]
            # pick phase jump vs exit inside node k; one extra uniform
            # (always consumed, so record mode never shifts the stream)
            if bi >= _BATCH:
                buf = rng.random(_BATCH).tolist()
                bi = 0
            u3 = buf[bi]
            bi += 1
            y = u3 * rate[k]
            acc2 = 0.0
            jumped = False
            for m, r in pi_rows[k][l]:
                acc2 += r
                if y < acc2:
                    phase[k] = m
                    total += hold[k][m] - rate[k]
                    rate[k] = hold[k][m]
                    jumped = True
                    break
            if not jumped:
                # exit: classify natural recovery vs isolation
                frac_point = acc2 + exit_w[k][l] * natural_frac[k][l]
                kind = "recover" if y < frac_point else "isolate"
                status[k] = 2
                total -= rate[k]
                rate[k] = 0.0
                n_inf -= 1
                n_rem += 1
                for j in neigh[k]:
                    if status[j] == 0:
                        rate[j] -= beta[j]
                        total -= beta[j]
                if record:
                    log_rows.append((t, k, kind))
            if record and jumped:
                pass  # internal phase jumps are not logged
        if record:
            counts.append((t, n - ever_infected, n_inf, n_rem))
        events += 1
        if events >= EVENT_CAP:
            raise EventCapExceeded(f"exceeded {EVENT_CAP} events in one replica")
    return ever_infected, log_rows, counts


def _isolation_tables(params: EpidemicParams):
    """Fold delta into each node's law and precompute jump tables."""
    pi_rows, exit_w, natural_frac = [], [], []
    for i, law in enumerate(params.isolation):
        d = float(params.delta[i])
        p = law.p
        pip = law.Pi - d * np.eye(p)
        w_prime = -pip.sum(axis=1)
        rows = []
        for l in range(p):
            rows.append([(m, float(pip[l, m]))
                         for m in range(p) if m != l and pip[l, m] > 0.0])
        pi_rows.append(rows)
        exit_w.append([float(w_prime[l]) for l in range(p)])
        natural_frac.append([d / w_prime[l] if w_prime[l] > 0 else 0.0
                             for l in range(p)])
    return pi_rows, exit_w, natural_frac


def _counts_array(counts):
    return np.array(counts, dtype=float)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return replica_rng(int(rng), 0)


def simulate_sir(g: Graph, params: EpidemicParams, rng) -> SimOutcome:
    """One exact realization of the plain SIR process; runs until no
    node is infected. `rng` is a Generator or an integer seed."""
    if params.isolation is not None:
        raise ValueError("params carry isolation laws; use simulate_sir_isolation")
    params.validate_for(g)
    ever, log_rows, counts = _run_plain(
        g.neighbor_lists, params.beta.tolist(), params.delta.tolist(),
        sorted(params.initially_infected), _as_rng(rng), record=True)
    return SimOutcome(final_removed=ever,
                      infections_after_t0=ever - len(params.initially_infected),
                      event_log=tuple(log_rows),
                      counts_series=_counts_array(counts))


def simulate_sir_isolation(g: Graph, params: EpidemicParams, rng) -> SimOutcome:
    """One exact realization of the SIR process with phase-type
    isolation; infected nodes start in phase 1 and leave through the
    folded generator Pi - delta*I."""
    if params.isolation is None:
        raise ValueError("params lack isolation laws; use simulate_sir")
    params.validate_for(g)
    pi_rows, exit_w, natural_frac = _isolation_tables(params)
    ever, log_rows, counts = _run_isolation(
        g.neighbor_lists, params.beta.tolist(), params.delta.tolist(),
        pi_rows, exit_w, natural_frac,
        sorted(params.initially_infected), _as_rng(rng), record=True)
    return SimOutcome(final_removed=ever,
                      infections_after_t0=ever - len(params.initially_infected),
                      event_log=tuple(log_rows),
                      counts_series=_counts_array(counts))


def _replica_block(args):
    (neigh, beta, delta, iso_tables, infected0, seed, r0, r1) = args
    bg = np.random.Philox(key=seed)
    out = np.empty(r1 - r0, dtype=np.int64)
    k0 = len(infected0)
    if iso_tables is None:
        for r in range(r0, r1):
            rng = _poke_stream(bg, r)
            ever, _, _ = _run_plain(neigh, beta, delta, infected0, rng,
                                    record=False)
            out[r - r0] = ever - k0
    else:
        pi_rows, exit_w, natural_frac = iso_tables
        for r in range(r0, r1):
            rng = _poke_stream(bg, r)
            ever, _, _ = _run_isolation(neigh, beta, delta, pi_rows, exit_w,
                                        natural_frac, infected0, rng,
                                        record=False)
            out[r - r0] = ever - k0
    return r0, out


def replica_infections(g: Graph, params: EpidemicParams, replicas: int,
                       seed: int, workers: int = 1) -> np.ndarray:
    """Infections-after-t0 for each of `replicas` independent runs.

    Replica r always uses stream (seed, r), so the result is identical
    for any worker count.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    params.validate_for(g)
    neigh = g.neighbor_lists
    beta = params.beta.tolist()
    delta = params.delta.tolist()
    infected0 = sorted(params.initially_infected)
    iso_tables = None if params.isolation is None else _isolation_tables(params)
    out = np.empty(replicas, dtype=np.int64)
    if workers <= 1 or replicas < 256:
        _, block = _replica_block(
            (neigh, beta, delta, iso_tables, infected0, seed, 0, replicas))
        return block
    nchunks = workers * 4
    bounds = np.linspace(0, replicas, nchunks + 1, dtype=int)
    tasks = [(neigh, beta, delta, iso_tables, infected0, seed, int(a), int(b))
             for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        for r0, block in pool.map(_replica_block, tasks):
            out[r0:r0 + len(block)] = block
    return out


def estimate_lambda(g: Graph, params: EpidemicParams, replicas: int,
                    seed: int, workers: int = 1) -> LambdaEstimate:
    """Monte Carlo mean and standard error of infections after t=0."""
    vals = replica_infections(g, params, replicas, seed, workers)
    mean = float(vals.mean())
    if replicas > 1:
        se = float(vals.std(ddof=1) / np.sqrt(replicas))
    else:
        se = 0.0
    return LambdaEstimate(mean=mean, std_error=se, replicas=replicas, seed=seed)
