"""Derivative-free minimizers: COBYLA-style trust-region linear models on a
simplex, plus a Nelder-Mead cross-check.

Both are deterministic: identical (objective, x0, config) inputs produce
bitwise-identical results. The objective must be pure for the duration of a
run; it is never called concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

# Simplex acceptability bounds relative to the trust radius: edges no longer
# than _BETA*rho and smallest singular value at least _ALPHA*rho.
_ALPHA, _BETA = 0.25, 2.1
_EXPAND_THRESHOLD = 0.5   # grow rho when a step achieves this fraction of the prediction
_FLOOR_PATIENCE = 4       # consecutive failed steps at rho_end before restart/stop
_MAX_RESTARTS = 2         # fresh simplexes allowed once rho has bottomed out
_MAX_EXTENSIONS = 20      # doublings per pattern chain; keeps coordinates bounded


@dataclass
class ObjectiveHandle:
    arity: int
    evaluate: Callable[[np.ndarray], float]
    evaluation_budget: int | None = None


@dataclass(frozen=True)
class OptimizerConfig:
    rho_begin: float = 0.5
    rho_end: float = 1e-4
    max_evals: int = 2000

    def __post_init__(self):
        if not (0.0 < self.rho_end <= self.rho_begin):
            raise ValueError("need 0 < rho_end <= rho_begin")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")


class OptStatus(Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    STALLED = "stalled"


@dataclass
class OptResult:
    best_x: np.ndarray
    best_f: float
    evals_used: int
    status: OptStatus
    history: list[float] = field(default_factory=list)
    init_evals: int = 0       # x0 plus simplex (re)initialization evaluations
    trust_steps: int = 0      # accept/reject decisions (one evaluation each)
    geometry_steps: int = 0   # simplex repair evaluations
    pattern_steps: int = 0    # pattern-extension evaluations


class _Tracker:
    """Counts evaluations and keeps the running best."""

    def __init__(self, obj: ObjectiveHandle, budget: int):
        self.evaluate = obj.evaluate
        self.budget = budget
        self.evals = 0
        self.history: list[float] = []
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf

    def __call__(self, x: np.ndarray) -> float:
        f = float(self.evaluate(np.array(x, dtype=float)))
        self.evals += 1
        self.history.append(f)
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
        return f


def _budget(obj: ObjectiveHandle, cfg: OptimizerConfig) -> int:
    budget = cfg.max_evals
    if obj.evaluation_budget is not None:
        budget = min(budget, obj.evaluation_budget)
    return budget


def _check_start(obj: ObjectiveHandle, x0: np.ndarray, budget: int):
    if x0.shape != (obj.arity,):
        raise ValueError(f"x0 must have length {obj.arity}")
    if budget < obj.arity + 2:
        raise ValueError(f"budget {budget} cannot build an initial simplex in {obj.arity}-D")


def _finish(tr: _Tracker, f0: float, converged: bool, **counters) -> OptResult:
    if tr.best_f >= f0:
        status = OptStatus.STALLED
    elif converged:
        status = OptStatus.CONVERGED
    else:
        status = OptStatus.BUDGET_EXHAUSTED
    return OptResult(tr.best_x, tr.best_f, tr.evals, status, tr.history, **counters)


def _fresh_simplex(tr: _Tracker, center: np.ndarray, f_center: float, scale: float):
    n = len(center)
    sim = np.tile(center, (n + 1, 1))
    fs = np.full(n + 1, np.inf)
    fs[0] = f_center
    for i in range(n):
        if tr.evals >= tr.budget:
            break
        sim[i + 1, i] += scale
        fs[i + 1] = tr(sim[i + 1])
    return sim, fs


def _svd(edges):
    # LAPACK's divide-and-conquer SVD occasionally refuses badly scaled inputs;
    # a deterministic diagonal jitter is accurate enough for geometry analysis.
    try:
        return np.linalg.svd(edges)
    except np.linalg.LinAlgError:
        bump = (np.abs(edges).max() or 1.0) * 1e-10
        return np.linalg.svd(edges + bump * np.eye(*edges.shape))


def _model_gradient(edges, dfs):
    """Least-squares gradient of the linear interpolation model, via SVD."""
    u, sing, vt = _svd(edges)
    cutoff = sing.max() * 1e-12 if sing.size else 0.0
    inv = np.where(sing > cutoff, 1.0 / np.where(sing > 0, sing, 1.0), 0.0)
    grad = (vt.T * inv) @ (u.T @ dfs)
    return grad, u, sing, vt


def _repair_direction(edges, j):
    """Unit vector orthogonal to every edge except row j (complete-QR null column)."""
    others = np.delete(edges, j, axis=0)
    if others.shape[0] == 0:
        norm = np.linalg.norm(edges[j])
        return edges[j] / norm if norm > 0 else np.eye(edges.shape[1])[0]
    q, _ = np.linalg.qr(others.T, mode="complete")
    return q[:, -1]


def cobyla_minimize(obj: ObjectiveHandle, x0, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Trust-region minimization with linear interpolation models on a simplex.

    Each main-loop iteration spends exactly one evaluation. When the simplex is
    degenerate or has drifted beyond the trust radius, a geometry step moves one
    vertex back to distance rho along the missing direction. Otherwise the step
    goes to the linear-model minimizer at distance rho from the best vertex and
    is accepted or rejected against the true objective; rho halves when a step
    fails to achieve a tenth of the predicted reduction and doubles (capped at
    rho_begin) when it achieves half of it. Accepted steps are followed by
    pattern extensions that keep doubling the displacement from the previous
    best point while the objective improves, which is what lets the method walk
    curved valleys at a useful pace. Once rho has bottomed out at rho_end, a few
    persistent failures trigger a simplex rebuild, then termination.
    """
    x0 = np.array(x0, dtype=float)
    budget = _budget(obj, cfg)
    _check_start(obj, x0, budget)
    n = obj.arity

    tr = _Tracker(obj, budget)
    f0 = tr(x0)
    sim, fs = _fresh_simplex(tr, x0, f0, cfg.rho_begin)
    rho = cfg.rho_begin
    anchor = sim[int(np.argmin(fs))].copy()
    floor_fails = restarts = 0
    init = tr.evals
    trust = geom = pattern = 0
    converged = False

    while tr.evals < budget:
        b = int(np.argmin(fs))
        if b != 0:
            sim[[0, b]] = sim[[b, 0]]
            fs[[0, b]] = fs[[b, 0]]
        edges = sim[1:] - sim[0]
        dfs = fs[1:] - fs[0]
        dists = np.linalg.norm(edges, axis=1)
        grad, u, sing, vt = _model_gradient(edges, dfs)
        k_min = int(np.argmin(sing))
        too_far = np.flatnonzero(dists > _BETA * rho)
        at_floor = rho <= cfg.rho_end * (1 + 1e-12)

        if too_far.size or sing[k_min] < _ALPHA * rho:
            if too_far.size:
                j = int(too_far[np.argmax(dists[too_far])])
                direction = _repair_direction(edges, j)
            else:
                j = int(np.argmax(np.abs(u[:, k_min])))
                direction = vt[k_min]
            if direction @ grad > 0:
                direction = -direction
            x_new = sim[0] + rho * direction
            fs[1 + j] = tr(x_new)
            sim[1 + j] = x_new
            geom += 1
            continue

        gnorm = np.linalg.norm(grad)
        if gnorm <= 1e-14 * max(1.0, abs(fs[0])):
            # model is flat at this scale
            if not at_floor:
                rho = max(0.5 * rho, cfg.rho_end)
                continue
            if restarts < _MAX_RESTARTS:
                restarts += 1
                floor_fails = 0
                before = tr.evals
                sim, fs = _fresh_simplex(tr, sim[0].copy(), fs[0], rho)
                init += tr.evals - before
                continue
            converged = True
            break

        x_star = sim[0] - (rho / gnorm) * grad
        f_star = tr(x_star)
        trust += 1
        predicted = rho * gnorm
        actual = fs[0] - f_star

        if actual >= 0.1 * predicted:
            floor_fails = 0
            base = sim[0].copy()
            w = 1 + int(np.argmax(fs[1:]))
            sim[w] = x_star
            fs[w] = f_star
            cur_x, cur_f = x_star, f_star
            for _ in range(_MAX_EXTENSIONS):
                if tr.evals >= budget:
                    break
                x_ext = cur_x + (cur_x - anchor)
                f_ext = tr(x_ext)
                pattern += 1
                if f_ext >= cur_f:
                    break
                w = 1 + int(np.argmax(fs[1:]))
                sim[w] = x_ext
                fs[w] = f_ext
                cur_x, cur_f = x_ext, f_ext
            anchor = base
            if actual >= _EXPAND_THRESHOLD * predicted:
                rho = min(2.0 * rho, cfg.rho_begin)
        else:
            j = 1 + int(np.argmax(dists))  # recycle the point, refreshing the stalest vertex
            sim[j] = x_star
            fs[j] = f_star
            if not at_floor:
                rho = max(0.5 * rho, cfg.rho_end)
            else:
                floor_fails += 1
                if floor_fails >= _FLOOR_PATIENCE:
                    if restarts < _MAX_RESTARTS:
                        restarts += 1
                        floor_fails = 0
                        before = tr.evals
                        sim, fs = _fresh_simplex(tr, sim[0].copy(), fs[0], rho)
                        init += tr.evals - before
                    else:
                        converged = True
                        break

    return _finish(
        tr, f0, converged,
        init_evals=init, trust_steps=trust, geometry_steps=geom, pattern_steps=pattern,
    )


def nelder_mead_minimize(obj: ObjectiveHandle, x0, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Standard simplex search with reflection/expansion/contraction/shrink
    coefficients (1, 2, 0.5, 0.5); stops when the simplex diameter falls below
    rho_end or the budget runs out.
    """
    x0 = np.array(x0, dtype=float)
    budget = _budget(obj, cfg)
    _check_start(obj, x0, budget)
    n = obj.arity

    tr = _Tracker(obj, budget)
    f0 = tr(x0)
    sim, fs = _fresh_simplex(tr, x0, f0, cfg.rho_begin)
    converged = False

    while tr.evals < budget:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if np.max(np.linalg.norm(sim[1:] - sim[0], axis=1)) < cfg.rho_end:
            converged = True
            break

        centroid = sim[:-1].mean(axis=0)
        x_r = centroid + (centroid - sim[-1])
        f_r = tr(x_r)
        if f_r < fs[0]:
            if tr.evals >= budget:
                break
            x_e = centroid + 2.0 * (centroid - sim[-1])
            f_e = tr(x_e)
            sim[-1], fs[-1] = (x_e, f_e) if f_e < f_r else (x_r, f_r)
        elif f_r < fs[-2]:
            sim[-1], fs[-1] = x_r, f_r
        else:
            if tr.evals >= budget:
                break
            if f_r < fs[-1]:  # outside contraction
                x_c = centroid + 0.5 * (centroid - sim[-1])
                f_c = tr(x_c)
                accepted = f_c <= f_r
            else:  # inside contraction
                x_c = centroid - 0.5 * (centroid - sim[-1])
                f_c = tr(x_c)
                accepted = f_c < fs[-1]
            if accepted:
                sim[-1], fs[-1] = x_c, f_c
            else:  # shrink toward the best vertex
                for i in range(1, n + 1):
                    if tr.evals >= budget:
                        break
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fs[i] = tr(sim[i])

    return _finish(tr, f0, converged, init_evals=n + 1)
