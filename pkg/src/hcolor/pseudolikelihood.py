"""Log pseudo-likelihood, its derivatives, and single-sample estimators.

The normalized log pseudo-likelihood of activities ``b`` given a valid
configuration is the average over vertices of the log conditional probability
of the observed color. Its gradient component r is::

    count_r / n  -  (1/n) * sum_u  exp(b_r) 1{r allowed at u}
                                   / sum_s exp(b_s) 1{s allowed at u}

and the negated Hessian is an average of multinomial covariance matrices, one
per vertex, built from the allowed-color softmax probabilities. That negated
Hessian is positive semidefinite with largest eigenvalue below 1, so plain
gradient ascent with unit step converges whenever the fit is non-degenerate.

For the two-color occupancy model the maximizer is available in closed form:
log of (occupied count / recolorable empty-site count).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import Graph
from .model import ConstraintGraph, allowed_matrix, preset, require_valid

__all__ = [
    "PLState",
    "log_pl",
    "pl_gradient",
    "pl_hessian",
    "mpl_hardcore",
    "mpl_fit",
    "min_eigenvalue_neg_hessian",
    "symmetric_eigenvalues",
    "EstimateReport",
    "report_to_json",
    "DEGENERATE_NONE",
    "DEGENERATE_NEG",
    "DEGENERATE_POS",
    "FREEZE_BOUND",
]

DEGENERATE_NONE = ""
DEGENERATE_NEG = "-inf"
DEGENERATE_POS = "+inf"

# A coordinate drifting past this magnitude under gradient ascent is treated
# as diverging and frozen with the matching infinity flag.
FREEZE_BOUND = 40.0

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000


@dataclass
class PLState:
    """Per-configuration precomputation shared by all pseudo-likelihood calls.

    ``allowed[u, s]`` says recoloring vertex u to color s keeps the
    configuration valid; every row of a valid configuration is nonempty.
    """

    colors: np.ndarray
    allowed: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_configuration(cls, cfg, g: Graph, h: ConstraintGraph) -> "PLState":
        colors = require_valid(cfg, g, h)
        allowed = allowed_matrix(colors, g, h)
        counts = np.bincount(colors, minlength=h.q)
        return cls(colors=colors, allowed=allowed, counts=counts)

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    @property
    def q(self) -> int:
        return self.allowed.shape[1]

    def unconstrained(self) -> np.ndarray:
        return self.allowed.sum(axis=0)


def _full_params(b, q: int) -> np.ndarray:
    arr = np.asarray(b, dtype=np.float64).reshape(-1)
    if arr.shape != (q - 1,):
        raise ParameterError(f"parameters must have length q-1={q - 1}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("parameters must be finite")
    return np.concatenate([[0.0], arr])


def _theta(state: PLState, b_full: np.ndarray) -> np.ndarray:
    """(n, q) allowed-color softmax probabilities per vertex, overflow-safe."""
    scores = np.where(state.allowed, b_full[None, :], -np.inf)
    m = scores.max(axis=1, keepdims=True)
    w = np.exp(scores - m)
    return w / w.sum(axis=1, keepdims=True)


def log_pl(cfg, g: Graph, h: ConstraintGraph, b) -> float:
    """Normalized log pseudo-likelihood at activities b (length q-1)."""
    state = PLState.from_configuration(cfg, g, h)
    return _log_pl(state, _full_params(b, h.q))


def _log_pl(state: PLState, b_full: np.ndarray) -> float:
    scores = np.where(state.allowed, b_full[None, :], -np.inf)
    m = scores.max(axis=1)
    log_norm = m + np.log(np.exp(scores - m[:, None]).sum(axis=1))
    return float((b_full[state.colors] - log_norm).mean())


def pl_gradient(cfg, g: Graph, h: ConstraintGraph, b) -> np.ndarray:
    """Gradient of the normalized log pseudo-likelihood; each entry in [-1, 1]."""
    state = PLState.from_configuration(cfg, g, h)
    return _gradient(state, _full_params(b, h.q))


def _gradient(state: PLState, b_full: np.ndarray) -> np.ndarray:
    theta = _theta(state, b_full)
    return state.counts[1:] / state.n - theta[:, 1:].mean(axis=0)


def pl_hessian(cfg, g: Graph, h: ConstraintGraph, b) -> np.ndarray:
    """(q-1, q-1) Hessian of the normalized log pseudo-likelihood.

    Equals minus the average of per-vertex multinomial covariance matrices
    diag(p_u) - p_u p_u^T over the allowed-color probabilities p_u, hence is
    symmetric negative semidefinite everywhere.
    """
    state = PLState.from_configuration(cfg, g, h)
    return _hessian(state, _full_params(b, h.q))


def _hessian(state: PLState, b_full: np.ndarray) -> np.ndarray:
    t = _theta(state, b_full)[:, 1:]
    neg = np.diag(t.sum(axis=0)) - t.T @ t
    return -neg / state.n


# ---------------------------------------------------------------------------
# Eigenvalues by cyclic Jacobi rotations (matrices here are (q-1) x (q-1))
# ---------------------------------------------------------------------------


def symmetric_eigenvalues(a: np.ndarray, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix, ascending, via cyclic Jacobi."""
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError("matrix must be square")
    if not np.allclose(a, a.T, atol=1e-12, rtol=0.0):
        raise ParameterError("matrix must be symmetric")
    m = a.shape[0]
    if m == 1:
        return a[0, :1].copy()
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for r in range(p + 1, m):
                apr = a[p, r]
                off = max(off, abs(apr))
                if abs(apr) <= 1e-300:
                    continue
                diff = a[r, r] - a[p, p]
                phi = 0.5 * np.arctan2(2.0 * apr, diff)
                c, s = np.cos(phi), np.sin(phi)
                rot_p = c * a[:, p] - s * a[:, r]
                rot_r = s * a[:, p] + c * a[:, r]
                a[:, p], a[:, r] = rot_p, rot_r
                rot_p = c * a[p, :] - s * a[r, :]
                rot_r = s * a[p, :] + c * a[r, :]
                a[p, :], a[r, :] = rot_p, rot_r
        if off <= 1e-15 * scale:
            break
    return np.sort(np.diag(a))


def min_eigenvalue_neg_hessian(cfg, g: Graph, h: ConstraintGraph, b) -> float:
    """Smallest eigenvalue of the negated Hessian; clamped at 0 since the
    matrix is positive semidefinite in exact arithmetic."""
    lam = symmetric_eigenvalues(-pl_hessian(cfg, g, h, b))[0]
    return max(float(lam), 0.0)


# ---------------------------------------------------------------------------
# Reports and estimators
# ---------------------------------------------------------------------------


@dataclass
class EstimateReport:
    """Fit output: estimates, convergence info, and degeneracy diagnostics.

    ``beta_hat`` may contain +/-inf where the corresponding ``degenerate``
    flag is set ("-inf" when the color never occurs, "+inf" when it has no
    recolorable slack). ``rainbow_fractions[r-1]`` is the fraction of vertices
    where color r is allowed, the quantity controlling curvature of the fit.
    """

    beta_hat: np.ndarray
    iterations: int
    final_gradient_norm: float | None
    min_eigenvalue_neg_hessian_at_fit: float | None
    degenerate: tuple[str, ...]
    rainbow_fractions: np.ndarray
    rank_deficient: bool = False

    @property
    def is_degenerate(self) -> bool:
        return any(flag != DEGENERATE_NONE for flag in self.degenerate)


def report_to_json(report: EstimateReport) -> str:
    def enc(x: float):
        if np.isfinite(x):
            return float(x)
        return DEGENERATE_POS if x > 0 else DEGENERATE_NEG

    payload = {
        "beta_hat": [enc(v) for v in report.beta_hat],
        "degenerate": list(report.degenerate),
        "iterations": report.iterations,
        "grad_norm": report.final_gradient_norm,
        "lambda_min": report.min_eigenvalue_neg_hessian_at_fit,
        "rainbow_fractions": [float(v) for v in report.rainbow_fractions],
    }
    return json.dumps(payload, sort_keys=True)


def mpl_hardcore(cfg, g: Graph) -> EstimateReport:
    """Closed-form maximum pseudo-likelihood estimate for the two-color
    occupancy model.

    With c = number of occupied vertices and u = number of empty vertices
    whose whole neighborhood is empty, the estimate is log(c / u). c = 0 gives
    a -inf flag, u = 0 a +inf flag.
    """
    h = preset("hardcore")
    state = PLState.from_configuration(cfg, g, h)
    c = int(state.counts[1])
    allowed_1 = int(state.allowed[:, 1].sum())
    u = allowed_1 - c  # empty vertices whose neighborhoods are empty
    rainbow = np.array([allowed_1 / state.n])
    if c > 0 and u > 0:
        beta = math.log(c / u)
        grad = _gradient(state, np.array([0.0, beta]))
        lam = max(float(-_hessian(state, np.array([0.0, beta]))[0, 0]), 0.0)
        return EstimateReport(
            beta_hat=np.array([beta]),
            iterations=0,
            final_gradient_norm=float(np.abs(grad).max()),
            min_eigenvalue_neg_hessian_at_fit=lam,
            degenerate=(DEGENERATE_NONE,),
            rainbow_fractions=rainbow,
        )
    flag = DEGENERATE_NEG if c == 0 else DEGENERATE_POS
    value = -np.inf if c == 0 else np.inf
    return EstimateReport(
        beta_hat=np.array([value]),
        iterations=0,
        final_gradient_norm=None,
        min_eigenvalue_neg_hessian_at_fit=None,
        degenerate=(flag,),
        rainbow_fractions=rainbow,
    )


def mpl_fit(
    cfg,
    g: Graph,
    h: ConstraintGraph,
    init=None,
    step: float = 1.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EstimateReport:
    """Maximum pseudo-likelihood fit by gradient ascent with fixed step.

    Iterates ``b <- b + step * gradient(b)`` until the sup-norm of the
    gradient over non-frozen coordinates drops below ``tol``. Unit step is
    safe because the negated Hessian's spectrum lies in [0, 1].

    Diverging components are detected structurally before iterating: a color
    that never occurs has its maximizer at -inf, and a color that is allowed
    only at its own (not individually forced) vertices has it at +inf. Such
    coordinates are flagged, pinned at +/-FREEZE_BOUND (numerically
    indistinguishable from the limit), and excluded from the convergence
    test; a coordinate that still wanders past the bound during iteration is
    frozen the same way.
    """
    state = PLState.from_configuration(cfg, g, h)
    q = h.q
    if init is None:
        b = np.zeros(q - 1)
    else:
        b = np.asarray(init, dtype=np.float64).reshape(-1).copy()
        if b.shape != (q - 1,) or not np.all(np.isfinite(b)):
            raise ParameterError("init must be a finite vector of length q-1")
    if step <= 0:
        raise ParameterError("step must be positive")
    flags = [DEGENERATE_NONE] * (q - 1)
    free = np.ones(q - 1, dtype=bool)
    counts = state.counts[1:]
    uncon = state.unconstrained()[1:]
    row_choices = state.allowed.sum(axis=1)
    for r in range(q - 1):
        if counts[r] == 0:
            flags[r] = DEGENERATE_NEG
            b[r] = -FREEZE_BOUND
            free[r] = False
        elif uncon[r] == counts[r]:
            # color r+1 has no slack: allowed exactly at its own vertices
            unforced = np.any((state.colors == r + 1) & (row_choices > 1))
            if unforced:
                flags[r] = DEGENERATE_POS
                b[r] = FREEZE_BOUND
                free[r] = False
            # all its vertices forced: that coordinate's gradient vanishes
            # identically and the fit reduces to the forced-model case
    iterations = 0
    grad_norm = 0.0
    for _ in range(max_iter):
        grad = _gradient(state, np.concatenate([[0.0], b]))
        grad_norm = float(np.abs(grad[free]).max()) if free.any() else 0.0
        if grad_norm <= tol:
            break
        b[free] += step * grad[free]
        iterations += 1
        newly_neg = free & (b < -FREEZE_BOUND)
        newly_pos = free & (b > FREEZE_BOUND)
        for r in np.flatnonzero(newly_neg):
            flags[r] = DEGENERATE_NEG
            b[r] = -FREEZE_BOUND
        for r in np.flatnonzero(newly_pos):
            flags[r] = DEGENERATE_POS
            b[r] = FREEZE_BOUND
        free &= ~(newly_neg | newly_pos)

    b_full = np.concatenate([[0.0], b])
    lam = max(float(symmetric_eigenvalues(-_hessian(state, b_full))[0]), 0.0)
    beta_hat = b.copy()
    for r, flag in enumerate(flags):
        if flag == DEGENERATE_NEG:
            beta_hat[r] = -np.inf
        elif flag == DEGENERATE_POS:
            beta_hat[r] = np.inf
    return EstimateReport(
        beta_hat=beta_hat,
        iterations=iterations,
        final_gradient_norm=grad_norm,
        min_eigenvalue_neg_hessian_at_fit=lam,
        degenerate=tuple(flags),
        rainbow_fractions=state.unconstrained()[1:] / state.n,
        rank_deficient=lam <= 1e-12,
    )
