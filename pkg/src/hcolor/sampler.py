"""Single-site heat-bath dynamics, feasibility search, and exact oracles.

The update rule resamples one uniformly chosen vertex from its exact
conditional distribution given the rest of the configuration, so every step
preserves validity and the valid-configuration law with the model's weights is
stationary. One *sweep* performs n independent uniform vertex picks.

Caveat: for some hard-constraint models the single-site chain is not
irreducible (e.g. the six proper 3-colorings of a triangle are all frozen).
Use :func:`is_glauber_irreducible` to check enumerable instances before
trusting distributional output; larger instances inherit whatever sector the
initial configuration lies in.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    EnumerationCapError,
    FeasibilityUnknownError,
    InfeasibleModelError,
    ParameterError,
)
from .graphs import Graph
from .model import ConstraintGraph, Model, allowed_matrix, require_valid

__all__ = [
    "conditional_distribution",
    "find_valid_configuration",
    "Chain",
    "glauber_sweep",
    "sample",
    "sample_many",
    "default_burn_in",
    "ExactSummary",
    "enumerate_exact",
    "tv_distance_empirical",
    "is_glauber_irreducible",
    "max_detailed_balance_violation",
    "DEFAULT_STATE_CAP",
]

DEFAULT_STATE_CAP = 20_000_000
DEFAULT_SEARCH_BUDGET = 1_000_000


def default_burn_in(n: int) -> int:
    """Default burn-in sweeps: 200 * ceil(log(n + 1)).

    A tested-at-desk-scale heuristic, not a mixing-time guarantee; acceptance
    checks always compare against the exact law where enumeration is feasible.
    """
    return 200 * math.ceil(math.log(n + 1))


# ---------------------------------------------------------------------------
# Conditional law of a single site
# ---------------------------------------------------------------------------


def conditional_distribution(u: int, cfg, model: Model) -> np.ndarray:
    """Probability of each color at vertex u given all other coordinates.

    Color r gets weight exp(beta_r) when all neighbor colors of u lie in the
    constraint-neighborhood of r, and weight 0 otherwise. The support is never
    empty for a valid configuration (the current color qualifies). Computed
    with a shifted softmax so large |beta| cannot overflow.
    """
    colors = require_valid(cfg, model.graph, model.h)
    ok = np.ones(model.q, dtype=bool)
    for v in model.graph.adjacency[u]:
        ok &= model.h.allow_matrix[:, colors[v]]
    shifted = model.beta_full - model.beta_full[ok].max()
    w = np.where(ok, np.exp(shifted), 0.0)
    return w / w.sum()


# ---------------------------------------------------------------------------
# Feasibility: backtracking search for a valid configuration
# ---------------------------------------------------------------------------


def find_valid_configuration(
    g: Graph,
    h: ConstraintGraph,
    seed: int = 0,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> np.ndarray:
    """Return some valid configuration, deterministically for a given seed.

    Constant colorings are tried first (cheap and always valid when the color
    has a self-loop), then an iterative backtracking search with seeded color
    orderings. Raises :class:`InfeasibleModelError` if the search tree is
    exhausted and :class:`FeasibilityUnknownError` if ``budget`` node
    expansions were spent first.
    """
    n, q = g.n, h.q
    has_edges = g.edge_count() > 0
    for s in range(q):
        if not has_edges or h.allows(s, s):
            return np.full(n, s, dtype=np.int64)

    rng = np.random.default_rng(seed)
    color_order = np.stack([rng.permutation(q) for _ in range(n)])
    back_nbrs = [tuple(v for v in g.adjacency[u] if v < u) for u in range(n)]
    colors = np.full(n, -1, dtype=np.int64)
    choice = np.zeros(n, dtype=np.int64)  # next color-order index to try per depth
    allow = h.allow_matrix
    expansions = 0
    depth = 0
    while True:
        if depth == n:
            return colors.copy()
        advanced = False
        while choice[depth] < q:
            s = color_order[depth, choice[depth]]
            choice[depth] += 1
            expansions += 1
            if expansions > budget:
                raise FeasibilityUnknownError(
                    f"search budget of {budget} expansions exhausted; feasibility unknown"
                )
            if all(allow[s, colors[v]] for v in back_nbrs[depth]):
                colors[depth] = s
                depth += 1
                if depth < n:
                    choice[depth] = 0
                advanced = True
                break
        if advanced:
            continue
        colors[depth] = -1
        depth -= 1
        if depth < 0:
            raise InfeasibleModelError("no valid configuration exists")


# ---------------------------------------------------------------------------
# Vectorized multi-replicate update engine
# ---------------------------------------------------------------------------

_RNG_CHUNK = 1024  # steps of randomness drawn per batch
_MASK_TABLE_MAX_Q = 12  # cumulative-weight tables are 2**q rows


class _Engine:
    """Shared single-site update engine over R replicate rows.

    ``colors`` has shape (R, n+1); the final column permanently holds the
    sentinel color q, paired with the padded adjacency so ragged neighbor
    lists vectorize. Each replicate row consumes its own vertex picks and
    uniforms, so replicates are mutually independent (rows may even carry
    different activity vectors).

    For q <= 12 the allowed set at a vertex is folded into a bitmask
    (AND-reduction of per-neighbor-color masks) that indexes a precomputed
    table of cumulative color weights, which keeps the per-step numpy work to
    a handful of small 1-D gathers.
    """

    def __init__(self, model: Model, beta_rows: np.ndarray | None, replicates: int):
        q = model.q
        self.n = model.n
        self.pad = model.graph.padded_adjacency()
        weights = self._weights(model, beta_rows, replicates)  # (R, q)
        self.allow_ext = np.ones((q, q + 1), dtype=bool)
        self.allow_ext[:, :q] = model.h.allow_matrix
        self.wts_qr = weights.T.copy()
        groups, inverse = np.unique(weights, axis=0, return_inverse=True)
        # table size is (distinct activity rows) * 2**q * q entries
        self.use_masks = q <= _MASK_TABLE_MAX_Q and groups.shape[0] << q <= 1 << 22
        if not self.use_masks:
            return
        # bit s of nbr_mask[t]: color s tolerates neighbor color t
        full = (1 << q) - 1
        self.nbr_mask = np.full(q + 1, full, dtype=np.uint16)
        for t in range(q):
            bits = 0
            for s in range(q):
                if model.h.allow_matrix[s, t]:
                    bits |= 1 << s
            self.nbr_mask[t] = bits
        bits = (np.arange(1 << q)[:, None] >> np.arange(q)[None, :]) & 1  # (2**q, q)
        tables = np.cumsum(groups[:, None, :] * bits[None, :, :], axis=2)  # (G, 2**q, q)
        self.cum_flat = tables.reshape(-1, q)
        self.group_offset = inverse.reshape(-1).astype(np.int64) << q

    @staticmethod
    def _weights(model: Model, beta_rows: np.ndarray | None, replicates: int) -> np.ndarray:
        if beta_rows is None:
            full = np.tile(model.beta_full, (replicates, 1))
        else:
            rows = np.asarray(beta_rows, dtype=np.float64)
            if rows.shape != (replicates, model.q - 1):
                raise ParameterError("beta_rows must have shape (replicates, q-1)")
            full = np.concatenate([np.zeros((replicates, 1)), rows], axis=1)
        shifted = full - full.max(axis=1, keepdims=True)
        return np.exp(shifted)

    def run(self, colors: np.ndarray, steps: int, rng: np.random.Generator) -> None:
        R = colors.shape[0]
        n = self.n
        row_base = np.arange(R, dtype=np.int64) * (n + 1)
        flat = colors.reshape(-1)
        done = 0
        while done < steps:
            block = min(_RNG_CHUNK, steps - done)
            picks = rng.integers(0, n, size=(block, R))
            unis = rng.random((block, R))
            sites = picks + row_base[None, :]
            if self.use_masks:
                self._run_masked(flat, colors, block, picks, sites, unis, row_base)
            else:
                self._run_general(colors, block, picks, unis)
            done += block

    def _run_masked(self, flat, colors, block, picks, sites, unis, row_base):
        pad, nbr_mask, cum_flat, goff = self.pad, self.nbr_mask, self.cum_flat, self.group_offset
        for k in range(block):
            nb = np.take(pad, picks[k], axis=0)  # (R, dmax)
            ncol = flat.take(nb + row_base[:, None])
            if ncol.shape[1]:
                mask = np.bitwise_and.reduce(nbr_mask.take(ncol), axis=1)
            else:
                mask = nbr_mask.take(np.full(ncol.shape[0], self.allow_ext.shape[0]))
            cum = cum_flat[goff + mask]  # (R, q)
            target = unis[k] * cum[:, -1]
            flat[sites[k]] = (cum < target[:, None]).sum(axis=1)

    def _run_general(self, colors, block, picks, unis):
        R = colors.shape[0]
        rows = np.arange(R)
        for k in range(block):
            u = picks[k]
            ncol = colors[rows[:, None], self.pad[u]]  # (R, dmax)
            ok = self.allow_ext[:, ncol].all(axis=2)  # (q, R)
            w = self.wts_qr * ok
            cum = np.cumsum(w, axis=0)
            target = unis[k] * cum[-1]
            colors[rows, u] = (cum < target).sum(axis=0)


# ---------------------------------------------------------------------------
# Chains and sampling entry points
# ---------------------------------------------------------------------------


class Chain:
    """Single-owner mutable heat-bath chain over one model.

    The current configuration is valid after every step, and the triple
    (model, seed, sweeps_done) determines the state bit-for-bit.
    """

    def __init__(self, model: Model, seed: int = 0, start=None):
        self.model = model
        if start is None:
            start = find_valid_configuration(model.graph, model.h, seed=seed)
        start = require_valid(start, model.graph, model.h)
        self._colors = np.ascontiguousarray(np.append(start, model.q)[None, :], dtype=np.int64)
        self._rng = np.random.default_rng(seed)
        self._engine = _Engine(model, None, 1)
        self.sweeps_done = 0

    @property
    def current(self) -> np.ndarray:
        return self._colors[0, :-1].copy()

    def sweep(self, count: int = 1) -> "Chain":
        """Perform ``count`` sweeps of n uniform single-site updates each."""
        if count < 0:
            raise ParameterError("sweep count must be nonnegative")
        if count:
            self._engine.run(self._colors, count * self.model.n, self._rng)
            self.sweeps_done += count
        return self


def glauber_sweep(chain: Chain) -> Chain:
    """One sweep (n uniform vertex resamplings); returns the same chain."""
    return chain.sweep(1)


def sample(model: Model, burn_in_sweeps: int | None = None, seed: int = 0) -> np.ndarray:
    """One configuration after burn-in from a fresh chain. Deterministic per seed."""
    if burn_in_sweeps is None:
        burn_in_sweeps = default_burn_in(model.n)
    return Chain(model, seed=seed).sweep(burn_in_sweeps).current


def sample_many(
    model: Model,
    replicates: int,
    burn_in_sweeps: int | None = None,
    seed=0,
    start=None,
    beta_rows: np.ndarray | None = None,
) -> np.ndarray:
    """(replicates, n) array of independently evolved chains from one start.

    All chains begin at the same configuration (found per ``seed`` when
    ``start`` is omitted) and consume disjoint randomness. ``beta_rows``
    optionally overrides the model activities per replicate, which lets
    experiments batch several parameter settings through one engine run;
    rows with different activities remain mutually independent.
    """
    if replicates < 0:
        raise ParameterError("replicates must be nonnegative")
    if burn_in_sweeps is None:
        burn_in_sweeps = default_burn_in(model.n)
    if start is None:
        base_seed = seed if isinstance(seed, (int, np.integer)) else 0
        start = find_valid_configuration(model.graph, model.h, seed=int(base_seed))
    start = require_valid(start, model.graph, model.h)
    if replicates == 0:
        return np.empty((0, model.n), dtype=np.int64)
    colors = np.ascontiguousarray(np.tile(np.append(start, model.q), (replicates, 1)), dtype=np.int64)
    rng = np.random.default_rng(seed)
    engine = _Engine(model, beta_rows, replicates)
    engine.run(colors, burn_in_sweeps * model.n, rng)
    return colors[:, :-1]


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


@dataclass
class ExactSummary:
    """Exact finite-model summary from full enumeration.

    ``state_probabilities`` maps each valid configuration (as a tuple) to its
    probability; ``expected_counts[r]`` and ``expected_unconstrained[r]`` are
    the exact means of the color counts and the allowed-at counts.
    """

    log_partition: float
    state_probabilities: dict[tuple[int, ...], float]
    expected_counts: np.ndarray
    expected_unconstrained: np.ndarray


def _enumerate_states(g: Graph, h: ConstraintGraph, cap: int) -> list[np.ndarray]:
    n, q = g.n, h.q
    back_nbrs = [tuple(v for v in g.adjacency[u] if v < u) for u in range(n)]
    allow = h.allow_matrix
    colors = np.zeros(n, dtype=np.int64)
    out: list[np.ndarray] = []
    expansions = 0
    depth = 0
    nxt = np.zeros(n + 1, dtype=np.int64)
    while depth >= 0:
        if depth == n:
            out.append(colors.copy())
            depth -= 1
            continue
        placed = False
        while nxt[depth] < q:
            s = nxt[depth]
            nxt[depth] += 1
            expansions += 1
            if expansions > cap:
                raise EnumerationCapError(
                    f"enumeration exceeded the cap of {cap} node expansions"
                )
            if all(allow[s, colors[v]] for v in back_nbrs[depth]):
                colors[depth] = s
                depth += 1
                nxt[depth] = 0
                placed = True
                break
        if not placed:
            depth -= 1
    return out


def enumerate_exact(model: Model, state_cap: int = DEFAULT_STATE_CAP) -> ExactSummary:
    """Exact law of the model by pruned backtracking over partial colorings.

    ``state_cap`` bounds node expansions, not raw q**n, so structured graphs
    far beyond brute force (e.g. a clique forcing the rest) still enumerate.
    """
    states = _enumerate_states(model.graph, model.h, state_cap)
    if not states:
        raise InfeasibleModelError("no valid configuration exists")
    log_w = np.array([model.beta_full[s].sum() for s in states])
    m = log_w.max()
    z = np.exp(log_w - m)
    log_partition = float(m + np.log(z.sum()))
    probs = z / z.sum()
    q = model.q
    counts = np.zeros(q)
    uncon = np.zeros(q)
    table: dict[tuple[int, ...], float] = {}
    for st, p in zip(states, probs):
        table[tuple(int(c) for c in st)] = float(p)
        counts += p * np.bincount(st, minlength=q)
        uncon += p * allowed_matrix(st, model.graph, model.h).sum(axis=0)
    return ExactSummary(log_partition, table, counts, uncon)


# ---------------------------------------------------------------------------
# Diagnostics against the exact law
# ---------------------------------------------------------------------------


def tv_distance_empirical(
    model: Model, sweeps: int, replicates: int, seed: int = 0
) -> float:
    """Total-variation distance between the empirical law of independent
    chains (all started from one fixed configuration) and the exact law."""
    summary = enumerate_exact(model)
    start = find_valid_configuration(model.graph, model.h, seed=seed)
    draws = sample_many(model, replicates, burn_in_sweeps=sweeps, seed=seed, start=start)
    freq = Counter(tuple(int(c) for c in row) for row in draws)
    tv = 0.0
    for state, p in summary.state_probabilities.items():
        tv += abs(freq.get(state, 0) / replicates - p)
    return 0.5 * tv


def is_glauber_irreducible(model: Model, summary: ExactSummary | None = None) -> bool:
    """Check by explicit reachability that single-site moves connect the
    enumerated state space."""
    if summary is None:
        summary = enumerate_exact(model)
    states = list(summary.state_probabilities)
    index = {s: i for i, s in enumerate(states)}
    allow = model.h.allow_matrix
    adjacency = model.graph.adjacency
    seen = {0}
    stack = [0]
    while stack:
        s_idx = stack.pop()
        state = states[s_idx]
        for u in range(model.n):
            ok = np.ones(model.q, dtype=bool)
            for v in adjacency[u]:
                ok &= allow[:, state[v]]
            for color in np.flatnonzero(ok):
                if color == state[u]:
                    continue
                nxt = index[state[:u] + (int(color),) + state[u + 1 :]]
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(seen) == len(states)


def max_detailed_balance_violation(
    model: Model, summary: ExactSummary | None = None
) -> float:
    """Max |P(s) K(s->t) - P(t) K(t->s)| over single-site transition pairs,
    with K assembled from the conditional distributions."""
    if summary is None:
        summary = enumerate_exact(model)
    states = list(summary.state_probabilities)
    probs = summary.state_probabilities
    n = model.n
    worst = 0.0
    for state in states:
        p_s = probs[state]
        arr = np.asarray(state, dtype=np.int64)
        for u in range(n):
            dist = conditional_distribution(u, arr, model)
            for color, pr in enumerate(dist):
                if pr == 0.0 or color == state[u]:
                    continue
                other = state[:u] + (color,) + state[u + 1 :]
                # conditional at u is shared by both endpoints of the move
                flow = p_s * pr / n
                back = probs[other] * dist[state[u]] / n
                worst = max(worst, abs(flow - back))
    return worst
