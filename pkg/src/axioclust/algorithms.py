"""Alternating clustering: a generic model/partition loop and five instances.

Every algorithm here returns a :class:`ClusteringResult` whose partition was
produced from the returned model by the algorithm's own affinity map, so the
categorization equivalency check can be run against it directly.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .categorization import (
    ClusteringResult,
    Exemplar,
    GaussianModel,
    Multinomial,
    Prototype,
    check_categorization_equivalency,
    density,
    max_link,
    sq_euclidean,
    squared_distances,
    weighted_gaussian,
    weighted_multinomial,
)
from .criteria import sample_weighted_objective
from .data import DataSet, Partition
from .exceptions import AxioclustError, ConfigurationError, DomainError, IngestError, IterationError

log = logging.getLogger(__name__)

INITS = ("sample", "random-partition", "farthest")
THETA_SMOOTHING = 0.1
THETA_FLOOR = 1e-300


@dataclass(frozen=True)
class AlgoConfig:
    """Run settings shared by the iterative algorithms.

    ``init=None`` picks the algorithm's default initialisation.
    """

    c: int
    max_iter: int = 300
    tol: float = 1e-9
    seed: int = 0
    init: Optional[str] = None
    m: float = 2.0
    beta: float = 1.0
    sigma: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if int(self.c) < 1:
            raise DomainError("c must be at least 1")
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be at least 1")
        if not self.tol > 0:
            raise DomainError("the convergence tolerance must be positive")
        if self.init is not None and self.init not in INITS:
            raise DomainError(f"unknown init {self.init!r}; choose from {INITS}")
        for name in ("beta", "sigma", "kappa"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def as_dict(self):
        return asdict(self)


def run_framework(data: DataSet, cfg: AlgoConfig, step_model: Callable, step_partition: Callable,
                  objective: Callable, initial, *, affinity, kind: str,
                  initial_model=None, membership: Callable = None, monitor: Callable = None,
                  algorithm: str = "custom", meta: dict = None) -> ClusteringResult:
    """Alternate ``step_model`` and ``step_partition`` until the objective settles.

    ``initial`` is the starting partition state.  Each sweep computes
    ``model = step_model(state)`` then ``state = step_partition(model)`` and
    records ``objective(model, state)``.  The loop stops once two consecutive
    values differ by at most ``cfg.tol`` (the value at ``initial_model``, when
    given, counts as the first) or after ``cfg.max_iter`` sweeps.

    The state may carry more than the membership matrix; ``membership(state)``
    extracts the ``c x n`` array (identity by default).
    """
    membership = membership or (lambda s: s)
    state = initial
    prev = objective(initial_model, initial) if initial_model is not None else None
    trace = []
    model = initial_model
    converged = False
    for it in range(1, int(cfg.max_iter) + 1):
        try:
            model = step_model(state)
            state = step_partition(model)
            value = float(objective(model, state))
        except (AxioclustError, ValueError, FloatingPointError) as exc:
            raise IterationError(str(exc), it) from exc
        if not np.isfinite(value):
            raise IterationError(f"objective is not finite ({value})", it)
        trace.append(value)
        if monitor is not None:
            monitor(it, model, state)
        if prev is not None and abs(value - prev) <= cfg.tol:
            converged = True
            break
        prev = value
    U = membership(state)
    partition = Partition(U, kind)
    info = {"algorithm": algorithm}
    info.update(meta or {})
    R = ClusteringResult(data, model, partition, affinity, tuple(trace), cfg.seed,
                         len(trace), converged, info)
    R.meta["equivalency"] = check_categorization_equivalency(partition, R.table).holds
    return R


# --- initialisation helpers --------------------------------------------------

def _rng(cfg):
    return np.random.default_rng(cfg.seed)


def _distinct_objects(X, c, rng):
    """Indices of ``c`` objects with pairwise different feature rows."""
    _, first = np.unique(X, axis=0, return_index=True)
    if first.size >= c:
        return np.sort(rng.choice(np.sort(first), size=c, replace=False))
    log.warning("only %d distinct objects for c=%d; prototypes will coincide", first.size, c)
    picked = list(np.sort(first))
    picked += list(rng.choice(X.shape[0], size=c - len(picked), replace=True))
    return np.asarray(picked)


def _farthest_first(dissim_to, n, c, rng):
    """Seed one random object, then repeatedly the object least served by the seeds.

    ``dissim_to(idx)`` returns an (len(idx), n) array of dissimilarities from
    the chosen seeds to every object.  Ties are broken at random.
    """
    chosen = [int(rng.integers(n))]
    while len(chosen) < c:
        d = dissim_to(np.asarray(chosen)).min(axis=0)
        d[chosen] = -np.inf
        best = np.flatnonzero(d == d.max())
        chosen.append(int(rng.choice(best)))
    return np.asarray(chosen)


def _random_labels(n, c, rng):
    labels = rng.integers(0, c, size=n)
    labels[rng.permutation(n)[:c]] = np.arange(c)
    return labels


def _onehot(labels, c):
    U = np.zeros((c, labels.size))
    U[labels, np.arange(labels.size)] = 1.0
    return U


def _initial_prototypes(X, cfg, rng, default="sample"):
    init = cfg.init or default
    if init == "farthest":
        idx = _farthest_first(lambda s: squared_distances(X, X[s]), X.shape[0], cfg.c, rng)
    else:
        idx = _distinct_objects(X, cfg.c, rng)
    return X[idx].copy(), idx


def _means_with_repair(X, labels, c):
    """Cluster means; an empty cluster takes the object farthest from its nearest prototype."""
    V = np.zeros((c, X.shape[1]))
    counts = np.bincount(labels, minlength=c)
    for i in range(c):
        if counts[i]:
            V[i] = X[labels == i].mean(axis=0)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        filled = list(np.flatnonzero(counts > 0))
        for i in empty:
            d = squared_distances(X, V[filled]).min(axis=0)
            V[i] = X[int(np.argmax(d))]
            filled.append(i)
    return V, empty


# --- hard prototype algorithms -----------------------------------------------

def _hard_prototype_run(data, cfg, *, name, make_model, score, objective_fn, affinity):
    X = data.require("features")
    c = int(cfg.c)
    if c > data.n:
        raise DomainError(f"c={c} exceeds the number of objects n={data.n}")
    rng = _rng(cfg)
    repairs = []

    def step_model(U):
        V, empty = _means_with_repair(X, np.argmax(U, axis=0), c)
        if empty.size:
            repairs.append([int(i) for i in empty])
        return make_model(V)

    def step_partition(model):
        return _onehot(np.argmax(score(model), axis=0), c)

    init = cfg.init or "sample"
    if init == "random-partition":
        U0, model0 = _onehot(_random_labels(data.n, c, rng), c), None
    else:
        V0, _ = _initial_prototypes(X, cfg, rng)
        model0 = make_model(V0)
        U0 = step_partition(model0)
    history = [np.argmax(U0, axis=0).tolist()]

    def monitor(it, model, U):
        history.append(np.argmax(U, axis=0).tolist())

    # keys starting with "_" stay out of serialised reports
    return run_framework(data, cfg, step_model, step_partition, objective_fn, U0,
                         affinity=affinity, kind="hard", initial_model=model0, monitor=monitor,
                         algorithm=name,
                         meta={"init": init, "repairs": repairs, "_label_history": history})


def c_means(data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    """Hard C-means: cluster means, then nearest-prototype assignment.

    The trace holds the sum of squared errors after every sweep.
    """
    X = data.require("features")

    def score(model):
        return -squared_distances(X, model.V)

    def objective(model, U):
        D = squared_distances(X, model.V)
        return float(np.sum(U * D))

    return _hard_prototype_run(data, cfg, name="c_means", make_model=Prototype, score=score,
                               objective_fn=objective, affinity=sq_euclidean())


def cml_gaussian(data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    """Classification maximum likelihood with fixed-scale Gaussian clusters.

    Alternates the argmax-density assignment and the mean update; the trace
    holds the classification log-likelihood, which is non-decreasing.
    """
    X = data.require("features")

    def make(V):
        return GaussianModel(V, sigma=cfg.sigma, kappa=cfg.kappa)

    def score(model):
        return np.log(model.kappa) - squared_distances(X, model.V) / model.sigma

    def objective(model, U):
        return float(np.sum(U * score(model)))

    return _hard_prototype_run(data, cfg, name="cml_gaussian", make_model=make, score=score,
                               objective_fn=objective, affinity=density())


def fcm_memberships(D, m):
    """Fuzzy memberships from squared distances ``D`` (c x n) with fuzzifier ``m``.

    An object sitting exactly on one or more prototypes is shared equally
    among them.
    """
    c, n = D.shape
    U = np.empty_like(D)
    zero = D <= 0
    hit = zero.any(axis=0)
    if hit.any():
        U[:, hit] = zero[:, hit] / zero[:, hit].sum(axis=0)
    if (~hit).any():
        Dm = D[:, ~hit]
        w = (Dm.min(axis=0) / Dm) ** (1.0 / (m - 1.0))
        U[:, ~hit] = w / w.sum(axis=0)
    return U


def fuzzy_c_means(data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    """Fuzzy c-means with the classical alternating updates (``m > 1``).

    Minimises ``sum_i sum_k u_ik**m ||x_k - v_i||**2`` over column-stochastic
    memberships; the trace is non-increasing.
    """
    X = data.require("features")
    m = float(cfg.m)
    if not m > 1:
        raise DomainError("fuzzy c-means needs m > 1")
    c = int(cfg.c)
    if c > data.n:
        raise DomainError(f"c={c} exceeds the number of objects n={data.n}")
    rng = _rng(cfg)

    def step_model(U):
        W = U ** m
        s = W.sum(axis=1)
        V = (W @ X) / np.where(s > 0, s, 1.0)[:, None]
        if np.any(s <= 0):
            V, _ = _means_with_repair(X, np.argmax(U, axis=0), c)
        return Prototype(V)

    def step_partition(model):
        return fcm_memberships(squared_distances(X, model.V), m)

    def objective(model, U):
        return float(np.sum(U ** m * squared_distances(X, model.V)))

    if (cfg.init or "sample") == "random-partition":
        U0 = rng.dirichlet(np.ones(c), size=data.n).T
        model0 = None
    else:
        V0, _ = _initial_prototypes(X, cfg, rng)
        model0 = Prototype(V0)
        U0 = step_partition(model0)
    return run_framework(data, cfg, step_model, step_partition, objective, U0,
                         affinity=sq_euclidean(), kind="soft", initial_model=model0,
                         algorithm="fuzzy_c_means", meta={"init": cfg.init or "sample", "m": m})


# --- sample-weighted algorithms ------------------------------------------------

def _responsibilities(L):
    """Column-normalised ``exp(L)`` and the per-object log-normaliser."""
    norm = logsumexp(L, axis=0)
    return np.exp(L - norm), norm


def _weighted_counts(U, log_a):
    w = np.exp(log_a - log_a.max())
    return U * w[None, :]


class _SimplexLog:
    """Largest simplex-constraint deviations seen at every sweep."""

    def __init__(self):
        self.alpha = []
        self.columns = []
        self.rows = []

    def __call__(self, it, model, state):
        U = state[0]
        self.alpha.append(float(abs(model.alpha.sum() - 1.0)))
        self.columns.append(float(np.max(np.abs(U.sum(axis=0) - 1.0))))
        if isinstance(model, Multinomial):
            self.rows.append(float(np.max(np.abs(model.theta.sum(axis=1) - 1.0))))

    def as_dict(self):
        out = {"alpha_sum_error": self.alpha, "column_sum_error": self.columns}
        if self.rows:
            out["theta_row_sum_error"] = self.rows
        return out


UPDATE_ORDER = "u, a from (v, alpha); then v/theta, alpha from (u, a); a starts at 1"


def sample_weighted_gaussian(data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    """Maximise ``sum_k (sum_i alpha_i exp(-||x_k - v_i||^2 / (m beta)))**m``.

    Each sweep computes memberships ``u`` and sample weights ``a`` from the
    current ``(v, alpha)``, then the ``a``-weighted prototype and mixture
    weight updates.  The first sweep uses ``a = 1``.  The trace holds the log
    of the objective.  The model carries ``alpha``; the weights ``a`` (and their
    logs) are in ``meta``.
    """
    X = data.require("features")
    m, beta, c = float(cfg.m), float(cfg.beta), int(cfg.c)
    if m < 1:
        raise DomainError("the sample-weighted algorithms need m >= 1")
    if c > data.n:
        raise DomainError(f"c={c} exceeds the number of objects n={data.n}")
    rng = _rng(cfg)
    last = {}

    def step_partition(model):
        L = weighted_gaussian(beta, m).table_fn(data, model)
        U, norm = _responsibilities(L)
        last["model"] = model
        return U, m * norm

    def step_model(state):
        U, log_a = state
        W = _weighted_counts(U, log_a)
        s = W.sum(axis=1)
        prev = last["model"].V
        V = np.where(s[:, None] > 0, (W @ X) / np.where(s > 0, s, 1.0)[:, None], prev)
        return Prototype(V, s / s.sum())

    def objective(model, state):
        D = squared_distances(X, model.V)
        return sample_weighted_objective(-D / beta, model.alpha, m)

    V0, _ = _initial_prototypes(X, cfg, rng)
    model0 = Prototype(V0, np.full(c, 1.0 / c))
    U0, _ = step_partition(model0)
    state0 = (U0, np.zeros(data.n))
    simplex = _SimplexLog()
    R = run_framework(data, cfg, step_model, step_partition, objective, state0,
                      affinity=weighted_gaussian(beta, m), kind="soft", initial_model=model0,
                      membership=lambda s: s[0], monitor=simplex,
                      algorithm="sample_weighted_gaussian",
                      meta={"init": cfg.init or "sample", "m": m, "beta": beta,
                            "update_order": UPDATE_ORDER})
    _attach_weights(R, simplex)
    return R


def _attach_weights(R, simplex):
    L = R.table.values
    log_a = R.meta["m"] * logsumexp(L, axis=0)
    R.meta["log_weights"] = log_a.tolist()
    R.meta["weights"] = np.exp(log_a).tolist()
    R.meta["alpha"] = R.model.alpha.tolist()
    R.meta["simplex"] = simplex.as_dict()


def _node_seeds(A, d, c, rng, init):
    n = A.shape[0]
    if init == "farthest":
        rows = A / d[:, None]

        def dissim(idx):
            # cosine dissimilarity of adjacency rows
            a = rows[idx]
            num = a @ rows.T
            den = np.linalg.norm(a, axis=1)[:, None] * np.linalg.norm(rows, axis=1)[None, :]
            return 1.0 - num / den
        return _farthest_first(dissim, n, c, rng)
    return _distinct_objects(A, c, rng)


def _clean_theta(theta):
    theta = np.maximum(theta, THETA_FLOOR)
    return theta / theta.sum(axis=1, keepdims=True)


def sample_weighted_multinomial(data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    """Graph version: ``Sim(x_k, X_i) = prod_l theta_il ** A_kl``.

    Maximises ``sum_k (sum_i alpha_i prod_l theta_il ** (A_kl / m))**m`` with
    the same sweep structure as :func:`sample_weighted_gaussian`.  Seeds rows
    of ``theta`` from ``c`` nodes (farthest-first by default), smoothed towards
    uniform so that no row starts with zeros.

    Raises
    ------
    IngestError
        If some node has zero degree.
    """
    A = data.require("adjacency")
    d = A.sum(axis=1)
    isolated = np.flatnonzero(d <= 0)
    if isolated.size:
        raise IngestError(f"isolated node(s) {isolated.tolist()} have zero degree")
    m, c, n = float(cfg.m), int(cfg.c), data.n
    if m < 1:
        raise DomainError("the sample-weighted algorithms need m >= 1")
    if c > n:
        raise DomainError(f"c={c} exceeds the number of nodes n={n}")
    rng = _rng(cfg)
    init = cfg.init or "farthest"
    last = {}
    amap = weighted_multinomial(m)

    def step_partition(model):
        L = amap.table_fn(data, model)
        U, norm = _responsibilities(L)
        last["model"] = model
        return U, m * norm

    def step_model(state):
        U, log_a = state
        W = _weighted_counts(U, log_a)
        s = W.sum(axis=1)
        num = W @ A
        den = W @ d
        prev = last["model"].theta
        theta = np.where(den[:, None] > 0, num / np.where(den > 0, den, 1.0)[:, None], prev)
        return Multinomial(_clean_theta(theta), s / s.sum())

    def objective(model, state):
        from .categorization import multinomial
        L = multinomial().table_fn(data, model)
        return sample_weighted_objective(L, model.alpha, m)

    seeds = _node_seeds(A, d, c, rng, init)
    theta0 = (1 - THETA_SMOOTHING) * A[seeds] / d[seeds, None] + THETA_SMOOTHING / n
    model0 = Multinomial(_clean_theta(theta0), np.full(c, 1.0 / c))
    U0, _ = step_partition(model0)
    simplex = _SimplexLog()
    R = run_framework(data, cfg, step_model, step_partition, objective, (U0, np.zeros(n)),
                      affinity=amap, kind="soft", initial_model=model0,
                      membership=lambda s: s[0], monitor=simplex,
                      algorithm="sample_weighted_multinomial",
                      meta={"init": init, "seeds": seeds.tolist(), "m": m,
                            "update_order": UPDATE_ORDER})
    _attach_weights(R, simplex)
    return R


# --- single linkage ----------------------------------------------------------

def similarity_from_features(X) -> np.ndarray:
    """``s_kl = 1 / (1 + ||x_k - x_l||)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return 1.0 / (1.0 + np.sqrt(squared_distances(X, X)))


def single_linkage(data: DataSet, c: int, cfg: AlgoConfig = None) -> ClusteringResult:
    """Agglomerate singletons by repeatedly merging the most similar pair of clusters.

    Cluster similarity is the largest object similarity across the pair.  Ties
    merge the lexicographically smallest pair of cluster indices, clusters
    being ordered by their smallest member.  The trace lists the similarity
    of each merge.
    """
    S = data.require("similarity")
    n = data.n
    c = int(c)
    if not 1 <= c <= n:
        raise DomainError(f"c must lie in [1, n={n}], got {c}")
    clusters = [[k] for k in range(n)]
    C = S.astype(float).copy()
    np.fill_diagonal(C, -np.inf)
    merges = []
    for _ in range(n - c):
        size = len(clusters)
        upper = np.where(np.triu(np.ones((size, size), dtype=bool), 1), C, -np.inf)
        flat = int(np.argmax(upper))
        i, j = divmod(flat, size)
        merges.append([clusters[i][0], clusters[j][0], float(C[i, j])])
        C[i, :] = np.maximum(C[i, :], C[j, :])
        C[:, i] = C[i, :]
        C[i, i] = -np.inf
        C = np.delete(np.delete(C, j, axis=0), j, axis=1)
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
    U = np.zeros((c, n))
    for i, members in enumerate(clusters):
        U[i, members] = 1.0
    model = Exemplar(tuple(clusters))
    partition = Partition(U, "hard")
    seed = cfg.seed if cfg is not None else None
    R = ClusteringResult(data, model, partition, max_link(), tuple(m[2] for m in merges),
                         seed, n - c, True,
                         {"algorithm": "single_linkage", "merges": merges})
    R.meta["equivalency"] = check_categorization_equivalency(partition, R.table).holds
    return R


ALGORITHMS = {
    "c_means": c_means,
    "fuzzy_c_means": fuzzy_c_means,
    "cml_gaussian": cml_gaussian,
    "sample_weighted_gaussian": sample_weighted_gaussian,
    "sample_weighted_multinomial": sample_weighted_multinomial,
    "single_linkage": lambda data, cfg: single_linkage(data, cfg.c, cfg),
}

VIEWS = {
    "c_means": "features",
    "fuzzy_c_means": "features",
    "cml_gaussian": "features",
    "sample_weighted_gaussian": "features",
    "sample_weighted_multinomial": "adjacency",
    "single_linkage": "similarity",
}


def run(name: str, data: DataSet, cfg: AlgoConfig) -> ClusteringResult:
    try:
        fn = ALGORITHMS[name]
    except KeyError:
        raise ConfigurationError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    return fn(data, cfg)
