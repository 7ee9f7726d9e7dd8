"""Category representations, (dis)similarity maps and the separation axioms.

A clustering result is the triple (category model, partition, affinity map).
The affinity map scores every (cluster, object) pair; the axiom checkers only
look at the resulting ``c x n`` table, so any map can be plugged in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .data import (
    TIE_TOL,
    DataSet,
    Partition,
    argmax_sets,
    classify_partition,
    validate_partition,
    winner_margins,
)
from .exceptions import ConfigurationError, DomainError, StructuralError

SIMILARITY = "similarity"
DISSIMILARITY = "dissimilarity"


# --- category models ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Prototype:
    """Each cluster is a point ``v_i`` in a feature space (rows of ``V``).

    ``alpha`` holds optional mixture weights for algorithms that estimate them.
    """

    V: np.ndarray
    alpha: Optional[np.ndarray] = None

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 1:
            raise StructuralError("prototype matrix must be c x tau with c, tau >= 1")
        object.__setattr__(self, "V", V)
        if self.alpha is not None:
            object.__setattr__(self, "alpha", _check_simplex(self.alpha, V.shape[0]))

    @property
    def c(self):
        return self.V.shape[0]

    def same(self, i, j, tol=TIE_TOL):
        return bool(np.all(np.abs(self.V[i] - self.V[j]) <= tol))


@dataclass(frozen=True, eq=False)
class GaussianModel(Prototype):
    """Prototypes with the density ``kappa * exp(-||x - v||^2 / sigma)``."""

    sigma: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")


@dataclass(frozen=True, eq=False)
class Exemplar:
    """Each cluster is a nonempty set of member objects."""

    members: tuple

    def __post_init__(self):
        sets = tuple(frozenset(int(k) for k in s) for s in self.members)
        if not sets:
            raise StructuralError("an exemplar model needs at least one cluster")
        if any(len(s) == 0 for s in sets):
            raise DomainError("exemplar sets must be nonempty")
        object.__setattr__(self, "members", sets)

    @property
    def c(self):
        return len(self.members)

    def same(self, i, j, tol=TIE_TOL):
        return self.members[i] == self.members[j]


@dataclass(frozen=True, eq=False)
class Multinomial:
    """Each cluster is a distribution ``theta_i`` over the ``n`` graph nodes."""

    theta: np.ndarray
    alpha: Optional[np.ndarray] = None

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 2:
            raise StructuralError("theta must be a c x n matrix")
        if np.any(theta < 0) or np.any(np.abs(theta.sum(axis=1) - 1) > 1e-9):
            raise DomainError("rows of theta must be probability vectors")
        object.__setattr__(self, "theta", theta)
        if self.alpha is not None:
            object.__setattr__(self, "alpha", _check_simplex(self.alpha, theta.shape[0]))

    @property
    def c(self):
        return self.theta.shape[0]

    def same(self, i, j, tol=TIE_TOL):
        return bool(np.all(np.abs(self.theta[i] - self.theta[j]) <= tol))


def _check_simplex(alpha, c):
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (c,):
        raise StructuralError(f"alpha must have length {c}")
    if np.any(alpha < 0) or abs(alpha.sum() - 1) > 1e-9:
        raise DomainError("alpha must be a probability vector")
    return alpha


# --- affinity maps -----------------------------------------------------------

@dataclass(frozen=True)
class AffinityTable:
    """Evaluated affinities, ``values[i, k]`` for cluster ``i`` and object ``k``.

    When ``log`` is true the values are log-similarities.
    """

    values: np.ndarray
    mode: str = SIMILARITY
    log: bool = False

    def __post_init__(self):
        if self.mode not in (SIMILARITY, DISSIMILARITY):
            raise DomainError(f"unknown affinity mode {self.mode!r}")
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise StructuralError("an affinity table is a c x n matrix")
        if np.any(np.isnan(v)) or np.any(v == np.inf):
            raise DomainError("affinity table has NaN or +inf entries")
        if not self.log and np.any(v < 0):
            raise DomainError("affinities must be nonnegative")
        if self.log and self.mode != SIMILARITY:
            raise DomainError("only similarities may be stored as logs")
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape

    @property
    def scores(self) -> np.ndarray:
        """Values oriented so that larger always means more similar."""
        return self.values if self.mode == SIMILARITY else -self.values

    def log_values(self) -> np.ndarray:
        if self.log:
            return self.values
        with np.errstate(divide="ignore"):
            return np.log(self.values)


@dataclass(frozen=True)
class AffinityMap:
    """A category similarity or dissimilarity mapping.

    ``table_fn(data, model)`` returns the full ``c x n`` matrix.  Use
    :meth:`from_pointwise` to wrap a scalar ``fn(k, i, data, model)``.
    """

    name: str
    mode: str
    table_fn: Callable
    log: bool = False
    params: dict = field(default_factory=dict)

    def evaluate(self, data: DataSet, model) -> AffinityTable:
        return AffinityTable(np.asarray(self.table_fn(data, model), dtype=float),
                             self.mode, self.log)

    @classmethod
    def from_pointwise(cls, name, mode, fn, log=False):
        def table(data, model):
            return np.array([[fn(k, i, data, model) for k in range(data.n)]
                             for i in range(model.c)], dtype=float)
        return cls(name, mode, table, log)

    def describe(self) -> dict:
        return {"name": self.name, "mode": self.mode, "log": self.log, **self.params}


def _need(model, kind, mapname):
    if not isinstance(model, kind):
        raise ConfigurationError(f"the {mapname} map needs a {kind.__name__} model")


def squared_distances(X, V):
    """``D[i, k] = ||x_k - v_i||^2`` for features ``X`` (n x r), prototypes ``V`` (c x r)."""
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    if X.shape[1] != V.shape[1]:
        raise ConfigurationError(
            f"prototype dimension {V.shape[1]} does not match feature dimension {X.shape[1]}")
    diff = V[:, None, :] - X[None, :, :]
    return np.einsum("ikr,ikr->ik", diff, diff)


def sq_euclidean() -> AffinityMap:
    """``Ds(x_k, X_i) = ||x_k - v_i||^2``."""
    def table(data, model):
        _need(model, Prototype, "sq-euclidean")
        return squared_distances(data.require("features"), model.V)
    return AffinityMap("sq_euclidean", DISSIMILARITY, table)


def max_link() -> AffinityMap:
    """``Sim(x_k, X_i) = max_{l in X_i} s_kl``."""
    def table(data, model):
        _need(model, Exemplar, "max-link")
        S = data.require("similarity")
        out = np.empty((model.c, data.n))
        for i, members in enumerate(model.members):
            idx = np.fromiter(sorted(members), dtype=int)
            if idx.max() >= data.n:
                raise StructuralError("exemplar index outside the dataset")
            out[i] = S[:, idx].max(axis=1)
        return out
    return AffinityMap("max_link", SIMILARITY, table)


def gaussian(beta=1.0) -> AffinityMap:
    """``Sim(x_k, X_i) = exp(-||x_k - v_i||^2 / beta)``."""
    if not beta > 0:
        raise DomainError("beta must be positive")

    def table(data, model):
        _need(model, Prototype, "gaussian")
        return np.exp(-squared_distances(data.require("features"), model.V) / beta)
    return AffinityMap("gaussian", SIMILARITY, table, params={"beta": beta})


def density() -> AffinityMap:
    """Log of ``kappa * exp(-||x - v_i||^2 / sigma)`` using the model's kappa, sigma."""
    def table(data, model):
        _need(model, GaussianModel, "density")
        d = squared_distances(data.require("features"), model.V)
        return np.log(model.kappa) - d / model.sigma
    return AffinityMap("density", SIMILARITY, table, log=True)


def _log_theta(theta):
    with np.errstate(divide="ignore"):
        return np.log(theta)


def _multinomial_log(A, theta, m):
    # sum_l A_kl log theta_il, with 0 * log 0 = 0
    logt = _log_theta(theta)
    out = np.empty((theta.shape[0], A.shape[0]))
    for i in range(theta.shape[0]):
        lt = logt[i]
        finite = np.isfinite(lt)
        part = A[:, finite] @ lt[finite]
        blocked = (A[:, ~finite] > 0).any(axis=1)
        part[blocked] = -np.inf
        out[i] = part
    return out / m


def multinomial() -> AffinityMap:
    """Log of ``prod_l theta_il ** A_kl``."""
    def table(data, model):
        _need(model, Multinomial, "multinomial")
        return _multinomial_log(data.require("adjacency"), model.theta, 1.0)
    return AffinityMap("multinomial", SIMILARITY, table, log=True)


def weighted_gaussian(beta=1.0, m=1.0) -> AffinityMap:
    """Log of ``alpha_i * exp(-||x_k - v_i||^2 / (m beta))``.

    This is the score whose column-normalisation gives the memberships of the
    sample-weighted Gaussian algorithm.
    """
    def table(data, model):
        _need(model, Prototype, "weighted-gaussian")
        alpha = model.alpha if model.alpha is not None else np.full(model.c, 1.0 / model.c)
        d = squared_distances(data.require("features"), model.V)
        with np.errstate(divide="ignore"):
            return np.log(alpha)[:, None] - d / (m * beta)
    return AffinityMap("weighted_gaussian", SIMILARITY, table, log=True,
                       params={"beta": beta, "m": m})


def weighted_multinomial(m=1.0) -> AffinityMap:
    """Log of ``alpha_i * prod_l theta_il ** (A_kl / m)``."""
    def table(data, model):
        _need(model, Multinomial, "weighted-multinomial")
        alpha = model.alpha if model.alpha is not None else np.full(model.c, 1.0 / model.c)
        with np.errstate(divide="ignore"):
            la = np.log(alpha)[:, None]
        return la + _multinomial_log(data.require("adjacency"), model.theta, m)
    return AffinityMap("weighted_multinomial", SIMILARITY, table, log=True, params={"m": m})


def affinity_table(data: DataSet, model, amap: AffinityMap) -> AffinityTable:
    """Evaluate ``amap`` on every (cluster, object) pair."""
    T = amap.evaluate(data, model)
    if T.shape != (model.c, data.n):
        raise StructuralError(f"affinity table has shape {T.shape}, expected {(model.c, data.n)}")
    return T


# --- axiom checks ------------------------------------------------------------

@dataclass(frozen=True)
class AxiomCheck:
    holds: bool
    violations: tuple = ()
    witnesses: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _scores(T):
    return T.scores if isinstance(T, AffinityTable) else np.asarray(T, dtype=float)


def check_sample_separation(T: AffinityTable, tol=TIE_TOL) -> AxiomCheck:
    """Every object has a strictly best cluster."""
    strict = winner_margins(_scores(T)) > tol
    bad = tuple(int(k) for k in np.flatnonzero(~strict.any(axis=0)))
    return AxiomCheck(not bad, bad)


def check_category_separation(T: AffinityTable, tol=TIE_TOL) -> AxiomCheck:
    """Every cluster is the strictly best cluster of at least one object."""
    strict = winner_margins(_scores(T)) > tol
    witnesses, bad = {}, []
    for i in range(strict.shape[0]):
        hits = np.flatnonzero(strict[i])
        if hits.size:
            witnesses[i] = int(hits[0])
        else:
            bad.append(i)
    return AxiomCheck(not bad, tuple(bad), witnesses)


def check_categorization_equivalency(U, T: AffinityTable, tol=TIE_TOL) -> AxiomCheck:
    """Argmax set of every membership column equals the arg-optimum set of the table."""
    M = U.U if isinstance(U, Partition) else np.asarray(U, dtype=float)
    S = _scores(T)
    if M.shape != S.shape:
        raise StructuralError(f"partition shape {M.shape} does not match table shape {S.shape}")
    a, b = argmax_sets(M, tol), argmax_sets(S, tol)
    bad = tuple(k for k in range(M.shape[1]) if a[k] != b[k])
    return AxiomCheck(not bad, bad)


def boundary_set(T: AffinityTable, tol=TIE_TOL) -> frozenset:
    """Objects whose arg-optimum over clusters is not unique."""
    return frozenset(k for k, s in enumerate(argmax_sets(_scores(T), tol)) if len(s) > 1)


# --- clustering results ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """A clustering result (category model, partition, affinity map) plus run metadata."""

    data: DataSet
    model: object
    partition: Partition
    affinity: AffinityMap
    trace: tuple = ()
    seed: Optional[int] = None
    iterations: int = 0
    converged: Optional[bool] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.partition.c != self.model.c or self.partition.n != self.data.n:
            raise StructuralError(
                f"partition is {self.partition.c} x {self.partition.n}, "
                f"model has c={self.model.c}, data has n={self.data.n}")
        object.__setattr__(self, "trace", tuple(float(t) for t in self.trace))

    @cached_property
    def table(self) -> AffinityTable:
        return affinity_table(self.data, self.model, self.affinity)

    @property
    def labels(self):
        return np.argmax(self.partition.U, axis=0)


@dataclass(frozen=True)
class ResultClass:
    top: str
    coincident: bool = False
    totally_coincident: bool = False

    @property
    def flags(self):
        return [f for f, on in (("coincident", self.coincident),
                                ("totally_coincident", self.totally_coincident)) if on]


def coincidence(model, tol=TIE_TOL):
    """(coincident, totally_coincident) for a category model with ``c >= 2``."""
    c = model.c
    if c < 2:
        return False, False
    pairs = [model.same(i, j, tol) for i in range(c) for j in range(i + 1, c)]
    return any(pairs), all(pairs)


def classify_clustering_result(R: ClusteringResult, tol=TIE_TOL) -> ResultClass:
    T = R.table
    sample = check_sample_separation(T, tol)
    category = check_category_separation(T, tol)
    if not category.holds:
        top = "improper"
    elif not sample.holds:
        top = "overlapping"
    else:
        top = "proper"
    coincident, total = coincidence(R.model, tol)
    return ResultClass(top, coincident, total)


def axiom_report(R: ClusteringResult, tol=TIE_TOL) -> dict:
    """Everything the axiom checkers say about a result, as plain JSON data."""
    T = R.table
    sample = check_sample_separation(T, tol)
    category = check_category_separation(T, tol)
    equiv = check_categorization_equivalency(R.partition, T, tol)
    cls = classify_clustering_result(R, tol)
    validation = validate_partition(R.partition)
    report = {
        "sample_separation": {"holds": sample.holds, "violations": list(sample.violations)},
        "category_separation": {
            "holds": category.holds,
            "violations": list(category.violations),
            "witnesses": {str(i): k for i, k in category.witnesses.items()},
        },
        "equivalency": {"holds": equiv.holds, "mismatches": list(equiv.violations)},
        "class": cls.top,
        "flags": cls.flags,
        "boundary_set": sorted(boundary_set(T, tol)),
        "partition": {
            "kind": R.partition.kind,
            "valid": validation.ok,
            "violation": None if validation.ok else validation.describe(),
        },
    }
    if validation.ok:
        pc = classify_partition(R.partition, tol=tol)
        report["partition"]["class"] = pc.top
        report["partition"]["flags"] = sorted(pc.flags)
    return report


def log_mixture(logS, alpha):
    """``log sum_i alpha_i S_ik`` for every column of a log-similarity table."""
    with np.errstate(divide="ignore"):
        la = np.log(np.asarray(alpha, dtype=float))
    return logsumexp(logS + la[:, None], axis=0)
