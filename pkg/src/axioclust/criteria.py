"""Compactness and separation criteria, evaluated for a given clustering.

These are evaluators only; the optimisers live in :mod:`axioclust.algorithms`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .categorization import GaussianModel, Prototype, squared_distances
from .data import DataSet, Partition, hard_assignment, require_valid
from .exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    direction: str
    parameters: dict = field(default_factory=dict)


CRITERIA = {
    "sse": CriterionSpec("sse", "minimize"),
    "general_c_means": CriterionSpec("general_c_means", "minimize", {"m": None, "alpha": None}),
    "cml_loglik": CriterionSpec("cml_loglik", "maximize", {"sigma": 1.0, "kappa": 1.0}),
    "mixture_loglik": CriterionSpec("mixture_loglik", "maximize", {"sigma": 1.0, "kappa": 1.0}),
    "cut": CriterionSpec("cut", "minimize"),
    "ics": CriterionSpec("ics", "minimize", {"m": None, "gamma": None}),
    "sample_weighted_objective": CriterionSpec("sample_weighted_objective", "maximize",
                                               {"m": None, "beta": None}),
}


def _labels(U):
    if isinstance(U, Partition):
        return hard_assignment(U)[0]
    U = np.asarray(U)
    return np.argmax(U, axis=0) if U.ndim == 2 else U.astype(int)


def _prototype(model):
    if not isinstance(model, Prototype):
        raise ConfigurationError("this criterion needs a prototype model")
    return model.V


def sse(data: DataSet, model, U) -> float:
    """Sum over objects of the squared distance to the prototype of their cluster.

    ``U`` may be a hard partition, a membership matrix (argmax is used) or a
    label vector.
    """
    D = squared_distances(data.require("features"), _prototype(model))
    labels = _labels(U)
    return float(D[labels, np.arange(data.n)].sum())


def general_c_means(data: DataSet, model, alpha, pair) -> float:
    """``sum_k f(sum_i alpha_i g(||x_k - v_i||^2))``."""
    D = squared_distances(data.require("features"), _prototype(model))
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (model.c,):
        raise DomainError("alpha must have one weight per cluster")
    return float(np.sum(pair.f(np.sum(alpha[:, None] * pair.g(D), axis=0))))


def _gaussian_logp(data, model):
    if not isinstance(model, GaussianModel):
        raise ConfigurationError("this criterion needs a GaussianModel (sigma, kappa)")
    if not model.sigma > 0:
        raise DomainError("sigma must be positive")
    D = squared_distances(data.require("features"), model.V)
    return np.log(model.kappa) - D / model.sigma


def cml_loglik(data: DataSet, model, phi) -> float:
    """Classification log-likelihood ``sum_k log p(x_k | cluster phi(k))``.

    The density is ``kappa * exp(-||x - v||^2 / sigma)``, so the value equals
    ``n log kappa - SSE_phi / sigma``.
    """
    L = _gaussian_logp(data, model)
    phi = _labels(phi)
    return float(L[phi, np.arange(data.n)].sum())


def mixture_loglik(data: DataSet, model, alpha) -> float:
    """``sum_k log sum_i alpha_i p(x_k | cluster i)`` via log-sum-exp."""
    L = _gaussian_logp(data, model)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (model.c,) or np.any(alpha < 0) or abs(alpha.sum() - 1) > 1e-9:
        raise DomainError("alpha must be a probability vector with one weight per cluster")
    with np.errstate(divide="ignore"):
        la = np.log(alpha)
    return float(logsumexp(L + la[:, None], axis=0).sum())


def cut(data: DataSet, U) -> float:
    """Total similarity between the two clusters of a hard 2-partition."""
    S = data.require("similarity")
    P = require_valid(U, "hard")
    if P.c != 2:
        raise DomainError(f"cut is defined for two clusters, got c={P.c}")
    a = P.U[0].astype(bool)
    b = P.U[1].astype(bool)
    return float(S[np.ix_(a, b)].sum())


def ics(data: DataSet, model, U, m=2.0, gamma=1.0) -> float:
    """ICS criterion: weighted within scatter over ``n`` minus ``gamma / c`` times
    the sum of squared distances over all prototype pairs ``(i, t)``."""
    X = data.require("features")
    V = _prototype(model)
    M = U.U if isinstance(U, Partition) else np.asarray(U, dtype=float)
    D = squared_distances(X, V)
    compact = np.sum(M ** m * D) / data.n
    pair = squared_distances(V, V).sum()
    return float(compact - gamma / model.c * pair)


@dataclass(frozen=True)
class Decomposition:
    within: float
    between: float
    total: float
    residual: float


def decomposition_check(data: DataSet, U) -> Decomposition:
    """Within-cluster plus between-cluster scatter against total scatter.

    Cluster centres are the member means and the reference point is the
    global mean.
    """
    X = data.require("features")
    P = require_valid(U, "hard")
    sizes = P.U.sum(axis=1)
    if np.any(sizes == 0):
        raise DomainError("empty cluster")
    V = (P.U @ X) / sizes[:, None]
    xbar = X.mean(axis=0)
    D = squared_distances(X, V)
    within = float(np.sum(P.U * D))
    between = float(np.sum(sizes * np.sum((V - xbar) ** 2, axis=1)))
    total = float(np.sum((X - xbar) ** 2))
    return Decomposition(within, between, total, within + between - total)


def sample_weighted_objective(log_sim, alpha, m) -> float:
    """Log of ``sum_k (sum_i alpha_i Sim_ik ** (1/m)) ** m`` from log-similarities."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore"):
        inner = logsumexp(np.asarray(log_sim) / m + np.log(alpha)[:, None], axis=0)
    return float(logsumexp(m * inner))
