"""Randomised and exhaustive checks of the clustering-result inequalities.

When a result satisfies the separation and equivalency axioms, the argmax map
``varphi(k) = argmax_i u_ik`` dominates every other assignment map ``phi``.
For similarities (larger is better) the checked inequalities are

* ``product``:       prod_k S(k, varphi)  >= prod_k S(k, phi)
* ``sum``:           sum_k  S(k, varphi)  >= sum_k  S(k, phi)
* ``mixture``:       prod_k S(k, varphi)  >= prod_k sum_i alpha_i S(k, i)
* ``general_means``: sum_k  S(k, varphi)  >= sum_k f(sum_i alpha_i g(S(k, i)))

with ``f`` convex and ``f(g(t)) = t``.  For dissimilarities the directions
flip, ``f`` is concave, and the product/sum pair is checked against both
``phi`` and the ``f``-mean.

Products are compared as log-sums and sums of log-domain values through
log-sum-exp, so a breach is measured in the domain actually compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .categorization import (
    DISSIMILARITY,
    SIMILARITY,
    AffinityMap,
    ClusteringResult,
    check_categorization_equivalency,
    classify_clustering_result,
)
from .data import TIE_TOL, Partition, hard_assignment


def _lse(a, axis=None):
    """Log-sum-exp for the inner loops; scipy's version costs ~100us per call here."""
    a = np.asarray(a, dtype=float)
    top = np.max(a, axis=axis, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - top), axis=axis, keepdims=True)) + top
    return out.reshape(()) if axis is None else np.squeeze(out, axis=axis)

SLACK = 1e-9
EXHAUSTIVE_LIMIT = 4096
DEFAULT_EXPONENTS = (1.0, 1.5, 2.0, 4.0)

SIM_INEQUALITIES = ("product", "sum", "mixture", "general_means")
DS_INEQUALITIES = ("sum", "general_means_sum", "product", "general_means_product")


@dataclass(frozen=True)
class ConvexPair:
    """Functions ``f``, ``g`` with ``f(g(t)) = t`` on the positive reals.

    For the built-in power family (``m`` set) the ``f``-mean is evaluated in
    the log domain; custom pairs are evaluated directly.
    """

    f: Callable
    g: Callable
    kind: str = "convex"
    m: Optional[float] = None

    def log_mean(self, logS, alpha):
        """``log f(sum_i alpha_i g(S_ik))`` per column from log-values ``logS``."""
        alpha = np.asarray(alpha, dtype=float)
        if self.m is not None:
            # power family: f = t**p, g = t**(1/p)
            p = self.m if self.kind == "convex" else 1.0 / self.m
            with np.errstate(divide="ignore"):
                inner = _lse(logS / p + np.log(alpha)[:, None], axis=0)
            return p * inner
        S = np.exp(logS)
        with np.errstate(divide="ignore"):
            return np.log(self.f(np.sum(alpha[:, None] * self.g(S), axis=0)))

    def describe(self):
        return {"kind": self.kind, "m": self.m}


def power_pair(m: float, kind: str = "convex") -> ConvexPair:
    """``f = t**m, g = t**(1/m)`` (convex) or ``f = t**(1/m), g = t**m`` (concave), ``m >= 1``."""
    if m < 1:
        raise ValueError("the power family needs m >= 1")
    if kind == "convex":
        return ConvexPair(lambda t: t ** m, lambda t: t ** (1.0 / m), "convex", float(m))
    if kind == "concave":
        return ConvexPair(lambda t: t ** (1.0 / m), lambda t: t ** m, "concave", float(m))
    raise ValueError(f"unknown kind {kind!r}")


def check_pair(pair: ConvexPair, rng=None, samples=200) -> bool:
    """Spot-check ``f(g(t)) = t`` and the midpoint (in)equality on random points."""
    rng = np.random.default_rng(rng)
    t = rng.uniform(1e-3, 50.0, size=samples)
    if not np.allclose(pair.f(pair.g(t)), t, rtol=1e-9, atol=1e-9):
        return False
    a, b = rng.uniform(0.0, 50.0, size=(2, samples))
    mid = pair.f((a + b) / 2)
    avg = (pair.f(a) + pair.f(b)) / 2
    if pair.kind == "convex":
        return bool(np.all(mid <= avg + 1e-9 * (1 + np.abs(avg))))
    return bool(np.all(mid >= avg - 1e-9 * (1 + np.abs(avg))))


# --- one evaluation of all four inequalities ---------------------------------

def _shortfall(better, worse):
    """How far ``better`` falls below ``worse`` (positive means a breach)."""
    if better == worse:  # covers equal infinities
        return 0.0
    with np.errstate(invalid="ignore"):
        d = worse - better
    return 0.0 if np.isnan(d) else float(d)


def _picked(L, phi):
    return L[phi, np.arange(L.shape[1])]


def similarity_breaches(L, varphi, phi, alpha, pair):
    """Shortfalls of the four similarity inequalities for log-similarities ``L``."""
    best = _picked(L, varphi)
    other = _picked(L, phi)
    with np.errstate(divide="ignore"):
        la = np.log(alpha)
    mix = _lse(L + la[:, None], axis=0)
    gm = pair.log_mean(L, alpha)
    return {
        "product": _shortfall(best.sum(), other.sum()),
        "sum": _shortfall(_lse(best), _lse(other)),
        "mixture": _shortfall(best.sum(), mix.sum()),
        "general_means": _shortfall(_lse(best), _lse(gm)),
    }


def dissimilarity_breaches(D, varphi, phi, alpha, pair):
    """Shortfalls of the four dissimilarity inequalities (linear-domain ``D``)."""
    with np.errstate(divide="ignore"):
        L = np.log(D)
    best = _picked(D, varphi)
    other = _picked(D, phi)
    gm_log = pair.log_mean(L, alpha)
    with np.errstate(divide="ignore"):
        lbest = np.log(best)
        lother = np.log(other)
    return {
        "sum": _shortfall(-best.sum(), -other.sum()),
        "general_means_sum": _shortfall(-best.sum(), -np.exp(gm_log).sum()),
        "product": _shortfall(-lbest.sum(), -lother.sum()),
        "general_means_product": _shortfall(-lbest.sum(), -gm_log.sum()),
    }


# --- reports -------------------------------------------------------------------

@dataclass
class Report:
    theorem: str
    trials: int
    seed: int
    exhaustive: bool = False
    precondition_met: bool = True
    precondition: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    max_slack_breach: float = 0.0
    checks: int = 0

    @property
    def ok(self):
        return self.precondition_met and not self.violations

    def record(self, breaches, slack, **context):
        self.checks += 1
        for name, b in breaches.items():
            self.max_slack_breach = max(self.max_slack_breach, b)
            if b > slack:
                self.violations.append({"inequality": name, "breach": b, **context})

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "trials": self.trials,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "precondition_met": self.precondition_met,
            "precondition": self.precondition,
            "checks": self.checks,
            "max_slack_breach": self.max_slack_breach,
            "violations": self.violations,
        }


def trial_rng(seed, trial):
    """Independent stream for one trial, identical in serial and parallel runs."""
    return np.random.default_rng([int(seed), int(trial)])


def _draw(rng, c, n, exponents):
    phi = rng.integers(0, c, size=n)
    alpha = rng.dirichlet(np.ones(c))
    alpha = np.maximum(alpha, 1e-12)
    alpha /= alpha.sum()
    m = float(exponents[rng.integers(len(exponents))])
    return phi, alpha, m


def _precondition(R, tol):
    cls = classify_clustering_result(R, tol)
    equiv = check_categorization_equivalency(R.partition, R.table, tol)
    met = cls.top == "proper" and equiv.holds
    return met, {"class": cls.top, "equivalency": equiv.holds,
                 "mismatches": list(equiv.violations)}


def _verify(R, theorem, mode, trials, seed, tol, slack, exponents):
    T = R.table
    if T.mode != mode:
        raise ValueError(f"{theorem} needs a {mode} map, got {T.mode}")
    met, info = _precondition(R, tol)
    report = Report(theorem, int(trials), int(seed), precondition_met=met, precondition=info)
    c, n = T.shape
    varphi, _ = hard_assignment(R.partition, tol)
    if mode == SIMILARITY:
        values, breaches, kind = T.log_values(), similarity_breaches, "convex"
    else:
        values, breaches, kind = T.values, dissimilarity_breaches, "concave"

    if c ** n <= EXHAUSTIVE_LIMIT:
        report.exhaustive = True
        alpha = np.full(c, 1.0 / c)
        pair = power_pair(1.0, kind)
        for phi in itertools.product(range(c), repeat=n):
            phi = np.asarray(phi)
            b = breaches(values, varphi, phi, alpha, pair)
            report.record(b, slack, phi=phi.tolist(), alpha=alpha.tolist(), m=1.0, trial=None)
    for t in range(int(trials)):
        phi, alpha, m = _draw(trial_rng(seed, t), c, n, exponents)
        b = breaches(values, varphi, phi, alpha, power_pair(m, kind))
        report.record(b, slack, phi=phi.tolist(), alpha=alpha.tolist(), m=m, trial=t)
    return report


def verify_thm4(R: ClusteringResult, trials=1000, seed=0, tol=TIE_TOL, slack=SLACK,
                exponents=DEFAULT_EXPONENTS) -> Report:
    """Check the four similarity inequalities on a clustering result.

    Every assignment map is enumerated when ``c**n <= 4096``; ``trials``
    random draws of (map, mixture weights, exponent) follow.  If the result
    is not proper or violates equivalency the report says so
    (``precondition_met`` false) and the breaches found are still listed.
    """
    return _verify(R, "thm4", SIMILARITY, trials, seed, tol, slack, exponents)


def verify_thm5(R: ClusteringResult, trials=1000, seed=0, tol=TIE_TOL, slack=SLACK,
                exponents=DEFAULT_EXPONENTS) -> Report:
    """Dissimilarity counterpart of :func:`verify_thm4` with a concave ``f``."""
    return _verify(R, "thm5", DISSIMILARITY, trials, seed, tol, slack, exponents)


# --- falsification harness -----------------------------------------------------

@dataclass
class Instance:
    """A generated clustering result that breaks an inequality despite passing the axioms."""

    result: ClusteringResult
    index: int
    breaches: dict


def search_counterexample(generator: Callable, budget=10_000, seed=0, tol=TIE_TOL,
                          slack=SLACK, draws=3, exponents=DEFAULT_EXPONENTS):
    """Look for an instance where the axioms hold but an inequality fails.

    ``generator(rng)`` returns a :class:`ClusteringResult`.  For the map
    inequalities the worst ``phi`` is the column-wise optimum of the table,
    which covers every map at once; ``draws`` random (alpha, m) pairs test
    the mixture and mean forms.  Returns the first hit or ``None``.
    """
    for idx in range(int(budget)):
        rng = trial_rng(seed, idx)
        R = generator(rng)
        met, _ = _precondition(R, tol)
        if not met:
            continue
        T = R.table
        c, n = T.shape
        varphi, _ = hard_assignment(R.partition, tol)
        if T.mode == SIMILARITY:
            values, breaches, kind = T.log_values(), similarity_breaches, "convex"
            worst_phi = np.argmax(values, axis=0)
        else:
            values, breaches, kind = T.values, dissimilarity_breaches, "concave"
            worst_phi = np.argmin(values, axis=0)
        for _ in range(draws):
            _, alpha, m = _draw(rng, c, n, exponents)
            b = breaches(values, varphi, worst_phi, alpha, power_pair(m, kind))
            bad = {k: v for k, v in b.items() if v > slack}
            if bad:
                return Instance(R, idx, bad)
    return None


def gaussian_generator(n_max=8, c_max=3, beta=1.0, mismatch=0.5, dim=2):
    """Random prototype results under the Gaussian similarity.

    With probability ``mismatch`` the partition is a random hard partition
    instead of the nearest-prototype one, so the axiom filter has work to do.
    """
    from .categorization import Prototype, gaussian

    amap = gaussian(beta)

    def gen(rng):
        from .data import DataSet
        n = int(rng.integers(2, n_max + 1))
        c = int(rng.integers(1, min(c_max, n) + 1))
        X = rng.normal(scale=2.0, size=(n, dim))
        V = rng.normal(scale=2.0, size=(c, dim))
        data, model = DataSet(features=X), Prototype(V)
        labels = np.argmax(amap.evaluate(data, model).scores, axis=0)
        if rng.random() < mismatch:
            labels = rng.integers(0, c, size=n)
        U = np.zeros((c, n))
        U[labels, np.arange(n)] = 1.0
        return ClusteringResult(data, model, Partition(U, "hard"), amap)

    return gen


def multinomial_generator(n_max=8, c_max=3, mismatch=0.5):
    """Random multinomial results on small random graphs (log-domain similarity)."""
    from .categorization import Multinomial, multinomial

    amap = multinomial()

    def gen(rng):
        from .data import DataSet
        n = int(rng.integers(2, n_max + 1))
        c = int(rng.integers(1, min(c_max, n) + 1))
        A = np.triu(rng.integers(0, 3, size=(n, n)).astype(float), 1)
        A = A + A.T
        A[np.arange(n), np.arange(n)] += A.sum(axis=1) == 0
        theta = rng.dirichlet(np.ones(n), size=c)
        data, model = DataSet(adjacency=A), Multinomial(theta)
        labels = np.argmax(amap.evaluate(data, model).scores, axis=0)
        if rng.random() < mismatch:
            labels = rng.integers(0, c, size=n)
        U = np.zeros((c, n))
        U[labels, np.arange(n)] = 1.0
        return ClusteringResult(data, model, Partition(U, "hard"), amap)

    return gen


def result_with_map(R: ClusteringResult, amap: AffinityMap) -> ClusteringResult:
    """Same model and partition judged under a different affinity map."""
    return ClusteringResult(R.data, R.model, R.partition, amap, R.trace, R.seed,
                            R.iterations, R.converged, dict(R.meta))


__all__ = [
    "ConvexPair", "power_pair", "check_pair", "Report", "verify_thm4", "verify_thm5",
    "search_counterexample", "gaussian_generator", "multinomial_generator",
    "similarity_breaches", "dissimilarity_breaches", "trial_rng", "result_with_map",
    "DISSIMILARITY", "SIMILARITY",
]
