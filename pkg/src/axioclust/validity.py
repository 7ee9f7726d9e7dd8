"""Cluster validity indices and the extreme-value audit.

Formulas follow the forms used in the axiomatic treatment of validity indices,
including its prefactors.  Where that form differs from the textbook one
(Davies-Bouldin, silhouette) ``variant="standard"`` gives the usual version.
Distances ``d(., .)`` are Euclidean; the prototype-based fuzzy indices use
squared Euclidean distances as written.

An index that cannot be evaluated (too few non-empty clusters, coincident
prototypes in a denominator) returns the worst value for its direction,
``+inf`` or ``-inf``, together with a flag explaining why.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .categorization import Exemplar, Prototype, squared_distances
from .data import TIE_TOL, DataSet, Partition, hard_assignment
from .exceptions import ConfigurationError, DomainError

MIN_BETTER = "min-better"
MAX_BETTER = "max-better"

DIRECTIONS = {
    "xie_beni": MIN_BETTER,
    "kwon": MIN_BETTER,
    "v_p": MAX_BETTER,
    "davies_bouldin": MIN_BETTER,
    "fs": MIN_BETTER,
    "silhouette": MAX_BETTER,
    "index_i": MAX_BETTER,
    "dunn": MAX_BETTER,
    "calinski_harabasz": MAX_BETTER,
    "partition_coefficient": MAX_BETTER,
    "partition_entropy": MIN_BETTER,
}

INDEX_NAMES = tuple(DIRECTIONS)


@dataclass
class IndexValue:
    index: str
    value: float
    direction: str
    variant: str = "paper"
    flags: list = field(default_factory=list)

    def to_dict(self):
        v = self.value
        if np.isinf(v):
            v = "inf" if v > 0 else "-inf"
        return {"index": self.index, "variant": self.variant, "value": v,
                "direction": self.direction, "flags": list(self.flags)}


def worst(direction):
    return np.inf if direction == MIN_BETTER else -np.inf


def is_better(a, b, direction):
    """True when value ``a`` is strictly better than ``b``."""
    return a < b if direction == MIN_BETTER else a > b


# --- shared pieces -----------------------------------------------------------

def _membership(U):
    M = U.U if isinstance(U, Partition) else np.asarray(U, dtype=float)
    if M.ndim != 2:
        raise DomainError("memberships must be a c x n matrix")
    return M


def _features(data):
    return data.require("features")


def _prototypes(model):
    if not isinstance(model, Prototype):
        raise ConfigurationError("this index needs a prototype model")
    return model.V


def _crisp(U):
    labels, _ = hard_assignment(U)
    return labels


def _min_prototype_gap(V):
    c = V.shape[0]
    D = squared_distances(V, V)
    return D[~np.eye(c, dtype=bool)].min()


def _pairwise(X):
    return np.sqrt(squared_distances(X, X))


# --- indices -----------------------------------------------------------------

def xie_beni(data: DataSet, model, U, tol=TIE_TOL) -> float:
    """``sum u_ik^2 ||x_k - v_i||^2 / (n * min_{i != j} ||v_i - v_j||^2)``.

    Returns ``+inf`` when two prototypes coincide (gap within ``tol``).
    """
    return _xie_beni(data, model, U, tol)[0]


def _xie_beni(data, model, U, tol=TIE_TOL):
    X, V, M = _features(data), _prototypes(model), _membership(U)
    if V.shape[0] < 2:
        raise DomainError("the Xie-Beni index needs c >= 2")
    gap = _min_prototype_gap(V)
    if gap <= tol:
        return np.inf, ["coincident prototypes"]
    num = np.sum(M ** 2 * squared_distances(X, V))
    return float(num / (data.n * gap)), []


def _kwon(data, model, U, tol=TIE_TOL, **_):
    X, V, M = _features(data), _prototypes(model), _membership(U)
    c = V.shape[0]
    if c < 2:
        raise DomainError("the Kwon index needs c >= 2")
    gap = _min_prototype_gap(V)
    if gap <= tol:
        return np.inf, ["coincident prototypes"]
    xbar = X.mean(axis=0)
    num = np.sum(M ** 2 * squared_distances(X, V)) + np.sum((V - xbar) ** 2) / c
    return float(num / (data.n * gap)), ["outer sum taken over clusters"]


def _v_p(data, model, U, **_):
    M = _membership(U)
    c, n = M.shape
    if c < 2:
        raise DomainError("the V_P index needs c >= 2")
    overlap = 0.0
    for i in range(c - 1):
        overlap += np.minimum(M[i], M[i + 1:]).sum()
    return float((M.max(axis=0).sum() - 2.0 / (c * (c - 1)) * overlap) / n), []


def _crisp_groups(data, U):
    labels = _crisp(U)
    c = _membership(U).shape[0]
    groups = [np.flatnonzero(labels == i) for i in range(c)]
    return labels, groups


def _davies_bouldin(data, model, U, variant="paper", tol=TIE_TOL, **_):
    X, V = _features(data), _prototypes(model)
    _, groups = _crisp_groups(data, U)
    c = V.shape[0]
    live = [i for i in range(c) if groups[i].size]
    if len(live) < 2:
        return np.inf, ["fewer than two non-empty clusters"]
    flags = []
    if len(live) < c:
        flags.append("empty clusters ignored")
    scatter = {i: np.sqrt(squared_distances(X[groups[i]], V[[i]])).sum() for i in live}
    Vd = np.sqrt(squared_distances(V, V))
    total = 0.0
    for i in live:
        terms = []
        for j in live:
            if j == i:
                continue
            if Vd[i, j] <= tol:
                return np.inf, flags + ["coincident prototypes"]
            si = scatter[i] / groups[i].size
            sj = scatter[j] / groups[j].size
            terms.append((si + sj) / Vd[i, j])
        total += max(terms)
    if variant == "standard":
        return float(total / len(live)), flags
    return float(total / (data.n * c)), flags


def _fs(data, model, U, m=2.0, **_):
    X, V, M = _features(data), _prototypes(model), _membership(U)
    W = M ** m
    vbar = V.mean(axis=0)
    compact = np.sum(W * squared_distances(X, V))
    spread = np.sum(W * np.sum((V - vbar) ** 2, axis=1)[:, None])
    return float(compact - spread), []


def _silhouette(data, model, U, variant="paper", **_):
    X = _features(data)
    labels, groups = _crisp_groups(data, U)
    c = len(groups)
    live = [i for i in range(c) if groups[i].size]
    if len(live) < 2:
        return -np.inf, ["fewer than two non-empty clusters"]
    D = _pairwise(X)
    flags = []
    per_cluster = {}
    s_all = np.zeros(data.n)
    skipped = 0
    for i in live:
        idx = groups[i]
        vals = []
        for k in idx:
            if idx.size == 1:
                skipped += 1
                continue
            a = D[k, idx].sum() / (idx.size - 1)
            b = min(D[k, groups[j]].mean() for j in live if j != i)
            top = max(a, b)
            s = 0.0 if top == 0 else (b - a) / top
            vals.append(s)
            s_all[k] = s
        per_cluster[i] = (sum(vals), idx.size)
    if skipped:
        flags.append(f"{skipped} singleton object(s) skipped")
    if variant == "standard":
        return float(s_all.mean()), flags
    total = sum(v / size for v, size in per_cluster.values())
    return float(total / (data.n * c)), flags


def _index_i(data, model, U, **_):
    X, V = _features(data), _prototypes(model)
    labels = _crisp(U)
    c = V.shape[0]
    xbar = X.mean(axis=0)
    spread = np.sqrt(squared_distances(V, V)).max()
    e1 = np.sqrt(np.sum((X - xbar) ** 2, axis=1)).sum()
    ec = np.sqrt(squared_distances(X, V))[labels, np.arange(data.n)].sum()
    if ec <= 0:
        return np.inf, ["zero within-cluster distance"]
    return float(spread * e1 / (data.n * c * ec)), []


def _dunn(data, model, U, **_):
    X = _features(data)
    labels, groups = _crisp_groups(data, U)
    live = [g for g in groups if g.size]
    if len(live) < 2:
        return -np.inf, ["fewer than two non-empty clusters"]
    D = _pairwise(X)
    same = labels[:, None] == labels[None, :]
    sep = D[~same].min()
    diam = D[same].max()
    if diam <= 0:
        return np.inf, ["all clusters have zero diameter"]
    return float(sep / diam), []


def _calinski_harabasz(data, model, U, **_):
    X, V, M = _features(data), _prototypes(model), _membership(U)
    c, n = M.shape
    if c < 2:
        raise DomainError("the Calinski-Harabasz index needs c >= 2")
    xbar = X.mean(axis=0)
    W = M ** 2
    between = np.sum(W * np.sum((V - xbar) ** 2, axis=1)[:, None])
    within = np.sum(W * squared_distances(X, V))
    if within <= 0:
        return np.inf, ["zero within-cluster scatter"]
    return float((n - c) * between / ((c - 1) * within)), []


def partition_coefficient(U) -> float:
    """Mean over objects of ``sum_i u_ik^2``; 1 for hard, ``1/c`` for uniform memberships."""
    M = _membership(U)
    return float(np.sum(M ** 2) / M.shape[1])


def partition_entropy(U) -> float:
    """``-(1/n) sum u log u`` with ``0 log 0 = 0``; 0 for hard, ``log c`` for uniform."""
    M = _membership(U)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(M > 0, M * np.log(M), 0.0)
    return float(-t.sum() / M.shape[1]) + 0.0


_EVALUATORS = {
    "xie_beni": lambda data, model, U, tol=TIE_TOL, **_: _xie_beni(data, model, U, tol),
    "kwon": _kwon,
    "v_p": _v_p,
    "davies_bouldin": _davies_bouldin,
    "fs": _fs,
    "silhouette": _silhouette,
    "index_i": _index_i,
    "dunn": _dunn,
    "calinski_harabasz": _calinski_harabasz,
    "partition_coefficient": lambda data, model, U, **_: (partition_coefficient(U), []),
    "partition_entropy": lambda data, model, U, **_: (partition_entropy(U), ["sign: -sum u log u"]),
}

VARIANT_INDICES = ("davies_bouldin", "silhouette")


def compute_index(name: str, data: DataSet, model, U, variant="paper", m=2.0,
                  tol=TIE_TOL) -> IndexValue:
    """Evaluate one validity index and annotate it with its direction and flags."""
    if name not in _EVALUATORS:
        raise ConfigurationError(f"unknown index {name!r}; choose from {INDEX_NAMES}")
    if variant not in ("paper", "standard"):
        raise DomainError(f"unknown variant {variant!r}")
    value, flags = _EVALUATORS[name](data, model, U, variant=variant, m=m, tol=tol)
    used = variant if name in VARIANT_INDICES else "paper"
    return IndexValue(name, float(value), DIRECTIONS[name], used, list(flags))


def needs_prototypes(name):
    return name not in ("v_p", "silhouette", "dunn", "partition_coefficient",
                        "partition_entropy")


def validity_report(data: DataSet, model, U, names=None, variant="paper", m=2.0) -> dict:
    """All applicable indices keyed by name.

    Indices that need prototypes are skipped for exemplar models; indices that
    need features are skipped when the dataset has none.
    """
    out = {}
    c = _membership(U).shape[0]
    for name in names or INDEX_NAMES:
        if needs_prototypes(name) and not isinstance(model, Prototype):
            continue
        if name not in ("v_p", "partition_coefficient", "partition_entropy") \
                and not data.has("features"):
            continue
        if c < 2 and name in ("xie_beni", "kwon", "v_p", "calinski_harabasz"):
            continue
        out[name] = compute_index(name, data, model, U, variant, m)
    return out


# --- extreme value audit -----------------------------------------------------

def improper_variants(data: DataSet, model, U) -> dict:
    """Improper clusterings built on the same data as a given result.

    * ``coincident``: every prototype moved to the global mean; memberships
      recomputed from those prototypes, which makes them uniform.
    * ``uninformative``: original prototypes, every column equal to a fixed
      vector with distinct entries proportional to ``1, ..., c``.
    * ``absolute_uninformative``: original prototypes, all memberships ``1/c``.
    """
    M = _membership(U)
    c, n = M.shape
    if c < 2:
        raise DomainError("improper variants need c >= 2")
    variants = {}
    uniform = np.full((c, n), 1.0 / c)
    if isinstance(model, Prototype):
        xbar = _features(data).mean(axis=0)
        variants["coincident"] = (Prototype(np.tile(xbar, (c, 1))), uniform)
    elif isinstance(model, Exemplar):
        everyone = tuple(range(n))
        variants["coincident"] = (Exemplar(tuple(everyone for _ in range(c))), uniform)
    pi = np.arange(1, c + 1, dtype=float)
    pi /= pi.sum()
    variants["uninformative"] = (model, np.kron(pi[:, None], np.ones((1, n))))
    variants["absolute_uninformative"] = (model, uniform)
    return variants


@dataclass
class AuditReport:
    index: str
    direction: str
    proper_value: float
    variant_values: dict
    conforming: bool
    nonconforming_variants: list

    def to_dict(self):
        def enc(v):
            return ("inf" if v > 0 else "-inf") if np.isinf(v) else v
        return {"index": self.index, "direction": self.direction,
                "proper_value": enc(self.proper_value),
                "variant_values": {k: enc(v) for k, v in self.variant_values.items()},
                "conforming": self.conforming,
                "nonconforming_variants": self.nonconforming_variants}


def extreme_value_audit(name: str, data: DataSet, model, U, variants=None,
                        variant="paper", m=2.0) -> AuditReport:
    """Does the index score every improper variant strictly worse than the given result?

    Non-conforming indices are reported, not raised.
    """
    variants = variants if variants is not None else improper_variants(data, model, U)
    base = compute_index(name, data, model, U, variant, m)
    values, bad = {}, []
    for label, (vmodel, vU) in variants.items():
        v = compute_index(name, data, vmodel, vU, variant, m).value
        values[label] = v
        if not is_better(base.value, v, base.direction):
            bad.append(label)
    return AuditReport(name, base.direction, base.value, values, not bad, bad)
