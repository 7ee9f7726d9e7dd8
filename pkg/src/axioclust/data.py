"""Datasets, partition matrices and the partition taxonomy.

Partitions are stored as dense ``c x n`` arrays: row ``i`` is a cluster,
column ``k`` an object.  Objects and clusters are indexed from 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError, DomainError, StructuralError

EPS_VAL = 1e-9
TIE_TOL = 1e-12
SYMMETRY_TOL = 1e-9

KINDS = ("hard", "soft", "possibilistic")


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DataSet:
    """One set of ``n`` objects seen through up to three views.

    Parameters
    ----------
    features : array of shape (n, r), optional
        Feature matrix; a 1-D array is read as ``r = 1``.
    similarity : array of shape (n, n), optional
        Nonnegative symmetric similarity matrix.
    adjacency : array of shape (n, n), optional
        Nonnegative adjacency matrix of a graph on the objects.
    """

    features: Optional[np.ndarray] = None
    similarity: Optional[np.ndarray] = None
    adjacency: Optional[np.ndarray] = None
    n: int = field(init=False)

    def __post_init__(self):
        sizes = []
        if self.features is not None:
            f = np.asarray(self.features, dtype=float)
            if f.ndim == 1:
                f = f[:, None]
            if f.ndim != 2:
                raise StructuralError("features must be a 2-D array")
            if not np.all(np.isfinite(f)):
                raise DomainError("features contain non-finite values")
            object.__setattr__(self, "features", _frozen(f))
            sizes.append(f.shape[0])
        for name in ("similarity", "adjacency"):
            m = getattr(self, name)
            if m is None:
                continue
            m = np.asarray(m, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise StructuralError(f"{name} must be a square matrix")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise DomainError(f"{name} entries must be finite and nonnegative")
            if name == "similarity":
                asym = np.abs(m - m.T)
                if asym.max(initial=0.0) > SYMMETRY_TOL:
                    k, l = np.unravel_index(np.argmax(asym), asym.shape)
                    raise DomainError(f"similarity is not symmetric at ({k}, {l})")
            object.__setattr__(self, name, _frozen(m))
            sizes.append(m.shape[0])
        if not sizes:
            raise ConfigurationError("a dataset needs at least one view")
        if len(set(sizes)) != 1:
            raise StructuralError(f"views disagree on the object count: {sizes}")
        if sizes[0] < 1:
            raise StructuralError("a dataset needs at least one object")
        object.__setattr__(self, "n", sizes[0])

    @property
    def degrees(self) -> np.ndarray:
        """Row sums of the adjacency matrix, recomputed on every access."""
        return self.require("adjacency").sum(axis=1)

    def require(self, view: str) -> np.ndarray:
        value = getattr(self, view)
        if value is None:
            raise ConfigurationError(f"this operation needs the '{view}' view")
        return value

    def has(self, view: str) -> bool:
        return getattr(self, view) is not None


@dataclass(frozen=True, eq=False)
class Partition:
    """A ``c x n`` nonnegative membership matrix with a declared kind."""

    U: np.ndarray
    kind: str = "soft"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown partition kind {self.kind!r}")
        U = np.asarray(self.U, dtype=float)
        if U.ndim != 2 or U.shape[0] < 1 or U.shape[1] < 1:
            raise StructuralError("a partition matrix must be 2-D with c >= 1 and n >= 1")
        if not np.all(np.isfinite(U)):
            raise DomainError("partition entries must be finite")
        if np.any(U < 0):
            raise DomainError("partition entries must be nonnegative")
        object.__setattr__(self, "U", _frozen(U))

    @property
    def c(self) -> int:
        return self.U.shape[0]

    @property
    def n(self) -> int:
        return self.U.shape[1]

    @classmethod
    def from_labels(cls, labels, c=None) -> "Partition":
        """Hard partition with ``u[labels[k], k] = 1``."""
        labels = np.asarray(labels, dtype=int)
        if labels.ndim != 1:
            raise StructuralError("labels must be a 1-D vector")
        if c is None:
            c = int(labels.max()) + 1
        if labels.min(initial=0) < 0 or labels.max(initial=0) >= c:
            raise StructuralError("labels out of range")
        U = np.zeros((c, labels.size))
        U[labels, np.arange(labels.size)] = 1.0
        return cls(U, "hard")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    constraint: Optional[str] = None
    row: Optional[int] = None
    column: Optional[int] = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        where = []
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column}")
        return f"violates '{self.constraint}'" + (f" at {', '.join(where)}" if where else "")


def _as_partition(U, kind=None) -> Partition:
    if isinstance(U, Partition):
        if kind is not None and kind != U.kind:
            return Partition(U.U, kind)
        return U
    return Partition(U, kind or "soft")


def validate_partition(U, kind=None, eps=EPS_VAL) -> ValidationReport:
    """Check the constraints that define a hard, soft or possibilistic partition.

    For ``c = 1`` the single row is allowed to sum to ``n``; every other
    row-sum bound is applied as written.
    """
    P = _as_partition(U, kind)
    M, c, n = P.U, P.c, P.n
    cols = M.sum(axis=0)
    rows = M.sum(axis=1)

    if P.kind == "hard":
        binary = (np.abs(M) <= eps) | (np.abs(M - 1) <= eps)
        if not binary.all():
            i, k = np.argwhere(~binary)[0]
            return ValidationReport(False, "entries in {0,1}", int(i), int(k))
        bad = np.flatnonzero(np.abs(cols - 1) > eps)
        if bad.size:
            return ValidationReport(False, "column sums equal 1", None, int(bad[0]))
        if c >= 2:
            bad = np.flatnonzero((rows < 1 - eps) | (rows > n - 1 + eps))
            if bad.size:
                return ValidationReport(False, "row sums in [1, n-1]", int(bad[0]), None)
        return ValidationReport(True)

    if P.kind == "soft":
        bad = np.flatnonzero(np.abs(cols - 1) > eps)
        if bad.size:
            return ValidationReport(False, "column sums equal 1", None, int(bad[0]))
        over = M > 1 + eps
        if over.any():
            i, k = np.argwhere(over)[0]
            return ValidationReport(False, "entries in [0,1]", int(i), int(k))
        upper = n - eps if c >= 2 else n + eps
        bad = np.flatnonzero((rows <= eps) | (rows >= upper))
        if bad.size:
            return ValidationReport(False, "row sums in (0, n)", int(bad[0]), None)
        return ValidationReport(True)

    bad = np.flatnonzero(cols <= 0)
    if bad.size:
        return ValidationReport(False, "column sums positive", None, int(bad[0]))
    bad = np.flatnonzero(rows <= 0)
    if bad.size:
        return ValidationReport(False, "row sums positive", int(bad[0]), None)
    return ValidationReport(True)


def require_valid(U, kind=None) -> Partition:
    P = _as_partition(U, kind)
    report = validate_partition(P)
    if not report.ok:
        raise StructuralError(f"invalid {P.kind} partition: {report.describe()}")
    return P


# --- strictness helpers shared with the axiom checkers -----------------------

def winner_margins(S: np.ndarray) -> np.ndarray:
    """``S[i, k] - max_{j != i} S[j, k]`` for a score matrix (higher is better).

    Equal infinite scores count as a tie (margin 0).  With one row the
    margin is ``+inf``.
    """
    S = np.asarray(S, dtype=float)
    c, n = S.shape
    if c == 1:
        return np.full((1, n), np.inf)
    order = np.argsort(-S, axis=0, kind="stable")
    cols = np.arange(n)
    top1 = S[order[0], cols]
    top2 = S[order[1], cols]
    other = np.broadcast_to(top1, S.shape).copy()
    other[order[0], cols] = top2
    with np.errstate(invalid="ignore"):
        margin = S - other
    margin[np.isnan(margin)] = 0.0
    return margin


def column_gaps(S: np.ndarray) -> np.ndarray:
    """Gap between the best and second-best entry of every column."""
    return winner_margins(S).max(axis=0)


def argmax_sets(S: np.ndarray, tol: float = TIE_TOL) -> list:
    """Per column, the set of rows whose score is within ``tol`` of the best."""
    S = np.asarray(S, dtype=float)
    best = S.max(axis=0)
    with np.errstate(invalid="ignore"):
        gap = best - S
    gap[np.isnan(gap)] = 0.0
    near = gap <= tol
    return [frozenset(np.flatnonzero(near[:, k]).tolist()) for k in range(S.shape[1])]


# --- taxonomy ----------------------------------------------------------------

@dataclass(frozen=True)
class PartitionClass:
    """Outcome of :func:`classify_partition`.

    ``witnesses`` maps each cluster that strictly wins somewhere to the first
    object where it does.  ``tied_columns`` lists objects without a strict
    maximum; ``unwitnessed_clusters`` lists clusters that never strictly win.
    """

    top: str
    flags: frozenset = frozenset()
    witnesses: dict = field(default_factory=dict)
    tied_columns: tuple = ()
    unwitnessed_clusters: tuple = ()

    @property
    def violations(self) -> dict:
        return {"tied_columns": list(self.tied_columns),
                "unwitnessed_clusters": list(self.unwitnessed_clusters)}


def classify_partition(U, kind=None, tol=TIE_TOL) -> PartitionClass:
    """Proper / overlapping / improper classification of a partition matrix.

    Raises
    ------
    StructuralError
        If ``U`` does not satisfy the constraints of its kind.
    """
    P = require_valid(U, kind)
    M, c = P.U, P.c
    margin = winner_margins(M)
    strict = margin > tol
    tied = tuple(int(k) for k in np.flatnonzero(~strict.any(axis=0)))
    witnesses = {}
    for i in range(c):
        hits = np.flatnonzero(strict[i])
        if hits.size:
            witnesses[i] = int(hits[0])
    unwitnessed = tuple(i for i in range(c) if i not in witnesses)

    if unwitnessed:
        top = "improper"
    elif tied:
        top = "overlapping"
    else:
        top = "proper"

    flags = set()
    if c >= 2:
        for i in range(c):
            for j in range(c):
                if i != j and np.all(M[i] <= M[j] + tol):
                    flags.add("covering")
                    if np.all(np.abs(M[i] - M[j]) <= tol):
                        flags.add("coincident")
        if np.all(M.max(axis=1) - M.min(axis=1) <= tol):
            flags.add("uninformative")
            if np.all(np.abs(M - 1.0 / c) <= tol):
                flags.add("absolute_uninformative")
    return PartitionClass(top, frozenset(flags), witnesses, tied, unwitnessed)


def make_uninformative(pi, n: int) -> Partition:
    """Soft partition whose every column equals the probability vector ``pi``."""
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size < 1:
        raise DomainError("pi must be a non-empty vector")
    if np.any(pi < 0) or abs(pi.sum() - 1.0) > EPS_VAL:
        raise DomainError("pi must be a probability vector")
    if int(n) < 1:
        raise DomainError("n must be at least 1")
    return Partition(np.kron(pi[:, None], np.ones((1, int(n)))), "soft")


def hard_assignment(U, tol=TIE_TOL):
    """Argmax cluster of every object, lowest index on ties.

    Returns
    -------
    labels : ndarray of int, shape (n,)
    ties : frozenset
        Objects whose two largest memberships differ by at most ``tol``.
    """
    M = U.U if isinstance(U, Partition) else np.asarray(U, dtype=float)
    if M.ndim != 2:
        raise StructuralError("a partition matrix must be 2-D")
    labels = np.argmax(M, axis=0)
    if M.shape[0] < 2:
        return labels, frozenset()
    gaps = column_gaps(M)
    return labels, frozenset(int(k) for k in np.flatnonzero(gaps <= tol))
