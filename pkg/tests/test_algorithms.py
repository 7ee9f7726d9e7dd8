import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axioclust.algorithms import (
    AlgoConfig,
    _initial_prototypes,
    c_means,
    cml_gaussian,
    fcm_memberships,
    fuzzy_c_means,
    run,
    run_framework,
    sample_weighted_gaussian,
    sample_weighted_multinomial,
    similarity_from_features,
    single_linkage,
)
from axioclust.categorization import Prototype, classify_clustering_result, squared_distances
from axioclust.categorization import sq_euclidean
from axioclust.data import DataSet, hard_assignment
from axioclust.exceptions import ConfigurationError, DomainError, IngestError, IterationError

from conftest import D4_POINTS, two_cliques


def _groups(labels):
    out = {}
    for k, lab in enumerate(np.asarray(labels).tolist()):
        out.setdefault(lab, []).append(k)
    return sorted(tuple(g) for g in out.values())


D4_GROUPS = [(0, 1), (2, 3)]


# --- framework -----------------------------------------------------------------

def test_zero_iterations_rejected():
    with pytest.raises(DomainError):
        AlgoConfig(c=2, max_iter=0)


def test_unknown_init_rejected():
    with pytest.raises(DomainError):
        AlgoConfig(c=2, init="kmeans++")


def test_constant_objective_stops_after_one_sweep(d4):
    model0 = Prototype([[0.0], [10.0]])
    U0 = np.array([[1.0, 1, 0, 0], [0, 0, 1, 1]])
    R = run_framework(d4, AlgoConfig(c=2), lambda U: model0, lambda model: U0,
                      lambda model, U: 7.0, U0, affinity=sq_euclidean(), kind="hard",
                      initial_model=model0)
    assert R.iterations == 1 and R.converged


def test_step_failures_carry_the_iteration(d4):
    calls = []

    def step_model(U):
        calls.append(1)
        if len(calls) == 2:
            raise DomainError("boom")
        return Prototype([[0.0], [10.0]])

    U0 = np.array([[1.0, 1, 0, 0], [0, 0, 1, 1]])
    with pytest.raises(IterationError) as info:
        run_framework(d4, AlgoConfig(c=2), step_model, lambda m: U0, lambda m, U: float(len(calls)),
                      U0, affinity=sq_euclidean(), kind="hard")
    assert info.value.iteration == 2


def test_c_means_steps_through_the_framework_reproduce_c_means(d4):
    cfg = AlgoConfig(c=2, seed=4)
    X = d4.features
    V0, _ = _initial_prototypes(X, cfg, np.random.default_rng(cfg.seed))

    def assign(model):
        lab = np.argmin(squared_distances(X, model.V), axis=0)
        U = np.zeros((2, 4))
        U[lab, np.arange(4)] = 1
        return U

    def means(U):
        return Prototype((U @ X) / U.sum(axis=1, keepdims=True))

    R = run_framework(d4, cfg, means, assign, lambda m, U: float(np.sum(U * squared_distances(X, m.V))),
                      assign(Prototype(V0)), affinity=sq_euclidean(), kind="hard",
                      initial_model=Prototype(V0))
    ref = c_means(d4, cfg)
    assert R.trace == ref.trace
    np.testing.assert_array_equal(R.model.V, ref.model.V)


def test_unknown_algorithm(d4):
    with pytest.raises(ConfigurationError):
        run("k_medoids", d4, AlgoConfig(c=2))


# --- C-means / CML -----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(20))
def test_c_means_d4(d4, seed):
    R = c_means(d4, AlgoConfig(c=2, seed=seed))
    assert R.trace[-1] == 1.0
    assert sorted(R.model.V[:, 0].tolist()) == [0.5, 10.5]
    assert all(b <= a for a, b in zip(R.trace, R.trace[1:]))
    assert _groups(R.labels) == D4_GROUPS


def test_c_means_other_inits(d4):
    for init in ("farthest", "random-partition"):
        R = c_means(d4, AlgoConfig(c=2, seed=3, init=init))
        assert R.trace[-1] == 1.0


def test_c_means_single_cluster_is_the_mean(d4):
    R = c_means(d4, AlgoConfig(c=1))
    assert R.model.V[0, 0] == np.mean(D4_POINTS)


def test_c_means_identical_points_are_totally_coincident():
    data = DataSet(features=np.full((5, 2), 3.0))
    R = c_means(data, AlgoConfig(c=2))
    cls = classify_clustering_result(R)
    assert cls.top == "improper" and cls.totally_coincident


def test_c_means_rejects_c_above_n(d4):
    with pytest.raises(DomainError):
        c_means(d4, AlgoConfig(c=5))


@pytest.mark.parametrize("seed", range(20))
def test_cml_matches_c_means(d4, seed):
    cfg = AlgoConfig(c=2, seed=seed)
    a, b = c_means(d4, cfg), cml_gaussian(d4, cfg)
    assert a.labels.tolist() == b.labels.tolist()
    assert b.trace[-1] == pytest.approx(-a.trace[-1], abs=1e-12)
    assert b.trace[-1] == pytest.approx(-1.0, abs=1e-12)


def test_cml_labels_invariant_under_sigma(d4):
    base = cml_gaussian(d4, AlgoConfig(c=2, seed=1)).labels
    for sigma in (0.01, 3.0, 100.0):
        assert cml_gaussian(d4, AlgoConfig(c=2, seed=1, sigma=sigma)).labels.tolist() == base.tolist()


def test_cml_single_cluster(d4):
    assert cml_gaussian(d4, AlgoConfig(c=1)).model.V[0, 0] == np.mean(D4_POINTS)


# --- fuzzy c-means ----------------------------------------------------------------

def test_fcm_d4(d4):
    R = fuzzy_c_means(d4, AlgoConfig(c=2, m=2.0, tol=1e-12))
    labels, ties = hard_assignment(R.partition)
    assert _groups(labels) == D4_GROUPS and not ties
    np.testing.assert_allclose(R.partition.U.sum(axis=0), 1.0, atol=1e-12)
    assert all(b <= a + 1e-12 for a, b in zip(R.trace, R.trace[1:]))


def test_fcm_single_cluster(d4):
    R = fuzzy_c_means(d4, AlgoConfig(c=1))
    assert np.all(R.partition.U == 1.0)
    assert R.model.V[0, 0] == pytest.approx(np.mean(D4_POINTS))


def test_fcm_needs_m_above_one(d4):
    with pytest.raises(DomainError):
        fuzzy_c_means(d4, AlgoConfig(c=2, m=1.0))


def test_fcm_memberships_share_exact_hits():
    U = fcm_memberships(np.array([[0.0, 4.0], [0.0, 1.0]]), 2.0)
    np.testing.assert_allclose(U[:, 0], [0.5, 0.5])
    np.testing.assert_allclose(U[:, 1], [0.2, 0.8])


# --- sample-weighted Gaussian -------------------------------------------------------

def test_sample_weighted_gaussian_d4(d4):
    R = sample_weighted_gaussian(d4, AlgoConfig(c=2, m=1.0, beta=1.0, tol=1e-12))
    labels, _ = hard_assignment(R.partition)
    assert _groups(labels) == D4_GROUPS
    simplex = R.meta["simplex"]
    assert len(simplex["alpha_sum_error"]) == R.iterations
    assert max(simplex["alpha_sum_error"]) <= 1e-12
    assert max(simplex["column_sum_error"]) <= 1e-12
    assert R.meta["equivalency"]


def test_sample_weighted_gaussian_single_cluster_first_sweep(d4):
    m, beta = 2.0, 3.0
    R = sample_weighted_gaussian(d4, AlgoConfig(c=1, m=m, beta=beta, max_iter=1))
    X = np.array(D4_POINTS)
    assert R.model.V[0, 0] == pytest.approx(X.mean())
    assert R.model.alpha.tolist() == [1.0]
    assert np.all(R.partition.U == 1.0)
    expected = np.exp(-((X - X.mean()) ** 2) / (m * beta)) ** m
    np.testing.assert_allclose(R.meta["weights"], expected, rtol=1e-12)


def _random_features(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 31))
    c = int(rng.integers(2, min(4, n) + 1))
    X = np.concatenate([rng.normal(loc=rng.normal(scale=4, size=2), size=(n // c + 1, 2))
                        for _ in range(c)])[:n]
    return DataSet(features=X), c


@pytest.mark.parametrize("seed", range(25))
def test_sample_weighted_gaussian_ascends(seed):
    data, c = _random_features(seed)
    m = [1.0, 1.5, 2.0, 4.0][seed % 4]
    R = sample_weighted_gaussian(data, AlgoConfig(c=c, m=m, beta=2.0, seed=seed))
    tr = np.array(R.trace)
    assert np.all(np.diff(tr) >= -1e-9 * (1 + np.abs(tr[:-1])))


# --- sample-weighted multinomial ------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_sample_weighted_multinomial_recovers_cliques(seed):
    R = sample_weighted_multinomial(DataSet(adjacency=two_cliques()), AlgoConfig(c=2, m=1.0, seed=seed))
    labels, _ = hard_assignment(R.partition)
    assert _groups(labels) == [(0, 1, 2, 3), (4, 5, 6, 7)]
    assert max(R.meta["simplex"]["theta_row_sum_error"]) <= 1e-12
    np.testing.assert_allclose(R.model.theta.sum(axis=1), 1.0, atol=1e-12)


def test_sample_weighted_multinomial_single_cluster():
    A = two_cliques(bridge=True)
    R = sample_weighted_multinomial(DataSet(adjacency=A), AlgoConfig(c=1, max_iter=1))
    d = A.sum(axis=1)
    np.testing.assert_allclose(R.model.theta[0], d / d.sum(), rtol=1e-12)


def test_sample_weighted_multinomial_rejects_isolated_nodes():
    A = two_cliques()
    A[0, :] = A[:, 0] = 0.0
    with pytest.raises(IngestError):
        sample_weighted_multinomial(DataSet(adjacency=A), AlgoConfig(c=2))


@pytest.mark.parametrize("seed", range(10))
def test_sample_weighted_multinomial_ascends(seed):
    rng = np.random.default_rng(seed)
    n = 12
    A = np.triu((rng.random((n, n)) < 0.35).astype(float), 1)
    A = A + A.T
    A[np.arange(n), (np.arange(n) + 1) % n] = A[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    R = sample_weighted_multinomial(DataSet(adjacency=A), AlgoConfig(c=3, m=[1.0, 2.0][seed % 2],
                                                                     seed=seed))
    tr = np.array(R.trace)
    assert np.all(np.diff(tr) >= -1e-9 * (1 + np.abs(tr[:-1])))


# --- single linkage --------------------------------------------------------------------

def test_single_linkage_d4(d4):
    data = DataSet(similarity=similarity_from_features(d4.features))
    R = single_linkage(data, 2)
    assert _groups(R.labels) == D4_GROUPS
    assert [sorted(s) for s in R.model.members] == [[0, 1], [2, 3]]
    assert classify_clustering_result(R).top == "proper"


def test_single_linkage_extremes(d4):
    data = DataSet(similarity=similarity_from_features(d4.features))
    assert single_linkage(data, 4).labels.tolist() == [0, 1, 2, 3]
    assert single_linkage(data, 1).labels.tolist() == [0, 0, 0, 0]


def test_single_linkage_merge_heights_decrease(d4):
    data = DataSet(similarity=similarity_from_features(d4.features))
    tr = single_linkage(data, 1).trace
    assert list(tr) == sorted(tr, reverse=True)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=12, unique=True),
       st.integers(1, 4))
def test_single_linkage_matches_connected_components(xs, c):
    """Cutting the chain of 1-D points at its c-1 widest gaps gives single linkage."""
    c = min(c, len(xs))
    xs = sorted(xs)
    gaps = np.diff(xs)
    if len(set(gaps.tolist())) < gaps.size:
        return  # tied gaps make the cut ambiguous
    cut = set(np.argsort(-gaps)[: c - 1].tolist())
    expected, lab = [], 0
    for k in range(len(xs)):
        expected.append(lab)
        if k in cut:
            lab += 1
    data = DataSet(similarity=similarity_from_features(np.array(xs)))
    assert _groups(single_linkage(data, c).labels) == _groups(expected)
