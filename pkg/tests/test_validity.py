import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axioclust.categorization import Exemplar, Prototype
from axioclust.data import DataSet
from axioclust.exceptions import ConfigurationError
from axioclust.validity import (
    INDEX_NAMES,
    MAX_BETTER,
    MIN_BETTER,
    compute_index,
    extreme_value_audit,
    improper_variants,
    partition_coefficient,
    partition_entropy,
    validity_report,
    xie_beni,
)

from conftest import D4_POINTS, oracle_ch, oracle_dunn, oracle_pc, oracle_xie_beni

V_D4 = [[0.5], [10.5]]
X_D4 = [[x] for x in D4_POINTS]
U_D4 = [[1, 1, 0, 0], [0, 0, 1, 1]]


def _value(name, data, model=Prototype(V_D4), U=np.array(U_D4, float), **kw):
    return compute_index(name, data, model, U, **kw).value


def test_xie_beni_d4(d4):
    assert xie_beni(d4, Prototype(V_D4), np.array(U_D4, float)) == pytest.approx(0.0025, abs=1e-12)
    assert xie_beni(d4, Prototype(V_D4), U_D4) == pytest.approx(oracle_xie_beni(X_D4, V_D4, U_D4),
                                                                 abs=1e-12)


@pytest.mark.parametrize("name", ["xie_beni", "kwon", "davies_bouldin"])
def test_coincident_prototypes_give_infinity(d4, name):
    iv = compute_index(name, d4, Prototype([[5.5], [5.5]]), np.array(U_D4, float))
    assert iv.value == np.inf and iv.flags


def test_xie_beni_is_scale_invariant(d4):
    base = _value("xie_beni", d4)
    scaled = compute_index("xie_beni", DataSet(features=7 * d4.features),
                           Prototype(7 * np.array(V_D4)), np.array(U_D4, float)).value
    assert scaled == pytest.approx(base, rel=1e-12)


def test_dunn_d4(d4):
    assert _value("dunn", d4) == pytest.approx(9.0, abs=1e-12)
    assert _value("dunn", d4) == pytest.approx(oracle_dunn(X_D4, [0, 0, 1, 1]), abs=1e-12)


def test_calinski_harabasz_d4(d4):
    assert _value("calinski_harabasz", d4) == pytest.approx(200.0, abs=1e-12)
    assert _value("calinski_harabasz", d4) == pytest.approx(oracle_ch(X_D4, V_D4, U_D4), abs=1e-12)


def test_partition_coefficient_extremes():
    assert partition_coefficient(np.array(U_D4, float)) == 1.0
    for c in (2, 3, 5):
        assert partition_coefficient(np.full((c, 6), 1 / c)) == pytest.approx(1 / c, abs=1e-12)
        assert partition_coefficient(np.full((c, 6), 1 / c)) == pytest.approx(
            oracle_pc(np.full((c, 6), 1 / c).tolist()), abs=1e-12)


def test_partition_entropy_extremes():
    assert partition_entropy(np.array(U_D4, float)) == 0.0
    assert partition_entropy(np.full((3, 4), 1 / 3)) == pytest.approx(np.log(3))


def test_davies_bouldin_variants(d4):
    # scatter 0.5 each, prototype gap 10: each ratio is 0.1
    assert _value("davies_bouldin", d4, variant="standard") == pytest.approx(0.1)
    assert _value("davies_bouldin", d4, variant="paper") == pytest.approx(0.2 / (4 * 2))


def test_silhouette_variants(d4):
    X = np.array(D4_POINTS)
    s = []
    for k, own in enumerate([0, 0, 1, 1]):
        same = [abs(X[k] - X[l]) for l in range(4) if l != k and [0, 0, 1, 1][l] == own]
        other = [abs(X[k] - X[l]) for l in range(4) if [0, 0, 1, 1][l] != own]
        a, b = np.mean(same), np.mean(other)
        s.append((b - a) / max(a, b))
    assert _value("silhouette", d4, variant="standard") == pytest.approx(np.mean(s))
    assert _value("silhouette", d4, variant="paper") == pytest.approx((sum(s[:2]) / 2 + sum(s[2:]) / 2)
                                                                      / (4 * 2))


def test_silhouette_skips_singletons():
    data = DataSet(features=[[0.0], [1.0], [10.0]])
    iv = compute_index("silhouette", data, Prototype([[0.5], [10.0]]),
                       np.array([[1.0, 1, 0], [0, 0, 1]]), variant="standard")
    assert any("singleton" in f for f in iv.flags)


def test_single_live_cluster_scores_worst(d4):
    U = np.array([[1.0, 1, 1, 1], [0, 0, 0, 0]])
    assert _value("dunn", d4, U=U) == -np.inf
    assert _value("davies_bouldin", d4, U=U) == np.inf


def test_directions_are_declared_for_every_index():
    assert set(INDEX_NAMES) == {
        "xie_beni", "kwon", "v_p", "davies_bouldin", "fs", "silhouette", "index_i", "dunn",
        "calinski_harabasz", "partition_coefficient", "partition_entropy"}


def test_report_skips_prototype_indices_for_exemplars():
    data = DataSet(features=X_D4)
    rep = validity_report(data, Exemplar(({0, 1}, {2, 3})), np.array(U_D4, float))
    assert "xie_beni" not in rep and "dunn" in rep


def test_prototype_index_needs_prototypes(d4):
    with pytest.raises(ConfigurationError):
        compute_index("xie_beni", d4, Exemplar(({0, 1}, {2, 3})), np.array(U_D4, float))


def test_report_values_carry_direction(d4):
    rep = validity_report(d4, Prototype(V_D4), np.array(U_D4, float))
    assert rep["xie_beni"].direction == MIN_BETTER
    assert rep["partition_coefficient"].direction == MAX_BETTER
    assert rep["xie_beni"].to_dict()["value"] == pytest.approx(0.0025)


# --- extreme value audit ------------------------------------------------------------------

def test_improper_variants_are_improper(d4):
    from axioclust.data import classify_partition
    for label, (model, U) in improper_variants(d4, Prototype(V_D4), np.array(U_D4, float)).items():
        assert classify_partition(U, "soft").top == "improper", label


@pytest.mark.parametrize("name", ["xie_beni", "partition_coefficient"])
def test_audit_xb_and_pc_conform_on_d4(d4, name):
    rep = extreme_value_audit(name, d4, Prototype(V_D4), np.array(U_D4, float))
    assert rep.conforming, rep.to_dict()
    assert set(rep.variant_values) == {"coincident", "uninformative", "absolute_uninformative"}


def test_audit_xb_coincident_is_infinite(d4):
    rep = extreme_value_audit("xie_beni", d4, Prototype(V_D4), np.array(U_D4, float))
    assert rep.variant_values["coincident"] == np.inf
    assert rep.to_dict()["variant_values"]["coincident"] == "inf"


def test_audit_reports_rather_than_raises(d4):
    # every index can be audited; non-conforming ones are simply listed
    for name in INDEX_NAMES:
        rep = extreme_value_audit(name, d4, Prototype(V_D4), np.array(U_D4, float))
        assert rep.conforming == (not rep.nonconforming_variants)


# --- properties ----------------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(4, 15), st.integers(0, 2**32 - 1))
def test_xie_beni_matches_oracle(c, n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    V = rng.normal(size=(c, 2))
    U = rng.dirichlet(np.ones(c), size=n).T
    got = xie_beni(DataSet(features=X), Prototype(V), U)
    assert got == pytest.approx(oracle_xie_beni(X.tolist(), V.tolist(), U.tolist()), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_partition_coefficient_bounds(c, n, seed):
    U = np.random.default_rng(seed).dirichlet(np.ones(c), size=n).T
    assert 1 / c - 1e-12 <= partition_coefficient(U) <= 1 + 1e-12
