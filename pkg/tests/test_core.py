import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aced.core import (
    HypothesisClass,
    ImplicitClassError,
    LabelModel,
    Pool,
    errors_all,
    gap_table,
    pool_error,
    to_bandit,
)
from aced.complexity import make_core_tail_instance


def small_classes(max_h=8, max_n=6):
    return st.tuples(st.integers(1, max_h), st.integers(2, max_n)).flatmap(
        lambda shape: arrays(np.int8, shape, elements=st.integers(0, 1))
    )


def test_pool_validation():
    with pytest.raises(ValueError):
        Pool(n=0)
    with pytest.raises(ValueError):
        Pool(n=3, features=np.zeros((2, 2)))
    p = Pool(n=3)
    assert p.ids == ("0", "1", "2")


def test_perfect_classifier_has_zero_error():
    hclass = HypothesisClass(np.array([[0, 0, 0]]))
    labels = LabelModel(np.zeros(3))
    assert pool_error(hclass, 0, labels) == 0.0


def test_core_tail_instance_gaps_are_quarter():
    # eta = 0 makes every nonempty hypothesis pay (m+1)/n = 0.25 at m=4
    inst = make_core_tail_instance(4)
    errs = errors_all(inst.hypotheses, inst.labels)
    assert errs[0] == 0.0
    assert np.allclose(errs[1:], 0.25)


@given(small_classes(), st.data())
def test_pool_error_matches_direct_sum(labelings, data):
    hclass = HypothesisClass(labelings, dedup=False)
    n = hclass.n
    eta = np.array(data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    labels = LabelModel(eta)
    h = data.draw(st.integers(0, hclass.size - 1))
    direct = sum(
        eta[i] * (1 - labelings[h][i]) + (1 - eta[i]) * labelings[h][i] for i in range(n)
    ) / n
    assert pool_error(hclass, h, labels) == pytest.approx(direct, abs=1e-12)


@given(small_classes(), st.data())
def test_pool_error_affine_in_eta(labelings, data):
    hclass = HypothesisClass(labelings, dedup=False)
    n = hclass.n
    eta1 = np.array(data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    eta2 = np.array(data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    h = data.draw(st.integers(0, hclass.size - 1))
    mid = pool_error(hclass, h, LabelModel((eta1 + eta2) / 2))
    ends = 0.5 * (pool_error(hclass, h, LabelModel(eta1)) + pool_error(hclass, h, LabelModel(eta2)))
    assert mid == pytest.approx(ends, abs=1e-12)


def test_pool_error_index_out_of_range():
    hclass = HypothesisClass(np.array([[0, 1]]))
    with pytest.raises(ValueError):
        pool_error(hclass, 5, LabelModel(np.array([0.5, 0.5])))


def test_gap_table_singleton_and_ties():
    hclass = HypothesisClass(np.array([[0, 1]]))
    gt = gap_table(hclass, LabelModel(np.array([0.3, 0.3])))
    assert gt.h_star == 0 and gt.gaps.tolist() == [0.0]

    inst = make_core_tail_instance(4)
    gt = gap_table(inst.hypotheses, inst.labels)
    assert gt.h_star == 0 and gt.nu == 0.0
    assert np.allclose(gt.gaps[1:], 0.25)
    assert gt.delta_min == pytest.approx(0.25)


@given(small_classes(), st.data())
def test_gap_table_matches_brute_force(labelings, data):
    hclass = HypothesisClass(labelings)
    n = hclass.n
    eta = np.array(data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    labels = LabelModel(eta)
    errs = [pool_error(hclass, h, labels) for h in range(hclass.size)]
    gt = gap_table(hclass, labels)
    assert gt.h_star == int(np.argmin(errs))
    assert gt.nu == pytest.approx(min(errs), abs=1e-12)
    assert np.all(gt.gaps >= 0)


def test_gap_table_rejects_implicit_class():
    class FakeOracle:
        n = 3
        features = np.zeros((3, 1))

    hclass = HypothesisClass(oracle=FakeOracle())
    with pytest.raises(ImplicitClassError):
        gap_table(hclass, LabelModel(np.full(3, 0.5)))


def test_query_deterministic_cases():
    labels = LabelModel(np.array([1.0, 0.0]))
    assert all(labels.query(0) == 1 for _ in range(10))
    assert all(labels.query(1) == 0 for _ in range(10))
    with pytest.raises(IndexError):
        labels.query(7)


def test_persistent_queries_are_idempotent():
    labels = LabelModel(np.full(20, 0.5), persistent=True, seed=11)
    first = [labels.query(i) for i in range(20)]
    for _ in range(3):
        assert [labels.query(i) for i in range(20)] == first
    assert labels.query_many(range(20)).tolist() == first


def test_query_empirical_mean():
    labels = LabelModel(np.array([0.3]), seed=4)
    draws = labels.query_many(np.zeros(100_000, dtype=int))
    assert abs(draws.mean() - 0.3) < 0.01


def test_to_bandit_exact_relation():
    inst = make_core_tail_instance(3)
    bv = to_bandit(inst.hypotheses, inst.labels)
    assert np.all(bv.mu == -1.0)
    eta = inst.labels.eta
    for h in range(inst.hypotheses.size):
        err = pool_error(inst.hypotheses, h, inst.labels)
        assert err == pytest.approx((eta.sum() - bv.set_sum(h)) / inst.n, abs=1e-12)


def test_to_bandit_neutral_means():
    hclass = HypothesisClass(np.array([[0, 1], [1, 0]]))
    bv = to_bandit(hclass, LabelModel(np.full(2, 0.5)))
    assert np.all(bv.mu == 0.0)
    assert bv.set_sum(0) == bv.set_sum(1) == 0.0


@given(small_classes(), st.data())
def test_argmin_error_is_argmax_set_sum(labelings, data):
    hclass = HypothesisClass(labelings)
    n = hclass.n
    eta = np.array(data.draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 1.0]), min_size=n, max_size=n)))
    labels = LabelModel(eta)
    bv = to_bandit(hclass, labels)
    sums = np.array([bv.set_sum(h) for h in range(hclass.size)])
    errs = errors_all(hclass, labels)
    assert errs[np.argmax(sums)] == pytest.approx(errs.min(), abs=1e-12)


def test_dedup_keeps_first_occurrence_order():
    mat = np.array([[1, 0], [0, 1], [1, 0], [0, 0]])
    hclass = HypothesisClass(mat)
    assert hclass.labelings.tolist() == [[1, 0], [0, 1], [0, 0]]
