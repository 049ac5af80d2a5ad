"""Wasserstein distance and candidate ranking tests."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import wasserstein_quantile_oracle
from qleak.errors import EmptyDistribution, MissingReference
from qleak.infer import CandidateSet, LabelRange
from qleak.match import (EmpiricalDistribution, rank_candidates,
                         wasserstein_1d, wasserstein_equal_size)


def _dist(samples, source="t"):
    return EmpiricalDistribution.from_samples(samples, source)


def test_identical_lists_zero():
    assert wasserstein_1d(_dist([3, 1, 2]), _dist([1, 2, 3])) == 0.0


def test_unit_translation():
    assert wasserstein_1d(_dist([0, 1]), _dist([1, 2])) == pytest.approx(1.0)


def test_unequal_sizes_hand_case():
    # CDF gap integration: P={1,2,3} vs Q={4} -> mean quantile gap 2
    assert wasserstein_1d(_dist([1, 2, 3]), _dist([4])) == pytest.approx(2.0)


def test_empty_distribution_rejected():
    with pytest.raises(EmptyDistribution):
        EmpiricalDistribution.from_samples([], "empty")


def test_samples_sorted_on_construction():
    d = _dist([5, 1, 4])
    assert d.samples == (1.0, 4.0, 5.0)


def test_random_pairs_match_quantile_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        xs = rng.normal(1e6, 1e4, size=100)
        ys = rng.normal(1.02e6, 2e4, size=100)
        got = wasserstein_1d(_dist(xs), _dist(ys))
        expected = wasserstein_quantile_oracle(xs, ys)
        assert got == pytest.approx(expected, rel=1e-9)


def test_random_unequal_sizes_match_oracle_and_scipy():
    rng = np.random.default_rng(1)
    for _ in range(30):
        xs = rng.uniform(0, 1e6, size=int(rng.integers(1, 80)))
        ys = rng.uniform(0, 1e6, size=int(rng.integers(1, 80)))
        got = wasserstein_1d(_dist(xs), _dist(ys))
        assert got == pytest.approx(wasserstein_quantile_oracle(xs, ys),
                                    rel=1e-9)
        assert got == pytest.approx(
            scipy.stats.wasserstein_distance(xs, ys), rel=1e-9)


def test_equal_size_shortcut_agreement():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 120))
        xs = rng.uniform(1e3, 1e9, size=n)
        ys = rng.uniform(1e3, 1e9, size=n)
        merge = wasserstein_1d(_dist(xs), _dist(ys))
        shortcut = wasserstein_equal_size(_dist(xs), _dist(ys))
        assert merge == pytest.approx(shortcut, rel=1e-12)


def test_equal_size_shortcut_requires_equal_counts():
    with pytest.raises(ValueError):
        wasserstein_equal_size(_dist([1, 2]), _dist([1, 2, 3]))


_SAMPLES = st.lists(st.floats(0, 1e9, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=40)


@settings(deadline=None, max_examples=80)
@given(_SAMPLES, _SAMPLES)
def test_metric_symmetry_and_nonnegativity(xs, ys):
    p, q = _dist(xs), _dist(ys)
    d = wasserstein_1d(p, q)
    assert d >= 0.0
    assert d == wasserstein_1d(q, p)
    assert wasserstein_1d(p, p) == 0.0


@settings(deadline=None, max_examples=60)
@given(_SAMPLES, _SAMPLES, _SAMPLES)
def test_triangle_inequality(xs, ys, zs):
    p, q, r = _dist(xs), _dist(ys), _dist(zs)
    lhs = wasserstein_1d(p, r)
    rhs = wasserstein_1d(p, q) + wasserstein_1d(q, r)
    assert lhs <= rhs + 1e-9 * max(1.0, rhs)


@settings(deadline=None, max_examples=60)
@given(_SAMPLES, _SAMPLES,
       st.floats(-1e6, 1e6, allow_nan=False))
def test_translation_covariance(xs, ys, c):
    base = wasserstein_1d(_dist(xs), _dist(ys))
    shifted = wasserstein_1d(_dist([x + c for x in xs]),
                             _dist([y + c for y in ys]))
    assert shifted == pytest.approx(base, rel=1e-9, abs=1e-6)


@settings(deadline=None, max_examples=60)
@given(_SAMPLES, _SAMPLES, st.floats(1e-3, 1e3, allow_nan=False))
def test_scale_covariance(xs, ys, a):
    base = wasserstein_1d(_dist(xs), _dist(ys))
    scaled = wasserstein_1d(_dist([x * a for x in xs]),
                            _dist([y * a for y in ys]))
    assert scaled == pytest.approx(a * base, rel=1e-9, abs=1e-6)


def _candidates(names):
    r = LabelRange(lo=0, hi=99, label_kind="qubits",
                   neighbor_ids=(("x", "x-r0"),), neighbor_distances=(0.0,))
    g = LabelRange(lo=0, hi=999, label_kind="gates",
                   neighbor_ids=(("x", "x-r0"),), neighbor_distances=(0.0,))
    return CandidateSet(members=frozenset(names), qubit_range=r, gate_range=g)


def test_single_candidate_is_top1():
    probe = _dist([1, 2, 3], "probe")
    refs = {"only": _dist([100, 200, 300])}
    ranking = rank_candidates(probe, refs, _candidates(["only"]))
    assert ranking.top1 == "only"


def test_verbatim_reference_ranks_first_with_zero():
    probe = _dist([10, 20, 30], "probe")
    refs = {"match": _dist([10, 20, 30]), "other": _dist([40, 50, 60])}
    ranking = rank_candidates(probe, refs, _candidates(["match", "other"]))
    assert ranking.entries[0] == ("match", 0.0)


def test_mean_shift_ranking():
    rng = np.random.default_rng(3)
    shape = np.sort(rng.uniform(0, 10, size=50))
    probe = _dist(shape + 190.0, "probe")
    refs = {"a100": _dist(shape + 100.0), "b200": _dist(shape + 200.0),
            "c300": _dist(shape + 300.0)}
    ranking = rank_candidates(probe, refs,
                              _candidates(["a100", "b200", "c300"]))
    assert ranking.top1 == "b200"
    assert [n for n, _ in ranking.entries] == ["b200", "a100", "c300"]
    distances = [d for _, d in ranking.entries]
    assert distances == sorted(distances)


def test_distance_ties_break_by_name():
    probe = _dist([1, 2], "probe")
    refs = {"bbb": _dist([1, 2]), "aaa": _dist([1, 2])}
    ranking = rank_candidates(probe, refs, _candidates(["bbb", "aaa"]))
    assert [n for n, _ in ranking.entries] == ["aaa", "bbb"]


def test_missing_reference():
    probe = _dist([1], "probe")
    with pytest.raises(MissingReference):
        rank_candidates(probe, {}, _candidates(["ghost"]))


def test_ranking_covers_exactly_the_candidates():
    probe = _dist([5, 6], "probe")
    refs = {n: _dist([5 + i, 6 + i]) for i, n in enumerate("abcd")}
    ranking = rank_candidates(probe, refs, _candidates(["b", "d"]))
    assert sorted(n for n, _ in ranking.entries) == ["b", "d"]
