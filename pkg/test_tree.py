"""Join sets, orbits, orbit-measure inequalities and multipotential sums on M-ary trees."""

import itertools
import math

import numpy as np
import pytest

from imagedim.errors import CountBoundError, DuplicateWordError, EnumerationGuardError, InvalidParameterError
from imagedim.tree import (
    TreeMeasure,
    condition_profile,
    config_bound,
    convergence_ratio,
    count_level_configs,
    curtail,
    enumerate_orbits,
    frac_inequality_sweep,
    inner_integrals,
    integer_inequality_sweep,
    join_set,
    meet,
    multipotential_phi,
    orbit_partition_total,
    orbit_table,
    partial_J,
    partial_J_sequence,
    series_bound_check,
    signature_of,
    tail_bound,
    top_vertex,
    verify_integer_inequality,
)
from imagedim.tree import counting
from imagedim.tree.words import index_word, word_index

EIGHT_LEAVES = [(0, 0, 0), (0, 0, 1), (0, 0, 2), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 0, 0), (2, 0, 1)]


def test_word_helpers():
    assert curtail((2, 1, 0), 2) == (2, 1)
    assert meet((1, 0, 2), (1, 0, 1)) == (1, 0)
    assert meet((0,), (1,)) == ()
    assert word_index((1, 2), 3) == 5
    assert index_word(5, 2, 3) == (1, 2)
    with pytest.raises(InvalidParameterError):
        curtail((0,), 2)


def test_join_set_of_eight_ternary_leaves():
    js = join_set(EIGHT_LEAVES)
    assert js.total() == 7
    multiplicities = {v.word: v.multiplicity for v in js.vertices}
    assert multiplicities == {(): 2, (0, 0): 2, (1,): 1, (1, 1): 1, (2, 0): 1}
    assert js.levels == [0, 0, 1, 2, 2, 2, 2]
    assert top_vertex(js) == ()


def test_join_set_rejects_duplicates_unless_saturated():
    with pytest.raises(DuplicateWordError):
        join_set([(0, 1), (0, 1)])
    js = join_set([(0, 1), (0, 1), (1, 0)], saturate=True)
    assert js.saturated
    assert js.levels == [0, 2]


def test_multipotential_kernel_multiplies_level_weights():
    assert multipotential_phi(EIGHT_LEAVES, lambda level: 2.0 ** level) == 2.0 ** 9


def _automorphisms_binary_depth_two():
    for root, left, right in itertools.product((0, 1), repeat=3):
        def act(word, root=root, left=left, right=right):
            first = word[0] ^ root
            second = word[1] ^ (left if word[0] == 0 else right)
            return (first, second)
        yield act


def test_signatures_match_automorphism_orbits():
    leaves = [index_word(i, 2, 2) for i in range(4)]
    tuples = list(itertools.product(leaves, repeat=3))
    maps = list(_automorphisms_binary_depth_two())
    for t in tuples:
        images = {tuple(g(w) for w in t) for g in maps}
        for u in tuples:
            assert (signature_of(t) == signature_of(u)) == (u in images)


def test_orbit_table_counts():
    ids, signatures = orbit_table(2, 2, 3)
    assert ids.size == 64
    assert len(set(ids.tolist())) == len(signatures)
    proper = enumerate_orbits(2, 2, 3)
    assert all(not s.saturated for s in proper)
    assert all(len(s.levels) == 2 for s in proper)
    with pytest.raises(EnumerationGuardError):
        orbit_table(4, 6, 3)


def test_tree_measure_constructors():
    tm = TreeMeasure.from_multinomial((0.7, 0.3), 3)
    assert tm.mass((0, 1)) == pytest.approx(0.21)
    assert tm.moment_sum(2, 2.0) == pytest.approx((0.49 + 0.09) ** 2)
    assert tm.moment_sum(3, 2.0, below=(1,)) == pytest.approx(0.09 * 0.58 ** 2)
    assert TreeMeasure.point_mass(2, 3, leaf=5).mass((1, 0, 1)) == 1.0
    random = TreeMeasure.random(3, 3, np.random.default_rng(0))
    assert random.levels[0][0] == pytest.approx(1.0)
    assert random.to_dict()["K"] == 3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbits_partition_the_tuple_space(n):
    tm = TreeMeasure.random(2, 3, np.random.default_rng(n))
    assert orbit_partition_total(tm, n) == pytest.approx(1.0)


@pytest.mark.parametrize("M,q,n", [(2, 2.5, 2), (3, 1.7, 1), (2, 3.0, 3)])
def test_integer_inequality_holds_everywhere(M, q, n):
    tm = TreeMeasure.random(M, 2 if M == 3 else 3, np.random.default_rng(11))
    results = integer_inequality_sweep(tm, q, n)
    assert results
    assert all(r.holds for r in results)


def test_integer_inequality_needs_q_at_least_n():
    tm = TreeMeasure.uniform(2, 2)
    orbit = enumerate_orbits(2, 2, 2)[0]
    with pytest.raises(InvalidParameterError):
        verify_integer_inequality(tm, (), orbit, 1.5, 2)


@pytest.mark.parametrize("q,n", [(1.5, 1), (2.5, 2)])
def test_frac_inequality_holds_everywhere(q, n):
    tm = TreeMeasure.random(2, 3, np.random.default_rng(5), concentration=0.5)
    results = frac_inequality_sweep(tm, q, n)
    assert results
    assert all(r.holds for r in results)


def test_level_configuration_counts():
    assert count_level_configs([0]) == 1
    assert count_level_configs([0, 0]) == 1
    assert count_level_configs([0, 1]) == 2
    for ks in itertools.combinations_with_replacement(range(4), 3):
        assert count_level_configs(ks) <= 2 ** 3 * math.factorial(3)
    with pytest.raises(InvalidParameterError):
        count_level_configs([0, 1, 2, 3, 4])


def test_level_configuration_count_above_its_bound_raises(monkeypatch):
    assert config_bound(3) == 48
    monkeypatch.setattr(counting, "config_bound", lambda n: 1)
    with pytest.raises(CountBoundError, match="exceeds"):
        count_level_configs([0, 1])


def test_series_stays_below_tail_bound():
    check = series_bound_check(2, 0.5, 6)
    assert check.holds
    assert check.bound == pytest.approx(tail_bound(2, 0.5))
    with pytest.raises(InvalidParameterError):
        series_bound_check(2, 1.5, 3)


def test_partial_J_of_uniform_binary_tree():
    f = lambda level: 2.0 ** level  # noqa: E731
    for K in (3, 6):
        # every leaf sees S = K / 2
        assert partial_J(TreeMeasure.uniform(2, K), f, 1.5, 1) == pytest.approx(math.sqrt(K / 2))
    assert partial_J(TreeMeasure.uniform(2, 4), lambda level: 0.0, 1.5, 1) == 0.0


def test_inner_integrals_match_brute_force():
    tm = TreeMeasure.random(2, 3, np.random.default_rng(3))
    f = lambda level: 1.5 ** level  # noqa: E731
    n = 2
    leaves = [index_word(i, 3, 2) for i in range(8)]
    expected = []
    for j, wj in enumerate(leaves):
        total = 0.0
        for a, b in itertools.permutations(range(8), 2):
            if j in (a, b):
                continue
            total += tm.leaves[a] * tm.leaves[b] * multipotential_phi([leaves[a], leaves[b], wj], f)
        expected.append(total)
    assert inner_integrals(tm, f, n) == pytest.approx(expected)
    q = 2.6
    J = sum(mu * s ** ((q - 1) / n) for mu, s in zip(tm.leaves, expected))
    assert partial_J(tm, f, q, n) == pytest.approx(J)


def test_partial_J_order_range():
    tm = TreeMeasure.uniform(2, 2)
    with pytest.raises(InvalidParameterError):
        partial_J(tm, lambda level: 1.0, 4.0, 1)
    with pytest.raises(InvalidParameterError):
        partial_J(tm, lambda level: 1.0, 2.0, 1)
    assert partial_J(tm, lambda level: 1.0, 2.0, 2) >= 0.0
    with pytest.raises(InvalidParameterError):
        inner_integrals(tm, lambda level: 1.0, 0)


def test_condition_profile_of_critical_kernel():
    profile = condition_profile(TreeMeasure.uniform(2, 4), lambda level: 2.0 ** level, 2.0)
    assert [level for level, _ in profile] == [1, 2, 3, 4]
    assert all(value == pytest.approx(0.0, abs=1e-12) for _, value in profile)


def test_convergence_ratio_fit():
    fit = convergence_ratio([1.0, 1.5, 1.75, 1.875])
    assert fit.ratio == pytest.approx(0.5)
    assert fit.monotone
    assert convergence_ratio([1.0, 1.0, 1.0]).ratio == 0.0
    with pytest.raises(InvalidParameterError):
        convergence_ratio([1.0, 2.0])


def test_partial_J_converges_when_kernel_is_summable():
    partials = partial_J_sequence((0.7, 0.3), lambda level: 2.0 ** (0.2 * level), 1.5, 1, range(4, 11))
    fit = convergence_ratio(partials)
    assert fit.monotone
    assert fit.ratio < 0.95


def test_partial_J_diverges_when_the_condition_fails():
    partials = partial_J_sequence((0.5, 0.5), lambda level: 4.0 ** level, 1.5, 1, range(2, 8))
    assert partials == pytest.approx([math.sqrt((2 ** K - 1) / 2) for K in range(2, 8)])
    fit = convergence_ratio(partials)
    assert fit.monotone
    assert fit.ratio > 1.0
    assert all(b >= a for a, b in zip(fit.differences, fit.differences[1:]))
