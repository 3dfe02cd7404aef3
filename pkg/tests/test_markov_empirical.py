import itertools
import math

import pytest
from hypothesis import given, strategies as st

from mslab.markov_empirical import (
    KGramMultiset,
    anchored_kgram,
    distinct_kgram_multisets,
    empirical_entropy_table,
    kgram_count_table,
    kgram_multiset,
    markov_type_count_bound,
    read_corpus,
    representation,
)


def test_kgram_multiset_example():
    m = kgram_multiset((0, 1, 0, 1), 2)
    assert m.as_dict() == {(0, 1): 2, (1, 0): 1} and m.size == 3
    assert kgram_multiset((3, 1, 2), 3).as_dict() == {(3, 1, 2): 1}
    with pytest.raises(ValueError):
        kgram_multiset((1, 2), 3)


def test_sliding_not_nested_but_anchored_is():
    assert kgram_multiset((0, 1, 0), 2) == kgram_multiset((1, 0, 1), 2)
    assert kgram_multiset((0, 1, 0), 1) != kgram_multiset((1, 0, 1), 1)
    assert anchored_kgram((0, 1, 0), 2) != anchored_kgram((1, 0, 1), 2)


def test_representation_modes():
    assert representation((2, 1), None) == (2, 1)
    assert isinstance(representation((2, 1), 1, "sliding"), KGramMultiset)
    with pytest.raises(ValueError):
        representation((2, 1), 1, "tumbling")


@pytest.mark.parametrize("n", range(1, 11))
def test_letter_multiset_count_is_n_plus_one(n):
    assert distinct_kgram_multisets(n, 2, 1) == n + 1


def test_full_window_count_is_all_sequences():
    assert distinct_kgram_multisets(6, 2, 6) == 64
    assert distinct_kgram_multisets(4, 3, None) == 81


def test_count_table_small():
    rows = kgram_count_table(n_max=8)
    by = {(r.n, r.k): r for r in rows}
    assert [by[(5, k)].distinct for k in (1, 2, 3)] == [6, 18, 28]
    assert all(r.distinct <= r.bound for r in rows)
    for n in range(3, 9):
        assert by[(n, 1)].distinct <= by[(n, 2)].distinct <= by[(n, 3)].distinct
    assert (1, 2) not in by
    assert by[(4, 2)].log2_bound == pytest.approx(4 * math.log2(5))


def test_markov_bound():
    assert markov_type_count_bound(3, 2, 2) == 4**4
    with pytest.raises(ValueError):
        markov_type_count_bound(3, 0, 1)


def test_entropy_table_uniform_n5():
    corpus = list(itertools.product((0, 1), repeat=5))
    t = empirical_entropy_table(corpus, grams=(2,))
    labels = [r.label for r in t.rows]
    assert labels == ["sequence", "2-gram multiset", "multiset"]
    assert t.rows[0].entropy_bits == pytest.approx(5.0)
    assert t.rows[-1].bound_bits == pytest.approx(math.log2(6))
    assert t.is_monotone() and t.within_bounds()


def test_entropy_table_constant_corpus():
    t = empirical_entropy_table([(1, 2, 3)] * 10)
    assert all(r.entropy_bits == 0.0 for r in t.rows)
    assert not any(math.copysign(1, r.entropy_bits) < 0 for r in t.rows)


def test_entropy_table_permutation_corpus():
    corpus = list(itertools.permutations(range(4)))
    t = empirical_entropy_table(corpus, grams=(2, 3))
    assert t.rows[0].entropy_bits == pytest.approx(math.log2(24))
    assert t.rows[-1].entropy_bits == 0.0


@given(
    st.integers(2, 9).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=1, max_size=40)
    ),
    st.sampled_from(["anchored", "sliding"]),
)
def test_entropy_table_bounds_property(corpus, windowing):
    t = empirical_entropy_table(corpus, grams=(1, 2, 3, 4), windowing=windowing, alphabet_size=3)
    assert t.within_bounds()
    if windowing == "anchored":
        assert t.is_monotone()


def test_entropy_table_validation():
    with pytest.raises(ValueError):
        empirical_entropy_table([])
    with pytest.raises(ValueError):
        empirical_entropy_table([(1, 2), (1,)])
    with pytest.raises(ValueError):
        empirical_entropy_table([(1, 2, 3)], alphabet_size=2)


def test_read_corpus(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("0 1 1\n\n1 0 1\n")
    assert read_corpus(str(f)) == [(0, 1, 1), (1, 0, 1)]
    f.write_text("0 x\n")
    with pytest.raises(ValueError, match="line 1"):
        read_corpus(str(f))


def test_records():
    recs = empirical_entropy_table([(0, 1, 0), (1, 1, 0)]).to_records()
    assert set(recs[0]) == {"representation", "entropy_bits", "bound_bits"}
