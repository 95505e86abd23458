from itertools import combinations_with_replacement

import pytest

from gcm_lab.errors import DomainError
from gcm_lab.services.patterns import (
    PatternSpec,
    count_gl_patterns,
    count_sp_patterns,
    list_gl_patterns,
    list_sp_patterns,
    pattern_report,
    weyl_dim_gl,
    weyl_dim_sp,
)


def _rows(n, low, high):
    return [tuple(sorted(c, reverse=True)) for c in combinations_with_replacement(range(low, high + 1), n)]


def test_gl_examples() -> None:
    assert count_gl_patterns((0, 0, 0)) == 1
    assert count_gl_patterns((2, 0)) == 3
    assert count_gl_patterns((2, 1, 0)) == 8
    assert weyl_dim_gl((1, 0)) == 2
    assert list_gl_patterns((1, 0)) == [[[1, 0], [0]], [[1, 0], [1]]]


def test_sp_examples() -> None:
    assert count_sp_patterns((0, -1)) == 4
    assert count_sp_patterns((-1, -1)) == 5
    assert count_sp_patterns((0, -2)) == 10
    for k in range(6):
        assert count_sp_patterns((-k,)) == k + 1
        assert weyl_dim_sp((-k,)) == k + 1


def test_gl_counts_match_weyl_dimension() -> None:
    for n in range(1, 5):
        for top in _rows(n, 0, 4):
            assert count_gl_patterns(top) == weyl_dim_gl(top), top


def test_sp_counts_match_weyl_dimension() -> None:
    for n in range(1, 4):
        for top in _rows(n, -3, 0):
            assert count_sp_patterns(top) == weyl_dim_sp(top), top


def test_listing_agrees_with_count_and_interleaves() -> None:
    top = (3, 1, 0)
    patterns = list_gl_patterns(top)
    assert len(patterns) == count_gl_patterns(top)
    for pattern in patterns:
        for upper, lower in zip(pattern, pattern[1:]):
            assert all(upper[i] >= lower[i] >= upper[i + 1] for i in range(len(lower)))


def test_sp_listing_satisfies_both_betweenness_rules() -> None:
    top = (0, -1, -2)
    patterns = list_sp_patterns(top)
    assert len(patterns) == count_sp_patterns(top)
    for pattern in patterns:
        assert [len(r) for r in pattern] == [3, 3, 2, 2, 1, 1]
        for idx in range(0, len(pattern), 2):
            full, primed = pattern[idx], pattern[idx + 1]
            padded = full + [0]
            assert all(padded[i] >= primed[i] >= padded[i + 1] for i in range(len(primed)))
            if idx + 2 < len(pattern):
                below = pattern[idx + 2]
                assert all(primed[i] >= below[i] >= primed[i + 1] for i in range(len(below)))


def test_counts_grow_with_the_top_row() -> None:
    assert count_gl_patterns((3, 0, 0)) > count_gl_patterns((2, 0, 0))
    assert count_sp_patterns((0, -3)) > count_sp_patterns((0, -2))


def test_gl_count_is_shift_invariant() -> None:
    for top in _rows(3, 0, 3):
        assert count_gl_patterns(top) == count_gl_patterns(tuple(x + 2 for x in top))


def test_invalid_top_rows() -> None:
    with pytest.raises(DomainError):
        PatternSpec("gl", (0, 1))
    with pytest.raises(DomainError):
        PatternSpec("sp", (1, 0))
    with pytest.raises(DomainError):
        PatternSpec("gl", (1.5, 0))
    with pytest.raises(DomainError):
        PatternSpec("gl", ())


def test_pattern_report_shape() -> None:
    report = pattern_report("sp", [0, -1], include_list=True)
    assert report["row_lengths"] == [2, 2, 1, 1]
    assert report["count"] == report["weyl_dim"] == 4
    assert len(report["patterns"]) == 4
    assert "patterns" not in pattern_report("gl", [2, 1, 0])
