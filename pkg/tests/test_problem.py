import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padopt import (
    FileRecord,
    FileSet,
    OutputAlphabet,
    ValidationError,
    problem_from_multiplier,
    problem_from_per_file_multipliers,
    server_identity_reduction,
    validate_constraints,
)


def test_file_record_validation():
    FileRecord(1, 1.0)
    with pytest.raises(ValidationError):
        FileRecord(0, 0.5)
    with pytest.raises(ValidationError):
        FileRecord(10, 0.0)
    with pytest.raises(ValidationError):
        FileRecord(10, 1.5)


def test_fileset_sorts_stably_and_normalizes():
    fs = FileSet.from_pairs([20, 10], [1, 3])
    assert fs.sizes.tolist() == [10, 20]
    assert np.allclose(fs.frequencies, [0.75, 0.25])


def test_fileset_renormalization_notice(caplog):
    import logging

    with caplog.at_level(logging.INFO, logger="padopt.problem"):
        FileSet.from_pairs([10, 20], [10.0, 30.0])
    assert any("renormalizing" in r.message for r in caplog.records)


def test_fileset_rejects_bad_input():
    with pytest.raises(ValidationError):
        FileSet.from_pairs([], [])
    with pytest.raises(ValidationError):
        FileSet.from_pairs([10], [-0.5])
    with pytest.raises(ValidationError):
        FileSet.from_pairs([10.5], [1.0])  # fractional size
    with pytest.raises(ValidationError):
        FileSet(np.array([20, 10]), np.array([0.5, 0.5]))  # unsorted


def test_alphabet_strictly_increasing():
    OutputAlphabet(np.array([1, 2, 5]))
    with pytest.raises(ValidationError):
        OutputAlphabet(np.array([1, 1, 2]))


def test_validate_constraints_accepts_single_file():
    seq = validate_constraints([(1, 1)], 1)
    assert seq.pairs == [(1, 1)]


def test_validate_constraints_accepts_running_example():
    pairs = [(1, 3), (2, 6), (3, 6), (4, 6), (5, 6), (6, 6)]
    assert validate_constraints(pairs, 6).pairs == pairs


def test_validate_constraints_reports_monotonicity_first():
    # r decreases and r_1 is also out of range; monotonicity wins.
    with pytest.raises(ValidationError, match="r not non-decreasing"):
        validate_constraints([(1, 3), (2, 2)], 2)


def test_validate_constraints_other_errors():
    with pytest.raises(ValidationError, match="l_1 must be 1"):
        validate_constraints([(2, 2)], 2)
    with pytest.raises(ValidationError, match="alphabet end"):
        validate_constraints([(1, 1)], 2)
    with pytest.raises(ValidationError, match="l_i > r_i"):
        validate_constraints([(1, 1), (3, 2), (3, 3)], 3)
    with pytest.raises(ValidationError, match="non-empty"):
        validate_constraints([], 3)


def test_problem_from_multiplier_running_example(fig_files):
    prob = problem_from_multiplier(fig_files, 1.1)
    assert prob.lower.tolist() == [1, 2, 3, 4, 5, 6]
    assert prob.upper.tolist() == [3, 6, 6, 6, 6, 6]


def test_problem_from_multiplier_small():
    fs = FileSet.from_pairs([10, 11, 20], [0.5, 0.2, 0.3])
    prob = problem_from_multiplier(fs, 1.2)
    assert prob.lower.tolist() == [1, 2, 3]
    assert prob.upper.tolist() == [2, 2, 3]


def test_problem_from_multiplier_c1_is_identity():
    fs = FileSet.from_pairs([5, 9, 14], [0.2, 0.3, 0.5])
    prob = problem_from_multiplier(fs, 1.0)
    assert prob.lower.tolist() == prob.upper.tolist() == [1, 2, 3]


def test_problem_rejects_c_below_one():
    fs = FileSet.from_pairs([5, 9], [0.5, 0.5])
    with pytest.raises(ValidationError):
        problem_from_multiplier(fs, 0.99)


def test_per_file_multipliers_uniform_matches_global():
    fs = FileSet.from_pairs([10, 17, 29, 50], [0.25] * 4)
    a = problem_from_multiplier(fs, 1.8)
    b = problem_from_per_file_multipliers(fs, [1.8] * 4)
    assert a.lower.tolist() == b.lower.tolist()
    assert a.upper.tolist() == b.upper.tolist()


def test_per_file_multipliers_valid_case():
    fs = FileSet.from_pairs([10, 20], [0.5, 0.5])
    prob = problem_from_per_file_multipliers(fs, [3.0, 1.0])
    assert prob.upper.tolist() == [2, 2]


def test_per_file_multipliers_rejects_non_monotone():
    fs = FileSet.from_pairs([10, 11, 20], [0.5, 0.2, 0.3])
    with pytest.raises(ValidationError, match="r not non-decreasing"):
        problem_from_per_file_multipliers(fs, [2.1, 1.0, 1.0])


def test_server_identity_reduction_example():
    fs = FileSet.from_pairs([6, 14], [0.5, 0.5])
    prob = server_identity_reduction(fs, OutputAlphabet(np.array([8, 16, 32])), 2.0)
    assert prob.files.sizes.tolist() == [8, 16]
    assert prob.alphabet.sizes.tolist() == [8, 16]
    assert prob.lower.tolist() == [1, 2]
    assert prob.upper.tolist() == [1, 2]  # 16 > 2*6
    assert prob.original_sizes.tolist() == [6, 14]


def test_server_identity_infeasible_window():
    fs = FileSet.from_pairs([5], [1.0])
    with pytest.raises(ValidationError, match=r"\[5, 6\]"):
        server_identity_reduction(fs, OutputAlphabet(np.array([8, 16])), 1.2)


def test_server_identity_with_own_sizes_matches_multiplier():
    fs = FileSet.from_pairs([10, 11, 20, 20], [0.4, 0.2, 0.3, 0.1])
    direct = problem_from_multiplier(fs, 1.3)
    reduced = server_identity_reduction(
        fs, OutputAlphabet(np.unique(fs.sizes)), 1.3
    )
    assert direct.lower.tolist() == reduced.lower.tolist()
    assert direct.upper.tolist() == reduced.upper.tolist()
    assert reduced.original_sizes.tolist() == fs.sizes.tolist()


def test_server_identity_strict_variant_rejects_c1():
    fs = FileSet.from_pairs([8, 16], [0.5, 0.5])
    alphabet = OutputAlphabet(np.array([8, 16]))
    server_identity_reduction(fs, alphabet, 1.0)  # default rule is fine
    with pytest.raises(ValidationError):
        server_identity_reduction(fs, alphabet, 1.0, strict_lstar_bound=True)


def test_uniform_frequency_variant():
    fs = FileSet.from_pairs([10, 20, 30], [0.7, 0.2, 0.1])
    prob = problem_from_multiplier(fs, 1.5).with_uniform_frequencies()
    assert np.allclose(prob.files.frequencies, 1.0 / 3.0)


files_strategy = st.integers(2, 8).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(1, 300), min_size=n, max_size=n),
        st.lists(st.integers(1, 50), min_size=n, max_size=n),
    )
)


@settings(max_examples=150, deadline=None)
@given(files_strategy, st.floats(1.0, 4.0, allow_nan=False))
def test_multiplier_windows_always_valid(data, c):
    sizes, weights = data
    fs = FileSet.from_pairs(sizes, weights)
    prob = problem_from_multiplier(fs, c)
    z = prob.alphabet.sizes
    assert np.all(z[prob.lower - 1] >= fs.sizes)
    assert np.all(z[prob.upper - 1] <= c * fs.sizes)
    # validity was already enforced in construction; spot check monotonicity
    assert np.all(np.diff(prob.lower) >= 0)
    assert np.all(np.diff(prob.upper) >= 0)


@settings(max_examples=60, deadline=None)
@given(files_strategy, st.floats(1.0, 2.5), st.floats(0.0, 1.5))
def test_growing_c_never_shrinks_windows(data, c, bump):
    sizes, weights = data
    fs = FileSet.from_pairs(sizes, weights)
    small = problem_from_multiplier(fs, c)
    large = problem_from_multiplier(fs, c + bump)
    assert np.all(large.upper >= small.upper)
