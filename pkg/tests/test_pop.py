import numpy as np
import pytest

from padopt import (
    FileSet,
    brute_force_pop,
    compute_poss,
    posterior_vulnerability,
    problem_from_multiplier,
    refine_shannon,
    shannon_leakage,
    solve_pop_renyi,
    solve_pop_shannon,
)
from padopt.metrics import DeterministicScheme, entropy_bits

from conftest import random_instance


def test_popre_running_example(fig_problem):
    scheme, objective = solve_pop_renyi(fig_problem)
    assert scheme.assignment == (3, 3, 3, 6, 6, 6)
    assert objective == pytest.approx(0.43, abs=1e-12)


def test_popre_two_files():
    prob = problem_from_multiplier(FileSet.from_pairs([1, 2], [0.3, 0.7]), 2.0)
    scheme, objective = solve_pop_renyi(prob)
    assert scheme.assignment == (2, 2)
    assert objective == pytest.approx(0.7)


def test_popre_smallest_column_tie_break():
    prob = problem_from_multiplier(FileSet.from_pairs([1, 2, 3], [0.2, 0.5, 0.3]), 2.0)
    scheme, objective = solve_pop_renyi(prob)
    assert scheme.assignment == (1, 3, 3)
    assert objective == pytest.approx(0.7)


def test_popre_single_file():
    prob = problem_from_multiplier(FileSet.from_pairs([9], [1.0]), 3.0)
    scheme, objective = solve_pop_renyi(prob)
    assert scheme.assignment == (1,)
    assert objective == pytest.approx(1.0)


def test_popre_matches_oracle_on_random_instances():
    for key in range(250):
        problem, _ = random_instance(key)
        scheme, objective = solve_pop_renyi(problem)
        oracle = brute_force_pop(problem)
        assert objective == pytest.approx(oracle.min_vulnerability, abs=1e-9)
        # the returned objective is the scheme's own vulnerability
        assert posterior_vulnerability(scheme.to_joint(problem)) == pytest.approx(
            objective, abs=1e-9
        )


def test_compute_poss_running_example(fig_problem):
    scheme, _ = solve_pop_renyi(fig_problem)
    poss = compute_poss(fig_problem, scheme.to_joint(fig_problem))
    assert poss.sets == ((3,), (3, 6), (3,), (6,), (6,), (6,))


def test_compute_poss_all_to_one_column():
    prob = problem_from_multiplier(FileSet.from_pairs([10, 11], [0.5, 0.5]), 1.2)
    joint = DeterministicScheme((2, 2)).to_joint(prob)
    poss = compute_poss(prob, joint)
    assert poss.sets == ((2,), (2,))


def test_compute_poss_identity_c1():
    prob = problem_from_multiplier(FileSet.from_pairs([1, 2, 3], [0.5, 0.3, 0.2]), 1.0)
    joint = DeterministicScheme((1, 2, 3)).to_joint(prob)
    assert compute_poss(prob, joint).sets == ((1,), (2,), (3,))


def test_refine_running_example(fig_problem):
    scheme, _ = solve_pop_renyi(fig_problem)
    refined = refine_shannon(fig_problem, scheme)
    assert refined.assignment == (3, 6, 3, 6, 6, 6)
    joint = refined.to_joint(fig_problem)
    assert shannon_leakage(joint) == pytest.approx(0.992774, abs=1e-6)
    assert posterior_vulnerability(joint) == pytest.approx(0.43, abs=1e-12)


def test_refine_noop_when_all_singletons():
    prob = problem_from_multiplier(FileSet.from_pairs([1, 2, 3], [0.5, 0.3, 0.2]), 1.0)
    scheme, _ = solve_pop_renyi(prob)
    assert refine_shannon(prob, scheme).assignment == scheme.assignment


def test_refine_keeps_zero_entropy_grouping():
    prob = problem_from_multiplier(
        FileSet.from_pairs([10, 11, 12], [0.4, 0.3, 0.3]), 1.2
    )
    scheme, _ = solve_pop_renyi(prob)
    assert scheme.assignment == (3, 3, 3)
    refined = refine_shannon(prob, scheme)
    assert refined.assignment == (3, 3, 3)


def test_refine_preserves_vulnerability_and_entropy_on_random_instances():
    for key in range(250):
        problem, _ = random_instance(key)
        scheme, objective = solve_pop_renyi(problem)
        refined = refine_shannon(problem, scheme)
        joint_in = scheme.to_joint(problem)
        joint_out = refined.to_joint(problem)
        assert posterior_vulnerability(joint_out) == pytest.approx(objective, abs=1e-9)
        assert shannon_leakage(joint_out) <= shannon_leakage(joint_in) + 1e-9
        # column maxima are individually preserved, not just their sum
        assert np.allclose(
            joint_in.column_maxima(), joint_out.column_maxima(), atol=1e-12
        )


def test_popsh_running_example(fig_problem):
    scheme, bits = solve_pop_shannon(fig_problem)
    assert scheme.assignment == (1, 6, 6, 6, 6, 6)
    assert bits == pytest.approx(0.760167, abs=1e-6)
    joint = scheme.to_joint(fig_problem)
    assert posterior_vulnerability(joint) == pytest.approx(0.45, abs=1e-12)


def test_popsh_single_file():
    prob = problem_from_multiplier(FileSet.from_pairs([5], [1.0]), 2.0)
    scheme, bits = solve_pop_shannon(prob)
    assert scheme.assignment == (1,)
    assert bits == 0.0


def test_popsh_duplicate_sizes_c1():
    prob = problem_from_multiplier(FileSet.from_pairs([7, 7], [0.5, 0.5]), 1.0)
    scheme, bits = solve_pop_shannon(prob)
    assert scheme.assignment == (1, 1)
    assert bits == pytest.approx(0.0, abs=1e-12)


def test_popsh_matches_oracle_on_random_instances():
    for key in range(250):
        problem, _ = random_instance(key)
        _, bits = solve_pop_shannon(problem)
        oracle = brute_force_pop(problem)
        assert bits == pytest.approx(oracle.min_shannon_bits, abs=1e-9)


def test_popre_tie_break_is_move_local_bandwidth_minimal():
    # No single poss-preserving move may lower the expected padded size
    # without touching the vulnerability.
    for key in range(120):
        problem, _ = random_instance(key)
        scheme, _ = solve_pop_renyi(problem)
        joint = scheme.to_joint(problem)
        poss = compute_poss(problem, joint)
        z = problem.alphabet.sizes
        p = problem.files.frequencies
        maxima = joint.column_maxima()
        base = float(joint.output_masses() @ z)
        for i, options in enumerate(poss.sets):
            current = scheme.assignment[i]
            for col in options:
                if col == current:
                    continue
                moved = base + p[i] * (z[col - 1] - z[current - 1])
                if moved < base - 1e-9:
                    # the move must change some column maximum, otherwise
                    # the tie-break failed to take a free improvement
                    new_max = maxima.copy()
                    old_col_mass = [
                        p[k]
                        for k in range(problem.n)
                        if scheme.assignment[k] == current and k != i
                    ]
                    new_max[current - 1] = max(old_col_mass, default=0.0)
                    new_max[col - 1] = max(new_max[col - 1], p[i])
                    assert not np.allclose(new_max, maxima, atol=1e-12), (
                        f"instance {key}: free bandwidth move left "
                        f"file {i + 1} -> column {col}"
                    )


def test_popsh_entropy_equals_reconstructed_groups(fig_problem):
    scheme, bits = solve_pop_shannon(fig_problem)
    masses = np.zeros(fig_problem.m)
    for i, col in enumerate(scheme.assignment):
        masses[col - 1] += fig_problem.files.frequencies[i]
    assert entropy_bits(masses) == pytest.approx(bits, abs=1e-12)
