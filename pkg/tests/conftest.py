import numpy as np
import pytest

from padopt import FileSet, problem_from_multiplier

# The running example: six files, c = 1.1.
FIG_SIZES = [1000, 1050, 1100, 1110, 1120, 1140]
FIG_FREQS = [0.22, 0.05, 0.23, 0.12, 0.18, 0.20]


@pytest.fixture
def fig_files():
    return FileSet.from_pairs(FIG_SIZES, FIG_FREQS)


@pytest.fixture
def fig_problem(fig_files):
    return problem_from_multiplier(fig_files, 1.1)


def random_instance(key, n_max=8, c_choices=(1.05, 1.2, 1.5, 2.0, 3.0), max_schemes=200_000):
    """Seeded random instance small enough for exhaustive enumeration.

    Sizes are drawn over mixed scales so duplicate sizes, tight windows,
    and full-width windows all occur.  Instances whose assignment count
    exceeds ``max_schemes`` are redrawn (deterministically).
    """
    for attempt in range(64):
        rng = np.random.default_rng([0x9AD, key, attempt])
        n = int(rng.integers(1, n_max + 1))
        scale = float(rng.choice([10.0, 100.0, 10_000.0]))
        sizes = np.sort(np.exp(rng.random(n) * np.log(scale)).astype(np.int64) + 1)
        freqs = rng.dirichlet(np.ones(n) * float(rng.choice([0.5, 1.0, 3.0])))
        c = float(rng.choice(c_choices))
        problem = problem_from_multiplier(FileSet.from_pairs(sizes, freqs), c)
        widths = (problem.upper - problem.lower + 1).astype(object)
        count = 1
        for w in widths:
            count *= int(w)
        if count <= max_schemes:
            return problem, c
    raise AssertionError("could not draw an enumerable instance")
