"""Random generators for measures and simple functions (reproducible via rng)."""

from __future__ import annotations

import numpy as np

from .integral import SimpleFunction, simple_function
from .measure import FiniteSpace, MonotoneMeasure


def random_monotone_measure(rng: np.random.Generator, space: FiniteSpace,
                            capacity=False) -> MonotoneMeasure:
    """Sorted uniform draws assigned in popcount order give a monotone table:
    any subset has strictly smaller popcount, hence a smaller-or-equal draw."""
    size = 1 << space.n
    draws = np.sort(rng.uniform(0.0, 1.0, size))
    order = sorted(range(size), key=lambda mask: (bin(mask).count("1"), mask))
    table = [0.0] * size
    for rank, mask in enumerate(order):
        table[mask] = float(draws[rank])
    table[0] = 0.0
    if capacity:
        top = table[space.full_mask]
        table = [v / top for v in table]
    return MonotoneMeasure(space, tuple(table))


def random_capacity(rng: np.random.Generator, space: FiniteSpace) -> MonotoneMeasure:
    return random_monotone_measure(rng, space, capacity=True)


def random_simple_function(rng: np.random.Generator, space: FiniteSpace,
                           bound=1.0) -> SimpleFunction:
    return simple_function(space, rng.uniform(0.0, bound, space.n), bound=bound)


def random_comonotone_pair(rng: np.random.Generator, space: FiniteSpace, bound=1.0):
    """Two non-decreasing value ladders over one shared atom permutation."""
    perm = rng.permutation(space.n)
    fs = np.sort(rng.uniform(0.0, bound, space.n))
    gs = np.sort(rng.uniform(0.0, bound, space.n))
    f_vals = [0.0] * space.n
    g_vals = [0.0] * space.n
    for i, atom in enumerate(perm):
        f_vals[atom] = float(fs[i])
        g_vals[atom] = float(gs[i])
    return (simple_function(space, f_vals, bound=bound),
            simple_function(space, g_vals, bound=bound))


def random_possibility(rng: np.random.Generator, space: FiniteSpace):
    """Possibility weights per atom with max exactly 1."""
    pi = rng.uniform(0.0, 1.0, space.n)
    pi[rng.integers(space.n)] = 1.0
    return [float(v) for v in pi]
