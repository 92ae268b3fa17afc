"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from weylcalc.operators import ConvolutionOperator, WeylOperator


def unit_disk_complex(rng, size=None):
    """Complex samples uniformly distributed in the closed unit disk."""
    r = np.sqrt(rng.random(size))
    theta = 2 * np.pi * rng.random(size)
    return r * np.exp(1j * theta)


def random_weyl_operators(count: int, seed: int = 0, max_order: int = 5):
    """Random T = M - a z I with M of order <= max_order and all
    coefficients (and a) sampled in the unit disk."""
    rng = np.random.default_rng(seed)
    ops = []
    while len(ops) < count:
        order = int(rng.integers(1, max_order + 1))
        d = unit_disk_complex(rng, order + 1)
        if d[order] == 0:  # keep the nominal order meaningful
            continue
        a = complex(unit_disk_complex(rng))
        ops.append(WeylOperator(ConvolutionOperator(d), a))
    return ops
