"""Kernel recurrence against closed-form solutions."""

import math

import numpy as np
import pytest

from weylcalc.errors import ConvolutionCase, ZeroOrderOperator
from weylcalc.kernel_solver import kernel_basis, kernel_residual
from weylcalc.operators import ConvolutionOperator, WeylOperator, diff_op
from weylcalc.series import gaussian_series


def test_gaussian_kernel_of_d_minus_z():
    # ker(D - zI) = C exp(z^2/2): c_{2k} = 1/(2^k k!), c_odd = 0
    t = WeylOperator(diff_op(1), 1.0)
    basis = kernel_basis(t, 41)
    assert len(basis.solutions) == 1
    c = basis.solutions[0].coeffs
    for k in range(20):
        expected = 1.0 / (2**k * math.factorial(k))
        assert abs(c[2 * k] - expected) <= 1e-12 * expected
        assert c[2 * k + 1] == 0
    assert basis.residuals[0] <= 1e-10


def test_scaled_gaussian_kernel_of_2d_minus_z():
    # 2 f' = z f has solution exp(z^2/4): c_{2k} = 1/(4^k k!)
    t = WeylOperator(ConvolutionOperator(np.array([0.0, 2.0])), 1.0)
    basis = kernel_basis(t, 41)
    c = basis.solutions[0].coeffs
    for k in range(18):
        expected = 1.0 / (4**k * math.factorial(k))
        assert abs(c[2 * k] - expected) <= 1e-12 * expected


def test_airy_kernel_of_d2_minus_z():
    # f'' = z f: Airy recurrence c_{n+3} = c_n / ((n+3)(n+2))
    t = WeylOperator(diff_op(2), 1.0)
    basis = kernel_basis(t, 40)
    assert len(basis.solutions) == 2
    for sol, res in zip(basis.solutions, basis.residuals):
        c = sol.coeffs
        for n in range(len(c) - 3):
            want = c[n] / ((n + 3) * (n + 2))
            assert abs(c[n + 3] - want) <= 1e-12 * max(1.0, abs(want))
        assert res <= 1e-10


def test_initial_conditions_are_structurally_independent():
    t = WeylOperator(diff_op(2), 1.0)
    basis = kernel_basis(t, 30)
    s0, s1 = basis.solutions
    assert s0.coeffs[0] == 1 and s0.coeffs[1] == 0
    assert s1.coeffs[0] == 0 and s1.coeffs[1] == 1


def test_kernel_solutions_are_linear():
    # any combination of basis solutions stays in the kernel
    t = WeylOperator(diff_op(2), 1.0)
    basis = kernel_basis(t, 40)
    from weylcalc.series import linear_combine

    combo = linear_combine(
        [(0.7 - 0.2j, basis.solutions[0]), (1.3j, basis.solutions[1])]
    )
    assert kernel_residual(t, combo) <= 1e-10


def test_convolution_case_rejected():
    t = WeylOperator(diff_op(1), 0.0)
    with pytest.raises(ConvolutionCase):
        kernel_basis(t, 40)


def test_zero_order_rejected():
    t = WeylOperator(ConvolutionOperator(np.array([1.0])), 1.0)
    with pytest.raises(ZeroOrderOperator):
        kernel_basis(t, 40)


def test_overflow_guard_truncates():
    # a tiny leading coefficient makes the recurrence blow up; the guard
    # keeps the usable prefix instead of overflowing to inf
    t = WeylOperator(ConvolutionOperator(np.array([0.0, 1e-60])), 1.0)
    basis = kernel_basis(t, 200)
    sol = basis.solutions[0]
    assert np.all(np.isfinite(sol.coeffs.view(np.float64)))
    assert len(sol) < 200


def test_kernel_residual_of_gaussian():
    t = WeylOperator(diff_op(1), 1.0)
    assert kernel_residual(t, gaussian_series(128)) <= 1e-12
