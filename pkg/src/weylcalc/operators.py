"""Constant-coefficient operator algebra on truncated series.

Three operator kinds:

* :class:`ConvolutionOperator` -- M = sum_k d_k D^k with characteristic
  polynomial L(lambda) = sum_k d_k lambda^k (finite order only);
* :class:`WeylOperator` -- T = M - a z I, the solutions of the commutation
  relation [T, D] = a I;
* :class:`CompositeOperator` -- a polynomial L applied to a Weyl operator.

Besides truncated-series application the module provides exact monomial
matrices, commutators, a ladder-identity check, and the decomposition
diagnostic that recovers (a, M) from a monomial matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    EmptyCoefficients,
    InconsistentConvolution,
    KernelResidualTooLarge,
    NotWeyl,
    OrderExhausted,
    ZeroOperator,
)
from .series import (
    DiskSpec,
    TaylorSeries,
    UNIT_DISK,
    differentiate,
    disk_sup_norm,
    linear_combine,
    multiply_by_poly,
)

#: dense monomial matrices are capped at this degree
N_CAP_MAX = 512

#: tolerance for the decomposition diagnostic (off-diagonal max and
#: diagonal spread are checked separately so "not Weyl" can be told apart
#: from "numerically noisy Weyl")
DECOMPOSE_TOL = 1e-9


@dataclass(frozen=True)
class ConvolutionOperator:
    """M = sum_k d_k D^k with at least one nonzero coefficient."""

    d: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.d, dtype=np.complex128))
        if arr.size == 0:
            raise EmptyCoefficients("convolution coefficients must be non-empty")
        if not np.any(arr):
            raise ZeroOperator("all convolution coefficients are zero")
        arr.setflags(write=False)
        object.__setattr__(self, "d", arr)

    @property
    def order(self) -> int:
        return int(np.nonzero(self.d)[0][-1])

    def characteristic(self, lam: complex) -> complex:
        """L(lambda) = sum_k d_k lambda^k."""
        return complex(np.polyval(self.d[::-1], lam))


@dataclass(frozen=True)
class WeylOperator:
    """T = M - a z I.  a = 0 degenerates to the convolution operator M."""

    m: ConvolutionOperator
    a: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))


@dataclass(frozen=True)
class CompositeOperator:
    """L(T) for a polynomial L given by its coefficient list ``l``."""

    base: WeylOperator
    l: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.l, dtype=np.complex128))
        if arr.size == 0:
            raise EmptyCoefficients("composite polynomial must be non-empty")
        arr.setflags(write=False)
        object.__setattr__(self, "l", arr)

    @property
    def poly_degree(self) -> int:
        nz = np.nonzero(self.l)[0]
        return int(nz[-1]) if nz.size else 0

    def eigenvalue(self, t_eigenvalue: complex) -> complex:
        """L evaluated at an eigenvalue of the base operator."""
        return complex(np.polyval(self.l[::-1], t_eigenvalue))


@dataclass(frozen=True)
class OperatorMatrix:
    """Action on the monomial basis: column n = coefficients of Op[z^n]."""

    entries: np.ndarray
    n_cap: int


def diff_op(order: int = 1) -> ConvolutionOperator:
    """The pure differentiation operator D^order."""
    d = np.zeros(order + 1, dtype=np.complex128)
    d[order] = 1.0
    return ConvolutionOperator(d)


# ---------------------------------------------------------------------------
# application to truncated series


def apply_conv(m: ConvolutionOperator, f: TaylorSeries) -> TaylorSeries:
    """sum_k d_k f^(k); valid_order drops by the operator order."""
    p = m.order
    if p >= f.valid_order:
        raise OrderExhausted(
            f"operator order {p} >= series valid_order {f.valid_order}"
        )
    terms = [
        (m.d[k], differentiate(f, k)) for k in range(p + 1) if m.d[k] != 0
    ]
    out = linear_combine(terms)
    # linear_combine already takes the min valid_order; pin the drop to p
    return TaylorSeries(
        out.coeffs,
        valid_order=max(1, f.valid_order - p),
        label=out.label,
        shift_abs=f.shift_abs,
    )


def apply_weyl(t: WeylOperator, f: TaylorSeries) -> TaylorSeries:
    """(M - a z I) f on the overlapping coefficient range."""
    conv = apply_conv(t.m, f)
    if t.a == 0:
        return conv
    zf = multiply_by_poly(f, [0.0, 1.0])
    return linear_combine([(1.0, conv), (-t.a, zf)])


def apply_composite(c: CompositeOperator, f: TaylorSeries) -> TaylorSeries:
    """Horner scheme in the operator: l_q T(...) + ... + l_0 f."""
    q = c.poly_degree
    if q * c.base.m.order >= f.valid_order:
        raise OrderExhausted(
            f"composite needs {q * c.base.m.order} derivative levels, series "
            f"valid_order is {f.valid_order}"
        )
    l = c.l[: q + 1]
    res = linear_combine([(l[-1], f)])
    for k in range(q - 1, -1, -1):
        res = linear_combine([(1.0, apply_weyl(c.base, res)), (l[k], f)])
    return res


# ---------------------------------------------------------------------------
# exact polynomial action (no truncation: inputs are genuine polynomials)


def _poly_diff(p: np.ndarray) -> np.ndarray:
    if p.size <= 1:
        return np.zeros(1, dtype=np.complex128)
    return p[1:] * np.arange(1, p.size)


def _poly_shift_up(p: np.ndarray) -> np.ndarray:
    out = np.zeros(p.size + 1, dtype=np.complex128)
    out[1:] = p
    return out


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.complex128)
    out[: a.size] += a
    out[: b.size] += b
    return out


def op_on_poly(op, p) -> np.ndarray:
    """Exact image of the polynomial p (coefficient array) under op."""
    p = np.atleast_1d(np.asarray(p, dtype=np.complex128))
    if isinstance(op, ConvolutionOperator):
        out = np.zeros(1, dtype=np.complex128)
        dk = p
        for k in range(op.d.size):
            if op.d[k] != 0:
                out = _poly_add(out, op.d[k] * dk)
            dk = _poly_diff(dk)
        return out
    if isinstance(op, WeylOperator):
        out = op_on_poly(op.m, p)
        if op.a != 0:
            out = _poly_add(out, -op.a * _poly_shift_up(p))
        return out
    if isinstance(op, CompositeOperator):
        q = op.poly_degree
        res = op.l[q] * p
        for k in range(q - 1, -1, -1):
            res = _poly_add(op_on_poly(op.base, res), op.l[k] * p)
        return res
    raise TypeError(f"unsupported operator type {type(op).__name__}")


def _degree_raise(op) -> int:
    if isinstance(op, ConvolutionOperator):
        return 0
    if isinstance(op, WeylOperator):
        return 1
    if isinstance(op, CompositeOperator):
        return op.poly_degree
    raise TypeError(f"unsupported operator type {type(op).__name__}")


def matrix_on_monomials(op, n_cap: int) -> OperatorMatrix:
    """Exact action on z^0..z^n_cap as a dense matrix."""
    if not (1 <= n_cap <= N_CAP_MAX):
        raise ValueError(f"n_cap must be in 1..{N_CAP_MAX}, got {n_cap}")
    rows = n_cap + 1 + max(1, _degree_raise(op))
    entries = np.zeros((rows, n_cap + 1), dtype=np.complex128)
    for n in range(n_cap + 1):
        mono = np.zeros(n + 1, dtype=np.complex128)
        mono[n] = 1.0
        col = op_on_poly(op, mono)
        entries[: col.size, n] = col
    return OperatorMatrix(entries, n_cap)


# exact complex-rational polynomial arithmetic: operator coefficients are
# dyadic rationals (doubles), so compositions and commutators can be done
# without rounding; the factorial factors would otherwise drown 1e-12
# checks at high degree


def _exact_scalar(z) -> tuple:
    z = complex(z)
    return (Fraction(z.real), Fraction(z.imag))


def _exact_mul(a: tuple, b: tuple) -> tuple:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _exact_poly_accum(acc: dict, p: dict, s: tuple) -> None:
    """acc += s * p on sparse {degree: (re, im)} polynomials."""
    for deg, c in p.items():
        v = _exact_mul(s, c)
        old = acc.get(deg)
        acc[deg] = v if old is None else (old[0] + v[0], old[1] + v[1])


def _exact_poly_diff(p: dict) -> dict:
    return {deg - 1: (c[0] * deg, c[1] * deg) for deg, c in p.items() if deg > 0}


def _exact_poly_shift_up(p: dict) -> dict:
    return {deg + 1: c for deg, c in p.items()}


def _exact_op_on_poly(op, p: dict) -> dict:
    out: dict = {}
    if isinstance(op, ConvolutionOperator):
        dk = p
        for k in range(op.d.size):
            if op.d[k] != 0:
                _exact_poly_accum(out, dk, _exact_scalar(op.d[k]))
            dk = _exact_poly_diff(dk)
        return out
    if isinstance(op, WeylOperator):
        out = _exact_op_on_poly(op.m, p)
        if op.a != 0:
            _exact_poly_accum(out, _exact_poly_shift_up(p), _exact_scalar(-op.a))
        return out
    if isinstance(op, CompositeOperator):
        q = op.poly_degree
        _exact_poly_accum(out, p, _exact_scalar(op.l[q]))
        for k in range(q - 1, -1, -1):
            out = _exact_op_on_poly(op.base, out)
            _exact_poly_accum(out, p, _exact_scalar(op.l[k]))
        return out
    raise TypeError(f"unsupported operator type {type(op).__name__}")


def commutator_matrix(op_a, op_b, n_cap: int) -> OperatorMatrix:
    """Matrix of op_a op_b - op_b op_a on monomials of degree <= n_cap - 1.

    Computed in exact rational arithmetic (the inputs are dyadic
    rationals), so algebraic identities like [M - a z I, D] = a I come out
    bit-exact instead of drowning in the factorial growth of the
    intermediate compositions.  One degree is sacrificed to the
    composition, so the stored cap is n_cap - 1.
    """
    if n_cap < 2:
        raise ValueError("n_cap must be >= 2")
    raise_total = _degree_raise(op_a) + _degree_raise(op_b)
    rows = n_cap + max(1, raise_total)
    entries = np.zeros((rows, n_cap), dtype=np.complex128)
    minus_one = _exact_scalar(-1.0)
    for n in range(n_cap):
        mono = {n: (Fraction(1), Fraction(0))}
        col = _exact_op_on_poly(op_a, _exact_op_on_poly(op_b, mono))
        ba = _exact_op_on_poly(op_b, _exact_op_on_poly(op_a, mono))
        _exact_poly_accum(col, ba, minus_one)
        for deg, c in col.items():
            if deg < rows:
                entries[deg, n] = complex(float(c[0]), float(c[1]))
    return OperatorMatrix(entries, n_cap - 1)


def scalar_identity_diagnostics(mat: OperatorMatrix):
    """Test a monomial matrix against a * I.

    Returns (a_estimate, offdiag_max, diag_spread) where the estimate is
    the mean diagonal of the square top block and both deviations cover
    the full stored matrix including overflow rows.
    """
    e = mat.entries
    ncols = e.shape[1]
    diag = np.diagonal(e[:ncols, :ncols])
    a_est = complex(diag.mean())
    dev = e.copy()
    dev[np.arange(ncols), np.arange(ncols)] -= a_est
    offdiag_max = float(np.abs(dev).max()) if dev.size else 0.0
    diag_spread = float(np.abs(diag - a_est).max())
    return a_est, offdiag_max, diag_spread


# ---------------------------------------------------------------------------
# ladder identity


def ladder_check(
    t: WeylOperator,
    f: TaylorSeries,
    n_max: int,
    disk: DiskSpec = UNIT_DISK,
    kernel_tol: float = 1e-8,
):
    """Residuals of T f^(n) = a n f^(n-1) for n = 0..n_max.

    Index 0 holds the kernel residual of f itself; f must pass the kernel
    membership threshold first.
    """
    if n_max + t.m.order >= f.valid_order:
        raise OrderExhausted(
            f"ladder to n={n_max} needs valid_order > {n_max + t.m.order}"
        )
    base = disk_sup_norm(apply_weyl(t, f), disk)
    if base > kernel_tol:
        raise KernelResidualTooLarge(
            f"kernel residual {base:.3e} exceeds {kernel_tol:.1e}"
        )
    residuals = [base]
    for n in range(1, n_max + 1):
        lhs = apply_weyl(t, differentiate(f, n))
        rhs = differentiate(f, n - 1)
        residuals.append(
            disk_sup_norm(linear_combine([(1.0, lhs), (-t.a * n, rhs)]), disk)
        )
    return residuals


# ---------------------------------------------------------------------------
# decomposition diagnostic


def _commutator_with_diff(mat: OperatorMatrix) -> OperatorMatrix:
    """[Op, D] computed from the monomial matrix alone.

    [Op, D] z^n = n Op[z^{n-1}] - D(Op[z^n]); both terms are available from
    the stored columns.
    """
    e = mat.entries
    rows, cols = e.shape
    out = np.zeros((rows, cols), dtype=np.complex128)
    for n in range(cols):
        col = np.zeros(rows, dtype=np.complex128)
        if n >= 1:
            col[: rows] += n * e[:, n - 1]
        dcol = _poly_diff(e[:, n])
        col[: dcol.size] -= dcol
        out[:, n] = col
    return OperatorMatrix(out, mat.n_cap)


def decompose(mat: OperatorMatrix, tol: float = DECOMPOSE_TOL):
    """Recover (a, M) from the monomial matrix of an unknown operator.

    Raises NotWeyl when [Op, D] is not a scalar multiple of the identity
    within ``tol``, and InconsistentConvolution when the residual operator
    Op + a z I does not act with constant coefficients.

    The commutator check is made against ``max(tol, noise floor)``, where
    the floor is the cancellation error of a genuinely Weyl matrix whose
    entries (of size d_k n!/(n-k)!) were themselves rounded to doubles:
    below that floor non-Weyl-ness is not detectable from the matrix.
    """
    comm = _commutator_with_diff(mat)
    a_est, offdiag_max, diag_spread = scalar_identity_diagnostics(comm)
    scale = float(np.abs(mat.entries).max())
    noise_floor = 8 * np.finfo(float).eps * (mat.n_cap + 1) * scale
    tol = max(tol, noise_floor)
    if offdiag_max > tol or diag_spread > tol:
        raise NotWeyl(
            f"[Op, D] is not a scalar identity: off-diagonal max "
            f"{offdiag_max:.3e}, diagonal spread {diag_spread:.3e}",
            offdiag_max=offdiag_max,
            diag_spread=diag_spread,
        )
    n_cap = mat.n_cap
    e = mat.entries
    # M = Op + a z I acts on z^n with constant coefficients:
    # M z^n = sum_k d_k n!/(n-k)! z^{n-k}
    estimates = np.full((n_cap + 1, n_cap + 1), np.nan + 0j, dtype=np.complex128)
    for n in range(n_cap + 1):
        mcol = e[:, n].copy()
        if n + 1 < mcol.size:
            mcol[n + 1] += a_est  # cancel the -a z^{n+1} term
        fall = 1.0  # n! / (n-k)!
        for k in range(n + 1):
            estimates[k, n] = mcol[n - k] / fall
            fall *= n - k
    d = np.zeros(n_cap + 1, dtype=np.complex128)
    for k in range(n_cap + 1):
        vals = estimates[k, k:]
        d[k] = vals[-1]  # widest column carries the most context
        if np.abs(vals - d[k]).max() > tol:
            raise InconsistentConvolution(
                f"coefficient d_{k} varies across columns by "
                f"{np.abs(vals - d[k]).max():.3e}"
            )
    nz = np.nonzero(np.abs(d) > 1e-11)[0]
    if nz.size == 0:
        raise ZeroOperator("recovered convolution part is zero")
    return a_est, ConvolutionOperator(d[: nz[-1] + 1])
