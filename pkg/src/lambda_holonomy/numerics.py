"""Small complex matrix algebra for 2x2 and 3x3 problems.

Matrices are plain ``numpy`` arrays.  Every routine here also accepts a stack
of matrices with shape ``(..., d, d)`` and operates elementwise over the
leading axes, which is how the grid sweeps and propagators stay vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAntiHermitian

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_BASIS = np.stack([IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z])

# Scaled matrices have Frobenius norm <= 0.5; the Taylor order is the
# smallest m with 0.5-bounded truncation error theta^(m+1)/(m+1)! <= 1e-17.
_SCALE_THRESHOLD = 0.5
_TRUNCATION_TOL = 1e-17
_MAX_ORDER = 18


def as_square(m, dims=(2, 3)) -> np.ndarray:
    """Coerce ``m`` to a complex array of square matrices and validate it."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {arr.shape}")
    if arr.shape[-1] not in dims:
        raise DimensionMismatch(f"matrix dimension {arr.shape[-1]} not in {dims}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius(m: np.ndarray) -> np.ndarray | float:
    """Frobenius norm over the last two axes."""
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anti_hermiticity_residual(m) -> np.ndarray | float:
    """Return ``||M + M^dagger||_F``."""
    arr = np.asarray(m, dtype=complex)
    return frobenius(arr + dagger(arr))


def hermiticity_residual(m) -> np.ndarray | float:
    arr = np.asarray(m, dtype=complex)
    return frobenius(arr - dagger(arr))


def unitarity_residual(u) -> np.ndarray | float:
    """Return ``||U^dagger U - I||_F`` (per matrix for stacks)."""
    arr = as_square(u)
    eye = np.eye(arr.shape[-1])
    return frobenius(dagger(arr) @ arr - eye)


def _taylor_order(theta: float) -> int:
    term = theta
    for m in range(1, _MAX_ORDER + 1):
        term *= theta / (m + 1)
        if term <= _TRUNCATION_TOL:
            return m
    return _MAX_ORDER


def _taylor_polynomial(x: np.ndarray, order: int) -> np.ndarray:
    """sum_{k<=order} x^k / k! by Paterson-Stockmeyer (about 2 sqrt(order) products)."""
    d = x.shape[-1]
    eye = np.broadcast_to(np.eye(d, dtype=complex), x.shape)
    block = max(1, math.isqrt(order + 1))
    powers = [eye, x]
    for _ in range(2, block + 1):
        powers.append(powers[-1] @ x)
    coeffs = [1.0 / math.factorial(k) for k in range(order + 1)]
    top = block * (order // block)
    result = None
    for start in range(top, -1, -block):
        chunk = sum(coeffs[start + j] * powers[j]
                    for j in range(min(block, len(coeffs) - start)))
        result = chunk if result is None else chunk + powers[block] @ result
    return result


def matexp(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    Works for any small square matrix (or stack).  Each matrix in a stack gets
    its own number of squarings, chosen so the scaled Frobenius norm is at
    most 0.5; the series order is picked from the largest scaled norm.
    """
    arr = as_square(m)
    d = arr.shape[-1]
    stack = arr.reshape(-1, d, d)
    norms = frobenius(stack)
    with np.errstate(divide="ignore"):
        squarings = np.ceil(np.log2(np.maximum(norms, 1e-300) / _SCALE_THRESHOLD))
    squarings = np.clip(squarings, 0, None).astype(int)
    scaled = stack / (2.0 ** squarings)[:, None, None]
    theta = float(np.max(norms / 2.0**squarings, initial=0.0))
    result = _taylor_polynomial(scaled, _taylor_order(theta))

    max_sq = int(squarings.max(initial=0))
    for level in range(max_sq):
        active = squarings > level
        if np.all(active):
            result = result @ result
        else:
            result[active] = result[active] @ result[active]
    return result.reshape(arr.shape)


def matexp_skew(m, tol: float = 1e-10) -> np.ndarray:
    """Exponential of an anti-Hermitian matrix (a unitary).

    Raises
    ------
    NotAntiHermitian
        If ``||M + M^dagger||_F > tol * max(1, ||M||_F)`` for any matrix.
    """
    arr = as_square(m)
    resid = anti_hermiticity_residual(arr)
    bound = tol * np.maximum(1.0, frobenius(arr))
    if np.any(resid > bound):
        raise NotAntiHermitian(
            f"anti-Hermiticity residual {np.max(resid):.3e} exceeds tolerance"
        )
    return matexp(arr)


def ordered_product(factors: np.ndarray) -> np.ndarray:
    """Return ``F[n-1] @ ... @ F[1] @ F[0]`` for a stack ``F`` of shape (n, d, d).

    Later factors act on the left.  Uses pairwise reduction so the work is
    vectorized and rounding error grows like log(n) rather than n.
    """
    stack = np.asarray(factors, dtype=complex)
    if stack.shape[0] == 0:
        raise ValueError("empty factor stack")
    while stack.shape[0] > 1:
        if stack.shape[0] % 2:
            pad = np.eye(stack.shape[-1], dtype=complex)[None]
            stack = np.concatenate([stack, pad])
        stack = stack[1::2] @ stack[0::2]
    return stack[0]


@dataclass(frozen=True)
class PauliCoefficients:
    """Coefficients of I, sigma_x, sigma_y, sigma_z."""

    c0: complex
    c1: complex
    c2: complex
    c3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=complex)

    def recompose(self) -> np.ndarray:
        return np.tensordot(self.as_array(), PAULI_BASIS, axes=1)


def pauli_components(m) -> np.ndarray:
    """Vectorized decomposition; returns shape ``(..., 4)``."""
    arr = as_square(m, dims=(2,))
    # c_k = tr(sigma_k M) / 2
    return 0.5 * np.einsum("kij,...ji->...k", PAULI_BASIS, arr)


def pauli_decompose(m) -> PauliCoefficients:
    arr = np.asarray(m)
    if arr.shape != (2, 2):
        raise DimensionMismatch(f"pauli_decompose needs a 2x2 matrix, got {arr.shape}")
    return PauliCoefficients(*(complex(c) for c in pauli_components(arr)))
