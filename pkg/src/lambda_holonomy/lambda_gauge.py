"""Geometry of the three-level Lambda system and the spin-1/2 reference model.

Conventions
-----------
* hbar = 1, coupling chi = 1 unless passed explicitly.
* The gauge connection is anti-Hermitian, ``A_mu = Gamma^dagger d_mu Gamma``,
  and the holonomy of a closed loop is ``P exp(-oint A_mu dmu)``.  The doublet
  amplitudes ``c`` of ``psi = Gamma c`` then obey ``dc/ds = -A(s) c``.
* The printed large-detuning potentials are related to this connection by a
  single map: exchanging the two doublet columns of the frame
  (``order="swapped"``) conjugates the 2x2 block by sigma_x, which flips the
  sign of its sigma_y and sigma_z coefficients.  With that ordering the
  gamma -> 0 block coincides with the printed closed forms exactly.  With the
  default printed column order the coefficient magnitudes agree and the signs
  of (A_theta: sigma_y) and (A_phi: sigma_y, sigma_z) are reversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ChartSingularity, InvalidParams
from .numerics import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    commutator,
    dagger,
)

FD_STEP = 1e-5
CHART_EPS = 1e-12

ORDERS = ("printed", "swapped")


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixingAngles:
    theta: float
    phi: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2:
            raise InvalidParams(f"theta={self.theta} outside [0, pi/2]")
        if not 0.0 <= self.gamma <= math.pi / 4:
            raise InvalidParams(f"gamma={self.gamma} outside [0, pi/4]")
        if not math.isfinite(self.phi):
            raise InvalidParams("phi must be finite")


@dataclass(frozen=True)
class LambdaParams:
    """Detuning and effective Rabi frequency in units of a reference Omega_0.

    ``decay`` is the optional excited-state linewidth; it only enters the
    dynamics as a non-Hermitian loss term.
    """

    delta: float
    omega: float
    decay: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidParams(f"omega must be positive, got {self.omega}")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise InvalidParams(f"delta must be nonnegative, got {self.delta}")
        if self.decay is not None and not self.decay >= 0:
            raise InvalidParams(f"decay must be nonnegative, got {self.decay}")

    @property
    def rms(self) -> float:
        return math.hypot(self.delta, self.omega)


@dataclass(frozen=True)
class ConnectionSample:
    """The pair (A_theta, A_phi); arrays may carry leading grid axes."""

    a_theta: np.ndarray
    a_phi: np.ndarray


@dataclass(frozen=True)
class MagneticField:
    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not self.b > 0:
            raise InvalidParams("zero magnetic field has no eigenframe")

    @property
    def b(self) -> float:
        return math.sqrt(self.bx**2 + self.by**2 + self.bz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=float)

    def scaled(self, factor: float) -> "MagneticField":
        return MagneticField(factor * self.bx, factor * self.by, factor * self.bz)


# ---------------------------------------------------------------------------
# Lambda-system frame and spectrum
# ---------------------------------------------------------------------------


def gamma_angle(params: LambdaParams) -> float:
    """Bright/excited mixing angle, ``tan(gamma) = (sqrt(D^2+W^2) - D) / W``.

    Evaluated as ``W / (sqrt(D^2+W^2) + D)`` to avoid cancellation at large
    detuning.
    """
    if not params.omega > 0:
        raise InvalidParams("omega must be positive")
    return math.atan(params.omega / (params.rms + params.delta))


def doublet_energies(params: LambdaParams) -> tuple[float, float, float]:
    """Return ``(0, E_minus, E_plus)`` with ``E_-+ = (D -+ sqrt(D^2+W^2)) / 2``."""
    e_plus = 0.5 * (params.delta + params.rms)
    # (D - R)/2 = -W^2 / (2 (D + R)), stable for D >> W
    e_minus = -params.omega**2 / (2.0 * (params.delta + params.rms))
    return 0.0, e_minus, e_plus


def _column_permutation(order: str) -> list[int]:
    if order == "printed":
        return [0, 1, 2]
    if order == "swapped":
        return [1, 0, 2]
    raise ValueError(f"order must be one of {ORDERS}, got {order!r}")


def _frame_and_derivatives(theta, phi, gamma, order="printed", derivatives=True):
    theta, phi, gamma = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(phi, dtype=float), np.asarray(gamma, dtype=float)
    )
    c, s = np.cos(theta), np.sin(theta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    e = np.exp(1j * phi)
    zero = np.zeros_like(c)
    one = np.ones_like(c)

    def mat(rows):
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2).astype(complex)

    frame = mat([
        [c, -s * np.conj(e), zero],
        [s * cg * e, c * cg, -sg * one],
        [s * sg * e, c * sg, cg * one],
    ])
    perm = _column_permutation(order)
    if not derivatives:
        return frame[..., perm], None, None
    d_theta = mat([
        [-s, -c * np.conj(e), zero],
        [c * cg * e, -s * cg, zero],
        [c * sg * e, -s * sg, zero],
    ])
    d_phi = mat([
        [zero, 1j * s * np.conj(e), zero],
        [1j * s * cg * e, zero, zero],
        [1j * s * sg * e, zero, zero],
    ])
    return frame[..., perm], d_theta[..., perm], d_phi[..., perm]


def frame_matrix(theta, phi, gamma, order: str = "printed") -> np.ndarray:
    """The 3x3 unitary frame with columns (dark, near-dark bright, far-detuned).

    The angles may be arrays (broadcast together); the result then has
    shape ``(..., 3, 3)``.
    """
    return _frame_and_derivatives(theta, phi, gamma, order, derivatives=False)[0]


def frame_from_angles(angles: MixingAngles, order: str = "printed") -> np.ndarray:
    return frame_matrix(angles.theta, angles.phi, angles.gamma, order)


def full_connection(theta, phi, gamma: float, order: str = "printed") -> ConnectionSample:
    """``Gamma^dagger d_theta Gamma`` and ``Gamma^dagger d_phi Gamma`` (3x3)."""
    frame, d_theta, d_phi = _frame_and_derivatives(theta, phi, gamma, order)
    adj = dagger(frame)
    return ConnectionSample(adj @ d_theta, adj @ d_phi)


def connection(theta, phi, gamma: float, order: str = "printed") -> ConnectionSample:
    """Connection projected onto the near-degenerate doublet (upper-left 2x2 block)."""
    full = full_connection(theta, phi, gamma, order)
    return ConnectionSample(full.a_theta[..., :2, :2], full.a_phi[..., :2, :2])


def large_detuning_connection(theta, phi) -> ConnectionSample:
    """Closed-form gamma -> 0 potentials in the printed sigma-basis form."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    theta, phi = theta[..., None, None], phi[..., None, None]
    s, c = np.sin(theta), np.cos(theta)
    a_theta = 1j * np.cos(phi) * SIGMA_Y + 1j * np.sin(phi) * SIGMA_X
    a_phi = (
        -1j * s**2 * SIGMA_Z
        + 1j * s * c * np.cos(phi) * SIGMA_X
        - 1j * s * c * np.sin(phi) * SIGMA_Y
    )
    return ConnectionSample(a_theta, a_phi)


def reconstruct_hamiltonian(params: LambdaParams, theta, phi, order: str = "printed") -> np.ndarray:
    """Spectral reconstruction ``H = Gamma diag(0, E_-, E_+) Gamma^dagger``.

    In the atomic basis (ground 1, ground 2, excited) at theta = 0 this is
    the familiar Lambda block ``[[0, -W/2], [-W/2, D]]`` on the bright and
    excited states, with the dark state decoupled at energy 0.
    """
    gamma = gamma_angle(params)
    energies = np.array(doublet_energies(params))
    perm = _column_permutation(order)
    frame = frame_matrix(theta, phi, gamma, order)
    return (frame * energies[perm]) @ dagger(frame)


# ---------------------------------------------------------------------------
# Connection fields: anything that can be sampled on (theta, phi) grids
# ---------------------------------------------------------------------------


class ConnectionField:
    """A connection evaluable at arbitrary (theta, phi) arrays.

    Subclasses override ``__call__``; they may also override ``derivatives``
    to supply ``(d_theta A_phi, d_phi A_theta)`` analytically.  The default
    falls back to central differences.
    """

    dim = 2

    def __call__(self, theta, phi) -> ConnectionSample:  # pragma: no cover - abstract
        raise NotImplementedError

    def derivatives(self, theta, phi):
        h = FD_STEP
        d_theta_a_phi = (self(theta + h, phi).a_phi - self(theta - h, phi).a_phi) / (2 * h)
        d_phi_a_theta = (self(theta, phi + h).a_theta - self(theta, phi - h).a_theta) / (2 * h)
        return d_theta_a_phi, d_phi_a_theta


class FrameConnection(ConnectionField):
    """Connection induced by the Lambda frame at fixed gamma.

    ``__call__`` returns the doublet block; ``full`` returns the 3x3 pure gauge.
    """

    def __init__(self, gamma: float = 0.0, order: str = "printed"):
        _column_permutation(order)
        self.gamma = float(gamma)
        self.order = order

    def __call__(self, theta, phi) -> ConnectionSample:
        return connection(theta, phi, self.gamma, self.order)

    def full(self, theta, phi) -> ConnectionSample:
        return full_connection(theta, phi, self.gamma, self.order)

    def __repr__(self):
        return f"FrameConnection(gamma={self.gamma!r}, order={self.order!r})"


class LargeDetuningConnection(ConnectionField):
    def __call__(self, theta, phi) -> ConnectionSample:
        return large_detuning_connection(theta, phi)

    def derivatives(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        theta, phi = theta[..., None, None], phi[..., None, None]
        c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
        d_theta_a_phi = (
            -1j * s2 * SIGMA_Z
            + 1j * c2 * np.cos(phi) * SIGMA_X
            - 1j * c2 * np.sin(phi) * SIGMA_Y
        )
        d_phi_a_theta = -1j * np.sin(phi) * SIGMA_Y + 1j * np.cos(phi) * SIGMA_X
        return d_theta_a_phi, d_phi_a_theta

    def __repr__(self):
        return "LargeDetuningConnection()"


class AbelianTestConnection(ConnectionField):
    """``A_theta = 0``, ``A_phi = -i sin^2(theta) sigma_z``: the diagonal
    part of the large-detuning potentials, whose loop integral on a
    constant-theta circle is the solid-angle phase."""

    def __call__(self, theta, phi) -> ConnectionSample:
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        s2 = np.sin(theta)[..., None, None] ** 2
        return ConnectionSample(np.zeros(theta.shape + (2, 2), complex), -1j * s2 * SIGMA_Z)

    def derivatives(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        d = -1j * np.sin(2 * theta)[..., None, None] * SIGMA_Z
        return d, np.zeros_like(d)

    def __repr__(self):
        return "AbelianTestConnection()"


class ZeroConnection(ConnectionField):
    def __init__(self, dim: int = 2):
        self.dim = dim

    def __call__(self, theta, phi) -> ConnectionSample:
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        z = np.zeros(theta.shape + (self.dim, self.dim), complex)
        return ConnectionSample(z, z.copy())

    def derivatives(self, theta, phi):
        sample = self(theta, phi)
        return sample.a_phi, sample.a_theta


class DiagonalPart(ConnectionField):
    """Keep only the diagonal of another field (the Abelian surrogate)."""

    def __init__(self, base: ConnectionField):
        self.base = base
        self.dim = base.dim

    @staticmethod
    def _diag(m):
        return m * np.eye(m.shape[-1])

    def __call__(self, theta, phi) -> ConnectionSample:
        s = self.base(theta, phi)
        return ConnectionSample(self._diag(s.a_theta), self._diag(s.a_phi))

    def derivatives(self, theta, phi):
        d1, d2 = self.base.derivatives(theta, phi)
        return self._diag(d1), self._diag(d2)

    def __repr__(self):
        return f"DiagonalPart({self.base!r})"


class GaugeTransformed(ConnectionField):
    """``g^dagger A g`` for a constant unitary ``g``."""

    def __init__(self, base: ConnectionField, g):
        self.base = base
        self.g = np.asarray(g, dtype=complex)
        self.dim = self.g.shape[-1]

    def _conj(self, m):
        return dagger(self.g) @ m @ self.g

    def __call__(self, theta, phi) -> ConnectionSample:
        s = self.base(theta, phi)
        return ConnectionSample(self._conj(s.a_theta), self._conj(s.a_phi))

    def derivatives(self, theta, phi):
        d1, d2 = self.base.derivatives(theta, phi)
        return self._conj(d1), self._conj(d2)


class CallableConnection(ConnectionField):
    """Wrap a plain ``f(theta, phi) -> ConnectionSample``."""

    def __init__(self, fn: Callable, dim: int = 2):
        self.fn = fn
        self.dim = dim

    def __call__(self, theta, phi) -> ConnectionSample:
        return self.fn(theta, phi)


def curvature(field: ConnectionField, theta, phi) -> np.ndarray:
    """Non-Abelian field strength ``F = d_theta A_phi - d_phi A_theta + [A_theta, A_phi]``."""
    sample = field(theta, phi)
    d_theta_a_phi, d_phi_a_theta = field.derivatives(theta, phi)
    return d_theta_a_phi - d_phi_a_theta + commutator(sample.a_theta, sample.a_phi)


# ---------------------------------------------------------------------------
# Spin-1/2 in a magnetic field
# ---------------------------------------------------------------------------


def _branch_sign(branch) -> int:
    if branch in ("+", 1, +1):
        return 1
    if branch in ("-", -1):
        return -1
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def spinhalf_hamiltonian(field: MagneticField, chi: float = 1.0) -> np.ndarray:
    return chi * (field.bx * SIGMA_X + field.by * SIGMA_Y + field.bz * SIGMA_Z)


def spinhalf_frame(field: MagneticField) -> np.ndarray:
    """Eigenframe with columns for ``E_+ = +chi B`` and ``E_- = -chi B``.

    Raises ChartSingularity on the z axis, where the chart divides by zero.
    """
    b, bz = field.b, field.bz
    if b - abs(bz) <= CHART_EPS * b:
        raise ChartSingularity(f"B_z = {bz} is at a pole of the chart (B = {b})")
    bp = complex(field.bx, field.by)
    sp, sm = math.sqrt(b + bz), math.sqrt(b - bz)
    return np.array([[sp, sm], [bp / sp, -bp / sm]], dtype=complex) / math.sqrt(2 * b)


def spinhalf_gauge_potential(field: MagneticField, rel_step: float = 1e-6) -> np.ndarray:
    """Pure-gauge potential ``i U^-1 dU/dB_k`` for k = x, y, z; shape (3, 2, 2).

    Derivatives by central differences; this is a diagnostic, not a
    production path.
    """
    h = rel_step * field.b
    u_inv = np.linalg.inv(spinhalf_frame(field))
    out = np.empty((3, 2, 2), dtype=complex)
    base = field.as_array()
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        up = spinhalf_frame(MagneticField(*(base + step)))
        dn = spinhalf_frame(MagneticField(*(base - step)))
        out[k] = 1j * u_inv @ (up - dn) / (2 * h)
    return out


def spinhalf_adiabatic_connection(field: MagneticField, branch) -> np.ndarray:
    """``(B_y, -B_x, 0) / (2B(B +- B_z))`` for the chosen branch."""
    sign = _branch_sign(branch)
    b = field.b
    denom = b + sign * field.bz
    if denom <= CHART_EPS * b:
        raise ChartSingularity(f"branch {'+' if sign > 0 else '-'} singular at B_z = {field.bz}")
    return np.array([field.by, -field.bx, 0.0]) / (2 * b * denom)


_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_j, _i, _k] = -1.0


def spinhalf_curvature(field: MagneticField, branch) -> np.ndarray:
    """Monopole field tensor ``F_ij = -+ eps_ijk B_k / (2 B^3)`` (upper sign: branch +)."""
    return _monopole_tensor(field.as_array(), _branch_sign(branch))


def _monopole_tensor(bvec: np.ndarray, sign: int) -> np.ndarray:
    b = np.linalg.norm(bvec, axis=-1)[..., None, None]
    return -sign * np.einsum("ijk,...k->...ij", _LEVI_CIVITA, bvec) / (2 * b**3)


def spinhalf_curvature_fd(field: MagneticField, branch, rel_step: float = 1e-6) -> np.ndarray:
    """``dA_j/dm_i - dA_i/dm_j`` from central differences of the adiabatic potential."""
    h = rel_step * field.b
    base = field.as_array()
    jac = np.empty((3, 3))  # jac[i, j] = dA_j / dm_i
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        a_up = spinhalf_adiabatic_connection(MagneticField(*(base + step)), branch)
        a_dn = spinhalf_adiabatic_connection(MagneticField(*(base - step)), branch)
        jac[i] = (a_up - a_dn) / (2 * h)
    return jac - jac.T


def curvature_dual(tensor: np.ndarray) -> np.ndarray:
    """Vector ``F_k = eps_ijk F_ij / 2`` of an antisymmetric 3x3 tensor (or stack)."""
    return 0.5 * np.einsum("ijk,...ij->...k", _LEVI_CIVITA, tensor)


def sphere_flux(branch, radius: float = 1.0, n_theta: int = 200, n_phi: int = 400) -> float:
    """Flux of the monopole curvature through a sphere ``|B| = radius``.

    Midpoint quadrature in polar coordinates.  For the minus branch the exact
    value is +2 pi, for the plus branch -2 pi.
    """
    sign = _branch_sign(branch)
    th = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    ph = (np.arange(n_phi) + 0.5) * 2 * math.pi / n_phi
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    normal = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
    dual = curvature_dual(_monopole_tensor(radius * normal, sign))
    integrand = np.sum(dual * normal, axis=-1) * radius**2 * np.sin(tt)
    return float(integrand.sum() * (math.pi / n_theta) * (2 * math.pi / n_phi))

