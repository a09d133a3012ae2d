"""Closed loops in (theta, phi) and their path-ordered Wilson loops."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, NotClosed, StepTooLarge
from .lambda_gauge import ConnectionField
from .numerics import frobenius, matexp_skew, ordered_product, unitarity_residual

MAX_STEP = 0.1
MIN_SAMPLES = 8


# ---------------------------------------------------------------------------
# Loop specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircleLoop:
    """Constant-theta circle traversed once in increasing phi."""

    theta0: float

    def __post_init__(self):
        if not 0.0 < self.theta0 <= math.pi / 2:
            raise InvalidSpec(f"circle theta0={self.theta0} outside (0, pi/2]")

    def at(self, s):
        s = np.asarray(s, dtype=float)
        return np.full_like(s, self.theta0), 2 * math.pi * s

    def to_dict(self):
        return {"kind": "circle", "theta0": self.theta0}


@dataclass(frozen=True)
class LissajousLoop:
    """Loop pinned to the dark-state pole theta = 0 at both ends.

    ``theta(s) = theta_amp * alpha * sin^2(pi s)`` and
    ``phi(s) = phi_amp * sin(2 pi s + 2 pi beta + phase_offset)``.
    ``alpha`` scales the excursion away from the pole (relative pulse
    amplitude) and ``beta`` shifts the phi sweep relative to the theta
    envelope (pulse delay).
    """

    alpha: float
    beta: float
    theta_amp: float = math.pi / 2
    phi_amp: float = math.pi
    phase_offset: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidSpec(f"alpha={self.alpha} outside (0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise InvalidSpec(f"beta={self.beta} outside [0, 1]")
        if not 0.0 <= self.theta_amp <= math.pi / 2:
            raise InvalidSpec(f"theta_amp={self.theta_amp} outside [0, pi/2]")
        for name in ("phi_amp", "phase_offset"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpec(f"{name} must be finite")

    def at(self, s):
        s = np.asarray(s, dtype=float)
        theta = self.theta_amp * self.alpha * np.sin(math.pi * s) ** 2
        phi = self.phi_amp * np.sin(2 * math.pi * s + 2 * math.pi * self.beta + self.phase_offset)
        return theta, phi

    def to_dict(self):
        return {
            "kind": "lissajous",
            "alpha": self.alpha,
            "beta": self.beta,
            "theta_amp": self.theta_amp,
            "phi_amp": self.phi_amp,
            "phase_offset": self.phase_offset,
        }


@dataclass(frozen=True)
class CompositeLoop:
    """Concatenation of loops; each part gets an equal share of the parameter."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise InvalidSpec("composite loop needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def at(self, s):
        s = np.asarray(s, dtype=float)
        m = len(self.parts)
        idx = np.clip(np.floor(s * m).astype(int), 0, m - 1)
        local = s * m - idx
        theta = np.empty_like(s)
        phi = np.empty_like(s)
        for k, part in enumerate(self.parts):
            mask = idx == k
            theta[mask], phi[mask] = part.at(local[mask])
        return theta, phi

    def to_dict(self):
        return {"kind": "composite", "parts": [p.to_dict() for p in self.parts]}


LoopSpec = CircleLoop | LissajousLoop | CompositeLoop


def loop_from_dict(data: dict) -> LoopSpec:
    kind = data.get("kind")
    fields_ = {k: v for k, v in data.items() if k != "kind"}
    if kind == "circle":
        return CircleLoop(**fields_)
    if kind == "lissajous":
        return LissajousLoop(**fields_)
    if kind == "composite":
        return CompositeLoop(tuple(loop_from_dict(p) for p in fields_["parts"]))
    raise InvalidSpec(f"unknown loop kind {kind!r}")


# ---------------------------------------------------------------------------
# Discretized loops
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParamLoop:
    theta: np.ndarray
    phi: np.ndarray
    spec: LoopSpec | None = field(default=None, compare=False)
    n_per_part: int | None = field(default=None, compare=False)

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if theta.shape != phi.shape or theta.ndim != 1:
            raise InvalidSpec("theta and phi must be 1-D arrays of equal length")
        if theta.size < MIN_SAMPLES:
            raise InvalidSpec(f"a loop needs at least {MIN_SAMPLES} samples")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def winding(self) -> int:
        return int(round((self.phi[-1] - self.phi[0]) / (2 * math.pi)))

    @property
    def closed(self) -> bool:
        """Endpoints coincide: theta exactly, phi exactly up to whole turns."""
        turns = 2 * math.pi * self.winding
        return bool(self.theta[0] == self.theta[-1] and self.phi[0] + turns == self.phi[-1])

    @property
    def segments(self) -> int:
        return self.theta.size - 1

    def step_lengths(self) -> np.ndarray:
        """Segment lengths in the round metric ``d theta^2 + sin^2(theta) d phi^2``.

        (theta, phi) are polar coordinates on the parameter sphere, so phi
        moves at the pole theta = 0 have zero length.
        """
        d_theta = np.diff(self.theta)
        d_phi = np.diff(self.phi)
        mid = 0.5 * (self.theta[1:] + self.theta[:-1])
        return np.hypot(d_theta, np.sin(mid) * d_phi)

    def reversed(self) -> "ParamLoop":
        return ParamLoop(self.theta[::-1].copy(), self.phi[::-1].copy())

    def refined(self) -> "ParamLoop":
        """Twice as many segments: rediscretize the spec, or bisect segments."""
        if self.spec is not None and self.n_per_part is not None:
            return discretize(self.spec, 2 * self.n_per_part)
        theta = np.empty(2 * self.theta.size - 1)
        phi = np.empty_like(theta)
        theta[0::2], phi[0::2] = self.theta, self.phi
        theta[1::2] = 0.5 * (self.theta[1:] + self.theta[:-1])
        phi[1::2] = 0.5 * (self.phi[1:] + self.phi[:-1])
        return ParamLoop(theta, phi)


def discretize(spec: LoopSpec, n: int) -> ParamLoop:
    """Sample ``spec`` at ``s = k/n``; composites get ``n`` segments per part.

    The final sample is snapped onto the first (phi up to whole turns) so
    closure is exact.
    """
    if n < MIN_SAMPLES:
        raise InvalidSpec(f"n={n} below minimum {MIN_SAMPLES}")
    if isinstance(spec, CompositeLoop):
        pieces = [discretize(p, n) for p in spec.parts]
        theta = np.concatenate([pieces[0].theta] + [p.theta[1:] for p in pieces[1:]])
        phi = np.concatenate([pieces[0].phi] + [p.phi[1:] for p in pieces[1:]])
    else:
        theta, phi = spec.at(np.arange(n + 1) / n)
    theta = np.array(theta, dtype=float)
    phi = np.array(phi, dtype=float)
    turns = round((phi[-1] - phi[0]) / (2 * math.pi))
    theta[-1], phi[-1] = theta[0], phi[0] + 2 * math.pi * turns
    return ParamLoop(theta, phi, spec=spec, n_per_part=n)


# ---------------------------------------------------------------------------
# Wilson loops
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Holonomy:
    matrix: np.ndarray
    steps: int
    richardson_error: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[-1]

    @property
    def unitarity(self) -> float:
        return float(unitarity_residual(self.matrix))


def _provider_sample(provider: ConnectionField, theta, phi, projected: bool):
    if projected:
        return provider(theta, phi)
    full = getattr(provider, "full", None)
    if full is None:
        raise ValueError(f"{provider!r} has no unprojected (full) connection")
    return full(theta, phi)


def path_ordered_exponential(loop: ParamLoop, provider, projected: bool = True) -> np.ndarray:
    """Midpoint-rule product of ``exp(-A_theta dtheta - A_phi dphi)``, latest segment leftmost."""
    mid_theta = 0.5 * (loop.theta[1:] + loop.theta[:-1])
    mid_phi = 0.5 * (loop.phi[1:] + loop.phi[:-1])
    d_theta = np.diff(loop.theta)[:, None, None]
    d_phi = np.diff(loop.phi)[:, None, None]
    sample = _provider_sample(provider, mid_theta, mid_phi, projected)
    generators = -(sample.a_theta * d_theta + sample.a_phi * d_phi)
    return ordered_product(matexp_skew(generators))


def wilson_loop(loop: ParamLoop, provider, projected: bool = True,
                estimate_error: bool = True) -> Holonomy:
    """Path-ordered holonomy of ``provider`` around a closed loop.

    ``richardson_error`` is ``||U_n - U_2n||_F`` from one step doubling
    (zero when ``estimate_error`` is off).
    """
    if not loop.closed:
        raise NotClosed("loop's first and last samples differ")
    steps = loop.step_lengths()
    if steps.size and steps.max() > MAX_STEP:
        raise StepTooLarge(f"largest parameter step {steps.max():.3g} exceeds {MAX_STEP}")
    u = path_ordered_exponential(loop, provider, projected)
    err = 0.0
    if estimate_error:
        u2 = path_ordered_exponential(loop.refined(), provider, projected)
        err = float(frobenius(u - u2))
    return Holonomy(u, loop.segments, err)


def loop_integral(loop: ParamLoop, provider, projected: bool = True) -> np.ndarray:
    """Unordered midpoint sum ``oint A_mu dmu`` (no path ordering)."""
    mid_theta = 0.5 * (loop.theta[1:] + loop.theta[:-1])
    mid_phi = 0.5 * (loop.phi[1:] + loop.phi[:-1])
    sample = _provider_sample(provider, mid_theta, mid_phi, projected)
    d_theta = np.diff(loop.theta)[:, None, None]
    d_phi = np.diff(loop.phi)[:, None, None]
    return np.sum(sample.a_theta * d_theta + sample.a_phi * d_phi, axis=0)


def loop_commutator_norm(u1: Holonomy, u2: Holonomy) -> float:
    a = u1.matrix if isinstance(u1, Holonomy) else np.asarray(u1)
    b = u2.matrix if isinstance(u2, Holonomy) else np.asarray(u2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"holonomy shapes differ: {a.shape} vs {b.shape}")
    return float(frobenius(a @ b - b @ a))


def solid_angle(theta0: float) -> float:
    """Solid angle ``2 pi (1 - cos 2 theta0)`` swept by the constant-theta circle."""
    if not 0.0 <= theta0 <= math.pi / 2:
        raise InvalidSpec(f"theta0={theta0} outside [0, pi/2]")
    return 2 * math.pi * (1 - math.cos(2 * theta0))


def phase_magnitude_error(phase: float, expected: float) -> float:
    """Distance on the circle between ``+-phase`` and ``expected`` (mod 2 pi)."""
    return min(abs(math.remainder(sign * phase - expected, 2 * math.pi)) for sign in (1, -1))
