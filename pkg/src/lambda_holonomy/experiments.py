"""Composed-path experiments: holonomy prediction vs direct evolution.

A state starting in the dark state is carried around loop 1 then loop 2, and
around loop 2 then loop 1.  The population difference P_d of basis state 1
between the two orders is zero whenever the two transports commute.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dynamics import (
    LEAKAGE_THRESHOLD,
    NORM_TOL,
    LoopSchedule,
    basis_state,
    doublet_leakage,
    evolve,
)
from .errors import InvalidSpec, IoFailure
from .holonomy import (
    CompositeLoop,
    LissajousLoop,
    LoopSpec,
    discretize,
    loop_commutator_norm,
    loop_from_dict,
    wilson_loop,
)
from .lambda_gauge import (
    DiagonalPart,
    FrameConnection,
    LambdaParams,
    LargeDetuningConnection,
    doublet_energies,
    frame_matrix,
    gamma_angle,
)
from .numerics import dagger

AGREEMENT_TOL = 0.02
MIN_MAX_PD = 0.05
REFERENCE_MAX_PD = 0.20
DEFAULT_ALPHAS = tuple(round(0.1 * k, 10) for k in range(1, 11))
CSV_FIELDS = (
    "alpha",
    "beta",
    "pd_holonomy",
    "pd_tdse",
    "commutator_norm",
    "leakage",
    "richardson_error",
)
CONNECTIONS = ("frame", "large-detuning", "abelian")


def _default_loop1():
    return LissajousLoop(alpha=0.8, beta=0.5)


def _default_loop2():
    return LissajousLoop(alpha=0.8, beta=0.5, phase_offset=math.pi / 2)


@dataclass(frozen=True)
class ExperimentConfig:
    params: LambdaParams = field(default_factory=lambda: LambdaParams(delta=1000.0, omega=1.0))
    loop1: LoopSpec = field(default_factory=_default_loop1)
    loop2: LoopSpec = field(default_factory=_default_loop2)
    duration: float = 50.0
    dt: float = 1e-4
    wilson_steps: int = 4000
    initial_state: int = 0
    connection: str = "frame"
    alphas: tuple = DEFAULT_ALPHAS
    beta: float = 0.5
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.connection not in CONNECTIONS:
            raise InvalidSpec(f"connection must be one of {CONNECTIONS}")
        if self.output_format not in ("csv", "json"):
            raise InvalidSpec("output_format must be 'csv' or 'json'")
        if not 0 <= self.initial_state < 3:
            raise InvalidSpec("initial_state is a basis index in {0, 1, 2}")
        if len(self.alphas) == 0:
            raise InvalidSpec("alpha grid is empty")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))

    # JSON round trip -------------------------------------------------------

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "params":
                value = asdict(value)
            elif f.name in ("loop1", "loop2"):
                value = value.to_dict()
            elif f.name == "alphas":
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "params" in kwargs:
            kwargs["params"] = LambdaParams(**kwargs["params"])
        for key in ("loop1", "loop2"):
            if key in kwargs:
                kwargs[key] = loop_from_dict(kwargs[key])
        if "alphas" in kwargs:
            kwargs["alphas"] = tuple(kwargs["alphas"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Transport by the two methods
# ---------------------------------------------------------------------------


def _provider_and_order(config: ExperimentConfig):
    gamma = gamma_angle(config.params)
    if config.connection == "frame":
        return FrameConnection(gamma), "printed"
    if config.connection == "large-detuning":
        # The printed large-detuning potentials belong to the swapped doublet order.
        return LargeDetuningConnection(), "swapped"
    return DiagonalPart(FrameConnection(gamma)), "printed"


def loop_transport(spec: LoopSpec, config: ExperimentConfig):
    """Lab-frame transport of one loop predicted by its projected Wilson loop.

    Returns ``(T, holonomy)`` with ``T = B U B^dagger + f f^dagger``; ``B`` holds
    the doublet columns of the frame at the loop's base point and ``f`` the
    far-detuned column, which the adiabatic prediction leaves untouched.
    """
    provider, order = _provider_and_order(config)
    hol = wilson_loop(discretize(spec, config.wilson_steps), provider, projected=True)
    theta0, phi0 = spec.at(0.0)
    frame = frame_matrix(float(theta0), float(phi0), gamma_angle(config.params), order)
    doublet, far = frame[:, :2], frame[:, 2:]
    transport = doublet @ hol.matrix @ dagger(doublet) + far @ dagger(far)
    return transport, hol


@dataclass(frozen=True, eq=False)
class ComposedResult:
    pd: float
    populations_12: np.ndarray  # loop 1 first
    populations_21: np.ndarray  # loop 2 first
    commutator_norm: float = 0.0
    richardson_error: float = 0.0
    leakage: float = 0.0
    norm_drift: float = 0.0


def _pd(pop_a, pop_b) -> float:
    return float(abs(pop_a[0] - pop_b[0]))


def composed_path_pd(config: ExperimentConfig, method: str = "holonomy") -> ComposedResult:
    """P_d = |P_1(loop1 then loop2) - P_1(loop2 then loop1)| by one method."""
    psi0 = basis_state(config.initial_state)
    if method == "holonomy":
        t1, h1 = loop_transport(config.loop1, config)
        t2, h2 = loop_transport(config.loop2, config)
        psi_12 = t2 @ t1 @ psi0
        psi_21 = t1 @ t2 @ psi0
        pop_12, pop_21 = np.abs(psi_12) ** 2, np.abs(psi_21) ** 2
        return ComposedResult(
            _pd(pop_12, pop_21),
            pop_12,
            pop_21,
            commutator_norm=loop_commutator_norm(h1, h2),
            richardson_error=max(h1.richardson_error, h2.richardson_error),
        )
    if method == "tdse":
        runs = []
        for first, second in ((config.loop1, config.loop2), (config.loop2, config.loop1)):
            schedule = LoopSchedule(CompositeLoop((first, second)), 2 * config.duration)
            result = evolve(schedule, config.params, psi0, config.dt)
            runs.append((result, doublet_leakage(schedule, config.params, result.final_state)))
        (r12, leak12), (r21, leak21) = runs
        return ComposedResult(
            _pd(r12.populations, r21.populations),
            r12.populations,
            r21.populations,
            leakage=max(leak12, leak21),
            norm_drift=max(r12.norm_drift, r21.norm_drift),
        )
    raise ValueError(f"method must be 'holonomy' or 'tdse', got {method!r}")


# ---------------------------------------------------------------------------
# Scans and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    alpha: float
    beta: float
    pd_holonomy: float
    pd_tdse: float
    commutator_norm: float
    leakage: float
    richardson_error: float
    norm_drift: float = field(default=0.0, compare=False)

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in CSV_FIELDS)


def _with_alpha_beta(spec: LoopSpec, alpha: float, beta: float) -> LoopSpec:
    if not isinstance(spec, LissajousLoop):
        raise InvalidSpec("alpha/beta scans need lissajous loops")
    return replace(spec, alpha=alpha, beta=beta)


def config_at(config: ExperimentConfig, alpha: float, beta: float) -> ExperimentConfig:
    return replace(
        config,
        loop1=_with_alpha_beta(config.loop1, alpha, beta),
        loop2=_with_alpha_beta(config.loop2, alpha, beta),
    )


def scan_point(config: ExperimentConfig, alpha: float, beta: float) -> ScanRow:
    point = config_at(config, alpha, beta)
    hol = composed_path_pd(point, "holonomy")
    tdse = composed_path_pd(point, "tdse")
    return ScanRow(
        alpha=float(alpha),
        beta=float(beta),
        pd_holonomy=hol.pd,
        pd_tdse=tdse.pd,
        commutator_norm=hol.commutator_norm,
        leakage=tdse.leakage,
        richardson_error=hol.richardson_error,
        norm_drift=tdse.norm_drift,
    )


def alpha_scan(config: ExperimentConfig, alphas=None, beta: float | None = None) -> list[ScanRow]:
    """One row per alpha, in grid order.  Points run on ``config.workers`` threads."""
    alphas = config.alphas if alphas is None else tuple(alphas)
    beta = config.beta if beta is None else beta
    if len(alphas) == 0:
        raise InvalidSpec("alpha grid is empty")
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda a: scan_point(config, a, beta), alphas))
    return [scan_point(config, a, beta) for a in alphas]


@dataclass(frozen=True)
class ScanGate:
    max_abs_diff: float
    max_pd_holonomy: float
    max_leakage: float
    max_norm_drift: float
    agreement_ok: bool
    magnitude_ok: bool

    @property
    def passed(self) -> bool:
        return self.agreement_ok and self.magnitude_ok


def scan_gate(rows: list[ScanRow]) -> ScanGate:
    diffs = [abs(r.pd_holonomy - r.pd_tdse) for r in rows]
    max_diff = max(diffs)
    max_leak = max(r.leakage for r in rows)
    max_drift = max(r.norm_drift for r in rows)
    max_pd = max(r.pd_holonomy for r in rows)
    agreement = max_diff <= AGREEMENT_TOL and max_leak <= LEAKAGE_THRESHOLD and max_drift <= NORM_TOL
    return ScanGate(max_diff, max_pd, max_leak, max_drift, agreement, max_pd >= MIN_MAX_PD)


@dataclass(frozen=True, eq=False)
class TwoMethodReport:
    holonomy: ComposedResult
    tdse: ComposedResult
    population_diff_12: np.ndarray
    population_diff_21: np.ndarray
    dynamical_phase_bound: float
    leakage: float
    passed: bool
    causes: tuple

    def to_dict(self) -> dict:
        return {
            "pd_holonomy": self.holonomy.pd,
            "pd_tdse": self.tdse.pd,
            "populations_holonomy": [self.holonomy.populations_12.tolist(),
                                     self.holonomy.populations_21.tolist()],
            "populations_tdse": [self.tdse.populations_12.tolist(),
                                 self.tdse.populations_21.tolist()],
            "population_diff": [self.population_diff_12.tolist(),
                                self.population_diff_21.tolist()],
            "dynamical_phase_bound": self.dynamical_phase_bound,
            "leakage": self.leakage,
            "norm_drift": self.tdse.norm_drift,
            "commutator_norm": self.holonomy.commutator_norm,
            "passed": self.passed,
            "causes": list(self.causes),
        }


def two_method_report(config: ExperimentConfig) -> TwoMethodReport:
    """Compare per-order populations from the Wilson-loop prediction and the TDSE."""
    hol = composed_path_pd(config, "holonomy")
    tdse = composed_path_pd(config, "tdse")
    d12 = np.abs(hol.populations_12 - tdse.populations_12)
    d21 = np.abs(hol.populations_21 - tdse.populations_21)
    causes = []
    if max(d12.max(), d21.max()) > AGREEMENT_TOL:
        causes.append("disagreement")
    if tdse.leakage > LEAKAGE_THRESHOLD:
        causes.append("leakage")
    if tdse.norm_drift > NORM_TOL:
        causes.append("norm-drift")
    bound = abs(doublet_energies(config.params)[1]) * 2 * config.duration
    return TwoMethodReport(hol, tdse, d12, d21, bound, tdse.leakage, not causes, tuple(causes))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    payload = [{k: float(_fmt(v)) for k, v in zip(CSV_FIELDS, row.values())} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def emit(rows, fmt: str, path) -> None:
    """Write scan rows as CSV (12 significant digits) or as a JSON list."""
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_rows(path, fmt: str | None = None) -> list[ScanRow]:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        records = json.loads(path.read_text())
    else:
        with path.open(newline="") as fh:
            records = list(csv.DictReader(fh))
    return [ScanRow(**{k: float(rec[k]) for k in CSV_FIELDS}) for rec in records]

