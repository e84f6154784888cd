"""Sampled-data closed-loop integration.

Time is partitioned into intervals [j*eps, (j+1)*eps).  At each sampling
instant the feedback coefficients are recomputed from the current state;
within an interval the control is a known, highly oscillatory function of
time only, and the continuous dynamics

    xdot = g(t, x) + sum_i f_i(x) * u_i(t)

are integrated with classical fixed-step RK4, stages evaluated at the exact
stage times.  Fixed steps keep the grid (and therefore every output file)
deterministic, and sampling instants land exactly on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .controller import ControlLaw, evaluate, prepare_sample
from .errors import ConfigError, EvaluationError, SingularityError

# Run outcomes
COMPLETED = "completed"
DOMAIN_EXIT = "domain_exit"
SINGULAR = "singular"
NONFINITE = "nonfinite"

# Fewer substeps than this per cycle of the fastest oscillation cannot
# resolve the control and the run is refused.
MIN_SUBSTEPS_PER_CYCLE = 8
DEFAULT_SUBSTEPS_PER_CYCLE = 64


@dataclass(frozen=True)
class DriftModel:
    """Uncontrolled term of the dynamics, with declared bounds.

    Kinds: "none"; "time_signal" (map t -> vector, bounded by m_g);
    "state_cubic" (map (t, x) -> vector with ||g|| <= m_g * ||x||^3 and
    Lipschitz constant l_g near the origin); "actuator_noise" (per-input
    disturbances n_k(t, x), drift = sum_k f_k(x) * n_k(t, x)).
    Declared bounds are monitored after the fact, never enforced during
    integration.
    """

    kind: str
    signal: Optional[Callable] = None
    state_map: Optional[Callable] = None
    noise: tuple = ()
    m_g: float = 0.0
    l_g: Optional[float] = None

    @classmethod
    def none(cls):
        return cls(kind="none")

    @classmethod
    def time_signal(cls, signal, m_g):
        return cls(kind="time_signal", signal=signal, m_g=float(m_g))

    @classmethod
    def state_cubic(cls, state_map, m_g, l_g):
        return cls(kind="state_cubic", state_map=state_map, m_g=float(m_g), l_g=float(l_g))

    @classmethod
    def actuator_noise(cls, noise, m_g):
        return cls(kind="actuator_noise", noise=tuple(noise), m_g=float(m_g))


def drift_eval(drift: DriftModel, fields: Sequence, t: float, x: Sequence) -> np.ndarray:
    """Drift vector at (t, x); actuator noise expands through the input fields."""
    if drift.kind == "none":
        return np.zeros(fields[0].dim if fields else len(x))
    if drift.kind == "time_signal":
        return np.asarray(drift.signal(t), dtype=float)
    if drift.kind == "state_cubic":
        return np.asarray(drift.state_map(t, x), dtype=float)
    if drift.kind == "actuator_noise":
        xs = list(x)
        out = np.zeros(fields[0].dim)
        for f, n in zip(fields, drift.noise):
            out += float(n(t, xs)) * np.asarray(f.eval(xs), dtype=float)
        return out
    raise ConfigError(f"unknown drift kind {drift.kind!r}")


@dataclass(frozen=True)
class ControlSystem:
    """Control-affine system: input fields, drift, and a domain guard."""

    n: int
    m: int
    fields: tuple
    drift: DriftModel
    domain_guard: Callable[[Sequence[float]], bool]
    name: str = ""

    def __post_init__(self):
        if len(self.fields) != self.m:
            raise ConfigError(f"expected {self.m} input fields, got {len(self.fields)}")
        for f in self.fields:
            if f.dim != self.n:
                raise ConfigError(f"field {f.name} has dimension {f.dim}, expected {self.n}")


@dataclass
class Trajectory:
    """Dense closed-loop output plus the sampling-instant bookkeeping."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    sample_times: np.ndarray
    sample_states: np.ndarray
    epsilon: float
    gamma: float
    substeps: int
    scenario: str = ""
    status: str = COMPLETED
    diagnostic: Optional[str] = None

    @property
    def horizon(self) -> float:
        return float(self.times[-1]) if len(self.times) else 0.0

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def sample_norms(self) -> np.ndarray:
        return np.linalg.norm(self.sample_states, axis=1)


def rk4_step(rhs, t: float, x: np.ndarray, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    k1 = rhs(t, x)
    k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = rhs(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def pi_eps_solve(
    system: ControlSystem,
    law: ControlLaw,
    x0: Sequence[float],
    horizon: Optional[float] = None,
    substeps_per_period: Optional[int] = None,
    scenario: str = "",
) -> Trajectory:
    """Integrate the sampled closed loop from x0 over [0, horizon].

    The feedback state is frozen at each sampling instant j*eps; the control
    stays time-varying inside the interval.  Returns a partial trajectory
    with a diagnostic instead of raising when the state leaves the domain,
    the feedback matrix turns singular at a sampling instant, or the state
    stops being finite.
    """
    eps = law.epsilon
    if horizon is None:
        horizon = 100.0 * eps
    if horizon <= 0.0:
        raise ConfigError(f"horizon must be positive, got {horizon}")
    max_kappa = law.max_kappa()
    if substeps_per_period is None:
        substeps_per_period = DEFAULT_SUBSTEPS_PER_CYCLE * max_kappa
    if substeps_per_period < MIN_SUBSTEPS_PER_CYCLE * max_kappa:
        raise ConfigError(
            f"{substeps_per_period} substeps per period cannot resolve the fastest "
            f"oscillation (multiplier {max_kappa}); need at least "
            f"{MIN_SUBSTEPS_PER_CYCLE * max_kappa}"
        )
    if system.n != law.n or system.m != law.m:
        raise ConfigError(
            f"system dimensions ({system.n}, {system.m}) do not match the law "
            f"({law.n}, {law.m})"
        )
    x = np.asarray(x0, dtype=float)
    if x.shape != (system.n,):
        raise ConfigError(f"initial state has shape {x.shape}, expected ({system.n},)")
    if not system.domain_guard(x.tolist()):
        raise ConfigError(f"initial state {x.tolist()} is outside the domain")

    times, states, controls = [], [], []
    sample_times, sample_states = [], []
    status, diagnostic = COMPLETED, None

    n_full = int(math.floor(horizon / eps + 1e-9))
    remainder = horizon - n_full * eps
    if remainder < 1e-9 * eps:
        remainder = 0.0
    fields = system.fields

    def make_rhs(sample):
        def rhs(t, xv):
            u = evaluate(law, sample, t)
            out = drift_eval(system.drift, fields, t, xv)
            xs = xv.tolist()
            for coef, f in zip(u, fields):
                out = out + coef * np.asarray(f.eval(xs), dtype=float)
            return out

        return rhs

    sample = None
    total_intervals = n_full + (1 if remainder else 0)
    j = 0
    try:
        while j < total_intervals:
            t_j = j * eps
            sample_times.append(t_j)
            sample_states.append(x.copy())
            try:
                sample = prepare_sample(law, fields, x.tolist())
            except SingularityError as err:
                status, diagnostic = SINGULAR, str(err)
                break
            rhs = make_rhs(sample)
            if j < n_full:
                steps, h = substeps_per_period, eps / substeps_per_period
                stage = lambda i: (j + i / substeps_per_period) * eps
            else:
                steps = max(1, math.ceil(remainder / (eps / substeps_per_period)))
                h = remainder / steps
                stage = lambda i: n_full * eps + i * h
            exited = False
            for i in range(steps):
                t = stage(i)
                times.append(t)
                states.append(x.copy())
                controls.append(evaluate(law, sample, t))
                x = rk4_step(rhs, t, x, h)
                if not np.all(np.isfinite(x)):
                    status = NONFINITE
                    diagnostic = f"state not finite after step at t = {t + h:.6g}"
                    exited = True
                    break
                if not system.domain_guard(x.tolist()):
                    status = DOMAIN_EXIT
                    diagnostic = f"state left the domain at t = {t + h:.6g}: {x.tolist()}"
                    exited = True
                    break
            if exited:
                break
            j += 1
        else:
            # completed all intervals: record the final state at its grid time
            t_end = n_full * eps if remainder == 0.0 else horizon
            times.append(t_end)
            states.append(x.copy())
            controls.append(evaluate(law, sample, t_end) if sample is not None else np.zeros(law.m))
            if remainder == 0.0:
                sample_times.append(n_full * eps)
                sample_states.append(x.copy())
    except EvaluationError as err:
        status = DOMAIN_EXIT
        diagnostic = f"field evaluation failed: {err}"

    return Trajectory(
        times=np.asarray(times, dtype=float),
        states=np.asarray(states, dtype=float),
        controls=np.asarray(controls, dtype=float),
        sample_times=np.asarray(sample_times, dtype=float),
        sample_states=np.asarray(sample_states, dtype=float),
        epsilon=eps,
        gamma=law.gamma,
        substeps=substeps_per_period,
        scenario=scenario,
        status=status,
        diagnostic=diagnostic,
    )


@dataclass(frozen=True)
class DriftBoundReport:
    max_norm: float
    max_cubic_ratio: Optional[float]
    declared_m_g: float
    declared_l_g: Optional[float]
    within_declared: bool


def monitor_bounds(drift: DriftModel, traj: Trajectory, fields: Sequence = ()) -> DriftBoundReport:
    """Re-evaluate the drift along a trajectory against its declared bounds.

    ``fields`` is required for actuator-noise drift (the disturbance acts
    through the input fields).
    """
    if drift.kind == "actuator_noise" and not fields:
        raise ConfigError("monitor_bounds needs the input fields for actuator-noise drift")
    max_norm = 0.0
    max_ratio = None
    for t, xv in zip(traj.times, traj.states):
        g = drift_eval(drift, fields, float(t), xv.tolist())
        gn = float(np.linalg.norm(g))
        max_norm = max(max_norm, gn)
        xn = float(np.linalg.norm(xv))
        if xn >= 1e-9:
            ratio = gn / xn ** 3
            max_ratio = ratio if max_ratio is None else max(max_ratio, ratio)
    if drift.kind == "none":
        within = True
    elif drift.kind == "state_cubic":
        within = max_ratio is None or max_ratio <= drift.m_g + 1e-12
    else:
        within = max_norm <= drift.m_g + 1e-12
    return DriftBoundReport(
        max_norm=max_norm,
        max_cubic_ratio=max_ratio,
        declared_m_g=drift.m_g,
        declared_l_g=drift.l_g,
        within_declared=within,
    )


def export_trajectory_csv(traj: Trajectory, path) -> None:
    """Write `t,x1..xn,u1..um,norm_x` rows, 17 significant digits (round-trip exact)."""
    n = traj.states.shape[1]
    m = traj.controls.shape[1]
    header = (
        "t,"
        + ",".join(f"x{i + 1}" for i in range(n))
        + ","
        + ",".join(f"u{i + 1}" for i in range(m))
        + ",norm_x"
    )
    norms = traj.norms()
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for idx in range(len(traj.times)):
            row = [traj.times[idx], *traj.states[idx], *traj.controls[idx], norms[idx]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
