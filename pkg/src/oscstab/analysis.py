"""Empirical stability certification from simulated trajectories.

Certification is observational: decay rates are fitted to the recorded
data, never derived from proof constants.  The practical certificate asks
for an exponential envelope into a residual ball (decay until the first
entry time, containment afterwards); the exponential certificate asks for
a clean log-linear fit of the sampled norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .simulator import Trajectory

# Sampled norms below this are treated as numerically zero and excluded
# from log-linear fits.
ZERO_NORM_FLOOR = 1e-10

R_SQUARED_THRESHOLD = 0.9
TAIL_FRACTION = 0.2

# Fitted rates below this are float noise from flat sequences, not decay.
LAMBDA_FLOOR = 1e-12


@dataclass(frozen=True)
class StabilityReport:
    lambda_fit: float
    r_squared: float
    rho_est: float
    t1_est: Optional[float]
    envelope_ok: bool
    contraction_fraction: Optional[float]

    def as_row(self, eps: float, gamma: float) -> dict:
        return {
            "eps": eps,
            "gamma": gamma,
            "lambda_fit": self.lambda_fit,
            "r_squared": self.r_squared,
            "rho_est": self.rho_est,
            "t1_est": self.t1_est,
            "envelope_ok": self.envelope_ok,
        }


class TrajectoryTooShort(ValueError):
    pass


def _log_linear_fit(times: np.ndarray, norms: np.ndarray):
    """Least-squares fit of ln(norm) vs t; returns (decay_rate, r_squared).

    decay_rate is the negated slope, so positive means decay.  A constant
    sequence fits exactly (r^2 = 1) with rate 0.
    """
    mask = norms > ZERO_NORM_FLOOR
    t = times[mask]
    y = np.log(norms[mask])
    if len(t) < 2:
        return 0.0, 0.0
    tbar, ybar = t.mean(), y.mean()
    stt = float(np.sum((t - tbar) ** 2))
    if stt == 0.0:
        return 0.0, 0.0
    slope = float(np.sum((t - tbar) * (y - ybar)) / stt)
    resid = y - (ybar + slope * (t - tbar))
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    r2 = 1.0 if ss_tot <= 1e-30 else max(0.0, 1.0 - ss_res / ss_tot)
    return -slope, r2


def _tail_radius(times: np.ndarray, norms: np.ndarray) -> float:
    horizon = float(times[-1])
    cutoff = horizon - TAIL_FRACTION * horizon
    tail = norms[times >= cutoff]
    return float(tail.max()) if len(tail) else float(norms[-1])


def _entry_time(times: np.ndarray, norms: np.ndarray, rho: float) -> Optional[float]:
    """First time after which the norm never exceeds rho again."""
    inside = norms <= rho
    if not inside[-1]:
        return None
    idx = len(inside) - 1
    while idx > 0 and inside[idx - 1]:
        idx -= 1
    return float(times[idx])


def _envelope_holds(times, norms, x0_norm, rho, rate, t1) -> bool:
    """Check norm <= x0*exp(-rate*t) + rho at every recorded point before t1.

    Containment after t1 holds by construction of the entry time, so only
    the decay phase needs checking; with no entry time every point does.
    Tiny slack absorbs roundoff when the bound is met with equality.
    """
    for t, nv in zip(times, norms):
        if t1 is not None and t >= t1:
            break
        bound = x0_norm * math.exp(-rate * t) + rho
        if nv > bound * (1.0 + 1e-12):
            return False
    return True


def certify_practical(traj: Trajectory, rho: float) -> StabilityReport:
    """Certify decay into (and containment in) the rho-ball on the horizon.

    lambda_fit is the log-linear fit of the sampled norms over the decay
    phase (samples up to the entry time when there is one).  envelope_ok is
    true when that fitted rate is positive, x0*exp(-lambda*t) + rho bounds
    every recorded point before the entry time, and the trajectory stays
    inside the ball from the entry time on.
    """
    if rho < 0.0:
        raise ValueError(f"radius must be nonnegative, got {rho}")
    if len(traj.sample_times) < 10:
        raise TrajectoryTooShort(
            f"need at least 10 sampling instants, got {len(traj.sample_times)}"
        )
    times = traj.times
    norms = traj.norms()
    x0_norm = float(norms[0])
    t1 = _entry_time(times, norms, rho)
    rho_est = _tail_radius(times, norms)

    s_times = traj.sample_times
    s_norms = traj.sample_norms()
    if t1 is not None:
        decay_mask = s_times <= t1
        if decay_mask.sum() >= 2:
            lam, r2 = _log_linear_fit(s_times[decay_mask], s_norms[decay_mask])
        else:
            lam, r2 = _log_linear_fit(s_times, s_norms)
    else:
        lam, r2 = _log_linear_fit(s_times, s_norms)

    envelope_ok = lam > LAMBDA_FLOOR and _envelope_holds(times, norms, x0_norm, rho, lam, t1)

    contraction = _contraction_fraction(s_norms, traj.epsilon, lam, rho)
    return StabilityReport(
        lambda_fit=lam,
        r_squared=r2,
        rho_est=rho_est,
        t1_est=t1,
        envelope_ok=envelope_ok,
        contraction_fraction=contraction,
    )


def _contraction_fraction(sample_norms, eps, lam, rho) -> Optional[float]:
    factor = 1.0 - lam * eps
    outside = sample_norms[:-1] > rho / 2.0
    total = int(outside.sum())
    if total == 0:
        return None
    hits = int(np.sum((sample_norms[1:] <= factor * sample_norms[:-1]) & outside))
    return hits / total


def certify_exponential(traj: Trajectory) -> StabilityReport:
    """Fit ln||x(je)|| vs je; exponential verdict when the fit is clean.

    The verdict (positive rate and r^2 >= 0.9) is carried in envelope_ok.
    Samples at numerical zero are excluded, so a trajectory that bottoms
    out at machine precision is judged on its decaying prefix.
    """
    if len(traj.sample_times) < 10:
        raise TrajectoryTooShort(
            f"need at least 10 sampling instants, got {len(traj.sample_times)}"
        )
    s_times = traj.sample_times
    s_norms = traj.sample_norms()
    lam, r2 = _log_linear_fit(s_times, s_norms)
    verdict = lam > LAMBDA_FLOOR and r2 >= R_SQUARED_THRESHOLD
    rho_est = _tail_radius(traj.times, traj.norms())
    t1 = _entry_time(traj.times, traj.norms(), rho_est)
    contraction = _contraction_fraction(s_norms, traj.epsilon, lam, rho_est)
    return StabilityReport(
        lambda_fit=lam,
        r_squared=r2,
        rho_est=rho_est,
        t1_est=t1,
        envelope_ok=verdict,
        contraction_fraction=contraction,
    )


REPORT_COLUMNS = ("eps", "gamma", "lambda_fit", "r_squared", "rho_est", "t1_est", "envelope_ok")


def sweep_summary(runs: Sequence) -> list:
    """Rows of (params, report) pairs, sorted by (eps, gamma), deterministic."""
    rows = []
    for params, report in runs:
        eps = float(params["eps"])
        gamma = float(params["gamma"])
        rows.append(report.as_row(eps, gamma))
    rows.sort(key=lambda r: (r["eps"], r["gamma"]))
    return rows


def format_report_row(row: dict) -> str:
    def fmt(key):
        v = row[key]
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        return f"{v:.17g}"

    return ",".join(fmt(k) for k in REPORT_COLUMNS)


def export_report_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(format_report_row(row) + "\n")
