import math

import numpy as np
import pytest

from oscstab.analysis import (
    TrajectoryTooShort,
    certify_exponential,
    certify_practical,
    export_report_csv,
    sweep_summary,
)
from oscstab.simulator import Trajectory


def norm_trajectory(times, norms, eps, dense_factor=1):
    """1-d trajectory whose state magnitude equals the given norms."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if dense_factor > 1:
        fine_t = np.linspace(times[0], times[-1], (len(times) - 1) * dense_factor + 1)
        fine_n = np.interp(fine_t, times, norms)
    else:
        fine_t, fine_n = times, norms
    return Trajectory(
        times=fine_t,
        states=fine_n.reshape(-1, 1),
        controls=np.zeros((len(fine_t), 1)),
        sample_times=times,
        sample_states=norms.reshape(-1, 1),
        epsilon=eps,
        gamma=1.0,
        substeps=1,
    )


def test_exact_exponential_certifies():
    eps = 0.1
    j = np.arange(60)
    traj = norm_trajectory(j * eps, 5.0 * np.exp(-2.0 * j * eps), eps)
    rep = certify_practical(traj, rho=0.5)
    assert rep.lambda_fit == pytest.approx(2.0, abs=1e-6)
    assert rep.envelope_ok
    assert rep.t1_est is not None
    rep0 = certify_practical(traj, rho=0.0)
    assert rep0.envelope_ok  # pure exponential needs no residual ball
    assert rep0.t1_est is None


def test_constant_above_rho_fails():
    eps = 0.1
    j = np.arange(30)
    traj = norm_trajectory(j * eps, np.full(30, 3.0), eps)
    rep = certify_practical(traj, rho=1.0)
    assert not rep.envelope_ok
    assert rep.t1_est is None
    assert rep.rho_est == pytest.approx(3.0)


def test_geometric_samples_recover_rate_for_any_rho():
    eps = 0.05
    q = 0.9
    j = np.arange(80)
    norms = 4.0 * q**j
    for rho in (0.0, 0.5, 2.0, 10.0):
        traj = norm_trajectory(j * eps, norms, eps)
        rep = certify_practical(traj, rho=rho)
        assert rep.envelope_ok, rho
        assert rep.lambda_fit == pytest.approx(-math.log(q) / eps, abs=1e-9)


def test_overshoot_above_initial_norm_plus_rho_fails():
    eps = 0.1
    j = np.arange(20)
    norms = 5.0 * np.exp(-1.0 * j * eps)
    norms[3] = 7.0  # transient above ||x0|| + rho
    traj = norm_trajectory(j * eps, norms, eps)
    rep = certify_practical(traj, rho=1.0)
    assert not rep.envelope_ok


def test_too_short_trajectory_raises():
    eps = 0.1
    j = np.arange(5)
    traj = norm_trajectory(j * eps, np.exp(-j * eps), eps)
    with pytest.raises(TrajectoryTooShort):
        certify_practical(traj, rho=0.1)
    with pytest.raises(TrajectoryTooShort):
        certify_exponential(traj)


def test_exponential_verdict_on_exact_decay():
    eps = 0.1
    j = np.arange(100)
    traj = norm_trajectory(j * eps, np.exp(-j * eps), eps)
    rep = certify_exponential(traj)
    assert rep.lambda_fit == pytest.approx(1.0, abs=1e-9)
    assert rep.r_squared == pytest.approx(1.0, abs=1e-12)
    assert rep.envelope_ok


def test_polynomial_decay_rejected_on_long_horizon():
    eps = 0.5
    j = np.arange(200)  # horizon 100 s
    traj = norm_trajectory(j * eps, 1.0 / (1.0 + j * eps), eps)
    rep = certify_exponential(traj)
    assert rep.lambda_fit > 0.0
    assert rep.r_squared < 0.9
    assert not rep.envelope_ok


def test_zero_floor_restricts_fit_to_prefix():
    eps = 0.1
    j = np.arange(40)
    norms = np.exp(-3.0 * j * eps)
    norms[25:] = 1e-16  # numerically zero tail
    traj = norm_trajectory(j * eps, norms, eps)
    rep = certify_exponential(traj)
    assert rep.lambda_fit == pytest.approx(3.0, abs=1e-9)
    assert rep.envelope_ok


def test_reports_are_replay_stable():
    eps = 0.1
    j = np.arange(50)
    rng = np.random.default_rng(5)
    norms = np.exp(-j * eps) * (1.0 + 0.05 * rng.standard_normal(50)) + 0.01
    traj = norm_trajectory(j * eps, np.abs(norms), eps)
    r1 = certify_practical(traj, rho=0.3)
    r2 = certify_practical(traj, rho=0.3)
    assert r1 == r2


def test_rho_est_monotone_under_in_ball_extension():
    eps = 0.1
    j = np.arange(50)
    norms = np.concatenate([np.exp(-j[:40] * eps), np.full(10, 0.01)])
    traj = norm_trajectory(j * eps, norms, eps)
    rep = certify_practical(traj, rho=0.05)
    j2 = np.arange(70)
    norms2 = np.concatenate([norms, np.full(20, 0.01)])
    traj2 = norm_trajectory(j2 * eps, norms2, eps)
    rep2 = certify_practical(traj2, rho=0.05)
    assert rep2.rho_est <= rep.rho_est + 1e-15


def test_contraction_fraction_counts_outside_ball_steps():
    # exactly geometric decay never beats (1 - lambda*eps) because
    # exp(-lambda*eps) > 1 - lambda*eps strictly
    eps = 0.1
    j = np.arange(30)
    traj = norm_trajectory(j * eps, 4.0 * 0.8**j, eps)
    rep = certify_practical(traj, rho=0.5)
    assert rep.contraction_fraction == 0.0

    # alternating fast/slow decay: the fast steps beat the linear factor
    eps = 0.01
    ratios = np.tile([0.99, 0.995], 20)
    norms = 4.0 * np.concatenate([[1.0], np.cumprod(ratios)])
    j = np.arange(len(norms))
    traj = norm_trajectory(j * eps, norms, eps)
    rep = certify_practical(traj, rho=1e-6)
    assert rep.contraction_fraction == pytest.approx(0.5, abs=0.05)


def test_sweep_summary_ordering_and_shapes():
    assert sweep_summary([]) == []
    eps = 0.1
    j = np.arange(30)
    traj = norm_trajectory(j * eps, np.exp(-j * eps), eps)
    rep = certify_exponential(traj)
    rows = sweep_summary([({"eps": 0.1, "gamma": 5.0}, rep)])
    assert len(rows) == 1
    assert rows[0]["eps"] == 0.1

    runs = []
    for eps_v in (0.2, 0.1, 0.05):
        for gamma in (10.0, 1.0):
            runs.append(({"eps": eps_v, "gamma": gamma}, rep))
    rows = sweep_summary(runs)
    assert len(rows) == 6
    assert [(r["eps"], r["gamma"]) for r in rows] == [
        (0.05, 1.0), (0.05, 10.0), (0.1, 1.0), (0.1, 10.0), (0.2, 1.0), (0.2, 10.0)
    ]


def test_report_csv_format(tmp_path):
    eps = 0.1
    j = np.arange(30)
    traj = norm_trajectory(j * eps, np.exp(-j * eps), eps)
    rep = certify_exponential(traj)
    rows = sweep_summary([({"eps": 0.1, "gamma": 5.0}, rep)])
    path = tmp_path / "report.csv"
    export_report_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "eps,gamma,lambda_fit,r_squared,rho_est,t1_est,envelope_ok"
    fields = lines[1].split(",")
    assert len(fields) == 7
    assert fields[-1] in ("true", "false")
