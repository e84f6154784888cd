"""Time-periodic oscillating feedback evaluation.

The control for input k at time t, with all state dependence frozen at the
most recent sampling instant, is

    u_k(t) = sum_{i in S1} a_i * delta(k, i)
           + eps^(-1/2) * sum_{(j1,j2) in S2} sqrt(|a_j1j2|) * 2*sqrt(pi*kappa)
                 * [delta(k,j1)*sign(a_j1j2)*cos(2*pi*kappa*t/eps)
                    + delta(k,j2)*sin(2*pi*kappa*t/eps)]
           + eps^(-2/3) * sum_{(l1,l2,l3) in S3} cbrt(a_l1l2l3) * 2*cbrt(2*pi^2*k3*k4)
                 * [delta(k,l1)*cos(2*pi*k1*t/eps)
                    + delta(k,l2)*sin(2*pi*k2*t/eps)
                    + delta(k,l3)*cos(2*pi*k1*t/eps)*sin(2*pi*k2*t/eps)],

with real, sign-preserving cube roots, so a negative coefficient or a
negative k4 folds its sign into the amplitude.  Every frequency is an
integer multiple of 2*pi/eps, which makes u periodic with period eps and
every oscillatory term zero-mean over one period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .jets import cbrt
from .liealg import IndexSets, assemble_F, feedback_coefficients
from .resonance import KappaAssignment, validate_kappa

# Third-order amplitude rules: the general form uses the product k3*k4
# (= k2^2 - k1^2); "difference" keeps only k4 (= k2 - k1), the variant some
# worked examples display.  The general form is the default.
AMPLITUDE_RULES = ("product", "difference")


@dataclass(frozen=True)
class ControlLaw:
    """Everything needed to evaluate the feedback from a sampled state."""

    epsilon: float
    gamma: float
    x_star: tuple
    sets: IndexSets
    kappa: KappaAssignment
    m: int
    amplitude_rule: str = "product"
    kappa_warnings: tuple = field(default=(), compare=False)

    @classmethod
    def create(
        cls,
        epsilon: float,
        gamma: float,
        x_star: Sequence[float],
        sets: IndexSets,
        kappa: KappaAssignment,
        m: int,
        amplitude_rule: str = "product",
        acknowledge_kappa_warnings: bool = False,
    ) -> "ControlLaw":
        if epsilon <= 0.0:
            raise ConfigError(f"sampling period must be positive, got {epsilon}")
        if gamma <= 0.0:
            raise ConfigError(f"control gain must be positive, got {gamma}")
        if amplitude_rule not in AMPLITUDE_RULES:
            raise ConfigError(f"unknown amplitude rule {amplitude_rule!r}")
        sets.validate(sets.total, m)
        if len(x_star) != sets.total:
            raise ConfigError(
                f"target has length {len(x_star)}, expected state dimension {sets.total}"
            )
        diag = validate_kappa(kappa)
        if set(kappa.second_order) != set(sets.s2) or set(kappa.third_order) != set(sets.s3):
            raise ConfigError("multiplier assignment does not cover the index sets")
        warnings = tuple(diag.messages())
        if not diag.passed and not acknowledge_kappa_warnings:
            raise ConfigError(
                "multiplier assignment fails validation: " + "; ".join(warnings)
            )
        return cls(
            epsilon=float(epsilon),
            gamma=float(gamma),
            x_star=tuple(float(v) for v in x_star),
            sets=sets,
            kappa=kappa,
            m=int(m),
            amplitude_rule=amplitude_rule,
            kappa_warnings=warnings if not diag.passed else (),
        )

    @property
    def n(self) -> int:
        return self.sets.total

    def max_kappa(self) -> int:
        vals = self.kappa.stored_values()
        return max(vals) if vals else 1


@dataclass(frozen=True)
class ControlSample:
    """Feedback coefficients and per-term amplitudes frozen at a sample state.

    ``s2_terms`` rows are (j1, j2, coef, sign, omega); ``s3_terms`` rows are
    (l1, l2, l3, coef, omega1, omega2) with input indices 0-based and the
    eps powers already folded into coef.
    """

    x: tuple
    a: np.ndarray
    s1_terms: tuple
    s2_terms: tuple
    s3_terms: tuple


def sample_from_coefficients(law: ControlLaw, a: Sequence[float], x_sample=None) -> ControlSample:
    """Build a sample directly from feedback coefficients (solve already done)."""
    a = np.asarray(a, dtype=float)
    if a.shape != (law.n,):
        raise ConfigError(f"expected {law.n} coefficients, got shape {a.shape}")
    eps = law.epsilon
    pos = 0
    s1_terms = []
    for i in law.sets.s1:
        s1_terms.append((i - 1, float(a[pos])))
        pos += 1
    s2_terms = []
    for pair in law.sets.s2:
        val = float(a[pos])
        pos += 1
        kap = law.kappa.second_order[pair]
        coef = 2.0 * math.sqrt(math.pi * kap * abs(val)) / math.sqrt(eps)
        sign = float(np.sign(val))
        omega = 2.0 * math.pi * kap / eps
        s2_terms.append((pair[0] - 1, pair[1] - 1, coef, sign, omega))
    s3_terms = []
    for triple in law.sets.s3:
        val = float(a[pos])
        pos += 1
        k1, k2, k3, k4 = law.kappa.third_order[triple]
        factor = k3 * k4 if law.amplitude_rule == "product" else k4
        coef = 2.0 * cbrt(2.0 * math.pi ** 2 * factor) * cbrt(val) * eps ** (-2.0 / 3.0)
        omega1 = 2.0 * math.pi * k1 / eps
        omega2 = 2.0 * math.pi * k2 / eps
        s3_terms.append((triple[0] - 1, triple[1] - 1, triple[2] - 1, coef, omega1, omega2))
    return ControlSample(
        x=tuple(float(v) for v in x_sample) if x_sample is not None else None,
        a=a,
        s1_terms=tuple(s1_terms),
        s2_terms=tuple(s2_terms),
        s3_terms=tuple(s3_terms),
    )


def prepare_sample(law: ControlLaw, fields: Sequence, x_sample: Sequence[float]) -> ControlSample:
    """Solve for the feedback coefficients at the sampled state and cache terms."""
    fmat = assemble_F(fields, law.sets, x_sample)
    a = feedback_coefficients(fmat, law.gamma, x_sample, law.x_star)
    return sample_from_coefficients(law, a, x_sample=x_sample)


def evaluate(law: ControlLaw, sample: ControlSample, t) -> np.ndarray:
    """Control vector at time t (scalar or array); shape (m,) or (m, len(t))."""
    tt = np.asarray(t, dtype=float)
    comps = [np.zeros_like(tt) for _ in range(law.m)]
    for i, ai in sample.s1_terms:
        comps[i] = comps[i] + ai
    for j1, j2, coef, sign, omega in sample.s2_terms:
        if coef != 0.0:
            comps[j1] = comps[j1] + coef * sign * np.cos(omega * tt)
            comps[j2] = comps[j2] + coef * np.sin(omega * tt)
    for l1, l2, l3, coef, omega1, omega2 in sample.s3_terms:
        if coef != 0.0:
            c1 = np.cos(omega1 * tt)
            s2 = np.sin(omega2 * tt)
            comps[l1] = comps[l1] + coef * c1
            comps[l2] = comps[l2] + coef * s2
            comps[l3] = comps[l3] + coef * c1 * s2
    return np.stack([np.broadcast_to(c, tt.shape) for c in comps]) if tt.ndim else np.array(
        [float(c) for c in comps]
    )


def max_magnitude(law: ControlLaw, sample: ControlSample, points_per_period: int = 1024) -> float:
    """Max over one period of the summed control magnitudes, by dense sampling."""
    ts = np.arange(points_per_period) * (law.epsilon / points_per_period)
    u = evaluate(law, sample, ts)
    return float(np.max(np.sum(np.abs(u), axis=0)))
