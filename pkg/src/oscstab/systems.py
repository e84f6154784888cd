"""Built-in benchmark systems with exact vector fields and run parameters.

Each scenario ships the parameter values of its source description
verbatim, including the aggressive (epsilon, gamma) pairs; the CLI exposes
overrides for exploring the sampled-data regime (small gamma*epsilon),
where the closed loop contracts as designed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .controller import ControlLaw
from .jets import SmoothVectorField, cos, sec, sin, tan
from .liealg import IndexSets
from .resonance import KappaAssignment
from .simulator import ControlSystem, DriftModel

CAR_RANK_SEED = 2024


def underwater_vehicle_fields() -> list:
    """Kinematic 3D underwater vehicle: positions x1..x3, Euler angles x4..x6.

    Input 1 is translational velocity along the body axis, inputs 2..4 are
    angular velocity components.  Valid while |x5| < pi/2 (the secant blows
    up at the boundary).
    """

    def f1(x):
        c5, s5 = cos(x[4]), sin(x[4])
        c6, s6 = cos(x[5]), sin(x[5])
        return [c5 * c6, c5 * s6, -s5, 0.0, 0.0, 0.0]

    def f2(x):
        return [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]

    def f3(x):
        c4, s4 = cos(x[3]), sin(x[3])
        return [0.0, 0.0, 0.0, s4 * tan(x[4]), c4, s4 * sec(x[4])]

    def f4(x):
        c4, s4 = cos(x[3]), sin(x[3])
        return [0.0, 0.0, 0.0, c4 * tan(x[4]), -s4, c4 * sec(x[4])]

    return [
        SmoothVectorField(6, f1, name="f1"),
        SmoothVectorField(6, f2, name="f2"),
        SmoothVectorField(6, f3, name="f3"),
        SmoothVectorField(6, f4, name="f4"),
    ]


def front_wheel_car_fields() -> list:
    """Front-wheel drive car: rear-axle position x1, x2, heading x3, steering x4.

    Input 1 drives, input 2 steers.
    """

    def f1(x):
        c3, s3 = cos(x[2]), sin(x[2])
        c4, s4 = cos(x[3]), sin(x[3])
        return [c3 * c4, s3 * c4, s4, 0.0]

    def f2(x):
        return [0.0, 0.0, 0.0, 1.0]

    return [
        SmoothVectorField(4, f1, name="f1"),
        SmoothVectorField(4, f2, name="f2"),
    ]


@dataclass(frozen=True)
class Scenario:
    """A ready-to-run closed-loop setup: system, index sets, law parameters."""

    name: str
    system: ControlSystem
    sets: IndexSets
    kappa: KappaAssignment
    eps: float
    gamma: float
    x_star: tuple
    x0: tuple
    horizon: float
    rho: float
    provenance: str
    rank_points: tuple
    amplitude_rule: str = "product"
    acknowledge_kappa_warnings: bool = False

    def make_law(self, eps: Optional[float] = None, gamma: Optional[float] = None,
                 x_star: Optional[tuple] = None, kappa: Optional[KappaAssignment] = None,
                 amplitude_rule: Optional[str] = None) -> ControlLaw:
        return ControlLaw.create(
            epsilon=self.eps if eps is None else eps,
            gamma=self.gamma if gamma is None else gamma,
            x_star=self.x_star if x_star is None else tuple(x_star),
            sets=self.sets,
            kappa=self.kappa if kappa is None else kappa,
            m=self.system.m,
            amplitude_rule=self.amplitude_rule if amplitude_rule is None else amplitude_rule,
            acknowledge_kappa_warnings=self.acknowledge_kappa_warnings,
        )


def _vehicle_rank_grid() -> tuple:
    vals = (-1.2, 0.0, 1.2)
    return tuple(pt for pt in itertools.product(vals, repeat=6))


def _car_rank_points() -> tuple:
    rng = np.random.default_rng(CAR_RANK_SEED)
    return tuple(tuple(float(v) for v in rng.uniform(-2.0, 2.0, size=4)) for _ in range(100))


def underwater_vehicle() -> Scenario:
    """Vehicle under a bounded wave/current disturbance (0, 2, 5 sin t, 0, 0, 0)."""
    fields = underwater_vehicle_fields()
    drift = DriftModel.time_signal(
        lambda t: [0.0, 2.0, 5.0 * math.sin(t), 0.0, 0.0, 0.0],
        m_g=math.sqrt(29.0),
    )
    system = ControlSystem(
        n=6,
        m=4,
        fields=tuple(fields),
        drift=drift,
        domain_guard=lambda x: abs(x[4]) < math.pi / 2 - 1e-3,
        name="underwater_vehicle",
    )
    sets = IndexSets(s1=[1, 2, 3, 4], s2=[(1, 3), (1, 4)])
    x0 = (5.0, 10.0, 10.0, 3 * math.pi / 2, math.pi / 4, -math.pi)
    return Scenario(
        name="underwater_vehicle",
        system=system,
        sets=sets,
        kappa=KappaAssignment.assign(sets, second=[1, 2]),
        eps=0.1,
        gamma=10.0,
        x_star=(0.0,) * 6,
        x0=x0,
        horizon=20.0,
        rho=0.2 * float(np.linalg.norm(x0)),
        provenance="built-in: 3D underwater vehicle, bounded wave/current disturbance",
        rank_points=_vehicle_rank_grid(),
    )


def underwater_vehicle_cubic_drift() -> Scenario:
    """Vehicle variant with drift (0, x1^3, x2^3 sin t, 0, 0, 0) vanishing at 0."""
    base = underwater_vehicle()
    drift = DriftModel.state_cubic(
        lambda t, x: [0.0, x[0] ** 3, x[1] ** 3 * math.sin(t), 0.0, 0.0, 0.0],
        m_g=1.0,
        l_g=3.0,
    )
    system = ControlSystem(
        n=6,
        m=4,
        fields=base.system.fields,
        drift=drift,
        domain_guard=base.system.domain_guard,
        name="underwater_vehicle_cubic_drift",
    )
    return Scenario(
        name="underwater_vehicle_cubic_drift",
        system=system,
        sets=base.sets,
        kappa=base.kappa,
        eps=base.eps,
        gamma=base.gamma,
        x_star=base.x_star,
        x0=base.x0,
        horizon=base.horizon,
        rho=base.rho,
        provenance="built-in: 3D underwater vehicle, state-cubic drift vanishing at the target",
        rank_points=base.rank_points,
    )


def front_wheel_car() -> Scenario:
    """Car with actuator noise n1 = 2 cos(10 pi t), n2 = sin(20 pi t).

    The multiplier set (3, 1, 4, -2) carries one non-imposed order-3
    relation (2*k2 + k4 = 0); the scenario acknowledges that warning and
    runs anyway, mirroring its source.
    """
    fields = front_wheel_car_fields()
    drift = DriftModel.actuator_noise(
        (
            lambda t, x: 2.0 * math.cos(10.0 * math.pi * t),
            lambda t, x: math.sin(20.0 * math.pi * t),
        ),
        m_g=math.sqrt(5.0),
    )
    system = ControlSystem(
        n=4,
        m=2,
        fields=tuple(fields),
        drift=drift,
        domain_guard=lambda x: True,
        name="front_wheel_car",
    )
    sets = IndexSets(s1=[1, 2], s2=[(1, 2)], s3=[(1, 2, 1)])
    x0 = (5.0, 3.0, -math.pi / 2, math.pi / 4)
    return Scenario(
        name="front_wheel_car",
        system=system,
        sets=sets,
        kappa=KappaAssignment.assign(sets, second=[7], third=[(3, 1)]),
        eps=0.5,
        gamma=15.0,
        x_star=(0.0,) * 4,
        x0=x0,
        horizon=30.0,
        rho=0.5 * float(np.linalg.norm(x0)),
        provenance="built-in: front-wheel drive car, sinusoidal actuator noise",
        rank_points=_car_rank_points(),
        acknowledge_kappa_warnings=True,
    )


def sampled_integrator() -> Scenario:
    """Scalar baseline with the exact closed-form sample map x -> (1 - gamma*eps) x."""
    f1 = SmoothVectorField(1, lambda x: [1.0], name="f1")
    system = ControlSystem(
        n=1,
        m=1,
        fields=(f1,),
        drift=DriftModel.none(),
        domain_guard=lambda x: True,
        name="sampled_integrator",
    )
    sets = IndexSets(s1=[1])
    return Scenario(
        name="sampled_integrator",
        system=system,
        sets=sets,
        kappa=KappaAssignment.assign(sets),
        eps=0.1,
        gamma=5.0,
        x_star=(0.0,),
        x0=(1.0,),
        horizon=5.0,
        rho=0.1,
        provenance="built-in: scalar sampled integrator, closed-form regression baseline",
        rank_points=((0.0,), (1.0,), (-1.0,)),
    )


SCENARIOS = {
    "underwater_vehicle": underwater_vehicle,
    "underwater_vehicle_cubic_drift": underwater_vehicle_cubic_drift,
    "front_wheel_car": front_wheel_car,
    "sampled_integrator": sampled_integrator,
}


def load_scenario(name: str) -> Scenario:
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}"
        ) from None
    return factory()
