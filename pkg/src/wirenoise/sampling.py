"""Seeded random gates and measurement plans for verification suites.

Every sampled object i in a suite uses its own generator seeded with
[seed, i], so results do not depend on evaluation order.
"""

from __future__ import annotations

import math

import numpy as np

from .protocols import HomodyneBasis, MacronodeBasis, MeasurementPlan
from .symplectic import Symplectic2, euler_decompose, rotation, squeeze
from .wires import DrwParams, WireParams, drw_params


def sample_gate(rng: np.random.Generator, eta_range=(1.0 / 3.0, 3.0)) -> Symplectic2:
    """Random single-qumode Gaussian gate R(theta).S(eta).R(phi).

    Angles are uniform on (-pi, pi] and log(eta) is uniform, so squeezing
    and antisqueezing are sampled symmetrically.
    """
    theta, phi = rng.uniform(-math.pi, math.pi, size=2)
    eta = math.exp(rng.uniform(math.log(eta_range[0]), math.log(eta_range[1])))
    return rotation(theta) @ squeeze(eta) @ rotation(phi)


def rescale_gate_squeeze(gate: Symplectic2, eta: float) -> Symplectic2:
    """Replace the squeeze factor of a gate, keeping its rotation angles."""
    eu = euler_decompose(gate)
    return rotation(eu.theta) @ squeeze(eta) @ rotation(eu.phi)


# Plans whose accumulated covariance exceeds this sup-norm are redrawn: the
# noise identity still holds for them, but double precision cannot compare
# the two sides at the absolute tolerances the verification suites use.
AMPLIFICATION_CAP = 50.0


def _moderate(plan: MeasurementPlan) -> bool:
    from .noise import accumulate_sigma

    return float(np.max(np.abs(accumulate_sigma(plan).sigma_before))) <= AMPLIFICATION_CAP


def sample_cvw_plan(rng: np.random.Generator, max_steps: int = 6,
                    g_range=(0.3, 1.5), eps_range=(0.01, 0.5)) -> MeasurementPlan:
    while True:
        n = int(rng.integers(1, max_steps + 1))
        wire = WireParams(g=float(rng.uniform(*g_range)), epsilon=float(rng.uniform(*eps_range)))
        steps = tuple(HomodyneBasis(float(rng.uniform(-1.4, 1.4))) for _ in range(n))
        plan = MeasurementPlan("cvw", steps, wire)
        if _moderate(plan):
            return plan


def _sample_drw(rng: np.random.Generator, alpha_range=(0.3, 1.5)) -> DrwParams:
    return drw_params(float(rng.uniform(*alpha_range)))


def sample_macronode_plan(rng: np.random.Generator, max_steps: int = 3) -> MeasurementPlan:
    while True:
        n = int(rng.integers(1, max_steps + 1))
        drw = _sample_drw(rng)
        steps = []
        while len(steps) < n:
            a, b = rng.uniform(-1.4, 1.4, size=2)
            basis = MacronodeBasis(float(a), float(b))
            # Stay clear of nearly singular step gates.
            if abs(math.sin(basis.theta_a - basis.theta_b)) > 0.1:
                steps.append(basis)
        plan = MeasurementPlan("macronode", tuple(steps), drw)
        if _moderate(plan):
            return plan


def sample_dictionary_plan(rng: np.random.Generator, max_steps: int = 4) -> MeasurementPlan:
    while True:
        n = int(rng.integers(1, max_steps + 1))
        drw = _sample_drw(rng)
        steps = tuple(HomodyneBasis(float(rng.uniform(-1.4, 1.4))) for _ in range(n))
        plan = MeasurementPlan("dictionary", steps, drw)
        if _moderate(plan):
            return plan


def sample_plan(rng: np.random.Generator) -> MeasurementPlan:
    """A random plan from any of the three protocols."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return sample_cvw_plan(rng)
    if kind == 1:
        return sample_macronode_plan(rng)
    return sample_dictionary_plan(rng)
