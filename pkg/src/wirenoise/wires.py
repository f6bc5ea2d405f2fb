"""Parameter models for uniformly weighted quantum wires.

A uniform wire is fully described by its edge weight g and self-loop weight
epsilon; the dual-rail resource fixes both through a single squeezing
parameter alpha.  Wire length is deliberately not a field: every noise
quantity downstream depends only on (g, epsilon) and the measurement plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class WireParams:
    """Uniform wire weights: edge weight g (nonzero) and self-loop epsilon (> 0)."""

    g: float
    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g != 0.0):
            raise InvalidParameterError(f"edge weight must be finite and nonzero, got {self.g!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise InvalidParameterError(f"self-loop weight must be positive, got {self.epsilon!r}")


@dataclass(frozen=True)
class DrwParams:
    """Wire weights derived from the dual-rail resource at squeezing parameter alpha.

    t = tanh(2 alpha) is the effective two-mode interaction strength,
    g_d = t/2 the edge weight of the converted single wire, and
    eps_d = sech(2 alpha) the self-loop weight; eps_d**2 + t**2 = 1.
    Build instances through :func:`drw_params`.
    """

    alpha: float
    g_d: float
    eps_d: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise InvalidParameterError(f"squeezing parameter must be positive, got {self.alpha!r}")
        if self.g_d != 0.5 * self.t:
            raise InvalidParameterError("g_d must equal t/2")
        # t < 1 for every finite alpha, but tanh saturates to 1.0 in floats.
        if not (0.0 < self.t <= 1.0 and 0.0 < self.eps_d < 1.0):
            raise InvalidParameterError("derived weights out of range")
        if abs(self.eps_d**2 + self.t**2 - 1.0) > 1e-12:
            raise InvalidParameterError("eps_d and t violate the hyperbolic identity")

    # Aliases so a DrwParams can stand in for the converted single wire.
    @property
    def g(self) -> float:
        return self.g_d

    @property
    def epsilon(self) -> float:
        return self.eps_d


@dataclass(frozen=True)
class RemodeledWire:
    """A weight-1 wire equivalent to a weight-g wire.

    mode 'alternating-selfloop' moves the weight into every second
    self-loop (node parities counted with the input as node 1); mode
    'uniform-rescaled' spreads it uniformly at the cost of squeezing the
    encoded input and rescaling every shearing parameter.
    """

    mode: str
    epsilon_odd: float
    epsilon_even: float
    input_rescale: float
    shear_rescale: float


def drw_params(alpha: float) -> DrwParams:
    """Derived wire weights for the dual-rail resource at squeezing alpha > 0."""
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 0.0):
        raise InvalidParameterError(f"squeezing parameter must be positive and finite, got {alpha!r}")
    t = math.tanh(2.0 * alpha)
    return DrwParams(alpha=float(alpha), g_d=0.5 * t, eps_d=1.0 / math.cosh(2.0 * alpha), t=t)


def db_to_alpha(db: float) -> float:
    """Convert a squeezing level in dB to the squeezing parameter alpha.

    The level is 10*log10(exp(2*alpha)), so alpha = db * ln(10) / 20.
    """
    if not (isinstance(db, (int, float)) and math.isfinite(db) and db > 0.0):
        raise InvalidParameterError(f"squeezing level must be positive, got {db!r}")
    return float(db) * math.log(10.0) / 20.0


def remodel(w: WireParams | DrwParams, mode: str) -> RemodeledWire:
    """Re-express a weight-g wire as a weight-1 wire.

    'alternating-selfloop' keeps measurements unchanged and alternates the
    self-loop weight between epsilon (odd nodes) and epsilon/g**2 (even
    nodes).  'uniform-rescaled' makes all self-loops epsilon/g at the cost
    of encoding the input with a 1/g squeeze and rescaling every shearing
    parameter by 1/g.
    """
    g, eps = w.g, w.epsilon
    if mode == "alternating-selfloop":
        return RemodeledWire(mode, epsilon_odd=eps, epsilon_even=eps / g**2,
                             input_rescale=1.0, shear_rescale=1.0 / g**2)
    if mode == "uniform-rescaled":
        return RemodeledWire(mode, epsilon_odd=eps / g, epsilon_even=eps / g,
                             input_rescale=1.0 / g, shear_rescale=1.0 / g)
    raise InvalidParameterError(f"unknown remodel mode {mode!r}")
