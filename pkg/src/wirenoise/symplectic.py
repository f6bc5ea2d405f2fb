"""Exact 2x2 symplectic algebra for single-qumode Gaussian unitaries.

Matrices act on the quadrature column vector (q, p)^T in units where the
vacuum variance is 1/2.  Phase-space displacements are stored separately
from the matrix and composed affinely, so the noise algebra downstream can
stay displacement-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

DET_TOL = 1e-12
RECOMPOSE_TOL = 1e-10


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Symplectic2:
    """A 2x2 real symplectic matrix with an optional phase-space displacement.

    Attributes:
        matrix: the linear part, det = 1 within ``DET_TOL``.
        shift: displacement (u, v) added after the linear action.
    """

    matrix: np.ndarray
    shift: np.ndarray = field(default_factory=lambda: _frozen_array([0.0, 0.0], (2,)))

    def __post_init__(self):
        m = _frozen_array(self.matrix, (2, 2))
        s = _frozen_array(self.shift, (2,))
        if not (np.isfinite(m).all() and np.isfinite(s).all()):
            raise InvalidParameterError("symplectic entries must be finite")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        # The cancellation floor of the determinant grows with the entry size,
        # so the tolerance is scaled for numerically large chain products.
        scale = max(1.0, float(np.max(np.abs(m)))) ** 2
        if abs(det - 1.0) > DET_TOL * scale:
            raise InvalidParameterError(f"matrix is not symplectic: det = {det!r}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", s)

    @classmethod
    def _trusted(cls, matrix: np.ndarray, shift: np.ndarray) -> "Symplectic2":
        """Bypass validation for products of already-validated factors."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "matrix", _frozen_array(matrix, (2, 2)))
        object.__setattr__(obj, "shift", _frozen_array(shift, (2,)))
        return obj

    def __matmul__(self, other: "Symplectic2") -> "Symplectic2":
        return compose(self, other)

    def inverse(self) -> "Symplectic2":
        a, b, c, d = self.matrix.ravel()
        inv = np.array([[d, -b], [-c, a]])
        return Symplectic2(inv, -inv @ self.shift)

    def apply(self, point) -> np.ndarray:
        """Map a phase-space point (q, p)."""
        return self.matrix @ np.asarray(point, dtype=float) + self.shift

    def is_close(self, other: "Symplectic2", tol: float = 1e-9) -> bool:
        return (
            np.max(np.abs(self.matrix - other.matrix)) <= tol
            and np.max(np.abs(self.shift - other.shift)) <= tol
        )


@dataclass(frozen=True)
class EulerDecomposition:
    """Rotation-squeeze-rotation factorization of a symplectic matrix.

    ``recompose()`` returns rotation(theta) @ squeeze(eta) @ rotation(phi);
    eta >= 1 is the canonical form, angles live in (-pi, pi].
    """

    theta: float
    eta: float
    phi: float

    def recompose(self) -> Symplectic2:
        return rotation(self.theta) @ squeeze(self.eta) @ rotation(self.phi)


def identity() -> Symplectic2:
    return Symplectic2(np.eye(2))


def squeeze(s: float) -> Symplectic2:
    """Rescale q by s and p by 1/s."""
    if not math.isfinite(s) or s == 0.0:
        raise InvalidParameterError(f"squeeze factor must be finite and nonzero, got {s!r}")
    return Symplectic2(np.array([[s, 0.0], [0.0, 1.0 / s]]))


def shear(sigma: float) -> Symplectic2:
    """Shear parallel to the momentum axis with gradient sigma."""
    if not math.isfinite(sigma):
        raise InvalidParameterError(f"shearing parameter must be finite, got {sigma!r}")
    return Symplectic2(np.array([[1.0, 0.0], [sigma, 1.0]]))


def rotation(theta: float) -> Symplectic2:
    """Clockwise quadrature rotation by theta."""
    if not math.isfinite(theta):
        raise InvalidParameterError(f"rotation angle must be finite, got {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    return Symplectic2(np.array([[c, -s], [s, c]]))


def fourier() -> Symplectic2:
    """Quarter rotation exchanging the quadratures: q -> -p, p -> q."""
    return Symplectic2(np.array([[0.0, -1.0], [1.0, 0.0]]))


def displacement(u: float, v: float) -> Symplectic2:
    """Pure phase-space displacement by (u, v)."""
    if not (math.isfinite(u) and math.isfinite(v)):
        raise InvalidParameterError("displacement components must be finite")
    return Symplectic2(np.eye(2), np.array([u, v]))


_GATE_BUILDERS = {
    "squeeze": lambda p: squeeze(float(p)),
    "shear": lambda p: shear(float(p)),
    "rotation": lambda p: rotation(float(p)),
    "fourier": lambda p: fourier(),
    "displacement": lambda p: displacement(float(p[0]), float(p[1])),
}


def make_gate(kind: str, param=None) -> Symplectic2:
    """Build one of the standard gates by name.

    kind is one of squeeze / shear / rotation / fourier / displacement;
    param is a scalar, or a 2-vector for displacement, and is ignored for
    fourier.
    """
    try:
        builder = _GATE_BUILDERS[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown gate kind {kind!r}") from None
    return builder(param)


def compose(a: Symplectic2, b: Symplectic2) -> Symplectic2:
    """Matrix product a.b, with b applied first; displacements compose affinely.

    The product of symplectic factors is symplectic, so the determinant is
    not re-validated; ill-conditioned chains would otherwise trip the check
    on pure rounding noise.
    """
    return Symplectic2._trusted(a.matrix @ b.matrix, a.matrix @ b.shift + a.shift)


def compose_all(gates) -> Symplectic2:
    """Ordered product of gates, first element applied first."""
    total = identity()
    for g in gates:
        total = g @ total
    return total


def _wrap_angle(theta: float) -> float:
    """Reduce into (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    return math.pi if w <= -math.pi else w


def euler_decompose(e: Symplectic2) -> EulerDecomposition:
    """Factor e.matrix as rotation(theta) @ squeeze(eta) @ rotation(phi), eta >= 1.

    Every 2x2 symplectic matrix admits this factorization; it is computed
    from the singular value decomposition, with improper factors folded so
    both orthogonal factors are rotations.  Pure rotations are returned as
    (total angle, 1, 0).
    """
    m = e.matrix
    u, sv, vt = np.linalg.svd(m)
    eta = math.sqrt(sv[0] / sv[1])
    if eta - 1.0 < 1e-12:
        return EulerDecomposition(_wrap_angle(math.atan2(m[1, 0], m[0, 0])), 1.0, 0.0)
    if np.linalg.det(u) < 0:
        # det(m) = +1 forces both factors improper; flip a common reflection.
        u = u @ np.diag([1.0, -1.0])
        vt = np.diag([1.0, -1.0]) @ vt
    theta = _wrap_angle(math.atan2(u[1, 0], u[0, 0]))
    phi = _wrap_angle(math.atan2(vt[1, 0], vt[0, 0]))
    return EulerDecomposition(theta, eta, phi)
