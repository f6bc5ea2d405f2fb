"""Brute-force verifier: exact multi-mode Gaussian simulation of the protocol circuits.

States are mean vectors and covariance matrices in block ordering
(q_1..q_n, p_1..p_n) with vacuum variance 1/2.  The analytic channel
average uses deferred measurement: an outcome-dependent displacement is a
linear feedback map on the joint Gaussian, and the averaged output state
is the marginal of the final mode.  That reproduces the protocol exactly
while avoiding any conditioning numerics.  The Monte Carlo path simulates
the conditional chain sample by sample instead.

Correction displacements are not transcribed from any closed form: each
step's coefficients are the infinite-squeezing limit of the chain's
outcome-to-mean response, obtained by regressing on the divergent part of
the pre-measurement covariance (the resource squeezing), which is exact
and input independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurementError, InvalidParameterError
from .protocols import MeasurementPlan
from .symplectic import Symplectic2

HALF_PI = 0.5 * math.pi
PINV_CUTOFF = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """An n-mode Gaussian state: mean (2n,) and covariance (2n, 2n)."""

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(2 * self.n_modes)
        cov = np.array(self.cov, dtype=float).reshape(2 * self.n_modes, 2 * self.n_modes)
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise InvalidParameterError("covariance must be symmetric")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def mode_block(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        """(mean, cov) restricted to one mode."""
        idx = [mode, self.n_modes + mode]
        return self.mean[idx], self.cov[np.ix_(idx, idx)]


def vacuum(n_modes: int) -> GaussianState:
    if n_modes < 1:
        raise InvalidParameterError("need at least one mode")
    return GaussianState(n_modes, np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    """Ascending symplectic spectrum; >= 1/2 for physical states, = 1/2 for pure ones."""
    n = state.n_modes
    omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    ev = np.linalg.eigvals(1j * omega @ state.cov)
    return np.sort(np.abs(np.real(ev)))[::2]


def _apply_linear(state: GaussianState, m: np.ndarray, shift=None) -> GaussianState:
    mean = m @ state.mean
    if shift is not None:
        mean = mean + shift
    return GaussianState(state.n_modes, mean, m @ state.cov @ m.T)


def _single_mode_embedding(n: int, mode: int, s2: np.ndarray) -> np.ndarray:
    m = np.eye(2 * n)
    q, p = mode, n + mode
    m[q, q], m[q, p] = s2[0, 0], s2[0, 1]
    m[p, q], m[p, p] = s2[1, 0], s2[1, 1]
    return m


def _cz_embedding(n: int, i: int, j: int, g: float) -> np.ndarray:
    m = np.eye(2 * n)
    m[n + i, j] += g
    m[n + j, i] += g
    return m


def _bs_embedding(n: int, i: int, j: int) -> np.ndarray:
    """Balanced beamsplitter: mode i becomes the symmetric (+) combination."""
    m = np.eye(2 * n)
    r = 1.0 / math.sqrt(2.0)
    for a, b in ((i, j), (n + i, n + j)):
        m[a, a], m[a, b] = r, r
        m[b, a], m[b, b] = r, -r
    return m


def _check_mode(state: GaussianState, mode: int) -> None:
    if not (0 <= mode < state.n_modes):
        raise InvalidParameterError(f"mode {mode} out of range for {state.n_modes} modes")


def squeeze_mode(state: GaussianState, mode: int, s: float) -> GaussianState:
    _check_mode(state, mode)
    if not (math.isfinite(s) and s != 0.0):
        raise InvalidParameterError("squeeze factor must be finite and nonzero")
    return _apply_linear(state, _single_mode_embedding(state.n_modes, mode, np.diag([s, 1.0 / s])))


def cz(state: GaussianState, i: int, j: int, g: float) -> GaussianState:
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise InvalidParameterError("entangling gate needs two distinct modes")
    return _apply_linear(state, _cz_embedding(state.n_modes, i, j, g))


def beamsplitter5050(state: GaussianState, i: int, j: int) -> GaussianState:
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise InvalidParameterError("beamsplitter needs two distinct modes")
    return _apply_linear(state, _bs_embedding(state.n_modes, i, j))


def apply_single_mode(state: GaussianState, mode: int, gate: Symplectic2) -> GaussianState:
    _check_mode(state, mode)
    n = state.n_modes
    shift = np.zeros(2 * n)
    shift[mode], shift[n + mode] = gate.shift
    return _apply_linear(state, _single_mode_embedding(n, mode, gate.matrix), shift)


def displace(state: GaussianState, mode: int, u: float, v: float) -> GaussianState:
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[mode] += u
    mean[state.n_modes + mode] += v
    return GaussianState(state.n_modes, mean, state.cov)


def append_squeezed_mode(state: GaussianState, epsilon: float) -> GaussianState:
    """Attach a fresh momentum-squeezed blank node with q variance 1/(2*eps)."""
    n = state.n_modes
    mean = np.zeros(2 * (n + 1))
    cov = np.zeros((2 * (n + 1), 2 * (n + 1)))
    # Re-block: old q indices stay, old p indices shift by one slot.
    old = np.concatenate([np.arange(n), np.arange(n) + n + 1])
    mean[old] = state.mean
    cov[np.ix_(old, old)] = state.cov
    cov[n, n] = 0.5 / epsilon
    cov[2 * n + 1, 2 * n + 1] = 0.5 * epsilon
    return GaussianState(n + 1, mean, cov)


def _measurement_vector(n: int, mode: int, theta: float) -> np.ndarray:
    v = np.zeros(2 * n)
    v[mode] = math.sin(theta)
    v[n + mode] = math.cos(theta)
    return v


def homodyne(state: GaussianState, mode: int, theta: float, outcome=None, rng=None):
    """Measure cos(theta)*p + sin(theta)*q on a mode and remove it.

    Returns the conditional state of the surviving modes and the outcome,
    which is sampled from the correct marginal when not supplied.
    """
    _check_mode(state, mode)
    n = state.n_modes
    v = _measurement_vector(n, mode, theta)
    var_y = float(v @ state.cov @ v)
    if var_y <= PINV_CUTOFF:
        raise DegenerateMeasurementError("measured quadrature has (numerically) zero variance")
    mu_y = float(v @ state.mean)
    if outcome is None:
        rng = np.random.default_rng() if rng is None else rng
        outcome = float(rng.normal(mu_y, math.sqrt(var_y)))
    cv = state.cov @ v
    mean = state.mean + cv * ((outcome - mu_y) / var_y)
    cov = state.cov - np.outer(cv, cv) / var_y
    keep = [k for k in range(2 * n) if k not in (mode, n + mode)]
    return GaussianState(n - 1, mean[keep], cov[np.ix_(keep, keep)]), float(outcome)


# ---------------------------------------------------------------------------
# Canonical correction coefficients from the divergent-part regression
# ---------------------------------------------------------------------------

def _cvw_feedback(theta: float, g: float) -> np.ndarray:
    """Column (dq, dp) multiplying the raw outcome of one single-wire measurement.

    Built from the step circuit on [logical, ancilla]: the seed covariance
    carries the ancilla's divergent q variance through CZ(g), and the
    response of the output mode is regressed on the measured quadrature.
    """
    n = 2
    seed = np.zeros((2 * n, 2 * n))
    seed[1, 1] = 1.0  # divergent q of the fresh ancilla
    s = _cz_embedding(n, 0, 1, g)
    d = s @ seed @ s.T
    v = _measurement_vector(n, 0, theta)
    dvv = float(v @ d @ v)
    if abs(dvv) <= PINV_CUTOFF:
        raise DegenerateMeasurementError("single-wire step has no teleporting component")
    out_rows = d[[1, n + 1], :] @ v
    return (out_rows / dvv).reshape(2, 1)


def _macronode_feedback(theta_a: float, theta_b: float, t: float) -> np.ndarray:
    """2x2 block multiplying the raw outcome pair of one macronode measurement.

    theta_a is measured on the antisymmetric beamsplitter output and
    theta_b on the symmetric one; that arm assignment is what realizes the
    step gate S(1/t).R(th+).S(tan th-).R(th+) rather than its negative.
    """
    n = 3
    seed = np.zeros((2 * n, 2 * n))
    seed[1, 1] = 1.0
    seed[2, 2] = 1.0
    s = _bs_embedding(n, 0, 1) @ _cz_embedding(n, 1, 2, t)
    d = s @ seed @ s.T
    vs = np.column_stack([
        _measurement_vector(n, 1, theta_a),
        _measurement_vector(n, 0, theta_b),
    ])
    dvv = vs.T @ d @ vs
    det = dvv[0, 0] * dvv[1, 1] - dvv[0, 1] * dvv[1, 0]
    if abs(det) <= PINV_CUTOFF * (1.0 + float(np.max(np.abs(dvv)))) ** 2:
        raise DegenerateMeasurementError("macronode measurement pair is degenerate")
    dov = d[[2, n + 2], :] @ vs
    return dov @ np.linalg.inv(dvv)


def step_feedback(plan: MeasurementPlan, step_index: int) -> np.ndarray:
    """Canonical correction coefficients of one plan step: displacement = -B @ outcomes."""
    step = plan.steps[step_index]
    if plan.protocol == "cvw":
        return _cvw_feedback(step.theta, plan.wire.g)
    if plan.protocol == "macronode":
        return _macronode_feedback(step.theta_a, step.theta_b, plan.wire.t)
    return _macronode_feedback(HALF_PI, step.theta, plan.wire.t)


# ---------------------------------------------------------------------------
# Protocol channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelEstimate:
    """Realized gate and the average noise covariance added before it."""

    realized_gate: Symplectic2
    added_cov: np.ndarray
    averaging: str
    samples: int = 0
    stderr: np.ndarray | None = None
    sample_means: np.ndarray | None = None


def _chain_operators(plan: MeasurementPlan):
    """Yield (embedding matrices, bookkeeping) for the deferred-measurement chain."""
    if plan.protocol == "cvw":
        n_total = 1 + plan.n
    else:
        n_total = 1 + 2 * plan.n
    eps = plan.wire.epsilon
    ops = []
    logical = 0
    for i, step in enumerate(plan.steps):
        if plan.protocol == "cvw":
            anc = 1 + i
            ops.append(_cz_embedding(n_total, logical, anc, plan.wire.g))
            b = _cvw_feedback(step.theta, plan.wire.g)
            m = np.eye(2 * n_total)
            v = _measurement_vector(n_total, logical, step.theta)
            m[anc, :] -= b[0, 0] * v
            m[n_total + anc, :] -= b[1, 0] * v
            ops.append(m)
            logical = anc
        else:
            a1, a2 = 1 + 2 * i, 2 + 2 * i
            t = plan.wire.t
            if plan.protocol == "macronode":
                th_a, th_b = step.theta_a, step.theta_b
            else:
                th_a, th_b = HALF_PI, step.theta
            ops.append(_cz_embedding(n_total, a1, a2, t))
            ops.append(_bs_embedding(n_total, logical, a1))
            b = _macronode_feedback(th_a, th_b, t)
            m = np.eye(2 * n_total)
            v_a = _measurement_vector(n_total, a1, th_a)
            v_b = _measurement_vector(n_total, logical, th_b)
            for col, v in enumerate((v_a, v_b)):
                m[a2, :] -= b[0, col] * v
                m[n_total + a2, :] -= b[1, col] * v
            ops.append(m)
            logical = a2
    return n_total, ops, logical, eps


def _analytic_channel(plan: MeasurementPlan, input_cov: np.ndarray):
    """Exact averaged output block and realized linear map of the chain.

    The joint covariance splits exactly into the input part, the divergent
    ancilla-q part with weight 1/(2*eps), and the anti-squeezed ancilla-p
    part with weight eps/2.  The canonical feedback annihilates the
    divergent sector of the surviving mode identically (its seed vectors
    lie in the span of the measured ones whenever the measurement pair is
    non-degenerate), so that sector is dropped rather than cancelled in
    floating point; the result is exactly linear in eps and stable at any
    squeezing.
    """
    n_total, ops, out_mode, eps = _chain_operators(plan)
    dim = 2 * n_total
    cov_in_part = np.zeros((dim, dim))
    cov_in_part[0, 0] = input_cov[0, 0]
    cov_in_part[0, n_total] = cov_in_part[n_total, 0] = input_cov[0, 1]
    cov_in_part[n_total, n_total] = input_cov[1, 1]
    cov_anti = np.zeros((dim, dim))
    for k in range(1, n_total):
        cov_anti[n_total + k, n_total + k] = 1.0
    jac = np.zeros((dim, 2))
    jac[0, 0] = 1.0
    jac[n_total, 1] = 1.0
    for m in ops:
        cov_in_part = m @ cov_in_part @ m.T
        cov_anti = m @ cov_anti @ m.T
        jac = m @ jac
    idx = [out_mode, n_total + out_mode]
    cov_out = cov_in_part[np.ix_(idx, idx)] + 0.5 * eps * cov_anti[np.ix_(idx, idx)]
    t_out = jac[idx, :]
    return t_out, cov_out


def run_channel(
    plan: MeasurementPlan,
    input_cov=None,
    samples: int = 0,
    rng_seed: int = 0,
    averaging: str = "analytic",
    corrections: str = "canonical",
    input_mean=(0.0, 0.0),
) -> ChannelEstimate:
    """Simulate the protocol circuit and estimate the added noise covariance.

    analytic: exact outcome-averaged covariance via deferred measurement.
    monte-carlo: per-sample conditional chains with sampled outcomes and a
    phase-space point drawn from each conditional output, so the empirical
    covariance has a meaningful standard error.

    ``corrections`` selects the applied displacements: 'canonical' is the
    protocol's own correction (infinite-squeezing coefficients), while
    'annihilator' (Monte Carlo only) cancels the full finite-squeezing
    outcome-to-mean response, making every sampled output mean identical.
    The added covariance is reported in the noise-before-gate convention.
    """
    if input_cov is None:
        input_cov = 0.5 * np.eye(2)
    input_cov = np.asarray(input_cov, dtype=float).reshape(2, 2)

    t_out, cov_out = _analytic_channel(plan, input_cov)
    realized = Symplectic2(t_out)
    t_inv = realized.inverse().matrix

    if averaging == "analytic":
        if corrections != "canonical":
            raise InvalidParameterError("analytic averaging models the canonical corrections")
        added = t_inv @ cov_out @ t_inv.T - input_cov
        return ChannelEstimate(realized, 0.5 * (added + added.T), "analytic")

    if averaging != "monte-carlo":
        raise InvalidParameterError(f"unknown averaging mode {averaging!r}")
    if samples < 2:
        raise InvalidParameterError("monte-carlo averaging needs at least two samples")
    if corrections not in ("canonical", "annihilator"):
        raise InvalidParameterError(f"unknown corrections mode {corrections!r}")

    points = np.empty((samples, 2))
    means = np.empty((samples, 2))
    for s in range(samples):
        rng = np.random.default_rng([rng_seed, s])
        state = _conditional_chain(plan, input_cov, np.asarray(input_mean, float), rng, corrections)
        mean, cov = state.mode_block(0)
        means[s] = mean
        chol = np.linalg.cholesky(cov)
        points[s] = mean + chol @ rng.standard_normal(2)

    y = points @ t_inv.T
    cov_y = np.cov(y, rowvar=False, ddof=1)
    added = cov_y - input_cov
    se = np.sqrt((np.outer(np.diag(cov_y), np.diag(cov_y)) + cov_y**2) / (samples - 1))
    return ChannelEstimate(realized, 0.5 * (added + added.T), "monte-carlo",
                           samples=samples, stderr=se, sample_means=means)


def _conditional_chain(plan, input_cov, input_mean, rng, corrections):
    eps = plan.wire.epsilon
    n0 = 1
    mean = np.array([input_mean[0], input_mean[1]])
    cov = input_cov.copy()
    state = GaussianState(n0, mean, cov)
    for step in plan.steps:
        if plan.protocol == "cvw":
            state = append_squeezed_mode(state, eps)
            state = cz(state, 0, 1, plan.wire.g)
            state, m_phys = _measure(state, 0, step.theta, rng, corrections)
            if corrections == "canonical":
                b = _cvw_feedback(step.theta, plan.wire.g)
                state = displace(state, 0, -b[0, 0] * m_phys, -b[1, 0] * m_phys)
        else:
            t = plan.wire.t
            if plan.protocol == "macronode":
                th_a, th_b = step.theta_a, step.theta_b
            else:
                th_a, th_b = HALF_PI, step.theta
            state = append_squeezed_mode(state, eps)
            state = append_squeezed_mode(state, eps)
            state = cz(state, 1, 2, t)
            state = beamsplitter5050(state, 0, 1)
            # theta_a reads the antisymmetric arm (slot 1), theta_b the symmetric one.
            state, m_a = _measure(state, 1, th_a, rng, corrections)
            state, m_b = _measure(state, 0, th_b, rng, corrections)
            if corrections == "canonical":
                b = _macronode_feedback(th_a, th_b, t)
                shift = -b @ np.array([m_a, m_b])
                state = displace(state, 0, shift[0], shift[1])
    return state


def _measure(state, mode, theta, rng, corrections):
    if corrections == "annihilator":
        n = state.n_modes
        v = _measurement_vector(n, mode, theta)
        var_y = float(v @ state.cov @ v)
        if var_y <= PINV_CUTOFF:
            raise DegenerateMeasurementError("measured quadrature has (numerically) zero variance")
        mu_y = float(v @ state.mean)
        m = float(rng.normal(mu_y, math.sqrt(var_y)))
        # Condition the mean at the mean outcome: the regression term cancels exactly.
        new_state, _ = homodyne(state, mode, theta, outcome=mu_y)
        return new_state, m
    return homodyne(state, mode, theta, rng=rng)
