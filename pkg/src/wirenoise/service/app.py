"""Service endpoints wrapping the noise engine and the oracle."""

from __future__ import annotations

import math
import re

import numpy as np
from fastapi import FastAPI, HTTPException

from ..errors import WirenoiseError
from ..noise import (
    accumulate_sigma,
    bound_suite,
    canonical_macronode_sv,
    certified_cvw_gap,
    certified_dictionary_gap,
    high_squeezing_floor,
    min_scalar_variance,
    rotation_sweep,
)
from ..oracle import run_channel
from ..sampling import sample_cvw_plan, sample_dictionary_plan, sample_macronode_plan, sample_plan
from ..symplectic import Symplectic2, euler_decompose, rotation, squeeze
from ..wires import DrwParams, WireParams, db_to_alpha, drw_params, remodel
from .schemas import (
    GateNoiseRequest,
    GateNoiseResponse,
    OracleCheckRequest,
    OracleCheckResponse,
    RemodelRequest,
    RemodelResponse,
    SweepRequest,
    SweepResponse,
    VerifyRequest,
    VerifyResponse,
)

ORACLE_TOL = 1e-8
MC_SIGMA_LIMIT = 5.0

_GATE_RE = re.compile(
    r"^\s*R\(\s*([^)]+?)\s*\)\s*S\(\s*([^)]+?)\s*\)\s*R\(\s*([^)]+?)\s*\)\s*$", re.IGNORECASE
)


def fmt12(x: float) -> str:
    """12-significant-digit decimal, or the literal ``inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def round12(obj):
    """Recursively round floats to 12 significant digits for stable serialization."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.12g}") if math.isfinite(x) else x
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    return obj


def _resolve_params(req) -> tuple[DrwParams | None, WireParams | DrwParams | None]:
    """(dual-rail params, effective cvw wire) from a squeezing configuration."""
    alpha = db_to_alpha(req.db) if req.db is not None else req.alpha
    drw = drw_params(alpha) if alpha is not None else None
    if req.protocol != "cvw":
        return drw, None
    if req.g is not None and req.epsilon is not None:
        return drw, WireParams(g=req.g, epsilon=req.epsilon)
    if req.g is not None or req.epsilon is not None:
        g = req.g if req.g is not None else drw.g_d
        eps = req.epsilon if req.epsilon is not None else drw.eps_d
        return drw, WireParams(g=g, epsilon=eps)
    return drw, drw


def parse_gate(spec) -> Symplectic2:
    """Accept ``R(theta)S(eta)R(phi)`` text or four row-major matrix entries."""
    if isinstance(spec, str):
        m = _GATE_RE.match(spec)
        if not m:
            raise HTTPException(400, f"cannot parse gate spec {spec!r}")
        try:
            theta, eta, phi = (float(v) for v in m.groups())
            return rotation(theta) @ squeeze(eta) @ rotation(phi)
        except (ValueError, WirenoiseError) as exc:
            raise HTTPException(400, f"bad gate parameters: {exc}") from exc
    entries = [float(v) for v in spec]
    if len(entries) != 4:
        raise HTTPException(400, "matrix gates need exactly four entries, row major")
    det = entries[0] * entries[3] - entries[1] * entries[2]
    if not math.isfinite(det) or abs(det - 1.0) > 1e-9:
        raise HTTPException(400, f"matrix is not symplectic: determinant is {det!r}")
    mat = np.array(entries, dtype=float).reshape(2, 2)
    # Project exactly onto det = 1 so downstream validation stays clean.
    return Symplectic2(mat / math.sqrt(det))


def create_app() -> FastAPI:
    app = FastAPI(title="wirenoise", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sweep-rotation", response_model=SweepResponse)
    def sweep(req: SweepRequest):
        if req.protocol == "macronode" and req.n != 2:
            raise HTTPException(400, "macronode sweeps use n = 2")
        if req.protocol in ("cvw", "dictionary") and req.n not in (3, 4):
            raise HTTPException(400, f"{req.protocol} sweeps support n = 3 or 4")
        drw, wire = _resolve_params(req)
        # Open grid on (0, 2*pi): endpoints are periodic duplicates.
        thetas = [2.0 * math.pi * k / (req.grid + 1) for k in range(1, req.grid + 1)]
        try:
            table = rotation_sweep(req.protocol, req.n,
                                   drw.alpha if drw is not None else None,
                                   thetas, wire=wire)
        except WirenoiseError as exc:
            raise HTTPException(400, str(exc)) from exc
        rows = [[fmt12(th), fmt12(sv), req.protocol, str(req.n)] for th, sv in table]
        return SweepResponse(header=["theta", "sv", "protocol", "n"], rows=rows)

    @app.post("/gate-noise", response_model=GateNoiseResponse)
    def gate_noise(req: GateNoiseRequest):
        target = parse_gate(req.gate)
        n = req.n if req.n is not None else (2 if req.protocol == "macronode" else 4)
        drw, wire = _resolve_params(req)
        params = wire if req.protocol == "cvw" else drw
        try:
            report = min_scalar_variance(target, req.protocol, params, n)
        except WirenoiseError as exc:
            raise HTTPException(400, str(exc)) from exc

        eta = euler_decompose(target).eta
        if req.protocol == "cvw":
            eps_eff, g_eff = params.epsilon, params.g
        else:
            eps_eff, g_eff = drw.eps_d, drw.t
        # Certified floor: half the reference closed form; see bound_suite.
        floor = 0.5 * high_squeezing_floor(eps_eff, eta, g_eff)
        checks = {
            "squeezing_floor": floor,
            "floor_margin": report.sv - floor,
            "floor_satisfied": report.sv > floor,
        }
        if drw is not None:
            canonical = canonical_macronode_sv(target, drw)
            checks["macronode_canonical_sv"] = canonical
            if req.protocol == "cvw":
                gap = certified_cvw_gap(drw)
            elif req.protocol == "dictionary":
                gap = certified_dictionary_gap(drw)
            else:
                gap = None
            if gap is not None:
                checks["macronode_gap_bound"] = gap
                checks["macronode_gap_margin"] = report.sv - canonical - gap
                checks["gap_satisfied"] = report.sv - canonical - gap >= -1e-9

        if req.protocol == "macronode":
            angles = [[s.theta_a, s.theta_b] for s in report.plan.steps]
        else:
            angles = [[s.theta] for s in report.plan.steps]
        return GateNoiseResponse(
            gate=round12(target.matrix.tolist()),
            protocol=req.protocol,
            n=n,
            sv_min=round12(report.sv),
            plan_angles=round12(angles),
            free_theta=round12(float(report.free_theta_opt)),
            bound_checks=round12(checks),
        )

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        alpha = db_to_alpha(req.db) if req.db is not None else req.alpha
        try:
            drw = drw_params(alpha)
            report = bound_suite(req.samples, req.seed, drw, corrupt_kernel=req.corrupt_kernel)
        except WirenoiseError as exc:
            raise HTTPException(400, str(exc)) from exc
        dev = _oracle_deviation(req.oracle_samples, req.seed)
        violations = dict(report.violations)
        violations["oracle_max_abs_dev"] = round12(dev)
        passed = (
            all(v == 0 for k, v in violations.items() if k != "oracle_max_abs_dev")
            and dev < ORACLE_TOL
        )
        return VerifyResponse(samples=req.samples, violations=violations, passed=passed)

    @app.post("/oracle-check", response_model=OracleCheckResponse)
    def oracle_check(req: OracleCheckRequest):
        dev = _oracle_deviation(req.samples, req.seed)
        mc_dev = None
        if req.mc_samples > 0:
            mc_dev = 0.0
            for i, sampler in enumerate((sample_cvw_plan, sample_macronode_plan,
                                         sample_dictionary_plan)):
                plan = sampler(np.random.default_rng([req.seed, 7, i]))
                analytic = run_channel(plan)
                mc = run_channel(plan, samples=req.mc_samples, rng_seed=req.seed,
                                 averaging="monte-carlo")
                z = float(np.max(np.abs(mc.added_cov - analytic.added_cov) / mc.stderr))
                mc_dev = max(mc_dev, z)
        passed = dev < ORACLE_TOL and (mc_dev is None or mc_dev < MC_SIGMA_LIMIT)
        return OracleCheckResponse(samples=req.samples, max_abs_dev=round12(dev),
                                   mc_samples=req.mc_samples,
                                   mc_max_sigma_dev=round12(mc_dev) if mc_dev is not None else None,
                                   passed=passed)

    @app.post("/remodel", response_model=RemodelResponse)
    def remodel_endpoint(req: RemodelRequest):
        try:
            out = remodel(WireParams(g=req.g, epsilon=req.epsilon), req.mode)
        except WirenoiseError as exc:
            raise HTTPException(400, str(exc)) from exc
        return RemodelResponse(mode=out.mode,
                               epsilon_odd=round12(out.epsilon_odd),
                               epsilon_even=round12(out.epsilon_even),
                               input_rescale=round12(out.input_rescale),
                               shear_rescale=round12(out.shear_rescale))

    return app


def _oracle_deviation(samples: int, seed: int) -> float:
    worst = 0.0
    for i in range(samples):
        plan = sample_plan(np.random.default_rng([seed, 3, i]))
        est = run_channel(plan)
        acc = accumulate_sigma(plan)
        dev = float(np.max(np.abs(est.added_cov - 0.5 * acc.sigma_before)))
        worst = max(worst, dev)
    return worst


app = create_app()
