"""Request and response models for the service endpoints."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Protocol = Literal["cvw", "macronode", "dictionary"]


class _SqueezingConfig(BaseModel):
    """Shared wire configuration: dB or alpha for the dual-rail derivation, plus overrides."""

    protocol: Protocol
    db: float | None = None
    alpha: float | None = None
    g: float | None = None
    epsilon: float | None = None

    @model_validator(mode="after")
    def _check_squeezing(self):
        if self.db is not None and self.alpha is not None:
            raise ValueError("give either db or alpha, not both")
        overrides = self.g is not None or self.epsilon is not None
        if self.protocol != "cvw" and overrides:
            raise ValueError("g/epsilon overrides apply to the cvw protocol only")
        fully_overridden = self.g is not None and self.epsilon is not None
        if fully_overridden:
            if self.db is not None or self.alpha is not None:
                raise ValueError("db/alpha is unused when both g and epsilon are given")
        elif self.db is None and self.alpha is None:
            raise ValueError("derived wire parameters need exactly one of db or alpha")
        return self


class SweepRequest(_SqueezingConfig):
    n: int
    grid: int = Field(default=629, ge=2)


class SweepResponse(BaseModel):
    header: list[str]
    rows: list[list[str]]


class GateNoiseRequest(_SqueezingConfig):
    gate: str | list[float]
    n: int | None = None
    seed: int = 0


class GateNoiseResponse(BaseModel):
    gate: list[list[float]]
    protocol: Protocol
    n: int
    sv_min: float
    plan_angles: list[list[float]]
    free_theta: float
    bound_checks: dict


class VerifyRequest(BaseModel):
    samples: int = Field(ge=1)
    seed: int = 0
    db: float | None = None
    alpha: float | None = None
    oracle_samples: int = Field(default=200, ge=1)
    corrupt_kernel: bool = False

    @model_validator(mode="after")
    def _check(self):
        if (self.db is None) == (self.alpha is None):
            raise ValueError("give exactly one of db or alpha")
        return self


class VerifyResponse(BaseModel):
    samples: int
    violations: dict
    passed: bool


class OracleCheckRequest(BaseModel):
    samples: int = Field(ge=1)
    seed: int = 0
    mc_samples: int = Field(default=0, ge=0)


class OracleCheckResponse(BaseModel):
    samples: int
    max_abs_dev: float
    mc_samples: int
    mc_max_sigma_dev: float | None
    passed: bool


class RemodelRequest(BaseModel):
    g: float
    epsilon: float
    mode: Literal["alternating-selfloop", "uniform-rescaled"]


class RemodelResponse(BaseModel):
    mode: str
    epsilon_odd: float
    epsilon_even: float
    input_rescale: float
    shear_rescale: float
