from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from gcm_lab.config import (
    DEFAULT_FD_STEP,
    DEFAULT_N,
    DEFAULT_ORDER,
    DEFAULT_TOL,
    DEFAULT_TRIALS,
    SCHEMA_VERSION,
)

SuiteName = Literal["commute", "independence", "reduced", "patterns", "yangian", "all"]
YangianSuite = Literal["factorize", "stabilizer", "limits", "psi", "pullback", "poisson"]
FamilyVariantName = Literal["g", "f", "thimm"]

ORBIT_SUITES = ("commute", "independence", "reduced")
ALL_SUITES = ("commute", "independence", "reduced", "patterns", "yangian")
YANGIAN_SUITES = ("factorize", "stabilizer", "limits", "psi", "pullback", "poisson")


class RunConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int = DEFAULT_N
    lam: list[float] = Field(default_factory=lambda: [-1.0, -3.0], alias="lambda")
    trials: int = DEFAULT_TRIALS
    tol: float = DEFAULT_TOL
    fd_step: float = DEFAULT_FD_STEP
    order: int = DEFAULT_ORDER
    seed: int = 0
    suites: list[SuiteName] = Field(default_factory=lambda: ["all"])
    out: str | None = None

    def selected_suites(self) -> list[str]:
        if "all" in self.suites:
            return list(ALL_SUITES)
        return [s for s in ALL_SUITES if s in self.suites]

    def report_dump(self) -> dict:
        """Config as recorded in reports; the output directory is not part of the content."""
        return self.model_dump(by_alias=True, exclude={"out"})


class ValidationIssue(BaseModel):
    code: str
    message: str
    target: str | None = None


class ValidateResponse(BaseModel):
    valid: bool
    issues: list[ValidationIssue]


class MatrixLiteral(BaseModel):
    n: int = Field(ge=1)
    entries: list[list[float]] = Field(min_length=1)


class EvaluateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    variant: FamilyVariantName = "g"
    matrix: MatrixLiteral | None = None
    lam: list[float] | None = Field(default=None, alias="lambda")
    seed: int = 0


class EvaluateResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int
    variant: str
    lam: list[float] = Field(alias="lambda")
    point_seed: int | None = None
    values: dict[str, float]


class PatternCountResponse(BaseModel):
    kind: Literal["gl", "sp"]
    top: list[int]
    row_lengths: list[int]
    count: int
    weyl_dim: int
    patterns: list[list[list[int]]] | None = None


class ExplainEntry(BaseModel):
    label: str
    kind: Literal["function", "suite"]
    title: str
    formula: str
    description: str
    citation: str = ""


class PresetSummary(BaseModel):
    name: str
    description: str


class SuiteResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    suite: str
    passed: bool = Field(alias="pass")
    report_file: str | None = None


class RunSummary(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = SCHEMA_VERSION
    config: dict
    suites: list[SuiteResult]
    passed: bool = Field(alias="pass")


class RunResponse(BaseModel):
    summary: RunSummary
    reports: dict[str, dict]
