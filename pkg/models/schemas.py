"""
Pydantic schemas for manifests, run configuration and reports.

Everything the lab reads from or writes to JSON goes through one of these
models so that field-level validation errors name the offending entry.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

# =============================================================================
# Closed vocabularies
# =============================================================================

Verdict = Literal["ContradictionFound", "HypothesesNotMet", "Inconclusive"]
RegimeTag = Literal["VelocityBlowup", "Supercritical", "Critical", "Subcritical"]
DomainTag = Literal["FullPlane", "HalfPlane", "Inconclusive"]
Termination = Literal["ReachedBoundary", "LeftWindow", "HitSingularCurve", "ParameterLimit"]
Variant = Literal["LHsc", "LHsc2", "centered-boundary"]
Orientation = Literal["upper_minus", "upper_plus", "left"]
CenterKind = Literal["boundary", "interior"]
Parity = Literal["odd", "even"]
SignCondition = Literal["positive", "negative", "nonnegative", "nonpositive"]
SystemKind = Literal["axisym", "euler2d", "boussinesq"]
Subcommand = Literal["simulate", "rescale", "validate", "certify", "datacheck", "report"]


# =============================================================================
# Common schemas
# =============================================================================


class ErrorResult(BaseModel):
    """Error written in place of a report when a run fails on its inputs."""

    error: str = Field(description="Error message")
    field: str | None = Field(default=None, description="Offending manifest field or flag")
    exit_code: int = Field(default=3, description="Process exit code")


# =============================================================================
# Certificate schemas
# =============================================================================


class HypothesisCheck(BaseModel):
    """One item of a certifier's hypothesis checklist."""

    name: str = Field(description="Short hypothesis identifier, e.g. 'signs_V'")
    passed: bool = Field(description="Whether the numerical check passed")
    detail: str = Field(default="", description="Human-readable summary of the check")
    witness: dict[str, Any] | None = Field(
        default=None, description="Node, flow line or p-value evidencing a failure"
    )


class CertificateReport(BaseModel):
    """Outcome of one contradiction certifier."""

    proposition: str = Field(description="Proposition id the certifier realizes")
    certifier: str = Field(description="Certifier function name")
    verdict: Verdict = Field(description="ContradictionFound / HypothesesNotMet / Inconclusive")
    hypotheses: list[HypothesisCheck] = Field(default_factory=list, description="Hypothesis checklist")
    traces: dict[str, Any] = Field(
        default_factory=dict, description="Integral values, p-root sequences, flow-line samples"
    )
    tolerances: dict[str, float] = Field(default_factory=dict, description="Tolerances the verdict depends on")
    findings: list[dict[str, Any]] = Field(default_factory=list, description="Node-indexed findings")
    notes: list[str] = Field(default_factory=list, description="Skipped checks and caveats")

    @model_validator(mode="after")
    def _verdict_consistent(self) -> CertificateReport:
        if self.verdict == "ContradictionFound" and not all(h.passed for h in self.hypotheses):
            failed = [h.name for h in self.hypotheses if not h.passed]
            raise ValueError(f"ContradictionFound with failed hypotheses {failed}")
        for h in self.hypotheses:
            if not h.passed and not h.witness:
                raise ValueError(f"failed hypothesis {h.name!r} carries no witness")
        return self

    @property
    def failed(self) -> list[HypothesisCheck]:
        return [h for h in self.hypotheses if not h.passed]


class RouteDecision(BaseModel):
    """Routing of an ansatz to the proposition and certifiers that apply."""

    proposition: str = Field(description="Proposition id, or 'none'")
    regime: RegimeTag | None = Field(default=None, description="Exponent regime")
    discriminant: float | None = Field(default=None, description="−2β/α + 1/α − 1")
    certifiers: list[str] = Field(default_factory=list, description="Certifier names to run, in order")
    rationale: str = Field(description="Why this route was chosen")


# =============================================================================
# Ansatz manifest schemas
# =============================================================================


class SectorConfig(BaseModel):
    l1: float = Field(default=0.0, ge=0.0, description="Inner radius")
    l2: float = Field(gt=0.0, description="Truncation radius")
    theta1: float = Field(gt=0.0, lt=1.5707963267948966, description="Lower ray angle")
    theta2: float = Field(gt=0.0, lt=1.5707963267948966, description="Upper ray angle")
    p: list[int] | None = Field(default=None, description="p ladder; defaults to config")

    @model_validator(mode="after")
    def _ordered(self) -> SectorConfig:
        if self.theta2 <= self.theta1:
            raise ValueError("theta1 must be smaller than theta2")
        if self.l2 <= self.l1:
            raise ValueError("l1 must be smaller than l2")
        return self


class RectangleConfig(BaseModel):
    a1: float = Field(ge=0.0, description="Left side z¹")
    b1: float = Field(description="Right side z¹")
    a2: float = Field(ge=0.0, description="Lower side z²")
    b2: float = Field(description="Upper side z²")


class StripConfig(BaseModel):
    l0: float = Field(gt=0.0, description="Strip height at t = 0")
    seeds: int | None = Field(default=None, ge=1, description="Number of flow-line seeds")


class AnsatzManifest(BaseModel):
    """JSON description of a self-similar ansatz with gridded profiles."""

    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(lt=1.0, description="Blow-up exponent α (≠ 0, < 1)")
    beta: float = Field(default=0.0, ge=0.0, description="Swirl shift exponent β")
    T0: float = Field(default=1.0, description="Blow-up time")
    variant: Variant | None = Field(default=None, description="Scaled-family variant")
    center: CenterKind = Field(default="boundary", description="Blow-up center kind")
    orientation: Orientation = Field(default="upper_minus", description="Boussinesq forcing variant")
    profiles: dict[str, str] = Field(description="Profile name → CSV path (relative to manifest)")
    parities: dict[str, dict[str, Parity]] = Field(
        default_factory=dict, description="Profile → {'z1'|'z2': 'odd'|'even'}"
    )
    decay_exponents: dict[str, float] = Field(default_factory=dict, description="Declared decay exponents")
    signs: dict[str, SignCondition] = Field(default_factory=dict, description="Declared sign conditions")
    ingested: bool = Field(default=False, description="Profiles come from external data")
    base_only: bool = Field(default=False, description="Profiles are only meaningful on the base row")
    sector: SectorConfig | None = None
    rectangle: RectangleConfig | None = None
    strip: StripConfig | None = None

    @model_validator(mode="after")
    def _alpha_nonzero(self) -> AnsatzManifest:
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        return self


# =============================================================================
# Sequence and trajectory schemas
# =============================================================================


class CenterEntry(BaseModel):
    x: list[float] = Field(description="Center coordinates (r, x³)")
    t: float = Field(description="Center time")
    Q: float = Field(gt=0.0, description="Magnitude Q_k")
    index: int | None = Field(default=None, description="Snapshot index of the center")


class SequenceManifest(BaseModel):
    alpha: float = Field(description="Scaling exponent")
    c: float = Field(ge=1.0, description="Comparability constant")
    centers: list[CenterEntry] = Field(default_factory=list)
    domain_class: DomainTag | None = None
    domain_offset: float | None = None
    failures: list[dict[str, Any]] = Field(default_factory=list, description="Indices with no qualifying point")


class TrajectoryManifest(BaseModel):
    times: list[float]
    grid: dict[str, float]
    fields: dict[str, list[str]]


# =============================================================================
# Validation and data-check schemas
# =============================================================================


class ProfileFinding(BaseModel):
    profile: str
    kind: Literal["parity", "decay", "sign", "vorticity", "negative", "rectangle", "notice"]
    passed: bool
    value: float | None = None
    node: list[int] | None = Field(default=None, description="Mesh index (i, j)")
    detail: str = ""


class ValidationReport(BaseModel):
    regime: RegimeTag | None = None
    discriminant: float | None = None
    findings: list[ProfileFinding] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class DataCheckReport(BaseModel):
    accuracy: float
    nodes_checked: int
    flagged: list[dict[str, Any]] = Field(default_factory=list)
    max_mismatch: float
    negative_w: list[dict[str, Any]] = Field(default_factory=list)
    rectangles: list[dict[str, Any]] = Field(default_factory=list)


class ConservationReport(BaseModel):
    system: SystemKind
    steps: int
    dt: float
    times: list[float]
    gamma_sup_drift: float | None = None
    gamma_lp_drift: dict[str, float] = Field(default_factory=dict)
    swirl_violation: float | None = None
    max_divergence: float | None = None
    omega_range: list[list[float]] = Field(default_factory=list)


# =============================================================================
# Run configuration
# =============================================================================


class RunConfig(BaseModel):
    """Frozen effective configuration of one CLI invocation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: Subcommand
    inputs: dict[str, str] = Field(default_factory=dict, description="Resolved input paths")
    output_dir: str = Field(description="Resolved output directory")
    parameters: dict[str, Any] = Field(default_factory=dict, description="Numeric parameters")
    threads: int = Field(default=1, ge=1, le=256)
