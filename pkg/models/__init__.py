"""
Blow-up lab - Pydantic Models Package

Schemas for manifests, run configuration and reports.
"""

from models.schemas import (
    # Ansatz manifest schemas
    AnsatzManifest,
    # Sequence schemas
    CenterEntry,
    # Certificate schemas
    CertificateReport,
    # Simulation schemas
    ConservationReport,
    # Data-check schemas
    DataCheckReport,
    # Common schemas
    ErrorResult,
    HypothesisCheck,
    ProfileFinding,
    RectangleConfig,
    RouteDecision,
    # Run configuration
    RunConfig,
    SectorConfig,
    SequenceManifest,
    StripConfig,
    TrajectoryManifest,
    ValidationReport,
    Verdict,
)

__all__ = [
    # Common
    "ErrorResult",
    # Certificates
    "HypothesisCheck",
    "CertificateReport",
    "RouteDecision",
    "Verdict",
    # Ansatz
    "AnsatzManifest",
    "SectorConfig",
    "RectangleConfig",
    "StripConfig",
    # Sequences and trajectories
    "CenterEntry",
    "SequenceManifest",
    "TrajectoryManifest",
    # Reports
    "ValidationReport",
    "ProfileFinding",
    "DataCheckReport",
    "ConservationReport",
    # Run configuration
    "RunConfig",
]
