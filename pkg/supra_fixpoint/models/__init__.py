# Data models and schemas: frozen point dataclasses and pydantic reports.

from supra_fixpoint.models.points import DPoint, DTag, GridFn, Point, Scalar, Vector, point_to_json
from supra_fixpoint.models.space import (
    AxiomReport,
    ConstructionDescriptor,
    ConstructionKind,
    ConstructionParams,
    SpaceClass,
    SpaceParams,
    SpaceVariant,
    Violation,
)
from supra_fixpoint.models.matkowski import MembershipReport, Verdict
from supra_fixpoint.models.fixpoint import (
    CauchyCertificate,
    ContractionReport,
    FixedPointResult,
    InvariantBallReport,
    IterationTrace,
    LawReport,
    UniquenessReport,
)
from supra_fixpoint.models.discrete import LemmaCheck, LemmaSweepReport, PathologyReport
from supra_fixpoint.models.run_config import Command, RunConfig, SpaceSpec
