"""Phased sandbox orchestration: plans, backends, bundles, reports."""

from .adapters import BUILTIN_ADAPTERS, Adapter, PhasePlan, plan_phases
from .backends import PhaseRunResult, replay_phase, run_phase, substitute_template
from .bundle import (
    BUNDLE_SCHEMA_VERSION,
    BundleError,
    BundlePhase,
    ReplayBundle,
    load_bundle,
    pack_bundle,
    write_bundle,
)
from .executables import diff_new_executables, snapshot_executables
from .pipeline import PipelineError, analyze
from .report import (
    REPORT_SCHEMA_VERSION,
    BehaviorReport,
    ReportFormatError,
    Verdict,
    load_report,
    report_from_dict,
    report_to_dict,
    report_to_json,
    utc_now_iso,
)
from .spec import (
    DEFAULT_PHASE_TIMEOUT_S,
    DEFAULT_TRACE_FLAGS,
    TIMEOUT_GRACE_MS,
    BackendSpec,
    CommandTemplateBackend,
    ConfigurationError,
    PackageSpec,
    ReplayBackend,
    RunConfig,
    TracedSubprocessBackend,
)

__all__ = [
    "BUILTIN_ADAPTERS",
    "BUNDLE_SCHEMA_VERSION",
    "DEFAULT_PHASE_TIMEOUT_S",
    "DEFAULT_TRACE_FLAGS",
    "REPORT_SCHEMA_VERSION",
    "TIMEOUT_GRACE_MS",
    "Adapter",
    "BackendSpec",
    "BehaviorReport",
    "BundleError",
    "BundlePhase",
    "CommandTemplateBackend",
    "ConfigurationError",
    "PackageSpec",
    "PhasePlan",
    "PhaseRunResult",
    "PipelineError",
    "ReplayBackend",
    "ReplayBundle",
    "ReportFormatError",
    "RunConfig",
    "TracedSubprocessBackend",
    "Verdict",
    "analyze",
    "diff_new_executables",
    "load_bundle",
    "load_report",
    "pack_bundle",
    "plan_phases",
    "replay_phase",
    "report_from_dict",
    "report_to_dict",
    "report_to_json",
    "run_phase",
    "snapshot_executables",
    "substitute_template",
    "utc_now_iso",
    "write_bundle",
]
