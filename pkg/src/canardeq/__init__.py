"""Modified-equation analysis of Euler discretizations for planar
fast-slow systems with canard points."""

__version__ = "0.1.0"

from .canard import (
    ComplexWindow,
    HopfProbeResult,
    NormalFormReport,
    SpectrumSample,
    TranscriticalCase,
    TranscriticalClassification,
    WayInOutResult,
    classify_transcritical,
    complex_window,
    fold_spectrum,
    hopf_probe,
    normal_form_report,
    psi_fold,
    psi_transcritical,
    trace_zero,
    transcritical_eigenvalue,
)
from .errors import ToolError
from .integrate import (
    ManifoldSpec,
    Scheme,
    Trajectory,
    escape_time,
    euler_iterate,
    fold_first_integral,
    kahan_iterate,
    reference_solve,
)
from .modified import ModifiedSystem, derive_modified, local_defect, order_slope
from .poly import RationalPoly
from .vectorfield import (
    PolyVectorField,
    SystemName,
    SystemParams,
    TimeScale,
    canonical,
)

__all__ = [
    "ComplexWindow",
    "HopfProbeResult",
    "ManifoldSpec",
    "ModifiedSystem",
    "NormalFormReport",
    "PolyVectorField",
    "RationalPoly",
    "Scheme",
    "SpectrumSample",
    "SystemName",
    "SystemParams",
    "TimeScale",
    "ToolError",
    "Trajectory",
    "TranscriticalCase",
    "TranscriticalClassification",
    "WayInOutResult",
    "canonical",
    "classify_transcritical",
    "complex_window",
    "derive_modified",
    "escape_time",
    "euler_iterate",
    "fold_first_integral",
    "fold_spectrum",
    "hopf_probe",
    "kahan_iterate",
    "local_defect",
    "normal_form_report",
    "order_slope",
    "psi_fold",
    "psi_transcritical",
    "reference_solve",
    "trace_zero",
    "transcritical_eigenvalue",
]
