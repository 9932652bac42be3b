"""so3-consensus - rotation averaging by Kuramoto consensus flow on SO(3)."""

from .averager import RotationAverager
from .exceptions import (
    DatasetParseError,
    DegenerateProjectionError,
    InvalidRotationError,
    InvalidWeightsError,
    NoConvergenceError,
    NonUnitQuaternionError,
    RotationAverageError,
    SizeMismatchError,
)
from .flow import (
    flow_rhs,
    order_parameter,
    potential,
    rk4_step,
    run_flow,
)
from .means import euclidean_mean, geodesic_mean, projected_mean
from .models import (
    FlowConfig,
    FlowResult,
    FlowState,
    FlowStatus,
    KarcherConfig,
    TraceRecord,
    VmfParams,
    WeightedDataset,
)
from .report import Report, build_report, render_report
from .sampling import sample_dataset, sample_rotations, sample_vmf_s3, sample_weights
from .so3 import (
    dist_chordal,
    dist_geodesic,
    exp_so3,
    log_so3,
    project_to_so3,
    quat_to_rotation,
    rotation_to_quat,
    sphere_points,
)
from .storage import read_dataset, write_dataset

__version__ = "0.1.0"

__all__ = [
    "DatasetParseError",
    "DegenerateProjectionError",
    "FlowConfig",
    "FlowResult",
    "FlowState",
    "FlowStatus",
    "InvalidRotationError",
    "InvalidWeightsError",
    "KarcherConfig",
    "NoConvergenceError",
    "NonUnitQuaternionError",
    "Report",
    "RotationAverageError",
    "RotationAverager",
    "SizeMismatchError",
    "TraceRecord",
    "VmfParams",
    "WeightedDataset",
    "build_report",
    "dist_chordal",
    "dist_geodesic",
    "euclidean_mean",
    "exp_so3",
    "flow_rhs",
    "geodesic_mean",
    "log_so3",
    "order_parameter",
    "potential",
    "project_to_so3",
    "projected_mean",
    "quat_to_rotation",
    "read_dataset",
    "render_report",
    "rk4_step",
    "rotation_to_quat",
    "run_flow",
    "sample_dataset",
    "sample_rotations",
    "sample_vmf_s3",
    "sample_weights",
    "sphere_points",
    "write_dataset",
]
