"""Configuration, stage trace and outcome types for the calibration pipeline."""

from enum import StrEnum
from typing import NamedTuple

from src.constants import (
    ALIGNMENT_COST_GATE_M,
    GROUND_EPSILON_M,
    MASTER_FRAME_ID,
    MIN_OVERLAP_FRACTION,
    OVERLAP_DISTANCE_M,
    RANSAC_ITERATIONS,
)
from src.errors import CalibrationStage, FailureReason
from src.geometry import EulerPose, PointCloud, RigidTransform
from src.ground import Plane
from src.planar import PlanarSearchConfig
from src.refinement import IcpnConfig, OctreeScanConfig
from src.spatial import NeighborIndex, OrientedCloud


class TraceStage(StrEnum):
    INITIAL = "initial"
    GROUND = "ground"
    ROUGH = "rough"
    ICPN = "icpn"
    OCTREE = "octree"


class PipelineConfig(NamedTuple):
    master_id: str = MASTER_FRAME_ID
    ground_epsilon: float = GROUND_EPSILON_M
    ransac_iterations: int = RANSAC_ITERATIONS
    planar: PlanarSearchConfig = PlanarSearchConfig()
    icpn: IcpnConfig = IcpnConfig()
    octree: OctreeScanConfig = OctreeScanConfig()
    seed: int = 0
    run_icpn: bool = True
    run_octree: bool = True
    reject_low_confidence: bool = True
    alignment_cost_gate: float = ALIGNMENT_COST_GATE_M
    overlap_distance: float = OVERLAP_DISTANCE_M
    min_overlap_fraction: float = MIN_OVERLAP_FRACTION


class MasterModel(NamedTuple):
    """Everything derived from the master cloud alone, shared by every slave.

    ``non_ground`` is None when the master has too little structure off the
    ground; calibrations then fail at planar search.
    """

    cloud: PointCloud
    index: NeighborIndex
    plane: Plane
    oriented: OrientedCloud
    non_ground: PointCloud | None
    degenerate_reason: str = ""


class StageRecord(NamedTuple):
    """Slave → master pose after one stage and the NN alignment cost there."""

    stage: TraceStage
    pose: RigidTransform
    cost: float
    accepted: bool = True
    elapsed_ms: float = 0.0


class PairCalibration(NamedTuple):
    transform: RigidTransform
    trace: tuple[StageRecord, ...]


class TrialOutcome(NamedTuple):
    """Result of calibrating one slave in one trial.

    ``failure_reason`` is NONE exactly when ``success`` is set. ``errors`` is
    present only when ground truth is known.
    """

    trial: int
    slave_id: str
    success: bool
    failure_reason: FailureReason = FailureReason.NONE
    failed_stage: CalibrationStage | None = None
    message: str = ""
    estimate: EulerPose | None = None
    deviation: EulerPose | None = None
    errors: EulerPose | None = None
    trace: tuple[StageRecord, ...] = ()


class CalibrationReport(NamedTuple):
    outcomes: tuple[TrialOutcome, ...]
    master_id: str = MASTER_FRAME_ID
    seed: int = 0
    trials: int = 1

    @property
    def slave_ids(self) -> list[str]:
        return list(dict.fromkeys(outcome.slave_id for outcome in self.outcomes))

    @property
    def success_rate(self) -> float:
        if not self.outcomes:
            return 0.0
        return sum(outcome.success for outcome in self.outcomes) / len(self.outcomes)
