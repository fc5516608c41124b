"""Constants and default thresholds for the calibration pipeline."""

import math


MASTER_FRAME_ID = "top"

# Geometry tolerances
ORTHONORMAL_TOLERANCE = 1e-6
UNIT_AXIS_TOLERANCE = 1e-9
GIMBAL_LOCK_MARGIN = 1e-6

# Ground plane extraction
GROUND_EPSILON_M = 0.05
RANSAC_ITERATIONS = 500
MIN_GROUND_CLOUD_POINTS = 50
MIN_GROUND_INLIER_FRACTION = 0.10
FLIP_SUPPORT_RATIO = 0.5

# Planar search
MIN_NON_GROUND_POINTS = 100
MIN_PLANAR_CORRESPONDENCES = 10
LOW_CONFIDENCE_RATIO = 0.8

# Normal estimation
NORMAL_NEIGHBORS = 40

# ICPN
MIN_ICPN_CORRESPONDENCES = 10
ICPN_STEP_HALVINGS = 3

# Octree
ROOT_CUBE_MARGIN = 0.05

# Scene simulation
SPARSE_CAPTURE_POINTS = 200

# Pipeline
ALIGNMENT_COST_GATE_M = 1.0
OVERLAP_DISTANCE_M = 0.15
MIN_OVERLAP_FRACTION = 0.3
SUCCESS_ROTATION_DEG = 0.5
SUCCESS_TRANSLATION_M = 0.05

EULER_AXES = ("pitch", "roll", "yaw", "x", "y", "z")
ROTATION_AXES = ("pitch", "roll", "yaw")

FULL_CIRCLE = 2 * math.pi
