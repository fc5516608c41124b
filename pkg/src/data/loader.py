"""Loading and saving of the JSON scene, rig, perturbation and pipeline files.

Angles are degrees in every file and radians in memory.
"""

import json
import math
from pathlib import Path
from typing import Any

from src.constants import EULER_AXES, MASTER_FRAME_ID
from src.errors import ConfigError, InvalidArgumentError
from src.geometry import EulerPose, RigidTransform, euler_to_transform, transform_to_euler
from src.pipeline import PipelineConfig
from src.planar import PlanarSearchConfig
from src.refinement import IcpnConfig, OctreeScanConfig
from src.simulation import PerturbationSpec, Primitive, RigSpec, SceneSpec, SensorSpec, Shape


SPECS_DIR = Path(__file__).parent.parent.parent / "specs"

_DEGREE_FIELDS: dict[type, frozenset[str]] = {
    PlanarSearchConfig: frozenset({"yaw_range", "coarse_step"}),
    IcpnConfig: frozenset({"convergence_rotation"}),
    OctreeScanConfig: frozenset({"angle_step_init"}),
    PerturbationSpec: frozenset({"rotation_bound"}),
}


def _read_json(path: Path) -> dict[str, Any]:
    with path.open(encoding="utf-8") as f:
        try:
            content = json.load(f)
        except json.JSONDecodeError as error:
            raise ConfigError(f"{path}:{error.lineno}: {error.msg}") from error
    if not isinstance(content, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return content


def _write_json(content: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(content, f, indent=2)
        f.write("\n")


def _named_tuple(cls: type[Any], values: dict[str, Any], where: str) -> Any:
    """Build ``cls`` from a flat mapping, converting degree fields to radians."""
    unknown = set(values) - set(cls._fields)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    degrees = _DEGREE_FIELDS.get(cls, frozenset())
    converted = {}
    for key, value in values.items():
        default = cls._field_defaults.get(key)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{where}: '{key}' must be true or false")
        elif isinstance(default, int | float):
            if isinstance(value, bool) or not isinstance(value, int | float):
                raise ConfigError(f"{where}: '{key}' must be a number")
            if isinstance(default, int) and not isinstance(value, int):
                raise ConfigError(f"{where}: '{key}' must be an integer")
        converted[key] = math.radians(value) if key in degrees else value
    return cls(**converted)


def pose_from_json(values: Any, where: str) -> RigidTransform:
    if not isinstance(values, dict) or set(values) - set(EULER_AXES):
        raise ConfigError(f"{where}: pose must be an object with keys {', '.join(EULER_AXES)}")
    try:
        return euler_to_transform(EulerPose.from_degrees(**{k: float(v) for k, v in values.items()}))
    except (TypeError, ValueError, InvalidArgumentError) as error:
        raise ConfigError(f"{where}: {error}") from error


def pose_to_json(pose: RigidTransform) -> dict[str, float]:
    return dict(zip(EULER_AXES, (round(v, 12) for v in transform_to_euler(pose).to_degrees()), strict=True))


def _primitive(values: Any, where: str) -> Primitive:
    if not isinstance(values, dict):
        raise ConfigError(f"{where}: primitive must be an object")
    unknown = set(values) - {"shape", "center", "yaw", "size", "density"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        center = tuple(float(v) for v in values["center"])
        if len(center) != 2:
            raise ConfigError(f"{where}: center needs two values")
        return Primitive(
            shape=Shape(values["shape"]),
            center=(center[0], center[1]),
            yaw=math.radians(float(values.get("yaw", 0.0))),
            size=tuple(float(v) for v in values["size"]),
            density=None if values.get("density") is None else float(values["density"]),
        )
    except KeyError as error:
        raise ConfigError(f"{where}: missing {error}") from error
    except (TypeError, ValueError) as error:
        raise ConfigError(f"{where}: {error}") from error


def load_scene_spec(path: Path | None = None) -> SceneSpec:
    if path is None:
        path = SPECS_DIR / "standard_scene.json"
    content = _read_json(path)
    ground = content.pop("ground", {})
    primitives = content.pop("primitives", [])
    if not isinstance(ground, dict) or not isinstance(primitives, list):
        raise ConfigError(f"{path}: 'ground' must be an object and 'primitives' a list")
    if "extent" in ground:
        content["ground_extent"] = tuple(float(v) for v in ground.pop("extent"))
    if "density" in ground:
        content["ground_density"] = ground.pop("density")
    if ground:
        raise ConfigError(f"{path}: unknown ground keys {sorted(ground)}")
    spec = _named_tuple(SceneSpec, content, str(path))
    return spec._replace(
        primitives=tuple(
            _primitive(values, f"{path}: primitive {i}") for i, values in enumerate(primitives)
        )
    )


def load_rig_spec(path: Path | None = None) -> RigSpec:
    if path is None:
        path = SPECS_DIR / "default_rig.json"
    content = _read_json(path)
    sensors = content.pop("sensors", None)
    if not isinstance(sensors, list) or not sensors:
        raise ConfigError(f"{path}: 'sensors' must be a non-empty list")
    unknown = set(content) - {"master", "max_range", "fov", "noise_sigma", "seed"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")

    parsed = []
    for i, sensor in enumerate(sensors):
        if not isinstance(sensor, dict) or "frame_id" not in sensor:
            raise ConfigError(f"{path}: sensor {i} needs a frame_id")
        parsed.append(
            SensorSpec(str(sensor["frame_id"]), pose_from_json(sensor.get("pose", {}), f"{path}: sensor {i}"))
        )
    max_range = content.get("max_range")
    try:
        return RigSpec(
            sensors=tuple(parsed),
            max_range=math.inf if max_range is None else float(max_range),
            fov=float(content.get("fov", 360.0)),
            noise_sigma=float(content.get("noise_sigma", 0.0)),
            seed=int(content.get("seed", 0)),
            master_id=str(content.get("master", MASTER_FRAME_ID)),
        )
    except InvalidArgumentError as error:
        raise ConfigError(f"{path}: {error}") from error


def rig_to_json(rig: RigSpec) -> dict[str, Any]:
    return {
        "master": rig.master_id,
        "max_range": None if math.isinf(rig.max_range) else rig.max_range,
        "fov": rig.fov,
        "noise_sigma": rig.noise_sigma,
        "seed": rig.seed,
        "sensors": [
            {"frame_id": sensor.frame_id, "pose": pose_to_json(sensor.pose)}
            for sensor in rig.sensors
        ],
    }


def save_rig_spec(rig: RigSpec, path: Path) -> None:
    _write_json(rig_to_json(rig), path)


def load_perturbation_spec(path: Path | None = None) -> PerturbationSpec:
    if path is None:
        path = SPECS_DIR / "perturbation.json"
    return _named_tuple(PerturbationSpec, _read_json(path), str(path))


def load_pipeline_config(path: Path | None = None) -> PipelineConfig:
    if path is None:
        path = SPECS_DIR / "pipeline.json"
    content = _read_json(path)
    stages = {
        "planar": PlanarSearchConfig,
        "icpn": IcpnConfig,
        "octree": OctreeScanConfig,
    }
    nested = {}
    for key, cls in stages.items():
        values = content.pop(key, {})
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: '{key}' must be an object")
        nested[key] = _named_tuple(cls, values, f"{path}: {key}")
    return _named_tuple(PipelineConfig, content, str(path))._replace(**nested)
