"""Shared fixtures: the standard synthetic scene, its captures and the prepared master."""

import pytest

from src.data import load_pipeline_config, load_rig_spec, load_scene_spec
from src.pipeline import MasterModel, PipelineConfig, prepare_master
from src.simulation import CaptureSet, RigSpec, Scene, SceneSpec, capture, generate_scene


@pytest.fixture(scope="session")
def scene_spec() -> SceneSpec:
    return load_scene_spec()


@pytest.fixture(scope="session")
def rig() -> RigSpec:
    return load_rig_spec()


@pytest.fixture(scope="session")
def pipeline_config() -> PipelineConfig:
    return load_pipeline_config()


@pytest.fixture(scope="session")
def scene(scene_spec: SceneSpec) -> Scene:
    return generate_scene(scene_spec)


@pytest.fixture(scope="session")
def captures(scene: Scene, rig: RigSpec) -> CaptureSet:
    return capture(scene, rig)


@pytest.fixture(scope="session")
def noiseless_captures(scene_spec: SceneSpec, rig: RigSpec) -> CaptureSet:
    return capture(generate_scene(scene_spec._replace(noise_sigma=0.0)), rig)


@pytest.fixture(scope="session")
def master_model(
    noiseless_captures: CaptureSet, pipeline_config: PipelineConfig
) -> MasterModel:
    return prepare_master(noiseless_captures.cloud("top"), pipeline_config)
