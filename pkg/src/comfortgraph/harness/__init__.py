"""Synthetic scenes, simulated occupants and the feature-set comparison."""

from .baselines import BASELINES, BUILD2VEC, run_baselines
from .coherence import aoi_similarity_gap, choose_anchors, hop_similarity_spearman
from .config import SceneConfig, SpaceSpec, default_config, homogeneous_config, load_config, scene_config_from
from .evaluate import evaluate, format_report
from .pipeline import Artifacts, PipelineParams, run_pipeline
from .population import ARCHETYPES
from .scene import ComfortField, generate_scene
from .simulate import SimOutput, simulate_occupants

__all__ = [
    "BASELINES", "BUILD2VEC", "run_baselines", "aoi_similarity_gap", "choose_anchors", "hop_similarity_spearman",
    "SceneConfig", "SpaceSpec", "default_config", "homogeneous_config", "load_config", "scene_config_from",
    "evaluate", "format_report", "Artifacts", "PipelineParams", "run_pipeline", "ARCHETYPES", "ComfortField",
    "generate_scene", "SimOutput", "simulate_occupants",
]
