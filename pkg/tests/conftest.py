import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from egograph.graphs import GeneratorParams, assign_labels, generate_ba
from egograph.layout import LayoutParams
from egograph.navigation import overview_pose
from egograph.protocol import SceneCalibration, SceneFile, build_scene


def fast_scene(n=165, m=2, seed=3, fly_speed=10.0) -> SceneFile:
    """Scene with random positions instead of a relaxed layout; cheap to build."""
    params = GeneratorParams(n=n, m=m, seed=seed)
    g = assign_labels(generate_ba(params), seed=seed)
    positions = np.random.default_rng(seed).normal(scale=80.0, size=(g.n, 3))
    return SceneFile(
        graph=g,
        params=params,
        positions=positions,
        layout_params=LayoutParams(seed=seed),
        calibration=SceneCalibration(max_fly_speed=fly_speed, bubble_radius=4.0),
        overview=overview_pose(positions),
    )


@pytest.fixture(scope="session")
def quick_scene() -> SceneFile:
    return fast_scene()


@pytest.fixture(scope="session")
def reference_scene() -> SceneFile:
    """The calibrated large study scene; built once, shared by timing tests."""
    params = GeneratorParams(n=415, m=2, seed=0)
    g = assign_labels(generate_ba(params), seed=0)
    return build_scene(g, params)
