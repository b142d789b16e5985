"""
Shared fixtures for the WaveSplit tests: small grids and the command line
module loaded from bin/.
"""

import importlib.util
import os

import numpy
import pytest

from wavesplitlib.wavesplitgrid import annulus_bump, make_grid
from wavesplitlib.wavesplittransform import clear_plan_cache

BIN_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "bin")


@pytest.fixture(autouse=True)
def _fresh_plans():
    yield
    clear_plan_cache()


@pytest.fixture
def grid3():
    return make_grid(3, r_max=8.0, M=512)


@pytest.fixture(params=[3, 4, 5])
def grid_d(request):
    return make_grid(request.param, r_max=8.0, M=512)


@pytest.fixture
def bump3(grid3):
    # Support in [1.5, 3.5], well resolved with rho_max = 32.
    return annulus_bump(grid3, 1.5, 3.5, sharpness=1.0)


@pytest.fixture
def complex_bump3(grid3):
    bump = annulus_bump(grid3, 1.5, 3.5, sharpness=1.0)
    return bump * numpy.exp(2j * numpy.pi * 0.5 * grid3.points)


@pytest.fixture(scope="session")
def cli():
    spec = importlib.util.spec_from_file_location("wavesplit_cli", os.path.join(BIN_DIR, "wavesplit.py"))
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module
