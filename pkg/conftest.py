# conftest.py
# Shared fixtures; the repository root is put on sys.path so tests import ``src``.

import copy
import json
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.properties import FluidProps, SoilProps, WaterConstants  # noqa: E402

SCENARIOS = os.path.join(ROOT, "data", "scenarios")
DEMANDS = os.path.join(ROOT, "data", "demands")


def scenario_path(name):
    return os.path.join(SCENARIOS, f"{name}.json")


def demand_path(name):
    return os.path.join(DEMANDS, f"{name}.csv")


def read_raw(name):
    with open(scenario_path(name), "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def water():
    return WaterConstants()


@pytest.fixture
def fluid():
    return FluidProps(
        density=1040.0,
        specific_heat=3800.0,
        viscosity_table=((-10.0, 0.0105), (0.0, 0.0059), (10.0, 0.0038), (20.0, 0.0027), (30.0, 0.0020)),
    )


@pytest.fixture
def soil():
    return SoilProps(density=1800.0, dry_specific_heat=840.0, conductivity=1.5, water_share=0.2)


@pytest.fixture
def minimal_raw():
    return copy.deepcopy(read_raw("minimal"))


@pytest.fixture
def minimal_scenario(minimal_raw):
    from src.scenario.config import validate_scenario

    return validate_scenario(minimal_raw)


@pytest.fixture
def minimal_demands():
    from src.scenario.demands import load_demands

    return load_demands(demand_path("minimal"))


@pytest.fixture
def storage_params(minimal_scenario, fluid, soil, water):
    from src.storage.icestore import IceStorageParams

    cfg = minimal_scenario.storage.model_dump(exclude={"initial_temperature"})
    return IceStorageParams(soil=soil, fluid=fluid, water=water, **cfg)
