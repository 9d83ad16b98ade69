#!/usr/bin/env python3
"""
Test configuration loading: defaults, validation, environment and CLI overrides, sweep expansion
"""

import json
import sys
import tempfile
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from scripts.config import ConfigError, ExperimentSpec, ScenarioConfig, build_spec, env_overrides, parse_config

CONFIG_DIR = Path(__file__).parent / "config"


def test_defaults():
    config = ScenarioConfig()
    assert config.cells_per_side == 60
    assert config.effective_decision_interval_s == 5.0
    assert config.effective_neighbor_max_age_s == 4.0
    assert ScenarioConfig(hello_period_s=1.0).effective_neighbor_max_age_s == 2.0
    assert ScenarioConfig(neighbor_max_age_s=7.0).effective_neighbor_max_age_s == 7.0
    assert config.ticks(config.hello_period_s) == 20
    assert ScenarioConfig(speed_mps=40.0).effective_decision_interval_s == 10.0
    assert ScenarioConfig(decision_interval_s=7.0).effective_decision_interval_s == 7.0
    print("✅ defaults match the reference scenario")


def test_validation_names_the_field():
    with pytest.raises(ConfigError, match="evaporation_rate"):
        build_spec({'evaporation_rate': 2})
    with pytest.raises(ConfigError, match="bogus_key"):
        build_spec({'bogus_key': 1})
    with pytest.raises(ConfigError, match="cell_size_m"):
        build_spec({'map_size_m': 1050, 'cell_size_m': 100})
    with pytest.raises(ConfigError, match="hello_period_s"):
        build_spec({'hello_period_s': 0.25})
    with pytest.raises(ConfigError, match="policy"):
        build_spec({'policy': "random"})
    with pytest.raises(ConfigError, match="runs_per_point"):
        build_spec({'runs_per_point': 0})
    print("✅ invalid values are rejected with the offending key")


def test_env_overrides():
    environ = {
        'SWARMCAP_N_UAVS': '7',
        'SWARMCAP_POLICIES': '["cap", "pheromone"]',
        'SWARMCAP_OUTPUT_DIR': 'out/here',
        'SWARMCAP_NOT_A_KEY': '1',
        'HOME': '/root',
    }
    overrides = env_overrides(environ)
    assert overrides == {'n_uavs': 7, 'policies': ["cap", "pheromone"], 'output_dir': 'out/here'}
    print("✅ SWARMCAP_ variables are parsed as JSON")


def test_precedence():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "experiment.json"
        path.write_text(json.dumps({'n_uavs': 5, 'speed_mps': 10, 'runs_per_point': 3}))

        spec = parse_config(path, environ={})
        assert spec.base.n_uavs == 5 and spec.runs_per_point == 3

        spec = parse_config(path, environ={'SWARMCAP_N_UAVS': '7'})
        assert spec.base.n_uavs == 7
        assert spec.base.speed_mps == 10.0

        spec = parse_config(path, overrides={'n_uavs': 9, 'seed_base': None}, environ={'SWARMCAP_N_UAVS': '7'})
        assert spec.base.n_uavs == 9
        assert spec.seed_base == 0

    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/experiment.json", environ={})
    print("✅ file < environment < command line")


def test_malformed_file():
    with tempfile.TemporaryDirectory() as tmp:
        broken = Path(tmp) / "broken.json"
        broken.write_text("{ not json")
        with pytest.raises(ConfigError, match="Invalid JSON"):
            parse_config(broken, environ={})
        listing = Path(tmp) / "list.json"
        listing.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            parse_config(listing, environ={})
    print("✅ unreadable config files raise ConfigError")


def test_points_expansion():
    spec = ExperimentSpec()
    points = spec.points()
    assert len(points) == 1
    assert points[0] == spec.base

    spec = build_spec({'policies': ["cap", "pheromone", "cap"], 'betas': [1, 2], 'uav_counts': [10, 20]})
    points = spec.points()
    assert len(points) == 6
    assert [(p.policy, p.beta, p.n_uavs) for p in points[:4]] == [
        ("cap", 1.0, 10), ("cap", 1.0, 20), ("cap", 2.0, 10), ("cap", 2.0, 20)]
    assert {p.policy for p in points[4:]} == {"pheromone"}

    with pytest.raises(ConfigError, match="speed_mps"):
        build_spec({'speeds': [20, -5]}).points()
    print("✅ sweep axes expand in policy, param, size, speed order")


def test_seeds():
    spec = build_spec({'runs_per_point': 3, 'seed_base': 10})
    assert spec.seeds == [10, 11, 12]
    assert build_spec({'jobs': 2}).effective_jobs == 2
    assert build_spec({}).effective_jobs >= 1
    print("✅ seeds are consecutive from seed_base")


def test_example_configs():
    grid = parse_config(CONFIG_DIR / "experiment_config.example.json", environ={})
    assert len(grid.points()) == 8
    assert grid.seeds == list(range(1, 31))

    setting_b = parse_config(CONFIG_DIR / "setting_b.example.json", environ={})
    assert setting_b.base.cells_per_side == 120
    assert len(setting_b.points()) == (4 + 4 + 1) * 3

    smoke = parse_config(CONFIG_DIR / "smoke.example.json", environ={})
    assert len(smoke.points()) == 3
    print("✅ bundled example configs load")


def main():
    """Run all tests."""
    print("🔧 Configuration Test Suite")
    print("=" * 40)

    tests = [
        test_defaults,
        test_validation_names_the_field,
        test_env_overrides,
        test_precedence,
        test_malformed_file,
        test_points_expansion,
        test_seeds,
        test_example_configs,
    ]

    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            failed += 1
            print(f"❌ {test.__name__}: {e}")

    print("=" * 40)
    if failed:
        print(f"❌ {failed} test(s) failed")
        return 1
    print("🎉 All configuration tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
