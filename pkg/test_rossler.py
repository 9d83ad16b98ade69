#!/usr/bin/env python3
"""
Test the Rossler return-map generator
"""

import sys
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from scripts.rossler import new_chaotic_state, rossler_next


def draws(seed, count):
    state = new_chaotic_state(np.random.default_rng(seed))
    return [rossler_next(state) for _ in range(count)]


def test_warmup_sets_extrema():
    state = new_chaotic_state(np.random.default_rng(0))
    assert state.maxima_seen == 50
    assert np.isfinite(state.lowest) and np.isfinite(state.highest)
    assert state.lowest < state.highest
    print("✅ warm-up maxima seed the normalisation range")


def test_same_seed_same_sequence():
    assert draws(5, 200) == draws(5, 200)
    assert draws(5, 50) != draws(6, 50)
    print("✅ identical seeds give identical sequences")


def test_values_in_unit_interval():
    values = draws(1, 1000)
    assert all(0.0 <= v <= 1.0 for v in values)
    print("✅ return-map values stay in [0, 1]")


def test_histogram_not_degenerate():
    values = np.array(draws(2, 3000))
    deciles = np.minimum((values * 10).astype(int), 9)
    assert len(set(deciles.tolist())) == 10
    print("✅ all ten deciles are visited")


def main():
    """Run all tests."""
    print("🌀 Rossler Generator Test Suite")
    print("=" * 40)

    tests = [
        test_warmup_sets_extrema,
        test_same_seed_same_sequence,
        test_values_in_unit_interval,
        test_histogram_not_degenerate,
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
    print("🎉 All Rossler tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
