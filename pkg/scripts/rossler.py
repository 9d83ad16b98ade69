"""Rossler first-return-map generator used by the chaotic direction choice.

The system x' = -y - z, y' = x + a y, z' = b + z (x - c) is integrated with
fixed-step RK4. Each draw runs to the next local maximum of x and maps it to
[0, 1] with the running extrema of all maxima observed so far.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_A = 0.2
DEFAULT_B = 0.2
DEFAULT_C = 5.7
DEFAULT_STEP = 0.01
WARMUP_MAXIMA = 50
TRANSIENT_MAXIMA = 10
MAX_STEPS_PER_MAXIMUM = 200_000
DIVERGENCE_LIMIT = 1e6


@dataclass
class ChaoticState:
    x: float
    y: float
    z: float
    a: float = DEFAULT_A
    b: float = DEFAULT_B
    c: float = DEFAULT_C
    step: float = DEFAULT_STEP
    rho: float = 0.5
    lowest: float = math.inf
    highest: float = -math.inf
    maxima_seen: int = 0
    rising: bool = False


def _next_maximum(state: ChaoticState) -> float:
    x, y, z = state.x, state.y, state.z
    a, b, c, h = state.a, state.b, state.c, state.step
    half = 0.5 * h
    sixth = h / 6.0
    rising = state.rising
    for _ in range(MAX_STEPS_PER_MAXIMUM):
        k1x = -y - z
        k1y = x + a * y
        k1z = b + z * (x - c)
        x2, y2, z2 = x + half * k1x, y + half * k1y, z + half * k1z
        k2x = -y2 - z2
        k2y = x2 + a * y2
        k2z = b + z2 * (x2 - c)
        x3, y3, z3 = x + half * k2x, y + half * k2y, z + half * k2z
        k3x = -y3 - z3
        k3y = x3 + a * y3
        k3z = b + z3 * (x3 - c)
        x4, y4, z4 = x + h * k3x, y + h * k3y, z + h * k3z
        k4x = -y4 - z4
        k4y = x4 + a * y4
        k4z = b + z4 * (x4 - c)
        x_new = x + sixth * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y_new = y + sixth * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        z_new = z + sixth * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        if not (abs(x_new) < DIVERGENCE_LIMIT and abs(z_new) < DIVERGENCE_LIMIT):
            raise FloatingPointError("Rossler trajectory left the attractor basin")
        peak = rising and x_new < x
        rising = x_new > x
        previous = x
        x, y, z = x_new, y_new, z_new
        if peak:
            state.x, state.y, state.z, state.rising = x, y, z, rising
            state.maxima_seen += 1
            return previous
    raise RuntimeError(f"No maximum of x within {MAX_STEPS_PER_MAXIMUM} steps")


def rossler_next(state: ChaoticState) -> float:
    """Next return-map value rho in [0, 1]."""
    maximum = _next_maximum(state)
    state.lowest = min(state.lowest, maximum)
    state.highest = max(state.highest, maximum)
    span = state.highest - state.lowest
    state.rho = (maximum - state.lowest) / span if span > 0 else 0.5
    return state.rho


def new_chaotic_state(rng: np.random.Generator, warmup: int = WARMUP_MAXIMA,
                      transient: int = TRANSIENT_MAXIMA, a: float = DEFAULT_A, b: float = DEFAULT_B,
                      c: float = DEFAULT_C, step: float = DEFAULT_STEP,
                      max_attempts: int = 20) -> ChaoticState:
    """Random start in [-5, 5]^3, then ``warmup`` maxima are integrated and not emitted.

    The first ``transient`` warm-up maxima are ignored; the rest seed the
    normalisation extrema.
    """
    last_error: Optional[Exception] = None
    for _ in range(max_attempts):
        x, y, z = rng.uniform(-5.0, 5.0, size=3)
        state = ChaoticState(x=float(x), y=float(y), z=float(z), a=a, b=b, c=c, step=step)
        try:
            for index in range(warmup):
                maximum = _next_maximum(state)
                if index >= transient:
                    state.lowest = min(state.lowest, maximum)
                    state.highest = max(state.highest, maximum)
        except (FloatingPointError, RuntimeError) as e:
            last_error = e
            continue
        return state
    raise RuntimeError(f"Could not start the Rossler system after {max_attempts} attempts: {last_error}")
