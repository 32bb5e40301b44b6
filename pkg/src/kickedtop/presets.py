"""Named parameter presets for the experiment harness.

Each preset pins the twist strength, kick angle, and the initial spin
coherent state. "regular" and "chaotic" refer to where the initial state
sits in the mixed classical phase space at the given kappa.
"""
import math

PRESETS = {
    "regular-k3": {"kappa": 3.0, "p": math.pi / 2.0, "theta": 2.25, "phi": 2.5},
    "chaotic-k3": {"kappa": 3.0, "p": math.pi / 2.0, "theta": 2.25, "phi": 1.1},
    "regular-k1": {"kappa": 1.0, "p": math.pi / 2.0, "theta": 2.25, "phi": 1.1},
}
