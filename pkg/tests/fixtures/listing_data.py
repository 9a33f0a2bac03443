"""Reference instances with hand-checked values.

The listing instance is d=1, H=3 with one sample x=2 and target ξ=3:
pre-activations (0, 0, 4), output 11, risk (11 - 3)² = 64.
"""

# Listing instance: W, b, v, c
LISTING_D = 1
LISTING_H = 3
LISTING_PHI = [-1.0, 1.0, 2.0, 2.0, -2.0, 0.0, 1.0, -1.0, 2.0, 3.0]
LISTING_XI = 3.0
LISTING_X = 2.0

LISTING_OUTPUT = 11.0
LISTING_RISK = 64.0
LISTING_GRADIENT = [0.0, 0.0, 64.0, 0.0, 0.0, 32.0, 0.0, 0.0, 64.0, 16.0]
LISTING_V = 38.0
LISTING_PAIRING = 512.0
LISTING_DESCENT_GAMMA = 0.001
LISTING_DESCENT = -0.502272
LISTING_STEP_BOUND_V = 1.0 / 77.0
LISTING_STEP_BOUND_A = 5.61e-6

# ξ = 0: residual 11, c-gradient 22
LISTING_XI0_C_GRADIENT = 22.0
# x = 3: pre-activations (-1, 1, 6)
LISTING_X3_PRE = [-1.0, 1.0, 6.0]

# One unit on uniform[0, 1]: N(x) = max{x - 1/2, 0}, target 0
HALF_KINK_PHI = [1.0, -0.5, 1.0, 0.0]
HALF_KINK_RISK = 1.0 / 24.0
HALF_KINK_GRADIENT = [5.0 / 24.0, 1.0 / 4.0, 1.0 / 12.0, 1.0 / 4.0]


def demo_config(**overrides) -> dict:
    """Small GD config document (d=1, H=8, uniform[0,1], ξ=1) with top-level overrides."""
    document = {
        "shape": {"d": 1, "H": 8},
        "init": {"kind": "uniform_box", "low": -0.5, "high": 0.5},
        "distribution": {"kind": "uniform", "a": 0.0, "b": 1.0},
        "xi": 1.0,
        "schedule": {"kind": "constant", "bound_fraction": 0.9, "horizon": 50},
        "mode": "gd",
        "seeds": [0],
    }
    document.update(overrides)
    return document

# d=1, H=8 Θ₀ in [-0.5, 0.5]^25 with every unit active on [0, 1] (w_i, b_i > 0): W, b, v, c
ACTIVE_DEMO_PHI = [
    0.30, 0.25, 0.40, 0.35, 0.20, 0.45, 0.30, 0.25,
    0.30, 0.40, 0.20, 0.35, 0.45, 0.25, 0.30, 0.40,
    0.10, -0.05, 0.10, 0.05, -0.10, 0.10, 0.05, 0.10,
    0.5,
]
