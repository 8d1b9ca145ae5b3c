import math
import sys
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, settings

# Make the sibling oracles module importable from every test file.
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def unit_sum_gap(coefficients) -> float:
    """|sum(c) - 1| measured with exact summation."""
    weights = getattr(coefficients, "weights", coefficients)
    return abs(math.fsum(np.asarray(weights, dtype=np.float64)) - 1.0)
