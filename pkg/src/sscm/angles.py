"""Angle wrapping helpers (degrees)."""

import numpy as np


def wrap_360(angle_deg):
    """Wrap to [0, 360)."""
    return np.mod(angle_deg, 360.0)


def wrap_180(angle_deg):
    """Wrap to (-180, 180]."""
    return 180.0 - np.mod(180.0 - np.asarray(angle_deg, dtype=float), 360.0)
