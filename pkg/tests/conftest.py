import math

import numpy as np
import pytest

from curvemates import CurveSpec, sample_curve

INV_SQRT2 = 1.0 / math.sqrt(2.0)


@pytest.fixture(scope="session")
def unit_helix_spec():
    """The unit-speed helix with kappa = tau = 1/sqrt(2)."""
    return CurveSpec.helix(INV_SQRT2, INV_SQRT2)


@pytest.fixture(scope="session")
def grid_0_2():
    return np.linspace(0.0, 2.0, 2001)


@pytest.fixture(scope="session")
def helix_base(unit_helix_spec, grid_0_2):
    return sample_curve(unit_helix_spec, grid_0_2)


@pytest.fixture(scope="session")
def circle_base(grid_0_2):
    return sample_curve(CurveSpec.circle(1.0), grid_0_2)


def rotation_matrix(axis, angle):
    """Rodrigues rotation; used to generate arbitrary orthonormal frames."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    K = np.array([[0, -axis[2], axis[1]],
                  [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)
