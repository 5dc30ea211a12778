"""Physical constants used across the toolkit (SI)."""

import scipy.constants as _sc

HBAR = _sc.hbar  # J s
PLANCK_H = _sc.h  # J s
ELEMENTARY_CHARGE = _sc.e  # C
EPSILON_0 = _sc.epsilon_0  # F/m

# Bumped whenever the shipped material database changes in a way that
# affects results; recorded in every output manifest.
CONSTANT_SET_VERSION = "materials-2026.1"
