"""Electron g-factor arithmetic for anisotropic conduction valleys."""

import numpy as np

from .constants import MU_B_OVER_H_GHZ_PER_T


def g_of_angle(g_par, g_perp, phi):
    """g-factor of one valley for a field at angle `phi` (radians) to its axis.

    Works elementwise on arrays.
    """
    phi = np.asarray(phi, dtype=float)
    g = np.sqrt(g_par**2 * np.cos(phi) ** 2 + g_perp**2 * np.sin(phi) ** 2)
    return float(g) if g.ndim == 0 else g


def donor_ground_g(g_par, g_perp):
    """Isotropic g of a donor ground state spread equally over L valleys."""
    return g_par / 3.0 + 2.0 * g_perp / 3.0


def resonance_frequency_ghz(g, field_tesla):
    """Spin-resonance frequency g * mu_B * B / h in GHz."""
    return g * MU_B_OVER_H_GHZ_PER_T * field_tesla
