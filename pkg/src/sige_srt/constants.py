"""Unit system shared by every module.

Lengths are in angstrom, energies in meV, frequencies in Hz unless a name
says otherwise, masses in units of the free-electron mass.
"""

from scipy import constants as _c

#: q^2 / (4 pi eps0) in meV * angstrom (~14 399.6)
COULOMB_MEV_A = _c.e / (4 * _c.pi * _c.epsilon_0) * 1e10 * 1e3

#: free-hydrogen Bohr radius in angstrom
BOHR_RADIUS_A = _c.physical_constants["Bohr radius"][0] * 1e10

#: hbar^2 / (2 m0) in meV * angstrom^2
HBAR2_OVER_2M0 = _c.hbar**2 / (2 * _c.m_e) / _c.e * 1e3 * 1e20

#: hydrogen Rydberg in meV (~13 605.7)
RYDBERG_MEV = COULOMB_MEV_A / (2 * BOHR_RADIUS_A)

#: 1 meV expressed in Hz
MEV_TO_HZ = _c.e * 1e-3 / _c.h

#: Bohr magneton over Planck constant, GHz per tesla (~13.9962)
MU_B_OVER_H_GHZ_PER_T = _c.physical_constants["Bohr magneton in Hz/T"][0] * 1e-9
