"""Hydrogenic donor in an anisotropic effective-mass host.

Two routes to the bound-state geometry:

* :func:`bohr_radius_xy_approx` / :func:`bohr_radius_z` are the closed-form
  asymptotic expressions, valid for ``m_xy << m_z``. They undershoot the full
  solution by ~20 % at the Ge mass ratio.
* :func:`variational_solve` minimizes the energy of the two-parameter trial
  function ``exp(-sqrt(rho^2/a^2 + z^2/b^2))``. All integrals of this ansatz
  are closed form.

:func:`displaced_donor_params` handles an electron held in a plane a distance
``d`` from its ion, where the Coulomb core is softened to ``1/sqrt(r^2 + d^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .constants import BOHR_RADIUS_A, COULOMB_MEV_A, HBAR2_OVER_2M0, RYDBERG_MEV


class ConvergenceError(RuntimeError):
    """An optimizer or eigensolver failed to converge."""


@dataclass(frozen=True)
class DonorParams:
    a_xy: float  # angstrom
    a_z: float  # angstrom
    binding_energy: float  # meV, positive

    def __post_init__(self):
        if not (self.a_xy > 0 and self.a_z > 0):
            raise ValueError("Bohr radii must be positive")
        if not self.binding_energy > 0:
            raise ValueError(f"binding energy must be positive, got {self.binding_energy}")


@dataclass(frozen=True)
class DisplacedDonor:
    """Electron confined to a plane at vertical offset `d` (angstrom) from its ion.

    `m_xy` is the in-plane mass of the confined electron; `donor` describes
    the undisplaced problem and seeds the length scale.
    """

    d: float
    donor: DonorParams
    epsilon: float
    m_xy: float

    def __post_init__(self):
        if self.d < 0:
            raise ValueError(f"offset d must be >= 0, got {self.d}")
        _require_positive(epsilon=self.epsilon, m_xy=self.m_xy)


def _require_positive(**kw):
    for name, val in kw.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")


def effective_rydberg(epsilon, mass):
    """3-D hydrogenic binding energy (meV) for an isotropic mass."""
    return RYDBERG_MEV * mass / epsilon**2


def effective_bohr_radius(epsilon, mass):
    """3-D hydrogenic Bohr radius (angstrom) for an isotropic mass."""
    return BOHR_RADIUS_A * epsilon / mass


def bohr_radius_xy_approx(epsilon, m_xy, m_z):
    """In-plane Bohr radius (angstrom) from the light-mass asymptotic formula."""
    _require_positive(epsilon=epsilon, m_xy=m_xy, m_z=m_z)
    ratio = (m_xy / m_z) ** (1.0 / 3.0)
    return 2.0 * epsilon / (3.0 * np.pi) * (2.0 + ratio) / m_xy * BOHR_RADIUS_A


def bohr_radius_z(a_xy, m_xy, m_z):
    """Heavy-axis Bohr radius tied to the in-plane radius by the cube-root mass ratio."""
    _require_positive(a_xy=a_xy, m_xy=m_xy, m_z=m_z)
    return (m_xy / m_z) ** (1.0 / 3.0) * a_xy


def closed_form_params(epsilon, m_xy, m_z) -> DonorParams:
    """Radii from the asymptotic formulas; binding energy from the ansatz energy at those radii."""
    a = bohr_radius_xy_approx(epsilon, m_xy, m_z)
    b = bohr_radius_z(a, m_xy, m_z)
    return DonorParams(a, b, -anisotropic_energy(a, b, epsilon, m_xy, m_z))


def _inverse_r_average(a, b):
    # <1/r> of exp(-sqrt(rho^2/a^2 + z^2/b^2)): angular mean of 1/sqrt(a^2 sin^2 + b^2 cos^2)
    if np.isclose(a, b, rtol=1e-12, atol=0.0):
        return 1.0 / a
    if a > b:
        s = np.sqrt(a * a - b * b)
        return np.arcsin(s / a) / s
    s = np.sqrt(b * b - a * a)
    return np.arcsinh(s / a) / s


def anisotropic_energy(a, b, epsilon, m_xy, m_z):
    """Expectation of the effective-mass hydrogen Hamiltonian (meV) for trial radii (a, b).

    The kinetic term splits 2/3 in-plane, 1/3 along z for the scaled 1s orbital.
    """
    kinetic = HBAR2_OVER_2M0 * (2.0 / (3.0 * m_xy * a * a) + 1.0 / (3.0 * m_z * b * b))
    return kinetic - COULOMB_MEV_A / epsilon * _inverse_r_average(a, b)


def variational_solve(epsilon, m_xy, m_z, rtol=1e-8) -> DonorParams:
    """Minimize :func:`anisotropic_energy` over (a, b).

    Raises :class:`ConvergenceError` if the simplex search does not meet `rtol`.
    """
    _require_positive(epsilon=epsilon, m_xy=m_xy, m_z=m_z)
    scale = effective_rydberg(epsilon, np.sqrt(m_xy * m_z))

    def f(v):
        return anisotropic_energy(np.exp(v[0]), np.exp(v[1]), epsilon, m_xy, m_z) / scale

    x0 = np.log([effective_bohr_radius(epsilon, m_xy), effective_bohr_radius(epsilon, m_z)])
    res = optimize.minimize(
        f, x0, method="Nelder-Mead",
        options={"xatol": 1e-11, "fatol": rtol * 1e-3, "maxiter": 20000},
    )
    if not res.success:
        raise ConvergenceError(f"variational solve did not converge: {res.message}")
    # polish and confirm the stationary point
    res2 = optimize.minimize(f, res.x, method="BFGS", options={"gtol": 1e-12})
    x = res2.x if res2.fun <= res.fun else res.x
    if abs(res2.fun - res.fun) > rtol * abs(res.fun):
        raise ConvergenceError("variational energy not stable to requested tolerance")
    a, b = np.exp(x)
    energy = anisotropic_energy(a, b, epsilon, m_xy, m_z)
    return DonorParams(float(a), float(b), float(-energy))


def displaced_potential(dd: DisplacedDonor, r):
    """Softened Coulomb energy (meV) at in-plane distance `r` (angstrom)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    v = -COULOMB_MEV_A / (dd.epsilon * np.sqrt(r * r + dd.d * dd.d))
    return float(v) if v.ndim == 0 else v


def displaced_energy(a, d, epsilon, m_xy):
    """2-D energy (meV) of exp(-rho/a) in the softened Coulomb potential."""
    kinetic = HBAR2_OVER_2M0 / (m_xy * a * a)
    if d == 0:
        return kinetic - 2.0 * COULOMB_MEV_A / (epsilon * a)
    # rho = a*s; normalized density is (4/a^2) rho exp(-2 rho / a)
    integral, _ = integrate.quad(
        lambda s: s * np.exp(-2.0 * s) / np.sqrt(a * a * s * s + d * d),
        0.0, np.inf, epsrel=1e-11, epsabs=0.0, limit=200,
    )
    return kinetic - 4.0 * COULOMB_MEV_A / epsilon * integral


def displaced_donor_params(dd: DisplacedDonor) -> DonorParams:
    """Optimal in-plane radius and binding energy for a displaced donor.

    `a_z` of the result is carried over from ``dd.donor``; the problem is 2-D.
    """
    a2d = effective_bohr_radius(dd.epsilon, dd.m_xy) / 2.0
    lo = np.log(0.1 * a2d)
    hi = np.log(10.0 * (a2d + dd.d))
    res = optimize.minimize_scalar(
        lambda v: displaced_energy(np.exp(v), dd.d, dd.epsilon, dd.m_xy),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-10, "maxiter": 500},
    )
    if not res.success or min(res.x - lo, hi - res.x) < 1e-6:
        raise ConvergenceError(f"displaced-donor solve failed at d={dd.d}: {res.message}")
    a = float(np.exp(res.x))
    return DonorParams(a, dd.donor.a_z, float(-res.fun))
