"""D/T/B epitaxial stacks: validation, growth-axis potential, 1-D ground state, tuning curves.

Coordinates run along the growth axis with ``z = 0`` at the substrate-side
edge of the first layer. Hard walls sit at both outer edges of the stack.
The gate field is the uniform field along +z; a positive field pulls the
electron toward the top (last) layer.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import linalg

from . import materials
from .constants import COULOMB_MEV_A, HBAR2_OVER_2M0
from .donor import ConvergenceError, DonorParams, variational_solve
from .gfactor import donor_ground_g, g_of_angle, resonance_frequency_ghz  # noqa: F401
from .materials import AlloySpec

ROLES = ("D", "T", "B", "channel", "substrate")
STACK_SCHEMA_VERSION = "1"
TUNING_CSV_HEADER = ("gate_field_mV_per_A", "t_weight", "g_eff", "f_res_GHz")

#: composition * angstrom; a 23 % offset alloy is limited to ~1000 angstrom
STRAIN_BUDGET = 230.0
#: minimum barrier thickness at the 20 meV <111> reference barrier height
REFERENCE_BARRIER_THICKNESS = 200.0
REFERENCE_BARRIER_HEIGHT = 20.0


class StackError(ValueError):
    """Stack is malformed (no D layer, mixed growth directions, ...)."""


@dataclass(frozen=True)
class Layer:
    alloy: AlloySpec
    thickness: float
    role: str

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError(f"layer thickness must be positive, got {self.thickness}")
        if self.role not in ROLES:
            raise ValueError(f"unknown layer role {self.role!r}")


@dataclass(frozen=True)
class LayerStack:
    """Layers ordered substrate first; `donor_position` is measured from z = 0."""

    layers: tuple
    growth: str
    donor_position: float
    reference_composition: AlloySpec
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "growth", materials.normalize_growth(self.growth))

    @property
    def edges(self):
        return np.concatenate([[0.0], np.cumsum([lay.thickness for lay in self.layers])])

    @property
    def total_thickness(self):
        return float(self.edges[-1])

    def layer_index_at(self, z):
        """Index of the layer containing depth `z`; interfaces belong to the upper layer."""
        idx = np.searchsorted(self.edges, z, side="right") - 1
        return np.clip(idx, 0, len(self.layers) - 1)

    def roles(self, role):
        return [i for i, lay in enumerate(self.layers) if lay.role == role]

    def check_well_formed(self):
        if not self.layers:
            raise StackError("stack has no layers")
        mixed = {lay.alloy.growth for lay in self.layers} | {self.reference_composition.growth}
        if mixed != {self.growth}:
            raise StackError(f"mixed growth directions in stack: {sorted(mixed)}")
        d_layers = self.roles("D")
        if not d_layers:
            raise StackError("stack has no D layer")
        edges = self.edges
        hosts = [i for i in d_layers if edges[i] <= self.donor_position <= edges[i + 1]]
        if len(hosts) != 1:
            raise StackError(
                f"donor position {self.donor_position} must lie in exactly one D layer (found {len(hosts)})"
            )

    @property
    def donor_layer(self) -> Layer:
        self.check_well_formed()
        edges = self.edges
        for i in self.roles("D"):
            if edges[i] <= self.donor_position <= edges[i + 1]:
                return self.layers[i]
        raise AssertionError("unreachable")

    @property
    def tuning_layer(self) -> Layer:
        """The T layer, or the first L-like layer when no T layer is declared."""
        t = self.roles("T")
        if t:
            return self.layers[t[0]]
        for lay in self.layers:
            if materials.band_info(lay.alloy).l_like:
                return lay
        raise StackError("stack has neither a T layer nor any L-like layer")

    def to_dict(self):
        return {
            "schema_version": STACK_SCHEMA_VERSION,
            "name": self.name,
            "growth": self.growth,
            "reference_composition": self.reference_composition.ge_fraction,
            "donor_position": self.donor_position,
            "layers": [
                {"role": lay.role, "ge_fraction": lay.alloy.ge_fraction, "thickness": lay.thickness}
                for lay in self.layers
            ],
        }


def stack_from_dict(data: dict) -> LayerStack:
    allowed = {"schema_version", "name", "growth", "reference_composition", "donor_position", "layers"}
    unknown = set(data) - allowed
    if unknown:
        raise StackError(f"unknown stack keys: {sorted(unknown)}")
    if str(data.get("schema_version", "")) != STACK_SCHEMA_VERSION:
        raise StackError(f"unsupported stack schema_version {data.get('schema_version')!r}")
    try:
        growth = materials.normalize_growth(data["growth"])
        layers = []
        for entry in data["layers"]:
            extra = set(entry) - {"role", "ge_fraction", "thickness", "growth"}
            if extra:
                raise StackError(f"unknown layer keys: {sorted(extra)}")
            alloy = AlloySpec(float(entry["ge_fraction"]), entry.get("growth", growth))
            layers.append(Layer(alloy, float(entry["thickness"]), entry["role"]))
        return LayerStack(
            layers=layers,
            growth=growth,
            donor_position=float(data["donor_position"]),
            reference_composition=AlloySpec(float(data["reference_composition"]), growth),
            name=data.get("name", ""),
        )
    except KeyError as exc:
        raise StackError(f"missing stack key {exc}") from None


def load_stack(path) -> LayerStack:
    return stack_from_dict(json.loads(Path(path).read_text()))


def save_stack(stack: LayerStack, path):
    Path(path).write_text(json.dumps(stack.to_dict(), indent=2) + "\n")


def reference_stack(growth="111") -> LayerStack:
    """The packaged reference design for a growth direction."""
    g = materials.normalize_growth(growth)
    text = resources.files("sige_srt").joinpath(f"data/stacks/reference_{g}.json").read_text()
    return stack_from_dict(json.loads(text))


def gate_field_from_voltage(stack: LayerStack, volts):
    """Uniform field (mV/angstrom) for a bias dropped across the whole stack."""
    return 1e3 * np.asarray(volts, dtype=float) / stack.total_thickness


def default_donor(stack: LayerStack) -> DonorParams:
    """Variational donor for the alloy of the layer hosting the donor ion."""
    p = materials.alloy_params(stack.donor_layer.alloy)
    return variational_solve(p.epsilon, p.m_xy, p.m_z)


# --- validation ---------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    limit: float
    message: str


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value, "limit": c.limit, "message": c.message}
                for c in self.checks
            ],
        }

    def __str__(self):
        lines = [f"stack validation: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.message}")
        return "\n".join(lines)


def min_barrier_thickness(height):
    """Barrier thickness giving the same tunneling exponent as 200 angstrom at 20 meV.

    The WKB exponent scales as thickness * sqrt(height).
    """
    if height <= 0:
        return np.inf
    return REFERENCE_BARRIER_THICKNESS * np.sqrt(REFERENCE_BARRIER_HEIGHT / height)


def validate_stack(
    stack: LayerStack,
    donor: DonorParams,
    alignment_tolerance=2.0,
    strain_budget=STRAIN_BUDGET,
) -> ValidationReport:
    """Check band alignment, barrier height, barrier thickness, confinement and strain."""
    stack.check_well_formed()
    model = materials.default_model()
    report = ValidationReport()
    d_layer = stack.donor_layer
    e_d = model.conduction_band_edge(d_layer.alloy)

    t_idx = stack.roles("T")
    if t_idx:
        e_t = model.conduction_band_edge(stack.layers[t_idx[0]].alloy)
        mis = abs(e_d - e_t)
        report.checks.append(Check(
            "alignment", mis <= alignment_tolerance, mis, alignment_tolerance,
            f"|E_D - E_T| = {mis:.2f} meV (tolerance {alignment_tolerance:.2f} meV)",
        ))
    else:
        report.checks.append(Check("alignment", False, np.nan, alignment_tolerance, "no T layer"))

    b_idx = stack.roles("B")
    heights = [model.barrier_height(d_layer.alloy, stack.layers[i].alloy) for i in b_idx]
    low = min(heights) if heights else 0.0
    report.checks.append(Check(
        "barrier_height", bool(heights) and low >= donor.binding_energy, low, donor.binding_energy,
        f"lowest barrier {low:.2f} meV vs donor binding {donor.binding_energy:.2f} meV",
    ))

    thin = []
    for i, h in zip(b_idx, heights):
        need = min_barrier_thickness(h)
        if stack.layers[i].thickness < need:
            thin.append(f"layer {i}: {stack.layers[i].thickness:.0f} < {need:.0f} A")
    worst = min((stack.layers[i].thickness for i in b_idx), default=0.0)
    need_ref = min_barrier_thickness(low) if heights else np.inf
    report.checks.append(Check(
        "barrier_thickness", bool(b_idx) and not thin, worst, need_ref,
        "; ".join(thin) if thin else f"all B layers at least {need_ref:.0f} A",
    ))

    # B layers must bracket the D/T pair
    core = [i for i, lay in enumerate(stack.layers) if lay.role in ("D", "T")]
    below = any(i < min(core) for i in b_idx) if core else False
    above = any(i > max(core) for i in b_idx) if core else False
    report.checks.append(Check(
        "confinement", below and above, float(below) + float(above), 2.0,
        "B layers on both sides of D/T" if below and above else "D/T pair not enclosed by B layers",
    ))

    x_ref = stack.reference_composition.ge_fraction
    load = sum(
        lay.thickness * abs(lay.alloy.ge_fraction - x_ref)
        for lay in stack.layers if lay.role != "substrate"
    )
    report.checks.append(Check(
        "strain", load <= strain_budget, load, strain_budget,
        f"strain load {load:.1f} vs budget {strain_budget:.1f} (composition * A)",
    ))
    return report


# --- potential and eigensolver -------------------------------------------------


@dataclass
class SampledPotential:
    z: np.ndarray  # interior grid nodes, angstrom
    energy: np.ndarray  # meV
    mass: np.ndarray  # growth-axis mass at each node, m0
    layer_index: np.ndarray
    spacing: float


def build_potential(stack: LayerStack, gate_field, spacing=0.25, donor: DonorParams | None = None):
    """Band offsets + gate ramp + in-plane-averaged donor Coulomb term on a uniform grid."""
    if not stack.layers:
        raise StackError("stack has no layers")
    if gate_field < 0:
        raise ValueError("gate_field must be >= 0")
    stack.check_well_formed()
    total = stack.total_thickness
    n = max(int(round(total / spacing)), 2)
    h = total / n
    z = h * np.arange(1, n)
    idx = stack.layer_index_at(z)
    model = materials.default_model()
    edge = np.array([model.conduction_band_edge(lay.alloy) for lay in stack.layers])
    m_z = np.array([model.alloy_params(lay.alloy).m_z for lay in stack.layers])
    v = edge[idx] - gate_field * z
    if donor is not None:
        eps = model.alloy_params(stack.donor_layer.alloy).epsilon
        v = v - COULOMB_MEV_A / (eps * np.sqrt((z - stack.donor_position) ** 2 + donor.a_xy**2))
    return SampledPotential(z=z, energy=v, mass=m_z[idx], layer_index=idx, spacing=h)


def solve_ground_state(potential, mass, spacing):
    """Lowest eigenpair of the 1-D effective-mass Hamiltonian with hard walls.

    `potential` (meV) and `mass` (m0; scalar or per node) are sampled on interior
    nodes spaced `spacing` angstrom apart, the walls one step beyond each end.
    Interface masses use 1/m averaged between neighbouring nodes. Returns the
    energy in meV and the probability per node (sums to 1).
    """
    v = np.asarray(potential, dtype=float)
    inv_m = 1.0 / np.broadcast_to(np.asarray(mass, dtype=float), v.shape)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential must be finite")
    c = HBAR2_OVER_2M0 / spacing**2
    inv_half = 0.5 * (inv_m[1:] + inv_m[:-1])
    left = np.concatenate([[inv_m[0]], inv_half])
    right = np.concatenate([inv_half, [inv_m[-1]]])
    diag = c * (left + right) + v
    off = -c * inv_half
    try:
        w, vec = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    except linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    psi = vec[:, 0]
    density = psi * psi
    density /= density.sum()
    return float(w[0]), density


# --- tuning curves --------------------------------------------------------------


@dataclass
class TuningCurve:
    gate_field: np.ndarray
    t_weight: np.ndarray
    g_eff: np.ndarray
    f_res: np.ndarray  # GHz
    field_B: float
    energy: np.ndarray = None  # ground-state energy per sample, meV

    def rows(self):
        return list(zip(self.gate_field.tolist(), self.t_weight.tolist(), self.g_eff.tolist(), self.f_res.tolist()))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TUNING_CSV_HEADER)
        for row in self.rows():
            w.writerow([f"{x:.10g}" for x in row])
        return buf.getvalue()


def tuning_curve(stack: LayerStack, field_B, gate_fields, donor: DonorParams | None = None, spacing=0.25):
    """Effective g and resonance frequency versus gate field.

    The L-like weight is the ground-state probability in every L-like layer;
    ``g_eff = (1 - w) g_D + w g_T``.
    """
    stack.check_well_formed()
    if donor is None:
        donor = default_donor(stack)
    fields = np.sort(np.atleast_1d(np.asarray(gate_fields, dtype=float)))
    g_d = materials.band_info(stack.donor_layer.alloy).g_isotropic_donor
    g_t = materials.band_info(stack.tuning_layer.alloy).g_isotropic_donor
    l_like = np.array([materials.band_info(lay.alloy).l_like for lay in stack.layers])
    weights, energies = [], []
    for f in fields:
        pot = build_potential(stack, f, spacing=spacing, donor=donor)
        e, dens = solve_ground_state(pot.energy, pot.mass, pot.spacing)
        weights.append(float(np.clip(dens[l_like[pot.layer_index]].sum(), 0.0, 1.0)))
        energies.append(e)
    w = np.array(weights)
    g = (1.0 - w) * g_d + w * g_t
    return TuningCurve(
        gate_field=fields, t_weight=w, g_eff=g,
        f_res=resonance_frequency_ghz(g, field_B), field_B=float(field_B), energy=np.array(energies),
    )
