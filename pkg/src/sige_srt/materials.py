"""Si/Ge material constants and a piecewise-linear alloy conduction-band model.

The band model is loaded from ``data/sige_bands.json``. Each growth direction
lists anchor points ``[ge_fraction, energy_meV]`` for every conduction valley;
energies between anchors are linearly interpolated. The default anchors are
calibrated approximations (X/L crossover compositions, 20 meV and 50 meV
reference barrier heights, equal D/T band edges), not a full band structure,
and can be swapped for better data by pointing :func:`load_band_model` at a
different file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .gfactor import donor_ground_g

GROWTH_DIRECTIONS = ("111", "001")
VALLEY_LABELS = ("X", "X2", "X4", "L", "L1", "L3")
L_LIKE = frozenset({"L", "L1", "L3"})

_ANCHORS = {
    "type": "array",
    "minItems": 2,
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
}
_ENDPOINT = {
    "type": "object",
    "required": ["epsilon", "m_xy", "m_z", "g_par", "g_perp"],
    "properties": {k: {"type": "number"} for k in ["epsilon", "m_xy", "m_z", "g_par", "g_perp"]},
}
BAND_MODEL_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "endpoints", "x_side_donor_g", "growth"],
    "properties": {
        "schema_version": {"const": "1"},
        "endpoints": {
            "type": "object",
            "required": ["Si", "Ge"],
            "properties": {"Si": _ENDPOINT, "Ge": _ENDPOINT},
        },
        "x_side_donor_g": {"type": "number", "exclusiveMinimum": 0},
        "growth": {
            "type": "object",
            "required": list(GROWTH_DIRECTIONS),
            "additionalProperties": {
                "type": "object",
                "required": ["crossover", "x_side_valley", "l_side_valley", "l_side_g_rule", "valleys"],
                "properties": {
                    "crossover": {"type": "number", "minimum": 0, "maximum": 1},
                    "x_side_valley": {"enum": list(VALLEY_LABELS)},
                    "l_side_valley": {"enum": list(VALLEY_LABELS)},
                    "l_side_g_rule": {"enum": ["g_par", "valley_average"]},
                    "valleys": {
                        "type": "object",
                        "minProperties": 2,
                        "propertyNames": {"enum": list(VALLEY_LABELS)},
                        "additionalProperties": _ANCHORS,
                    },
                },
            },
        },
    },
}


class BandModelError(ValueError):
    """Band-model data file is malformed or internally inconsistent."""


def normalize_growth(growth) -> str:
    """Map '<111>', '⟨001⟩', 111, ... onto the canonical '111' / '001'."""
    g = str(growth).strip().strip("<>⟨⟩[]")
    if g == "100":
        g = "001"
    if g not in GROWTH_DIRECTIONS:
        raise ValueError(f"unknown growth direction {growth!r}; expected one of {GROWTH_DIRECTIONS}")
    return g


@dataclass(frozen=True)
class MaterialParams:
    epsilon: float
    m_xy: float
    m_z: float
    g_par: float
    g_perp: float

    def __post_init__(self):
        if not self.epsilon > 1:
            raise ValueError(f"epsilon must exceed 1, got {self.epsilon}")
        if not (self.m_xy > 0 and self.m_z > 0):
            raise ValueError("effective masses must be positive")
        if not (0 < self.g_par < 2.1 and 0 < self.g_perp < 2.1):
            raise ValueError("g-factors must lie in (0, 2.1)")


@dataclass(frozen=True)
class AlloySpec:
    """Si(1-x)Ge(x) with a growth/strain direction."""

    ge_fraction: float
    growth: str = "111"

    def __post_init__(self):
        if not 0.0 <= self.ge_fraction <= 1.0:
            raise ValueError(f"ge_fraction must be in [0, 1], got {self.ge_fraction}")
        object.__setattr__(self, "growth", normalize_growth(self.growth))


@dataclass(frozen=True)
class BandInfo:
    valley_character: str
    band_edge_offsets: dict = field(hash=False)
    g_isotropic_donor: float

    @property
    def l_like(self) -> bool:
        return self.valley_character in L_LIKE

    @property
    def conduction_band_edge(self) -> float:
        return self.band_edge_offsets[self.valley_character]


@dataclass(frozen=True)
class _GrowthModel:
    crossover: float
    x_side_valley: str
    l_side_valley: str
    l_side_g_rule: str
    valleys: dict  # label -> (xs, energies)

    def energy(self, label, x):
        xs, es = self.valleys[label]
        if x <= xs[0] or x >= xs[-1]:
            # linear extension beyond the outer anchors
            i = 0 if x <= xs[0] else len(xs) - 2
            slope = (es[i + 1] - es[i]) / (xs[i + 1] - xs[i])
            ref = i if x <= xs[0] else i + 1
            return float(es[ref] + slope * (x - xs[ref]))
        return float(np.interp(x, xs, es))


class BandModel:
    """Endpoint constants plus per-growth valley-edge curves."""

    def __init__(self, data: dict, source: str = "<dict>"):
        try:
            jsonschema.validate(data, BAND_MODEL_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise BandModelError(f"{source}: {exc.message}") from exc
        self.source = source
        self.schema_version = data["schema_version"]
        self.endpoints = {name: MaterialParams(**vals) for name, vals in data["endpoints"].items()}
        self.x_side_donor_g = float(data["x_side_donor_g"])
        self.growth = {}
        for g, spec in data["growth"].items():
            g = normalize_growth(g)
            valleys = {}
            for label, anchors in spec["valleys"].items():
                arr = np.asarray(anchors, dtype=float)
                if np.any(np.diff(arr[:, 0]) <= 0):
                    raise BandModelError(f"{source}: anchors for {g}/{label} must be strictly increasing in x")
                valleys[label] = (arr[:, 0], arr[:, 1])
            gm = _GrowthModel(
                crossover=float(spec["crossover"]),
                x_side_valley=spec["x_side_valley"],
                l_side_valley=spec["l_side_valley"],
                l_side_g_rule=spec["l_side_g_rule"],
                valleys=valleys,
            )
            for label in (gm.x_side_valley, gm.l_side_valley):
                if label not in valleys:
                    raise BandModelError(f"{source}: growth {g} declares valley {label} without a curve")
            self._check_crossover(g, gm)
            self.growth[g] = gm

    def _check_crossover(self, g, gm):
        # the declared lowest valley must actually be lowest away from the crossing
        for x in np.linspace(0.0, 1.0, 201):
            if abs(x - gm.crossover) < 1e-3:
                continue
            energies = {lab: gm.energy(lab, x) for lab in gm.valleys}
            lowest = min(energies, key=energies.get)
            expected = gm.x_side_valley if x < gm.crossover else gm.l_side_valley
            if lowest != expected:
                raise BandModelError(
                    f"{self.source}: growth {g} at x={x:.3f} has {lowest} lowest, "
                    f"inconsistent with crossover {gm.crossover}"
                )

    def endpoint_params(self, material: str) -> MaterialParams:
        try:
            return self.endpoints[material]
        except KeyError:
            raise ValueError(f"material must be 'Si' or 'Ge', got {material!r}") from None

    def band_info(self, alloy: AlloySpec) -> BandInfo:
        gm = self.growth[alloy.growth]
        x = alloy.ge_fraction
        offsets = {lab: gm.energy(lab, x) for lab in gm.valleys}
        if x < gm.crossover:
            return BandInfo(gm.x_side_valley, offsets, self.x_side_donor_g)
        ge = self.endpoints["Ge"]
        if gm.l_side_g_rule == "g_par":
            g = ge.g_par
        else:
            g = donor_ground_g(ge.g_par, ge.g_perp)
        return BandInfo(gm.l_side_valley, offsets, g)

    def alloy_params(self, alloy: AlloySpec) -> MaterialParams:
        si, ge = self.endpoints["Si"], self.endpoints["Ge"]
        x = alloy.ge_fraction

        def lerp(a, b):
            # exact at both endpoints
            return a if x == 0 else b if x == 1 else (1 - x) * a + x * b

        side = ge if self.band_info(alloy).l_like else si
        return MaterialParams(
            epsilon=lerp(si.epsilon, ge.epsilon),
            m_xy=lerp(si.m_xy, ge.m_xy),
            m_z=lerp(si.m_z, ge.m_z),
            g_par=side.g_par,
            g_perp=side.g_perp,
        )

    def conduction_band_edge(self, alloy: AlloySpec) -> float:
        return self.band_info(alloy).conduction_band_edge

    def barrier_height(self, d_layer: AlloySpec, b_layer: AlloySpec) -> float:
        if d_layer.growth != b_layer.growth:
            raise ValueError(f"growth directions differ: {d_layer.growth} vs {b_layer.growth}")
        return self.conduction_band_edge(b_layer) - self.conduction_band_edge(d_layer)


def load_band_model(path=None) -> BandModel:
    """Load and schema-check a band-model file; the packaged default if `path` is None."""
    if path is None:
        text = resources.files("sige_srt").joinpath("data/sige_bands.json").read_text()
        source = "sige_bands.json"
    else:
        text = Path(path).read_text()
        source = str(path)
    return BandModel(json.loads(text), source=source)


@lru_cache(maxsize=None)
def default_model() -> BandModel:
    return load_band_model()


def endpoint_params(material: str) -> MaterialParams:
    return default_model().endpoint_params(material)


def alloy_params(alloy: AlloySpec) -> MaterialParams:
    """Linear (Vegard) epsilon and masses; g-factors follow the valley side."""
    return default_model().alloy_params(alloy)


def band_info(alloy: AlloySpec) -> BandInfo:
    return default_model().band_info(alloy)


def barrier_height(d_layer: AlloySpec, b_layer: AlloySpec) -> float:
    """Conduction-band-edge step from the D composition up to the B composition (meV)."""
    return default_model().barrier_height(d_layer, b_layer)
