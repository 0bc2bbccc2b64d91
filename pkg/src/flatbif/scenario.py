"""Scenario files: TOML descriptions of a product of a closed factor with
a collapsing flat factor, plus scan and tower parameters.

Exact data (lattice bases, group translations, radii, custom spectra)
must be rational or symbolic strings; floating-point literals are only
accepted for cutoffs, tolerances, and scan endpoints.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

try:
    import tomllib  # python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import ratmat as rm
from .bifurcation import Scenario, _div_int
from .crystal import CollapseFamily, CrystalGroup
from .errors import ScenarioError
from .exactpi import (PiRat, SymReal, as_exact, ex_mul, ex_sign,
                      exact_from_float_or_str)
from .lattices import Lattice
from .spectra import (ClosedFactor, SpectrumSlice, _sorted_entries,
                      sphere_spectrum, sphere_volume,
                      unit_volume_inv_radius_sq)


@dataclass(frozen=True)
class ScanParams:
    t_min: Fraction
    t_max: Fraction
    steps: int
    refine_budget: int


@dataclass(frozen=True)
class TowerParams:
    lam: object
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    scan: ScanParams | None
    tower: TowerParams | None
    precision_bits: int


def _endpoint(value) -> Fraction:
    # scan endpoints may be floats; decimal literals convert exactly
    if isinstance(value, float):
        return Fraction(repr(value))
    return rm.to_frac(value)


def _load_group(section: dict, base: Path) -> CrystalGroup:
    if "group_file" in section:
        path = base / section["group_file"]
        if not path.exists():
            raise ScenarioError(f"group file not found: {path}")
        return load_group_file(path)
    if "lattice_basis" not in section:
        raise ScenarioError("flat_factor needs group_file or lattice_basis")
    lat = Lattice(rm.mat(section["lattice_basis"]))
    reps = []
    for h in section.get("holonomy", []):
        reps.append({"linear": h["linear"], "translation": h["translation"]})
    return CrystalGroup.from_json({"lattice": lat.to_json(), "holonomy": reps})


def load_group_file(path) -> CrystalGroup:
    with open(path, "rb") as fh:
        obj = json.load(fh)
    return CrystalGroup.from_json(obj)


def load_lattice_file(path) -> Lattice:
    with open(path, "rb") as fh:
        obj = json.load(fh)
    if "lattice" in obj:
        obj = obj["lattice"]
    return Lattice.from_json(obj)


def load_matrix_file(path) -> rm.Mat:
    with open(path, "rb") as fh:
        obj = json.load(fh)
    key = "matrix" if "matrix" in obj else "linear"
    return rm.mat(obj[key])


def _closed_factor(section: dict, dim_f: int) -> ClosedFactor:
    kind = section.get("kind", "sphere")
    if kind == "sphere":
        m = int(section.get("dim", 2))
        if m < 2:
            raise ScenarioError("sphere dimension must be >= 2")
        unit_volume = bool(section.get("normalize_volume", False))
        radius = section.get("radius", "1")
        if isinstance(radius, float):
            raise ScenarioError(
                "sphere radius must be an exact string, not a float")
        if unit_volume:
            inv_r2 = unit_volume_inv_radius_sq(m)
            volume = as_exact(1)
        else:
            r = as_exact(radius)
            if isinstance(r, PiRat) and r.is_rational():
                rq = r.as_rational()
                inv_r2 = PiRat.rational(1 / rq ** 2)
                volume = sphere_volume(m) * rq ** m
            else:
                rs = SymReal(r).expr
                inv_r2 = SymReal(1 / rs ** 2)
                volume = SymReal(sphere_volume(m).to_sympy() * rs ** m)
        scal = ex_mul(m * (m - 1), inv_r2)
        n = m + dim_f
        threshold = _div_int(scal, n - 1)
        spectrum = sphere_spectrum(m, radius=radius, cutoff=threshold,
                                   unit_volume=unit_volume)
        return ClosedFactor("sphere", m, scal, volume, spectrum)
    if kind == "custom":
        try:
            m = int(section["dim"])
            scal = as_exact(section["scal"])
            volume = as_exact(section["volume"])
            raw_entries = section["spectrum"]
            cutoff = section["spectrum_cutoff"]
        except KeyError as exc:
            raise ScenarioError(f"custom closed_factor missing field {exc}")
        entries = [(as_exact(v), int(mult)) for v, mult in raw_entries]
        slice_ = SpectrumSlice(
            entries=_sorted_entries(entries),
            cutoff=exact_from_float_or_str(cutoff),
            source=f"custom(dim={m})",
            certificate=(("kind", "user-supplied"),),
        )
        if not slice_.entries or ex_sign(slice_.entries[0][0]) != 0 \
                or slice_.entries[0][1] != 1:
            raise ScenarioError(
                "custom spectrum must begin with eigenvalue 0 of multiplicity 1")
        return ClosedFactor("custom", m, scal, volume, slice_)
    raise ScenarioError(f"unknown closed_factor kind {kind!r}")


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid TOML: {exc}")
    base = path.parent

    if "flat_factor" not in doc:
        raise ScenarioError("scenario needs a [flat_factor] section")
    group = _load_group(doc["flat_factor"], base)

    collapse_section = doc.get("collapse", {"subspace": "auto"})
    subspace = collapse_section.get("subspace", "auto")
    if "basis" in collapse_section:
        collapse = CollapseFamily.from_subspace_basis(
            group, collapse_section["basis"])
    elif subspace == "none":
        collapse = None
    elif subspace == "auto":
        collapse = CollapseFamily.auto(group)
    else:
        raise ScenarioError(
            "collapse.subspace must be 'auto', 'none', or use collapse.basis")

    if "closed_factor" not in doc:
        raise ScenarioError("scenario needs a [closed_factor] section")
    closed = _closed_factor(doc["closed_factor"], group.dim)

    scan_doc = doc.get("scan")
    precision_bits = 128
    scan_params = None
    if scan_doc is not None:
        precision_bits = int(scan_doc.get("precision_bits", 128))
        if precision_bits < 64:
            raise ScenarioError("precision_bits must be >= 64")
        try:
            t_min = _endpoint(scan_doc["t_min"])
            t_max = _endpoint(scan_doc["t_max"])
            steps = int(scan_doc.get("steps", 64))
        except KeyError as exc:
            raise ScenarioError(f"[scan] missing field {exc}")
        scan_params = ScanParams(
            t_min=t_min, t_max=t_max, steps=steps,
            refine_budget=int(scan_doc.get("refine_budget", 64)))

    tower_doc = doc.get("tower")
    tower_params = None
    if tower_doc is not None:
        lam = tower_doc.get("lambda", "1")
        if isinstance(lam, float):
            raise ScenarioError("tower lambda must be exact, not a float")
        degrees = tuple(int(k) for k in tower_doc.get("degrees", []))
        tower_params = TowerParams(as_exact(lam), degrees)

    scenario = Scenario(closed, group, collapse, precision_bits)
    return ScenarioConfig(scenario, scan_params, tower_params, precision_bits)
