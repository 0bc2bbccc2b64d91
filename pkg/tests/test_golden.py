"""Byte-level comparison against the bundled expected outputs, plus
structural round-trips of the serialization formats."""

import json

import pytest

from flatbif.cli import main
from flatbif.crystal import CrystalGroup
from flatbif.exactpi import ex_cmp, parse_exact
from flatbif.lattices import Lattice
from flatbif.scenario import load_group_file
from flatbif.spectra import bieberbach_spectrum

from conftest import SCENARIO_DIR, make_hw3d, make_klein

EXPECTED = SCENARIO_DIR / "expected"


def _files_match(tmp_path, produced: str, golden: str) -> bool:
    return (tmp_path / produced).read_bytes() == (EXPECTED / golden).read_bytes()


class TestGoldenOutputs:
    def test_klein_spectrum(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "spectrum", "quotient",
                     "--group", str(SCENARIO_DIR / "klein.json"),
                     "--cutoff", "100"]) == 0
        assert _files_match(tmp_path, "spectrum_quotient.json",
                            "klein_spectrum_cutoff100.json")
        assert _files_match(tmp_path, "spectrum_quotient.csv",
                            "klein_spectrum_cutoff100.csv")

    def test_square_torus_spectrum(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "spectrum", "torus",
                     "--basis", "identity2", "--cutoff", "100"]) == 0
        assert _files_match(tmp_path, "spectrum_torus.json",
                            "torus2_spectrum_cutoff100.json")
        assert _files_match(tmp_path, "spectrum_torus.csv",
                            "torus2_spectrum_cutoff100.csv")

    def test_hw3d_spectrum(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "--format", "json",
                     "spectrum", "quotient",
                     "--group", str(SCENARIO_DIR / "hw3d.json"),
                     "--cutoff", "90"]) == 0
        assert _files_match(tmp_path, "spectrum_quotient.json",
                            "hw3d_spectrum_cutoff90.json")

    def test_flagship_scan(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "--format", "json",
                     "bifurcate",
                     "--scenario", str(SCENARIO_DIR / "s2xt2.toml")]) == 0
        assert _files_match(tmp_path, "scan.json", "s2xt2_scan.json")

    def test_flagship_tower(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "--format", "json",
                     "tower",
                     "--scenario", str(SCENARIO_DIR / "s2xt2.toml")]) == 0
        assert _files_match(tmp_path, "tower.json", "s2xt2_tower.json")


class TestRoundTrips:
    def test_group_files_reparse_to_equal_values(self):
        for name in ("klein.json", "torus2.json", "torus3.json", "hw3d.json"):
            group = load_group_file(SCENARIO_DIR / name)
            assert CrystalGroup.from_json(group.to_json()) == group

    def test_constructed_groups_round_trip(self):
        for group in (make_klein(), make_hw3d()):
            assert CrystalGroup.from_json(group.to_json()) == group

    def test_lattice_round_trip(self):
        lat = Lattice.standard(3)
        assert Lattice.from_json(lat.to_json()) == lat

    def test_spectrum_json_reparses_to_equal_values(self, klein):
        slice_ = bieberbach_spectrum(klein, 100)
        obj = slice_.to_json()
        for entry, (value, mult) in zip(obj["entries"], slice_.entries):
            assert ex_cmp(parse_exact(entry["eigenvalue_exact"]), value) == 0
            assert entry["multiplicity"] == mult
        assert json.loads(json.dumps(obj, sort_keys=True)) == \
            json.loads(json.dumps(obj, sort_keys=True))
