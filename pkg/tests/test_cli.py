import json
from pathlib import Path

import pytest
import yaml

from leoroute.cli import main
from leoroute.config import default_scenario


@pytest.fixture
def small_config(tmp_path):
    """Shrunk copy of the default scenario for fast CLI runs."""
    spec = default_scenario()
    doc = dict(spec.raw)
    doc["sim"] = dict(doc.get("sim", {}))
    doc["sim"]["horizon_s"] = 0.1
    path = tmp_path / "small.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


class TestRunCommand:
    def test_single_cell_artifacts(self, small_config, tmp_path, capsys):
        out = tmp_path / "results"
        rc = main(["run", "--config", str(small_config), "--router", "datarate",
                   "--gateways", "3", "--seed", "1", "--out", str(out)])
        assert rc == 0
        cell = out / "datarate-g3-s1"
        assert (cell / "manifest.json").exists()
        assert (cell / "stability.csv").exists()
        assert (cell / "latency_by_gateways.csv").exists()
        assert (cell / "timeseries.csv").exists()
        manifest = json.loads((cell / "manifest.json").read_text())
        assert manifest["generated"] == (manifest["delivered"]
                                         + manifest["dropped"]
                                         + manifest["in_flight"])

    def test_gateway_range(self, small_config, tmp_path):
        out = tmp_path / "results"
        rc = main(["run", "--config", str(small_config), "--router", "datarate",
                   "--gateways", "2..4", "--seed", "1", "--out", str(out)])
        assert rc == 0
        for n in (2, 3, 4):
            assert (out / f"datarate-g{n}-s1" / "manifest.json").exists()

    def test_reuse_and_byte_identical_rerun(self, small_config, tmp_path):
        out = tmp_path / "results"
        args = ["run", "--config", str(small_config), "--router", "qlearn",
                "--gateways", "2", "--seed", "3", "--out", str(out),
                "--packets-csv"]
        assert main(args) == 0
        first = (out / "qlearn-g2-s3" / "packets.csv").read_bytes()
        assert main(args + ["--force"]) == 0
        second = (out / "qlearn-g2-s3" / "packets.csv").read_bytes()
        assert first == second

    def test_invalid_config_exits_2_with_json_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("constellation: {planes: 2, sats_per_plane: 4}\n"
                       "gateways: [{name: A, lat: 1, lon: 2},"
                       " {name: B, lat: 3, lon: 4}]\n"
                       "traffic: {load_fracton: 0.85}\n")
        rc = main(["run", "--config", str(bad), "--router", "datarate",
                   "--gateways", "2", "--seed", "1", "--out", str(tmp_path / "o")])
        assert rc == 2
        err = capsys.readouterr().err.strip().splitlines()[-1]
        parsed = json.loads(err)
        assert parsed["error"] == "config"
        assert "load_fracton" in parsed["field"]


class TestSweepCommand:
    def test_cell_grid_and_aggregates(self, small_config, tmp_path):
        out = tmp_path / "sweep"
        rc = main(["sweep", "--config", str(small_config),
                   "--routers", "datarate,genie", "--gateways", "3",
                   "--seeds", "1,2", "--out", str(out)])
        assert rc == 0
        dirs = sorted(p.name for p in out.iterdir() if p.is_dir())
        assert dirs == ["datarate-g3-s1", "datarate-g3-s2",
                        "genie-g3-s1", "genie-g3-s2"]
        for fname in ("unstable_ratio.csv", "latency_by_gateways.csv",
                      "timeseries.csv"):
            assert (out / fname).exists()
        lines = (out / "unstable_ratio.csv").read_text().strip().splitlines()
        assert lines[0] == "router,num_gateways,ratio,n_unstable,n_tested"
        assert len(lines) == 3  # two router rows

    def test_no_cross_cell_overwrites(self, small_config, tmp_path):
        out = tmp_path / "sweep"
        main(["sweep", "--config", str(small_config), "--routers", "datarate",
              "--gateways", "2..3", "--seeds", "5", "--out", str(out)])
        manifests = list(out.glob("*/manifest.json"))
        keys = {(json.loads(m.read_text())["router"],
                 json.loads(m.read_text())["num_gateways"],
                 json.loads(m.read_text())["seed"]) for m in manifests}
        assert len(keys) == len(manifests) == 2
