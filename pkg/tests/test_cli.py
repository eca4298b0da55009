import json
import subprocess
import sys

import numpy as np
import pytest

from chromasig.cli import (ParseError, RunConfig, cmd_diagrams, cmd_plot,
                           cmd_signature, cmd_synth, ingest_csv, main)


def write_csv(path, rows, header="x,y,label"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")


class TestIngest:
    def test_basic_mapping(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0.0,0.0,A", "1.0,0.0,B", "2.0,0.5,A"])
        cloud, names = ingest_csv(p)
        assert len(cloud) == 3 and cloud.species_count == 2
        assert names == ["A", "B"]
        assert cloud.labels.tolist() == [0, 1, 0]

    def test_z_column(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0,0,0,A", "1,0,1,A", "0,1,0.5,B"], header="x,y,z,label")
        cloud, _ = ingest_csv(p)
        assert cloud.dimension == 3

    def test_nan_coordinate(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0,0,A", "nan,1,B"])
        with pytest.raises(ParseError, match="line 3"):
            ingest_csv(p)

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0,zero,A"])
        with pytest.raises(ParseError, match="line 2"):
            ingest_csv(p)

    def test_missing_column(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0,0"], header="x,y")
        with pytest.raises(ParseError, match="label"):
            ingest_csv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("")
        with pytest.raises(ParseError):
            ingest_csv(p)

    def test_duplicate_point_warns(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["0,0,A", "0,0,A", "1,1,B"])
        with pytest.warns(UserWarning):
            cloud, _ = ingest_csv(p)
        assert len(cloud) == 2

    def test_row_order_irrelevant(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, ["0,0,A", "1,0,B", "2,0.5,A"])
        write_csv(b, ["2,0.5,A", "0,0,A", "1,0,B"])
        out_a, out_b = tmp_path / "oa", tmp_path / "ob"
        cfg = RunConfig(max_combo=2)
        cmd_diagrams([a], out_a, cfg)
        cmd_diagrams([b], out_b, cfg)
        da = json.loads((out_a / "a.diagrams.json").read_text())
        db = json.loads((out_b / "b.diagrams.json").read_text())
        assert da["combinations"] == db["combinations"]


def synth_file(tmp_path, name="circle", **params):
    out = tmp_path / f"{name}.csv"
    cmd_synth(name, out, params)
    return out


class TestCommands:
    def test_synth_writes_csv(self, tmp_path):
        p = synth_file(tmp_path, "circle", n=12, seed=1)
        lines = p.read_text().strip().splitlines()
        assert lines[0] == "x,y,label"
        assert len(lines) == 13

    def test_diagrams_schema_and_determinism(self, tmp_path):
        p = synth_file(tmp_path, "dichromatic_arcs", n=14, seed=0)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        cfg = RunConfig(max_combo=2)
        assert cmd_diagrams([p], out1, cfg) == 0
        assert cmd_diagrams([p], out2, cfg) == 0
        f1 = out1 / "dichromatic_arcs.diagrams.json"
        f2 = out2 / "dichromatic_arcs.diagrams.json"
        assert f1.read_bytes() == f2.read_bytes()
        doc = json.loads(f1.read_text())
        assert set(doc) == {"input", "input_hash", "config_hash",
                            "species_universe", "combinations"}
        assert len(doc["combinations"]) == 3  # two singles plus one pair
        single = doc["combinations"][0]
        assert set(single["diagrams"]) == {"domain_deg0", "domain_deg1"}
        pair = doc["combinations"][2]
        assert set(pair["diagrams"]) == {"kernel_deg0", "kernel_deg1",
                                         "image_deg0", "image_deg1", "cokernel_deg1"}
        deaths = [d for _b, d in pair["diagrams"]["kernel_deg0"]]
        flat = json.dumps(doc)
        assert "Infinity" not in flat  # essentials encoded as the string "inf"

    def test_three_species_has_seven_records(self, tmp_path):
        p = synth_file(tmp_path, "trichromatic_arcs", n=15, seed=0)
        out = tmp_path / "o"
        assert cmd_diagrams([p], out, RunConfig()) == 0
        doc = json.loads((out / "trichromatic_arcs.diagrams.json").read_text())
        assert len(doc["combinations"]) == 7

    def test_signature_matrix_and_manifest(self, tmp_path):
        p1 = synth_file(tmp_path, "dichromatic_arcs", n=12, seed=0)
        mat, man = tmp_path / "m.csv", tmp_path / "manifest.csv"
        assert cmd_signature([p1], mat, man, RunConfig(max_combo=2)) == 0
        rows = mat.read_text().strip().splitlines()
        width = len(rows[0].split(",")) - 1
        assert width == 2 * 44 + 146
        man_rows = man.read_text().strip().splitlines()
        assert len(man_rows) == width + 1
        assert man_rows[0] == "column_index,combo,diagram,statistic"

    def test_absent_combination_zero_filled(self, tmp_path):
        p = synth_file(tmp_path, "circle", n=12, seed=0)  # one species only
        mat = tmp_path / "m.csv"
        cfg = RunConfig(max_combo=2, species_universe=["s0", "zz"])
        assert cmd_signature([p], mat, None, cfg) == 0
        row = mat.read_text().strip().splitlines()[1].split(",")
        vals = np.array([float(v) for v in row[1:]])
        assert len(vals) == 2 * 44 + 146
        assert not vals[44:].any()  # species "zz" blocks all zero

    def test_worker_count_byte_identical(self, tmp_path):
        files = [synth_file(tmp_path, "dichromatic_arcs", n=12, seed=s) for s in (0, 1)]
        outs = []
        for wc in (1, 2):
            mat = tmp_path / f"m{wc}.csv"
            cfg = RunConfig(max_combo=2, worker_count=wc)
            assert cmd_signature(files, mat, None, cfg) == 0
            outs.append(mat.read_bytes())
        assert outs[0] == outs[1]

    def test_batch_isolation_and_exit_code(self, tmp_path):
        good = synth_file(tmp_path, "circle", n=10, seed=0)
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y,label\n0,oops,A\n")
        out = tmp_path / "o"
        rc = cmd_diagrams([good, bad], out, RunConfig(max_combo=1))
        assert rc == 1
        assert (out / "circle.diagrams.json").exists()
        assert not (out / "bad.diagrams.json").exists()

    def test_plot_svg(self, tmp_path):
        p = synth_file(tmp_path, "dichromatic_arcs", n=12, seed=0)
        out = tmp_path / "o"
        cmd_diagrams([p], out, RunConfig(max_combo=2))
        plots = tmp_path / "plots"
        rc = cmd_plot([out / "dichromatic_arcs.diagrams.json"], plots, RunConfig())
        assert rc == 0
        svgs = list(plots.glob("*.svg"))
        assert len(svgs) == 3
        body = svgs[0].read_text()
        assert body.startswith("<svg") and "<line" in body

    def test_plot_threshold_filters_markers(self, tmp_path):
        doc = {"input": "x", "input_hash": "", "config_hash": "",
               "combinations": [{"labels": [0], "k": 0,
                                 "diagrams": {"domain_deg1": [[0.0, 0.01]]}}]}
        src = tmp_path / "d.json"
        src.write_text(json.dumps(doc))
        plots = tmp_path / "p"
        assert cmd_plot([src], plots, RunConfig(plot_threshold=0.05)) == 0
        body = next(plots.glob("*.svg")).read_text()
        assert "circle" not in body  # below threshold: no finite markers

    def test_main_exit_codes(self, tmp_path):
        p = synth_file(tmp_path, "circle", n=10, seed=0)
        rc = main(["signature", str(p), "--out", str(tmp_path / "m.csv"),
                   "--max-combo", "1"])
        assert rc == 0
        rc = main(["signature", str(p), "--out", str(tmp_path / "m.csv"),
                   "--max-combo", "9"])
        assert rc == 2

    def test_cli_entry_point(self, tmp_path):
        p = synth_file(tmp_path, "circle", n=8, seed=0)
        r = subprocess.run([sys.executable, "-m", "chromasig.cli", "diagrams", str(p),
                            "--out", str(tmp_path / "out"), "--max-combo", "1"],
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
