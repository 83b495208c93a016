import json
import subprocess
import sys

import pytest

from polyspec.cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, build_parser, main
from polyspec.corpus import corpus_path

SUBCOMMANDS = ["validate", "imbalance", "ft-eval", "ft-slice", "zeros", "translation-numbers", "certificate",
               "pack", "density", "tiling-check", "spectral-probe", "corpus-verify"]


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "--seed" in capsys.readouterr().out


def test_parser_lists_all_subcommands():
    text = build_parser().format_help()
    for cmd in SUBCOMMANDS:
        assert cmd in text


def test_imbalance_output(tmp_path, capsys):
    path = str(corpus_path("triangle"))
    assert main(["imbalance", "--polytope", path, "--xi", "1,0", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "imbalance -1" in out and "applicable true" in out
    report = json.loads((tmp_path / "imbalance-triangle.json").read_text())
    assert report["schema_version"] == 1
    assert report["tolerances"]["zero"] == 1e-9
    assert (tmp_path / "imbalance-triangle.meta.json").exists()


def test_exit_codes(tmp_path, capsys):
    out = ["--out", str(tmp_path), "--no-plot"]
    assert main(["imbalance", "--polytope", "triangle", "--xi", "1,x", *out]) == EXIT_PARSE
    assert main(["imbalance", "--polytope", "no-such-thing", "--xi", "1,0", *out]) == EXIT_PARSE
    assert main(["imbalance", "--polytope", "triangle", "--xi", "1,1", *out]) == EXIT_VALIDATION
    assert main(["certificate", "--polytope", "cube2", "--xi", "1,0", *out]) == EXIT_VALIDATION
    assert main(["certificate", "--polytope", "triangle", "--xi", "1,0", "--epsilon", "one", *out]) == EXIT_PARSE
    assert main(["imbalance", "--polytope", "triangle", "--xi", "1,0", "--tol", "zero=5", *out]) == EXIT_VALIDATION
    assert main(["imbalance", "--polytope", "triangle", "--xi", "1,0", "--tol", "bogus", *out]) == EXIT_PARSE
    assert main(["zeros", "--polytope", "cube2", "--window", "0.1,0.1,0.4,0.4", *out]) == EXIT_INCONCLUSIVE
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]],
                               "faces": [[0, 1], [1, 2], [2, 3]]}))
    assert main(["validate", "--polytope", str(bad), *out]) == EXIT_VALIDATION


def test_tolerance_override_is_recorded(tmp_path):
    main(["imbalance", "--polytope", "triangle", "--xi", "1,0", "--tol", "imbalance=1e-4", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "imbalance-triangle.json").read_text())
    assert report["tolerances"]["imbalance"] == 1e-4


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("POLYSPEC_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["corpus-verify"]) == EXIT_OK
    assert (tmp_path / "env" / "corpus-verify.json").exists()


def test_pipeline_commands_write_artifacts(tmp_path):
    o = ["--out", str(tmp_path)]
    assert main(["ft-eval", "--polytope", "pentagon", "--eta", "0.5,1", "--method", "both", *o]) == EXIT_OK
    assert main(["ft-slice", "--polytope", "pentagon", "--xi", "0,1", "--t-max", "20", *o]) == EXIT_OK
    assert main(["translation-numbers", "--polytope", "pentagon", "--xi", "0,1", *o]) == EXIT_OK
    assert main(["zeros", "--polytope", "cube2", "--ray", "1,0", "--t-max", "3", *o]) == EXIT_OK
    assert main(["pack", "--polytope", "triangle", "--window", "10", "--seeds", "2", *o]) == EXIT_OK
    assert main(["density", "--points", str(tmp_path / "pack-triangle-points.json"), "--radii", "1,2", *o]) == EXIT_OK
    assert main(["tiling-check", "--tile", "rect2x1", "--lattice", "2,1", "--region", "0,0,5,5", *o]) == EXIT_OK
    assert main(["spectral-probe", "--polytope", "cube2", "--window=-10,-10,10,10", *o]) == EXIT_OK
    for name in ["ft-slice-pentagon.png", "ft-slice-pentagon.csv", "translation-numbers-pentagon-wave.csv",
                 "zeros-cube2.csv", "pack-triangle.png", "density.csv", "tiling-check-rect2x1-histogram.csv"]:
        assert (tmp_path / name).exists(), name
    tiling = json.loads((tmp_path / "tiling-check-rect2x1.json").read_text())
    assert tiling["check"]["verdict"] == "tiles" and tiling["density_identity"]["passed"]
    header = (tmp_path / "translation-numbers-pentagon-wave.csv").read_text().splitlines()[1]
    assert header == "t,re_f,im_f"


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "polyspec.cli", "validate", "--polytope", "notched",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "notched: valid" in proc.stdout


def test_determinism_in_process(tmp_path):
    args = ["pack", "--polytope", "notched", "--window", "8", "--seeds", "2", "--no-plot"]
    main([*args, "--out", str(tmp_path / "a")])
    main([*args, "--out", str(tmp_path / "b")])
    for name in ("pack-notched.json", "pack-notched.csv", "pack-notched-points.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
