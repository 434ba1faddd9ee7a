"""End-to-end command-line behavior: printed output, exit codes, artifacts."""

from __future__ import annotations

import json

import pytest

from banachlab import __version__
from banachlab.cli import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# ------------------------------------------------------------------ norm


def test_norm_prints_value(capsys):
    code, out, err = run(capsys, "norm",
                         "--space", '{"space":"lp","p":1}',
                         "--vec", '{"coords":[[1,1],[2,1]]}')
    assert code == 0
    assert out.strip() == "2"
    assert err == ""


def test_norm_space_shorthand(capsys):
    code, out, _ = run(capsys, "norm", "--space", "lp:inf",
                       "--vec", '{"coords":[[1,1],[2,-1]]}')
    assert code == 0
    assert out.strip() == "1"


def test_norm_exact_fraction_output(capsys):
    vec = json.dumps({"coords": [[i, 1] for i in range(1, 6)]})
    code, out, _ = run(capsys, "norm", "--space", "tsirelson-T",
                       "--vec", vec, "--exact")
    assert code == 0
    assert out.strip() == "3/2"


def test_norm_renormed_space(capsys):
    code, out, _ = run(capsys, "norm", "--space", "lp:1",
                       "--renorm", '{"renorm":"diagonal","weights":[[1,"5/4"]]}',
                       "--vec", '{"coords":[[1,1]]}')
    assert code == 0
    assert out.strip() == "5/4"


def test_norm_artifact_embeds_config_and_version(capsys, tmp_path):
    out_path = tmp_path / "norm.json"
    code, out, _ = run(capsys, "norm", "--space", "lp:2",
                       "--vec", '{"coords":[[1,"3/5"],[2,"4/5"]]}',
                       "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["version"] == __version__
    assert doc["config"]["command"] == "norm"
    assert doc["config"]["space"] == "lp:2"
    assert doc["value"] == pytest.approx(1.0)
    assert doc["certified"] is True


def test_vec_from_file(capsys, tmp_path):
    vf = tmp_path / "v.json"
    vf.write_text('{"coords": [[3, "-7/2"]]}')
    code, out, _ = run(capsys, "norm", "--space", "lp:1", "--vec", str(vf))
    assert code == 0
    assert out.strip() == "7/2"


# ------------------------------------------------------------ exit codes


def test_invalid_space_exits_2(capsys):
    code, _, err = run(capsys, "norm", "--space", "lp:0.5",
                       "--vec", '{"coords":[[1,1]]}')
    assert code == 2
    assert err.startswith("error:")


def test_malformed_vec_exits_2(capsys):
    code, _, err = run(capsys, "norm", "--space", "lp:1",
                       "--vec", '{"coords":[[1,"x"]]}')
    assert code == 2
    assert "coords" in err


def test_support_cap_exits_3(capsys):
    code, _, err = run(capsys, "norm", "--space", "tsirelson-T",
                       "--vec", '{"coords":[[40,1]]}')
    assert code == 3
    assert err.startswith("error:")


def test_plot_without_out_exits_2(capsys):
    code, _, err = run(capsys, "profile", "--space", "lp:2",
                       "--vecs", '[{"coords":[[1,1]]},{"coords":[[2,1]]}]',
                       "--plot")
    assert code == 2
    assert "--out" in err


def test_bad_geometric_ratio_exits_2(capsys):
    code, _, err = run(capsys, "select", "--source", "orthonormal-l2",
                       "--epsilons", "geometric:1.5")
    assert code == 2
    assert "(0, 1)" in err


# --------------------------------------------------------------- profile


def test_profile_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "profile", "--space", "lp:2",
                       "--vecs", '[{"coords":[[1,1]]},{"coords":[[2,1]]}]')
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# banachlab ")
    assert lines[1].startswith("# config: ")
    assert lines[2] == "n,proj_norm,tail_norm,certified"
    assert lines[3] == "1,1,1,true"


def test_profile_plot_renders_png(capsys, tmp_path):
    out_path = tmp_path / "prof.csv"
    code, _, _ = run(capsys, "profile", "--space", "lp:1",
                     "--vecs", '[{"coords":[[1,1]]},{"coords":[[2,1]]}]',
                     "--out", str(out_path), "--plot")
    assert code == 0
    assert out_path.read_text().splitlines()[2] == "n,proj_norm,tail_norm,certified"
    png = tmp_path / "prof.png"
    assert png.read_bytes()[:8] == PNG_MAGIC


# ---------------------------------------------------------------- select


def test_select_writes_trace_profile_and_figure(capsys, tmp_path):
    out_path = tmp_path / "trace.json"
    code, out, _ = run(capsys, "select", "--source", "perturbed-l2",
                       "--stages", "3", "--out", str(out_path), "--plot")
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert set(doc) >= {"version", "config", "rows", "diagonal",
                        "margins", "epsilons"}
    assert len(doc["diagonal"]) == 3
    prof_csv = tmp_path / "trace.profile.csv"
    assert "proj_norm" in prof_csv.read_text()
    assert (tmp_path / "trace.png").read_bytes()[:8] == PNG_MAGIC


def test_select_stdout_contains_trace_and_profile(capsys):
    code, out, _ = run(capsys, "select", "--source", "orthonormal-l2",
                       "--stages", "2")
    assert code == 0
    assert '"diagonal"' in out
    assert "n,proj_norm,tail_norm,certified" in out


# -------------------------------------------------------------- separate


def test_separate_exact_certificate_from_file(capsys, tmp_path):
    vecs_file = tmp_path / "basis_2_to_8.json"
    vecs_file.write_text(json.dumps(
        [{"coords": [[i, 1]]} for i in range(2, 9)]))
    art = tmp_path / "cert.json"
    code, out, _ = run(capsys, "separate", "--space", "tsirelson-Tstar",
                       "--vecs", str(vecs_file), "--exact", "--out", str(art))
    assert code == 0
    assert out.strip() == "separation 2 exact=True certified=True"
    doc = json.loads(art.read_text())
    assert doc["separation"] == 2
    assert doc["certified"] is True
    assert all(entry[2] == 2 for entry in doc["pairs"])


def test_separate_stdout_json(capsys):
    code, out, _ = run(capsys, "separate", "--space", "lp:1",
                       "--vecs", '[{"coords":[[1,1]]},{"coords":[[2,1]]}]')
    assert code == 0
    doc = json.loads(out)
    assert doc["separation"] == 2
    assert doc["exact"] is True


# ---------------------------------------------------------------- renorm


def test_renorm_report_sandwich(capsys):
    code, out, _ = run(capsys, "renorm", "--space", "lp:1",
                       "--renorm", '{"renorm":"diagonal","weights":[[1,"5/4"]]}',
                       "--vecs", '[{"coords":[[1,1]]},{"coords":[[2,1]]}]')
    assert code == 0
    doc = json.loads(out)
    assert doc["norms"][0]["renormed_norm"] == "5/4"
    assert doc["norms"][1]["renormed_norm"] == 1
    assert doc["sandwich"] == {"lo": 1.0, "hi": 1.25}
    assert doc["premise"] is None


def test_renorm_premise_report_for_biorthogonal_kind(capsys, tmp_path):
    spec = json.dumps({
        "renorm": "max-biortho",
        "epsilon": "1/10",
        "functionals": [{"coords": [[i, 1]]} for i in range(1, 4)],
    })
    art = tmp_path / "renorm.json"
    code, out, _ = run(capsys, "renorm", "--space", "lp:1", "--renorm", spec,
                       "--vecs", '[{"coords":[[1,1],[2,-1]]}]',
                       "--out", str(art))
    assert code == 0
    assert "sandwich" in out
    doc = json.loads(art.read_text())
    assert doc["premise"]["ok"] is True
    assert doc["premise"]["worst_ratio"] <= 1.1


# --------------------------------------------------------------- kottman


def test_kottman_single_dim_artifact(capsys, tmp_path):
    art = tmp_path / "kottman.json"
    code, out, _ = run(capsys, "kottman", "--space", "lp:1", "--k", "3",
                       "--dim", "3", "--budget", "1", "--out", str(art))
    assert code == 0
    assert out.strip() == "separation 2 exact=True"
    doc = json.loads(art.read_text())
    assert doc["separation"] == 2
    assert len(doc["vectors"]) == 3


def test_kottman_sweep_csv_and_figure(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "kottman", "--space", "lp:1", "--k", "2",
                     "--dim", "2,3", "--budget", "1",
                     "--out", str(out_path), "--plot")
    assert code == 0
    lines = [l for l in out_path.read_text().splitlines()
             if not l.startswith("#")]
    assert lines[0] == "dim,separation,claimed,certified,exact"
    assert lines[1].startswith("2,2,2,")
    assert lines[2].startswith("3,2,2,")
    assert (tmp_path / "sweep.png").read_bytes()[:8] == PNG_MAGIC


def test_kottman_bad_dim_list_exits_2(capsys):
    code, _, err = run(capsys, "kottman", "--space", "lp:1", "--k", "2",
                       "--dim", "2,x")
    assert code == 2
    assert "--dim" in err


# -------------------------------------------------------- tsirelson table


def test_tsirelson_table_exact_values(capsys):
    code, out, _ = run(capsys, "tsirelson-table", "--dim", "5")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "n,t_norm,tstar_norm"
    assert lines[1] == "1,1,1"
    assert lines[4] == "4,1,4"
    assert lines[5] == "5,3/2,4"


def test_tsirelson_table_rejects_nonpositive_dim(capsys):
    code, _, err = run(capsys, "tsirelson-table", "--dim", "0")
    assert code == 2
    assert "at least 1" in err


# ------------------------------------------------------- reproducibility


def test_artifacts_byte_identical_across_worker_counts(capsys, tmp_path,
                                                       monkeypatch):
    art = tmp_path / "kottman.json"

    def run_with(threads: str) -> bytes:
        monkeypatch.setenv("BANACHLAB_THREADS", threads)
        code, _, _ = run(capsys, "kottman", "--space", "lp:1.5", "--k", "3",
                         "--dim", "4", "--budget", "2", "--seed", "7",
                         "--out", str(art))
        assert code == 0
        return art.read_bytes()

    serial = run_with("1")
    parallel = run_with("4")
    assert serial == parallel


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert f"banachlab {__version__}" in capsys.readouterr().out
