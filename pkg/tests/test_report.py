"""Delimited-output and figure-rendering helpers."""

from __future__ import annotations

import json
from fractions import Fraction

from banachlab import FiniteBasicSequence, Lp, profile, symmetric_separation
from banachlab.report import (
    artifact_comments,
    config_line,
    format_scalar,
    profile_csv_text,
    render_profile_png,
    render_series_png,
    render_sweep_png,
    sweep_csv_text,
    table_csv_text,
    write_json_artifact,
    write_text,
)

from conftest import ev

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_format_scalar():
    assert format_scalar(3) == "3"
    assert format_scalar(Fraction(3, 2)) == "3/2"
    assert format_scalar(Fraction(4, 2)) == "2"
    assert format_scalar(0.1) == repr(0.1)
    assert float(format_scalar(1 / 3)) == 1 / 3  # repr round-trips


def test_config_line_is_sorted_compact_json():
    line = config_line({"b": 2, "a": "x"})
    assert line == '{"a":"x","b":2}'
    assert json.loads(line) == {"a": "x", "b": 2}


def test_artifact_comments_carry_version_and_config():
    lines = artifact_comments({"k": 4})
    assert lines[0].startswith("# banachlab ")
    assert lines[1] == '# config: {"k":4}'


def test_profile_csv_text():
    seq = FiniteBasicSequence((ev(1), ev(2), ev(3)), Lp(1))
    prof = profile(seq)
    text = profile_csv_text(prof, {"space": "lp:1"})
    lines = text.splitlines()
    assert lines[0].startswith("# banachlab")
    assert "n,proj_norm,tail_norm,certified" in lines
    data = [l for l in lines if not l.startswith("#")][1:]
    assert data[0] == "1,1,1,true"
    assert len(data) == 2


def test_sweep_csv_text():
    cert = symmetric_separation(Lp(1), [ev(1), ev(2)])
    text = sweep_csv_text([4], [cert], {"k": 2})
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0] == "dim,separation,claimed,certified,exact"
    assert lines[1].startswith("4,2,2,")


def test_table_csv_text_quotes_safely():
    text = table_csv_text(["a", "b"], [["x,y", 1], ["plain", Fraction(1, 2)]], {})
    rows = [l for l in text.splitlines() if not l.startswith("#")]
    assert rows[0] == "a,b"
    assert rows[1] == '"x,y",1'
    assert rows[2] == "plain,1/2"


def test_write_text_and_json_artifact(tmp_path):
    p = tmp_path / "t.csv"
    write_text(str(p), "x\n")
    assert p.read_text() == "x\n"
    jp = tmp_path / "a.json"
    write_json_artifact(str(jp), {"value": Fraction(1, 2)}, {"cmd": "norm"})
    doc = json.loads(jp.read_text())
    assert doc["value"] == "1/2"
    assert doc["config"] == {"cmd": "norm"}
    assert "version" in doc


def test_render_series_png(tmp_path):
    p = tmp_path / "s.png"
    render_series_png(str(p), [1, 2, 3], {"one": [1.0, 1.1, 1.2]},
                      xlabel="n", ylabel="v", title="t", hline=1.0)
    assert p.read_bytes()[:8] == PNG_MAGIC


def test_render_profile_and_sweep_png(tmp_path):
    seq = FiniteBasicSequence((ev(1), ev(2), ev(3)), Lp(1))
    prof = profile(seq)
    pp = tmp_path / "p.png"
    render_profile_png(str(pp), prof)
    assert pp.read_bytes()[:8] == PNG_MAGIC

    cert = symmetric_separation(Lp(1), [ev(1), ev(2)])
    sp = tmp_path / "w.png"
    render_sweep_png(str(sp), [2, 3], [cert, cert])
    assert sp.read_bytes()[:8] == PNG_MAGIC
