"""Report artifacts: delimited profile/sweep data and rendered figures.

Every artifact embeds the producing config and tool version.  CSV files
carry them as leading ``#`` comment lines, JSON artifacts as top-level
fields.  Scalar formatting is full round-trip precision with a '.'
decimal, so artifacts from identical configs are byte-identical and
regression-diffable.

Figures are rendered with the Agg backend next to the delimited output:
the CSV remains the machine-readable record, the PNG is the same data
for eyes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from . import __version__
from .basis import BasisProfile
from .separation import SeparationCertificate
from .vectors import Scalar


def format_scalar(x: Scalar) -> str:
    if isinstance(x, bool):
        raise ValueError(f"boolean is not a scalar: {x!r}")
    if isinstance(x, (int, Fraction)):
        return str(x)
    return repr(float(x))


def config_line(config: Mapping[str, Any]) -> str:
    return json.dumps(dict(config), sort_keys=True, separators=(",", ":"),
                      default=str)


def artifact_comments(config: Mapping[str, Any]) -> list[str]:
    return [f"# banachlab {__version__}",
            f"# config: {config_line(config)}"]


def _csv_text(config: Mapping[str, Any], header: Sequence[str],
              rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    for line in artifact_comments(config):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def profile_csv_text(prof: BasisProfile, config: Mapping[str, Any]) -> str:
    """Columns n, proj_norm, tail_norm, certified; one row per cut n."""
    rows = [[k, format_scalar(pn), format_scalar(tn),
             str(prof.certified).lower()]
            for k, (pn, tn) in enumerate(zip(prof.proj_norms, prof.tail_norms),
                                         start=1)]
    return _csv_text(config, ["n", "proj_norm", "tail_norm", "certified"], rows)


def sweep_csv_text(dims: Sequence[int], certs: Sequence[SeparationCertificate],
                   config: Mapping[str, Any]) -> str:
    """Columns dim, separation, claimed, certified, exact; one row per dim."""
    rows = [[d, format_scalar(c.separation), format_scalar(c.claimed_separation),
             str(c.certified).lower(), str(c.exact).lower()]
            for d, c in zip(dims, certs)]
    return _csv_text(config, ["dim", "separation", "claimed", "certified",
                              "exact"], rows)


def table_csv_text(header: Sequence[str], rows: Sequence[Sequence[Scalar]],
                   config: Mapping[str, Any]) -> str:
    out = [[v if isinstance(v, str) else format_scalar(v) for v in row]
           for row in rows]
    return _csv_text(config, header, out)


def write_text(path: str, text: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def write_json_artifact(path: str, payload: Mapping[str, Any],
                        config: Mapping[str, Any]) -> None:
    doc = {"version": __version__, "config": dict(config)}
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2, default=str) + "\n")


def render_series_png(path: str, xs: Sequence[float],
                      series: Mapping[str, Sequence[float]],
                      xlabel: str, ylabel: str, title: str = "",
                      hline: float | None = None) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    markers = ["o-", "s--", "^:", "d-."]
    for k, (name, ys) in enumerate(series.items()):
        ax.plot(list(xs)[:len(ys)], [float(y) for y in ys],
                markers[k % len(markers)], label=name)
    if hline is not None:
        ax.axhline(hline, color="gray", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_profile_png(path: str, prof: BasisProfile, title: str = "") -> None:
    ns = list(range(1, len(prof.proj_norms) + 1))
    render_series_png(path, ns,
                      {"proj norm": [float(v) for v in prof.proj_norms],
                       "tail norm": [float(v) for v in prof.tail_norms]},
                      "n", "norm", title, hline=1.0)


def render_sweep_png(path: str, dims: Sequence[int],
                     certs: Sequence[SeparationCertificate],
                     title: str = "") -> None:
    render_series_png(path, list(dims),
                      {"separation lower bound":
                       [float(c.separation) for c in certs]},
                      "dimension", "separation", title, hline=2.0)


def render_trace_png(path: str, proj_norms: Sequence[float],
                     epsilons: Sequence[float], title: str = "") -> None:
    """Diagonal profile against its 1 + epsilon_k ceilings."""
    ks = list(range(1, len(proj_norms) + 1))
    ceil = [1 + float(epsilons[k - 1]) for k in ks if k - 1 < len(epsilons)]
    render_series_png(path, ks,
                      {"proj norm": [float(v) for v in proj_norms],
                       "1 + eps ceiling": ceil},
                      "k", "norm", title, hline=1.0)
