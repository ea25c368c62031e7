"""Report rows and writers: CSV, JSON, text summary, all byte-stable.

Floats are rounded to 12 significant digits before serialization so that
repeated runs of the same scenario produce identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .detector import SessionReport
from .protocol import agent_name
from .scenario import Scenario
from .session import run_session


def round12(x: Optional[float]) -> Optional[float]:
    if x is None:
        return None
    if isinstance(x, float) and math.isfinite(x):
        return float(format(x, ".12g"))
    return x


@dataclass
class ReportRow:
    """One replicate's metrics; flattens per-agent stats for CSV columns."""

    scenario_id: str
    replicate: int
    seed: int
    session: SessionReport

    def as_dict(self) -> dict:
        rep = self.session
        row: dict[str, object] = {
            "scenario_id": self.scenario_id,
            "replicate": self.replicate,
            "seed": self.seed,
            "rounds": rep.rounds,
            "control_rounds": rep.control_rounds,
            "message_rounds": rep.message_rounds,
            "leakage": round12(rep.leakage),
            "check_pass_rate": round12(rep.check_pass_rate),
            "decode_accuracy": round12(rep.decode_accuracy),
            "covert_messages": rep.covert_messages,
            "flagged": rep.flagged,
        }
        for k in range(1, rep.n_agents + 1):
            agent = agent_name(k)
            freq = rep.frequency_tests[agent]
            chi = rep.chisquare_tests[agent]
            row[f"{agent}_h_freq"] = round12(rep.agent_h_freq[agent])
            row[f"{agent}_p_binomial"] = round12(freq.p_value)
            row[f"{agent}_p_chisquare"] = round12(chi.p_value)
            row[f"{agent}_flagged"] = freq.flagged
        return row


def run_scenario(scenario: Scenario, out_dir: Optional[Path] = None,
                 figures: bool = True) -> list[ReportRow]:
    """Run every replicate (seeds seed, seed+1, ...) and optionally write reports."""
    scenario.validate()
    rows = []
    for i in range(scenario.replicates):
        cfg = replace(scenario.protocol, seed=scenario.protocol.seed + i)
        session = run_session(cfg, scenario.attack, scenario.p_legal, scenario.alpha)
        rows.append(ReportRow(scenario.scenario_id, i, cfg.seed, session))
    if out_dir is not None:
        write_reports(scenario, rows, Path(out_dir), figures=figures)
    return rows


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def render_csv(rows: list[ReportRow]) -> str:
    if not rows:
        raise ValueError("no rows to render")
    dicts = [r.as_dict() for r in rows]
    header = list(dicts[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for d in dicts:
        writer.writerow([_csv_cell(d[k]) for k in header])
    return buf.getvalue()


def summarize_rows(rows: list[ReportRow]) -> dict:
    """Means, standard deviations (population) and detection rate per scenario."""
    if not rows:
        raise ValueError("no rows to summarize")
    by_id: dict[str, list[ReportRow]] = {}
    for r in rows:
        by_id.setdefault(r.scenario_id, []).append(r)

    def stats(values):
        vals = [v for v in values if v is not None]
        if not vals:
            return None, None
        mean = sum(vals) / len(vals)
        var = sum((v - mean) ** 2 for v in vals) / len(vals)
        return round12(mean), round12(math.sqrt(var))

    summary = {}
    for sid, group in by_id.items():
        last_agent = agent_name(group[0].session.n_agents)
        leak_m, leak_s = stats(r.session.leakage for r in group)
        pass_m, pass_s = stats(r.session.check_pass_rate for r in group)
        h_m, h_s = stats(r.session.agent_h_freq[last_agent] for r in group)
        summary[sid] = {
            "replicates": len(group),
            "leakage_mean": leak_m,
            "leakage_std": leak_s,
            "check_pass_rate_mean": pass_m,
            "check_pass_rate_std": pass_s,
            "h_freq_mean": h_m,
            "h_freq_std": h_s,
            "detection_rate": round12(
                sum(1 for r in group if r.session.flagged) / len(group)
            ),
        }
    return summary


_SUMMARY_COLS = [
    ("replicates", "reps"),
    ("leakage_mean", "leakage"),
    ("leakage_std", "leak_sd"),
    ("check_pass_rate_mean", "pass"),
    ("check_pass_rate_std", "pass_sd"),
    ("h_freq_mean", "h_freq"),
    ("h_freq_std", "h_sd"),
    ("detection_rate", "detect"),
]


def render_summary_text(summary: dict) -> str:
    """Fixed-width table of per-scenario aggregates."""
    id_w = max([len("scenario")] + [len(s) for s in summary])
    lines = ["scenario".ljust(id_w) + "  " + "  ".join(h.rjust(8) for _, h in _SUMMARY_COLS)]
    for sid, vals in summary.items():
        cells = []
        for key, _ in _SUMMARY_COLS:
            v = vals[key]
            if v is None:
                cells.append("-".rjust(8))
            elif isinstance(v, int):
                cells.append(str(v).rjust(8))
            else:
                cells.append(format(v, ".4f").rjust(8))
        lines.append(sid.ljust(id_w) + "  " + "  ".join(cells))
    return "\n".join(lines) + "\n"


def render_json(scenario: Scenario, rows: list[ReportRow]) -> str:
    from .scenario import emit_scenario  # local import to avoid cycle at module load

    payload = {
        "scenario": {
            "id": scenario.scenario_id,
            "config": emit_scenario(scenario).rstrip("\n").split("\n"),
        },
        "rows": [r.as_dict() for r in rows],
        "summary": summarize_rows(rows),
    }
    return json.dumps(payload, indent=2) + "\n"


def write_reports(scenario: Scenario, rows: list[ReportRow], out_dir: Path,
                  figures: bool = True) -> list[Path]:
    """Write report.csv / report.json / summary.txt (and figures) into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        csv_path = out_dir / "report.csv"
        csv_path.write_text(render_csv(rows), encoding="utf-8")
        written.append(csv_path)
        json_path = out_dir / "report.json"
        json_path.write_text(render_json(scenario, rows), encoding="utf-8")
        written.append(json_path)
        txt_path = out_dir / "summary.txt"
        txt_path.write_text(render_summary_text(summarize_rows(rows)), encoding="utf-8")
        written.append(txt_path)
    except OSError as exc:
        raise OSError(f"cannot write reports under {out_dir}: {exc}") from exc
    if figures:
        from . import figures as figmod

        written.extend(figmod.render_all(rows, out_dir))
    return written
