"""CSV and JSON writers for traces and reports.

Floats are written with 17 significant digits so every double round-trips.
Node indices are 1-based in all files.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
from pathlib import Path
from typing import Optional

from .engine import Trace
from .monitors import MonitorReport
from .phase import diameter
from .prc import check_assumption1, is_delay_advance
from .topology import Topology, is_rooted, is_strongly_connected, isolated_source_groups, roots


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_events_csv(trace: Trace, path: Path) -> None:
    n = trace.config.n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "firing"] + [f"pre_{i + 1}" for i in range(n)] + [f"post_{i + 1}" for i in range(n)])
        for e in trace.events:
            w.writerow([fmt(e.t), ";".join(str(i + 1) for i in e.firing)]
                       + [fmt(p) for p in e.pre] + [fmt(p) for p in e.post])


def write_samples_csv(samples, path: Path, n: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"theta_{i + 1}" for i in range(n)] + ["d"])
        for t, phases in samples:
            w.writerow([fmt(t)] + [fmt(p) for p in phases] + [fmt(diameter(phases))])


def topology_summary(g: Topology) -> dict:
    return {
        "n": g.n,
        "rooted": is_rooted(g),
        "strongly_connected": is_strongly_connected(g),
        "roots": sorted(i + 1 for i in roots(g)),
        "isolated_source_groups": [sorted(i + 1 for i in grp) for grp in isolated_source_groups(g)],
    }


def certification_summary(profiles) -> list[dict]:
    out = []
    for i, p in enumerate(profiles):
        rep = check_assumption1(p)
        da = is_delay_advance(p.prc)
        v = rep.first_violation
        out.append({
            "oscillator": i + 1,
            "kind": p.prc.kind,
            "gain": p.gain,
            "certified": rep.passed,
            "margin": rep.margin,
            "first_violation": None if v is None else {"theta": v.theta, "ptc": v.value, "margin": v.margin},
            "delay_advance": da.passed,
        })
    return out


def build_report(name: str, trace: Trace, report: MonitorReport, sync_epsilon: float,
                 timestamp: Optional[str] = None) -> dict:
    cfg = trace.config
    return {
        "scenario": name,
        "generated_at": timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "n": cfg.n,
        "omega": cfg.omega,
        "period": cfg.period,
        "termination": trace.termination,
        "t_end": trace.t_end,
        "events": len(trace.events),
        "initial_diameter": diameter(cfg.initial_phases),
        "final_diameter": diameter(trace.phases_at(trace.t_end)),
        "topology": topology_summary(cfg.topology),
        "certification": certification_summary(cfg.profiles),
        "sync_epsilon": sync_epsilon,
        "synchronized": report.sync_time is not None,
        "all_monitors_pass": report.ok,
        "monitors": report.to_dict(),
    }


def write_report(data: dict, path: Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
