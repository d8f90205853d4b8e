"""Command line interface: ``pcosync run|classify|certify|estimate``.

Exit status is 0 when every enabled monitor passes, 2 when one fails (or a
profile fails certification) and 1 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from . import output
from .engine import StopRule, run
from .exceptions import ConfigError
from .monitors import estimate_contraction_epsilon, estimate_first_fire_delay, monitor
from .prc import DEFAULT_GRID, check_assumption1, is_delay_advance
from .scenario import PRC_SCHEMA, _decode, bundled_scenarios, load_scenario, load_topology, \
    parse_angle, profile_from_dict

OUT_ENV = "PCOSYNC_OUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION = 0, 1, 2

log = logging.getLogger("pcosync")


def _out_dir(out: Optional[str], scenario, batch: bool) -> Path:
    explicit = out or os.environ.get(OUT_ENV)
    if explicit:
        return Path(explicit) / scenario.name if batch else Path(explicit)
    return Path(scenario.outputs.get("dir") or Path("out") / scenario.name)


def run_scenario(path: str, out: Optional[str] = None, *, t_max: Optional[float] = None,
                 sample_dt: Optional[float] = None, batch: bool = False,
                 timestamp: Optional[str] = None) -> tuple[int, dict]:
    """Run one scenario and write its events CSV, samples CSV and report JSON.

    Returns ``(exit_status, report)``.
    """
    sc = load_scenario(path)
    dest = _out_dir(out, sc, batch)
    dest.mkdir(parents=True, exist_ok=True)
    t_max = sc.t_max if t_max is None else t_max
    sample_dt = sc.sample_dt if sample_dt is None else sample_dt
    trace = run(sc.config, StopRule(t_max=t_max, max_events=sc.event_budget),
                sample_dt=sample_dt, eps_fire=sc.eps_fire)
    report = monitor(trace, sc.monitors, sync_epsilon=sc.sync_epsilon,
                     eps_geom=sc.eps_geom, eps_sync=sc.eps_sync)
    data = output.build_report(sc.name, trace, report, sc.sync_epsilon, timestamp)
    output.write_events_csv(trace, dest / sc.outputs.get("events", "events.csv"))
    if trace.samples:
        output.write_samples_csv(trace.samples, dest / sc.outputs.get("samples", "samples.csv"), sc.config.n)
    output.write_report(data, dest / sc.outputs.get("report", "report.json"))
    status = EXIT_OK if report.ok and trace.termination != "event_budget" else EXIT_VIOLATION
    return status, data


def _run_one(job):
    path, out, t_max, sample_dt, batch = job
    try:
        status, data = run_scenario(path, out, t_max=t_max, sample_dt=sample_dt, batch=batch)
    except ConfigError as exc:
        return path, EXIT_CONFIG, str(exc), None
    return path, status, None, data


def cmd_run(args) -> int:
    paths = args.scenario
    batch = len(paths) > 1
    jobs = [(p, args.out, args.t_max, args.sample_dt, batch) for p in paths]
    if batch and args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    statuses = []
    for path, status, err, data in results:
        if err:
            print(f"{path}: error: {err}", file=sys.stderr)
        else:
            failing = [c["name"] for c in data["monitors"]["checks"] if c["status"] == "fail"]
            sync = data["monitors"]["sync_time"]
            verdict = f"FAIL ({', '.join(failing)})" if failing else "ok"
            print(f"{data['scenario']}: {verdict}; "
                  f"events={data['events']} rooted={data['topology']['rooted']} "
                  f"strong={data['topology']['strongly_connected']} "
                  f"sync_time={'none' if sync is None else f'{sync:.6g}'} "
                  f"final_d={data['final_diameter']:.3g}")
        statuses.append(status)
    if EXIT_CONFIG in statuses:
        return EXIT_CONFIG
    return EXIT_VIOLATION if EXIT_VIOLATION in statuses else EXIT_OK


def cmd_classify(args) -> int:
    name, g = load_topology(args.scenario)
    s = output.topology_summary(g)
    if args.json:
        print(json.dumps({"name": name, **s}, indent=2))
    else:
        print(f"{name}: n={g.n}")
        print(f"rooted: {str(s['rooted']).lower()}")
        print(f"strongly_connected: {str(s['strongly_connected']).lower()}")
        print(f"roots: {s['roots']}")
        print(f"isolated_source_groups: {s['isolated_source_groups']}")
    return EXIT_OK


def _inline_profile(args):
    spec = {"kind": args.kind, "gain": args.gain}
    if args.value_at_pi is not None:
        spec["value_at_pi"] = args.value_at_pi
    if args.breakpoints:
        spec["breakpoints"] = json.loads(args.breakpoints)
    _decode(json.dumps(spec), PRC_SCHEMA)
    try:
        return profile_from_dict(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_certify(args) -> int:
    if args.scenario:
        profiles = list(enumerate(load_scenario(args.scenario).config.profiles, 1))
    elif args.kind:
        profiles = [(1, _inline_profile(args))]
    else:
        raise ConfigError("certify needs --scenario or --kind/--gain")
    ok = True
    for i, p in profiles:
        rep = check_assumption1(p, args.grid)
        da = is_delay_advance(p.prc, args.grid)
        ok &= rep.passed
        head = f"oscillator {i} ({p.prc.kind}, gain {p.gain:g}):"
        if rep.passed:
            print(f"{head} PASS margin={rep.margin:.6g} delay_advance={str(da.passed).lower()}")
        else:
            v = rep.first_violation
            print(f"{head} FAIL at theta={v.theta:.17g} ptc={v.value:.17g} margin={v.margin:.6g} "
                  f"({len(rep.violations)} of {rep.samples} samples) "
                  f"delay_advance={str(da.passed).lower()}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_estimate(args) -> int:
    sc = load_scenario(args.scenario)
    if args.what == "contraction":
        est = estimate_contraction_epsilon(sc.config, parse_angle(args.d1), parse_angle(args.d2),
                                           args.samples, seed=args.seed,
                                           window=None if args.window is None else parse_angle(args.window))
    else:
        est = estimate_first_fire_delay(sc.config, parse_angle(args.delta), parse_angle(args.d_star),
                                        args.samples, oscillator=args.oscillator - 1, seed=args.seed)
    print(json.dumps({"scenario": sc.name, "estimate": args.what, "seed": args.seed, **asdict(est)},
                     indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pcosync", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate scenarios and write events, samples and report")
    r.add_argument("--scenario", action="append", required=True, metavar="PATH",
                   help=f"scenario file or bundled name ({', '.join(bundled_scenarios())}); repeatable")
    r.add_argument("--out", metavar="DIR", help=f"output directory (env {OUT_ENV})")
    r.add_argument("--t-max", type=float)
    r.add_argument("--sample-dt", type=float)
    r.add_argument("--jobs", type=int, default=1, help="parallel workers for several scenarios")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("classify", help="rootedness and strong connectivity of a scenario's graph")
    c.add_argument("--scenario", required=True, metavar="PATH")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    f = sub.add_parser("certify", help="grid-check that PRC profiles never overshoot")
    f.add_argument("--scenario", metavar="PATH")
    f.add_argument("--kind")
    f.add_argument("--gain", type=float)
    f.add_argument("--value-at-pi")
    f.add_argument("--breakpoints", help="JSON list of [angle, value] pairs")
    f.add_argument("--grid", type=int, default=DEFAULT_GRID)
    f.set_defaults(func=cmd_certify)

    e = sub.add_parser("estimate", help="Monte Carlo estimates of contraction and first-fire bounds")
    e.add_argument("what", choices=["contraction", "first-fire"])
    e.add_argument("--scenario", required=True, metavar="PATH")
    e.add_argument("--samples", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--d1", default="0.1pi")
    e.add_argument("--d2", default="0.8pi")
    e.add_argument("--window", help="window length (default 3T(N-1)/2)")
    e.add_argument("--delta", default="pi/4")
    e.add_argument("--d-star", default="0.8pi")
    e.add_argument("--oscillator", type=int, default=1, help="1-based index")
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
