"""
Stacked Pancake Lab CLI
gen | evolve | classify | shoot | stack | study | diagnose
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from pancake_lab.barriers import (
    BarrierKind,
    avoidance_check,
    catenoid_barrier,
    pancake_slab,
    round_profile,
    sphere_barrier,
)
from pancake_lab.config import ProfileKind, RunConfig, check_seedless, load_config, preset, validated
from pancake_lab.curve_core import ProfileGraph, Region, read_snapshot, write_snapshot
from pancake_lab.curve_core.io import FLOAT_FORMAT
from pancake_lab.diagnostics import (
    area_rate_check,
    catenoid_crossing_check,
    existence_time_check,
    extract_series,
    inscribed_sphere_radius,
    monotone_checks,
    neck_boundedness_check,
    slab_containment,
    symmetry_defect,
)
from pancake_lab.errors import BarrierError, ConfigError, DiagnosticsError, PancakeLabError
from pancake_lab.flow_engine import EventProcessor, FlowEngine
from pancake_lab.pancake_model import make_dumbbell
from pancake_lab.run_manager import (
    RunManager,
    dump_json,
    load_shoot_result,
    load_trace,
    write_shoot_result,
    write_trace,
)
from pancake_lab.stack_shooter import StackShooter, convergence_study

logger = logging.getLogger("pancake_lab.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# ==================== CONFIG ====================

def resolve_config(args: argparse.Namespace) -> RunConfig:
    """--config, else --preset, else defaults; --m/--rho/--s override the profile section"""
    if args.config:
        config = load_config(args.config)
    elif args.preset:
        config = preset(args.preset)
    else:
        config = RunConfig()

    profile = {}
    if getattr(args, 'm', None) is not None:
        profile['m'] = args.m
        profile['rho'] = None
    if getattr(args, 'rho', None) is not None:
        profile['rho'] = args.rho
        profile['m'] = None
    if getattr(args, 's', None) is not None:
        profile['s'] = args.s
    if profile:
        data = config.model_dump(mode='json')
        data['profile'].update(profile)
        config = validated(data)
    return config


def output_root(args: argparse.Namespace, config: RunConfig) -> Path:
    return Path(args.out) if args.out else Path(config.output_dir)


# ==================== INITIAL DATA ====================

def initial_profile(config: RunConfig) -> Tuple[ProfileGraph, dict]:
    """Initial curve of the configured kind plus manifest metadata"""
    p = config.profile
    spacing = config.flow.spacing
    if p.kind is ProfileKind.SPHERE:
        return round_profile(0.0, p.radius, spacing), {'kind': 'sphere', 'radius': p.radius}
    if p.kind is ProfileKind.CYLINDER:
        count = int(np.ceil(2.0 * p.half_length / spacing)) + 1
        x = np.linspace(-p.half_length, p.half_length, count)
        curve = ProfileGraph(x, np.full_like(x, p.radius), (False, False))
        return curve, {'kind': 'cylinder', 'radius': p.radius, 'half_length': p.half_length}
    if p.kind is ProfileKind.DUMBBELL:
        joined = make_dumbbell(p.radius, p.dumbbell_m, spacing, config.pancake.gap_half)
        return joined.curve, {'kind': 'dumbbell', 'radius': p.radius, **joined.to_dict()}

    shooter = StackShooter(config)
    if p.rho is not None:
        joined = shooter.joined_profile(p.s, rho=p.rho)
    else:
        m = 0.5 * config.pancake_spec(p.s).girth_g if p.m is None else p.m
        joined = shooter.joined_profile(p.s, m=m)
    meta = {'kind': 'stacked', 's': p.s, 'pancake': config.pancake_spec(p.s).to_dict(), **joined.to_dict()}
    return joined.curve, meta


# ==================== COMMANDS ====================

def cmd_gen(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    run = manager.create_run('gen')
    curve, meta = initial_profile(config)
    write_snapshot(run / 'initial.csv', curve)
    manager.write_manifest(run, 'gen', {'initial': meta, 'nodes': curve.size})
    print(f"✅ Initial profile written to {run} ({curve.size} nodes)")
    if 'm_achieved' in meta:
        print(f"   m_achieved = {meta['m_achieved']:.9g}")
    return EXIT_OK


def cmd_evolve(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    run = manager.create_run('evolve')
    if args.input:
        curve = read_snapshot(args.input)
        meta = {'input': Path(args.input).name}
    else:
        curve, meta = initial_profile(config)

    print("🔬 Evolving...")
    trace = FlowEngine(config.flow).evolve(curve)
    write_trace(run, trace)
    manager.write_manifest(run, 'evolve', {
        'initial': meta,
        'extinction_time': trace.extinction_time,
        'stop_reason': trace.stop_reason,
        'final_status': trace.final.status.value,
        'events': {k: len(v) for k, v in EventProcessor.categorize_events(trace.events).items()},
    })
    print(f"✅ Trace written to {run} ({len(trace.snapshots)} snapshots, stop: {trace.stop_reason})")
    if trace.extinction_time is not None:
        print(f"   extinction at t = {trace.extinction_time:.6g}")
    return EXIT_OK


def cmd_classify(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    run = manager.create_run('classify')
    s = config.profile.s
    girth = config.pancake_spec(s).girth_g
    m = config.profile.m if config.profile.m is not None else 0.5 * girth
    result = StackShooter(config).classify(m, s)
    dump_json(run / 'classify.json', result.to_dict())
    manager.write_manifest(run, 'classify', {'s': s, 'classification': result.to_dict()})
    print(f"✅ s={s:g} m={m:.9g}: {result.label.value}")
    return EXIT_OK


def cmd_shoot(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    s = config.profile.s if args.s is not None else config.shoot.schedule[0]
    run = manager.create_run(f"shoot_{s:g}")
    shooter = StackShooter(config)
    print(f"🎯 Bisecting s={s:g}...")
    result = shooter.bisect(s)
    if args.build:
        result = shooter.build_old_flow(0, [s], result=result)
    write_shoot_result(run, result)
    manager.write_manifest(run, 'shoot', {'s': s, 'm_star': result.m_star, 'width': result.width})
    print(f"✅ m* = {result.m_star:.9g} (bracket width {result.width:.3g}, {result.iterations} iterations)")
    if result.anomalies:
        print(f"⚠️  classification not monotone: {result.anomalies}")
    for note in result.notes:
        print(f"⚠️  {note}")
    return EXIT_OK


def cmd_stack(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    root = manager.create_run('stack')
    print(f"🥞 Building {len(config.shoot.schedule)} old flows...")
    results = StackShooter(config).run_schedule()
    for result in results:
        write_shoot_result(manager.create_run(f"stack/s_{result.s:g}"), result)
    necks = neck_boundedness_check(results, config.band())
    manager.write_manifest(root, 'stack', {
        'T': [r.T for r in results],
        'm_bar': [r.m_bar for r in results],
        'suspect': [r.s for r in results if r.suspect],
        'neck_band': necks.to_dict(),
    })
    for r in results:
        flag = " (suspect)" if r.suspect else ""
        print(f"   s={r.s:g}: m_bar={r.m_bar:.9g} T={r.T:.6g} neck(0)={r.neck_at_zero:.6g}{flag}")
    status = "✅" if necks.passed else "⚠️ "
    print(f"{status} Stack written to {root}")
    return EXIT_OK


def study_window(config: RunConfig) -> Region:
    """Off-axis window over the inner pancake flanks"""
    w = config.slab_width
    reach = config.pancake.gap_half + w
    return Region(x_lo=-reach, x_hi=reach, r_lo=config.flow.pinch_eps, r_hi=np.inf)


def cmd_study(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    stack = Path(args.input) if args.input else output_root(args, config) / 'stack'
    if not stack.is_dir():
        raise FileNotFoundError(stack)
    results = [load_shoot_result(stack / f"s_{s:g}") for s in config.shoot.schedule]
    table = convergence_study(results, study_window(config))
    run = manager.create_run('study')
    dump_json(run / 'study.json', table.to_dict())
    pd.DataFrame(table.rows()).to_csv(run / 'study.csv', index=False, float_format=FLOAT_FORMAT,
                                      lineterminator='\n')
    manager.write_manifest(run, 'study', {'cauchy': table.cauchy})
    print(f"✅ Study written to {run}; Cauchy indicators {table.cauchy}")
    return EXIT_OK


def diagnose_barriers(trace, config: RunConfig) -> list:
    """Inscribed sphere and, for necked data in n >= 3, a catenoid through the neck"""
    start = trace.snapshots[0]
    barriers = []
    if start.count == 1 and start.components[0].closed:
        r0, center = inscribed_sphere_radius(start.components[0])
        barriers.append(sphere_barrier(0.9 * r0, trace.config.n, center_x=center,
                                       spacing=trace.config.spacing, t0=start.t))
    neck = start.neck_value()
    if trace.config.n >= 3 and start.count == 1 and 0 < neck < start.girth():
        try:
            barriers.append(catenoid_barrier(trace.config.n, config.diagnostics.catenoid_ratio * neck,
                                             2.0 * start.girth()))
        except BarrierError as exc:
            logger.info("no catenoid barrier: %s", exc)
    return barriers


def cmd_diagnose(args, config: RunConfig) -> int:
    manager = RunManager(output_root(args, config), config)
    source = Path(args.trace)
    if not source.is_dir():
        raise FileNotFoundError(source)
    trace = load_trace(source)
    run = manager.create_run('diagnose')
    start = trace.snapshots[0]
    n = trace.config.n

    girth0 = start.girth()
    c_values = [f * girth0 for f in config.diagnostics.c_fractions]
    barriers = diagnose_barriers(trace, config)
    report = extract_series(trace, barriers, c_values)

    x_lo, x_hi = start.components[0].nodes[0], start.components[-1].nodes[-1]
    checks = monotone_checks(report)
    checks.append(slab_containment(trace, x_lo, x_hi))
    skipped = {}
    for c in c_values:
        try:
            checks.append(area_rate_check(report, c, x_hi - x_lo, n, config.diagnostics.rate_slack))
        except DiagnosticsError as exc:
            skipped[f'area-rate:{c:g}'] = str(exc)
    try:
        checks.append(existence_time_check(trace))
    except DiagnosticsError as exc:
        skipped['existence-time'] = str(exc)

    avoidance = []
    for barrier in barriers:
        if barrier.kind is BarrierKind.SPHERE:
            avoidance.append(avoidance_check(trace, barrier).to_dict())
        elif barrier.kind is BarrierKind.CATENOID:
            try:
                checks.append(catenoid_crossing_check(trace, barrier))
            except BarrierError as exc:
                skipped['catenoid-crossings'] = str(exc)

    slab = pancake_slab(0.5 * (x_hi - x_lo), 0.5 * (x_lo + x_hi))
    for barrier in barriers + [slab]:
        for snap in trace.snapshots:
            if barrier.alive(snap.t):
                write_snapshot(run / 'barriers' / f"{barrier.kind.value}_{snap.t:.9f}.csv",
                               barrier.profile(snap.t))

    failed = [c for c in checks if not c.passed]
    dump_json(run / 'diagnostics.json', {
        'series': report.to_dict(),
        'checks': [c.to_dict() for c in checks],
        'skipped': skipped,
        'avoidance': avoidance,
        'symmetry_defect': symmetry_defect(trace),
        'violations': [v.to_dict() for c in checks for v in c.violations],
    })
    report.to_frame().to_csv(run / 'series.csv', index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    manager.write_manifest(run, 'diagnose', {'trace': source.name, 'failed': [c.law for c in failed]})
    if failed:
        print(f"⚠️  {len(failed)} law check(s) failed: {', '.join(c.law for c in failed)}")
    else:
        print(f"✅ All {len(checks)} law checks passed")
    return EXIT_OK


COMMANDS = {
    'gen': cmd_gen,
    'evolve': cmd_evolve,
    'classify': cmd_classify,
    'shoot': cmd_shoot,
    'stack': cmd_stack,
    'study': cmd_study,
    'diagnose': cmd_diagnose,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='pancake-lab', description="Stacked pancake numerical lab")
    parser.add_argument('--config', help="JSON run config")
    parser.add_argument('--preset', choices=['sphere', 'cylinder', 'dumbbell', 'stack-desk'])
    parser.add_argument('--out', help="output root (default: config output_dir)")
    parser.add_argument('--seedless', action='store_true', help="assert no random state is configured")
    parser.add_argument('--verbose', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help="write the initial profile")
    evolve = sub.add_parser('evolve', help="evolve an initial profile")
    evolve.add_argument('--input', help="initial curve CSV (default: generate from config)")
    classify = sub.add_parser('classify', help="classify one glued flow")
    shoot = sub.add_parser('shoot', help="bisect to m* for one construction time")
    shoot.add_argument('--build', action='store_true', help="also build the recentred old flow")
    for p in (gen, evolve, classify, shoot):
        p.add_argument('--m', type=float, help="neck minimum")
        p.add_argument('--s', type=float, help="construction time")
    gen.add_argument('--rho', type=float, help="carve height (instead of --m)")
    sub.add_parser('stack', help="build the old flow of every schedule time")
    study = sub.add_parser('study', help="convergence study over a stack run")
    study.add_argument('--input', help="stack directory (default: <out>/stack)")
    diagnose = sub.add_parser('diagnose', help="series and law checks of a trace")
    diagnose.add_argument('--trace', required=True, help="trace directory")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        config = resolve_config(args)
        if args.seedless:
            check_seedless(config)
            print("🎲 seedless: no random state is configured")
        return COMMANDS[args.command](args, config)
    except (ConfigError, ValidationError) as exc:
        print(f"❌ Invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"❌ Missing path: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PancakeLabError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
