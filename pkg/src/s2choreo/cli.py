"""
Command-line entry point: ``s2choreo {eval,minimize,integrate,verify,bound}``.

Exit codes: 0 success, 1 configuration or input error, 2 collision in the
input or during integration, 3 separation guard exhausted, 4 minimizer
stopped without converging, 5 a verification check failed.
"""

import argparse
import logging
import os
import sys

from .action import action, collision_bound
from .choreography import min_pair_separation, symmetry_residuals, test_loop
from .geometry import CollisionError
from .integrator import closure_error, el_residual, initial_state, integrate
from .io import (ConfigError, load_config, read_loop, read_state, write_loop, write_report,
                 write_trajectory)
from .minimizer import CollisionGuardError, minimize

OK, CONFIG_ERROR, COLLISION, GUARD_EXHAUSTED, NOT_CONVERGED, CHECK_FAILED = range(6)


def _g(x):
    return f"{x:.10g}"


def _source_loop(cfg, path=None):
    source = path or cfg.loop
    if source == "test-loop":
        if cfg.N % 4:
            raise ConfigError(f"the test loop needs N divisible by 4, got N={cfg.N}")
        return test_loop(cfg.N)
    return read_loop(source)


def _apply_overrides(cfg, args):
    if getattr(args, "samples", None) is not None:
        cfg.N = args.samples
    return cfg.validate()


def cmd_eval(cfg, args):
    loop = _source_loop(cfg, args.loop)
    system = cfg.system
    try:
        a = action(loop, system)
    except CollisionError as err:
        print(f"collision: {err}")
        return COLLISION
    bound = collision_bound()
    verdict = "below bound" if a.total < bound else "not below bound"
    print(f"N                 {loop.N}")
    print(f"kinetic           {_g(a.kinetic)}")
    print(f"potential         {_g(a.potential_integral)}")
    print(f"action            {_g(a.total)}")
    print(f"collision bound   {_g(bound)}")
    print(f"verdict           {verdict}")
    print(f"min separation    {_g(min_pair_separation(loop, system))}")
    return OK


def cmd_minimize(cfg, args):
    if args.max_iters is not None:
        cfg.minimizer["max_iters"] = args.max_iters
    if args.min_separation is not None:
        cfg.minimizer["min_separation"] = args.min_separation
    if args.tol is not None:
        cfg.minimizer["grad_tol"] = args.tol
    cfg.validate()
    loop0 = _source_loop(cfg, args.loop)
    try:
        loop, report = minimize(loop0, cfg.system, cfg.minimize_options)
    except CollisionGuardError as err:
        print(f"separation guard: {err}")
        return GUARD_EXHAUSTED
    except CollisionError as err:
        print(f"collision: {err}")
        return COLLISION
    out = args.out or cfg.outputs.loop or "minimized_loop.json"
    report_path = args.report or cfg.outputs.report or os.path.splitext(out)[0] + ".report.json"
    write_loop(out, loop)
    write_report(report_path, report.as_dict())
    print(f"termination       {report.reason} after {report.iterations} iterations")
    print(f"start action      {_g(report.action_history[0])}")
    print(f"final action      {_g(report.final_action)}")
    print(f"gradient norm     {_g(report.final_grad_norm)}")
    print(f"min separation    {_g(report.final_min_separation)}")
    print(f"collision bound   {_g(collision_bound())}")
    print(f"below bound       {report.below_collision_bound}")
    print(f"loop written to   {out}")
    if not report.converged:
        return NOT_CONVERGED
    if report.final_min_separation <= cfg.minimize_options.min_separation or not report.below_collision_bound:
        return CHECK_FAILED
    return OK


def cmd_verify(cfg, args):
    loop = read_loop(args.loop_file)
    system = cfg.system
    tol = cfg.tolerances
    el_tol = args.tol if args.tol is not None else tol.el_residual
    try:
        a = action(loop, system)
        el = el_residual(loop, system)
        closure, _ = closure_error(loop, system, cfg.integrator.T, cfg.integrator.h)
    except CollisionError as err:
        print(f"collision: {err}")
        return COLLISION
    bound = collision_bound()
    checks = [("el residual", el, el_tol), ("closure error", closure, tol.closure)]
    if system.n == 3 and loop.N % 2 == 0:
        e2, e3 = symmetry_residuals(loop)
        checks += [("E2 residual", e2, tol.symmetry), ("E3 residual", e3, tol.symmetry)]
    print(f"action            {_g(a.total)}")
    print(f"collision bound   {_g(bound)}")
    print(f"below bound       {a.total < bound}")
    print(f"min separation    {_g(min_pair_separation(loop, system))}")
    passed = True
    for name, value, limit in checks:
        ok = value < limit
        passed &= ok
        print(f"{name:<17} {_g(value)}  (tol {_g(limit)}) {'ok' if ok else 'FAIL'}")
    return OK if passed else CHECK_FAILED


def cmd_integrate(cfg, args):
    T = args.T if args.T is not None else cfg.integrator.T
    h = args.h if args.h is not None else cfg.integrator.h
    steps = round(T / h) if h > 0 else 0
    if not (T > 0 and h > 0) or steps < 1 or abs(steps * h - T) > 1e-9 * T:
        raise ConfigError(f"step h={h} does not divide the horizon T={T}")
    state_path = args.state or cfg.state
    system = cfg.system
    if state_path:
        state0 = read_state(state_path)
        if state0.n != system.n:
            raise ConfigError(f"state has {state0.n} bodies, config has n={system.n}")
    else:
        state0 = initial_state(_source_loop(cfg, args.loop), system)
    try:
        traj = integrate(state0, system.mass_array, T, h)
    except CollisionError as err:
        print(f"collision abort at t = {_g(err.time)}: {err}")
        return COLLISION
    out = args.out or cfg.outputs.trajectory or "trajectory.csv"
    write_trajectory(out, traj)
    print(f"steps             {len(traj.times) - 1}")
    print(f"energy drift      {_g(traj.energy_drift)}")
    if abs(T - round(T)) < 1e-12:
        gap = max(abs(traj.positions[-1] - state0.positions).max(),
                  abs(traj.velocities[-1] - state0.velocities).max())
        print(f"closure error     {_g(gap)}")
    print(f"trajectory written to {out}")
    return OK


def cmd_bound(cfg, args):
    print(repr(collision_bound()))
    return OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output path")
    common.add_argument("--samples", type=int, help="samples per loop (N)")
    common.add_argument("--tol", type=float, help="gradient tolerance (minimize) or residual tolerance (verify)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="s2choreo", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="action of a loop against the collision bound")
    p.add_argument("--loop", help="loop file, or 'test-loop'")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("minimize", parents=[common], help="descend the action over symmetric loops")
    p.add_argument("--loop", help="starting loop file, or 'test-loop'")
    p.add_argument("--report", help="report output path")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--min-separation", type=float)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("integrate", parents=[common], help="integrate the equations of motion")
    p.add_argument("--loop", help="take the initial state from this loop")
    p.add_argument("--state", help="explicit phase-state file")
    p.add_argument("--T", type=float, help="horizon")
    p.add_argument("--h", type=float, help="step size")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("verify", parents=[common], help="check that a loop solves the equations of motion")
    p.add_argument("loop_file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", parents=[common], help="print the binary-collision action bound")
    p.set_defaults(func=cmd_bound)
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "bound":
        return cmd_bound(None, args)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return args.func(cfg, args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return CONFIG_ERROR


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
