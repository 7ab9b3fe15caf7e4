"""Command-line interface.

Exit status: 0 on success, 1 on model/validation errors, 2 on usage errors.
Results go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import io, reliability
from .errors import JointSigError, ModelError
from .model import build_model, group_counts
from .oracle import estimate_joint_survival, simulate_failure_times, summary
from .signature import DEFAULT_BUDGET, Event, Order, joint_signature, system_signature
from .structure import to_text, verify_coherent

EVENTS = {e.value: e for e in Event if e is not Event.SINGLE_SYSTEM}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jointsig", description="Joint survival signatures of systems with shared components.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("model", help="model file (JSON)")
        sp.add_argument("--systems", help="comma-separated system names (default: all in file order)")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget per table")
        return sp

    def times(sp):
        for i in (1, 2, 3):
            sp.add_argument(f"--t{i}", type=float)
        sp.add_argument("--grid", help="start:stop:step for every time axis not fixed by --tN")

    add("check", "validate a model and report sharing counts")
    sp = add("signature", "survival signature of one system")
    sp.add_argument("--grouped", action="store_true", help="split levels by sharing group")
    sp = add("joint", "joint survival signature table")
    sp.add_argument("--order", default="all", help="earlier|same|later|all, or e.g. '1<2=3'")
    sp.add_argument("--event", choices=sorted(EVENTS), default=None)
    sp = add("survival", "joint survival probability P(T_i > t_i for all i)")
    times(sp)
    sp = add("marginal", "marginal survival of one system")
    sp.add_argument("--target", help="system name (default: first selected system)")
    sp.add_argument("--t", type=float, dest="t")
    sp.add_argument("--grid")
    sp = add("conditional", "conditional survival of one system given the other")
    times(sp)
    sp.add_argument("--given", required=True, help="NAME:functioning or NAME:failed")
    sp.add_argument("--both", action="store_true",
                    help="P(both function at t1 | given functions at t2); needs t1 > t2")
    sp = add("simulate", "Monte-Carlo estimate of joint survival")
    times(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=100_000)
    return p


def _grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise UsageError("--grid needs 0 <= start <= stop and step > 0")
    n = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(n), 12)


def _time_axes(args, n: int) -> list[np.ndarray]:
    axes = []
    for i in range(1, n + 1):
        v = getattr(args, f"t{i}")
        if v is not None:
            axes.append(np.array([v]))
        elif args.grid:
            axes.append(_grid(args.grid))
        else:
            raise UsageError(f"--t{i} (or --grid) is required")
    for i in range(n + 1, 4):
        if getattr(args, f"t{i}") is not None:
            raise UsageError(f"--t{i} given but the model has only {n} systems")
    return axes


def _systems(args):
    return [s.strip() for s in args.systems.split(",")] if args.systems else None


def _dists(mf, model):
    missing = [t for t in model.types if t not in mf.distributions]
    if missing:
        raise ModelError(f"no distribution declared for type(s): {', '.join(missing)}")
    return mf.distributions


def _emit(out, args, payload, csv_text=None):
    if args.format == "csv" and csv_text is not None:
        out.write(csv_text)
    else:
        out.write(json.dumps(payload, indent=2) + "\n")


def _cmd_check(args, mf, out):
    model = mf.model(_systems(args))
    gc = group_counts(model)
    systems = []
    for name, st in model.systems:
        rep = verify_coherent(st)
        systems.append({
            "name": name,
            "structure": to_text(st),
            "components": len(model.system_components(name)),
            "coherence": "PASS" if rep.passed else "FAIL",
        })
    payload = {
        "systems": systems,
        "types": list(model.types),
        "group_counts": gc.as_dict(),
        "independent": model.independent,
        "unused_components": list(model.unused),
    }
    rows = ["type,group,count"] + [
        f"{t},{g},{c}" for t, counts in gc.as_dict().items() for g, c in counts.items()
    ]
    _emit(out, args, payload, "\n".join(rows) + "\n")


def _cmd_signature(args, mf, out):
    names = _systems(args) or [mf.names[0]]
    if len(names) != 1:
        raise UsageError("signature takes exactly one system")
    # a single system is wrapped with a copy of itself so the model machinery applies
    if args.grouped and len(mf.names) >= 2:
        others = [n for n in mf.names if n != names[0]]
        model = mf.model([names[0]] + others[:2])
    else:
        model = _solo_model(mf, names[0])
    table = system_signature(model, 0, grouped=args.grouped, budget=args.budget)
    _emit(out, args, io.table_to_dict(table), io.tables_to_csv([table], with_order=False))


def _solo_model(mf, name):
    st = dict(mf.systems).get(name)
    if st is None:
        raise ModelError(f"unknown system {name!r}")
    return build_model([(name, st), (name + "__copy", st)], mf.components, mf.types)


def _cmd_joint(args, mf, out):
    model = mf.model(_systems(args))
    n = model.n_systems
    event = EVENTS[args.event] if args.event else (
        Event.BOTH_FUNCTION if n == 2 else Event.ALL_THREE_FUNCTION
    )
    if args.order.strip().lower() == "all":
        orders = Order.all(n)
    else:
        orders = [Order.parse(args.order, n)]
    tables = [joint_signature(model, o, event, args.budget) for o in orders]
    payload = {"systems": list(model.names), "tables": [io.table_to_dict(t) for t in tables]}
    _emit(out, args, payload, io.tables_to_csv(tables))


def _cmd_survival(args, mf, out):
    model = mf.model(_systems(args))
    dists = _dists(mf, model)
    axes = _time_axes(args, model.n_systems)
    rows = []
    for idx in np.ndindex(*(a.size for a in axes)):
        ts = [float(axes[k][i]) for k, i in enumerate(idx)]
        event = Event.BOTH_FUNCTION if model.n_systems == 2 else Event.ALL_THREE_FUNCTION
        rows.append(ts + [reliability.event_probability(model, dists, ts, event, budget=args.budget)])
    cols = [f"t{i + 1}" for i in range(model.n_systems)] + ["probability"]
    payload = {"systems": list(model.names), "columns": cols, "rows": [[float(io.fmt(v)) for v in r] for r in rows]}
    _emit(out, args, payload, io.grid_to_csv(cols, rows))


def _cmd_marginal(args, mf, out):
    names = _systems(args)
    target = args.target or (names[0] if names else mf.names[0])
    if names is None or len(names) < 2:
        model = _solo_model(mf, target)
    else:
        model = mf.model(names)
    dists = _dists(mf, model)
    if args.t is not None:
        axis = np.array([args.t])
    elif args.grid:
        axis = _grid(args.grid)
    else:
        raise UsageError("--t (or --grid) is required")
    rows = [[float(t), reliability.marginal_survival(model, dists, target, float(t), budget=args.budget)] for t in axis]
    cols = ["t", "probability"]
    payload = {"system": target, "columns": cols, "rows": [[float(io.fmt(v)) for v in r] for r in rows]}
    _emit(out, args, payload, io.grid_to_csv(cols, rows))


def _cmd_conditional(args, mf, out):
    try:
        given, status = args.given.split(":")
    except ValueError:
        raise UsageError("--given expects NAME:functioning or NAME:failed") from None
    if status not in ("functioning", "failed"):
        raise UsageError("--given status must be 'functioning' or 'failed'")
    names = _systems(args) or list(mf.names[:2])
    if len(names) != 2 or given not in names:
        raise UsageError("conditional needs two systems, one of which is named in --given")
    target = names[0] if names[1] == given else names[1]
    model = mf.model([target, given])
    dists = _dists(mf, model)
    # times follow the selected order of --systems
    t_of = {names[0]: args.t1, names[1]: args.t2}
    if t_of[target] is None and t_of[given] is None and not args.grid:
        raise UsageError("--t1/--t2 (or --grid) are required")
    grid = _grid(args.grid) if args.grid else None
    ax_t = np.array([t_of[target]]) if t_of[target] is not None else grid
    ax_g = np.array([t_of[given]]) if t_of[given] is not None else grid
    if ax_t is None or ax_g is None:
        raise UsageError("both times are required")
    rows = []
    for tt in ax_t:
        for tg in ax_g:
            if args.both:
                if status != "functioning":
                    raise UsageError("--both needs a functioning condition")
                p = reliability.conditional_joint_survival(model, dists, float(tt), float(tg))
            elif status == "functioning":
                p = reliability.conditional_survival_given_functioning(model, dists, float(tt), float(tg))
            else:
                p = reliability.conditional_survival_given_failed(model, dists, float(tt), float(tg))
            rows.append([float(tt), float(tg), p])
    cols = [f"t_{target}", f"t_{given}", "probability"]
    payload = {"target": target, "given": args.given, "columns": cols,
               "rows": [[float(io.fmt(v)) for v in r] for r in rows]}
    _emit(out, args, payload, io.grid_to_csv(cols, rows))


def _cmd_simulate(args, mf, out):
    model = mf.model(_systems(args))
    dists = _dists(mf, model)
    axes = _time_axes(args, model.n_systems)
    run = simulate_failure_times(model, dists, args.seed, args.samples)
    queries = [[float(axes[k][i]) for k, i in enumerate(idx)] for idx in np.ndindex(*(a.size for a in axes))]
    payload = summary(run, queries)
    rows = [q + list(estimate_joint_survival(run, q)) for q in queries]
    cols = [f"t{i + 1}" for i in range(model.n_systems)] + ["estimate", "stderr"]
    _emit(out, args, payload, io.grid_to_csv(cols, rows))


COMMANDS = {
    "check": _cmd_check,
    "signature": _cmd_signature,
    "joint": _cmd_joint,
    "survival": _cmd_survival,
    "marginal": _cmd_marginal,
    "conditional": _cmd_conditional,
    "simulate": _cmd_simulate,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        mf = io.load_model(args.model)
        COMMANDS[args.command](args, mf, out)
    except UsageError as exc:
        err.write(f"jointsig {args.command}: {exc}\n")
        return 2
    except (JointSigError, OSError) as exc:
        err.write(f"jointsig {args.command}: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
