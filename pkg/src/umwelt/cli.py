"""``umwelt`` command line.

Exit codes: 0 success, 1 analysis or certificate failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import io
from .dot import to_dot
from .intrinsic import ContainmentViolation, check_containment, intrinsic_partition
from .model import CapExceeded, ModelError, validate
from .multiagent import (agent_view, partition_lattice_report, shared_distinctions, umwelt_table,
                         view_analysis)
from .refinement import sigma_beta, w_am, w_sep
from .synthesis import Selector, minimize

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class CommandFailed(Exception):
    """Analysis-level failure (exit 1)."""


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    obj, _ = io.read_json(args.path)
    if io.is_two_agent(obj):
        problems = io.two_agent_from_json(obj).validate()
    else:
        problems = validate(io.model_from_json(obj))
    for p in problems:
        print(p)
    if not problems:
        print("ok")
    return EXIT_FAIL if problems else EXIT_OK


def build_report(model, data: bytes, *, sep: bool, am: bool, intrinsic: bool, synthesis: bool) -> dict:
    fmt = model.arith.fmt
    report: dict = {
        "digest": io.digest(data),
        "arithmetic": model.arith.to_json(),
        "world_states": list(model.W.states),
        "sigma_beta": sigma_beta(model).block_labels(),
    }
    sep_p = intr = None
    if sep:
        sep_p, trace = w_sep(model)
        report["w_sep"] = {"blocks": sep_p.block_labels(), "trace": trace.to_json()}
    if am:
        am_p, trace = w_am(model)
        report["w_am"] = {"blocks": am_p.block_labels(), "trace": trace.to_json(),
                          "am_coarsens_sep": w_sep(model)[0].refines(am_p)}
    if intrinsic:
        res = intrinsic_partition(model)
        intr = res.partition
        report["intrinsic"] = {"blocks": intr.block_labels(), "basis": res.basis.to_json(fmt)}
    if sep_p is not None and intr is not None:
        try:
            report["containment"] = check_containment(model, intr, sep_p).to_json()
        except ContainmentViolation as e:
            raise CommandFailed(f"containment violated: {e}") from None
    if synthesis:
        mod, cert, mini = minimize(model)
        report["synthesis"] = {"selector": mod.selector.to_json(),
                               "equivalence": cert.to_json(), "minimality": mini.to_json()}
    return report


def _report_text(r: dict) -> str:
    lines = [f"digest      {r['digest']}", f"sigma_beta  {_blocks(r['sigma_beta'])}"]
    if "w_sep" in r:
        lines.append(f"w_sep       {_blocks(r['w_sep']['blocks'])}  "
                     f"(fixpoint index {r['w_sep']['trace']['fixpoint_index']})")
        for n, st in enumerate(r["w_sep"]["trace"]["stages"]):
            lines.append(f"  stage {n}   {_blocks(st)}")
    if "w_am" in r:
        lines.append(f"w_am        {_blocks(r['w_am']['blocks'])}")
    if "intrinsic" in r:
        lines.append(f"intrinsic   {_blocks(r['intrinsic']['blocks'])}  "
                     f"(basis dimension {r['intrinsic']['basis']['dimension']})")
    if "containment" in r:
        c = r["containment"]
        lines.append(f"containment intrinsic coarsens w_sep; equal={c['equal']}")
    if "synthesis" in r:
        s = r["synthesis"]
        lines.append(f"synthesis   equivalent={s['equivalence']['equivalent']} "
                     f"minimal={s['minimality']['equal']}")
    if "timing_seconds" in r:
        lines.append(f"time        {r['timing_seconds']:.4f}s")
    return "\n".join(lines) + "\n"


def _blocks(blocks) -> str:
    return "{" + ", ".join("{" + ",".join(b) + "}" for b in blocks) + "}"


def cmd_analyze(args) -> int:
    model, data = io.load_model(args.path)
    problems = validate(model)
    if problems:
        raise CommandFailed("invalid model: " + "; ".join(problems))
    everything = args.all or not (args.sep or args.am or args.intrinsic)
    if args.am and not model.memoryless:
        raise CommandFailed("--am requires a memoryless model")
    start = time.perf_counter()
    report = build_report(model, data, sep=args.sep or everything,
                          am=args.am or (everything and model.memoryless),
                          intrinsic=args.intrinsic or everything, synthesis=everything)
    if args.timing:
        report["timing_seconds"] = time.perf_counter() - start
    _emit(io.dumps(report) if args.format == "json" else _report_text(report), args.out)
    return EXIT_OK


def cmd_minimize(args) -> int:
    model, _ = io.load_model(args.path)
    problems = validate(model)
    if problems:
        raise CommandFailed("invalid model: " + "; ".join(problems))
    selector = None
    if args.selector:
        obj, _ = io.read_json(args.selector)
        try:
            selector = Selector.from_labels(model.W, obj)
        except (KeyError, ModelError) as e:
            raise io.InputError(f"bad selector: {e}") from None
    mod, cert, mini = minimize(model, selector, mc_samples=args.mc_samples, mc_horizon=args.mc_horizon,
                               mc_words=args.mc_words, seed=args.seed)
    ok = cert.ok and cert.mc_ok and mini.ok
    doc = io.model_to_json(mod.model)
    doc["selector"] = mod.selector.to_json()
    doc["certificates"] = {"equivalence": cert.to_json(), "minimality": mini.to_json(), "ok": ok}
    text = io.dumps(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(io.dumps(doc["certificates"]), end="")
    else:
        sys.stdout.write(text)
    if not ok:
        if cert.counterexample:
            print(f"counterexample: state {cert.counterexample['state']} "
                  f"word {' '.join(cert.counterexample['word'])}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.two_agent:
        obj, _ = io.read_json(args.two_agent)
        m = io.two_agent_from_json(obj)
        problems = m.validate()
        if problems:
            raise CommandFailed("invalid two-agent model: " + "; ".join(problems))
        report = {
            "agents": [view_analysis(agent_view(m, i)) for i in (1, 2)],
            "shared": shared_distinctions(m),
        }
        report["umwelten_equal"] = report["shared"]["umwelten_equal"]
    else:
        if not args.paths or len(args.paths) != 2:
            raise io.InputError("compare needs two partition files or --two-agent PATH")
        objs = [io.read_json(p)[0] for p in args.paths]
        if all(io.is_two_agent(o) or "kernels" in o for o in objs):
            raise io.InputError("pass model files with --two-agent; positional arguments are partitions")
        p = io.partition_from_json(objs[0])
        q = io.partition_from_json(objs[1], p.space)
        report = partition_lattice_report(p, q)
    _emit(io.dumps(report), args.out)
    return EXIT_OK


def cmd_umwelt(args) -> int:
    model, _ = io.load_model(args.path)
    _emit(io.dumps(umwelt_table(model)), args.out)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    model, _ = io.load_model(args.path)
    if args.partition == "sep":
        p = w_sep(model)[0]
    elif args.partition == "intrinsic":
        p = intrinsic_partition(model).partition
    else:
        p = sigma_beta(model)
    _emit(to_dot(model, p, title=f"{args.partition}"), args.out)
    return EXIT_OK


def cmd_proptest(args) -> int:
    from .campaign import run_campaign

    summary = run_campaign(args.count, args.max_w, args.seed, witness_dir=args.witness_dir,
                           mutation=args.inject_bug)
    _emit(io.dumps(summary.to_json()), args.out)
    return EXIT_OK if summary.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="umwelt", description="Analyse finite sensorimotor loops.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check kernel stochasticity and wiring")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="compute sigma(beta), W_sep, W_am and the intrinsic partition")
    p.add_argument("path")
    p.add_argument("--sep", action="store_true")
    p.add_argument("--am", action="store_true")
    p.add_argument("--intrinsic", action="store_true")
    p.add_argument("--all", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte determinism)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("minimize", help="synthesize alpha' and certify it")
    p.add_argument("path")
    p.add_argument("--out")
    p.add_argument("--selector", help="JSON map state -> representative (overrides the least-index rule)")
    p.add_argument("--mc-samples", type=int, default=100_000)
    p.add_argument("--mc-horizon", type=int, default=5)
    p.add_argument("--mc-words", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("compare", help="join/meet of two partitions, or a two-agent model")
    p.add_argument("paths", nargs="*")
    p.add_argument("--two-agent")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("umwelt-table", help="Merkwelt vs intrinsic partition, degenerate-agent rows")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_umwelt)

    p = sub.add_parser("export-dot", help="Graphviz rendering of alpha grouped by a partition")
    p.add_argument("path")
    p.add_argument("--partition", choices=("sep", "intrinsic", "sigma-beta"), default="intrinsic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("proptest", help="seeded random-model property campaign")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-w", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness-dir", default=".")
    p.add_argument("--inject-bug", help=argparse.SUPPRESS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_proptest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.InputError, ModelError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (CommandFailed, CapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
