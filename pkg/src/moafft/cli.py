"""Command-line driver.

    moafft run --mode seq --variant inplace --t 8 --seed 1 --check
    moafft run --mode dist --template partitioned --t 8 --m 4 --check
    moafft sweep --sizes 3-12 --entries seq:inplace,plan:combined --m 2 --repeat 3

Exit status: 0 pass, 1 correctness failure, 2 configuration error,
3 deadlock.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from .errors import ConfigError, DeadlockError
from .fftseq import naive_dft, random_signal, read_signal, rel_l2_error, write_signal
from .runner import DEFAULT_IDS, IDS, MODES, Entry, compute

TOLERANCE = 1e-9
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DEADLOCK = 0, 1, 2, 3
SHOW_OUTPUT_MAX = 16


def _sign(text: str) -> int:
    value = int(text)
    if value not in (1, -1):
        raise argparse.ArgumentTypeError("sign must be +1 or -1")
    return value


def parse_sizes(text: str) -> list[int]:
    """``"3-12"``, ``"3,5,8"`` or a mix, as a sorted list of exponents ``t``."""
    out = set()
    for part in filter(None, (p.strip() for p in text.split(","))):
        lo, sep, hi = part.partition("-")
        if sep:
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(lo))
    return sorted(out)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moafft", description="Radix-2 FFT workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one implementation on one signal")
    run.add_argument("--mode", choices=MODES, required=True)
    run.add_argument("--variant", help="sequential variant id (mode seq)")
    run.add_argument("--plan", help="plan id (mode plan)")
    run.add_argument("--template", help="template id (modes dist and shm)")
    size = run.add_mutually_exclusive_group()
    size.add_argument("--t", type=int, help="log2 of the signal length")
    size.add_argument("--n", type=int, help="signal length, a power of two")
    run.add_argument("--m", type=int, default=1, help="processor count")
    run.add_argument("--breakpoint", type=int, help="first stage of the cyclic phase")
    run.add_argument("--sign", type=_sign, default=-1, help="exponent sign, +1 or -1")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--input", help="signal file, 're im' per line")
    run.add_argument("--write-output", metavar="FILE", help="write the transformed signal to FILE")
    run.add_argument("--output", choices=("json", "csv"), default="json")
    run.add_argument("--check", action="store_true", help="compare against the naive DFT")
    run.add_argument("--repeat", type=int, default=1)
    run.add_argument("--serial", action="store_true", help="run shared-memory workers serially")
    run.add_argument("--sends-first", action="store_true", help="issue all sends before receives")
    run.add_argument("--via-central", action="store_true",
                     help="full-local-copy template: route block-to-cyclic through processor 0")

    sw = sub.add_parser("sweep", help="time a set of implementations over a range of sizes")
    sw.add_argument("--sizes", default="3-12", help="exponents t, e.g. 3-12 or 3,5,8 (empty for none)")
    sw.add_argument("--entries", default="seq:inplace", help="comma separated mode:id list")
    sw.add_argument("--m", default="1", help="comma separated processor counts for parallel entries")
    sw.add_argument("--repeat", type=int, default=3)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--sign", type=_sign, default=-1)
    sw.add_argument("--max-t", type=int, default=20, help="refuse sizes above 2**max_t")
    sw.add_argument("--output", choices=("json", "csv"), default="csv")
    sw.add_argument("--serial", action="store_true")
    sw.add_argument("--sends-first", action="store_true")
    return ap


# --- run --------------------------------------------------------------------

def _run_ident(args) -> str:
    given = {"seq": args.variant, "plan": args.plan, "dist": args.template, "shm": args.template,
             "oracle": None}[args.mode]
    ident = given or DEFAULT_IDS[args.mode]
    if ident not in IDS[args.mode]:
        raise ConfigError(f"unknown {args.mode} id {ident!r}; expected one of {', '.join(IDS[args.mode])}")
    return ident


def _run_signal(args) -> np.ndarray:
    if args.input:
        return read_signal(args.input)
    if args.t is not None:
        n = 2 ** args.t
    elif args.n is not None:
        n = args.n
    else:
        raise ConfigError("one of --t, --n or --input is required")
    if n < 1:
        raise ConfigError(f"n={n} is not a power of two")
    return random_signal(n, args.seed)


def run_command(args) -> tuple[dict, int]:
    ident = _run_ident(args)
    x = _run_signal(args)
    request = {"mode": args.mode, "id": ident, "n": len(x), "m": args.m, "breakpoint": args.breakpoint,
               "sign": args.sign, "seed": None if args.input else args.seed, "input": args.input,
               "check": args.check, "repeat": args.repeat, "serial": args.serial,
               "sends_first": args.sends_first, "via_central": args.via_central}
    times = []
    y = trace = None
    for _ in range(max(1, args.repeat)):
        t0 = time.perf_counter()
        y, trace = compute(args.mode, ident, x, m=args.m, breakpoint=args.breakpoint, sign=args.sign,
                           serial=args.serial, sends_first=args.sends_first, via_central=args.via_central)
        times.append(time.perf_counter() - t0)
    report = {"request": request, "wall_time_s": float(np.mean(times)),
              "trace": trace.to_dict() if trace is not None else None}
    status = EXIT_OK
    if args.check:
        err = rel_l2_error(y, naive_dft(x, args.sign))
        ok = err <= TOLERANCE
        report["correctness"] = {"max_rel_error": err, "tolerance": TOLERANCE, "pass": bool(ok)}
        status = EXIT_OK if ok else EXIT_FAIL
    if len(y) <= SHOW_OUTPUT_MAX:
        report["output"] = [[float(v.real), float(v.imag)] for v in y]
    if args.write_output:
        write_signal(args.write_output, y)
    return report, status


def _flatten(report: dict) -> dict:
    row = {f"request.{k}": v for k, v in report["request"].items()}
    row["wall_time_s"] = report["wall_time_s"]
    for k, v in (report.get("correctness") or {}).items():
        row[f"correctness.{k}"] = v
    for k, v in (report.get("trace") or {}).items():
        if not isinstance(v, (list, dict)):
            row[f"trace.{k}"] = v
    return row


# --- sweep ------------------------------------------------------------------

def _column(entry: Entry, m: int) -> str:
    return f"{entry}@m={m}" if entry.parallel else str(entry)


def sweep_command(args) -> dict:
    sizes = parse_sizes(args.sizes)
    too_big = [t for t in sizes if t > args.max_t]
    if too_big:
        raise ConfigError(f"sizes above 2**{args.max_t} requested: {too_big}")
    entries = [Entry.parse(e) for e in args.entries.split(",") if e.strip()]
    ms = _int_list(args.m) or [1]
    columns = []
    for e in entries:
        for m in (ms if e.parallel else [1]):
            columns.append((e, m))
    rows = []
    for t in sizes:
        n = 2 ** t
        x = random_signal(n, args.seed)
        ref = naive_dft(x, args.sign)
        row = {"t": t, "n": n}
        for e, m in columns:
            name = _column(e, m)
            times, errs = [], []
            try:
                # untimed first call so compilation and cache loading stay out of the table
                compute(e.mode, e.ident, x, m=m, sign=args.sign, serial=args.serial, sends_first=args.sends_first)
                for _ in range(max(1, args.repeat)):
                    t0 = time.perf_counter()
                    y, _ = compute(e.mode, e.ident, x, m=m, sign=args.sign, serial=args.serial,
                                   sends_first=args.sends_first)
                    times.append(time.perf_counter() - t0)
                    errs.append(rel_l2_error(y, ref))
            except ConfigError:
                row[f"{name} time_s"] = None
                row[f"{name} ok"] = None
                continue
            row[f"{name} time_s"] = float(np.mean(times))
            row[f"{name} ok"] = bool(max(errs) <= TOLERANCE)
        rows.append(row)
    doubling = {}
    for e, m in columns:
        name = _column(e, m)
        pairs = []
        for a, b in zip(rows, rows[1:]):
            ta, tb = a.get(f"{name} time_s"), b.get(f"{name} time_s")
            if ta and tb and b["t"] == a["t"] + 1:
                pairs.append({"from_t": a["t"], "ratio": tb / ta})
        doubling[name] = pairs
    return {"columns": ["t", "n"] + [f"{_column(e, m)} {k}" for e, m in columns for k in ("time_s", "ok")],
            "rows": rows, "doubling": doubling, "repeat": args.repeat, "seed": args.seed}


def sweep_csv(table: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=table["columns"], lineterminator="\n")
    w.writeheader()
    for row in table["rows"]:
        w.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def _sweep_failed(table: dict) -> bool:
    return any(v is False for row in table["rows"] for k, v in row.items() if k.endswith(" ok"))


# --- entry point ------------------------------------------------------------

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            report, status = run_command(args)
            if args.output == "json":
                print(json.dumps(report, indent=2))
            else:
                row = _flatten(report)
                w = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
                w.writeheader()
                w.writerow(row)
            return status
        table = sweep_command(args)
        if args.output == "json":
            print(json.dumps(table, indent=2))
        else:
            sys.stdout.write(sweep_csv(table))
            for name, pairs in table["doubling"].items():
                if pairs:
                    trend = " ".join(f"{p['ratio']:.2f}" for p in pairs)
                    print(f"# doubling {name}: {trend}", file=sys.stderr)
        return EXIT_FAIL if _sweep_failed(table) else EXIT_OK
    except ConfigError as exc:
        print(f"moafft: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DeadlockError as exc:
        print(f"moafft: {exc}", file=sys.stderr)
        return EXIT_DEADLOCK
    except ValueError as exc:
        print(f"moafft: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
