"""Command-line front-end and the on-disk sequence-set format.

Subcommands: generate, verify, bound, framelen, simulate.  Structured
artifacts are JSON with a schema version; per-run simulation data goes
to CSV.  All randomness flows from explicit --seed flags.

Verify exit codes: 0 proven, 2 refuted with witness, 3 unknown, 1 bad
input or parameters.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any

from .constructor import (
    ConstructionParams,
    ScheduleSequenceSet,
    build_schedule_set,
    m_prime,
    select_params,
)
from .random_schemes import (
    AssignTRandomParams,
    CouponModel,
    GeneralRandomParams,
    frame_length,
    group_cdf,
    optimal_single_channel,
    optimize_random,
)
from .seqcore import GroupDivision, ScheduleSequence, Symbol
from .simulator import (
    AssignTRandomScheme,
    GeneralRandomScheme,
    SequenceScheme,
    SimConfig,
    completion_histogram,
    simulate,
)
from .verifier import Verdict, lower_bound, verify_set

SCHEMA_VERSION = "1"


class SequenceSetFormatError(ValueError):
    """Raised when a sequence-set document violates the file schema."""


def set_to_doc(sset: ScheduleSequenceSet) -> dict[str, Any]:
    params = sset.params
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "K": sset.K,
        "M": params.M if params is not None else sset.W,
        "W": sset.W,
        "L": sset.L,
        "params": None,
        "division": list(sset.division.assignment),
        "sequences": [[str(sym) for sym in seq.symbols] for seq in sset.sequences],
    }
    if params is not None:
        doc["params"] = {
            "w": params.w, "p": params.p, "q": params.q,
            "Lprime": params.Lprime, "deltas": list(params.deltas),
        }
    return doc


def set_from_doc(doc: dict[str, Any]) -> ScheduleSequenceSet:
    try:
        K, M, W, L = (int(doc[k]) for k in ("K", "M", "W", "L"))
        division = [int(g) for g in doc["division"]]
        raw_seqs = doc["sequences"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SequenceSetFormatError(f"malformed document: {exc}") from exc
    if len(division) != K or len(raw_seqs) != K:
        raise SequenceSetFormatError("division and sequences must list K entries")
    sequences = []
    for i, (group, row) in enumerate(zip(division, raw_seqs), start=1):
        if len(row) != L:
            raise SequenceSetFormatError(f"sequence {i} has {len(row)} slots, expected {L}")
        try:
            symbols = [Symbol.from_str(s) for s in row]
        except ValueError as exc:
            raise SequenceSetFormatError(f"sequence {i}: {exc}") from exc
        for sym in symbols:
            if sym.channel > W:
                raise SequenceSetFormatError(
                    f"sequence {i}: channel {sym.channel} exceeds W={W}")
        try:
            sequences.append(ScheduleSequence.from_symbols(symbols, owner_group=group))
        except ValueError as exc:
            raise SequenceSetFormatError(f"sequence {i}: {exc}") from exc
    params = None
    if doc.get("params") is not None:
        p = doc["params"]
        try:
            params = ConstructionParams(
                K=K, M=M, W=W, division=GroupDivision(tuple(division)),
                ell=GroupDivision(tuple(division)).ell,
                w=int(p["w"]), p=int(p["p"]), q=int(p["q"]),
                Lprime=int(p["Lprime"]), L=L, deltas=tuple(int(d) for d in p["deltas"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SequenceSetFormatError(f"bad construction params: {exc}") from exc
    try:
        return ScheduleSequenceSet(tuple(sequences), params=params)
    except ValueError as exc:
        raise SequenceSetFormatError(str(exc)) from exc


def save_set(sset: ScheduleSequenceSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(set_to_doc(sset), fh)
        fh.write("\n")


def load_set(path: str) -> ScheduleSequenceSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SequenceSetFormatError(f"not valid JSON: {exc}") from exc
    return set_from_doc(doc)


def _emit(payload: dict[str, Any]) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")


def _cmd_generate(args: argparse.Namespace) -> int:
    sset = build_schedule_set(args.K, args.M, W=args.W, seed=args.seed)
    save_set(sset, args.out)
    params = sset.params
    assert params is not None
    k = params.division.k_min
    bound = lower_bound(params.W, k, args.M, args.K).combined
    _emit({"K": args.K, "M": args.M, "W": params.W, "L": params.L,
           "Mprime": m_prime(args.K), "lower_bound": bound, "out": args.out})
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    sset = load_set(getattr(args, "in"))
    report = verify_set(sset, mode=args.mode, samples=args.samples,
                        seed=args.seed, budget=args.budget, threads=args.threads)
    witness = None
    if report.witness is not None:
        witness = {
            "transmitter": report.witness.transmitter,
            "receiver": report.witness.receiver,
            "offsets": {str(node): tau for node, tau in sorted(report.witness.offsets.items())},
        }
    _emit({"verdict": report.verdict.value, "method": report.method.value,
           "pairs_checked": report.pairs_checked, "witness": witness})
    if report.verdict in (Verdict.PROVEN, Verdict.PROVEN_CONSERVATIVE):
        return 0
    if report.verdict is Verdict.FAILED_WITH_WITNESS:
        return 2
    return 3


def _cmd_bound(args: argparse.Namespace) -> int:
    W = args.W if args.W is not None else args.M
    k = args.K // W
    report = lower_bound(W, k, args.M, args.K, improved_remark=args.improved_remark)
    payload: dict[str, Any] = {
        "K": args.K, "M": args.M, "W": W, "k": k,
        "bound_blocking": report.bound_blocking,
        "bound_counting": report.bound_counting,
        "combined": report.combined,
        "Mprime": m_prime(args.K),
    }
    if W == args.M and args.M <= m_prime(args.K):
        constructed = select_params(args.K, args.M, args.M).L
        payload["constructed_L"] = constructed
        if report.combined > 0:
            payload["ratio"] = round(constructed / report.combined, 2)
    _emit(payload)
    return 0


def _cmd_framelen(args: argparse.Namespace) -> int:
    p_star, P_star = optimal_single_channel(args.K)
    model = CouponModel.from_optimal(args.K)
    payload: dict[str, Any] = {
        "K": args.K, "target": args.target,
        "L_rand": frame_length(args.K, args.target, model),
        "p_star": p_star, "P_star": P_star,
    }
    if args.cdf_at is not None:
        payload["cdf_at"] = {"L": args.cdf_at, "probability": group_cdf(model, args.cdf_at)}
    _emit(payload)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    if (getattr(args, "in") is None) == (not args.random):
        raise ValueError("choose exactly one of --in PATH or --random")
    if args.random:
        if args.K is None:
            raise ValueError("--random needs --K")
        W = args.W if args.W is not None else 1
        if args.scheme == "general":
            p = optimize_random(W, args.K, "general")[0]
            scheme = GeneralRandomScheme(GeneralRandomParams(W, args.K, p))
        else:
            p = optimize_random(W, args.K, "assign_t")[0]
            scheme = AssignTRandomScheme(AssignTRandomParams(W, args.K, p))
    else:
        scheme = SequenceScheme(load_set(getattr(args, "in")))
    config = SimConfig(scheme=scheme, runs=args.runs, seed=args.seed,
                       max_slots=args.max_slots, offset_mode=args.offsets)
    result = simulate(config, threads=args.threads)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_index", "completion_time", "censored_flag"])
        for r in range(result.runs):
            writer.writerow([r, int(result.completion_times[r]),
                             int(result.censored[r])])
    hist = completion_histogram(result)
    _emit({
        "runs": result.runs, "seed": result.seed, "max_slots": result.max_slots,
        "mean": hist.mean,
        "quantiles": {str(q): v for q, v in hist.quantiles.items()},
        "censored_mass": hist.censored_mass,
        "pmf": [[v, p] for v, p in zip(hist.values, hist.pmf)],
        "out": args.out,
    })
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schedseq",
        description="Construct, verify, bound and simulate broadcast schedule sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="construct a schedule sequence set")
    g.add_argument("--K", type=int, required=True)
    g.add_argument("--M", type=int, required=True)
    g.add_argument("--W", type=int, default=None,
                   help="employed channels; default: period-minimizing choice")
    g.add_argument("--seed", type=int, default=None,
                   help="shuffle which generator ranks each group keeps")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    v = sub.add_parser("verify", help="check the guarantee for a stored set")
    v.add_argument("--in", required=True)
    v.add_argument("--mode", choices=["exhaustive", "conservative", "randomized"],
                   default="exhaustive")
    v.add_argument("--samples", type=int, default=10 ** 5)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=int, default=10 ** 9,
                   help="offset combinations allowed per pair")
    v.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bound", help="closed-form period lower bounds")
    b.add_argument("--K", type=int, required=True)
    b.add_argument("--M", type=int, required=True)
    b.add_argument("--W", type=int, default=None)
    b.add_argument("--improved-remark", action="store_true",
                   help="tightened variant valid when transmit counts are multiples of W")
    b.set_defaults(func=_cmd_bound)

    f = sub.add_parser("framelen", help="random-scheme frame length")
    f.add_argument("--K", type=int, required=True)
    f.add_argument("--target", type=float, default=0.99999)
    f.add_argument("--cdf-at", type=int, default=None,
                   help="also report the completion probability at this slot count")
    f.set_defaults(func=_cmd_framelen)

    s = sub.add_parser("simulate", help="Monte-Carlo broadcast completion times")
    s.add_argument("--in", default=None, help="sequence-set JSON file")
    s.add_argument("--random", action="store_true", help="optimized random scheme")
    s.add_argument("--scheme", choices=["assignt", "general"], default="assignt")
    s.add_argument("--K", type=int, default=None)
    s.add_argument("--W", type=int, default=None)
    s.add_argument("--runs", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-slots", type=int, default=None)
    s.add_argument("--offsets", choices=["uniform", "zero"], default="uniform")
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SequenceSetFormatError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
