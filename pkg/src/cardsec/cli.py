"""Command line: cardsec construct|verify|simulate|bounds.

Exit codes: 0 when every requested check passes, 1 when one fails, 2 for
usage, parameter or parse errors. Standard output carries one JSON document;
progress goes to standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import jsonio
from .core import ParameterError
from .designs import (build_inversive_plane, build_paley_hadamard,
                      build_projective_plane, build_sts, build_trivial_design, build_witt_24,
                      builtin_ag32, builtin_large_set_sts9, derived_design, verify_large_set,
                      verify_t_design)
from .geometric import build_geometric_announcement
from .strategy import (PERFECT, WEAK, Announcement, Strategy, bounds,
                       check_announcement_security, hand_multiplicities, is_informative,
                       simulate, verify_strategy)
from .transversal import (check_transversal_security, delete_groups,
                          oa_to_td, reed_solomon_oa, transversal_large_set,
                          transversal_strategy, verify_oa, verify_td,
                          verify_transversal_strategy)

log = logging.getLogger("cardsec")


class UsageError(Exception):
    pass


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.kind} needs --{name.replace('_', '-')}")


def threads(args) -> int:
    env = os.environ.get("CARDSEC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"CARDSEC_THREADS={env!r} is not an integer") from None
    else:
        n = args.threads
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _emit(doc: dict, args, started: float) -> None:
    doc["schema"] = jsonio.SCHEMA
    if getattr(args, "timing", False):
        doc["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    sys.stdout.write(jsonio.dumps(doc))


# -- construct -----------------------------------------------------------------


def _construct_doc(args) -> tuple[dict, dict]:
    """(artifact, summary) for the requested construction."""
    k = args.kind
    if k == "sts":
        _need(args, "v")
        d = build_sts(args.v)
    elif k == "ag32":
        d = builtin_ag32()
    elif k == "large-set-sts9":
        ls = builtin_large_set_sts9()
        return jsonio.large_set_doc(ls, 2), {"members": len(ls.members)}
    elif k == "projective":
        _need(args, "q")
        d = build_projective_plane(args.q)
    elif k == "paley":
        _need(args, "q")
        d = build_paley_hadamard(args.q)
    elif k == "inversive":
        _need(args, "q")
        d = build_inversive_plane(args.q)
    elif k == "witt24":
        d = build_witt_24()
    elif k == "derived":
        d = derived_design(build_witt_24(), args.x or 0)
    elif k == "trivial":
        _need(args, "v", "k", "t")
        d = build_trivial_design(args.v, args.k, args.t, args.lam or 1)
    elif k == "rs-oa":
        _need(args, "t", "q")
        oa = reed_solomon_oa(args.t, args.q)
        if args.k is not None:
            td = delete_groups(oa_to_td(oa), args.k)
            return jsonio.td_doc(td), {"blocks": len(td.blocks)}
        return jsonio.oa_doc(oa), {"rows": len(oa.rows)}
    elif k == "td":
        _need(args, "t", "q")
        td = oa_to_td(reed_solomon_oa(args.t, args.q))
        if args.k is not None:
            td = delete_groups(td, args.k)
        return jsonio.td_doc(td), {"blocks": len(td.blocks)}
    elif k == "td-large-set":
        _need(args, "a", "c", "q")
        members = transversal_large_set(args.a, args.c, args.q)
        s = transversal_strategy(members, args.c)
        return jsonio.strategy_doc(s), {"announcements": s.m}
    elif k == "geometric":
        _need(args, "p", "d", "s")
        g = build_geometric_announcement(args.p, args.d, args.s)
        doc = jsonio.announcement_doc(g.as_announcement())
        doc["parameters"] = g.parameters()
        return doc, {"hands": len(g.blocks)}
    else:
        raise UsageError(f"unknown kind {k!r}")
    return jsonio.design_doc(d), {"blocks": len(d.blocks)}


def cmd_construct(args) -> int:
    started = time.perf_counter()
    artifact, summary = _construct_doc(args)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(jsonio.dumps(artifact))
        log.info("wrote %s", args.output)
        _emit({"command": "construct", "kind": args.kind, "output": args.output,
               "summary": summary}, args, started)
    else:
        sys.stdout.write(jsonio.dumps(artifact))
    return 0


# -- verify --------------------------------------------------------------------


def _security_c(args) -> int:
    c = args.c if args.c is not None else args.informative_c
    if c is None:
        raise UsageError("security checks need --c (or --informative-c)")
    return c


def _as_strategy(kind, obj, args) -> Strategy | None:
    if kind == "strategy":
        return obj
    if kind == "large_set":
        c = _security_c(args)
        anns = tuple(Announcement.from_design(m) for m in obj.members)
        return Strategy(obj.v, obj.k, obj.v - obj.k - c, c, anns)
    return None


def _as_announcement(kind, obj) -> Announcement | None:
    if kind == "announcement":
        return obj
    if kind == "design":
        return Announcement.from_design(obj)
    if kind == "td":
        return obj.as_announcement()
    return None


def _informative_doc(res) -> dict:
    return {"passed": bool(res), "witness": [list(h) for h in res.witness] if res.witness else None}


def _strategy_report_doc(rep) -> dict:
    return {
        "m": rep.m,
        "covered": rep.covered,
        "missing": rep.missing,
        "first_missing": list(rep.first_missing) if rep.first_missing else None,
        "gamma": rep.gamma,
        "informative": [bool(x) for x in rep.informative],
        "security": [jsonio.verdict_doc(v) for v in rep.security],
    }


def _toolkit_doc(rep) -> dict:
    return {
        "members": rep.member_count,
        "expected_members": rep.expected_members,
        "partition_ok": rep.partition_ok,
        "informative": [bool(x) for x in rep.informative],
        "informative_by_deals": rep.informative_by_deals,
        "security": [_transversal_doc(v) for v in rep.security],
    }


def _posterior_witness(w):
    if w is None:
        return None
    return {"h_c": list(w.h_c), "y": list(w.y), "count": w.count, "p_size": w.p_size,
            "expected": jsonio.frac(w.expected)}


def _transversal_doc(v) -> dict:
    return {
        "c": v.c, "delta": v.delta, "weak": v.weak, "formula": v.formula,
        "weak_witness": _posterior_witness(v.weak_witness),
        "formula_witness": _posterior_witness(v.formula_witness),
        "posteriors": [jsonio.frac(x) for x in v.posteriors],
        "checked_cathy_hands": v.checked_cathy_hands,
        "infeasible_cathy_hands": v.infeasible_cathy_hands,
    }


def _run_checks(kind, obj, args, workers) -> list[dict]:
    verdicts = []
    ann = _as_announcement(kind, obj)

    if args.design_t is not None:
        t = args.design_t
        log.info("checking %d-design property", t)
        if kind == "td":
            lam = verify_td(obj) if obj.t == t else None
            if obj.t != t:
                raise UsageError(f"TD file declares strength {obj.t}, not {t}")
            verdicts.append({"check": "design-t", "t": t, "passed": lam is not None, "lambda": lam})
        elif ann is not None:
            lam = verify_t_design(ann.as_design(), t)
            verdicts.append({"check": "design-t", "t": t, "passed": lam is not None, "lambda": lam})
        elif kind in ("strategy", "large_set"):
            anns = obj.announcements if kind == "strategy" else obj.members
            lams = [verify_t_design(x if kind == "large_set" else x.as_design(), t) for x in anns]
            verdicts.append({"check": "design-t", "t": t, "lambda": lams,
                             "passed": all(x is not None for x in lams)})
        else:
            raise UsageError(f"--design-t does not apply to {kind}")

    if args.large_set_t is not None:
        if kind != "large_set":
            raise UsageError("--large-set-t needs a LargeSet file")
        rep = verify_large_set(obj, args.large_set_t)
        verdicts.append({"check": "large-set-t", "t": args.large_set_t, "passed": rep.passed,
                         "members": rep.member_count, "expected_members": rep.expected_members,
                         "member_lambdas": rep.member_lambdas, "missing": rep.missing,
                         "repeated": rep.repeated, "problems": rep.problems})

    if args.oa:
        if kind != "oa":
            raise UsageError("--oa needs an OA file")
        res = verify_oa(obj)
        w = res.witness
        verdicts.append({"check": "oa", "passed": bool(res), "witness": None if w is None else {
            "columns": list(w.columns), "symbols": list(w.symbols), "count": w.count}})

    if args.informative_c is not None:
        c = args.informative_c
        if ann is not None:
            res = is_informative(ann, c)
            verdicts.append({"check": "informative", "c": c, **_informative_doc(res)})
        elif kind in ("strategy", "large_set"):
            s = _as_strategy(kind, obj, args)
            results = [is_informative(x, c) for x in s.announcements]
            verdicts.append({"check": "informative", "c": c, "passed": all(results),
                             "per_announcement": [bool(x) for x in results]})
        else:
            raise UsageError(f"--informative-c does not apply to {kind}")

    for level, delta in ((PERFECT, args.perfect_delta), (WEAK, args.weak_delta)):
        if delta is None:
            continue
        c = _security_c(args)
        name = f"{level}-delta"
        log.info("checking %s %d-security at c=%d", level, delta, c)
        if ann is not None:
            v = check_announcement_security(ann, c, delta, level, workers)
            verdicts.append({"check": name, "c": c, "passed": v.passed, **jsonio.verdict_doc(v)})
        elif kind in ("strategy", "large_set"):
            s = _as_strategy(kind, obj, args)
            if s.pile_size is not None:
                raise UsageError("transversal strategies take --transversal-delta")
            rep = verify_strategy(s, delta, level, workers)
            verdicts.append({"check": name, "c": c, "passed": rep.passed,
                             **_strategy_report_doc(rep)})
        else:
            raise UsageError(f"--{name} does not apply to {kind}")

    if args.transversal_delta is not None:
        delta = args.transversal_delta
        if kind == "td":
            c = _security_c(args)
            v = check_transversal_security(obj, c, delta)
            verdicts.append({"check": "transversal-delta", "passed": v.passed, **_transversal_doc(v)})
        elif kind == "strategy" and obj.pile_size is not None:
            rep = verify_transversal_strategy(obj, delta)
            verdicts.append({"check": "transversal-delta", "passed": rep.passed,
                             "optimal": rep.optimal, **_toolkit_doc(rep)})
        else:
            raise UsageError("--transversal-delta needs a TD file or a transversal strategy")

    return verdicts


def cmd_verify(args) -> int:
    started = time.perf_counter()
    workers = threads(args)
    kind, obj, _ = jsonio.load(args.target)
    verdicts = _run_checks(kind, obj, args, workers)
    if not verdicts:
        raise UsageError("no checks requested")
    passed = all(v["passed"] for v in verdicts)
    _emit({"command": "verify", "target": args.target, "kind": kind,
           "parameters": {k: getattr(args, k) for k in (
               "design_t", "large_set_t", "informative_c", "c", "perfect_delta",
               "weak_delta", "transversal_delta", "oa")},
           "verdicts": verdicts, "passed": passed}, args, started)
    return 0 if passed else 1


# -- simulate ------------------------------------------------------------------


def _coverage(s: Strategy) -> dict:
    mult = hand_multiplicities(s)
    missing, first = 0, None
    for h in s.possible_hands():
        if h not in mult:
            missing += 1
            first = first or list(h)
    return {"passed": missing == 0, "missing": missing, "first_missing": first}


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    kind, obj, _ = jsonio.load(args.strategy)
    a, b, c = args.a, args.b, args.c
    if kind == "strategy":
        s = obj
        if (s.a, s.b, s.c) != (a, b, c):
            raise UsageError(f"strategy file is for (a,b,c)=({s.a},{s.b},{s.c})")
    elif kind == "large_set":
        s = Strategy(a + b + c, a, b, c, tuple(Announcement.from_design(m) for m in obj.members))
    elif kind in ("announcement", "design"):
        s = Strategy(a + b + c, a, b, c, (_as_announcement(kind, obj),))
    else:
        raise UsageError(f"cannot simulate with a {kind} file")
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    params = {"a": a, "b": b, "c": c, "trials": args.trials, "seed": args.seed,
              "pile_size": s.pile_size}
    cov = _coverage(s)
    doc = {"command": "simulate", "strategy": args.strategy, "parameters": params,
           "coverage": cov}
    if not cov["passed"]:
        _emit(doc, args, started)
        return 1
    log.info("simulating %d trials", args.trials)
    summary = simulate(s, args.trials, args.seed)
    doc["summary"] = {
        "trials": summary.trials,
        "bob_successes": summary.bob_successes,
        "bob_success_rate": jsonio.frac(summary.bob_success_rate),
        "posterior_values": [jsonio.frac(x) for x in summary.posterior_values],
        "max_deviation": jsonio.frac(summary.max_deviation),
    }
    _emit(doc, args, started)
    return 0


# -- bounds --------------------------------------------------------------------


def cmd_bounds(args) -> int:
    started = time.perf_counter()
    a, b, c = args.a, args.b, args.c
    bd = bounds(a, b, c, a + b + c)
    _emit({"command": "bounds", "parameters": {"a": a, "b": b, "c": c},
           "bounds": {"min_announcements": bd.min_announcements,
                      "max_perfect_delta_informative": bd.max_perfect_delta_informative,
                      "informative_possible": bd.informative_possible,
                      "informative_weak1_possible": bd.informative_weak1_possible}},
          args, started)
    return 0


# -- parser --------------------------------------------------------------------

KINDS = ["sts", "ag32", "large-set-sts9", "projective", "paley", "inversive", "witt24",
         "derived", "trivial", "rs-oa", "td", "td-large-set", "geometric"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    common.add_argument("--threads", type=int, default=1,
                        help="verifier threads (CARDSEC_THREADS overrides)")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    p = argparse.ArgumentParser(prog="cardsec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a design or strategy")
    c.add_argument("kind", choices=KINDS)
    c.add_argument("-o", "--output", help="write the artifact here and print a summary")
    for name, text in (("v", "points"), ("k", "block size, or columns kept"), ("t", "strength"),
                       ("q", "field order"), ("x", "point to derive at"),
                       ("lam", "index of a trivial design"), ("a", "Alice's hand size"),
                       ("c", "Cathy's hand size"), ("p", "order of the affine space"),
                       ("d", "affine dimension minus one"), ("s", "hyperplanes per block")):
        c.add_argument(f"--{name}", type=int, help=text)

    v = sub.add_parser("verify", parents=[common], help="check a JSON artifact")
    v.add_argument("target", help="JSON design, large set, announcement, strategy, OA or TD")
    v.add_argument("--design-t", type=int, help="check t-design strength")
    v.add_argument("--large-set-t", type=int, help="check a large set of t-designs")
    v.add_argument("--informative-c", type=int, help="check informativeness against c")
    v.add_argument("--c", type=int, help="Cathy's hand size for security checks")
    v.add_argument("--perfect-delta", type=int, help="check perfect delta-security")
    v.add_argument("--weak-delta", type=int, help="check weak delta-security")
    v.add_argument("--transversal-delta", type=int, help="check transversal posteriors")
    v.add_argument("--oa", action="store_true", help="check orthogonal-array strength")

    s = sub.add_parser("simulate", parents=[common], help="play seeded protocol runs")
    s.add_argument("strategy", help="JSON strategy or large set")
    for name in ("a", "b", "c"):
        s.add_argument(f"--{name}", type=int, required=True, help="hand size")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0, help="SplitMix64 seed")

    b = sub.add_parser("bounds", parents=[common], help="necessary-condition bounds")
    for name in ("a", "b", "c"):
        b.add_argument(f"--{name}", type=int, required=True)
    return p


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "simulate": cmd_simulate,
            "bounds": cmd_bounds}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(stream=sys.stderr, format="cardsec: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError, jsonio.SchemaError) as e:
        print(f"cardsec {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
