"""Command-line interface.

Subcommands: analyze, check, vector, examples, verify, scan. Exit status:
0 on success/consistency, 1 on any disagreement or inconsistency, 2 on
usage or parse errors (including cap violations and unknown names).
"""

from __future__ import annotations

import argparse
import sys

from .catalog import EXAMPLE_FIXTURES, build, default_corpus
from .classes import GroupClass, is_class, p_part, primes_of
from .embeddings import (
    CLI_PROPERTY_NAMES,
    PROPERTY_BY_CLI_NAME,
    EmbeddingKind,
    evaluate_property,
    property_vector,
)
from .group import CapExceeded, Caps, Subgroup, subgroup_of
from .lattice import characteristic, chief_series, o_subgroups, sylow_all
from .perm import ParseError, parse_cycles
from .report import build_report, report_bytes
from .theorems import (
    LEMMA_IDS,
    TheoremId,
    corpus_scan,
    default_theorem_grid,
    example_check,
    lemma_check,
    theorem_check,
)

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2


class CliError(Exception):
    def __init__(self, code: str, message: str) -> None:
        self.code = code
        super().__init__(message)


def _parse_caps(text: str | None) -> Caps | None:
    if not text:
        return None
    elem, lat = 20000, 400
    for part in text.split(","):
        name, _, value = part.partition("=")
        name = name.strip()
        try:
            if name in ("elem", "element"):
                elem = int(value)
            elif name in ("lat", "lattice"):
                lat = int(value)
            else:
                raise ValueError
        except ValueError:
            raise CliError("bad-caps", f"cannot parse caps component {part!r}") from None
    return Caps(element=elem, lattice=lat)


def _build_group(expr: str, caps: Caps | None):
    try:
        return build(expr, caps=caps)
    except ParseError as exc:
        raise CliError("parse-error", str(exc)) from None


def _parse_subgroup(g, gens_text: str) -> Subgroup:
    gens = []
    for part in gens_text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            gens.append(parse_cycles(part, g.degree))
        except ParseError as exc:
            raise CliError("parse-error", str(exc)) from None
    try:
        return subgroup_of(g, gens)
    except ValueError as exc:
        raise CliError("not-a-subgroup", str(exc)) from None


def _sub_info(s) -> dict:
    from .perm import format_cycles

    return {"order": s.order, "generators": [format_cycles(p) for p in s.generators]}


# ---------------------------------------------------------------------------
# subcommand implementations (each returns (result, counters, exit_code))


def _cmd_analyze(args, caps):
    g = _build_group(args.group, caps)
    primes = sorted(primes_of(g))
    sylows = {
        str(p): {"order": p_part(g, p), "count": len(sylow_all(g, p))} for p in primes
    }
    chars = {}
    for which in ("center", "derived", "fitting"):
        chars[which] = _sub_info(characteristic(g, which))
    for which in ("frattini", "layer", "f_star"):
        try:
            chars[which] = _sub_info(characteristic(g, which))
        except CapExceeded as exc:
            chars[which] = {"indeterminate": str(exc)}
    os = {}
    for p in primes:
        os[str(p)] = {
            "O_p": o_subgroups(g, "O_p", p).order,
            "O_p'": o_subgroups(g, "O_p'", p).order,
            "O^p": o_subgroups(g, "O^p", p).order,
        }
    klasses = {
        "nilpotent": is_class(g, GroupClass("nilpotent")),
        "supersolvable": is_class(g, GroupClass("supersolvable")),
        "solvable": is_class(g, GroupClass("solvable")),
    }
    for p in primes:
        klasses[f"p_nilpotent({p})"] = is_class(g, GroupClass("p_nilpotent", p))
    try:
        klasses["A4_free"] = is_class(g, GroupClass("A4_free"))
    except CapExceeded as exc:
        klasses["A4_free"] = "indeterminate"
    cs = chief_series(g)
    result = {
        "group": args.group,
        "order": g.order,
        "degree": g.degree,
        "primes": primes,
        "sylow": sylows,
        "characteristic_subgroups": chars,
        "o_subgroups": os,
        "classes": klasses,
        "chief_factors": [
            {"order": f.order, "kind": f.kind, "p": f.p, "exponent": f.exponent}
            for f in cs.factors
        ],
    }
    return result, {}, EXIT_OK


def _cmd_check(args, caps):
    g = _build_group(args.group, caps)
    h = _parse_subgroup(g, args.subgroup)
    kind = PROPERTY_BY_CLI_NAME.get(args.property)
    if kind is None:
        raise CliError(
            "unknown-property",
            f"unknown property {args.property!r}; known: "
            + ", ".join(sorted(PROPERTY_BY_CLI_NAME)),
        )
    try:
        flag, witness = evaluate_property(g, h, kind)
    except CapExceeded as exc:
        raise CliError("cap-exceeded", str(exc)) from None
    result = {
        "group": args.group,
        "subgroup": _sub_info(h),
        "property": args.property,
        "holds": flag,
        "witness": witness,
    }
    return result, {}, EXIT_OK


def _cmd_vector(args, caps):
    g = _build_group(args.group, caps)
    h = _parse_subgroup(g, args.subgroup)
    vec = property_vector(g, h)
    result = {
        "group": args.group,
        "subgroup": vec.subgroup,
        "flags": {
            k: ("indeterminate" if v is None else v) for k, v in sorted(vec.flags.items())
        },
        "witnesses": dict(sorted(vec.witnesses.items())),
    }
    return result, {}, EXIT_OK


def _cmd_examples(args, caps):
    ids = [args.id] if args.id else sorted(EXAMPLE_FIXTURES)
    for eid in ids:
        if eid not in EXAMPLE_FIXTURES:
            raise CliError(
                "unknown-example",
                f"unknown example id {eid!r}; known: {sorted(EXAMPLE_FIXTURES)}",
            )
    reports = [example_check(eid, caps=caps) for eid in ids]
    agree = all(r["agree"] for r in reports)
    counters = {
        "examples": len(reports),
        "agreeing": sum(r["agree"] for r in reports),
    }
    return {"examples": reports, "agree": agree}, counters, (
        EXIT_OK if agree else EXIT_DISAGREE
    )


def _materialize(max_order: int, caps):
    corpus = default_corpus(max_order)
    groups = []
    skipped = []
    for e in corpus.entries:
        try:
            groups.append((e.id, corpus.group(e, caps=caps)))
        except CapExceeded as exc:
            skipped.append({"group": e.id, "reason": str(exc)})
    return corpus, groups, skipped


def _cmd_verify(args, caps):
    if bool(args.lemma) == bool(args.theorem):
        raise CliError("usage", "verify needs exactly one of --lemma or --theorem")
    if args.lemma:
        if args.lemma not in LEMMA_IDS:
            raise CliError(
                "unknown-lemma",
                f"unknown lemma {args.lemma!r}; known: {list(LEMMA_IDS)}",
            )
        corpus, groups, skipped = _materialize(args.max_order, caps)
        rep = lemma_check(args.lemma, groups, caps=caps)
        rep["skipped_entries"] = skipped
        counters = {
            "instances": rep["instances"],
            "failed": rep["failed"],
            "skipped": rep["skipped"],
        }
        return rep, counters, (EXIT_OK if rep["failed"] == 0 else EXIT_DISAGREE)
    try:
        thm = TheoremId(args.theorem, args.p, args.n)
    except ValueError as exc:
        raise CliError("usage", str(exc)) from None
    corpus = default_corpus(args.max_order)
    rep = corpus_scan(corpus, [thm], caps=caps, fast=args.fast_sylow, jobs=args.jobs)
    counters = dict(rep["aggregate"])
    code = EXIT_OK if counters["inconsistent"] == 0 else EXIT_DISAGREE
    return rep, counters, code


def _cmd_scan(args, caps):
    corpus = default_corpus(args.max_order)
    rep = corpus_scan(
        corpus,
        default_theorem_grid(),
        caps=caps,
        fast=args.fast_sylow,
        jobs=args.jobs,
    )
    counters = dict(rep["aggregate"])
    code = EXIT_OK if counters["inconsistent"] == 0 else EXIT_DISAGREE
    return rep, counters, code


# ---------------------------------------------------------------------------
# text rendering


def _render_text(command: str, result, counters) -> str:
    lines: list[str] = []
    if command == "analyze":
        lines.append(f"group {result['group']}: order {result['order']}, degree {result['degree']}")
        lines.append(f"primes: {result['primes']}")
        for p, info in result["sylow"].items():
            lines.append(f"sylow {p}: order {info['order']}, count {info['count']}")
        for name, sub in result["characteristic_subgroups"].items():
            lines.append(f"{name}: {sub.get('order', sub)}")
        for name, val in result["classes"].items():
            lines.append(f"class {name}: {val}")
        lines.append(
            "chief factors: "
            + ", ".join(f"{f['order']}({f['kind']})" for f in result["chief_factors"])
        )
    elif command in ("check",):
        lines.append(
            f"{result['property']} on subgroup of order {result['subgroup']['order']}: {result['holds']}"
        )
        lines.append(f"witness: {result['witness']}")
    elif command == "vector":
        for k, v in result["flags"].items():
            lines.append(f"{k}: {v}")
    elif command == "examples":
        for r in result["examples"]:
            status = "agree" if r["agree"] else "DISAGREE"
            lines.append(f"{r['id']} [{status}] group order {r['group_order']}")
            for c in r["claims"]:
                lines.append(
                    f"  {c['property']}: expected {c['expected']}, computed {c['computed']}"
                )
            if "notes" in r:
                lines.append(f"  notes: {r['notes']}")
    elif command in ("verify", "scan"):
        if "lemma" in result:
            lines.append(
                f"{result['lemma']}: {result['passed']}/{result['instances']} passed, "
                f"{result['failed']} failed, {result['skipped']} skipped"
            )
            for f in result["failures"]:
                lines.append(f"  failure: {f}")
        else:
            agg = result["aggregate"]
            lines.append(
                f"verdicts: {agg['consistent']} consistent, {agg['inconsistent']} inconsistent, "
                f"{agg['indeterminate']} indeterminate"
            )
            for v in result["inconsistent_verdicts"]:
                lines.append(f"  INCONSISTENT: {v['group']} under {v['theorem']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permembed",
        description="subgroup embedding properties and structural verdicts "
        "for small permutation groups",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--out", metavar="PATH", help="also write the report to PATH")
    common.add_argument(
        "--caps",
        metavar="elem=K,lattice=L",
        help="override the element/lattice caps",
    )
    common.add_argument(
        "--jobs", type=int, default=1, help="concurrent per-group tasks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="orders, Sylows, classes")
    p.add_argument("--group", required=True, metavar="EXPR")

    p = sub.add_parser("check", parents=[common], help="one embedding property")
    p.add_argument("--group", required=True, metavar="EXPR")
    p.add_argument("--subgroup", required=True, metavar="GENS")
    p.add_argument("--property", required=True, metavar="NAME")

    p = sub.add_parser("vector", parents=[common], help="all embedding properties")
    p.add_argument("--group", required=True, metavar="EXPR")
    p.add_argument("--subgroup", required=True, metavar="GENS")

    p = sub.add_parser("examples", parents=[common], help="run bundled fixtures")
    p.add_argument("--id", metavar="E1_3..E1_6")

    p = sub.add_parser("verify", parents=[common], help="one lemma or theorem")
    p.add_argument("--lemma", metavar="ID")
    p.add_argument("--theorem", metavar="ID")
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--max-order", type=int, default=60)
    p.add_argument("--fast-sylow", action="store_true")

    p = sub.add_parser("scan", parents=[common], help="full theorem grid")
    p.add_argument("--max-order", type=int, default=60)
    p.add_argument("--fast-sylow", action="store_true")
    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "check": _cmd_check,
    "vector": _cmd_vector,
    "examples": _cmd_examples,
    "verify": _cmd_verify,
    "scan": _cmd_scan,
}


def _invocation_options(args) -> dict:
    skip = {"command", "json", "out"}
    return {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        caps = _parse_caps(args.caps)
        result, counters, code = _COMMANDS[args.command](args, caps)
    except CliError as exc:
        payload = {"error": {"code": exc.code, "message": str(exc)}}
        if args.json:
            sys.stdout.write(
                report_bytes(
                    build_report(args.command, _invocation_options(args), payload)
                ).decode()
            )
        else:
            sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return EXIT_USAGE
    except CapExceeded as exc:
        payload = {"error": {"code": "cap-exceeded", "message": str(exc)}}
        if args.json:
            sys.stdout.write(
                report_bytes(
                    build_report(args.command, _invocation_options(args), payload)
                ).decode()
            )
        else:
            sys.stderr.write(f"error[cap-exceeded]: {exc}\n")
        return EXIT_USAGE
    report = build_report(args.command, _invocation_options(args), result, counters)
    if args.json:
        text = report_bytes(report).decode()
    else:
        text = _render_text(args.command, result, counters)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report_bytes(report).decode())
        if not args.json:
            sys.stdout.write(text)
        else:
            sys.stdout.write(f"report written to {args.out}\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
