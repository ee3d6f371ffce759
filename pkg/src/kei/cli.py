"""Command-line front end.

Exit codes: 0 on success, 1 on domain errors (axiom violations, overflow,
size limits), 2 on usage and parse errors.  All output is deterministic for
identical inputs and flags, including across --workers settings.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .analysis import AnalysisReport, analyze
from .constructions import (
    EmptyQuandle,
    ToleranceViolation,
    abelian_core,
    conj_involutions,
    core_of_group,
    dihedral_quandle,
    identity_form,
    reflection_quandle,
)
from .enumeration import (
    InvalidEnvelope,
    NotConnected,
    SizeLimit,
    catalog_file_name,
    counts,
    counts_tsv,
    enumerate_connected,
    is_affine,
)
from .knot import (
    CompletionOverflow,
    InconsistentArcs,
    PresentationSyntaxError,
    UndeclaredGenerator,
    complete,
    parse_crossings,
    parse_presentation,
    unknot_test,
)
from .permgroup import (
    DegreeMismatch,
    Overflow,
    alternating_group,
    dihedral_group,
    quaternion_group,
    sl2,
    symmetric_group,
)
from .quandle import (
    AxiomViolation,
    MalformedTable,
    Quandle,
    SizeLimit as TableSizeLimit,
    format_table,
    parse_table,
    validate,
)

DOMAIN_ERRORS = (
    AxiomViolation,
    Overflow,
    CompletionOverflow,
    EmptyQuandle,
    SizeLimit,
    TableSizeLimit,
    NotConnected,
    InvalidEnvelope,
    ToleranceViolation,
    DegreeMismatch,
    ValueError,
)
class BadSpecifier(ValueError):
    pass


PARSE_ERRORS = (
    MalformedTable,
    PresentationSyntaxError,
    UndeclaredGenerator,
    InconsistentArcs,
    BadSpecifier,
    OSError,
)


@dataclass(frozen=True)
class ReportDocument:
    subject: str
    version: str
    input_digest: str
    report: AnalysisReport


def emit_report(doc: ReportDocument, fmt: str) -> str:
    """Render a report; 'structured' is stable sorted-key JSON, 'human' is a
    line-oriented text block.  parse_report inverts the structured form."""
    if fmt == "structured":
        payload = {
            "subject": doc.subject,
            "version": doc.version,
            "input_digest": doc.input_digest,
            "report": asdict(doc.report),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    r = doc.report
    yesno = lambda b: "yes" if b else "no"
    lines = [
        f"subject: {doc.subject}",
        f"version: {doc.version}",
        f"input-digest: {doc.input_digest}",
        f"order: {r.n}",
        f"connected: {yesno(r.connected)}",
        f"faithful: {yesno(r.faithful)}",
        f"latin: {yesno(r.latin)}",
        f"medial: {yesno(r.medial)}",
        f"balanced: {yesno(r.balanced)}",
        f"simple: {yesno(r.simple)}",
        f"lmlt-order: {r.lmlt_order}",
        f"dis-order: {r.dis_order}",
        f"lmlt-derived-order: {r.lmlt_derived_order}",
        f"orbit-count: {r.orbit_count}",
    ]
    for e, lengths in enumerate(r.cycle_lengths):
        lines.append(f"cycle-lengths[e={e}]: " + " ".join(map(str, lengths)))
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ReportDocument:
    payload = json.loads(text)
    report = payload["report"]
    report["cycle_lengths"] = tuple(tuple(row) for row in report["cycle_lengths"])
    return ReportDocument(
        subject=payload["subject"],
        version=payload["version"],
        input_digest=payload["input_digest"],
        report=AnalysisReport(**report),
    )


# ---------------------------------------------------------------------------
# construction specifiers:  core:Z4  core:Z3xZ3  conj:S4  dihedral:5
# refl:q=7,dim=2,form=I  sl2:q=3
# ---------------------------------------------------------------------------

def _group_by_name(name: str):
    if name.startswith("Z"):
        factors = [int(part[1:]) for part in name.split("x")]
        if any(f < 1 for f in factors):
            raise ValueError(f"bad cyclic order in {name!r}")
        from .permgroup import abelian_group

        return abelian_group([f for f in factors if f > 1])
    if name.startswith("D"):
        return dihedral_group(int(name[1:]))
    if name == "Q8":
        return quaternion_group()
    if name.startswith("S"):
        return symmetric_group(int(name[1:]))
    if name.startswith("A"):
        return alternating_group(int(name[1:]))
    raise ValueError(f"unknown group {name!r}")


def build_construction(spec: str) -> Quandle:
    try:
        return _build_construction(spec)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, (EmptyQuandle, AxiomViolation)):
            raise
        raise BadSpecifier(f"bad construction specifier {spec!r}: {exc}") from exc


def _build_construction(spec: str) -> Quandle:
    kind, _, arg = spec.partition(":")
    if not arg:
        raise ValueError("missing argument")
    if kind == "core":
        return core_of_group(_group_by_name(arg))
    if kind == "conj":
        return conj_involutions(_group_by_name(arg))
    if kind == "dihedral":
        return dihedral_quandle(int(arg))
    if kind == "sl2":
        params = _keyvals(arg)
        return core_of_group(sl2(int(params["q"])))
    if kind == "refl":
        params = _keyvals(arg)
        if params.get("form", "I") != "I":
            raise ValueError("only form=I is supported from the command line")
        return reflection_quandle(identity_form(int(params["q"]), int(params["dim"])))
    raise ValueError(f"unknown construction kind {kind!r}")


def _keyvals(arg: str) -> dict[str, str]:
    out = {}
    for part in arg.split(","):
        key, _, value = part.partition("=")
        if not value:
            raise ValueError(f"bad parameter {part!r}")
        out[key] = value
    return out


def _load_quandle(path_or_spec: str) -> tuple[Quandle, str, str]:
    """Returns (quandle, subject descriptor, table text)."""
    if ":" in path_or_spec and not os.path.exists(path_or_spec):
        q = build_construction(path_or_spec)
        return q, path_or_spec, format_table(q)
    with open(path_or_spec, "r", encoding="utf-8") as fh:
        text = fh.read()
    q = validate(parse_table(text))
    return q, path_or_spec, text


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_check(args) -> int:
    with open(args.table, "r", encoding="utf-8") as fh:
        magma = parse_table(fh.read())
    q = validate(magma)  # raises AxiomViolation -> exit 1
    print(f"ok: involutory quandle of order {q.n}")
    return 0


def _cmd_analyze(args) -> int:
    q, subject, text = _load_quandle(args.table)
    digest = hashlib.sha256(text.encode()).hexdigest()
    doc = ReportDocument(subject, __version__, digest, analyze(q))
    sys.stdout.write(emit_report(doc, args.format))
    return 0


def _cmd_construct(args) -> int:
    q = build_construction(args.spec)
    text = format_table(q)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote order-{q.n} table to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _looks_like_crossings(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        return line.split()[0] in ("x", "arcs")
    return False


def _cmd_knot_complete(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    if _looks_like_crossings(text):
        from .knot import crossings_to_presentation

        pres = crossings_to_presentation(parse_crossings(text))
    else:
        pres = parse_presentation(text)
    q = complete(pres, args.max_elements)
    factors = is_affine(q)
    if factors is not None:
        name = "Z1" if not factors else "x".join(f"Z{m}" for m in factors)
        print(f"order {q.n}; isomorphic to core({name})")
    else:
        print(f"order {q.n}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(format_table(q))
    return 0


def _cmd_knot_unknot(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        d = parse_crossings(fh.read())
    result = unknot_test(d, args.max_elements)
    if result.verdict == "nontrivial" and result.order is not None:
        print(f"nontrivial (quandle order {result.order})")
    elif result.verdict == "nontrivial":
        print(f"nontrivial (separating quotient mod {result.separating_modulus})")
    else:
        print(result.verdict)
    return 0


def _cmd_enumerate(args) -> int:
    catalog = enumerate_connected(args.n, workers=args.workers)
    print(f"order {args.n}: {len(catalog)} connected involutory quandles")
    if args.catalog:
        os.makedirs(args.catalog, exist_ok=True)
        for i, q in enumerate(catalog):
            path = os.path.join(args.catalog, catalog_file_name(args.n, i))
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(format_table(q))
        row = counts(args.n, workers=args.workers)
        with open(os.path.join(args.catalog, "counts.tsv"), "w", encoding="utf-8") as fh:
            fh.write(counts_tsv([row]))
    return 0


def _cmd_counts(args) -> int:
    rows = [counts(n, workers=args.workers) for n in range(args.low, args.high + 1)]
    sys.stdout.write(counts_tsv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kei",
        description="Finite involutory quandles: validation, analysis, "
        "construction, knot quandles and enumeration.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="reserved for interface stability; all algorithms are "
        "deterministic and this flag has no effect",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a Cayley table file")
    p.add_argument("table")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("analyze", help="structural report for a table or spec")
    p.add_argument("table", help="table file, or a construction specifier")
    p.add_argument("--format", choices=("human", "structured"), default="human")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("construct", help="build a quandle from a specifier")
    p.add_argument("spec", help="e.g. core:Z4, conj:S3, dihedral:5, "
                   "refl:q=7,dim=2,form=I, sl2:q=3")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_construct)

    knot = sub.add_parser("knot", help="knot quandle computations")
    knot_sub = knot.add_subparsers(dest="knot_command", required=True)
    p = knot_sub.add_parser("complete", help="finish a presentation or diagram")
    p.add_argument("input", help="presentation or crossing-list file")
    p.add_argument("--max-elements", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_knot_complete)
    p = knot_sub.add_parser("unknot", help="unknot test for a crossing list")
    p.add_argument("input")
    p.add_argument("--max-elements", type=int, default=None)
    p.set_defaults(func=_cmd_knot_unknot)

    p = sub.add_parser("enumerate", help="connected involutory quandles of order n")
    p.add_argument("n", type=int)
    p.add_argument("--catalog", help="directory for ivq-n<order>-<i>.tbl files")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("counts", help="connected/latin/affine counts for a range")
    p.add_argument("low", type=int)
    p.add_argument("high", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_counts)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
