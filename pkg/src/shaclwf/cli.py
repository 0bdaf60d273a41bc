"""Command-line entry point binding all the package's capabilities.

Subcommands
-----------
validate GRAPH DOC     does the graph validate the document?
models GRAPH DOC       enumerate the supported models of the constraints
translate DOC SHAPE    print the fixpoint-formula translation of a shape
eval GRAPH FORMULA     evaluate a fixpoint formula on a graph
sat DOC SHAPE          bounded shape-satisfiability search
docsat DOC             bounded document-satisfiability search
implies DOC1 DOC2      bounded counterexample search for implication
automaton DOC SHAPE    build the tree automaton and inspect its table

Exit codes form a total taxonomy: 0 means the verdict is true /
satisfiable; 1 means false / counterexample found; 2 means inconclusive
(a bounded search exhausted its bound or budget without deciding — a
semi-decision, never to be confused with 0); 3 means usage, parse, or
budget errors.  ``--json`` wraps every outcome in an envelope that
validates against the shipped ``verdict_schema.json``.

The satisfiability and implication questions are undecidable under
supported-model semantics, so ``--semantics supported`` on ``sat`` and
``implies`` is rejected unless the caller acknowledges the bounded
nature of the answer with ``--bounded-only``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .automata import (
    build_2ata,
    enumerate_guesses,
    make_symbol,
    parse_symbol,
    pbf_to_text,
    state_to_text,
    symbol_to_text,
)
from .model import (
    BudgetExceeded,
    Document,
    ShaclError,
    normalize,
    restrict_to,
)
from .mu import eval as mu_eval
from .mu import mu_to_text, parse_mu
from .search import (
    DEFAULT_MAX_NODES,
    SearchOutcome,
    doc_sat_bounded,
    implies_bounded,
    shape_sat_bounded,
)
from .supported import enumerate_supported_models
from .syntax import graph_to_text, parse_document, parse_graph
from .translate import translate
from .wf import format_trace, validates, well_founded_model

WF = "wf"
SUPPORTED = "supported"

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; in this tool's exit
    taxonomy 2 means *inconclusive*, so usage errors are moved to 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input loading
# ---------------------------------------------------------------------------

def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_graph(path: str):
    return parse_graph(_read(path))


def _load_document(path: str) -> Document:
    return parse_document(_read(path))


def _load_formula(arg: str):
    """A file path if one exists, otherwise the formula text itself."""
    import os

    if os.path.exists(arg):
        return parse_mu(_read(arg))
    return parse_mu(arg)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

class _Reporter:
    """Collects one run's result and renders it as text or JSON."""

    def __init__(self, command: str, as_json: bool):
        self.command = command
        self.as_json = as_json
        self.fields: dict = {}
        self.lines: list[str] = []

    def field(self, name: str, value) -> None:
        self.fields[name] = value

    def line(self, text: str) -> None:
        self.lines.append(text)

    def finish(self, verdict: str, exit_code: int) -> int:
        if self.as_json:
            envelope = {"command": self.command, "verdict": verdict,
                        "exit": exit_code}
            envelope.update(self.fields)
            print(json.dumps(envelope, ensure_ascii=False, sort_keys=True))
        else:
            for text in self.lines:
                print(text)
        return exit_code


def _error(command: str, as_json: bool, message: str) -> int:
    if as_json:
        print(json.dumps({"command": command, "verdict": "error",
                          "exit": EXIT_ERROR, "error": message},
                         ensure_ascii=False, sort_keys=True))
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _report_search(rep: _Reporter, out: SearchOutcome, *, hit_verdict: str,
                   hit_exit: int, hit_label: str) -> int:
    rep.field("graphs_examined", out.graphs_examined)
    rep.field("bound", out.bound)
    rep.field("complete", out.complete)
    rep.field("elapsed_ms", round(out.elapsed_ms, 3))
    if out.found:
        text = graph_to_text(out.witness)
        rep.field("witness", text)
        rep.field("witness_nodes", len(out.witness.domain))
        rep.line(f"{hit_label}: witness with {len(out.witness.domain)} "
                 f"node(s) after {out.graphs_examined} graph(s)")
        rep.line(text)
        return rep.finish(hit_verdict, hit_exit)
    state = ("search complete up to the bound" if out.complete
             else "budget exhausted before the bound")
    rep.line(f"inconclusive: no witness up to {out.bound} node(s); "
             f"{out.graphs_examined} graph(s) examined; {state}")
    return rep.finish("inconclusive", EXIT_INCONCLUSIVE)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    rep = _Reporter("validate", args.json)
    g = _load_graph(args.graph)
    d = _load_document(args.document)
    rep.field("semantics", args.semantics)
    if args.semantics == SUPPORTED:
        from .search import brave_validates

        valid = brave_validates(g, d)
    else:
        result = well_founded_model(g, d.constraints)
        valid = validates(g, d, result.model)
        if args.trace:
            trace_text = format_trace(list(result.trace))
            rep.field("trace", trace_text.splitlines())
            rep.line(trace_text)
    rep.line("true" if valid else "false")
    return rep.finish("true" if valid else "false",
                      EXIT_TRUE if valid else EXIT_FALSE)


def _cmd_models(args) -> int:
    rep = _Reporter("models", args.json)
    g = _load_graph(args.graph)
    d = _load_document(args.document)
    models = enumerate_supported_models(g, d.constraints)
    rep.field("models", [m.literals() for m in models])
    rep.line(f"{len(models)} supported model(s)")
    for i, m in enumerate(models, start=1):
        body = " ".join(m.literals()) or "(empty)"
        rep.line(f"model {i}: {body}")
    any_model = bool(models)
    return rep.finish("true" if any_model else "false",
                      EXIT_TRUE if any_model else EXIT_FALSE)


def _cmd_translate(args) -> int:
    rep = _Reporter("translate", args.json)
    d = _load_document(args.document)
    formula = translate(d.constraints, args.shape, clean=args.clean)
    text = mu_to_text(formula)
    rep.field("formula", text)
    rep.line(text)
    return rep.finish("ok", EXIT_TRUE)


def _cmd_eval(args) -> int:
    rep = _Reporter("eval", args.json)
    g = _load_graph(args.graph)
    formula = _load_formula(args.formula)
    extension = sorted(mu_eval(formula, g))
    rep.field("extension", extension)
    rep.line("{" + ", ".join(extension) + "}")
    return rep.finish("ok", EXIT_TRUE)


def _require_bounded_ack(args, parser: _Parser) -> None:
    if args.semantics == SUPPORTED and not args.bounded_only:
        parser.error(
            "satisfiability and implication are undecidable under "
            "supported-model semantics; pass --bounded-only to accept a "
            "bounded search")


def _cmd_sat(args, parser: _Parser) -> int:
    _require_bounded_ack(args, parser)
    rep = _Reporter("sat", args.json)
    d = _load_document(args.document)
    rep.field("semantics", args.semantics)
    out = shape_sat_bounded(d.constraints, args.shape, args.max_nodes,
                            semantics=args.semantics,
                            budget_ms=args.budget_ms)
    return _report_search(rep, out, hit_verdict="satisfiable",
                          hit_exit=EXIT_TRUE, hit_label="satisfiable")


def _cmd_docsat(args) -> int:
    rep = _Reporter("docsat", args.json)
    d = _load_document(args.document)
    rep.field("semantics", args.semantics)
    out = doc_sat_bounded(d, args.max_nodes, semantics=args.semantics,
                          budget_ms=args.budget_ms)
    return _report_search(rep, out, hit_verdict="satisfiable",
                          hit_exit=EXIT_TRUE, hit_label="satisfiable")


def _cmd_implies(args, parser: _Parser) -> int:
    _require_bounded_ack(args, parser)
    rep = _Reporter("implies", args.json)
    d1 = _load_document(args.document)
    d2 = _load_document(args.other)
    rep.field("semantics", args.semantics)
    out = implies_bounded(d1, d2, args.max_nodes, semantics=args.semantics,
                          budget_ms=args.budget_ms)
    # a witness graph validates the first document but not the second, so
    # it REFUTES the implication; absence up to the bound never proves it
    return _report_search(rep, out, hit_verdict="counterexample",
                          hit_exit=EXIT_FALSE, hit_label="counterexample")


def _cmd_automaton(args, parser: _Parser) -> int:
    rep = _Reporter("automaton", args.json)
    d = _load_document(args.document)
    c = normalize(restrict_to(d.constraints, args.shape))
    guesses = list(enumerate_guesses(c))
    if not 0 <= args.guess < len(guesses):
        parser.error(f"--guess must be in 0..{len(guesses) - 1} "
                     f"({len(guesses)} guesses for this input)")
    aut = build_2ata(c, args.shape, guesses[args.guess])
    rep.field("states", len(aut.states))
    rep.field("symbol_entries", len(aut.symbol_entries))
    rep.field("branching", aut.k)
    rep.field("slots", aut.l)
    rep.field("priority_one_states", len(aut.priority_one_states()))
    rep.field("guesses", len(guesses))
    rep.field("guess", args.guess)
    rep.line(f"states: {len(aut.states)}  symbol entries: "
             f"{len(aut.symbol_entries)}  branching: {aut.k}  slots: {aut.l}  "
             f"priority-1 states: {len(aut.priority_one_states())}  "
             f"guesses: {len(guesses)} (showing #{args.guess})")
    if args.dump or args.symbol is not None:
        symbols = ([parse_symbol(args.symbol)] if args.symbol is not None
                   else [parse_symbol("root"), parse_symbol("bot"),
                         make_symbol(())])
        covered = set(guesses[args.guess].nominals)
        for sym in symbols:
            for entry in sym:
                if entry[0] == "M" and entry[2] not in covered:
                    parser.error(f"--symbol marker references nominal "
                                 f"'{entry[2]}' not covered by the guess")
        rows = []
        for sym in symbols:
            for state in aut.states:
                row = (f"δ({state_to_text(state)}, {symbol_to_text(sym)}) = "
                       f"{pbf_to_text(aut.delta(state, sym))}")
                rows.append(row)
        rep.field("rows", rows)
        for row in rows:
            rep.line(row)
    return rep.finish("ok", EXIT_TRUE)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_search_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES,
                     help="largest graph size to try (default %(default)s)")
    sub.add_argument("--budget-ms", type=float, default=None,
                     help="wall-clock budget; exceeding it yields an "
                          "inconclusive verdict at the bound reached")
    sub.add_argument("--semantics", choices=[WF, SUPPORTED], default=WF,
                     help="validation semantics (default %(default)s)")
    sub.add_argument("--bounded-only", action="store_true",
                     help="acknowledge that supported-semantics search "
                          "is bounded, not a decision procedure")


def build_parser() -> _Parser:
    parser = _Parser(prog="shaclwf", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit a JSON verdict envelope on stdout")
    common.add_argument("--deterministic", action="store_true",
                        help="force run-to-run identical output (output is "
                             "already deterministic; accepted for interface "
                             "stability)")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", parents=[common],
                        help="validate a graph against a document")
    p.add_argument("graph")
    p.add_argument("document")
    p.add_argument("--semantics", choices=[WF, SUPPORTED], default=WF)
    p.add_argument("--trace", action="store_true",
                   help="print the fixpoint iterates (wf semantics)")

    p = subs.add_parser("models", parents=[common],
                        help="enumerate supported models")
    p.add_argument("graph")
    p.add_argument("document")

    p = subs.add_parser("translate", parents=[common],
                        help="translate a shape to a fixpoint formula")
    p.add_argument("document")
    p.add_argument("shape")
    p.add_argument("--clean", action="store_true",
                   help="drop vacuous fixpoint binders")

    p = subs.add_parser("eval", parents=[common],
                        help="evaluate a fixpoint formula on a graph")
    p.add_argument("graph")
    p.add_argument("formula", help="formula file, or the formula itself")

    p = subs.add_parser("sat", parents=[common],
                        help="bounded shape satisfiability")
    p.add_argument("document")
    p.add_argument("shape")
    _add_search_flags(p)

    p = subs.add_parser("docsat", parents=[common],
                        help="bounded document satisfiability")
    p.add_argument("document")
    _add_search_flags(p)

    p = subs.add_parser("implies", parents=[common],
                        help="bounded implication counterexample search")
    p.add_argument("document")
    p.add_argument("other")
    _add_search_flags(p)

    p = subs.add_parser("automaton", parents=[common],
                        help="build and inspect the tree automaton of a shape")
    p.add_argument("document")
    p.add_argument("shape")
    p.add_argument("--guess", type=int, default=0,
                   help="index into the guess enumeration (default 0)")
    p.add_argument("--dump", action="store_true",
                   help="print transition rows on the special symbols")
    p.add_argument("--symbol", default=None,
                   help="print transition rows on this symbol (comma list "
                        "of: concept A, nominal @a, arrival role r or r-, "
                        "marker r->a; or root/bot)")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": lambda: _cmd_validate(args),
        "models": lambda: _cmd_models(args),
        "translate": lambda: _cmd_translate(args),
        "eval": lambda: _cmd_eval(args),
        "sat": lambda: _cmd_sat(args, parser),
        "docsat": lambda: _cmd_docsat(args),
        "implies": lambda: _cmd_implies(args, parser),
        "automaton": lambda: _cmd_automaton(args, parser),
    }
    try:
        return handlers[args.command]()
    except BudgetExceeded as exc:
        return _error(args.command, args.json, f"budget exceeded: {exc}")
    except ShaclError as exc:
        return _error(args.command, args.json, str(exc))
    except OSError as exc:
        return _error(args.command, args.json, str(exc))


if __name__ == "__main__":
    sys.exit(main())
