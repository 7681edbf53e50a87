"""``folx run``: load a ``.fol`` program, apply its definitions, answer queries.

Exit status is 0 on success, 1 on a parse or validation error or on a false
``holds`` query (unless ``--no-assert``), and 2 on an evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, TextIO

from .errors import FolxError, SemanticError, UnboundVariable, UseBeforeDefinition, ValidationError
from .extend import ExtensionState, apply_definition, relation_of
from .parser import EnumSpec, InterpBinding, ModSpec, Query, parse_program, render
from .relalg import Relation, project
from .semantics import denote, entails_in, eval_term, sentence_truth
from .syntax import (
    FuncDef,
    HornBlock,
    RelDef,
    TheoryDecl,
    check_formula,
    check_term,
    defined_symbols,
    free_variables,
    term_variables,
    used_symbols,
)
from .universe import Interpretation, make_enum_universe, make_mod_ring


@dataclass
class QueryResult:
    kind: str
    text: str
    payload: Any
    micros: int
    line: int | None = None
    ok: bool = True


@dataclass
class Options:
    dump_all: bool = False
    trace_fixpoint: bool = False
    max_iterations: int | None = None
    assert_holds: bool = True
    fmt: str = "text"


def build_interpretation(spec) -> Interpretation:
    if isinstance(spec, ModSpec):
        return make_mod_ring(spec.modulus)
    assert isinstance(spec, EnumSpec)
    arities = {}
    rels = {}
    for sym, n, rows in spec.relations:
        arities[sym] = n
        rels[sym] = rows
    funcs = {}
    for sym, n, rows in spec.functions:
        arities[sym] = n
        funcs[sym] = dict(rows)
    # element names double as constants
    for e in spec.elements:
        if e not in funcs:
            funcs[e] = {(): e}
            arities[e] = 0
    return make_enum_universe(spec.elements, rels, funcs, arities)


def relation_json(r: Relation) -> list[dict[str, str]]:
    U = r.universe
    return [{str(i): U.name(v) for i, v in t.items()} for t in r]


@dataclass
class Runner:
    """Executes statements in order against one current extension state."""

    options: Options = field(default_factory=Options)
    theories: dict[str, TheoryDecl] = field(default_factory=dict)
    state: ExtensionState | None = None
    results: list[QueryResult] = field(default_factory=list)
    traces: list[tuple[str, tuple[dict[str, int], ...]]] = field(default_factory=list)
    out: TextIO = sys.stdout

    def emit(self, text: str) -> None:
        if self.options.fmt == "text":
            print(text, file=self.out)

    def need_state(self, span) -> ExtensionState:
        if self.state is None:
            raise ValidationError("no interpretation is bound yet", span)
        return self.state

    def run(self, program) -> int:
        stmts = list(program)
        for i, s in enumerate(stmts):
            try:
                self.execute(s, stmts[i + 1 :])
            except FolxError as e:
                if e.span is None:
                    e.span = getattr(s, "span", None)
                raise
        if self.options.dump_all and self.state is not None:
            for sym in sorted(self.state.theory.relations):
                r = self.state.interpretation.relation(sym)
                self.results.append(QueryResult("dump", f"{sym} = {render(r)}", relation_json(r), 0))
                self.emit(f"{sym} = {render(r)}")
        failed = any(not r.ok for r in self.results)
        return 1 if failed and self.options.assert_holds else 0

    def execute(self, s, rest) -> None:
        if isinstance(s, TheoryDecl):
            if s.name in self.theories:
                raise ValidationError(f"theory {s.name!r} declared twice", s.span)
            self.theories[s.name] = s
        elif isinstance(s, InterpBinding):
            if s.theory not in self.theories:
                raise ValidationError(f"unknown theory {s.theory!r}", s.span)
            M = build_interpretation(s.spec)
            self.state = ExtensionState.initial(M, self.theories[s.theory])
        elif isinstance(s, (FuncDef, RelDef, HornBlock)):
            state = self.need_state(s.span)
            later = {sym for r in rest if isinstance(r, (FuncDef, RelDef, HornBlock)) for sym in defined_symbols(r)}
            early = {sym for sym in used_symbols(s) if not state.theory.has(sym) and sym in later}
            if early:
                raise UseBeforeDefinition(f"{sorted(early)[0]!r} is used before its definition", s.span)
            kw = {"max_iterations": self.options.max_iterations} if isinstance(s, HornBlock) else {}
            self.state = apply_definition(state, s, **kw)
            if isinstance(s, HornBlock) and self.options.trace_fixpoint:
                trace = self.state.traces[s.name]
                self.traces.append((s.name, trace))
                self.emit_trace(s.name, trace)
        elif isinstance(s, Query):
            self.query(s)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def emit_trace(self, name: str, trace) -> None:
        syms = sorted(trace[0]) if trace else []
        lines = [f"trace {name}", "iteration " + " ".join(syms)]
        for k, row in enumerate(trace, 1):
            lines.append(f"{k} " + " ".join(str(row[p]) for p in syms))
        self.emit("\n".join(lines))

    def query(self, q: Query) -> None:
        state = self.need_state(q.span)
        M = state.interpretation
        t0 = time.perf_counter_ns()
        ok = True
        if q.kind == "eval":
            check_term(q.term, state.theory, q.span)
            A = {v: M.literal(n) for v, n in q.under}
            missing = term_variables(q.term) - A.keys()
            if missing:
                raise UnboundVariable(f"variables {sorted(missing)} are unbound", q.span)
            value = eval_term(M, A, q.term)
            text, payload = M.format_element(value), M.format_element(value)
        elif q.kind in ("holds", "solve", "entails"):
            check_formula(q.formula, state.theory, q.span)
            if q.formula2 is not None:
                check_formula(q.formula2, state.theory, q.span)
            if q.kind == "holds":
                value = sentence_truth(M, q.formula)
                ok = value
                text, payload = render(value), value
            elif q.kind == "entails":
                value = entails_in(M, q.formula, q.formula2)
                text, payload = render(value), value
            else:
                report = sorted(v for v in free_variables(q.formula) if v[0].isupper())
                r = project(denote(M, q.formula), report)
                text = render(r)
                payload = relation_json(r) if r.index else bool(r.rows)
        elif q.kind == "dump":
            r = relation_of(state, q.symbol)
            text, payload = render(r), relation_json(r)
        else:
            raise ValidationError(f"unknown query kind {q.kind!r}", q.span)
        micros = (time.perf_counter_ns() - t0) // 1000
        line = q.span[0] if q.span else None
        self.results.append(QueryResult(q.kind, text, payload, micros, line, ok))
        self.emit(text)

    def json_report(self, error: str | None = None) -> str:
        doc: dict[str, Any] = {
            "queries": [{"kind": r.kind, "result": r.payload, "micros": r.micros, "line": r.line} for r in self.results]
        }
        if self.traces:
            doc["traces"] = [
                {"block": name, "iterations": [{"iteration": k, "sizes": row} for k, row in enumerate(t, 1)]}
                for name, t in self.traces
            ]
        if error is not None:
            doc["error"] = error
        return json.dumps(doc, indent=2, sort_keys=False)


def run_source(text: str, options: Options | None = None, out: TextIO | None = None, err: TextIO | None = None, path: str = "<input>") -> int:
    options = options or Options()
    out = out or sys.stdout
    err = err or sys.stderr
    runner = Runner(options, out=out)
    code = 0
    error = None
    try:
        program = parse_program(text)
        code = runner.run(program)
    except ValidationError as e:
        error, code = str(e), 1
    except SemanticError as e:
        error, code = str(e), 2
    if error is not None:
        print(f"{path}:{error}" if error[:1].isdigit() else f"{path}: {error}", file=err)
    if options.fmt == "json":
        print(runner.json_report(error), file=out)
    return code


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folx", description="Evaluate first-order logic programs over finite interpretations.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a .fol program ('-' reads stdin)")
    run.add_argument("file")
    run.add_argument("--dump-all", action="store_true", help="print every relation at the end")
    run.add_argument("--trace-fixpoint", action="store_true", help="print per-iteration sizes for rec blocks")
    run.add_argument("--max-iterations", type=int, default=None, metavar="N")
    run.add_argument("--no-assert", action="store_true", help="false 'holds' queries do not fail the run")
    run.add_argument("--format", choices=("text", "json"), default="text")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.file == "-":
        text, path = sys.stdin.read(), "<stdin>"
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            print(f"folx: {e}", file=sys.stderr)
            return 1
        path = args.file
    opts = Options(
        dump_all=args.dump_all,
        trace_fixpoint=args.trace_fixpoint,
        max_iterations=args.max_iterations,
        assert_holds=not args.no_assert,
        fmt=args.format,
    )
    return run_source(text, opts, path=path)


if __name__ == "__main__":
    sys.exit(main())
