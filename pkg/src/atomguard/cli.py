"""Command-line driver.

    atomguard check prog.mg [...] [--class-scope] [--no-points-to]
                            [--format text|json] [--dump-grammar]
                            [--dump-trees] [--dump-table] [--max-clause-len N]
    atomguard corpus DIR [same flags]

Exit codes: 0 no violations, 1 violations found (or a corpus expectation
failed), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .contracts import expand_clause, parse_contract
from .errors import AtomguardError
from .frontend.parser import parse_program
from .frontend.syntax import Program
from .glr import build_parse_table, dump_tree, parse_subword_until_lca
from .grammar import dump_grammar, simplify_grammar
from .verifier import RunStats, Violation, render_report, verify_with_stats
from .verifier import _unit_grammars, _units  # reused for dump paths
from .pointsto import compute_pointsto

__all__ = ["Config", "run", "run_corpus", "main"]


@dataclass(slots=True)
class Config:
    class_scope: bool = False
    points_to: bool = True
    fmt: str = "text"
    dumps: set[str] = field(default_factory=set)  # {"grammar", "trees", "table"}
    max_clause_len: int = 16
    color: bool = False


def _want_color() -> bool:
    env = os.environ.get("ATOMGUARD_COLOR")
    if env == "0":
        return False
    if env == "1":
        return True
    return sys.stdout.isatty()


def _analyze_file(path: Path, config: Config, out: list[str]) -> tuple[list[Violation], RunStats]:
    program = parse_program(path.read_text(), filename=str(path))
    if config.dumps:
        _print_dumps(program, config, out)
    return verify_with_stats(
        program,
        class_scope=config.class_scope,
        points_to=config.points_to,
        max_clause_len=config.max_clause_len,
    )


def _print_dumps(program: Program, config: Config, out: list[str]) -> None:
    pointsto_result = compute_pointsto(program) if config.points_to else None
    units = _units(program, config.class_scope)
    for mod in program.modules:
        contract = parse_contract(mod.contract_text or "", {m.name for m in mod.methods})
        for unit in units:
            pairs = _unit_grammars(program, mod, unit, config.points_to, pointsto_result)
            for site_label, grammar in pairs:
                where = f"module {mod.name}, {unit.label}"
                if site_label:
                    where += f", site {site_label}"
                if "grammar" in config.dumps:
                    out.append(f"# grammar: {where}")
                    out.append(dump_grammar(grammar).rstrip("\n"))
                    out.append(f"# simplified: {where}")
                    out.append(dump_grammar(simplify_grammar(grammar)).rstrip("\n"))
                    out.append("")
                table = build_parse_table(simplify_grammar(grammar))
                if "table" in config.dumps:
                    out.append(f"# parse table: {where}")
                    out.append(_render_table(table))
                if "trees" in config.dumps:
                    for clause in contract.clauses:
                        for word in expand_clause(clause, config.max_clause_len):
                            trees = parse_subword_until_lca(table, word.methods)
                            out.append(
                                f"# trees: {where}, word '{' '.join(word.methods)}'"
                                f" ({len(trees)} found)"
                            )
                            for i, tree in enumerate(trees, 1):
                                out.append(f"tree {i}:")
                                out.append(dump_tree(tree, table).rstrip("\n"))
                            out.append("")


def _render_table(table) -> str:
    lines = [f"{len(table.states)} states"]
    for i, state in enumerate(table.states):
        lines.append(f"state {i}:")
        for pi, dot in sorted(state):
            p = table.productions[pi]
            body = list(p.body)
            body.insert(dot, ".")
            lines.append(f"  {p.head} -> {' '.join(body)}")
        moves = sorted(
            (sym, t) for (s, sym), t in table.goto.items() if s == i
        )
        for sym, t in moves:
            lines.append(f"  [{sym} -> state {t}]")
    return "\n".join(lines) + "\n"


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="atomguard",
        description="Check atomic-execution contracts on module call sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--class-scope", action="store_true", help="one grammar per client class instead of per thread")
        p.add_argument("--no-points-to", action="store_true", help="treat every receiver as every module instance")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--dump-grammar", action="store_true")
        p.add_argument("--dump-trees", action="store_true")
        p.add_argument("--dump-table", action="store_true")
        p.add_argument("--max-clause-len", type=int, default=16, metavar="N")

    p_check = sub.add_parser("check", help="analyze one or more programs")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    add_common(p_check)

    p_corpus = sub.add_parser("corpus", help="run bad/fixed program pairs")
    p_corpus.add_argument("dir", metavar="DIR")
    add_common(p_corpus)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0

    config = Config(
        class_scope=args.class_scope,
        points_to=not args.no_points_to,
        fmt=args.format,
        max_clause_len=args.max_clause_len,
        color=_want_color(),
    )
    if args.dump_grammar:
        config.dumps.add("grammar")
    if args.dump_trees:
        config.dumps.add("trees")
    if args.dump_table:
        config.dumps.add("table")

    if args.command == "corpus":
        code, text = run_corpus(args.dir, config)
        sys.stdout.write(text)
        return code

    out: list[str] = []
    all_violations: list[Violation] = []
    stats = RunStats()
    try:
        for name in args.files:
            path = Path(name)
            violations, file_stats = _analyze_file(path, config, out)
            all_violations.extend(violations)
            stats.grammars += file_stats.grammars
            stats.trees += file_stats.trees
            stats.branches += file_stats.branches
    except (AtomguardError, OSError) as e:
        sys.stderr.write(f"atomguard: {e}\n")
        return 2
    for section in out:
        sys.stdout.write(section + "\n")
    use_color = config.color and config.fmt == "text"
    sys.stdout.write(render_report(all_violations, config.fmt, stats, color=use_color))
    return 1 if all_violations else 0


def run_corpus(directory: str, config: Config | None = None) -> tuple[int, str]:
    """Check every NAME.bad.mg / NAME.fixed.mg pair under a directory.

    A pair passes when the bad program reports at least one violation and
    the fixed program reports none.
    """
    config = config or Config()
    root = Path(directory)
    if not root.is_dir():
        return 2, f"atomguard: not a directory: {directory}\n"
    bads = sorted(root.glob("*.bad.mg"))
    fixeds = {p.name.replace(".fixed.mg", ""): p for p in root.glob("*.fixed.mg")}
    if not bads:
        return 2, f"atomguard: no *.bad.mg programs under {directory}\n"
    lines: list[str] = []
    failed: list[str] = []
    for bad in bads:
        name = bad.name.replace(".bad.mg", "")
        fixed = fixeds.pop(name, None)
        if fixed is None:
            return 2, f"atomguard: {bad.name} has no {name}.fixed.mg counterpart\n"
        try:
            bad_count = len(_corpus_violations(bad, config))
            fixed_count = len(_corpus_violations(fixed, config))
        except (AtomguardError, OSError) as e:
            return 2, f"atomguard: {name}: {e}\n"
        ok = bad_count >= 1 and fixed_count == 0
        status = "ok" if ok else "FAIL"
        if not ok:
            failed.append(name)
        lines.append(f"{name:24} bad={bad_count:<3} fixed={fixed_count:<3} {status}")
    if fixeds:
        stray = ", ".join(sorted(p.name for p in fixeds.values()))
        return 2, f"atomguard: fixed programs without bad counterparts: {stray}\n"
    summary = f"{len(bads)} pairs, {len(failed)} failing"
    if failed:
        summary += f" ({', '.join(failed)})"
    lines.append(summary)
    return (1 if failed else 0), "\n".join(lines) + "\n"


def _corpus_violations(path: Path, config: Config) -> list[Violation]:
    program = parse_program(path.read_text(), filename=str(path))
    violations, _ = verify_with_stats(
        program,
        class_scope=config.class_scope,
        points_to=config.points_to,
        max_clause_len=config.max_clause_len,
    )
    return violations


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
