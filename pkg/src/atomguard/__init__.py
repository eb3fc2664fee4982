"""atomguard: static checking of atomic-execution contracts.

A module class declares, as part of its interface, which sequences of its
method calls clients must perform atomically.  The analyzer extracts each
thread's possible call sequences as a context-free grammar, locates every
occurrence of a contract word inside that behavior with a generalized LR
parser, and reports occurrences whose lowest common ancestor method is not
atomically executed.
"""

from .contracts import (
    CallAtom,
    CallSequence,
    Clause,
    Contract,
    expand_clause,
    overlapping_clause_pairs,
    parse_contract,
    parse_parameterized_atom,
)
from .errors import (
    AtomguardError,
    ClauseTooLongError,
    ContractError,
    DuplicateMethodError,
    NoEntryPointsError,
    SourceSyntaxError,
    StarNotAllowedError,
    UnknownMethodError,
    UnresolvedMethodError,
)
from .frontend import (
    Cfg,
    CfgNode,
    MethodDecl,
    NodeKind,
    Program,
    build_cfg,
    compute_atomically_executed,
    find_thread_entries,
    parse_program,
)
from .glr import (
    ParseStats,
    ParseTable,
    ParseTree,
    build_parse_table,
    dump_tree,
    lca_subtree,
    lowest_common_ancestor,
    parse_subword,
    parse_subword_until_lca,
    tree_sites,
    tree_word,
)
from .grammar import (
    BehaviorGrammar,
    CallSite,
    Production,
    bounded_language,
    build_behavior_grammar,
    build_behavior_grammar_pointsto,
    build_class_scope_grammar,
    dump_grammar,
    parse_dump,
    simplify_grammar,
    symbol_method,
)
from .pointsto import (
    AllocationSite,
    PointsToResult,
    collect_allocation_sites,
    compute_pointsto,
    module_alloc_sites,
)
from .verifier import (
    RunStats,
    Violation,
    check_unification,
    mark_atomic,
    render_report,
    verify,
    verify_with_stats,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationSite",
    "AtomguardError",
    "BehaviorGrammar",
    "CallAtom",
    "CallSequence",
    "CallSite",
    "Cfg",
    "CfgNode",
    "Clause",
    "ClauseTooLongError",
    "Contract",
    "ContractError",
    "DuplicateMethodError",
    "MethodDecl",
    "NoEntryPointsError",
    "NodeKind",
    "ParseStats",
    "ParseTable",
    "ParseTree",
    "PointsToResult",
    "Production",
    "Program",
    "RunStats",
    "SourceSyntaxError",
    "StarNotAllowedError",
    "UnknownMethodError",
    "UnresolvedMethodError",
    "Violation",
    "bounded_language",
    "build_behavior_grammar",
    "build_behavior_grammar_pointsto",
    "build_cfg",
    "build_class_scope_grammar",
    "build_parse_table",
    "check_unification",
    "collect_allocation_sites",
    "compute_atomically_executed",
    "compute_pointsto",
    "dump_grammar",
    "dump_tree",
    "expand_clause",
    "find_thread_entries",
    "lca_subtree",
    "lowest_common_ancestor",
    "mark_atomic",
    "module_alloc_sites",
    "overlapping_clause_pairs",
    "parse_contract",
    "parse_dump",
    "parse_parameterized_atom",
    "parse_program",
    "parse_subword",
    "parse_subword_until_lca",
    "render_report",
    "simplify_grammar",
    "symbol_method",
    "tree_sites",
    "tree_word",
    "verify",
    "verify_with_stats",
]
