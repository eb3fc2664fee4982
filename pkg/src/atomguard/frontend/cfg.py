"""Per-method control-flow graphs.

Every statement that performs a call gets its own node, so each node carries
at most one call.  Branch nodes keep their successor order stable: branch
body first, fall-through last.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    Assign,
    Block,
    Call,
    ExprStmt,
    If,
    Increment,
    MethodDecl,
    Return,
    Stmt,
    While,
)

__all__ = ["NodeKind", "CfgNode", "Cfg", "build_cfg"]


class NodeKind(enum.Enum):
    ENTRY = "entry"
    RETURN = "return"
    MODULE_CALL = "module_call"
    CLIENT_CALL = "client_call"
    OTHER = "other"


@dataclass(slots=True)
class CfgNode:
    index: int
    kind: NodeKind
    line: int
    succ: list[int] = field(default_factory=list)
    call: Optional[Call] = None
    result_var: Optional[str] = None  # variable receiving the call result
    stmt: Optional[Stmt] = None


@dataclass(slots=True)
class Cfg:
    method: MethodDecl
    nodes: list[CfgNode]

    @property
    def entry(self) -> CfgNode:
        return self.nodes[0]

    @property
    def returns(self) -> list[CfgNode]:
        return [n for n in self.nodes if n.kind is NodeKind.RETURN]

    def node_for(self, stmt: Stmt) -> Optional[CfgNode]:
        for n in self.nodes:
            if n.stmt is stmt:
                return n
        return None


class _Builder:
    def __init__(self, method: MethodDecl):
        self.method = method
        self.nodes: list[CfgNode] = []

    def new_node(self, kind: NodeKind, line: int, stmt: Stmt | None = None) -> CfgNode:
        node = CfgNode(index=len(self.nodes), kind=kind, line=line, stmt=stmt)
        self.nodes.append(node)
        return node

    def call_kind(self, call: Call) -> NodeKind:
        return NodeKind.MODULE_CALL if call.receiver is not None else NodeKind.CLIENT_CALL

    def lower_stmt(self, stmt: Stmt) -> tuple[Optional[int], list[int]]:
        """Returns (entry index or None if the statement is empty, exits).

        Exits are node indexes whose successor list still needs the index of
        whatever comes next.
        """
        if isinstance(stmt, Block):
            return self.lower_seq(stmt.stmts)
        if isinstance(stmt, Return):
            node = self.new_node(NodeKind.RETURN, stmt.line, stmt)
            return node.index, []
        if isinstance(stmt, If):
            kind = self.call_kind(stmt.cond) if isinstance(stmt.cond, Call) else NodeKind.OTHER
            node = self.new_node(kind, stmt.line, stmt)
            if isinstance(stmt.cond, Call):
                node.call = stmt.cond
            exits: list[int] = []
            t_entry, t_exits = self.lower_stmt(stmt.then)
            if t_entry is None:
                exits.append(node.index)
            else:
                node.succ.append(t_entry)
                exits.extend(t_exits)
            if stmt.orelse is None:
                exits.append(node.index)
            else:
                e_entry, e_exits = self.lower_stmt(stmt.orelse)
                if e_entry is None:
                    exits.append(node.index)
                else:
                    node.succ.append(e_entry)
                    exits.extend(e_exits)
            return node.index, exits
        if isinstance(stmt, While):
            kind = self.call_kind(stmt.cond) if isinstance(stmt.cond, Call) else NodeKind.OTHER
            node = self.new_node(kind, stmt.line, stmt)
            if isinstance(stmt.cond, Call):
                node.call = stmt.cond
            b_entry, b_exits = self.lower_stmt(stmt.body)
            self._wire(node.index, b_entry if b_entry is not None else node.index)
            for e in b_exits:
                self._wire(e, node.index)
            return node.index, [node.index]
        if isinstance(stmt, (Assign, ExprStmt)):
            call = stmt.call if isinstance(stmt, ExprStmt) else None
            if isinstance(stmt, Assign) and isinstance(stmt.value, Call):
                call = stmt.value
            if call is not None:
                node = self.new_node(self.call_kind(call), stmt.line, stmt)
                node.call = call
                if isinstance(stmt, Assign):
                    node.result_var = stmt.target
            else:
                node = self.new_node(NodeKind.OTHER, stmt.line, stmt)
            return node.index, [node.index]
        if isinstance(stmt, Increment):
            node = self.new_node(NodeKind.OTHER, stmt.line, stmt)
            return node.index, [node.index]
        raise TypeError(f"not a statement: {stmt!r}")

    def _wire(self, source: int, target: int) -> None:
        succ = self.nodes[source].succ
        if target not in succ:
            succ.append(target)

    def lower_seq(self, stmts: list[Stmt]) -> tuple[Optional[int], list[int]]:
        entry: Optional[int] = None
        exits: list[int] = []
        for s in stmts:
            s_entry, s_exits = self.lower_stmt(s)
            if s_entry is None:
                continue
            if entry is None:
                entry = s_entry
            for e in exits:
                self._wire(e, s_entry)
            exits = s_exits
        return entry, exits

    def build(self) -> Cfg:
        entry = self.new_node(NodeKind.ENTRY, self.method.line)
        b_entry, exits = self.lower_seq(self.method.body.stmts)
        if b_entry is None:
            ret = self.new_node(NodeKind.RETURN, self.method.line)
            entry.succ.append(ret.index)
            return Cfg(method=self.method, nodes=self.nodes)
        entry.succ.append(b_entry)
        if exits:
            ret = self.new_node(NodeKind.RETURN, self.method.line)
            for e in exits:
                self._wire(e, ret.index)
        return Cfg(method=self.method, nodes=self.nodes)


def build_cfg(method: MethodDecl) -> Cfg:
    """Build the control-flow graph of one method body.

    The graph has exactly one entry node (index 0) and at least one return
    node; every path from the entry reaches a return unless it loops forever.
    """
    return _Builder(method).build()
