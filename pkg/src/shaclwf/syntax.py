"""Text formats for graphs and documents.

Graph files: one assertion per line, ``A(a)`` or ``r(a,b)``; ``#`` starts
a comment; blank lines are ignored.  Concept names start uppercase, role
names lowercase.

Document files: one constraint ``s <- EXPR`` or one target per line.
EXPR grammar (``&`` binds tighter than ``|``, both left-associative;
quantifier and negation bodies bind tightly, so parenthesize nested
boolean bodies):

    EXPR  := AND ('|' AND)*
    AND   := UNARY ('&' UNARY)*
    UNARY := '!' shape | 'some' ROLE '.' UNARY | 'all' ROLE '.' UNARY | ATOM
    ATOM  := '(' EXPR ')' | '<node>' | Concept | shape

Roles may carry a trailing ``-`` for inversion.  Targets:

    target node <a> s
    target class A s
    target role r s
"""

from __future__ import annotations

import re

from .model import (And, Concept, ConstraintSet, DataGraph, Document, Exists,
                    ForAll, Nominal, NotShape, Or, ParseError, Role, ShapeExpr,
                    ShapeRef, Target, TARGET_CLASS, TARGET_NODE, TARGET_ROLE)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NODE = re.compile(r"[A-Za-z0-9_.:-]+")
_ASSERT1 = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\(\s*([A-Za-z0-9_.:-]+)\s*\)$")
_ASSERT2 = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_]*)\(\s*([A-Za-z0-9_.:-]+)\s*,\s*([A-Za-z0-9_.:-]+)\s*\)$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _is_concept_token(tok: str) -> bool:
    return tok[0].isupper()


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def parse_graph(text: str) -> DataGraph:
    concepts = []
    roles = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _ASSERT2.match(line)
        if m:
            r, a, b = m.groups()
            if _is_concept_token(r):
                raise ParseError(f"role name {r!r} must start lowercase", lineno, 1)
            roles.append((r, a, b))
            continue
        m = _ASSERT1.match(line)
        if m:
            c, a = m.groups()
            if not _is_concept_token(c):
                raise ParseError(f"concept name {c!r} must start uppercase", lineno, 1)
            concepts.append((c, a))
            continue
        raise ParseError(f"not an assertion: {line!r}", lineno, 1)
    return DataGraph.build(concepts, roles)


def graph_to_text(g: DataGraph) -> str:
    lines = [f"{c}({a})" for c, a in sorted(g.concept_assertions)]
    lines += [f"{r}({a},{b})" for r, a, b in sorted(g.role_assertions)]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# shape expressions
# ---------------------------------------------------------------------------

class _ExprParser:
    def __init__(self, text: str, lineno: int = 0):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.lineno, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error("expected an identifier")
        self.pos = m.end()
        tok = m.group()
        if "#" in tok:  # cannot happen with this regex, but keep the contract visible
            raise self.error("'#' is reserved for generated names")
        return tok

    def role(self) -> Role:
        name = self.ident()
        if _is_concept_token(name):
            raise self.error(f"role name {name!r} must start lowercase")
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
            return Role(name, True)
        return Role(name)

    def parse(self) -> ShapeExpr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")
        return e

    def expr(self) -> ShapeExpr:
        e = self.conj()
        while self.peek() == "|":
            self.take("|")
            e = Or(e, self.conj())
        return e

    def conj(self) -> ShapeExpr:
        e = self.unary()
        while self.peek() == "&":
            self.take("&")
            e = And(e, self.unary())
        return e

    def unary(self) -> ShapeExpr:
        ch = self.peek()
        if ch == "!":
            self.take("!")
            name = self.ident()
            if _is_concept_token(name):
                raise self.error("negation applies to shape names only")
            return NotShape(name)
        if ch == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if ch == "<":
            self.take("<")
            self.skip_ws()
            m = _NODE.match(self.text, self.pos)
            if not m:
                raise self.error("expected a node id")
            self.pos = m.end()
            node = m.group()
            self.take(">")
            return Nominal(node)
        tok = self.ident()
        if tok == "some" or tok == "all":
            r = self.role()
            self.take(".")
            body = self.unary()
            return Exists(r, body) if tok == "some" else ForAll(r, body)
        if _is_concept_token(tok):
            return Concept(tok)
        return ShapeRef(tok)


def parse_expr(text: str, lineno: int = 0) -> ShapeExpr:
    return _ExprParser(text, lineno).parse()


def expr_to_text(e: ShapeExpr) -> str:
    def atom(x: ShapeExpr) -> str:
        """Render x, parenthesized unless it already binds at least as tightly as a unary."""
        s = expr_to_text(x)
        if isinstance(x, (And, Or)):
            return f"({s})"
        return s

    if isinstance(e, Concept):
        return e.name
    if isinstance(e, Nominal):
        return f"<{e.node}>"
    if isinstance(e, ShapeRef):
        return e.name
    if isinstance(e, NotShape):
        return f"!{e.name}"
    if isinstance(e, And):
        l = expr_to_text(e.left) if isinstance(e.left, And) else atom(e.left)
        return f"{l} & {atom(e.right)}"
    if isinstance(e, Or):
        left = e.left
        ls = expr_to_text(left) if isinstance(left, (Or, And)) else atom(left)
        rs = expr_to_text(e.right) if isinstance(e.right, And) else atom(e.right)
        return f"{ls} | {rs}"
    if isinstance(e, Exists):
        return f"some {e.role} . {atom(e.body)}"
    if isinstance(e, ForAll):
        return f"all {e.role} . {atom(e.body)}"
    raise TypeError(f"not a shape expression: {e!r}")


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

_TARGET_NODE_RE = re.compile(r"^target\s+node\s+<\s*([A-Za-z0-9_.:-]+)\s*>\s+([A-Za-z_][A-Za-z0-9_]*)$")
_TARGET_CLASS_RE = re.compile(r"^target\s+class\s+([A-Za-z_][A-Za-z0-9_]*)\s+([A-Za-z_][A-Za-z0-9_]*)$")
_TARGET_ROLE_RE = re.compile(r"^target\s+role\s+([A-Za-z_][A-Za-z0-9_]*-?)\s+([A-Za-z_][A-Za-z0-9_]*)$")


def parse_document(text: str) -> Document:
    defs: list[tuple[str, ShapeExpr]] = []
    targets: list[Target] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("target"):
            m = _TARGET_NODE_RE.match(line)
            if m:
                targets.append(Target(TARGET_NODE, m.group(1), m.group(2)))
                continue
            m = _TARGET_CLASS_RE.match(line)
            if m:
                concept, shape = m.groups()
                if not _is_concept_token(concept):
                    raise ParseError(f"class target needs a concept name, got {concept!r}", lineno, 1)
                targets.append(Target(TARGET_CLASS, concept, shape))
                continue
            m = _TARGET_ROLE_RE.match(line)
            if m:
                role, shape = m.groups()
                if _is_concept_token(role):
                    raise ParseError(f"role target needs a role name, got {role!r}", lineno, 1)
                targets.append(Target(TARGET_ROLE, Role.parse(role), shape))
                continue
            raise ParseError(f"bad target line: {line!r}", lineno, 1)
        if "<-" not in line:
            raise ParseError(f"expected 's <- EXPR' or a target line: {line!r}", lineno, 1)
        head_txt, body_txt = line.split("<-", 1)
        head = head_txt.strip()
        if not _IDENT.fullmatch(head):
            raise ParseError(f"bad shape name {head!r}", lineno, 1)
        if _is_concept_token(head):
            raise ParseError(f"shape name {head!r} must start lowercase", lineno, 1)
        defs.append((head, parse_expr(body_txt.strip(), lineno)))
    return Document(ConstraintSet(defs), tuple(targets))


def parse_constraints(text: str) -> ConstraintSet:
    return parse_document(text).constraints


def document_to_text(d: Document) -> str:
    lines = [f"{head} <- {expr_to_text(body)}" for head, body in d.constraints.items()]
    for t in d.targets:
        if t.kind == TARGET_NODE:
            lines.append(f"target node <{t.subject}> {t.shape}")
        elif t.kind == TARGET_CLASS:
            lines.append(f"target class {t.subject} {t.shape}")
        else:
            lines.append(f"target role {t.subject} {t.shape}")
    return "\n".join(lines) + ("\n" if lines else "")
