"""Surface syntax for concepts and knowledge-base files.

Grammar (``#`` starts a line comment; identifiers are case-sensitive and may
contain letters, digits, ``-`` and ``_``):

    decl    := ("oconcept"|"aconcept") NAME ";"
             | ("orole"|"arole"|"xrole") NAME ";"
             | ("oindividual"|"aindividual") NAME ";"
    tbox    := NAME ":=" concept ";"  |  concept "<=" concept ";"
    abox    := NAME "(" NAME ")" ";"  |  NAME "(" NAME "," NAME ")" ";"
             | "(" concept ")" "(" NAME ")" ";"
    concept := "top" | "bot" | NAME | "not" concept
             | concept ("and"|"or") concept
             | ("some"|"all") roleref concept
             | "(" concept ")"
             | concept ("=>"|"<=>") concept
    roleref := NAME | "inv(" NAME ")"

Precedence: ``not`` > ``and`` > ``or`` > (``=>``, ``<=>``); quantifiers bind
the tightest following concept.  The usual DL glyphs are accepted as aliases
for the keywords (e.g. ``⊓`` for ``and``, ``∃`` for ``some``, ``→`` for
``=>``, ``⊑`` for ``<=``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kb import KnowledgeBase, KnowledgeBaseError
from .syntax import (
    And,
    Atom,
    Bot,
    ConceptExpr,
    DuplicateNameError,
    Exists,
    Forall,
    Iff,
    Implies,
    KedlError,
    Not,
    Or,
    RoleKind,
    RoleName,
    Signature,
    Sort,
    SortError,
    Top,
    check_sort,
)


class ParseError(KedlError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_GLYPHS = {
    "⊓": "and",
    "⊔": "or",
    "¬": "not",
    "∃": "some",
    "∀": "all",
    "⊤": "top",
    "⊥": "bot",
    "→": "=>",
    "↔": "<=>",
    "⊑": "<=",
}

_KEYWORDS = {
    "and", "or", "not", "some", "all", "top", "bot", "inv",
    "oconcept", "aconcept", "orole", "arole", "xrole",
    "oindividual", "aindividual",
}

_PUNCT = ("<=>", ":=", "=>", "<=", "(", ")", ",", ";")


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "kw", or the punctuation itself
    text: str
    line: int
    col: int


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "-_"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _GLYPHS:
            alias = _GLYPHS[c]
            kind = alias if alias in _PUNCT else ("kw" if alias in _KEYWORDS else "name")
            tokens.append(Token(kind, alias, line, col))
            i += 1
            col += 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                matched = True
                break
        if matched:
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            word = text[i:j]
            tokens.append(Token("kw" if word in _KEYWORDS else "name", word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    return tokens


class _Stream:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Optional[Token]:
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token(";", ";", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col + len(last.text))
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def at_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "kw" and tok.text in words


# --- Concept parsing ---------------------------------------------------------
#
# When no signature is available (role_kinds is not None), role references
# are parsed provisionally as cross roles and fixed up by inference later.


def _parse_roleref(s: _Stream, sig: Optional[Signature]) -> tuple[RoleName, Token]:
    if s.at_kw("inv"):
        tok = s.next()
        s.expect("(")
        name = s.expect("name")
        s.expect(")")
        if sig is not None:
            try:
                return sig.role(name.text, inverted=True), tok
            except SortError as err:
                raise err.at((name.line, name.col))
        return RoleName(name.text, RoleKind.CROSS_INVERSE), tok
    name = s.expect("name")
    if sig is not None:
        try:
            return sig.role(name.text), name
        except SortError as err:
            raise err.at((name.line, name.col))
    return RoleName(name.text, RoleKind.CROSS), name


def _parse_concept(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    return _parse_arrow(s, sig)


def _parse_arrow(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    left = _parse_or(s, sig)
    tok = s.peek()
    if tok is not None and tok.kind in ("=>", "<=>"):
        s.next()
        right = _parse_arrow(s, sig)  # right-associative
        return Implies(left, right) if tok.kind == "=>" else Iff(left, right)
    return left


def _parse_or(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    expr = _parse_and(s, sig)
    while s.at_kw("or"):
        s.next()
        expr = Or(expr, _parse_and(s, sig))
    return expr


def _parse_and(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    expr = _parse_unary(s, sig)
    while s.at_kw("and"):
        s.next()
        expr = And(expr, _parse_unary(s, sig))
    return expr


def _parse_unary(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    if s.at_kw("not"):
        s.next()
        return Not(_parse_unary(s, sig))
    if s.at_kw("some", "all"):
        tok = s.next()
        role, _ = _parse_roleref(s, sig)
        body = _parse_unary(s, sig)
        return Exists(role, body) if tok.text == "some" else Forall(role, body)
    return _parse_primary(s, sig)


def _parse_primary(s: _Stream, sig: Optional[Signature]) -> ConceptExpr:
    tok = s.next()
    if tok.kind == "kw" and tok.text == "top":
        return Top()
    if tok.kind == "kw" and tok.text == "bot":
        return Bot()
    if tok.kind == "name":
        return Atom(tok.text)
    if tok.kind == "(":
        expr = _parse_arrow(s, sig)
        s.expect(")")
        return expr
    raise ParseError(f"expected a concept, found {tok.text!r}", tok.line, tok.col)


def parse_concept(text: str, sig: Signature) -> ConceptExpr:
    """Parse a concept expression and sort-check it against the signature."""
    s = _Stream(tokenize(text))
    first = s.peek()
    expr = _parse_concept(s, sig)
    extra = s.peek()
    if extra is not None:
        raise ParseError(f"trailing input: {extra.text!r}", extra.line, extra.col)
    try:
        check_sort(expr, sig)
    except SortError as err:
        if first is not None and err.location is None:
            raise err.at((first.line, first.col))
        raise
    return expr


# --- Signature inference for bare concepts -----------------------------------


def parse_concept_with_inference(text: str) -> tuple[ConceptExpr, Signature]:
    """Parse a concept with no declarations, inferring a signature.

    Best-effort defaults: a quantified role whose kind is not forced by its
    operand becomes a cross role, and atoms whose sort is never forced are
    object atoms.  Use an explicit signature when that is not what you mean.
    """
    s = _Stream(tokenize(text))
    proto = _parse_concept(s, sig=None)
    extra = s.peek()
    if extra is not None:
        raise ParseError(f"trailing input: {extra.text!r}", extra.line, extra.col)

    atoms: dict[str, Optional[Sort]] = {}
    kinds: dict[str, RoleKind] = {}

    def assign(e: ConceptExpr, sort: Sort) -> None:
        if isinstance(e, Atom):
            if atoms.get(e.name) is None:
                atoms[e.name] = sort
        elif isinstance(e, Not):
            assign(e.expr, sort)
        elif isinstance(e, (And, Or, Implies, Iff)):
            assign(e.left, sort)
            assign(e.right, sort)
        # quantified subtrees already carry a concrete sort

    def walk(e: ConceptExpr) -> Optional[Sort]:
        if isinstance(e, Atom):
            atoms.setdefault(e.name, None)
            return atoms[e.name]
        if isinstance(e, (Top, Bot)):
            return None
        if isinstance(e, Not):
            return walk(e.expr)
        if isinstance(e, (And, Or, Implies, Iff)):
            ls = walk(e.left)
            rs = walk(e.right)
            if ls is not None and rs is not None and ls is not rs:
                raise SortError(f"mixed-sort operands in {e}")
            known = ls if ls is not None else rs
            if known is not None:
                assign(e.left, known)
                assign(e.right, known)
            return known
        if isinstance(e, (Exists, Forall)):
            child = walk(e.expr)
            name = e.role.name
            if e.role.kind is RoleKind.CROSS_INVERSE:
                if kinds.setdefault(name, RoleKind.CROSS) is not RoleKind.CROSS:
                    raise SortError(f"role {name} used with two kinds")
                if child is Sort.ATTRIBUTE:
                    raise SortError(f"inv({name}) needs an object-sort operand")
                assign(e.expr, Sort.OBJECT)
                return Sort.ATTRIBUTE
            if name in kinds:
                kind = kinds[name]
            elif child is Sort.OBJECT:
                kind = RoleKind.OBJ_OBJ
            else:
                kind = RoleKind.CROSS  # attribute or undecided operand
            kinds[name] = kind
            want = RoleName(name, kind).target_sort
            if child is not None and child is not want:
                raise SortError(f"role {name} used with two kinds")
            assign(e.expr, want)
            return RoleName(name, kind).source_sort
        raise KedlError(f"unknown concept node: {e!r}")

    walk(proto)

    sig = Signature()
    for name, kind in kinds.items():
        sig.declare_role(name, kind)
    for name, sort in atoms.items():
        sig.declare_atom(name, sort if sort is not None else Sort.OBJECT)

    def rebuild(e: ConceptExpr) -> ConceptExpr:
        if isinstance(e, Not):
            return Not(rebuild(e.expr))
        if isinstance(e, And):
            return And(rebuild(e.left), rebuild(e.right))
        if isinstance(e, Or):
            return Or(rebuild(e.left), rebuild(e.right))
        if isinstance(e, Implies):
            return Implies(rebuild(e.left), rebuild(e.right))
        if isinstance(e, Iff):
            return Iff(rebuild(e.left), rebuild(e.right))
        if isinstance(e, Exists):
            return Exists(_resolved(e.role), rebuild(e.expr))
        if isinstance(e, Forall):
            return Forall(_resolved(e.role), rebuild(e.expr))
        return e

    def _resolved(role: RoleName) -> RoleName:
        if role.kind is RoleKind.CROSS_INVERSE:
            return role
        return RoleName(role.name, kinds[role.name])

    expr = rebuild(proto)
    check_sort(expr, sig)
    return expr, sig


# --- Knowledge-base parsing ---------------------------------------------------

_DECL_SORT = {
    "oconcept": Sort.OBJECT,
    "aconcept": Sort.ATTRIBUTE,
    "oindividual": Sort.OBJECT,
    "aindividual": Sort.ATTRIBUTE,
}
_DECL_ROLE = {
    "orole": RoleKind.OBJ_OBJ,
    "arole": RoleKind.ATTR_ATTR,
    "xrole": RoleKind.CROSS,
}


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a knowledge-base file: declarations, TBox, and ABox statements.

    The result is fully sort-checked; duplicate declarations and duplicate
    definitions are rejected.  Names must be declared before use.
    """
    kb = KnowledgeBase()
    s = _Stream(tokenize(text))
    while s.peek() is not None:
        _parse_statement(s, kb)
    return kb


def _parse_statement(s: _Stream, kb: KnowledgeBase) -> None:
    tok = s.peek()
    assert tok is not None
    loc = (tok.line, tok.col)
    try:
        if tok.kind == "kw" and tok.text in _DECL_SORT:
            s.next()
            name = s.expect("name")
            s.expect(";")
            if tok.text.endswith("individual"):
                kb.sig.declare_individual(name.text, _DECL_SORT[tok.text])
            else:
                kb.sig.declare_atom(name.text, _DECL_SORT[tok.text])
            return
        if tok.kind == "kw" and tok.text in _DECL_ROLE:
            s.next()
            name = s.expect("name")
            s.expect(";")
            kb.sig.declare_role(name.text, _DECL_ROLE[tok.text])
            return
        if tok.kind == "name":
            after = s.peek(1)
            if after is not None and after.kind == ":=":
                s.next()
                s.next()
                expr = _parse_concept(s, kb.sig)
                s.expect(";")
                kb.define(tok.text, expr)
                return
            if after is not None and after.kind == "(":
                _parse_assertion(s, kb)
                return
        if tok.kind == "(":
            # either a parenthesized-concept assertion or an inclusion whose
            # left side happens to start with '('
            expr = _parse_concept(s, kb.sig)
            nxt = s.peek()
            if nxt is not None and nxt.kind == "(":
                s.next()
                ind = s.expect("name")
                s.expect(")")
                s.expect(";")
                kb.assert_concept(expr, ind.text)
                return
            s.expect("<=")
            right = _parse_concept(s, kb.sig)
            s.expect(";")
            kb.include(expr, right)
            return
        left = _parse_concept(s, kb.sig)
        s.expect("<=")
        right = _parse_concept(s, kb.sig)
        s.expect(";")
        kb.include(left, right)
    except SortError as err:
        raise (err if err.location is not None else err.at(loc))
    except (DuplicateNameError, KnowledgeBaseError) as err:
        raise ParseError(str(err), *loc) from err


def _parse_assertion(s: _Stream, kb: KnowledgeBase) -> None:
    name = s.expect("name")
    s.expect("(")
    first = s.expect("name")
    nxt = s.peek()
    if nxt is not None and nxt.kind == ",":
        s.next()
        second = s.expect("name")
        s.expect(")")
        s.expect(";")
        try:
            role = kb.sig.role(name.text)
        except SortError as err:
            raise err.at((name.line, name.col))
        kb.assert_role(role, first.text, second.text)
        return
    s.expect(")")
    s.expect(";")
    if name.text in kb.sig.roles:
        raise ParseError(f"role {name.text} needs two arguments", name.line, name.col)
    kb.assert_concept(Atom(name.text), first.text)


def parse_signature(text: str) -> Signature:
    """Parse a declarations-only fragment (used by the CLI ``--sig`` flag)."""
    kb = parse_kb(text)
    if kb.definitions or kb.inclusions or kb.abox:
        raise KedlError("signature text must contain declarations only")
    return kb.sig
