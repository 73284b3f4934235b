"""First-order formulas with equality: AST, parser, printer, evaluation.

Concrete syntax, loosest to tightest binding:

    formula := quantified | iff
    quantified := ("exists" | "forall") var "." formula     (scope is maximal)
    iff := imp { "<->" imp }                                (left associative)
    imp := or [ "->" imp ]                                  (right associative)
    or  := and { "|" and }
    and := unary { "&" unary }
    unary := "~" unary | atom
    atom := "true" | "false" | name "(" var {"," var} ")" | var "=" var
          | "(" formula ")"

A quantifier therefore extends to the end of the enclosing formula or
parenthesized group; to use one as an operand of a connective, parenthesize it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Tuple

from .errors import EvaluationError, ParseError, ValidationError
from .structures import Structure, Vocabulary


class Formula:
    """Base class for formula AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = TrueConst()
FALSE = FalseConst()

_KEYWORDS = {"exists", "forall", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|[~&|().,=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name', 'keyword', or the operator text itself
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup == "name":
            kind = "keyword" if chunk in _KEYWORDS else "name"
            yield _Token(kind, chunk, line, col)
        elif m.lastgroup == "op":
            yield _Token(chunk, chunk, line, col)
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    yield _Token("eof", "", line, col)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            got = repr(tok.text) if tok.text else "end of input"
            raise ParseError(f"expected {what}, got {got}", tok.line, tok.col)
        return self.next()

    def fail(self, msg: str):
        tok = self.peek()
        got = repr(tok.text) if tok.text else "end of input"
        raise ParseError(f"{msg}, got {got}", tok.line, tok.col)

    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in ("exists", "forall"):
            self.next()
            var = self.expect("name", "a variable name").text
            self.expect(".", "'.'")
            body = self.formula()
            return Exists(var, body) if tok.text == "exists" else Forall(var, body)
        return self.iff()

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek().kind == "<->":
            self.next()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.peek().kind == "->":
            self.next()
            return Implies(f, self.imp())
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek().kind == "|":
            self.next()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.peek().kind == "~":
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            f = self.formula()
            self.expect(")", "')'")
            return f
        if tok.kind == "keyword":
            if tok.text == "true":
                self.next()
                return TRUE
            if tok.text == "false":
                self.next()
                return FALSE
            self.fail("quantifier not allowed here; parenthesize it")
        if tok.kind == "name":
            self.next()
            nxt = self.peek()
            if nxt.kind == "(":
                self.next()
                args = [self.expect("name", "a variable name").text]
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.expect("name", "a variable name").text)
                self.expect(")", "')'")
                return Atom(tok.text, tuple(args))
            if nxt.kind == "=":
                self.next()
                right = self.expect("name", "a variable name").text
                return Equal(tok.text, right)
            self.fail(f"expected '(' or '=' after {tok.text!r}")
        self.fail("expected a formula")


def parse(text: str) -> Formula:
    """Parse formula text; raises ParseError with line/col on bad syntax."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    return f


# --- printing ----------------------------------------------------------------

_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NOT = 1, 2, 3, 4, 5


def format_formula(f: Formula) -> str:
    """Render ``f`` so that parse(format_formula(f)) == f, with minimal parens."""
    return _fmt(f, 0)


def _fmt(f: Formula, ctx: int) -> str:
    # ctx is the minimum precedence the rendered text must bind at; quantified
    # formulas bind loosest of all, so any ctx > 0 forces parentheses on them.
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        return f"{f.rel}({', '.join(f.args)})"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return "~" + _fmt(f.body, _PREC_NOT)
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        text = f"{q} {f.var}. {_fmt(f.body, 0)}"
        return f"({text})" if ctx > 0 else text
    if isinstance(f, And):
        text = f"{_fmt(f.left, _PREC_AND)} & {_fmt(f.right, _PREC_AND + 1)}"
        prec = _PREC_AND
    elif isinstance(f, Or):
        text = f"{_fmt(f.left, _PREC_OR)} | {_fmt(f.right, _PREC_OR + 1)}"
        prec = _PREC_OR
    elif isinstance(f, Implies):
        text = f"{_fmt(f.left, _PREC_IMP + 1)} -> {_fmt(f.right, _PREC_IMP)}"
        prec = _PREC_IMP
    elif isinstance(f, Iff):
        text = f"{_fmt(f.left, _PREC_IFF)} <-> {_fmt(f.right, _PREC_IFF + 1)}"
        prec = _PREC_IFF
    else:
        raise TypeError(f"not a formula node: {f!r}")
    return f"({text})" if prec < ctx else text


# --- analysis ----------------------------------------------------------------


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, (TrueConst, FalseConst)):
        return frozenset()
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Equal):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula node: {f!r}")


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def quantifier_rank(f: Formula) -> int:
    """Maximum quantifier nesting depth."""
    if isinstance(f, (TrueConst, FalseConst, Atom, Equal)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_rank(f.body)
    raise TypeError(f"not a formula node: {f!r}")


def validate(f: Formula, vocab: Vocabulary) -> None:
    """Check every atom against the vocabulary; raises ValidationError."""
    if isinstance(f, Atom):
        if f.rel not in vocab:
            raise ValidationError(f"unknown relation {f.rel!r} in formula")
        arity = vocab.arity(f.rel)
        if len(f.args) != arity:
            raise ValidationError(
                f"relation {f.rel} has arity {arity}, atom has {len(f.args)} arguments"
            )
    elif isinstance(f, Not):
        validate(f.body, vocab)
    elif isinstance(f, (And, Or, Implies, Iff)):
        validate(f.left, vocab)
        validate(f.right, vocab)
    elif isinstance(f, (Exists, Forall)):
        validate(f.body, vocab)
    elif not isinstance(f, (TrueConst, FalseConst, Equal)):
        raise TypeError(f"not a formula node: {f!r}")


# --- evaluation --------------------------------------------------------------


def eval_formula(
    s: Structure, f: Formula, assignment: Optional[Mapping[str, int]] = None
) -> bool:
    """Tarski semantics; ``assignment`` must cover the free variables of ``f``."""
    validate(f, s.vocabulary)
    env: Dict[str, int] = dict(assignment) if assignment else {}
    missing = free_vars(f) - set(env)
    if missing:
        raise EvaluationError(f"unbound variables {sorted(missing)}")
    for var, val in env.items():
        if not 0 <= val < s.size:
            raise EvaluationError(f"assignment {var} = {val} outside universe 0..{s.size - 1}")
    return _eval(s, f, env)


def _eval(s: Structure, f: Formula, env: Dict[str, int]) -> bool:
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Atom):
        return tuple(env[a] for a in f.args) in s.relations[f.rel]
    if isinstance(f, Equal):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not _eval(s, f.body, env)
    if isinstance(f, And):
        return _eval(s, f.left, env) and _eval(s, f.right, env)
    if isinstance(f, Or):
        return _eval(s, f.left, env) or _eval(s, f.right, env)
    if isinstance(f, Implies):
        return (not _eval(s, f.left, env)) or _eval(s, f.right, env)
    if isinstance(f, Iff):
        return _eval(s, f.left, env) == _eval(s, f.right, env)
    if isinstance(f, (Exists, Forall)):
        old = env.get(f.var)
        had = f.var in env
        result = not isinstance(f, Exists)
        for u in range(s.size):
            env[f.var] = u
            val = _eval(s, f.body, env)
            if isinstance(f, Exists) and val:
                result = True
                break
            if isinstance(f, Forall) and not val:
                result = False
                break
        if had:
            env[f.var] = old  # type: ignore[assignment]
        else:
            env.pop(f.var, None)
        return result
    raise TypeError(f"not a formula node: {f!r}")
