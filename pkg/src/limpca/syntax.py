"""Terms and formulas of successor arithmetic, with parsing and printing.

Terms are built from variables, 0, the successor S, and a fixed stock of
primitive function symbols (add, mul, monus, pair, fst, snd, chLt, chEq).
Formulas add equations, the propositional connectives and quantifiers;
bounded quantifiers ("forall n < t. ...") are first-class nodes so that the
hierarchy machinery can treat them as matrix-internal.

Concrete syntax (precedence ! > & > | > ->, implication right-associative,
quantifier scope extends maximally to the right):

    formula := quant | impl
    quant   := ("forall" | "exists") IDENT ("<" term)? "." formula
    impl    := disj ("->" impl)?
    disj    := conj ("|" conj)*
    conj    := neg ("&" neg)*
    neg     := "!" neg | atom
    atom    := term "=" term | "(" formula ")"
    term    := IDENT | NAT | "S(" term ")" | FN "(" term {"," term} ")"

`parse` and `pretty` are exact inverses on well-formed input: for every
formula f, parse(pretty(f)) is structurally identical to f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

PRIM_ARITY = {
    "add": 2,
    "mul": 2,
    "monus": 2,
    "pair": 2,
    "fst": 1,
    "snd": 1,
    "chLt": 2,
    "chEq": 2,
}

RESERVED = {"forall", "exists", "S"} | set(PRIM_ARITY)


# ---------------------------------------------------------------------------
# terms


class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Zero(Term):
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Suc(Term):
    arg: Term

    def __str__(self):
        n = as_literal(self)
        if n is not None:
            return str(n)
        return "S(%s)" % self.arg


@dataclass(frozen=True)
class PrimFn(Term):
    symbol: str
    args: tuple

    def __post_init__(self):
        if self.symbol not in PRIM_ARITY:
            raise ValueError("unknown function symbol %r" % self.symbol)
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != PRIM_ARITY[self.symbol]:
            raise ValueError(
                "%s expects %d arguments, got %d"
                % (self.symbol, PRIM_ARITY[self.symbol], len(self.args))
            )

    def __str__(self):
        return "%s(%s)" % (self.symbol, ", ".join(str(a) for a in self.args))


def nat(n: int) -> Term:
    """The numeral term S(S(...S(0)...)) for a natural number n."""
    if n < 0:
        raise ValueError("nat expects a natural number")
    t: Term = Zero()
    for _ in range(n):
        t = Suc(t)
    return t


def as_literal(t: Term) -> Optional[int]:
    """The natural number a ground successor tower denotes, else None."""
    n = 0
    while isinstance(t, Suc):
        n += 1
        t = t.arg
    if isinstance(t, Zero):
        return n
    return None


def term_free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Suc):
        return term_free_vars(t.arg)
    if isinstance(t, PrimFn):
        out = frozenset()
        for a in t.args:
            out |= term_free_vars(a)
        return out
    return frozenset()


def term_subst(t: Term, name: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == name else t
    if isinstance(t, Suc):
        return Suc(term_subst(t.arg, name, repl))
    if isinstance(t, PrimFn):
        return PrimFn(t.symbol, tuple(term_subst(a, name, repl) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# formulas


class Formula:
    pass


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Imp(Formula):
    lhs: Formula
    rhs: Formula


class _Quant(Formula):
    pass


@dataclass(frozen=True)
class Forall(_Quant):
    var: str
    bound: Optional[Term]
    body: Formula

    def __post_init__(self):
        _check_bound(self.var, self.bound)


@dataclass(frozen=True)
class Exists(_Quant):
    var: str
    bound: Optional[Term]
    body: Formula

    def __post_init__(self):
        _check_bound(self.var, self.bound)


def _check_bound(var, bound):
    if bound is not None and var in term_free_vars(bound):
        raise ValueError("bound term of %r mentions the quantified variable" % var)


QUANT_KINDS = {Forall: "forall", Exists: "exists"}


def make_quant(kind: str, var: str, bound: Optional[Term], body: Formula) -> Formula:
    return Forall(var, bound, body) if kind == "forall" else Exists(var, bound, body)


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Eq):
        return term_free_vars(f.lhs) | term_free_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Imp)):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, (Forall, Exists)):
        out = free_vars(f.body) - {f.var}
        if f.bound is not None:
            out |= term_free_vars(f.bound)
        return out
    raise TypeError("not a formula: %r" % (f,))


def bound_vars(f: Formula) -> list:
    """All bound variable names, in binder preorder (duplicates kept)."""
    out = []

    def walk(g):
        if isinstance(g, (Forall, Exists)):
            out.append(g.var)
            walk(g.body)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.lhs)
            walk(g.rhs)

    walk(f)
    return out


def quantifier_count(f: Formula) -> int:
    """Number of quantifier nodes, bounded and unbounded alike."""
    if isinstance(f, (Forall, Exists)):
        return 1 + quantifier_count(f.body)
    if isinstance(f, Not):
        return quantifier_count(f.body)
    if isinstance(f, (And, Or, Imp)):
        return quantifier_count(f.lhs) + quantifier_count(f.rhs)
    return 0


def fresh_name(stem: str, used, allow_bare: bool = False) -> str:
    """Lowest-numeric-suffix name based on stem that avoids `used`.

    The stem's own trailing digits are stripped first, so a clash with "n1"
    tries n2, n3, ... Candidates are stem (if allow_bare), stem1, stem2, ...
    """
    base = stem.rstrip("0123456789") or stem
    if allow_bare and base not in used and base not in RESERVED:
        return base
    i = 1
    while True:
        cand = "%s%d" % (base, i)
        if cand not in used:
            return cand
        i += 1


def substitute(f: Formula, name: str, repl: Term) -> Formula:
    """Capture-avoiding substitution of a term for a free variable."""
    if isinstance(f, Eq):
        return Eq(term_subst(f.lhs, name, repl), term_subst(f.rhs, name, repl))
    if isinstance(f, Not):
        return Not(substitute(f.body, name, repl))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(substitute(f.lhs, name, repl), substitute(f.rhs, name, repl))
    if isinstance(f, (Forall, Exists)):
        bound = None if f.bound is None else term_subst(f.bound, name, repl)
        if f.var == name:
            # the substituted variable is shadowed; only the bound can change
            return type(f)(f.var, bound, f.body)
        if f.var in term_free_vars(repl) and name in free_vars(f.body):
            avoid = (
                free_vars(f.body)
                | term_free_vars(repl)
                | {name}
                | (term_free_vars(bound) if bound is not None else frozenset())
            )
            newvar = fresh_name(f.var, avoid)
            body = substitute(f.body, f.var, Var(newvar))
            return type(f)(newvar, bound, substitute(body, name, repl))
        return type(f)(f.var, bound, substitute(f.body, name, repl))
    raise TypeError("not a formula: %r" % (f,))


def rename_bound(f: Formula, stem: str = "x") -> Formula:
    """Rename every bound variable to stem0, stem1, ... in binder preorder.

    Canonical-name renaming used before prenex extraction; fresh names skip
    any free variable of f that would collide.
    """
    frees = free_vars(f)
    counter = [0]

    def next_name():
        while True:
            cand = "%s%d" % (stem, counter[0])
            counter[0] += 1
            if cand not in frees:
                return cand

    def walk(g):
        if isinstance(g, (Forall, Exists)):
            newvar = next_name()
            body = substitute(g.body, g.var, Var(newvar)) if g.var != newvar else g.body
            return type(g)(newvar, g.bound, walk(body))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Imp)):
            return type(g)(walk(g.lhs), walk(g.rhs))
        return g

    return walk(f)


def alpha_eq(f: Formula, g: Formula) -> bool:
    """Equality up to renaming of bound variables."""
    stem = "_a"
    return rename_bound(f, stem) == rename_bound(g, stem)


def desugar_bounded(f: Formula) -> Formula:
    """Expand bounded quantifiers into their official abbreviations.

    forall n < t. A  becomes  forall n. (chLt(n, t) = 1 -> A)
    exists n < t. A  becomes  exists n. (chLt(n, t) = 1 & A)
    """
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(desugar_bounded(f.body))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(desugar_bounded(f.lhs), desugar_bounded(f.rhs))
    if isinstance(f, (Forall, Exists)):
        body = desugar_bounded(f.body)
        if f.bound is None:
            return type(f)(f.var, None, body)
        guard = Eq(PrimFn("chLt", (Var(f.var), f.bound)), nat(1))
        if isinstance(f, Forall):
            return Forall(f.var, None, Imp(guard, body))
        return Exists(f.var, None, And(guard, body))
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# printing

_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_ATOM = 5


def pretty(f: Formula) -> str:
    return _pp(f, 0)


def _pp(f: Formula, ctx: int) -> str:
    if isinstance(f, (Forall, Exists)):
        kind = "forall" if isinstance(f, Forall) else "exists"
        if f.bound is None:
            s = "%s %s. %s" % (kind, f.var, _pp(f.body, 0))
        else:
            s = "%s %s < %s. %s" % (kind, f.var, f.bound, _pp(f.body, 0))
        return "(%s)" % s if ctx > 0 else s
    if isinstance(f, Imp):
        s = "%s -> %s" % (_pp(f.lhs, _PREC_OR), _pp(f.rhs, _PREC_IMP))
        return "(%s)" % s if ctx > _PREC_IMP else s
    if isinstance(f, Or):
        s = "%s | %s" % (_pp(f.lhs, _PREC_OR), _pp(f.rhs, _PREC_AND))
        return "(%s)" % s if ctx > _PREC_OR else s
    if isinstance(f, And):
        s = "%s & %s" % (_pp(f.lhs, _PREC_AND), _pp(f.rhs, _PREC_NOT))
        return "(%s)" % s if ctx > _PREC_AND else s
    if isinstance(f, Not):
        return "!%s" % _pp(f.body, _PREC_NOT)
    if isinstance(f, Eq):
        s = "%s = %s" % (f.lhs, f.rhs)
        return "(%s)" % s if ctx > _PREC_ATOM else s
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message, line, col):
        super().__init__("%s (line %d, column %d)" % (message, line, col))
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


_PUNCT = [("->", "ARROW"), ("(", "LPAREN"), (")", "RPAREN"), (",", "COMMA"),
          (".", "DOT"), ("=", "EQ"), ("|", "BAR"), ("&", "AMP"), ("!", "BANG"),
          ("<", "LT")]


def _tokens(text: str) -> Iterator[_Tok]:
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        matched = False
        for lit, kind in _PUNCT:
            if text.startswith(lit, i):
                yield _Tok(kind, lit, line, col)
                i += len(lit)
                col += len(lit)
                matched = True
                break
        if matched:
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield _Tok("NAT", text[i:j], line, col)
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield _Tok("IDENT", text[i:j], line, col)
            col += j - i
            i = j
            continue
        raise ParseError("unexpected character %r" % c, line, col)
    yield _Tok("EOF", "", line, col)


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                "expected %s, found %r" % (kind, tok.text or "end of input"),
                tok.line, tok.col)
        return self.next()

    def fail(self, message):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # formula := quant | impl
    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in ("forall", "exists"):
            self.next()
            name = self.expect("IDENT").text
            if name in RESERVED:
                self.fail("%r is reserved and cannot be a variable" % name)
            bound = None
            if self.peek().kind == "LT":
                self.next()
                bound = self.term()
            self.expect("DOT")
            body = self.formula()
            try:
                return make_quant(tok.text, name, bound, body)
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        return self.impl()

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "ARROW":
            self.next()
            return Imp(left, self.impl())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek().kind == "BAR":
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.neg()
        while self.peek().kind == "AMP":
            self.next()
            out = And(out, self.neg())
        return out

    def neg(self) -> Formula:
        if self.peek().kind == "BANG":
            self.next()
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        if self.peek().kind == "LPAREN":
            self.next()
            inner = self.formula()
            self.expect("RPAREN")
            return inner
        lhs = self.term()
        self.expect("EQ")
        rhs = self.term()
        return Eq(lhs, rhs)

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "NAT":
            self.next()
            return nat(int(tok.text))
        if tok.kind != "IDENT":
            self.fail("expected a term, found %r" % (tok.text or "end of input"))
        name = self.next().text
        if name == "S":
            self.expect("LPAREN")
            inner = self.term()
            self.expect("RPAREN")
            return Suc(inner)
        if name in PRIM_ARITY:
            self.expect("LPAREN")
            args = [self.term()]
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.term())
            self.expect("RPAREN")
            if len(args) != PRIM_ARITY[name]:
                raise ParseError(
                    "%s expects %d arguments, got %d"
                    % (name, PRIM_ARITY[name], len(args)),
                    tok.line, tok.col)
            return PrimFn(name, tuple(args))
        if name in RESERVED:
            self.fail("%r is reserved and cannot be a variable" % name)
        return Var(name)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.expect("EOF")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("EOF")
    return t
