"""Bounded ground truth over the standard model of arithmetic.

Three layers of independent oracle:

  * eval_term / eval_bounded — three-valued (Kleene) evaluation where
    unbounded quantifier searches are cut off at a bound B.  A definite
    True/False verdict is sound for genuine standard-model truth; Unknown
    means the bound was hit without deciding.  Bounded quantifiers are
    evaluated exactly over their (computed) finite range.

  * solve_game — exhaustive minimax over the quantifier game of a prenex
    formula, all moves below a bound, extracting for the existential player
    the table of lexicographically least winning moves.

  * uniformize — the mu-choice function of a true forall/exists statement,
    as a finite table.

Definite verdicts are monotone in the bound: once True or False at B, the
same verdict holds at every larger bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    And, Eq, Exists, Forall, Formula, Imp, Not, Or, PrimFn, Suc, Term, Var,
    Zero,
)


class Truth3(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


TRUE = Truth3.TRUE
FALSE = Truth3.FALSE
UNKNOWN = Truth3.UNKNOWN

_NOT = {TRUE: FALSE, FALSE: TRUE, UNKNOWN: UNKNOWN}


def t3_not(u: Truth3) -> Truth3:
    return _NOT[u]


def t3_and(u: Truth3, v: Truth3) -> Truth3:
    if u is FALSE or v is FALSE:
        return FALSE
    if u is TRUE and v is TRUE:
        return TRUE
    return UNKNOWN


def t3_or(u: Truth3, v: Truth3) -> Truth3:
    if u is TRUE or v is TRUE:
        return TRUE
    if u is FALSE and v is FALSE:
        return FALSE
    return UNKNOWN


def definitely_disagree(u: Truth3, v: Truth3) -> bool:
    """One side definitely True while the other is definitely False."""
    return (u is TRUE and v is FALSE) or (u is FALSE and v is TRUE)


# ---------------------------------------------------------------------------
# term evaluation


def cantor_pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def cantor_fst(z: int) -> int:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    return w - (z - w * (w + 1) // 2)


def cantor_snd(z: int) -> int:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    return z - w * (w + 1) // 2


def eval_term(t: Term, env) -> int:
    """Standard-model value of a term under an environment."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise ValueError("unbound variable %r" % t.name) from None
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Suc):
        return eval_term(t.arg, env) + 1
    if isinstance(t, PrimFn):
        args = [eval_term(a, env) for a in t.args]
        sym = t.symbol
        if sym == "add":
            return args[0] + args[1]
        if sym == "mul":
            return args[0] * args[1]
        if sym == "monus":
            return max(0, args[0] - args[1])
        if sym == "pair":
            return cantor_pair(args[0], args[1])
        if sym == "fst":
            return cantor_fst(args[0])
        if sym == "snd":
            return cantor_snd(args[0])
        if sym == "chLt":
            return 1 if args[0] < args[1] else 0
        if sym == "chEq":
            return 1 if args[0] == args[1] else 0
    raise TypeError("not a term: %r" % (t,))


# ---------------------------------------------------------------------------
# three-valued bounded evaluation

_MISSING = object()


def eval_bounded(f: Formula, env, B: int) -> Truth3:
    """Three-valued truth of a formula with quantifier searches cut at B.

    Bounded quantifiers range exactly over [0, value of their bound term);
    unbounded exists is True on a witness < B and otherwise Unknown, and
    unbounded forall is False on a counterexample < B and otherwise Unknown.
    """
    return _eval(f, dict(env) if env else {}, B)


def _eval(f: Formula, env: dict, B: int) -> Truth3:
    if isinstance(f, Eq):
        return TRUE if eval_term(f.lhs, env) == eval_term(f.rhs, env) else FALSE
    if isinstance(f, Not):
        return t3_not(_eval(f.body, env, B))
    if isinstance(f, And):
        left = _eval(f.lhs, env, B)
        if left is FALSE:
            return FALSE
        return t3_and(left, _eval(f.rhs, env, B))
    if isinstance(f, Or):
        left = _eval(f.lhs, env, B)
        if left is TRUE:
            return TRUE
        return t3_or(left, _eval(f.rhs, env, B))
    if isinstance(f, Imp):
        left = _eval(f.lhs, env, B)
        if left is FALSE:
            return TRUE
        return t3_or(t3_not(left), _eval(f.rhs, env, B))
    if isinstance(f, (Forall, Exists)):
        exact = f.bound is not None
        hi = eval_term(f.bound, env) if exact else B
        saved = env.get(f.var, _MISSING)
        try:
            if isinstance(f, Forall):
                out = TRUE if exact else UNKNOWN
                for n in range(hi):
                    env[f.var] = n
                    v = _eval(f.body, env, B)
                    if v is FALSE:
                        return FALSE
                    if v is UNKNOWN:
                        out = UNKNOWN
                return out
            out = FALSE if exact else UNKNOWN
            for n in range(hi):
                env[f.var] = n
                v = _eval(f.body, env, B)
                if v is TRUE:
                    return TRUE
                if v is UNKNOWN:
                    out = UNKNOWN
            return out
        finally:
            if saved is _MISSING:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# quantifier games


@dataclass(frozen=True)
class GameSpec:
    """A bounded quantifier game: prefix of moves over a decidable matrix.

    prefix entries are (kind, variable) with kind "exists" or "forall";
    every move ranges over [0, move_bound).  The matrix must be decidable
    under eval_bounded once all prefix variables are set (degree 0), with
    free parameters supplied through env.
    """

    prefix: tuple
    matrix: Formula
    move_bound: int
    env: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "env", tuple(sorted(dict(self.env).items())))
        for kind, _ in self.prefix:
            if kind not in ("exists", "forall"):
                raise ValueError("bad prefix kind %r" % kind)
        if self.move_bound < 1:
            raise ValueError("move_bound must be at least 1")


@dataclass(frozen=True)
class StrategyTable:
    """Least winning moves for the existential player.

    Keys are (position index in the prefix, tuple of the universal moves
    made so far); the stored move is the least one that still wins when the
    earlier existential choices follow this same table.
    """

    moves: tuple  # sorted tuple of ((pos, history), move)

    @classmethod
    def from_dict(cls, d: dict) -> "StrategyTable":
        return cls(tuple(sorted(d.items())))

    def as_dict(self) -> dict:
        return dict(self.moves)

    def __getitem__(self, key):
        return self.as_dict()[key]

    def __len__(self):
        return len(self.moves)


def solve_game(g: GameSpec):
    """Exhaustive minimax; returns (winner, table of least winning moves).

    winner is "exists" or "forall"; the table is empty when forall wins.
    """
    prefix = g.prefix
    B = g.move_bound
    base_env = dict(g.env)
    memo: dict = {}

    def wins(i: int, moves: tuple) -> bool:
        key = (i, moves)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if i == len(prefix):
            env = dict(base_env)
            for (kind_, var_), m in zip(prefix, moves):
                env[var_] = m
            v = eval_bounded(g.matrix, env, B)
            if v is UNKNOWN:
                raise ValueError("game matrix is not decidable (degree > 0)")
            out = v is TRUE
        else:
            kind, _ = prefix[i]
            if kind == "exists":
                out = any(wins(i + 1, moves + (m,)) for m in range(B))
            else:
                out = all(wins(i + 1, moves + (m,)) for m in range(B))
        memo[key] = out
        return out

    if not wins(0, ()):
        return "forall", StrategyTable.from_dict({})

    table: dict = {}

    def walk(i: int, moves: tuple, opp: tuple):
        if i == len(prefix):
            return
        kind, _ = prefix[i]
        if kind == "exists":
            for m in range(B):
                if wins(i + 1, moves + (m,)):
                    table[(i, opp)] = m
                    walk(i + 1, moves + (m,), opp)
                    return
            raise AssertionError("winning position with no winning move")
        for m in range(B):
            walk(i + 1, moves + (m,), opp + (m,))

    walk(0, (), ())
    return "exists", StrategyTable.from_dict(table)


# ---------------------------------------------------------------------------
# uniformization


class NoWitness(Exception):
    """Raised when some n below the bound has no witness below the bound.

    Carries the failing n and the partial table built so far.
    """

    def __init__(self, n: int, partial: dict):
        super().__init__("no witness below bound for n=%d" % n)
        self.n = n
        self.partial = dict(partial)


def uniformize(f: Formula, B: int, env=None) -> dict:
    """Least-witness choice table for a forall/exists statement.

    f must be of the shape forall n. exists m. R with both quantifiers
    unbounded; returns {n: least m < B with R(n, m) definitely True} for
    every n < B, raising NoWitness on the first n with no such m.
    """
    if not (isinstance(f, Forall) and f.bound is None
            and isinstance(f.body, Exists) and f.body.bound is None):
        raise ValueError("uniformize expects a forall/exists prefix")
    nvar = f.var
    mvar = f.body.var
    body = f.body.body
    scope = dict(env) if env else {}
    table: dict = {}
    for n in range(B):
        scope[nvar] = n
        for m in range(B):
            scope[mvar] = m
            if eval_bounded(body, scope, B) is TRUE:
                table[n] = m
                break
        else:
            raise NoWitness(n, table)
    return table
