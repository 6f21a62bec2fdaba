"""Realizer checking and synthesis over the limit tower.

A realizer for a sentence is an element whose shape follows the sentence:
pairs for conjunctions and existentials (first component tagging or
witnessing, second carrying the rest), applicable elements for
implications and universals, numerals at the atoms.  Whether an element
actually realizes a sentence is undecidable in general, so ``realizes_check``
returns three-valued, bound-stamped verdicts: ``Realized`` and ``Refuted``
are issued only when every contributing sub-check was definite at the
inspected bound; everything else is ``Unknown``.  In particular a failure
to read a numeral out of a limit element is never treated as a refutation,
only as inconclusive sampling.

The synthesis half builds realizers for prenex sentences
``exists n1. forall n2. ... M = 0`` whose matrix is a bounded program.
Each existential move is produced by a guessing function: a bounded search
that, at stage ``l``, commits to the least candidate surviving every
opponent reply below ``l``.  Wrapping each guess in one limit level and
chaining them through the quantifier prefix yields an element of the
iterated limit algebra that realizes the double-negation shift of the
sentence, and whose move tables can be read back with ``eval_limit`` and
compared against exhaustive game solving.
"""

import itertools
from dataclasses import dataclass
from enum import Enum

from . import limiting, oracle, pca, syntax
from .dsl import (BasePrim, BoundedMax, BoundedMin, Comp, Const, Mu, Proj,
                  arity_of, eval_dsl, validate)
from .limiting import LimElement
from .oracle import Truth3

_CHLT = BasePrim("chLt")
_MONUS = BasePrim("monus")
_MUL = BasePrim("mul")
_ADD = BasePrim("add")
_CHEQ = BasePrim("chEq")

# Step cap for the sampled totality check on user-supplied matrices.
_TOTALITY_CAP = 200_000
_TOTALITY_POINTS = 81


class Verdict(Enum):
    REALIZED = "Realized"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CheckStep:
    """One recorded sub-check: what was examined and what came of it."""

    label: str
    report: "CheckReport"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of ``realizes_check``.

    ``check_bound`` stamps the quantifier/candidate bound the verdict was
    computed at; ``fuel_used`` is an upper bound on machine steps charged
    (metered runs times the per-run budget); ``trace`` records the
    sub-checks that contributed.
    """

    verdict: Verdict
    check_bound: int
    fuel_used: int
    trace: tuple = ()


class UnstableLimit(RuntimeError):
    """A synthesized guess failed to settle within the sampling horizon."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class MatrixSpec:
    """A decidable matrix for a quantifier game.

    ``body`` is a bounded program over ``arity`` move arguments followed by
    ``len(params)`` parameter arguments; a play satisfies the matrix exactly
    when the body evaluates to 0.  ``totality_attested`` skips the sampled
    totality check (use it when the body is loop-free by construction).
    """

    arity: int
    body: object
    params: tuple = ()
    totality_attested: bool = False

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("matrix needs at least one move argument")
        validate(self.body)
        want = self.arity + len(self.params)
        got = arity_of(self.body)
        if got is not None and got != want:
            raise ValueError("matrix body takes %d arguments, expected %d"
                             % (got, want))


@dataclass(frozen=True)
class MoveFunctions:
    """Synthesized winning moves for a ``k``-quantifier game.

    ``moves[p]`` is the guess element for the ``(2p+1)``-th quantifier,
    taking the opponent replies made so far as arguments; all entries live
    at the same limit level.  ``tables`` holds the decoded value of each
    move on every opponent history below the synthesis bound, as sorted
    ``(history, value)`` pairs.
    """

    k: int
    moves: tuple
    tables: tuple


@dataclass(frozen=True)
class GameSentence:
    """A prenex sentence paired with its matrix compiled to a program.

    ``names`` lists the quantifier variables outermost first; the prefix
    must alternate starting with an existential, one variable per move.
    """

    formula: object
    matrix: MatrixSpec
    names: tuple


# ---------------------------------------------------------------------------
# Formula-to-program bridge
# ---------------------------------------------------------------------------


def _term_prog(t, order):
    if isinstance(t, syntax.Var):
        if t.name not in order:
            raise ValueError("unbound variable %r in matrix" % t.name)
        return Proj(order.index(t.name), len(order))
    if isinstance(t, syntax.Zero):
        return Const(0)
    if isinstance(t, syntax.Suc):
        return Comp(_ADD, (Const(1), _term_prog(t.arg, order)))
    if isinstance(t, syntax.PrimFn):
        prim = BasePrim(t.symbol)
        return Comp(prim, tuple(_term_prog(a, order) for a in t.args))
    raise ValueError("not a term: %r" % (t,))


def _false_prog(f, order):
    """A {0,1}-valued program that is 0 exactly where ``f`` holds."""
    if isinstance(f, syntax.Eq):
        eq = Comp(_CHEQ, (_term_prog(f.lhs, order), _term_prog(f.rhs, order)))
        return Comp(_MONUS, (Const(1), eq))
    if isinstance(f, syntax.Not):
        return Comp(_MONUS, (Const(1), _false_prog(f.body, order)))
    if isinstance(f, syntax.And):
        both = Comp(_ADD, (_false_prog(f.lhs, order), _false_prog(f.rhs, order)))
        return Comp(_CHLT, (Const(0), both))
    if isinstance(f, syntax.Or):
        return Comp(_MUL, (_false_prog(f.lhs, order), _false_prog(f.rhs, order)))
    if isinstance(f, syntax.Imp):
        hold = Comp(_MONUS, (Const(1), _false_prog(f.lhs, order)))
        return Comp(_MUL, (hold, _false_prog(f.rhs, order)))
    if isinstance(f, (syntax.Forall, syntax.Exists)):
        if f.bound is None:
            raise ValueError("matrix must be decidable; %r quantifies "
                             "unboundedly" % f.var)
        inner_order = (f.var,) + tuple(order)
        n = len(order)
        bound = _term_prog(f.bound, order)
        passthrough = tuple(Proj(i, n) for i in range(n))
        if isinstance(f, syntax.Forall):
            body = _false_prog(f.body, inner_order)
            return Comp(BoundedMax(body), (bound,) + passthrough)
        true_body = Comp(_MONUS, (Const(1), _false_prog(f.body, inner_order)))
        any_true = Comp(BoundedMax(true_body), (bound,) + passthrough)
        return Comp(_MONUS, (Const(1), any_true))
    raise ValueError("not a formula: %r" % (f,))


def matrix_program(f, order):
    """Compile a decidable formula to a program over the variables ``order``.

    The program evaluates to 0 exactly on satisfying assignments.  Bounded
    quantifiers become bounded sweeps; unbounded quantifiers are rejected.
    """
    order = tuple(order)
    prog = _false_prog(f, order)
    validate(prog)
    return prog


def game_sentence(f):
    """Split a closed prenex sentence into its move prefix and matrix.

    The prefix must strictly alternate starting with an existential and use
    unbounded quantifiers; the matrix must be decidable.  Returns a
    :class:`GameSentence` whose matrix program is total by construction.
    """
    if syntax.free_vars(f):
        raise ValueError("sentence must be closed")
    names = []
    g = f
    while isinstance(g, (syntax.Forall, syntax.Exists)):
        want_exists = len(names) % 2 == 0
        if isinstance(g, syntax.Exists) != want_exists:
            raise ValueError("prefix must alternate exists/forall from the "
                             "outside in")
        if g.bound is not None:
            raise ValueError("prefix quantifiers must be unbounded")
        if g.var in names:
            raise ValueError("prefix reuses variable %r" % g.var)
        names.append(g.var)
        g = g.body
    if not names:
        raise ValueError("expected a leading existential quantifier")
    body = matrix_program(g, tuple(names))
    spec = MatrixSpec(len(names), body, (), True)
    return GameSentence(f, spec, tuple(names))


# ---------------------------------------------------------------------------
# The guess-function tower
# ---------------------------------------------------------------------------
#
# For a k-move matrix, the depth-j tower program answers "does the current
# play still look winnable when the last j quantifiers are replaced by
# sweeps below given stage bounds?".  Flat argument order is
#
#     (l_1, ..., l_j, nu_1, ..., nu_{k-j}, params)
#
# with l_1 the innermost (fastest-growing) stage; each deeper tower level
# appends its new stage bound after the existing ones, which matches how an
# element of the j-th limit algebra consumes stage arguments.


def _sample_totality(m):
    width = m.arity + len(m.params)
    grid = itertools.product((0, 1, 2, 3), repeat=width)
    for args in itertools.islice(grid, _TOTALITY_POINTS):
        try:
            eval_dsl(m.body, args, step_cap=_TOTALITY_CAP)
        except Exception as ex:
            raise ValueError("matrix is not total on sampled inputs "
                             "(args %r): %s" % (args, ex))


def _checked(m):
    if not m.totality_attested:
        _sample_totality(m)
    return m


def _g_flat(m, j):
    k, np = m.arity, len(m.params)
    if j == 0:
        return Comp(_CHLT, (Const(0), m.body))
    inner = _g_flat(m, j - 1)
    width = k + np
    # Sweep body: (nu_new, l_1..l_{j-1}, nu_1..nu_{k-j}, params), routed into
    # the depth-(j-1) program which wants the swept variable second to last.
    routed = (tuple(Proj(1 + i, width) for i in range(j - 1))
              + tuple(Proj(j + i, width) for i in range(k - j))
              + (Proj(0, width),)
              + tuple(Proj(k + i, width) for i in range(np)))
    swept = Comp(inner, routed)
    sweep = BoundedMax(swept) if (k - j) % 2 == 1 else BoundedMin(swept)
    # Outer program: (l_1..l_j, nu_1..nu_{k-j}, params); the newest stage
    # l_j becomes the sweep bound.
    outer = ((Proj(j - 1, width),)
             + tuple(Proj(i, width) for i in range(j - 1))
             + tuple(Proj(j + i, width) for i in range(k - j))
             + tuple(Proj(k + i, width) for i in range(np)))
    return Comp(sweep, outer)


def g_tower(m, j, algebra):
    """The depth-``j`` tower element for matrix ``m``, at limit level ``j``.

    Depth 0 is the {0,1}-normalized matrix itself (0 exactly on satisfying
    plays); each further depth replaces the innermost remaining quantifier
    with a stage-bounded sweep (min for an existential slot, max for a
    universal one, so 0 keeps meaning "winnable") and adds one limit level.
    Requires ``0 <= j <= arity - 2`` (or ``j == 0`` for a one-move matrix).
    """
    m = _checked(m)
    if j < 0 or (j > 0 and j > m.arity - 2):
        raise ValueError("tower depth %d out of range for %d moves"
                         % (j, m.arity))
    flat = _g_flat(m, j)
    return LimElement(pca.compile_dsl(flat, algebra), j)


def _ghat_flat(m, p):
    """Flat guess program for the ``(2p-1)``-th move of matrix ``m``.

    Searches for the least candidate such that the remaining game, with the
    next opponent reply swept below the newest stage bound, still looks
    winnable according to the depth-``(k-2p)`` tower program.  Argument
    order: stages first, then the opponent history interleaved with the
    earlier moves, then parameters.  When ``2p-1 == k`` there is no
    opponent left to sweep; a single unused stage slot keeps the wrapped
    element inside the limit tower.
    """
    k, np = m.arity, len(m.params)
    hist = 2 * p - 2
    if 2 * p - 1 == k:
        inner = _g_flat(m, 0)
        width = 1 + 1 + hist + np  # candidate, dummy stage, history, params
        routed = (tuple(Proj(2 + i, width) for i in range(hist))
                  + (Proj(0, width),)
                  + tuple(Proj(2 + hist + i, width) for i in range(np)))
        return Mu(Comp(inner, routed))
    j = k - 2 * p
    inner = _g_flat(m, j)
    width = 1 + j + 1 + hist + np  # candidate, stages, bound, history, params
    # Swept frame: (nu_sweep, candidate, l_1..l_j, history, params).
    routed = (tuple(Proj(2 + i, width) for i in range(j))
              + tuple(Proj(2 + j + i, width) for i in range(hist))
              + (Proj(1, width), Proj(0, width))
              + tuple(Proj(2 + j + hist + i, width) for i in range(np)))
    sweep = BoundedMax(Comp(inner, routed))
    # Search frame: (candidate, l_1..l_j, bound, history, params).
    outer = ((Proj(1 + j, width), Proj(0, width))
             + tuple(Proj(1 + i, width) for i in range(j))
             + tuple(Proj(2 + j + i, width) for i in range(hist))
             + tuple(Proj(2 + j + hist + i, width) for i in range(np)))
    return Mu(Comp(sweep, outer))


# ---------------------------------------------------------------------------
# Element plumbing shared by checking and synthesis
# ---------------------------------------------------------------------------


def _lvl(e):
    return e.level if isinstance(e, LimElement) else 0


def _payload(e):
    return e.base if isinstance(e, LimElement) else e


def _at_level(e, level):
    if isinstance(e, LimElement):
        return limiting.coerce(e, level)
    if level == 0:
        return e
    return limiting.coerce(LimElement(e, 0), level)


# Constant-function bookkeeping.  Applying the constant combinator at a
# limit level builds a guess that answers the same element at every stage no
# matter the argument, but the formed application is a fresh payload, so
# downstream memo tables cannot tell those applications apart.  Recording
# the wrap when it is built lets later applications answer directly with the
# stored element, which collapses whole families of identical checks (every
# probe argument fed to a constant realizer, every instance of a constant
# quantifier family).  The shortcut asserts the stagewise K law, so it is
# only taken for arguments with defined slices — which covers everything the
# synthesizer and checker construct (numerals and formed pair trees).
_K_CONSTS = set()
_K_WRAPPED = {}
_REGISTRY_CAP = 65536


def _lapp(a, b):
    """``lim_apply`` plus registration of constant-function results."""
    out = limiting.lim_apply(a, b)
    if _payload(a).payload in _K_CONSTS:
        if len(_K_WRAPPED) >= _REGISTRY_CAP:
            _K_WRAPPED.clear()
        _K_WRAPPED[_payload(out).payload] = b
    return out


def _capply(a, b):
    """Apply at a limit level, short-cutting recorded constant functions."""
    hit = _K_WRAPPED.get(_payload(a).payload)
    if hit is not None and _lvl(hit) == _lvl(a):
        return hit
    return _lapp(a, b)


def _unwrap0(e):
    return e.base if isinstance(e, LimElement) else e


class _Tower:
    """Per-algebra constants coerced on demand to a working level."""

    def __init__(self, algebra):
        self.algebra = algebra
        self.eon = pca.eon_constants(algebra)
        sk = pca.eval_term(algebra, pca.App(pca.App(pca.S, pca.K), pca.K))
        self._base = {
            "s": pca.eval_term(algebra, pca.S).element,
            "k": pca.eval_term(algebra, pca.K).element,
            "i": sk.element,
            "pair": self.eon.p,
            "car": self.eon.car,
            "cdr": self.eon.cdr,
            "d": self.eon.d,
        }
        self._cache = {}
        self._nums = {}

    def const(self, name, level):
        key = (name, level)
        if key not in self._cache:
            self._cache[key] = _at_level(self._base[name], level)
            if name == "k" and level >= 1:
                _K_CONSTS.add(_payload(self._cache[key]).payload)
        return self._cache[key]

    def num(self, n, level):
        key = (n, level)
        if key not in self._nums:
            self._nums[key] = _at_level(pca.numeral(self.algebra, n), level)
        return self._nums[key]


# A tiny applicative language over tower elements, used to abstract over
# opponent replies when chaining moves and assembling realizers.  At limit
# levels application is total term formation, so the plain S/K translation
# (with the K shortcut for subterms not mentioning the variable) is sound.


class _LVar:
    __slots__ = ("idx",)

    def __init__(self, idx):
        self.idx = idx


class _LApp:
    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg


class _LLift:
    __slots__ = ("elem",)

    def __init__(self, elem):
        self.elem = elem


def _lfree(var, ir):
    if isinstance(ir, _LVar):
        return ir.idx == var.idx
    if isinstance(ir, _LApp):
        return _lfree(var, ir.fn) or _lfree(var, ir.arg)
    return False


def _labstract(var, ir, tower, level):
    if isinstance(ir, _LVar) and ir.idx == var.idx:
        return _LLift(tower.const("i", level))
    if not _lfree(var, ir):
        return _LApp(_LLift(tower.const("k", level)), ir)
    return _LApp(_LApp(_LLift(tower.const("s", level)),
                       _labstract(var, ir.fn, tower, level)),
                 _labstract(var, ir.arg, tower, level))


def _leval(ir):
    if isinstance(ir, _LLift):
        return ir.elem
    if isinstance(ir, _LApp):
        return _lapp(_leval(ir.fn), _leval(ir.arg))
    raise ValueError("open expression")


# ---------------------------------------------------------------------------
# Move synthesis
# ---------------------------------------------------------------------------


def _default_fuel(horizon, bound):
    # Covers candidate search times outer sweep times inner sweep, with
    # headroom for the opcode constant.  Inner recursion runs ahead of the
    # stated horizon (each level widens it by half a window twice over), so
    # the sweeps cost roughly 3*horizon^2 with the matrix evaluated at every
    # point; 1024 leaves a margin over that times a by-hand opcode count.
    return 1024 * horizon * horizon * max(1, bound)


def _move_functions(m, algebra, horizon, bound, fuel, level):
    m = _checked(m)
    k = m.arity
    if m.params:
        raise ValueError("move synthesis needs a closed game (no parameters)")
    if horizon < 4:
        raise ValueError("horizon too small to certify a tail")
    window = max(1, horizon // 4)
    if fuel is None:
        fuel = _default_fuel(horizon, bound)
    tower = _Tower(algebra)
    n_moves = (k + 1) // 2
    moves = []
    tables = []
    for p in range(1, n_moves + 1):
        raw_level = 1 if 2 * p - 1 == k else k - 2 * p + 1
        raw = LimElement(pca.compile_dsl(_ghat_flat(m, p), algebra), raw_level)
        guess = limiting.coerce(raw, level)
        if p == 1:
            move = guess
        else:
            # The guess wants (m1, nu2, m3, nu4, ...); close it over the
            # earlier moves so only the opponent replies remain.
            replies = [_LVar(i) for i in range(p - 1)]
            ir = _LLift(guess)
            for q in range(1, p):
                earlier = _LLift(moves[q - 1])
                for v in replies[:q - 1]:
                    earlier = _LApp(earlier, v)
                ir = _LApp(ir, earlier)
                ir = _LApp(ir, replies[q - 1])
            for v in reversed(replies):
                ir = _labstract(v, ir, tower, level)
            move = _leval(ir)
        moves.append(move)
        table = []
        for history in itertools.product(range(bound), repeat=p - 1):
            elem = move
            for v in history:
                elem = _capply(elem, tower.num(v, level))
            out = limiting.eval_limit(elem, horizon, window, fuel)
            if not isinstance(out, limiting.Number):
                raise UnstableLimit(
                    "move %d did not settle on history %r within horizon %d"
                    % (2 * p - 1, history, horizon), history=history)
            if out.value >= bound:
                raise ValueError(
                    "move %d exceeds bound %d on history %r (got %d)"
                    % (2 * p - 1, bound, history, out.value))
            table.append((history, out.value))
        tables.append(tuple(table))
    return MoveFunctions(k, tuple(moves), tuple(tables))


def synth_move_functions(m, algebra, horizon=64, bound=8, fuel=None):
    """Synthesize the existential moves of the game given by matrix ``m``.

    Every move is returned at limit level ``k`` (the number of moves in
    ``m``).  Each move is also evaluated on all opponent histories below
    ``bound``; a guess that fails to settle raises :class:`UnstableLimit`
    and a settled value at or above ``bound`` raises ``ValueError``, so a
    returned table is total with entries below ``bound``.
    """
    return _move_functions(m, algebra, horizon, bound, fuel, m.arity)


def _assemble_realizer(mv, algebra, level):
    tower = _Tower(algebra)
    k = mv.k
    pair = _LLift(tower.const("pair", level))
    bottom = _LLift(tower.num(0, level))
    replies = [_LVar(i) for i in range(k // 2)]

    def build(pos, used):
        if pos > k:
            return bottom
        if pos % 2 == 1:
            witness = _LLift(_at_level(mv.moves[(pos - 1) // 2], level))
            for v in used:
                witness = _LApp(witness, v)
            return _LApp(_LApp(pair, witness), build(pos + 1, used))
        v = replies[pos // 2 - 1]
        inner = build(pos + 1, used + [v])
        return _labstract(v, inner, tower, level)

    return _leval(build(1, []))


def synth_realizer(sentence, algebra, horizon=64, bound=8, fuel=None):
    """Build a realizer for a true prenex game sentence.

    ``sentence`` is a :class:`GameSentence` or a closed prenex formula (an
    alternating exists/forall prefix over a decidable matrix).  The result
    is an element at limit level ``k`` pairing each synthesized move with
    the realizer for the rest of the game: the first component of the
    ``p``-th pair, applied to the opponent replies so far, is a guess
    element whose limit is the committed move.
    """
    gs = sentence if isinstance(sentence, GameSentence) else game_sentence(sentence)
    k = gs.matrix.arity
    mv = _move_functions(gs.matrix, algebra, horizon, bound, fuel, k)
    return _assemble_realizer(mv, algebra, k)


def _apply0(a, b):
    out = pca.apply(a, b)
    if not isinstance(out, pca.Value):
        raise RuntimeError("structural application unexpectedly ran out of fuel")
    return out.element


def realize_dne(k, m, algebra, horizon=64, bound=8, fuel=None):
    """Realize the double-negation elimination instance for matrix ``m``.

    For ``k == 1`` two matrix shapes are accepted.  A closed one-argument
    matrix is treated as a one-move instance: the guess for its least
    witness is evaluated to its limit and the result is the level-0 constant
    function sending any alleged refutation to ``pair(witness, 0)``, ready
    for ``realizes_check``.  A two-argument matrix ``(candidate, stage)``
    plus parameters instead yields the ordinary guessing program
    ``r(t, params) = least n with every reply below t refuted`` wrapped at
    level 0; its input/output behaviour is meant for
    ``pca.check_represents``.  For ``k >= 2`` the matrix must be closed and
    the result is a level-``(k-1)`` element: the constant function sending
    any alleged refutation to the synthesized realizer of the sentence.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        m = _checked(m)
        if m.arity == 1:
            if m.params:
                raise ValueError("a one-move instance needs a closed matrix")
            mv = _move_functions(m, algebra, horizon, bound, fuel, 1)
            n_star = mv.tables[0][0][1]
            tower = _Tower(algebra)
            witness = _apply0(
                _apply0(_unwrap0(tower.const("pair", 0)),
                        pca.numeral(algebra, n_star)),
                pca.numeral(algebra, 0))
            return LimElement(
                _apply0(_unwrap0(tower.const("k", 0)), witness), 0)
        if m.arity != 2:
            raise ValueError("k=1 expects a 1-move instance or a 2-argument "
                             "(candidate, stage) guess matrix")
        np = len(m.params)
        width = 2 + np  # candidate, stage bound, params
        swept = Comp(m.body, (Proj(1, width), Proj(0, width))
                     + tuple(Proj(2 + i, width) for i in range(np)))
        outer = (Proj(1, width), Proj(0, width)) \
            + tuple(Proj(2 + i, width) for i in range(np))
        prog = Mu(Comp(BoundedMax(swept), outer))
        return LimElement(pca.compile_dsl(prog, algebra), 0)
    if m.params:
        raise ValueError("k>=2 needs a closed matrix (no parameters)")
    mv = _move_functions(m, algebra, horizon, bound, fuel, k - 1)
    q = _assemble_realizer(mv, algebra, k - 1)
    tower = _Tower(algebra)
    return limiting.lim_apply(tower.const("k", k - 1), q)


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, algebra, bound, fuel, horizon, window):
        self.tower = _Tower(algebra)
        self.bound = bound
        self.fuel = fuel
        self.horizon = horizon
        self.window = window
        self.runs = 0
        self.memo = {}
        self.decoded = {}

    def budget(self):
        per = self.fuel if self.fuel is not None \
            else self.tower.algebra.fuel_default
        return self.runs * per


def _e_apply(ctx, e, x):
    """Apply within the tower; ``None`` when undefined within fuel."""
    if _lvl(e) == 0:
        ctx.runs += 1
        out = pca.apply(_unwrap0(e), _unwrap0(x), ctx.fuel)
        if isinstance(out, pca.Value):
            return out.element
        return None
    return limiting.lim_apply(e, x)


def _e_decode(ctx, e):
    """Read a numeral out of a tower element; ``None`` when inconclusive."""
    key = (_payload(e).payload, _lvl(e))
    if key in ctx.decoded:
        return ctx.decoded[key]
    if _lvl(e) == 0:
        ctx.runs += 1
        out = pca.decode_numeral(_unwrap0(e), ctx.fuel)
        n = out.value if isinstance(out, pca.Number) else None
    else:
        ctx.runs += ctx.horizon
        out = limiting.eval_limit(e, ctx.horizon, ctx.window, ctx.fuel)
        n = out.value if isinstance(out, limiting.Number) else None
    ctx.decoded[key] = n
    return n


def _components(ctx, e):
    level = _lvl(e)
    first = _e_apply(ctx, ctx.tower.const("car", level), e)
    second = _e_apply(ctx, ctx.tower.const("cdr", level), e)
    return first, second


def _pair_up(ctx, level, a, b):
    out = _e_apply(ctx, ctx.tower.const("pair", level), a)
    if out is None:
        return None
    return _e_apply(ctx, out, b)


def _close(f, name, n):
    return syntax.substitute(f, name, syntax.nat(n))


def _synth_for(ctx, f, level):
    """Best-effort realizer for ``f`` below the check bound, or ``None``."""
    if isinstance(f, syntax.Eq):
        if oracle.eval_bounded(f, {}, ctx.bound) is Truth3.TRUE:
            return ctx.tower.num(0, level)
        return None
    if isinstance(f, syntax.Not):
        return ctx.tower.num(0, level)
    if isinstance(f, syntax.And):
        a = _synth_for(ctx, f.lhs, level)
        b = _synth_for(ctx, f.rhs, level)
        if a is None or b is None:
            return None
        return _pair_up(ctx, level, a, b)
    if isinstance(f, syntax.Or):
        for tag, side in ((0, f.lhs), (1, f.rhs)):
            if oracle.eval_bounded(side, {}, ctx.bound) is Truth3.TRUE:
                inner = _synth_for(ctx, side, level)
                if inner is not None:
                    return _pair_up(ctx, level, ctx.tower.num(tag, level),
                                    inner)
        return None
    if isinstance(f, syntax.Imp):
        inner = _synth_for(ctx, f.rhs, level)
        if inner is None:
            return None
        return _e_apply(ctx, ctx.tower.const("k", level), inner)
    if isinstance(f, syntax.Exists):
        for n in range(ctx.bound):
            inst = _close(f.body, f.var, n)
            if oracle.eval_bounded(inst, {}, ctx.bound) is not Truth3.TRUE:
                continue
            inner = _synth_for(ctx, inst, level)
            if inner is not None:
                return _pair_up(ctx, level, ctx.tower.num(n, level), inner)
        return None
    if isinstance(f, syntax.Forall):
        parts = []
        for n in range(ctx.bound):
            inner = _synth_for(ctx, _close(f.body, f.var, n), level)
            if inner is None:
                return None
            parts.append(inner)
        same = all(_payload(p) is _payload(parts[0]) for p in parts)
        if same:
            return _e_apply(ctx, ctx.tower.const("k", level), parts[0])
        # Finite case split: answers below the bound are dispatched on the
        # argument, anything above falls back to the last one.
        var = _LVar(0)
        ir = _LLift(parts[-1])
        d = _LLift(ctx.tower.const("d", level))
        for n in reversed(range(ctx.bound - 1)):
            ir = _LApp(_LApp(_LApp(_LApp(d, var),
                                   _LLift(ctx.tower.num(n, level))),
                             _LLift(parts[n])), ir)
        if level == 0:
            # Case splits need totality of application; stay uniform instead.
            return None
        return _leval(_labstract(var, ir, ctx.tower, level))
    return None


def _candidates(ctx, f, level):
    out = [("numeral %d" % n, ctx.tower.num(n, level))
           for n in range(ctx.bound)]
    made = _synth_for(ctx, f, level)
    if made is not None:
        out.append(("synthesized", made))
    return out


_R = Verdict.REALIZED
_F = Verdict.REFUTED
_U = Verdict.UNKNOWN


def _check(ctx, e, f):
    key = (_payload(e).payload, _lvl(e), f)
    hit = ctx.memo.get(key)
    if hit is not None:
        return hit
    start = ctx.runs
    verdict, steps = _clause(ctx, e, f)
    per = ctx.fuel if ctx.fuel is not None else ctx.tower.algebra.fuel_default
    report = CheckReport(verdict, ctx.bound, (ctx.runs - start) * per,
                         tuple(steps))
    ctx.memo[key] = report
    return report


def _clause(ctx, e, f):
    level = _lvl(e)
    if isinstance(f, syntax.Eq):
        truth = oracle.eval_bounded(f, {}, ctx.bound)
        if truth is Truth3.TRUE:
            return _R, []
        if truth is Truth3.FALSE:
            return _F, []
        return _U, []

    if isinstance(f, syntax.Not):
        steps = []
        all_refuted = True
        for label, cand in _candidates(ctx, f.body, level):
            sub = _check(ctx, cand, f.body)
            steps.append(CheckStep("against %s" % label, sub))
            if sub.verdict is _R:
                return _F, steps
            if sub.verdict is not _F:
                all_refuted = False
        return (_R if all_refuted else _U), steps

    if isinstance(f, syntax.Imp):
        steps = []
        sure = True
        for label, cand in _candidates(ctx, f.lhs, level):
            premise = _check(ctx, cand, f.lhs)
            steps.append(CheckStep("premise %s" % label, premise))
            if premise.verdict is _F:
                continue
            applied = _e_apply(ctx, e, cand)
            if applied is None:
                sure = False
                continue
            conclusion = _check(ctx, applied, f.rhs)
            steps.append(CheckStep("conclusion after %s" % label, conclusion))
            if premise.verdict is _R:
                if conclusion.verdict is _F:
                    return _F, steps
                if conclusion.verdict is not _R:
                    sure = False
            elif conclusion.verdict is not _R:
                sure = False
        return (_R if sure else _U), steps

    if isinstance(f, syntax.Forall):
        steps = []
        sure = True
        for n in range(ctx.bound):
            applied = _e_apply(ctx, e, ctx.tower.num(n, level))
            if applied is None:
                sure = False
                steps.append(CheckStep(
                    "at %d" % n, CheckReport(_U, ctx.bound, 0)))
                continue
            sub = _check(ctx, applied, _close(f.body, f.var, n))
            steps.append(CheckStep("at %d" % n, sub))
            if sub.verdict is _F:
                return _F, steps
            if sub.verdict is not _R:
                sure = False
        return (_R if sure else _U), steps

    if isinstance(f, syntax.Exists):
        first, second = _components(ctx, e)
        if first is None or second is None:
            return _U, []
        witness = _e_decode(ctx, first)
        if witness is None:
            return _U, []
        sub = _check(ctx, second, _close(f.body, f.var, witness))
        return sub.verdict, [CheckStep("witness %d" % witness, sub)]

    if isinstance(f, syntax.And):
        first, second = _components(ctx, e)
        if first is None or second is None:
            return _U, []
        left = _check(ctx, first, f.lhs)
        right = _check(ctx, second, f.rhs)
        steps = [CheckStep("left", left), CheckStep("right", right)]
        if left.verdict is _F or right.verdict is _F:
            return _F, steps
        if left.verdict is _R and right.verdict is _R:
            return _R, steps
        return _U, steps

    if isinstance(f, syntax.Or):
        first, second = _components(ctx, e)
        if first is None or second is None:
            return _U, []
        tag = _e_decode(ctx, first)
        if tag is None:
            return _U, []
        side = f.lhs if tag == 0 else f.rhs
        sub = _check(ctx, second, side)
        return sub.verdict, [CheckStep("tag %d" % tag, sub)]

    raise ValueError("not a formula: %r" % (f,))


def realizes_check(e, f, check_bound=8, fuel=None, horizon=64, window=16):
    """Check whether element ``e`` realizes the closed sentence ``f``.

    Quantifiers and implication premises are sampled below ``check_bound``
    (numerals plus a best-effort synthesized realizer for premises), and the
    verdict is stamped with that bound.  ``Realized``/``Refuted`` are issued
    only when every contributing sub-check was definite; failures to apply
    or to decode within ``fuel``/``horizon`` yield ``Unknown``.  Bounded
    quantifiers are first rewritten to their guarded unbounded forms so the
    pair layout of realizers is uniform.

    When ``fuel`` is ``None`` and ``e`` lives in the limit tower, the
    per-stage budget defaults to the same horizon-scaled heuristic used by
    the synthesizers; plain algebra elements fall back to the machine's own
    default fuel.
    """
    if syntax.free_vars(f):
        raise ValueError("formula must be closed")
    if check_bound < 1:
        raise ValueError("check bound must be positive")
    if window < 1 or horizon < window:
        raise ValueError("need 1 <= window <= horizon")
    f = syntax.desugar_bounded(f)
    algebra = _payload(e).algebra
    if fuel is None and _lvl(e) >= 1:
        fuel = _default_fuel(horizon, check_bound)
    ctx = _Ctx(algebra, check_bound, fuel, horizon, window)
    return _check(ctx, e, f)
