"""A small language of number-theoretic programs and its two compilers.

Programs denote partial functions on naturals, built from the term-language
primitives plus constants, projections, composition, bounded max/min sweeps,
and unbounded mu-search (the one source of partiality):

* ``BasePrim(symbol)``: one of the arithmetic primitives.
* ``Const(value)``: a constant, usable at any arity.
* ``Proj(index, arity)``: the ``index``-th of ``arity`` arguments.
* ``Comp(outer, inners)``: composition; the inner programs all read the
  same argument tuple and their results feed ``outer``.
* ``BoundedMax(body)`` / ``BoundedMin(body)``: sweep the body's first
  argument over ``0 .. a0 - 1`` where ``a0`` is the program's own first
  argument, and take the max / min (0 on an empty range).
* ``Mu(body)``: the least ``n`` with ``body(n, args...) == 0``.

Three routes compute the same function and are tested against each other:
``eval_dsl`` (direct recursion, the reference), the native machine (compact
code run by the kernel interpreter), and the SK machine (compilation to
combinators via bracket abstraction, with Church-style arithmetic and a
call-by-value recursion combinator).
"""

import sys
from dataclasses import dataclass

from . import kernels as _k
from .pca import App, Element, Inert, K, S, numeral_term

# Deep combinator terms come out of bracket abstraction; plain recursion
# over them needs headroom beyond the default interpreter limit.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))


# ---------------------------------------------------------------------------
# Program syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasePrim:
    symbol: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Proj:
    index: int
    arity: int


@dataclass(frozen=True)
class Comp:
    outer: object
    inners: tuple


@dataclass(frozen=True)
class BoundedMax:
    body: object


@dataclass(frozen=True)
class BoundedMin:
    body: object


@dataclass(frozen=True)
class Mu:
    body: object


_PRIMS = {
    "add": (_k.PR_ADD, 2),
    "mul": (_k.PR_MUL, 2),
    "monus": (_k.PR_MONUS, 2),
    "pair": (_k.PR_PAIR, 2),
    "fst": (_k.PR_FST, 1),
    "snd": (_k.PR_SND, 1),
    "chLt": (_k.PR_CHLT, 2),
    "chEq": (_k.PR_CHEQ, 2),
}


def arity_of(prog):
    """The argument count of a program, or ``None`` if it adapts to any
    arity (a bare constant)."""
    if isinstance(prog, BasePrim):
        return _PRIMS[prog.symbol][1]
    if isinstance(prog, Const):
        return None
    if isinstance(prog, Proj):
        return prog.arity
    if isinstance(prog, Comp):
        for inner in prog.inners:
            a = arity_of(inner)
            if a is not None:
                return a
        return None
    if isinstance(prog, (BoundedMax, BoundedMin)):
        return arity_of(prog.body)
    if isinstance(prog, Mu):
        a = arity_of(prog.body)
        return None if a is None else a - 1
    raise ValueError("not a program: %r" % (prog,))


def validate(prog):
    """Raise ``ValueError`` on ill-formed programs (bad symbols, projection
    out of range, arity clashes inside a composition)."""
    if isinstance(prog, BasePrim):
        if prog.symbol not in _PRIMS:
            raise ValueError("unknown primitive %r" % prog.symbol)
    elif isinstance(prog, Const):
        if prog.value < 0:
            raise ValueError("constants are naturals")
    elif isinstance(prog, Proj):
        if prog.arity < 1 or not 0 <= prog.index < prog.arity:
            raise ValueError("projection %d out of range for arity %d"
                             % (prog.index, prog.arity))
    elif isinstance(prog, Comp):
        if not prog.inners:
            raise ValueError("composition needs at least one inner program")
        validate(prog.outer)
        outer_arity = arity_of(prog.outer)
        if outer_arity is not None and outer_arity != len(prog.inners):
            raise ValueError("outer program takes %d arguments, got %d inner "
                             "programs" % (outer_arity, len(prog.inners)))
        seen = None
        for inner in prog.inners:
            validate(inner)
            a = arity_of(inner)
            if a is None:
                continue
            if seen is None:
                seen = a
            elif a != seen:
                raise ValueError("inner programs disagree on arity "
                                 "(%d vs %d)" % (seen, a))
    elif isinstance(prog, (BoundedMax, BoundedMin)):
        validate(prog.body)
    elif isinstance(prog, Mu):
        validate(prog.body)
        a = arity_of(prog.body)
        if a is not None and a < 1:
            raise ValueError("mu body needs the search argument")
    else:
        raise ValueError("not a program: %r" % (prog,))


# ---------------------------------------------------------------------------
# Direct evaluation (the reference route)
# ---------------------------------------------------------------------------


def eval_dsl(prog, args, step_cap=None):
    """Evaluate a program on a tuple of naturals by structural recursion.

    ``step_cap`` optionally bounds the number of evaluation steps; crossing
    it raises ``RuntimeError`` (a fuel-free stand-in for divergence, for use
    by generators and tests that must not hang on empty mu-searches).
    """
    cell = [step_cap]

    def go(prog, args):
        if cell[0] is not None:
            cell[0] -= 1
            if cell[0] < 0:
                raise RuntimeError("step cap exceeded")
        if isinstance(prog, BasePrim):
            pid, ar = _PRIMS[prog.symbol]
            if pid == _k.PR_ADD:
                return args[0] + args[1]
            if pid == _k.PR_MUL:
                return args[0] * args[1]
            if pid == _k.PR_MONUS:
                return max(args[0] - args[1], 0)
            if pid == _k.PR_PAIR:
                return _k.cantor_pair(args[0], args[1])
            if pid == _k.PR_FST:
                return _k.cantor_split(args[0])[0]
            if pid == _k.PR_SND:
                return _k.cantor_split(args[0])[1]
            if pid == _k.PR_CHLT:
                return 1 if args[0] < args[1] else 0
            return 1 if args[0] == args[1] else 0
        if isinstance(prog, Const):
            return prog.value
        if isinstance(prog, Proj):
            return args[prog.index]
        if isinstance(prog, Comp):
            fed = tuple(go(inner, args) for inner in prog.inners)
            return go(prog.outer, fed)
        if isinstance(prog, (BoundedMax, BoundedMin)):
            rest = args[1:]
            values = [go(prog.body, (i,) + rest) for i in range(args[0])]
            if not values:
                return 0
            return max(values) if isinstance(prog, BoundedMax) else min(values)
        # Mu
        n = 0
        while True:
            if go(prog.body, (n,) + args) == 0:
                return n
            n += 1

    return go(prog, tuple(args))


# ---------------------------------------------------------------------------
# Native code generation
# ---------------------------------------------------------------------------


def prog_code(prog):
    """Lower a program to the kernel interpreter's code tuples."""
    if isinstance(prog, BasePrim):
        pid, ar = _PRIMS[prog.symbol]
        return (_k.OP_PRIM, pid, tuple((_k.OP_ARG, i) for i in range(ar)))
    if isinstance(prog, Const):
        return (_k.OP_CONST, prog.value)
    if isinstance(prog, Proj):
        return (_k.OP_ARG, prog.index)
    if isinstance(prog, Comp):
        return (_k.OP_CALL, prog_code(prog.outer),
                tuple(prog_code(inner) for inner in prog.inners))
    if isinstance(prog, BoundedMax):
        return (_k.OP_MAX, prog_code(prog.body))
    if isinstance(prog, BoundedMin):
        return (_k.OP_MIN, prog_code(prog.body))
    return (_k.OP_MU, prog_code(prog.body))


# ---------------------------------------------------------------------------
# SK compilation
# ---------------------------------------------------------------------------
#
# The combinator route goes through a tiny lambda calculus: build the
# program as a lambda expression over library constants, then eliminate
# binders by bracket abstraction.  Strictness shapes everything here:
# recursion uses a call-by-value fixed-point combinator whose
# self-application sits under a binder, conditionals select between thunks
# that are only applied after the choice, and the abstraction rules keep
# applications suspended (see ``_abstract``) so those guards survive
# translation.


class _Var:
    __slots__ = ("name",)
    open_ = True

    def __init__(self, name):
        self.name = name


class _Cap:
    __slots__ = ("fn", "arg", "open_")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg
        self.open_ = fn.open_ or arg.open_


class _Lam:
    __slots__ = ("var", "body")
    open_ = True

    def __init__(self, var, body):
        self.var = var
        self.body = body


class _Con:
    __slots__ = ("term",)
    open_ = False

    def __init__(self, term):
        self.term = term


def _ap(fn, *args):
    for arg in args:
        fn = _Cap(fn, arg)
    return fn


def _lam(names, body):
    for name in reversed(names.split()):
        body = _Lam(name, body)
    return body


_I_TERM = App(App(S, K), K)


def _abstract(name, e):
    """Bracket abstraction of ``name`` out of a binder-free expression.

    Leaves and closed subexpressions take the ``K`` shortcut; an
    application with any variable left in it goes through the ``S`` rule
    even when the abstracted variable is not among them.  The distinction
    is what keeps call-by-value honest: ``K M`` evaluates ``M`` on the
    spot, which is fine for closed library chunks (they reduce to values on
    their own) but would defeat a thunk whose body still waits for an
    enclosing binder's argument.  The ``S`` translation keeps those
    suspended until the argument actually arrives.
    """
    if isinstance(e, _Var):
        if e.name == name:
            return _Con(_I_TERM)
        return _Cap(_Con(K), e)
    if isinstance(e, _Con) or not e.open_:
        return _Cap(_Con(K), e)
    return _Cap(_Cap(_Con(S), _abstract(name, e.fn)), _abstract(name, e.arg))


def _lower(e):
    """Eliminate all binders, innermost first."""
    if isinstance(e, _Cap):
        return _Cap(_lower(e.fn), _lower(e.arg))
    if isinstance(e, _Lam):
        return _abstract(e.var, _lower(e.body))
    return e


def _to_term(e):
    if isinstance(e, _Con):
        return e.term
    if isinstance(e, _Cap):
        return App(_to_term(e.fn), _to_term(e.arg))
    raise ValueError("unbound variable %r in combinator program" % e.name)


def _close(e):
    return _to_term(_lower(e))


_LIB = {}


def _library():
    """Named library terms shared by all compiled programs (built once)."""
    if _LIB:
        return _LIB

    def define(name, expr):
        _LIB[name] = _close(expr) if not isinstance(expr, App) else expr
        return _Con(_LIB[name])

    tru = define("tru", _Con(K))
    fls = define("fls", App(K, _I_TERM))
    zero = _Con(numeral_term(0))
    one = _Con(numeral_term(1))
    suc = define("suc", App(S, App(App(S, App(K, S)), K)))
    f, x, g, h, u, m, n = (_Var(c) for c in "fxghumn")
    add = define("add", _lam("m n f x", _ap(m, f, _ap(n, f, x))))
    define("mul", _lam("m n f", _ap(m, _ap(n, f))))
    pred = define("pred", _lam("n f x", _ap(
        n,
        _lam("g h", _ap(h, _ap(g, f))),
        _lam("u", x),
        _lam("u", u),
    )))
    monus = define("monus", _lam("m n", _ap(n, pred, m)))
    izb = define("izb", _lam("n", _ap(n, _ap(_Con(K), fls), tru)))
    a, b = _Var("a"), _Var("b")
    eqb = define("eqb", _lam("a b", _ap(
        izb, _ap(add, _ap(monus, a, b), _ap(monus, b, a)))))
    ltb = define("ltb", _lam("a b", _ap(_ap(izb, _ap(monus, b, a)), fls, tru)))
    define("cheq", _lam("a b", _ap(_ap(eqb, a, b), one, zero)))
    define("chlt", _lam("a b", _ap(_ap(ltb, a, b), one, zero)))
    define("maxn", _lam("a b", _ap(_ap(ltb, a, b), b, a)))
    define("minn", _lam("a b", _ap(_ap(ltb, a, b), a, b)))
    define("p", _lam("a b f", _ap(f, a, b)))
    define("car", _lam("a", _ap(a, tru)))
    define("cdr", _lam("a", _ap(a, fls)))
    define("d", _lam("a b u v", _ap(_ap(eqb, a, b), _Var("u"), _Var("v"))))
    # Call-by-value fixed point: the self-application is guarded by the
    # binder on z, so unfolding happens one application at a time.
    unfold = _lam("f g", _ap(g, _lam("z", _ap(f, f, g, _Var("z")))))
    theta = define("theta", _Cap(unfold, unfold))
    rec = _Var("rec")
    tri = define("tri", _ap(theta, _lam("rec n", _ap(
        _ap(izb, n),
        _lam("t", zero),
        _lam("t", _ap(add, n, _ap(rec, _ap(pred, n)))),
        _Con(K),
    ))))
    define("pair", _lam("a b", _ap(add, _ap(tri, _ap(add, a, b)), b)))
    w, z = _Var("w"), _Var("z")
    findw = define("findw", _ap(theta, _lam("rec w z", _ap(
        _ap(ltb, z, _ap(tri, _ap(suc, w))),
        _lam("t", w),
        _lam("t", _ap(rec, _ap(suc, w), z)),
        _Con(K),
    ))))
    snd = define("snd", _lam("z", _ap(
        monus, z, _ap(tri, _ap(findw, zero, z)))))
    define("fst", _lam("z", _ap(monus, _ap(findw, zero, z), _ap(snd, z))))
    return _LIB


def sk_constant_terms():
    """Combinator terms for the arithmetic constant pack."""
    lib = _library()
    return {name: lib[name]
            for name in ("suc", "pred", "d", "p", "car", "cdr")}


_SK_PRIM_NAMES = {
    "add": "add", "mul": "mul", "monus": "monus", "pair": "pair",
    "fst": "fst", "snd": "snd", "chLt": "chlt", "chEq": "cheq",
}


def _args(prefix, count):
    return [_Var("%s%d" % (prefix, i)) for i in range(count)]


def _sk_ir(prog, arity):
    """The program as a closed lambda expression of ``arity`` arguments."""
    lib = _library()
    if isinstance(prog, BasePrim):
        return _Con(lib[_SK_PRIM_NAMES[prog.symbol]])
    if isinstance(prog, Const):
        body = _Con(numeral_term(prog.value))
        for i in reversed(range(arity)):
            body = _Lam("x%d" % i, body)
        return body
    if isinstance(prog, Proj):
        xs = _args("x", arity)
        body = xs[prog.index]
        for v in reversed(xs):
            body = _Lam(v.name, body)
        return body
    if isinstance(prog, Comp):
        xs = _args("x", arity)
        out = _sk_ir(prog.outer, len(prog.inners))
        call = _ap(out, *[_ap(_sk_ir(inner, arity), *xs)
                          for inner in prog.inners])
        for v in reversed(xs):
            call = _Lam(v.name, call)
        return call
    theta = _Con(lib["theta"])
    suc = _Con(lib["suc"])
    izb = _Con(lib["izb"])
    eqb = _Con(lib["eqb"])
    zero = _Con(numeral_term(0))
    one = _Con(numeral_term(1))
    rec = _Var("rec")
    if isinstance(prog, Mu):
        body = _sk_ir(prog.body, arity + 1)
        xs = _args("x", arity)
        n = _Var("n")
        loop = _ap(theta, _lam("rec n " + " ".join(v.name for v in xs), _ap(
            _ap(izb, _ap(body, n, *xs)),
            _Lam("t", n),
            _Lam("t", _ap(rec, _ap(suc, n), *xs)),
            _Con(K),
        )))
        out = _ap(loop, zero, *xs)
        for v in reversed(xs):
            out = _Lam(v.name, out)
        return out
    # Bounded sweeps: fold an accumulator while counting the loop index up
    # to the program's first argument.
    body = _sk_ir(prog.body, arity)
    xs = _args("x", arity)
    rest = xs[1:]
    i, acc = _Var("i"), _Var("acc")
    pick = _Con(lib["maxn" if isinstance(prog, BoundedMax) else "minn"])
    names = "rec i acc " + " ".join(v.name for v in xs)
    loop = _ap(theta, _lam(names, _ap(
        _ap(eqb, i, xs[0]),
        _Lam("t", acc),
        _Lam("t", _ap(rec, _ap(suc, i), _ap(pick, acc, _ap(body, i, *rest)),
                      *xs)),
        _Con(K),
    )))
    if isinstance(prog, BoundedMax):
        out = _ap(loop, zero, zero, *xs)
    else:
        # A min sweep cannot seed the accumulator with 0; start it at the
        # first body value, with an empty-range guard.
        out = _ap(
            _ap(izb, xs[0]),
            _Lam("t", zero),
            _Lam("t", _ap(loop, one, _ap(body, zero, *rest), *xs)),
            _Con(K),
        )
    for v in reversed(xs):
        out = _Lam(v.name, out)
    return out


def sk_program_term(prog, arity):
    """Compile a program to a closed combinator term."""
    return _close(_sk_ir(prog, arity))


def compile_dsl(prog, algebra, arity=None):
    """Compile a program to an element of ``algebra``.

    The arity is taken from the program itself; a fully polymorphic program
    (a bare constant) needs it passed explicitly.  Compiled programs are
    curried functions over numerals.
    """
    validate(prog)
    found = arity_of(prog)
    if found is None:
        found = arity
    elif arity is not None and arity != found:
        raise ValueError("program has arity %d, not %d" % (found, arity))
    if found is None or found < 1:
        raise ValueError("program arity must be at least 1")
    if algebra.kind == "native":
        return Element(algebra, _k.node("PROG", prog_code(prog), (), n=found))
    from .pca import Diverged, eval_term

    term = sk_program_term(prog, found)
    out = eval_term(algebra, term, max(algebra.fuel_default, 10**6))
    if isinstance(out, Diverged):
        raise RuntimeError("compiled program failed to evaluate")
    return out.element
