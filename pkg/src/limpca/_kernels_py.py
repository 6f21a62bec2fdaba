"""Pure-Python evaluation kernels for the two applicative machines.

This module is the reference implementation of the package's hot loops; a
compiled twin with the same surface may be substituted at import time (see
``kernels``).  It is deliberately self-contained: no imports from the rest of
the package, only values in, values out.

Two machines live here.

* The SK machine reduces applicative combinator values built from ``S`` and
  ``K``.  Values are spine-normal forms: partially applied combinators
  (``S1``, ``S2``, ``K1``) plus inert atoms and neutral application spines.
  Every application either fires a combinator rule or extends a neutral
  spine, so the only failure mode is running out of fuel.

* The native machine extends the same S/K core with machine-level naturals,
  pairing, a numeral case-split, successor/predecessor, and compiled bounded
  programs.  Applications that the rules give no meaning to (applying a
  naked numeral, projecting a non-pair, ...) produce a single absorbing
  ``ERR`` value rather than getting stuck.

All values are hash-consed: structurally equal values are the same object,
so equality tests inside the rules are pointer comparisons.

Fuel counts application steps (and, inside bounded programs, evaluated
program nodes).  Exhausting it raises :class:`OutOfFuel`; callers translate
that into a ``Diverged`` verdict.
"""

from math import isqrt


class OutOfFuel(Exception):
    """Raised when an evaluation exceeds its step budget."""


class Node:
    """A hash-consed machine value; ``nid`` is a dense unique id."""

    __slots__ = ("tag", "a", "b", "c", "n", "s", "nid")

    def __init__(self, tag, a, b, c, n, s, nid):
        self.tag = tag
        self.a = a
        self.b = b
        self.c = c
        self.n = n
        self.s = s
        self.nid = nid

    def __repr__(self):
        return "<%s #%d>" % (self.tag, self.nid)


_INTERN = {}
_NEXT_ID = [0]


def node(tag, a=None, b=None, c=None, n=0, s=""):
    """Intern constructor: returns the unique node with these fields."""
    key = (
        tag,
        a.nid if type(a) is Node else a,
        b.nid if type(b) is Node else b,
        c.nid if type(c) is Node else c,
        n,
        s,
    )
    found = _INTERN.get(key)
    if found is not None:
        return found
    made = Node(tag, a, b, c, n, s, _NEXT_ID[0])
    _NEXT_ID[0] += 1
    _INTERN[key] = made
    return made


# The application sentinel for the explicit work stack.
_AP = object()

# Success and failure caches, keyed by (function nid, argument nid).
# A success entry records the exact step count, so a cache hit still
# charges fuel honestly; a failure entry records the largest budget that
# was exhausted, so smaller retries fail fast.
_SK_HIT = {}
_SK_MISS = {}
_NAT_HIT = {}
_NAT_MISS = {}

# Program-frame caches, keyed by (code, argument tuple).  Bounded-loop
# programs revisit identical frames constantly (e.g. the same inner sweep
# at every outer stage), so frame entry points are memoized the same way:
# hits charge the recorded step count, misses record exhausted budgets.
_CODE_HIT = {}
_CODE_MISS = {}


def clear_caches():
    _SK_HIT.clear()
    _SK_MISS.clear()
    _NAT_HIT.clear()
    _NAT_MISS.clear()
    _CODE_HIT.clear()
    _CODE_MISS.clear()


def _run_frame(code, args, fuel):
    """Enter a program frame through the frame cache."""
    key = (code, args)
    hit = _CODE_HIT.get(key)
    if hit is not None:
        cost = hit[1]
        if cost > fuel:
            raise OutOfFuel
        return hit[0], fuel - cost
    if fuel <= _CODE_MISS.get(key, -1):
        raise OutOfFuel
    try:
        value, left = run_code(code, args, fuel)
    except OutOfFuel:
        prev = _CODE_MISS.get(key, -1)
        if fuel > prev:
            _CODE_MISS[key] = fuel
        raise
    _CODE_HIT[key] = (value, fuel - left)
    return value, left


# ---------------------------------------------------------------------------
# SK machine
# ---------------------------------------------------------------------------
#
# Tags: S0 K0 (bare combinators), S1 S2 K1 (partial applications holding
# their arguments in a/b), I (inert atom named by s), A (neutral spine:
# a = head value, b = argument value).

def _sk_step(f, x, vals, work):
    """Apply value ``f`` to value ``x``, pushing the outcome."""
    tag = f.tag
    if tag == "K1":
        vals.append(f.a)
    elif tag == "S2":
        # S2 a b . x  ->  (a x) (b x), evaluated left to right.
        work.append(_AP)
        work.append(_AP)
        work.append(x)
        work.append(f.b)
        work.append(_AP)
        work.append(x)
        work.append(f.a)
    elif tag == "S1":
        vals.append(node("S2", f.a, x))
    elif tag == "S0":
        vals.append(node("S1", x))
    elif tag == "K0":
        vals.append(node("K1", x))
    else:
        # Inert atoms and neutral spines absorb the argument.
        vals.append(node("A", f, x))


def sk_apply(f, x, fuel):
    """Apply ``f`` to ``x`` with a step budget.

    Returns ``(value, remaining_fuel)`` or raises :class:`OutOfFuel`.
    """
    key = (f.nid, x.nid)
    hit = _SK_HIT.get(key)
    if hit is not None:
        value, cost = hit
        if cost <= fuel:
            return value, fuel - cost
        raise OutOfFuel
    floor = _SK_MISS.get(key)
    if floor is not None and fuel <= floor:
        raise OutOfFuel
    vals = [f, x]
    work = [_AP]
    steps = 0
    try:
        while work:
            top = work.pop()
            if top is _AP:
                arg = vals.pop()
                fun = vals.pop()
                steps += 1
                if steps > fuel:
                    raise OutOfFuel
                _sk_step(fun, arg, vals, work)
            else:
                vals.append(top)
    except OutOfFuel:
        if floor is None or fuel > floor:
            _SK_MISS[key] = fuel
        raise
    value = vals[-1]
    _SK_HIT[key] = (value, steps)
    return value, fuel - steps


_SK_NUMERALS = []


def sk_numeral(n):
    """The canonical SK value of the numeral for ``n``.

    zero is the value of ``K (S K K)``; each successor applies the value of
    ``S (S (K S) K)``, which prepends one story to an ``S2`` tower.
    """
    if not _SK_NUMERALS:
        s0 = node("S0")
        k0 = node("K0")
        _SK_NUMERALS.append(node("K1", node("S2", k0, k0)))
    while len(_SK_NUMERALS) <= n:
        story = node("S2", node("K1", node("S0")), node("K0"))
        _SK_NUMERALS.append(node("S2", story, _SK_NUMERALS[-1]))
    return _SK_NUMERALS[n]


# ---------------------------------------------------------------------------
# Bounded-program interpreter (native machine's compiled functions)
# ---------------------------------------------------------------------------
#
# Programs are nested tuples headed by an opcode.  Evaluation charges one
# fuel unit per node visited, which also bounds unbounded mu-searches.

OP_CONST = 0   # (OP_CONST, value)
OP_ARG = 1     # (OP_ARG, index)
OP_PRIM = 2    # (OP_PRIM, prim_id, (sub, ...))
OP_CALL = 3    # (OP_CALL, body, (sub, ...)) -- fresh argument frame
OP_MAX = 4     # (OP_MAX, body) -- max of body over loop index < args[0]
OP_MIN = 5     # (OP_MIN, body) -- min of body over loop index < args[0]
OP_MU = 6      # (OP_MU, body) -- least n with body(n, *args) == 0

PR_ADD = 0
PR_MUL = 1
PR_MONUS = 2
PR_PAIR = 3
PR_FST = 4
PR_SND = 5
PR_CHLT = 6
PR_CHEQ = 7


def cantor_pair(a, b):
    s = a + b
    return s * (s + 1) // 2 + b


def cantor_split(z):
    w = (isqrt(8 * z + 1) - 1) // 2
    second = z - w * (w + 1) // 2
    return w - second, second


def run_code(code, args, fuel):
    """Evaluate a compiled bounded program on a tuple of naturals.

    Returns ``(value, remaining_fuel)`` or raises :class:`OutOfFuel`.
    """
    if fuel <= 0:
        raise OutOfFuel
    fuel -= 1
    op = code[0]
    if op == OP_CONST:
        return code[1], fuel
    if op == OP_ARG:
        return args[code[1]], fuel
    if op == OP_PRIM:
        pid = code[1]
        subs = code[2]
        a, fuel = run_code(subs[0], args, fuel)
        if len(subs) == 1:
            if pid == PR_FST:
                return cantor_split(a)[0], fuel
            return cantor_split(a)[1], fuel
        b, fuel = run_code(subs[1], args, fuel)
        if pid == PR_ADD:
            return a + b, fuel
        if pid == PR_MUL:
            return a * b, fuel
        if pid == PR_MONUS:
            return a - b if a > b else 0, fuel
        if pid == PR_PAIR:
            return cantor_pair(a, b), fuel
        if pid == PR_CHLT:
            return (1 if a < b else 0), fuel
        return (1 if a == b else 0), fuel
    if op == OP_CALL:
        frame = []
        for sub in code[2]:
            v, fuel = run_code(sub, args, fuel)
            frame.append(v)
        return _run_frame(code[1], tuple(frame), fuel)
    if op == OP_MAX or op == OP_MIN:
        body = code[1]
        rest = args[1:]
        best = 0
        for i in range(args[0]):
            v, fuel = _run_frame(body, (i,) + rest, fuel)
            if i == 0:
                best = v
            elif op == OP_MAX:
                if v > best:
                    best = v
            elif v < best:
                best = v
        return best, fuel
    # OP_MU: unbounded search, bounded only by fuel.
    body = code[1]
    i = 0
    while True:
        v, fuel = _run_frame(body, (i,) + args, fuel)
        if v == 0:
            return i, fuel
        i += 1


# ---------------------------------------------------------------------------
# Native machine
# ---------------------------------------------------------------------------
#
# Extra tags over the S/K core:
#   NUM  machine natural (payload n)
#   P0 P1 PAIR   pairing constant, its partial application, a pair
#   CAR CDR      projections
#   D0..D3       numeral case-split collecting x, y, u before deciding
#   SUC PRED     successor / truncated predecessor
#   PROG         compiled bounded program (a = code, b = collected args,
#                n = arity), curried over numeral arguments
#   I            inert atom
#   ERR          the absorbing stuck value

def nat_numeral(n):
    return node("NUM", n=n)


_ERR = None


def err_value():
    global _ERR
    if _ERR is None:
        _ERR = node("ERR")
    return _ERR


def _nat_step(f, x, vals, work, fuel):
    """One native application step; returns the fuel left afterwards."""
    tag = f.tag
    if tag == "K1":
        vals.append(f.a)
    elif tag == "S2":
        work.append(_AP)
        work.append(_AP)
        work.append(x)
        work.append(f.b)
        work.append(_AP)
        work.append(x)
        work.append(f.a)
    elif tag == "S1":
        vals.append(node("S2", f.a, x))
    elif tag == "S0":
        vals.append(node("S1", x))
    elif tag == "K0":
        vals.append(node("K1", x))
    elif tag == "PROG":
        if x.tag != "NUM":
            vals.append(err_value())
        else:
            got = f.b + (x.n,)
            if len(got) < f.n:
                vals.append(node("PROG", f.a, got, n=f.n))
            else:
                value, fuel = _run_frame(f.a, got, fuel)
                vals.append(node("NUM", n=value))
    elif tag == "P0":
        vals.append(node("P1", x))
    elif tag == "P1":
        vals.append(node("PAIR", f.a, x))
    elif tag == "CAR":
        vals.append(x.a if x.tag == "PAIR" else err_value())
    elif tag == "CDR":
        vals.append(x.b if x.tag == "PAIR" else err_value())
    elif tag == "D0":
        vals.append(node("D1", x))
    elif tag == "D1":
        vals.append(node("D2", f.a, x))
    elif tag == "D2":
        vals.append(node("D3", f.a, f.b, x))
    elif tag == "D3":
        if f.a.tag == "NUM" and f.b.tag == "NUM":
            vals.append(f.c if f.a.n == f.b.n else x)
        else:
            vals.append(err_value())
    elif tag == "SUC":
        if x.tag == "NUM":
            vals.append(node("NUM", n=x.n + 1))
        else:
            vals.append(err_value())
    elif tag == "PRED":
        if x.tag == "NUM":
            vals.append(node("NUM", n=x.n - 1 if x.n else 0))
        else:
            vals.append(err_value())
    else:
        # NUM, PAIR, I, ERR: no rule applies.
        vals.append(err_value())
    return fuel


def nat_apply(f, x, fuel):
    """Native-machine application with a step budget.

    Returns ``(value, remaining_fuel)`` or raises :class:`OutOfFuel`.
    """
    key = (f.nid, x.nid)
    hit = _NAT_HIT.get(key)
    if hit is not None:
        value, cost = hit
        if cost <= fuel:
            return value, fuel - cost
        raise OutOfFuel
    floor = _NAT_MISS.get(key)
    if floor is not None and fuel <= floor:
        raise OutOfFuel
    vals = [f, x]
    work = [_AP]
    left = fuel
    try:
        while work:
            top = work.pop()
            if top is _AP:
                arg = vals.pop()
                fun = vals.pop()
                left -= 1
                if left < 0:
                    raise OutOfFuel
                left = _nat_step(fun, arg, vals, work, left)
            else:
                vals.append(top)
    except OutOfFuel:
        if floor is None or fuel > floor:
            _NAT_MISS[key] = fuel
        raise
    value = vals[-1]
    _NAT_HIT[key] = (value, fuel - left)
    return value, left
