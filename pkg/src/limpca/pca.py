"""Partial combinatory algebras with fuel-bounded application.

Two algebra instances are provided.

* ``sk_algebra()``: values are SK-combinator normal forms; everything,
  numerals included, is built from ``S`` and ``K``.  Numerals follow the
  iterator encoding (``n`` applied to ``f`` and ``x`` gives ``f^n x``), so a
  numeral is read back by applying it to inert probe atoms and counting the
  resulting spine.

* ``native_algebra()``: a machine model with honest naturals, pairing,
  case-split, successor/predecessor, and compiled bounded programs on top
  of the same S/K core.  Numerals are read back directly.

Application is strict and partial: ``apply`` yields a :class:`Value` or
:class:`Diverged`, where ``Diverged`` only ever means the fuel budget ran
out.  On top of application the module offers term evaluation, numeral
construction/decoding, the arithmetic constant pack used by the realizer
layer, and a tabular check that an element represents a given function.
"""

from dataclasses import dataclass

from . import kernels as _k

# ---------------------------------------------------------------------------
# Combinator terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Comb:
    """A primitive combinator symbol (``S`` or ``K``)."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    """Application of one term to another."""

    fn: object
    arg: object

    def __str__(self):
        left = str(self.fn)
        if isinstance(self.arg, App):
            return "%s (%s)" % (left, self.arg)
        return "%s %s" % (left, self.arg)


@dataclass(frozen=True)
class Inert:
    """An atom with no reduction rule, used as a probe marker."""

    tag: str

    def __str__(self):
        return "#" + self.tag


S = Comb("S")
K = Comb("K")


def numeral_term(n):
    """The combinator term for the numeral ``n``.

    zero is ``K (S K K)`` and the successor is ``S (S (K S) K)``.
    """
    term = App(K, App(App(S, K), K))
    suc = App(S, App(App(S, App(K, S)), K))
    for _ in range(n):
        term = App(suc, term)
    return term


def parse_sk_term(text):
    """Parse a combinator term: ``S``, ``K``, ``#tag``, ``(...)``, and
    nonnegative integers as numeral sugar; juxtaposition associates left."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = [0]

    def atom():
        tok = tokens[pos[0]]
        pos[0] += 1
        if tok == "(":
            term = sequence()
            if pos[0] >= len(tokens) or tokens[pos[0]] != ")":
                raise ValueError("unbalanced parenthesis in combinator term")
            pos[0] += 1
            return term
        if tok == ")":
            raise ValueError("unexpected ')' in combinator term")
        if tok == "S":
            return S
        if tok == "K":
            return K
        if tok.startswith("#") and len(tok) > 1:
            return Inert(tok[1:])
        if tok.isdigit():
            return numeral_term(int(tok))
        raise ValueError("unknown combinator token %r" % tok)

    def sequence():
        term = atom()
        while pos[0] < len(tokens) and tokens[pos[0]] != ")":
            term = App(term, atom())
        return term

    if not tokens:
        raise ValueError("empty combinator term")
    term = sequence()
    if pos[0] != len(tokens):
        raise ValueError("trailing input in combinator term")
    return term


# ---------------------------------------------------------------------------
# Algebra instances and elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PcaInstance:
    """A handle naming an algebra (``sk`` or ``native``) and its default
    fuel budget."""

    kind: str
    fuel_default: int


_SK = PcaInstance("sk", 10**6)
_NATIVE = PcaInstance("native", 10**5)


def sk_algebra():
    return _SK


def native_algebra():
    return _NATIVE


def algebra_named(name):
    if name == "sk":
        return _SK
    if name == "native":
        return _NATIVE
    raise ValueError("unknown algebra %r (expected 'sk' or 'native')" % name)


@dataclass(frozen=True)
class Element:
    """A value of an algebra, tagged with the instance it belongs to."""

    algebra: PcaInstance
    payload: object

    def __repr__(self):
        return "Element(%s, %s)" % (self.algebra.kind, self.payload)


@dataclass(frozen=True)
class Value:
    """A defined application result."""

    element: Element


@dataclass(frozen=True)
class Diverged:
    """The fuel budget ran out; no verdict about the true value."""


@dataclass(frozen=True)
class Number:
    """A successfully decoded numeral."""

    value: int


@dataclass(frozen=True)
class NotNumeral:
    """The value is defined but is not a numeral."""


def _kernel_apply(kind, f, x, fuel):
    if kind == "sk":
        return _k.sk_apply(f, x, fuel)
    return _k.nat_apply(f, x, fuel)


def apply(a, b, fuel=None):
    """Apply element ``a`` to element ``b``; ``Value`` or ``Diverged``."""
    if a.algebra is not b.algebra:
        raise ValueError("cannot apply elements of different algebras")
    if fuel is None:
        fuel = a.algebra.fuel_default
    try:
        out, _ = _kernel_apply(a.algebra.kind, a.payload, b.payload, fuel)
    except _k.OutOfFuel:
        return Diverged()
    return Value(Element(a.algebra, out))


def apply_chain(e, args, fuel=None):
    """Apply ``e`` to several elements in turn under one shared budget."""
    algebra = e.algebra
    if fuel is None:
        fuel = algebra.fuel_default
    out = e.payload
    try:
        for arg in args:
            if arg.algebra is not algebra:
                raise ValueError("cannot apply elements of different algebras")
            out, fuel = _kernel_apply(algebra.kind, out, arg.payload, fuel)
    except _k.OutOfFuel:
        return Diverged()
    return Value(Element(algebra, out))


_APPLY = object()


def _eval_term(kind, term, fuel):
    # Iterative so that deep compiled terms cannot overrun the recursion
    # limit; applications are strict, left to right.
    vals = []
    work = [term]
    while work:
        top = work.pop()
        if top is _APPLY:
            arg = vals.pop()
            fn = vals.pop()
            out, fuel = _kernel_apply(kind, fn, arg, fuel)
            vals.append(out)
        elif isinstance(top, App):
            work.append(_APPLY)
            work.append(top.arg)
            work.append(top.fn)
        elif isinstance(top, Comb):
            vals.append(_k.node("S0" if top.name == "S" else "K0"))
        elif isinstance(top, Inert):
            vals.append(_k.node("I", s=top.tag))
        else:
            raise ValueError("not a combinator term: %r" % (top,))
    return vals[-1], fuel


def eval_term(algebra, term, fuel=None):
    """Evaluate a combinator term, strictly and left to right."""
    if fuel is None:
        fuel = algebra.fuel_default
    try:
        out, _ = _eval_term(algebra.kind, term, fuel)
    except _k.OutOfFuel:
        return Diverged()
    return Value(Element(algebra, out))


def numeral(algebra, n):
    """The numeral ``n`` as an element of ``algebra``."""
    if n < 0:
        raise ValueError("numerals are nonnegative")
    if algebra.kind == "sk":
        return Element(algebra, _k.sk_numeral(n))
    return Element(algebra, _k.nat_numeral(n))


def decode_numeral(e, fuel=None):
    """Read a numeral back out of an element.

    On the native machine numerals are first-class and read directly.  On
    the SK machine the element is applied to two inert probes and the
    resulting application spine is counted: the numeral ``n`` applied to
    ``f`` and ``x`` leaves ``f`` applied ``n`` times to ``x``.
    """
    if fuel is None:
        fuel = e.algebra.fuel_default
    payload = e.payload
    if e.algebra.kind == "native":
        if payload.tag == "NUM":
            return Number(payload.n)
        return NotNumeral()
    probe_f = _k.node("I", s="F")
    probe_x = _k.node("I", s="X")
    try:
        out, fuel = _k.sk_apply(payload, probe_f, fuel)
        out, fuel = _k.sk_apply(out, probe_x, fuel)
    except _k.OutOfFuel:
        return Diverged()
    count = 0
    while out.tag == "A" and out.a is probe_f:
        count += 1
        out = out.b
    if out is probe_x:
        return Number(count)
    return NotNumeral()


# ---------------------------------------------------------------------------
# Arithmetic constant pack
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EonConstants:
    """The constants of the operational arithmetic layer: zero, successor,
    predecessor, numeral case-split, pairing, and projections."""

    zero: Element
    suc: Element
    pred: Element
    d: Element
    p: Element
    car: Element
    cdr: Element


_EON_CACHE = {}


def eon_constants(algebra):
    """The constant pack for ``algebra`` (built once, then cached).

    On the native machine these are primitive values.  On the SK machine
    they are compiled combinator programs: Church-style arithmetic for
    ``pred`` and the case-split, function pairs for ``p``/``car``/``cdr``.
    """
    cached = _EON_CACHE.get(algebra.kind)
    if cached is not None:
        return cached
    if algebra.kind == "native":
        pack = EonConstants(
            zero=Element(algebra, _k.nat_numeral(0)),
            suc=Element(algebra, _k.node("SUC")),
            pred=Element(algebra, _k.node("PRED")),
            d=Element(algebra, _k.node("D0")),
            p=Element(algebra, _k.node("P0")),
            car=Element(algebra, _k.node("CAR")),
            cdr=Element(algebra, _k.node("CDR")),
        )
    else:
        from . import dsl

        terms = dsl.sk_constant_terms()
        values = {}
        for name in ("suc", "pred", "d", "p", "car", "cdr"):
            out = eval_term(algebra, terms[name])
            if isinstance(out, Diverged):
                raise RuntimeError("constant %s failed to evaluate" % name)
            values[name] = out.element
        pack = EonConstants(zero=numeral(algebra, 0), **values)
    _EON_CACHE[algebra.kind] = pack
    return pack


# ---------------------------------------------------------------------------
# Representation check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RowOutcome:
    """One table row of a representation check."""

    args: tuple
    expected: int
    outcome: str
    got: object = None


@dataclass(frozen=True)
class RepresentsReport:
    """Tally of a representation check: how many rows agreed, diverged, or
    disagreed with the table."""

    agree: int
    diverged: int
    mismatch: int
    rows: tuple

    @property
    def exact(self):
        return self.mismatch == 0 and self.diverged == 0

    @property
    def consistent(self):
        return self.mismatch == 0


def check_represents(e, table, fuel=None):
    """Check that ``e`` computes a function table.

    ``table`` is an iterable of ``(args, expected)`` rows with natural-number
    arguments.  Each row gets the full fuel budget; a row either agrees,
    diverges (no verdict), or mismatches.
    """
    algebra = e.algebra
    if fuel is None:
        fuel = algebra.fuel_default
    rows = []
    agree = diverged = mismatch = 0
    for args, expected in table:
        args = tuple(args)
        out = apply_chain(e, [numeral(algebra, a) for a in args], fuel)
        if isinstance(out, Diverged):
            diverged += 1
            rows.append(RowOutcome(args, expected, "diverged"))
            continue
        decoded = decode_numeral(out.element, fuel)
        if isinstance(decoded, Diverged):
            diverged += 1
            rows.append(RowOutcome(args, expected, "diverged"))
        elif isinstance(decoded, Number) and decoded.value == expected:
            agree += 1
            rows.append(RowOutcome(args, expected, "agree"))
        else:
            mismatch += 1
            got = decoded.value if isinstance(decoded, Number) else None
            rows.append(RowOutcome(args, expected, "mismatch", got))
    return RepresentsReport(agree, diverged, mismatch, tuple(rows))


def compile_dsl(prog, algebra):
    """Compile a bounded program to an element of ``algebra``."""
    from . import dsl

    return dsl.compile_dsl(prog, algebra)
