"""Classical-logic source transformations on arithmetic formulas.

Four operations:

  * dual — the involutive classical-negation transform (structural
    recursion; prime formulas get a literal negation, negations drop,
    and/or and the quantifiers swap, implications become conjunctions);
  * godel_gentzen — the negative translation embedding classical into
    intuitionistic arithmetic: every existential quantifier is replaced by
    its not-forall-not unfolding and every disjunction by
    not(not-and-not); atoms are decidable and stay fixed;
  * pair_collapse — merges every maximal run of adjacent same-kind
    unbounded quantifiers into a single quantifier via the pairing
    function (left-associatively: the i-th of r variables becomes a
    fst/snd access path into one paired witness);
  * to_prenex — prenex extraction for propositional combinations of
    degree-k formulas, producing an exists-first and a forall-first form.

to_prenex hoists quantifiers to the front in alternating sign phases
(positive sign first for the exists-first form, negative first for the
forall-first form).  A quantifier hoisted out of a negation or out of an
implication antecedent flips kind on the way up.  Moves that are only
equivalences in the presence of a decidability license — crossing an
implication, crossing a negation, and pulling a universal quantifier out
of a disjunction — are recorded in the trace together with the class
whose decidability they consume; everything else (exists over and/or,
forall over and, forall into a consequent) is license-free.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hierarchy import classify, is_sigma0
from .syntax import (
    And, Eq, Exists, Forall, Formula, Imp, Not, Or, PrimFn, Term, Var,
    free_vars, fresh_name, nat, rename_bound, substitute, term_free_vars,
)


def dual(f: Formula) -> Formula:
    """The classical dual: involutive on the implication-free fragment."""
    if isinstance(f, Eq):
        return Not(f)
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Or):
        return And(dual(f.lhs), dual(f.rhs))
    if isinstance(f, And):
        return Or(dual(f.lhs), dual(f.rhs))
    if isinstance(f, Imp):
        return And(f.lhs, dual(f.rhs))
    if isinstance(f, Forall):
        return Exists(f.var, f.bound, dual(f.body))
    if isinstance(f, Exists):
        return Forall(f.var, f.bound, dual(f.body))
    raise TypeError("not a formula: %r" % (f,))


def godel_gentzen(f: Formula) -> Formula:
    """Negative translation: exists to not-forall-not, or to not(not-and-not).

    Atoms are left untranslated (they are decidable), and bounded
    existentials keep their bound on the inserted universal.
    """
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(godel_gentzen(f.body))
    if isinstance(f, (And, Imp)):
        return type(f)(godel_gentzen(f.lhs), godel_gentzen(f.rhs))
    if isinstance(f, Or):
        return Not(And(Not(godel_gentzen(f.lhs)), Not(godel_gentzen(f.rhs))))
    if isinstance(f, Forall):
        return Forall(f.var, f.bound, godel_gentzen(f.body))
    if isinstance(f, Exists):
        return Not(Forall(f.var, f.bound, Not(godel_gentzen(f.body))))
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# quantifier pairing


def _all_names(f: Formula) -> set:
    out = set()

    def walk_term(t: Term):
        out.update(term_free_vars(t))

    def walk(g: Formula):
        if isinstance(g, Eq):
            walk_term(g.lhs)
            walk_term(g.rhs)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.lhs)
            walk(g.rhs)
        else:
            out.add(g.var)
            if g.bound is not None:
                walk_term(g.bound)
            walk(g.body)

    walk(f)
    return out


def _access_terms(r: int, root: Term):
    """Left-associative pairing access paths for r collapsed variables."""
    terms = []
    for i in range(1, r + 1):
        t = root
        for _ in range(r - i):
            t = PrimFn("fst", (t,))
        if i > 1:
            t = PrimFn("snd", (t,))
        terms.append(t)
    return terms


def pair_collapse(f: Formula) -> Formula:
    """Merge adjacent same-kind unbounded quantifier runs via pairing."""
    used = _all_names(f) | free_vars(f)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Imp)):
            return type(g)(walk(g.lhs), walk(g.rhs))
        if isinstance(g, (Forall, Exists)):
            kind = type(g)
            names = []
            h = g
            while isinstance(h, kind) and h.bound is None:
                names.append(h.var)
                h = h.body
            if len(names) < 2:
                return type(g)(g.var, g.bound, walk(g.body))
            fresh = fresh_name("n", used, allow_bare=True)
            used.add(fresh)
            body = h
            for name, acc in zip(names, _access_terms(len(names), Var(fresh))):
                body = substitute(body, name, acc)
            return kind(fresh, None, walk(body))
        raise TypeError("not a formula: %r" % (g,))

    return walk(f)


# ---------------------------------------------------------------------------
# prenex extraction


@dataclass(frozen=True)
class TraceMove:
    """One licensed move: the rule fired, where, and the decidability class
    (with its hierarchy index) the equivalence consumed."""

    rule: str
    path: tuple
    consumed: str
    index: int


@dataclass(frozen=True)
class PnfResult:
    sigma_form: Formula
    pi_form: Formula
    license_k: int
    trace: tuple


def _desugar_deep_bounds(f: Formula, path, trace) -> Formula:
    """Unfold bounded quantifiers whose body is not decidable into their
    guard form, so extraction only ever meets unbounded quantifiers."""
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(_desugar_deep_bounds(f.body, path + (0,), trace))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(_desugar_deep_bounds(f.lhs, path + (0,), trace),
                       _desugar_deep_bounds(f.rhs, path + (1,), trace))
    if isinstance(f, (Forall, Exists)):
        body = _desugar_deep_bounds(f.body, path + (0,), trace)
        if f.bound is None or is_sigma0(f):
            return type(f)(f.var, f.bound, body)
        trace.append(TraceMove("bounded-unfold", path, "E(0)", 0))
        guard = Eq(PrimFn("chLt", (Var(f.var), f.bound)), nat(1))
        if isinstance(f, Forall):
            return Forall(f.var, None, Imp(guard, body))
        return Exists(f.var, None, And(guard, body))
    raise TypeError("not a formula: %r" % (f,))


def _find_target(f: Formula, pol: int, want: int, path):
    """Leftmost-outermost unbounded quantifier whose sign is `want`.

    Returns the path to it, or None.  Does not look below quantifiers
    (only the outermost layer is extractable) nor inside decidable
    subformulas.
    """
    if isinstance(f, Eq):
        return None
    if isinstance(f, Not):
        return _find_target(f.body, -pol, want, path + (0,))
    if isinstance(f, (And, Or)):
        hit = _find_target(f.lhs, pol, want, path + (0,))
        if hit is not None:
            return hit
        return _find_target(f.rhs, pol, want, path + (1,))
    if isinstance(f, Imp):
        hit = _find_target(f.lhs, -pol, want, path + (0,))
        if hit is not None:
            return hit
        return _find_target(f.rhs, pol, want, path + (1,))
    if isinstance(f, (Forall, Exists)):
        if f.bound is not None:
            return None  # decidable chunk
        sign = pol if isinstance(f, Exists) else -pol
        return path if sign == want else None
    raise TypeError("not a formula: %r" % (f,))


def _license_of(f: Formula):
    """Class string and license index for a move licensed by f's
    decidability.  A propositional combination of degree-d parts is
    decidable from level-d excluded middle even when its own shape class
    is P(d+1), so the index charged is the degree."""
    c = classify(f)
    return str(c.eup), c.degree


def _hoist(f: Formula, path, tag: str, trace):
    """Remove the quantifier at `path`, recording licensed crossings.

    Returns (kind-at-top, variable, formula-without-the-quantifier): the
    quantifier's kind flips at each negation or antecedent crossed on the
    way out.
    """

    def rebuild(g: Formula, rest):
        if not rest:
            kind = "exists" if isinstance(g, Exists) else "forall"
            return kind, g.var, g.body, []
        step, rest = rest[0], rest[1:]
        if isinstance(g, Not):
            kind, var, body, moves = rebuild(g.body, rest)
            moves.append(("not-crossing",) + _license_of(g.body))
            kind = "forall" if kind == "exists" else "exists"
            return kind, var, Not(body), moves
        if isinstance(g, Imp) and step == 0:
            kind, var, body, moves = rebuild(g.lhs, rest)
            moves.append(("antecedent-crossing",) + _license_of(g.lhs))
            kind = "forall" if kind == "exists" else "exists"
            return kind, var, Imp(body, g.rhs), moves
        if isinstance(g, Imp):
            kind, var, body, moves = rebuild(g.rhs, rest)
            if kind == "exists":
                moves.append(("consequent-crossing",) + _license_of(g.lhs))
            return kind, var, Imp(g.lhs, body), moves
        if isinstance(g, (And, Or)):
            if step == 0:
                kind, var, body, moves = rebuild(g.lhs, rest)
                other, new = g.rhs, type(g)(body, g.rhs)
            else:
                kind, var, body, moves = rebuild(g.rhs, rest)
                other, new = g.lhs, type(g)(g.lhs, body)
            if isinstance(g, Or) and kind == "forall":
                moves.append(("forall-over-or",) + _license_of(other))
            return kind, var, new, moves
        raise AssertionError("unexpected node on hoist path")

    kind, var, body, moves = rebuild(f, list(path))
    for rule, consumed, index in moves:
        trace.append(TraceMove(rule + ":" + tag, path, consumed, index))
    return kind, var, body


def _extract(f: Formula, first_sign: int, tag: str, trace) -> Formula:
    prefix = []
    region = f
    want = first_sign
    idle = 0
    while True:
        path = _find_target(region, 1, want, ())
        if path is None:
            idle += 1
            if idle >= 2:
                break
            want = -want
            continue
        idle = 0
        kind, var, region = _hoist(region, path, tag, trace)
        prefix.append((kind, var))
    out = region
    for kind, var in reversed(prefix):
        cls = Exists if kind == "exists" else Forall
        out = cls(var, None, out)
    return out


def to_prenex(f: Formula, k: int) -> PnfResult:
    """Exists-first and forall-first prenex forms with licensed-move trace.

    The input must be a propositional combination of level-k formulas
    (class index at most k+1); the outputs are strictly alternating prenex
    forms of index at most k+1, and on inputs of degree at most k every
    licensed move consumes a decidability class of index at most k.
    An already-prenex input is returned unchanged with an empty trace.
    """
    idx = classify(f).eup.index
    if idx > k + 1:
        raise ValueError(
            "formula has class index %d, beyond the budget for k=%d"
            % (idx, k))
    if classify(f).prenex.kind != "NotPrenex":
        return PnfResult(f, f, 0, ())
    trace: list = []
    g = rename_bound(f, "x")
    g = _desugar_deep_bounds(g, (), trace)
    sigma = pair_collapse(_extract(g, 1, "sigma", trace))
    pi = pair_collapse(_extract(g, -1, "pi", trace))
    license_k = max((m.index for m in trace), default=0)
    if license_k > k + 1:
        raise AssertionError(
            "extraction consumed a class of index %d at k=%d"
            % (license_k, k))
    return PnfResult(sigma, pi, license_k, tuple(trace))
