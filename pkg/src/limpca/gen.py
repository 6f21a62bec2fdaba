"""Seeded generators for random corpora and planted problem instances.

Every generator takes an explicit ``random.Random`` so corpora are exactly
reproducible from a seed.  Planted instances carry the data needed to verify
results independently (least witnesses, guaranteed-true sentences); the
plants are chosen so that bounded search, unbounded search, and limit
evaluation all agree on them, which is what lets acceptance runs compare
those routes exactly.
"""

from dataclasses import dataclass

from . import hierarchy
from . import pca
from . import syntax
from .dsl import BasePrim, BoundedMax, BoundedMin, Comp, Const, Mu, Proj
from .syntax import Eq, PrimFn, Var, make_quant, nat

_ADD = BasePrim("add")
_MUL = BasePrim("mul")
_MONUS = BasePrim("monus")
_CHEQ = BasePrim("chEq")
_CHLT = BasePrim("chLt")


# ---------------------------------------------------------------------------
# Random algebra elements
# ---------------------------------------------------------------------------


def random_sk_term(rng, depth):
    """A random closed applicative term over the two basic combinators."""
    if depth <= 0 or rng.random() < 0.35:
        return pca.S if rng.random() < 0.5 else pca.K
    return pca.App(random_sk_term(rng, depth - 1), random_sk_term(rng, depth - 1))


def random_elements(algebra, rng, count, fuel=10**5):
    """A pool of defined elements: numerals, machine constants, evaluated
    random combinator terms, and applications of earlier pool members."""
    eon = pca.eon_constants(algebra)
    consts = (eon.p, eon.car, eon.cdr, eon.d, eon.suc, eon.pred)
    out = []
    while len(out) < count:
        roll = rng.random()
        if roll < 0.35:
            v = pca.eval_term(algebra, random_sk_term(rng, 4))
            if isinstance(v, pca.Value):
                out.append(v.element)
        elif roll < 0.6:
            out.append(pca.numeral(algebra, rng.randrange(8)))
        elif roll < 0.8:
            out.append(consts[rng.randrange(len(consts))])
        elif len(out) >= 2:
            v = pca.apply(out[rng.randrange(len(out))],
                          out[rng.randrange(len(out))], fuel)
            if isinstance(v, pca.Value):
                out.append(v.element)
        else:
            out.append(pca.numeral(algebra, 0))
    return out


def law_triples(algebra, rng, count):
    """Random (a, b, c) element triples for exercising the application laws."""
    pool = random_elements(algebra, rng, max(24, count // 8))
    pick = lambda: pool[rng.randrange(len(pool))]
    return [(pick(), pick(), pick()) for _ in range(count)]


def composable_pairs(algebra, rng, count, fuel=10**5):
    """Random (a, b) pairs whose application a*b is defined within fuel."""
    pool = random_elements(algebra, rng, max(24, count // 8))
    pairs = []
    while len(pairs) < count:
        a = pool[rng.randrange(len(pool))]
        b = pool[rng.randrange(len(pool))]
        if isinstance(pca.apply(a, b, fuel), pca.Value):
            pairs.append((a, b))
    return pairs


# ---------------------------------------------------------------------------
# Random formulas
# ---------------------------------------------------------------------------

_QVARS = ("n", "m", "p", "q", "i", "j")


def _term(rng, scope, depth, prims=("add", "mul", "monus")):
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        if scope and roll < 0.2:
            return Var(scope[rng.randrange(len(scope))])
        return nat(rng.randrange(6))
    if roll < 0.5:
        return syntax.Suc(_term(rng, scope, depth - 1, prims))
    sym = prims[rng.randrange(len(prims))]
    width = syntax.PRIM_ARITY[sym]
    return PrimFn(sym, tuple(_term(rng, scope, depth - 1, prims)
                             for _ in range(width)))


def _atom(rng, scope, prims=("add", "mul", "monus")):
    return Eq(_term(rng, scope, 2, prims), _term(rng, scope, 2, prims))


def _formula(rng, scope, depth, allow_imp=True, bounded_only=False,
             prims=("add", "mul", "monus")):
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        return _atom(rng, scope, prims)
    if roll < 0.42:
        return syntax.Not(_formula(rng, scope, depth - 1, allow_imp,
                                   bounded_only, prims))
    if roll < 0.68:
        cls = syntax.And if roll < 0.55 else syntax.Or
        return cls(_formula(rng, scope, depth - 1, allow_imp, bounded_only, prims),
                   _formula(rng, scope, depth - 1, allow_imp, bounded_only, prims))
    if allow_imp and roll < 0.76:
        return syntax.Imp(
            _formula(rng, scope, depth - 1, allow_imp, bounded_only, prims),
            _formula(rng, scope, depth - 1, allow_imp, bounded_only, prims))
    var = _QVARS[rng.randrange(len(_QVARS))]
    if bounded_only or rng.random() < 0.4:
        bound = nat(rng.randrange(1, 5))
    else:
        bound = None
    body = _formula(rng, scope + (var,), depth - 1, allow_imp, bounded_only, prims)
    kind = "forall" if rng.random() < 0.5 else "exists"
    return make_quant(kind, var, bound, body)


def roundtrip_corpus(rng, count):
    """Arbitrary well-formed formulas (free variables allowed) for testing
    purely syntactic transformations."""
    prims = tuple(syntax.PRIM_ARITY)
    out = []
    for _ in range(count):
        scope = tuple(_QVARS[: rng.randrange(3)])
        out.append(_formula(rng, scope, rng.randrange(1, 5), prims=prims))
    return out


def arrowfree_corpus(rng, count):
    """Closed implication-free formulas."""
    return [_formula(rng, (), rng.randrange(1, 5), allow_imp=False)
            for _ in range(count)]


def decidable_corpus(rng, count):
    """Closed formulas with only bounded quantifiers: the three-valued
    evaluator always reaches a definite verdict on them."""
    return [_formula(rng, (), rng.randrange(1, 4), bounded_only=True)
            for _ in range(count)]


# Degree-one pieces whose truth is decided by a small witness or
# counterexample, so they stay definite under bounded evaluation even after
# prenexing moves their quantifier to the front.


def _sigma1_true(rng):
    """A true existential with witness below 6."""
    w = rng.randrange(6)
    a = rng.randrange(5)
    shape = rng.randrange(3)
    if shape == 0:
        atom = Eq(PrimFn("chEq", (PrimFn("add", (Var("n"), nat(a))), nat(a + w))),
                  nat(1))
    elif shape == 1:
        c = rng.randrange(1, 4)
        atom = Eq(PrimFn("mul", (Var("n"), nat(c))), nat(c * w))
    else:
        atom = Eq(PrimFn("chLt", (nat(w), syntax.Suc(Var("n")))), nat(1))
    return make_quant("exists", "n", None, atom)


def _pi1_false(rng):
    """A false universal with counterexample below 6."""
    c = rng.randrange(6)
    if rng.random() < 0.5:
        atom = Eq(PrimFn("chLt", (Var("m"), nat(c))), nat(1))
    else:
        atom = Eq(PrimFn("chEq", (PrimFn("add", (Var("m"), Var("m"))), Var("m"))),
                  nat(1))
    return make_quant("forall", "m", None, atom)


def _deg0(rng, truth=None):
    """A closed decidable formula, optionally forced to the given truth by
    conjoining/disjoining a trivial atom."""
    f = _formula(rng, (), rng.randrange(0, 3), bounded_only=True)
    if truth is True:
        return syntax.Or(f, Eq(nat(0), nat(0)))
    if truth is False:
        return syntax.And(f, Eq(nat(0), nat(1)))
    return f


def _decorated_piece(rng):
    """A degree-1 formula that the bounded evaluator decides even after
    prenexing: decorations never put the decisive branch behind a quantifier
    sweep that bounded evaluation cannot certify."""
    if rng.random() < 0.5:
        piece, positive = _sigma1_true(rng), True
    else:
        piece, positive = _pi1_false(rng), False
    roll = rng.random()
    if positive:
        if roll < 0.2:
            out = syntax.Or(piece, _deg0(rng))
        elif roll < 0.4:
            out = syntax.Or(_deg0(rng), piece)
        elif roll < 0.55:
            out = syntax.And(_deg0(rng, True), piece)
        elif roll < 0.7:
            out = syntax.Imp(_deg0(rng, True), piece)
        elif roll < 0.85:
            out = syntax.And(piece, _deg0(rng, True))
        else:
            out = piece
    else:
        if roll < 0.25:
            out = syntax.And(piece, _deg0(rng))
        elif roll < 0.5:
            out = syntax.And(_deg0(rng), piece)
        elif roll < 0.75:
            out = syntax.Or(piece, _deg0(rng, False))
        elif roll < 0.9:
            out = syntax.Or(_deg0(rng, False), piece)
        else:
            out = piece
    if rng.random() < 0.3:
        out = syntax.Not(out)
    return out


def _alternating_prenex(rng, degree):
    """A closed strictly alternating prenex formula of the given degree."""
    start = rng.random() < 0.5
    names = []
    for i in range(degree):
        names.append("x%d" % i)
    m = rng.randrange(1, 4)
    c = rng.randrange(4)
    if degree >= 2:
        matrix = Eq(PrimFn("chEq", (PrimFn("add", (Var(names[0]), Var(names[1]))),
                                    PrimFn("add", (Var(names[-1]), nat(c))))),
                    nat(rng.randrange(2)))
    else:
        matrix = Eq(PrimFn("chEq", (Var(names[0]), nat(m))), nat(1))
    f = matrix
    for i, name in enumerate(reversed(names)):
        pos = degree - 1 - i
        kind = ("exists", "forall")[(pos + (0 if start else 1)) % 2]
        f = make_quant(kind, name, None, f)
    return f


def prenexable_corpus(rng, count):
    """(formula, k) pairs with degree at most k+1, k <= 3, at most six
    quantifiers, weighted so that at least nine in ten samples (and their
    prenex forms) get definite bounded verdicts."""
    out = []
    hard = 0
    while len(out) < count:
        roll = rng.random()
        if roll < 0.5:
            f = _deg0(rng)
        elif roll < 0.94 or hard >= (count * 7) // 100:
            f = _decorated_piece(rng)
        else:
            f = _alternating_prenex(rng, rng.randrange(2, 5))
            hard += 1
        d = hierarchy.classify(f).degree
        if d > 4 or syntax.quantifier_count(f) > 6:
            continue
        k = rng.randrange(max(0, d - 1), 4)
        out.append((f, k))
    return out


# ---------------------------------------------------------------------------
# Planted limit-search matrices
# ---------------------------------------------------------------------------


def planted_matrix2(rng):
    """A 2-argument program f(n, m) whose least stable row is planted.

    The witness row is identically zero; every candidate below it is
    refuted by some reply under 32, so the stage-bounded guess settles to
    the witness well inside a 64-stage horizon.  Returns (program, witness).
    """
    w = rng.randrange(16)
    c = rng.randrange(4)
    n_, m_ = Proj(0, 2), Proj(1, 2)
    style = rng.randrange(3)
    if style == 0:  # candidate n is refuted exactly by reply n + c
        refute = Comp(_CHEQ, (m_, Comp(_ADD, (n_, Const(c)))))
    elif style == 1:  # refuted exactly by reply n monus c
        refute = Comp(_CHEQ, (m_, Comp(_MONUS, (n_, Const(c)))))
    else:  # refuted by every reply from n on
        refute = Comp(_CHLT, (n_, Comp(_ADD, (m_, Const(1)))))
    not_w = Comp(_MONUS, (Const(1), Comp(_CHEQ, (n_, Const(w)))))
    body = Comp(_MUL, (not_w, refute))
    if rng.random() < 0.4:  # harmless decoration: add zero times junk
        junk = Comp(_ADD, (m_, Const(rng.randrange(5))))
        body = Comp(_ADD, (body, Comp(_MUL, (Const(0), junk))))
    return body, w


def guess_program(body):
    """The one-argument stage program t -> least n with no refutation below
    t: mu n. (max_{m<t} body(n, m)) = 0."""
    swept = Comp(body, (Proj(1, 2), Proj(0, 2)))
    return Mu(Comp(BoundedMax(swept), (Proj(1, 2), Proj(0, 2))))


# ---------------------------------------------------------------------------
# Planted quantifier games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlantedGame:
    """A true prenex game sentence with small witnesses.

    The matrices are shaped so the existential player's least winning moves
    are the same whether replies range over all naturals or only below the
    stated bound, and every winning move is below the bound.
    """

    k: int
    formula: object
    bound: int


def planted_game(rng, k, bound=8):
    if k == 1:
        w = rng.randrange(bound)
        a = rng.randrange(5)
        if rng.random() < 0.5:
            atom = Eq(PrimFn("chEq", (PrimFn("add", (Var("n"), nat(a))),
                                      nat(a + w))), nat(1))
        else:
            atom = Eq(PrimFn("add", (Var("n"), nat(a))), nat(a + w))
        f = make_quant("exists", "n", None, atom)
        return PlantedGame(1, f, bound)
    if k == 2:
        if rng.random() < 0.7:
            c = rng.randrange(bound)
            # n pins the product to zero from c on: least winner is c
            atom = Eq(PrimFn("chEq", (PrimFn("mul", (Var("m"),
                                                     PrimFn("monus", (nat(c), Var("n"))))),
                                      nat(0))), nat(1))
        else:
            # every n wins: least winner is 0
            atom = Eq(PrimFn("chLt", (Var("m"),
                                      syntax.Suc(PrimFn("add", (Var("n"), Var("m")))))),
                      nat(1))
        f = make_quant("exists", "n", None, make_quant("forall", "m", None, atom))
        return PlantedGame(2, f, bound)
    if k == 3:
        style = rng.randrange(3)
        if style == 0:
            c = rng.randrange(bound)
            # n = c, then p copies m shifted back: p = m
            atom = Eq(PrimFn("chEq", (PrimFn("add", (Var("n"), Var("m"))),
                                      PrimFn("add", (Var("p"), nat(c))))), nat(1))
        elif style == 1:
            a = rng.randrange(bound)
            atom = syntax.And(
                Eq(PrimFn("chEq", (Var("n"), nat(a))), nat(1)),
                Eq(PrimFn("chEq", (Var("p"), Var("m"))), nat(1)))
        else:
            c = rng.randrange(1, bound)
            # the final move is irrelevant: least p is 0
            atom = Eq(PrimFn("chEq", (PrimFn("mul", (Var("m"),
                                                     PrimFn("monus", (nat(c), Var("n"))))),
                                      nat(0))), nat(1))
        f = make_quant(
            "exists", "n", None,
            make_quant("forall", "m", None,
                       make_quant("exists", "p", None, atom)))
        return PlantedGame(3, f, bound)
    raise ValueError("planted games cover k in {1, 2, 3}")


def planted_games(rng, count, bound=8, ks=(1, 2, 3)):
    return [planted_game(rng, ks[i % len(ks)], bound) for i in range(count)]


# ---------------------------------------------------------------------------
# Program samples per DSL construct
# ---------------------------------------------------------------------------


def _comp_prog(rng, depth, width):
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        if roll < 0.12:
            return Const(rng.randrange(4))
        return Proj(rng.randrange(width), width)
    prim = (_ADD, _MUL, _MONUS, _CHEQ, _CHLT)[rng.randrange(5)]
    return Comp(prim, (_comp_prog(rng, depth - 1, width),
                       _comp_prog(rng, depth - 1, width)))


def _two_arg_prog(rng):
    """A composition that definitely mentions an argument, so its arity
    is pinned at two."""
    sub = _comp_prog(rng, 2, 2)
    proj = Proj(rng.randrange(2), 2)
    args = (sub, proj) if rng.random() < 0.5 else (proj, sub)
    return Comp((_ADD, _MUL, _MONUS)[rng.randrange(3)], args)


def dsl_construct_samples(rng, per_construct=60):
    """Programs grouped by headline construct, each with sampled argument
    rows.  Mu bodies are planted to hit zero so every row converges."""
    out = {"Comp": [], "BoundedMax": [], "BoundedMin": [], "Mu": []}
    rows_per = 6
    programs = max(1, per_construct // rows_per)
    for _ in range(programs):
        prog = _two_arg_prog(rng)
        rows = [tuple(rng.randrange(6) for _ in range(2)) for _ in range(rows_per)]
        out["Comp"].append((prog, rows))
    for name, cls in (("BoundedMax", BoundedMax), ("BoundedMin", BoundedMin)):
        for _ in range(programs):
            prog = cls(_two_arg_prog(rng))
            rows = [(rng.randrange(7), rng.randrange(6)) for _ in range(rows_per)]
            out[name].append((prog, rows))
    for _ in range(programs):
        c = rng.randrange(4)
        target = Comp(_ADD, (Proj(1, 2), Const(c)))
        body = Comp(_MONUS, (Const(1), Comp(_CHEQ, (Proj(0, 2), target))))
        if rng.random() < 0.5:
            body = Comp(_ADD, (body, Comp(_MUL, (Const(0), _comp_prog(rng, 1, 2)))))
        rows = [(rng.randrange(6),) for _ in range(rows_per)]
        out["Mu"].append((Mu(body), rows))
    return out
