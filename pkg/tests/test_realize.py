"""Realizer synthesis and checking for prenex quantifier games.

Expected values come from routes independent of the synthesis pipeline: the
guess-function towers are compared against a direct Python recursion over the
quantifier semantics (with the matrix decided by the bounded formula
evaluator), synthesized move tables are compared against the exhaustive
minimax game solver, and check verdicts on hand-built realizers are compared
against the truth values of the formulas involved.
"""

import itertools

import pytest

from limpca import limiting as lim
from limpca import oracle as orc
from limpca import pca
from limpca import realize as rz
from limpca import syntax as syn
from limpca.dsl import Const, Mu, Proj, eval_dsl

NAT = pca.native_algebra()
EON = pca.eon_constants(NAT)

FUEL = 4 * 10**6  # generous per-stage budget for deep-tower decodes


def _mx(text, order, params=()):
    """Matrix spec compiled from a decidable formula; order lists the move
    variables, params the trailing parameter variables."""
    prog = rz.matrix_program(syn.parse(text), tuple(order) + tuple(params))
    return rz.MatrixSpec(len(order), prog, tuple(params), totality_attested=True)


def _truth(text, order):
    """Reference {0,1} matrix: 0 exactly where the formula is true."""
    f = syn.parse(text)
    order = tuple(order)

    def fn(*vals):
        v = orc.eval_bounded(f, dict(zip(order, vals)), 64)
        assert v is not orc.UNKNOWN
        return 0 if v is orc.TRUE else 1

    return fn


def _g_ref(fn, k, j, stages, nus):
    """Reference tower value: sweep the last j quantifiers below the given
    stage bounds (min on existential slots, max on universal ones, empty
    sweeps harmless at 0)."""
    if j == 0:
        return fn(*nus)
    vals = [_g_ref(fn, k, j - 1, stages[:-1], nus + (v,)) for v in range(stages[-1])]
    if not vals:
        return 0
    pos = k - j + 1  # 1-based position of the swept quantifier
    return min(vals) if pos % 2 == 1 else max(vals)


def _ghat_ref(fn, k, p, stages, bound, hist):
    """Reference move guess: least candidate keeping the rest of the game
    winnable when the next opponent reply is swept below ``bound``."""
    for c in range(64):
        if 2 * p - 1 == k:
            ok = _g_ref(fn, k, 0, (), hist + (c,)) == 0
        else:
            j = k - 2 * p
            ok = all(
                _g_ref(fn, k, j, stages, hist + (c, v)) == 0 for v in range(bound)
            )
        if ok:
            return c
    raise AssertionError("no candidate below 64")


def _nat(n, level):
    return lim.coerce(pca.numeral(NAT, n), level)


# exists n forall m exists p. n + m = p + 2 (copycat: n = 2, p = m).
EQ3_TEXT = "chEq(add(n, m), S(S(p))) = 1"
EQ3 = _mx(EQ3_TEXT, ("n", "m", "p"))
EQ3_REF = _truth(EQ3_TEXT, ("n", "m", "p"))

# exists n forall m. m <= n (winnable only below a reply bound).
GE2 = _mx("chLt(m, S(n)) = 1", ("n", "m"))

# exists n forall m. m * (3 - n) = 0 (pins n = 3).
PIN2_TEXT = "chEq(mul(m, monus(3, n)), 0) = 1"
PIN2 = _mx(PIN2_TEXT, ("n", "m"))

# exists n forall m exists p forall q. n + m = p + q (a forall win).
ADD4_TEXT = "chEq(add(n, m), add(p, q)) = 1"
ADD4 = _mx(ADD4_TEXT, ("n", "m", "p", "q"))
ADD4_REF = _truth(ADD4_TEXT, ("n", "m", "p", "q"))

# exists n forall m exists p forall q. p = m (copycat in the middle).
COPY4 = _mx("chEq(p, m) = 1", ("n", "m", "p", "q"))
COPY4_REF = _truth("chEq(p, m) = 1", ("n", "m", "p", "q"))

# Parametrized variant of EQ3: n + m = p + c.
EQP3 = _mx("chEq(add(n, m), add(p, c)) = 1", ("n", "m", "p"), params=("c",))
EQP3_REF = _truth("chEq(add(n, m), add(p, c)) = 1", ("n", "m", "p", "c"))


# ---------------------------------------------------------------------------
# Formula-to-program bridge
# ---------------------------------------------------------------------------


def test_matrix_program_agrees_with_bounded_truth():
    cases = [
        (EQ3_TEXT, ("n", "m", "p"), 3),
        ("chEq(n, 0) = 1 | chLt(m, n) = 1", ("n", "m"), 2),
        ("!(chEq(n, m) = 1) -> chLt(0, add(n, m)) = 1", ("n", "m"), 2),
        ("exists i < S(S(n)) . chEq(add(i, i), n) = 1", ("n",), 1),
        ("forall i < m . chLt(i, S(n)) = 1", ("n", "m"), 2),
    ]
    for text, order, width in cases:
        prog = rz.matrix_program(syn.parse(text), order)
        ref = _truth(text, order)
        for vals in itertools.product(range(4), repeat=width):
            got = eval_dsl(prog, vals, step_cap=100000)
            want = ref(*vals)
            assert (got == 0) == (want == 0), (text, vals, got)


def test_matrix_program_rejects_unbounded_quantifiers():
    with pytest.raises(ValueError):
        rz.matrix_program(syn.parse("exists i . chEq(i, n) = 1"), ("n",))
    with pytest.raises(ValueError):
        rz.matrix_program(syn.parse("forall i . chLt(n, i) = 1"), ("n",))


def test_matrix_spec_validation():
    with pytest.raises(ValueError):
        rz.MatrixSpec(1, Proj(0, 3))  # body width disagrees with arity
    with pytest.raises(ValueError):
        rz.MatrixSpec(0, Const(0))  # need at least one move
    # A mu-loop that never terminates is caught by the sampled totality check.
    bottom = rz.MatrixSpec(1, Mu(Const(1)))
    with pytest.raises(ValueError):
        rz.g_tower(bottom, 0, NAT)


def test_game_sentence_fields_and_validation():
    gs = rz.game_sentence(syn.parse("exists n . forall m . exists p . " + EQ3_TEXT))
    assert gs.names == ("n", "m", "p")
    assert gs.matrix.arity == 3
    assert gs.matrix.params == ()
    assert gs.matrix.totality_attested
    bad = [
        "forall n . exists m . chEq(n, m) = 1",  # starts universally
        "exists n . exists m . chEq(n, m) = 1",  # fails to alternate
        "exists n . chEq(n, m) = 1",  # open
        "exists n < S(0) . chEq(n, 0) = 1",  # bounded prefix move
        "chEq(0, 0) = 1",  # no prefix at all
    ]
    for text in bad:
        with pytest.raises(ValueError):
            rz.game_sentence(syn.parse(text))


# ---------------------------------------------------------------------------
# Guess-function towers
# ---------------------------------------------------------------------------


def test_tower_levels_and_depth_range():
    assert rz.g_tower(EQ3, 0, NAT).level == 0
    assert rz.g_tower(EQ3, 1, NAT).level == 1
    assert rz.g_tower(ADD4, 2, NAT).level == 2
    with pytest.raises(ValueError):
        rz.g_tower(EQ3, 2, NAT)  # depth capped at arity - 2
    with pytest.raises(ValueError):
        rz.g_tower(EQ3, -1, NAT)
    one = rz.MatrixSpec(1, Proj(0, 1), totality_attested=True)
    assert rz.g_tower(one, 0, NAT).level == 0
    with pytest.raises(ValueError):
        rz.g_tower(one, 1, NAT)


def test_tower_flat_matches_reference_recursion():
    cases = [
        (EQ3, EQ3_REF, 3, 1, ()),
        (ADD4, ADD4_REF, 4, 1, ()),
        (ADD4, ADD4_REF, 4, 2, ()),
        (COPY4, COPY4_REF, 4, 2, ()),
        (EQP3, EQP3_REF, 3, 1, (0,)),
        (EQP3, EQP3_REF, 3, 1, (2,)),
    ]
    for m, ref, k, j, params in cases:
        flat = rz._g_flat(m, j)
        for stages in itertools.product(range(4), repeat=j):
            for nus in itertools.product(range(3), repeat=k - j):
                got = eval_dsl(flat, stages + nus + params, step_cap=200000)
                want = _g_ref(lambda *v: ref(*(v + params)), k, j, stages, nus)
                assert got == want, (k, j, stages, nus, params)


def test_tower_depth_zero_runs_in_the_algebra():
    g0 = rz.g_tower(EQ3, 0, NAT)
    for nus in itertools.product(range(3), repeat=3):
        e = g0.base
        for v in nus:
            e = pca.apply(e, pca.numeral(NAT, v)).element
        got = pca.decode_numeral(e)
        assert got == pca.Number(EQ3_REF(*nus)), nus


def test_tower_slices_match_reference():
    g1 = rz.g_tower(EQ3, 1, NAT)
    a = lim.lim_apply(lim.lim_apply(g1, _nat(1, 1)), _nat(2, 1))
    samples = lim.limit_samples(a, horizon=8, window=4)
    want = [_g_ref(EQ3_REF, 3, 1, (t,), (1, 2)) for t in range(8)]
    assert samples == want


def test_tower_iterated_limit_and_certificate():
    # For n + m = p + q every choice of p loses to a late q, so the depth-2
    # tower settles to 1 as soon as the outer sweep is nonempty.
    g2 = rz.g_tower(ADD4, 2, NAT)
    for n, m in ((0, 0), (1, 2)):
        a = lim.lim_apply(lim.lim_apply(g2, _nat(n, 2)), _nat(m, 2))
        res = lim.eval_limit(a, horizon=16, window=4)
        assert res == lim.Number(1, 1), (n, m, res)
    # For p = m the copycat reply enters the outer sweep at stage m + 1, so
    # the tower settles to 0 with exactly that certificate.
    g2 = rz.g_tower(COPY4, 2, NAT)
    for n, m in ((0, 0), (0, 1), (2, 3), (1, 5)):
        a = lim.lim_apply(lim.lim_apply(g2, _nat(n, 2)), _nat(m, 2))
        res = lim.eval_limit(a, horizon=16, window=4)
        want = lim.Number(0, 0 if m == 0 else m + 1)
        assert res == want, (n, m, res)


# ---------------------------------------------------------------------------
# Move guesses
# ---------------------------------------------------------------------------


def test_move_guess_matches_reference_search():
    # First move of the three-quantifier game: args (stage, reply bound).
    flat = rz._ghat_flat(EQ3, 1)
    for l1 in range(2, 6):
        for b in range(l1 + 1):
            got = eval_dsl(flat, (l1, b), step_cap=200000)
            assert got == _ghat_ref(EQ3_REF, 3, 1, (l1,), b, ())
    # Final move (boundary case): args (dummy stage, x1, nu2).  Histories
    # with x1 + nu2 < 2 admit no winning reply, so stay on reachable ones.
    flat = rz._ghat_flat(EQ3, 2)
    for x1 in range(2, 5):
        for nu2 in range(4):
            got = eval_dsl(flat, (7, x1, nu2), step_cap=200000)
            assert got == _ghat_ref(EQ3_REF, 3, 2, (), 0, (x1, nu2))
            assert got == x1 + nu2 - 2
    # Middle move of a four-quantifier game: args (bound, x1, nu2), and the
    # history must be consumed in play order.
    flat = rz._ghat_flat(COPY4, 2)
    for x1, nu2, b in itertools.product(range(3), range(3), range(1, 4)):
        got = eval_dsl(flat, (b, x1, nu2), step_cap=200000)
        assert got == _ghat_ref(COPY4_REF, 4, 2, (), b, (x1, nu2))
        assert got == nu2  # copycat answers the last reply


def test_move_guess_monotone_in_reply_bound():
    # exists n forall m. m <= n: the guess must track the reply bound.
    flat = rz._ghat_flat(GE2, 1)
    vals = [eval_dsl(flat, (b,), step_cap=200000) for b in range(7)]
    assert vals == [max(0, b - 1) for b in range(7)]
    flat = rz._ghat_flat(EQ3, 1)
    vals = [eval_dsl(flat, (6, b), step_cap=200000) for b in range(7)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_moves_match_exhaustive_game_solution():
    for spec, text, names in (
        (PIN2, PIN2_TEXT, ("n", "m")),
        (EQ3, EQ3_TEXT, ("n", "m", "p")),
    ):
        mv = rz.synth_move_functions(spec, NAT, horizon=32, bound=6)
        kinds = ("exists", "forall")
        prefix = tuple((kinds[i % 2], v) for i, v in enumerate(names))
        winner, table = orc.solve_game(
            orc.GameSpec(prefix, syn.parse(text), 6))
        assert winner == "exists"
        st = table.as_dict()
        for p, rows in enumerate(mv.tables):
            for hist, value in rows:
                assert st[(2 * p, hist)] == value, (text, p, hist)
    # Spot checks, independently of the solver.
    mv = rz.synth_move_functions(PIN2, NAT, horizon=32, bound=6)
    assert dict(mv.tables[0]) == {(): 3}
    mv = rz.synth_move_functions(EQ3, NAT, horizon=32, bound=6)
    assert dict(mv.tables[0]) == {(): 2}
    assert dict(mv.tables[1]) == {(m,): m for m in range(6)}
    assert all(e.level == 3 for e in mv.moves)


def test_synth_unwinnable_game_raises():
    bad = _mx("chEq(n, m) = 1", ("n", "m"))  # no n answers every m
    with pytest.raises(rz.UnstableLimit) as exc:
        rz.synth_move_functions(bad, NAT, horizon=8, bound=2, fuel=20000)
    assert exc.value.history == ()


# ---------------------------------------------------------------------------
# Whole realizers
# ---------------------------------------------------------------------------


def test_synth_realizer_level_and_components():
    f = syn.parse("exists n . forall m . exists p . " + EQ3_TEXT)
    q = rz.synth_realizer(f, NAT, horizon=32, bound=6)
    assert q.level == 3
    car = lim.coerce(EON.car, 3)
    cdr = lim.coerce(EON.cdr, 3)
    first = lim.eval_limit(lim.lim_apply(car, q), horizon=32, window=8, fuel=FUEL)
    assert isinstance(first, lim.Number) and first.value == 2
    rest = lim.lim_apply(cdr, q)
    for reply in (0, 1, 3):
        branch = lim.lim_apply(rest, _nat(reply, 3))
        second = lim.eval_limit(
            lim.lim_apply(car, branch), horizon=32, window=8, fuel=FUEL)
        assert isinstance(second, lim.Number) and second.value == reply


def test_synth_realizer_passes_check():
    f = syn.parse("exists n . forall m . exists p . " + EQ3_TEXT)
    q = rz.synth_realizer(f, NAT, horizon=32, bound=6)
    rep = rz.realizes_check(q, f, check_bound=6, horizon=32, window=8)
    assert rep.verdict is rz.Verdict.REALIZED
    assert rep.check_bound == 6
    assert rep.fuel_used >= 0


# ---------------------------------------------------------------------------
# Double-negation elimination realizers
# ---------------------------------------------------------------------------


def test_dne_one_move_guess_program():
    # Candidates below 3 are refuted once the stage reaches them; the guess
    # should settle on 3.  The matrix takes (candidate, stage probe).
    body = rz.matrix_program(
        syn.parse("chEq(mul(chLt(n, 3), chLt(n, S(t))), 1) = 0"), ("n", "t"))
    m = rz.MatrixSpec(2, body, totality_attested=True)
    e = rz.realize_dne(1, m, NAT)
    assert e.level == 0

    def guess(t):
        c = 0
        while any(c < 3 and c <= v for v in range(t)):
            c += 1
        return c

    rows = tuple(((t,), guess(t)) for t in range(9))
    rep = pca.check_represents(e.base, rows, fuel=10**6)
    assert rep.mismatch == 0 and rep.diverged == 0
    assert rep.agree == len(rows)
    assert [guess(t) for t in range(9)] == [0, 1, 2, 3, 3, 3, 3, 3, 3]


def test_dne_one_move_closed_instance():
    # exists n. n + 2 = 5: least witness 3, shipped as a constant function
    # returning the witness pair, so the whole instance checks at level 0.
    f = syn.parse("exists n . chEq(add(n, 2), 5) = 1")
    m = _mx("chEq(add(n, 2), 5) = 1", ("n",))
    e = rz.realize_dne(1, m, NAT, horizon=16, bound=8)
    assert e.level == 0
    # the witness slot survives any premise argument
    first = pca.decode_numeral(pca.apply(EON.car, pca.apply(e.base, _num(9)).element).element)
    assert first == pca.Number(3)
    dne = syn.Imp(syn.Not(syn.Not(f)), f)
    rep = rz.realizes_check(e, dne, check_bound=8)
    assert rep.verdict is rz.Verdict.REALIZED


def test_dne_one_move_rejects_wrong_arity():
    with pytest.raises(ValueError):
        rz.realize_dne(1, EQ3, NAT)
    with pytest.raises(ValueError):
        rz.realize_dne(0, GE2, NAT)


def test_dne_levels_and_check():
    f2 = syn.parse("exists n . forall m . chLt(m, S(add(n, m))) = 1")
    m2 = _mx("chLt(m, S(add(n, m))) = 1", ("n", "m"))
    e2 = rz.realize_dne(2, m2, NAT, horizon=32, bound=8)
    assert e2.level == 1
    dne2 = syn.Imp(syn.Not(syn.Not(f2)), f2)
    rep = rz.realizes_check(e2, dne2, check_bound=4, horizon=32, window=8)
    assert rep.verdict is rz.Verdict.REALIZED

    f3 = syn.parse("exists n . forall m . exists p . " + EQ3_TEXT)
    e3 = rz.realize_dne(3, EQ3, NAT, horizon=32, bound=6)
    assert e3.level == 2
    dne3 = syn.Imp(syn.Not(syn.Not(f3)), f3)
    rep = rz.realizes_check(e3, dne3, check_bound=4, horizon=32, window=8)
    assert rep.verdict is rz.Verdict.REALIZED


def test_dne_rejects_parametrized_matrix():
    with pytest.raises(ValueError):
        rz.realize_dne(3, EQP3, NAT)


# ---------------------------------------------------------------------------
# The checking relation on hand-built elements
# ---------------------------------------------------------------------------


def _pair(a, b):
    return pca.apply(pca.apply(EON.p, a).element, b).element


def _konst(e):
    k = pca.eval_term(NAT, pca.K).element
    return pca.apply(k, e).element


def _num(n):
    return pca.numeral(NAT, n)


def test_check_existential_witnesses():
    f = syn.parse("exists n . chEq(n, 3) = 1")
    good = rz.realizes_check(_pair(_num(3), _num(0)), f)
    assert good.verdict is rz.Verdict.REALIZED
    bad = rz.realizes_check(_pair(_num(4), _num(0)), f)
    assert bad.verdict is rz.Verdict.REFUTED
    assert bad.check_bound == 8
    assert any(s.label for s in bad.trace)
    # A realizer whose witness slot fails to decode stays unknown: the
    # check cannot rule the sentence unrealized by this element.
    opaque = rz.realizes_check(_num(5), f)
    assert opaque.verdict is rz.Verdict.UNKNOWN


def test_check_conjunction_and_disjunction():
    both = syn.parse("chEq(1, 1) = 1 & chEq(2, 2) = 1")
    rep = rz.realizes_check(_pair(_num(0), _num(0)), both)
    assert rep.verdict is rz.Verdict.REALIZED
    half = syn.parse("chEq(1, 1) = 1 & chEq(1, 2) = 1")
    rep = rz.realizes_check(_pair(_num(0), _num(0)), half)
    assert rep.verdict is rz.Verdict.REFUTED
    either = syn.parse("chEq(1, 1) = 1 | chEq(0, 1) = 1")
    assert rz.realizes_check(_pair(_num(0), _num(0)), either).verdict \
        is rz.Verdict.REALIZED
    assert rz.realizes_check(_pair(_num(1), _num(0)), either).verdict \
        is rz.Verdict.REFUTED  # right tag selects the false side


def test_check_negation_and_implication():
    assert rz.realizes_check(_num(0), syn.parse("!(chEq(0, 1) = 1)")).verdict \
        is rz.Verdict.REALIZED
    assert rz.realizes_check(_num(0), syn.parse("!(chEq(1, 1) = 1)")).verdict \
        is rz.Verdict.REFUTED
    vacuous = syn.parse("chEq(0, 1) = 1 -> chEq(0, 2) = 1")
    assert rz.realizes_check(_konst(_num(0)), vacuous).verdict \
        is rz.Verdict.REALIZED
    broken = syn.parse("chEq(1, 1) = 1 -> chEq(0, 1) = 1")
    assert rz.realizes_check(_konst(_num(0)), broken).verdict \
        is rz.Verdict.REFUTED


def test_check_universal_instances():
    always = syn.parse("forall m . chLt(m, S(m)) = 1")
    assert rz.realizes_check(_konst(_num(0)), always).verdict \
        is rz.Verdict.REALIZED
    capped = syn.parse("forall m . chLt(m, 3) = 1")
    assert rz.realizes_check(_konst(_num(0)), capped).verdict \
        is rz.Verdict.REFUTED


def test_check_requires_closed_formula():
    with pytest.raises(ValueError):
        rz.realizes_check(_num(0), syn.parse("chEq(n, 0) = 1"))
    with pytest.raises(ValueError):
        rz.realizes_check(_num(0), syn.parse("chEq(0, 0) = 1"), check_bound=0)


def test_check_realized_implies_not_false():
    cases = [
        (_pair(_num(3), _num(0)), "exists n . chEq(n, 3) = 1"),
        (_pair(_num(0), _num(0)), "chEq(1, 1) = 1 & chEq(2, 2) = 1"),
        (_pair(_num(0), _num(0)), "chEq(1, 1) = 1 | chEq(0, 1) = 1"),
        (_konst(_num(0)), "forall m . chLt(m, S(m)) = 1"),
        (_num(0), "!(chEq(0, 1) = 1)"),
        (_konst(_num(0)), "chEq(0, 1) = 1 -> chEq(0, 2) = 1"),
    ]
    for e, text in cases:
        f = syn.parse(text)
        if rz.realizes_check(e, f).verdict is rz.Verdict.REALIZED:
            assert orc.eval_bounded(f, {}, 8) is not orc.FALSE, text
