"""Verification suite for the combinatory algebras and the program DSL."""

import random

import pytest

from limpca.dsl import (
    BasePrim,
    BoundedMax,
    BoundedMin,
    Comp,
    Const,
    Mu,
    Proj,
    compile_dsl,
    eval_dsl,
    validate,
)
from limpca.pca import (
    App,
    Diverged,
    Inert,
    K,
    NotNumeral,
    Number,
    S,
    Value,
    apply,
    apply_chain,
    check_represents,
    decode_numeral,
    eon_constants,
    eval_term,
    native_algebra,
    numeral,
    numeral_term,
    parse_sk_term,
    sk_algebra,
)

SK = sk_algebra()
NAT = native_algebra()

SUC_TERM = App(S, App(App(S, App(K, S)), K))
ZERO_TERM = App(K, App(App(S, K), K))


# ---------------------------------------------------------------------------
# term shapes and parsing
# ---------------------------------------------------------------------------


def test_numeral_term_shapes():
    assert numeral_term(0) == ZERO_TERM
    assert numeral_term(1) == App(SUC_TERM, ZERO_TERM)
    assert numeral_term(3) == App(SUC_TERM, App(SUC_TERM, App(SUC_TERM, ZERO_TERM)))


def test_parse_sk_term():
    assert parse_sk_term("K (S K K)") == ZERO_TERM
    assert parse_sk_term("S K K") == App(App(S, K), K)
    assert parse_sk_term("2") == numeral_term(2)
    assert parse_sk_term("#probe") == Inert("probe")
    assert parse_sk_term("S (K #a) K") == App(App(S, App(K, Inert("a"))), K)


def test_parse_sk_term_rejects_garbage():
    for bad in ("", "S (K", "S K)", "s", "S K extra)"):
        with pytest.raises(ValueError):
            parse_sk_term(bad)


def test_term_pretty_round():
    text = "S (K (S K K)) (S K)"
    assert str(parse_sk_term(text)) == text


# ---------------------------------------------------------------------------
# numerals
# ---------------------------------------------------------------------------


def test_numeral_roundtrip_native():
    for n in range(201):
        assert decode_numeral(numeral(NAT, n)) == Number(n)


def test_numeral_roundtrip_sk():
    for n in range(31):
        assert decode_numeral(numeral(SK, n)) == Number(n)


def test_numeral_term_evaluates_to_canonical_value():
    for n in range(11):
        out = eval_term(SK, numeral_term(n))
        assert isinstance(out, Value)
        assert out.element.payload is numeral(SK, n).payload


def test_numerals_are_pairwise_distinct_values():
    seen = {numeral(SK, n).payload.nid for n in range(51)}
    assert len(seen) == 51


def test_decode_rejects_non_numeral():
    out = eval_term(SK, parse_sk_term("K"))
    assert decode_numeral(out.element) == NotNumeral()
    omega_maker = eval_term(SK, parse_sk_term("S (S K K) (S K K)"))
    assert decode_numeral(omega_maker.element) == NotNumeral()


def test_decode_needs_fuel():
    e = numeral(SK, 20)
    assert decode_numeral(e, fuel=10) == Diverged()
    assert decode_numeral(e, fuel=10**5) == Number(20)


def test_negative_numeral_rejected():
    with pytest.raises(ValueError):
        numeral(SK, -1)


# ---------------------------------------------------------------------------
# application basics
# ---------------------------------------------------------------------------


def test_apply_rejects_mixed_algebras():
    with pytest.raises(ValueError):
        apply(numeral(SK, 0), numeral(NAT, 0))


def test_self_application_diverges():
    omega = parse_sk_term("S (S K K) (S K K) (S (S K K) (S K K))")
    assert eval_term(SK, omega, fuel=10**5) == Diverged()
    half = eval_term(SK, parse_sk_term("S (S K K) (S K K)")).element
    assert apply(half, half, fuel=10**5) == Diverged()


def test_native_stuck_applications_are_absorbing():
    err = apply(numeral(NAT, 3), numeral(NAT, 4))
    assert isinstance(err, Value)
    again = apply(err.element, numeral(NAT, 0))
    assert again.element.payload is err.element.payload
    assert decode_numeral(err.element) == NotNumeral()


# ---------------------------------------------------------------------------
# combinator laws on random elements
# ---------------------------------------------------------------------------


def _random_element(rng, algebra, atoms, depth=3):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(atoms)
    fn = _random_element(rng, algebra, atoms, depth - 1)
    arg = _random_element(rng, algebra, atoms, depth - 1)
    out = apply(fn, arg, fuel=2000)
    if isinstance(out, Diverged):
        return rng.choice(atoms)
    return out.element


def _atom_pool(algebra):
    s_elem = eval_term(algebra, S).element
    k_elem = eval_term(algebra, K).element
    pool = [s_elem, k_elem] + [numeral(algebra, n) for n in range(4)]
    if algebra.kind == "native":
        c = eon_constants(algebra)
        pool += [c.suc, c.pred, c.p, c.car, c.cdr, c.d]
    else:
        pool.append(eval_term(algebra, Inert("a")).element)
    return pool


@pytest.mark.parametrize("algebra", [SK, NAT], ids=["sk", "native"])
def test_combinator_laws_on_random_triples(algebra):
    rng = random.Random(20260823)
    atoms = _atom_pool(algebra)
    s_elem = eval_term(algebra, S).element
    k_elem = eval_term(algebra, K).element
    fuel = 10**4
    for _ in range(120):
        a = _random_element(rng, algebra, atoms)
        b = _random_element(rng, algebra, atoms)
        c = _random_element(rng, algebra, atoms)
        # k a b = a, and both applications are defined on the way.
        out = apply_chain(k_elem, [a, b], fuel)
        assert isinstance(out, Value)
        assert out.element.payload is a.payload
        # s a b is defined.
        sab = apply_chain(s_elem, [a, b], fuel)
        assert isinstance(sab, Value)
        # s a b c agrees with a c (b c) whenever both sides land.
        lhs = apply(sab.element, c, fuel)
        ac = apply(a, c, fuel)
        bc = apply(b, c, fuel)
        if isinstance(ac, Value) and isinstance(bc, Value):
            rhs = apply(ac.element, bc.element, fuel)
        else:
            rhs = Diverged()
        if isinstance(lhs, Value) and isinstance(rhs, Value):
            assert lhs.element.payload is rhs.element.payload


# ---------------------------------------------------------------------------
# arithmetic constant pack
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("algebra", [SK, NAT], ids=["sk", "native"])
def test_pairing_axioms(algebra):
    c = eon_constants(algebra)
    x = numeral(algebra, 11)
    y = apply(c.suc, numeral(algebra, 1)).element
    pxy = apply_chain(c.p, [x, y]).element
    assert apply(c.car, pxy).element.payload is x.payload
    assert apply(c.cdr, pxy).element.payload is y.payload


@pytest.mark.parametrize("algebra", [SK, NAT], ids=["sk", "native"])
def test_successor_predecessor_axioms(algebra):
    c = eon_constants(algebra)
    bound = 20 if algebra.kind == "native" else 8
    for n in range(bound):
        sn = apply(c.suc, numeral(algebra, n)).element
        assert decode_numeral(sn) == Number(n + 1)
        assert decode_numeral(apply(c.pred, sn).element) == Number(n)
        # suc n is never zero.
        assert decode_numeral(sn) != Number(0)


@pytest.mark.parametrize("algebra", [SK, NAT], ids=["sk", "native"])
def test_case_split_axioms(algebra):
    c = eon_constants(algebra)
    u = numeral(algebra, 17)
    v = numeral(algebra, 23)
    bound = 12 if algebra.kind == "native" else 5
    for n in range(bound):
        for m in range(bound):
            out = apply_chain(
                c.d, [numeral(algebra, n), numeral(algebra, m), u, v])
            assert isinstance(out, Value)
            expected = u if n == m else v
            assert out.element.payload is expected.payload


# ---------------------------------------------------------------------------
# program DSL: three routes, one function
# ---------------------------------------------------------------------------

DOUBLE = Comp(BasePrim("add"), (Proj(0, 1), Proj(0, 1)))
# mu n. 5 - n == 0, padded with a dummy argument
MU_FIVE = Mu(Comp(BasePrim("monus"), (Const(5), Proj(0, 2))))
# (l, y) -> max_{i<l} i*y
SWEEP_MAX = BoundedMax(Comp(BasePrim("mul"), (Proj(0, 2), Proj(1, 2))))
# (l, y) -> min_{i<l} i+y
SWEEP_MIN = BoundedMin(Comp(BasePrim("add"), (Proj(0, 2), Proj(1, 2))))


def test_direct_evaluation_reference_values():
    assert eval_dsl(DOUBLE, (7,)) == 14
    assert eval_dsl(MU_FIVE, (0,)) == 5
    assert eval_dsl(SWEEP_MAX, (4, 3)) == 9
    assert eval_dsl(SWEEP_MAX, (0, 3)) == 0
    assert eval_dsl(SWEEP_MIN, (3, 9)) == 9
    assert eval_dsl(SWEEP_MIN, (0, 9)) == 0
    assert eval_dsl(BasePrim("pair"), (3, 5)) == 41
    assert eval_dsl(BasePrim("fst"), (41,)) == 3
    assert eval_dsl(BasePrim("snd"), (41,)) == 5


def test_direct_evaluation_step_cap():
    with pytest.raises(RuntimeError):
        eval_dsl(Mu(Comp(Const(1), (Proj(0, 2),))), (0,), step_cap=5000)


@pytest.mark.parametrize("algebra", [SK, NAT], ids=["sk", "native"])
def test_compiled_matches_direct_on_samples(algebra):
    fuel = 10**7
    cases = [
        (DOUBLE, [(i,) for i in range(8)]),
        (MU_FIVE, [(i,) for i in range(4)]),
        (SWEEP_MAX, [(l, y) for l in range(5) for y in range(3)]),
        (SWEEP_MIN, [(l, y) for l in range(5) for y in range(3)]),
        (BasePrim("pair"), [(a, b) for a in range(4) for b in range(4)]),
        (BasePrim("fst"), [(z,) for z in range(12)]),
        (BasePrim("snd"), [(z,) for z in range(12)]),
        (BasePrim("chEq"), [(a, b) for a in range(3) for b in range(3)]),
        (BasePrim("chLt"), [(a, b) for a in range(3) for b in range(3)]),
        (BasePrim("monus"), [(a, b) for a in range(4) for b in range(4)]),
    ]
    for prog, samples in cases:
        e = compile_dsl(prog, algebra)
        table = [(args, eval_dsl(prog, args)) for args in samples]
        report = check_represents(e, table, fuel)
        assert report.exact, (prog, report.rows)


def test_compiled_random_programs_match_direct_native():
    rng = random.Random(7)

    def gen(depth, arity):
        roll = rng.random()
        if depth == 0 or roll < 0.25:
            if roll < 0.1:
                return Const(rng.randrange(6))
            return Proj(rng.randrange(arity), arity)
        if roll < 0.55:
            sym = rng.choice(["add", "mul", "monus", "chLt", "chEq"])
            return Comp(BasePrim(sym),
                        (gen(depth - 1, arity), gen(depth - 1, arity)))
        if roll < 0.8:
            return BoundedMax(gen(depth - 1, arity))
        return BoundedMin(gen(depth - 1, arity))

    checked = 0
    for _ in range(60):
        arity = rng.choice([1, 2])
        prog = gen(3, arity)
        validate(prog)
        e = compile_dsl(prog, NAT, arity=arity)
        for _ in range(5):
            args = tuple(rng.randrange(6) for _ in range(arity))
            expected = eval_dsl(prog, args)
            out = apply_chain(e, [numeral(NAT, a) for a in args], 10**6)
            assert isinstance(out, Value)
            assert decode_numeral(out.element) == Number(expected)
            checked += 1
    assert checked == 300


def test_mu_with_no_witness_diverges():
    prog = Mu(Comp(Const(1), (Proj(0, 2),)))
    for algebra in (NAT, SK):
        e = compile_dsl(prog, algebra)
        assert apply(e, numeral(algebra, 0), fuel=10**5) == Diverged()


def test_compile_requires_resolvable_arity():
    with pytest.raises(ValueError):
        compile_dsl(Const(3), NAT)
    e = compile_dsl(Const(3), NAT, arity=2)
    out = apply_chain(e, [numeral(NAT, 9), numeral(NAT, 1)])
    assert decode_numeral(out.element) == Number(3)


def test_validate_rejects_malformed_programs():
    with pytest.raises(ValueError):
        validate(BasePrim("div"))
    with pytest.raises(ValueError):
        validate(Proj(2, 2))
    with pytest.raises(ValueError):
        validate(Comp(BasePrim("add"), (Proj(0, 1),)))
    with pytest.raises(ValueError):
        validate(Comp(BasePrim("fst"), (Proj(0, 1), Proj(0, 1))))
    with pytest.raises(ValueError):
        validate(Comp(BasePrim("add"), (Proj(0, 1), Proj(0, 2))))


def test_check_represents_tallies_outcomes():
    e = compile_dsl(DOUBLE, NAT)
    report = check_represents(e, [((2,), 4), ((3,), 7)])
    assert (report.agree, report.mismatch, report.diverged) == (1, 1, 0)
    assert not report.consistent
    assert report.rows[1].outcome == "mismatch"
    assert report.rows[1].got == 6

    stuck = compile_dsl(Mu(Comp(Const(1), (Proj(0, 2),))), NAT)
    report = check_represents(stuck, [((0,), 0)], fuel=10**4)
    assert (report.agree, report.mismatch, report.diverged) == (0, 0, 1)
    assert report.consistent and not report.exact
