"""Limit stages over a partial combinatory algebra.

A guessing function is an element ``a`` of an algebra read as a map from
stages: at stage ``t`` it guesses ``a · t̄``.  Identifying two guessing
functions whose guesses agree from some stage onward yields a new algebra
whose application composes guesses pointwise; iterating the construction
gives a tower of algebras, and taking the union of the tower (with entry
levels remembered) gives a direct limit closed under application.

Whether two guesses agree from some point on is undecidable, so every
operation below works over a finite stage horizon and returns
window-certified verdicts: ``Equal`` and ``Number`` mean "stable across the
inspected tail", never "stable forever".
"""

from dataclasses import dataclass

from . import pca
from .pca import Element

# Budget for applications that are guaranteed to finish almost at once
# (partial applications of the basic combinators).
_FORM_FUEL = 4096


@dataclass(frozen=True)
class LimElement:
    """An element of the ``level``-th limit algebra over ``base.algebra``.

    ``base`` is always an element of the underlying algebra.  A level-1
    element reads it as a guessing function; a level-2 element reads it as a
    guess whose stagewise values are themselves level-1 bases; and so on.
    When ``omega`` is set the element is regarded as a member of the direct
    limit, and ``level`` records where it entered the tower.
    """

    base: Element
    level: int
    omega: bool = False

    def __repr__(self):
        mark = "omega@" if self.omega else "level "
        return "LimElement(%s%d, %r)" % (mark, self.level, self.base)


@dataclass(frozen=True)
class Equal:
    """Both sides were defined and agreed at every inspected tail stage."""

    window: tuple


@dataclass(frozen=True)
class Distinct:
    """A definite disagreement that persists into the far end of the tail."""

    witness: int


@dataclass(frozen=True)
class Unknown:
    """The inspected tail certifies neither agreement nor disagreement."""


@dataclass(frozen=True)
class Number:
    """The guesses settle on ``value`` through the whole tail window.

    ``certificate`` is the first stage of the final constant run: every
    sampled stage from ``certificate`` up to the horizon produced ``value``.
    """

    value: int
    certificate: int


@dataclass(frozen=True)
class Unstable:
    """No single numeral is locked in over the tail window."""


# ---------------------------------------------------------------------------
# Representation plumbing
# ---------------------------------------------------------------------------

_CONSTS = {}


def _parts(x):
    if isinstance(x, LimElement):
        return x.base, x.level, x.omega
    if isinstance(x, Element):
        return x, 0, False
    raise TypeError("expected an Element or LimElement, got %r" % (x,))


def _as_lim(x):
    base, level, omega = _parts(x)
    if isinstance(x, LimElement):
        return x
    return LimElement(base, level, omega)


def _must_apply(a, b):
    out = pca.apply(a, b, _FORM_FUEL)
    if not isinstance(out, pca.Value):
        raise RuntimeError("structural application unexpectedly ran out of fuel")
    return out.element


def _const_base(algebra, name, level):
    """The base of the basic combinator ``name`` at the given level.

    Each injection step prefixes one constant-guess wrapper, so the level-j
    combinator is represented by j wrappers around the level-0 one.
    """
    key = (algebra.kind, name, level)
    got = _CONSTS.get(key)
    if got is None:
        if level == 0:
            term = pca.S if name == "s" else pca.K
            got = pca.eval_term(algebra, term).element
        else:
            k0 = _const_base(algebra, "k", 0)
            got = _must_apply(k0, _const_base(algebra, name, level - 1))
        _CONSTS[key] = got
    return got


def _stage_numeral(algebra, level, t):
    """Base of the stage numeral ``t`` as seen by a level-``level`` element."""
    e = pca.numeral(algebra, t)
    if level:
        k0 = _const_base(algebra, "k", 0)
        for _ in range(level):
            e = _must_apply(k0, e)
    return e


def _app_at(level, x, y):
    """Base of the level-``level`` application of bases ``x`` and ``y``.

    For level >= 1 this only forms partial applications of the basic
    combinators, so it always succeeds and never runs user code; genuine
    evaluation happens later, when a level-1 element is sliced at a stage.
    """
    if level == 0:
        return _must_apply(x, y)
    s_low = _const_base(x.algebra, "s", level - 1)
    return _app_at(level - 1, _app_at(level - 1, s_low, x), y)


def _slice(a, t, fuel):
    """Stage-``t`` guess of ``a``: a base one level down.

    Returns None when the bottom-level application runs out of fuel (only
    possible for level-1 elements; higher slices are pure term formation).
    """
    low = a.level - 1
    num = _stage_numeral(a.base.algebra, low, t)
    if low == 0:
        out = pca.apply(a.base, num, fuel)
        if not isinstance(out, pca.Value):
            return None
        return out.element
    return _app_at(low, a.base, num)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def inject(x):
    """One level up: the guess that answers ``x`` at every stage."""
    base, level, omega = _parts(x)
    k_b = _const_base(base.algebra, "k", level)
    return LimElement(_app_at(level, k_b, base), level + 1, omega)


def coerce(x, level):
    """Raise ``x`` to ``level`` by repeated injection."""
    out = _as_lim(x)
    if out.level > level:
        raise ValueError("cannot lower a level-%d element to level %d" % (out.level, level))
    while out.level < level:
        out = inject(out)
    return out


def as_omega(x):
    """Regard ``x`` as a member of the direct limit, keeping its entry level."""
    base, level, _ = _parts(x)
    return LimElement(base, level, True)


def lim_apply(a, b):
    """Apply one limit element to another, stagewise.

    Both operands must sit at the same level unless at least one is a
    direct-limit member, in which case the lower one is coerced up by
    injection first.  The result never diverges as a term: a stage where the
    underlying guesses misbehave simply shows up as an undefined slice.
    """
    ab, al, ao = _parts(a)
    bb, bl, bo = _parts(b)
    if ab.algebra is not bb.algebra:
        raise ValueError("cannot combine elements of different algebras")
    omega = ao or bo
    if omega:
        target = max(al, bl, 1)
        a2 = coerce(LimElement(ab, al), target)
        b2 = coerce(LimElement(bb, bl), target)
        ab, bb, level = a2.base, b2.base, target
    elif al != bl:
        raise ValueError(
            "level mismatch (%d vs %d); only direct-limit members coerce" % (al, bl)
        )
    elif al == 0:
        raise ValueError("level-0 application is ordinary application; use the algebra")
    else:
        level = al
    return LimElement(_app_at(level, ab, bb), level, omega)


# ---------------------------------------------------------------------------
# Stagewise inspection
# ---------------------------------------------------------------------------

_EQ, _NEQ, _UNK = 0, 1, 2


def _check_params(horizon, window):
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if not 1 <= window <= horizon:
        raise ValueError("window must satisfy 1 <= window <= horizon")


def _point_compare(a, b, t, horizon, window, fuel):
    if a.level == 1:
        ea = _slice(a, t, fuel)
        eb = _slice(b, t, fuel)
        if ea is None or eb is None:
            return _UNK
        return _EQ if ea.payload is eb.payload else _NEQ
    inner_a = LimElement(_slice(a, t, fuel), a.level - 1)
    inner_b = LimElement(_slice(b, t, fuel), b.level - 1)
    verdict = class_eq(inner_a, inner_b, horizon + 2 * window, window, fuel)
    if isinstance(verdict, Equal):
        return _EQ
    if isinstance(verdict, Distinct):
        return _NEQ
    return _UNK


def class_eq(a, b, horizon=64, window=16, fuel=None):
    """Window-certified equality of two limit elements.

    Compares the stagewise guesses over the tail ``[horizon - window,
    horizon)``, recursing one level down for elements above level 1.
    ``Equal`` needs every compared pair defined and identical.  ``Distinct``
    needs a definite disagreement that also occurs in the last half of the
    window, since a disagreement confined to early stages says nothing about
    eventual agreement.  Everything else is ``Unknown``.
    """
    a = _as_lim(a)
    b = _as_lim(b)
    if a.base.algebra is not b.base.algebra:
        raise ValueError("cannot compare elements of different algebras")
    if a.omega or b.omega:
        target = max(a.level, b.level, 1)
        a = coerce(a, target)
        b = coerce(b, target)
    if a.level != b.level:
        raise ValueError("cannot compare elements at different levels")
    if a.level < 1:
        raise ValueError("comparison is defined from level 1 up")
    _check_params(horizon, window)
    if fuel is None:
        fuel = a.base.algebra.fuel_default
    lo = horizon - window
    marks = [(t, _point_compare(a, b, t, horizon, window, fuel)) for t in range(lo, horizon)]
    if all(mark == _EQ for _, mark in marks):
        return Equal((lo, horizon))
    bad = [t for t, mark in marks if mark == _NEQ]
    tail_start = horizon - max(1, window // 2)
    if bad and bad[-1] >= tail_start:
        return Distinct(bad[-1])
    return Unknown()


# Settled evaluations are pure in (element, horizon, window, fuel), and the
# same element is routinely decoded many times (move tables, realizer
# checks), so stage values and limit verdicts are memoized with a crude
# size cap.
_VAL_MEMO = {}
_EVAL_MEMO = {}
_EVAL_MEMO_CAP = 65536


def _remember(memo, key, value):
    if len(memo) >= _EVAL_MEMO_CAP:
        memo.clear()
    memo[key] = value
    return value


def _sample_point(a, t, horizon, window, fuel):
    """The decoded stage-``t`` guess of ``a``, or None.

    Elements above level 1 are decoded by taking each stage's limit one
    level down over a wider horizon: iterated limits settle inner levels
    first, so an inner guess typically needs stages beyond the outer stage
    being sampled.
    """
    if a.level == 1:
        e = _slice(a, t, fuel)
        if e is None:
            return None
        got = pca.decode_numeral(e, fuel)
        return got.value if isinstance(got, pca.Number) else None
    inner = LimElement(_slice(a, t, fuel), a.level - 1)
    return _limit_value(inner, horizon + 2 * window, window, fuel)


def _limit_value(a, horizon, window, fuel):
    """Tail-certified limit value of ``a``, or None if it does not settle.

    Only the last ``window`` stages are sampled; that is all a verdict
    depends on, and it keeps recursive evaluation clear of early stages
    where deep towers have not caught up yet.
    """
    key = (a.base.payload, a.level, horizon, window, fuel)
    hit = _VAL_MEMO.get(key, _VAL_MEMO)
    if hit is not _VAL_MEMO:
        return hit
    value = _sample_point(a, horizon - 1, horizon, window, fuel)
    if value is not None:
        for t in range(horizon - window, horizon - 1):
            if _sample_point(a, t, horizon, window, fuel) != value:
                value = None
                break
    return _remember(_VAL_MEMO, key, value)


def limit_samples(a, horizon=64, window=16, fuel=None):
    """Decoded stagewise guesses of ``a`` for stages ``[0, horizon)``.

    Entries are numerals where a stage produced one and None elsewhere (out
    of fuel, not a numeral, or an unsettled inner level).
    """
    a = _as_lim(a)
    if a.level < 1:
        raise ValueError("limits are taken from level 1 up")
    _check_params(horizon, window)
    if fuel is None:
        fuel = a.base.algebra.fuel_default
    return [_sample_point(a, t, horizon, window, fuel)
            for t in range(horizon)]


def eval_limit(a, horizon=64, window=16, fuel=None):
    """Extract the limit value of ``a``'s guessing sequence, if it settles.

    Returns ``Number(n, certificate)`` when the last ``window`` sampled
    stages all produced ``n``; the certificate is the first stage of that
    final constant run.  Otherwise returns ``Unstable``.  Stages are sampled
    from the horizon backwards only as far as the verdict and certificate
    require; stages below the final constant run are never evaluated.
    """
    _check_params(horizon, window)
    a = _as_lim(a)
    if a.level < 1:
        raise ValueError("limits are taken from level 1 up")
    if fuel is None:
        fuel = a.base.algebra.fuel_default
    key = (a.base.payload, a.level, horizon, window, fuel)
    hit = _EVAL_MEMO.get(key)
    if hit is not None:
        return hit
    n = _limit_value(a, horizon, window, fuel)
    if n is None:
        return _remember(_EVAL_MEMO, key, Unstable())
    i = horizon - window - 1
    while i >= 0 and _sample_point(a, i, horizon, window, fuel) == n:
        i -= 1
    return _remember(_EVAL_MEMO, key, Number(n, i + 1))
