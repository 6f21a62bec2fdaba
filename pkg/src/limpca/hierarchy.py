"""Arithmetical-hierarchy classification and axiom-scheme instances.

Classification assigns three coordinates to a formula:

  * degree — the maximum number of nested quantifiers with alternating
    signs, where an existential occurrence carries the sign of its own
    subformula position, a universal occurrence the opposite, and
    quantifiers sitting inside decidable (bounded-quantifier-only)
    subformulas carry no sign at all;
  * prenex — Sigma(k) / Pi(k) when the formula is a strictly alternating
    prefix of k unbounded quantifiers over a bounded-quantifier matrix
    (Sigma(0) for the quantifier-free-modulo-bounds case), else NotPrenex;
  * eup — E(d) when every outermost signed quantifier is positive, U(d)
    when every one is negative, else P(d+1); propositional combinations of
    degree-d formulas land in P(d+1).

scheme_instance builds instances of the semi-classical axiom schemes (law
of excluded middle, double-negation elimination, and their relatives)
closed over designated variables: the Sigma-side closure quantifies
n1..nk, the Pi-side closure m1..mk, and scheme parameters stay free except
where the scheme itself universally closes over them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import (
    And, Eq, Exists, Forall, Formula, Imp, Not, Or, Var, free_vars,
    substitute,
)

SCHEMES = (
    "LEM", "LEMPRIME", "DNE", "PLEM", "PDNE", "DLEM", "FPDLEM", "IP", "SE",
    "SDNEPRIME",
)


@dataclass(frozen=True)
class Prenex:
    kind: str  # "Sigma" | "Pi" | "NotPrenex"
    k: Optional[int] = None

    def __str__(self):
        if self.kind == "NotPrenex":
            return "NotPrenex"
        return "%s(%d)" % (self.kind, self.k)


@dataclass(frozen=True)
class Eup:
    kind: str  # "E" | "U" | "P"
    k: int

    def __str__(self):
        return "%s(%d)" % (self.kind, self.k)

    @property
    def index(self) -> int:
        return self.k


@dataclass(frozen=True)
class HierarchyClass:
    degree: int
    prenex: Prenex
    eup: Eup

    def __str__(self):
        return "degree %d, %s, %s" % (self.degree, self.prenex, self.eup)


NOT_PRENEX = Prenex("NotPrenex")


def is_sigma0(f: Formula) -> bool:
    """True when every quantifier in f is bounded."""
    if isinstance(f, Eq):
        return True
    if isinstance(f, Not):
        return is_sigma0(f.body)
    if isinstance(f, (And, Or, Imp)):
        return is_sigma0(f.lhs) and is_sigma0(f.rhs)
    if isinstance(f, (Forall, Exists)):
        return f.bound is not None and is_sigma0(f.body)
    raise TypeError("not a formula: %r" % (f,))


def _chains(f: Formula, pol: int):
    """(longest alternating signed-quantifier chain starting positive,
    same starting negative) among nested quantifiers of f at polarity pol."""
    if isinstance(f, Eq):
        return 0, 0
    if isinstance(f, Not):
        return _chains(f.body, -pol)
    if isinstance(f, (And, Or)):
        le, lu = _chains(f.lhs, pol)
        re, ru = _chains(f.rhs, pol)
        return max(le, re), max(lu, ru)
    if isinstance(f, Imp):
        le, lu = _chains(f.lhs, -pol)
        re, ru = _chains(f.rhs, pol)
        return max(le, re), max(lu, ru)
    if isinstance(f, (Forall, Exists)):
        if f.bound is not None and is_sigma0(f):
            return 0, 0  # inside a decidable subformula: unsigned
        e, u = _chains(f.body, pol)
        sign = pol if isinstance(f, Exists) else -pol
        if sign > 0:
            return max(e, 1 + u), u
        return e, max(u, 1 + e)
    raise TypeError("not a formula: %r" % (f,))


def _outer_signs(f: Formula, pol: int, out: list):
    """Signs of the outermost signed quantifier occurrences, left to right."""
    if isinstance(f, Eq):
        return
    if isinstance(f, Not):
        _outer_signs(f.body, -pol, out)
    elif isinstance(f, (And, Or)):
        _outer_signs(f.lhs, pol, out)
        _outer_signs(f.rhs, pol, out)
    elif isinstance(f, Imp):
        _outer_signs(f.lhs, -pol, out)
        _outer_signs(f.rhs, pol, out)
    elif isinstance(f, (Forall, Exists)):
        if f.bound is not None and is_sigma0(f):
            return
        out.append(pol if isinstance(f, Exists) else -pol)
    else:
        raise TypeError("not a formula: %r" % (f,))


def _prenex_of(f: Formula) -> Prenex:
    kinds = []
    g = f
    while isinstance(g, (Forall, Exists)) and g.bound is None:
        kinds.append("exists" if isinstance(g, Exists) else "forall")
        g = g.body
    if not is_sigma0(g):
        return NOT_PRENEX
    if not kinds:
        return Prenex("Sigma", 0)
    for a, b in zip(kinds, kinds[1:]):
        if a == b:
            return NOT_PRENEX
    return Prenex("Sigma" if kinds[0] == "exists" else "Pi", len(kinds))


def classify(f: Formula) -> HierarchyClass:
    e, u = _chains(f, 1)
    degree = max(e, u)
    signs: list = []
    _outer_signs(f, 1, signs)
    if all(s > 0 for s in signs):
        eup = Eup("E", degree)
    elif all(s < 0 for s in signs):
        eup = Eup("U", degree)
    else:
        eup = Eup("P", degree + 1)
    return HierarchyClass(degree, _prenex_of(f), eup)


# ---------------------------------------------------------------------------
# closures and scheme instances


def sigma_closure(matrix: Formula, names) -> Formula:
    """Alternating quantifier closure starting with exists: the i-th name
    (1-based) gets exists when i is odd, forall when even."""
    out = matrix
    for i in range(len(names), 0, -1):
        cls = Exists if i % 2 == 1 else Forall
        out = cls(names[i - 1], None, out)
    return out


def pi_closure(matrix: Formula, names) -> Formula:
    out = matrix
    for i in range(len(names), 0, -1):
        cls = Forall if i % 2 == 1 else Exists
        out = cls(names[i - 1], None, out)
    return out


def _nvars(k):
    return ["n%d" % i for i in range(1, k + 1)]


def _mvars(k):
    return ["m%d" % i for i in range(1, k + 1)]


def _rename_family(matrix: Formula, src, dst) -> Formula:
    out = matrix
    for a, b in zip(src, dst):
        out = substitute(out, a, Var(b))
    return out


def _require_sigma0(name, matrix):
    if matrix is None:
        raise ValueError("scheme requires matrix %s" % name)
    if not is_sigma0(matrix):
        raise ValueError(
            "matrix %s must contain only bounded quantifiers" % name)


def scheme_instance(scheme: str, k: int,
                    matrixP: Formula,
                    matrixR: Optional[Formula] = None,
                    params=()) -> Formula:
    """An instance of the named semi-classical scheme at level k.

    matrixP supplies the Sigma-side matrix (designated variables n1..nk),
    except for PLEM/PDNE/SDNEPRIME where it is closed over m1..mk.  DLEM
    and FPDLEM additionally take matrixR as the Pi-side matrix (variables
    m1..mk), and IP takes matrixR as the conclusion body (variable m1).
    Parameters stay free except under SDNEPRIME, which universally closes
    over them.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if scheme not in SCHEMES:
        raise ValueError("unknown scheme %r" % scheme)
    _require_sigma0("matrixP", matrixP)
    nv, mv = _nvars(k), _mvars(k)

    if scheme == "LEM":
        a = sigma_closure(matrixP, nv)
        return Or(a, Not(a))
    if scheme == "PLEM":
        a = pi_closure(matrixP, mv)
        return Or(a, Not(a))
    if scheme == "DNE":
        a = sigma_closure(matrixP, nv)
        return Imp(Not(Not(a)), a)
    if scheme == "PDNE":
        a = pi_closure(matrixP, mv)
        return Imp(Not(Not(a)), a)
    if scheme == "LEMPRIME":
        from .transform import dual
        left = sigma_closure(matrixP, nv)
        mirrored = _rename_family(matrixP, nv, mv)
        right = pi_closure(dual(mirrored), mv)
        return Or(left, right)
    if scheme == "DLEM" or scheme == "FPDLEM":
        _require_sigma0("matrixR", matrixR)
        a = pi_closure(matrixR, mv)
        b = sigma_closure(matrixP, nv)
        iff = And(Imp(a, b), Imp(b, a))
        if scheme == "DLEM":
            return Imp(iff, Or(a, Not(a)))
        from .transform import dual
        return Imp(iff, Or(b, dual(a)))
    if scheme == "IP":
        _require_sigma0("matrixR", matrixR)
        a = sigma_closure(matrixP, nv)
        if "m1" in free_vars(a):
            raise ValueError("m1 must not be free in the premise matrix")
        return Imp(Imp(a, Exists("m1", None, matrixR)),
                   Exists("m1", None, Imp(a, matrixR)))
    if scheme == "SE":
        mirrored = Not(_rename_family(matrixP, nv, mv))
        body = Or(matrixP, mirrored)
        if k == 0:
            return body
        # exists n1, then pairs (Q m_i, Q n_{i+1}) sharing the Pi-side
        # kind of position i, then the lone Q m_k
        prefix = [("exists", "n1")]
        for i in range(1, k):
            kind = "forall" if i % 2 == 1 else "exists"
            prefix.append((kind, "m%d" % i))
            prefix.append((kind, "n%d" % (i + 1)))
        prefix.append(("forall" if k % 2 == 1 else "exists", "m%d" % k))
        out = body
        for kind, var in reversed(prefix):
            cls = Exists if kind == "exists" else Forall
            out = cls(var, None, out)
        return out
    # SDNEPRIME
    a = sigma_closure(matrixP, mv)
    out = Imp(Not(Not(a)), a)
    for p in reversed(tuple(params)):
        out = Forall(p, None, out)
    return out
