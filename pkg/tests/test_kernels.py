"""Backend parity: the compiled kernels and the pure-Python twin must be
indistinguishable on a shared workload."""

import importlib.util
import json
import os
import subprocess
import sys

import pytest

HAVE_COMPILED = importlib.util.find_spec("limpca._kernels") is not None

# The workload exercises both machines, the numeral codec, the program
# interpreter, and divergence bookkeeping, then prints a digest.  It runs
# in a subprocess so the backend can be chosen via the environment.
WORKLOAD = r"""
import json, random
from limpca import kernels as k
from limpca.pca import (apply, apply_chain, decode_numeral, eon_constants,
                        eval_term, numeral, parse_sk_term, sk_algebra,
                        native_algebra, Value, Diverged, Number)
from limpca.dsl import BasePrim, BoundedMax, Comp, Const, Mu, Proj, compile_dsl

out = {"backend": k.BACKEND, "trace": []}
t = out["trace"].append

SK = sk_algebra(); NAT = native_algebra()
for n in (0, 1, 2, 5, 17):
    t(("dec", n, str(decode_numeral(numeral(SK, n)))))

rng = random.Random(99)
pool_sk = [eval_term(SK, parse_sk_term(s)).element
           for s in ("S", "K", "S K", "K S", "S (K S) K", "2", "3", "#a")]
pool_nat = [eval_term(NAT, parse_sk_term(s)).element
            for s in ("S", "K", "S K", "2")] + [
    eon_constants(NAT).suc, eon_constants(NAT).p, eon_constants(NAT).d]
for pool, alg in ((pool_sk, SK), (pool_nat, NAT)):
    for i in range(200):
        a, b = rng.choice(pool), rng.choice(pool)
        r = apply(a, b, fuel=3000)
        if isinstance(r, Value):
            dec = decode_numeral(r.element, fuel=3000)
            t((alg.kind, i, str(dec)))
        else:
            t((alg.kind, i, "diverged"))

prog = BoundedMax(Comp(BasePrim("mul"), (Proj(0, 2), Proj(1, 2))))
for alg in (NAT, SK):
    e = compile_dsl(prog, alg)
    row = []
    for l in range(5):
        r = apply_chain(e, [numeral(alg, l), numeral(alg, 3)], fuel=10**6)
        row.append(str(decode_numeral(r.element, fuel=10**6)) if isinstance(r, Value) else "div")
    t((alg.kind, "sweep", row))

stuck = compile_dsl(Mu(Comp(Const(1), (Proj(0, 2),))), NAT)
t(("mu", str(apply(stuck, numeral(NAT, 0), fuel=2000))))

print(json.dumps(out, sort_keys=True))
"""


def _run(force_pure):
    env = dict(os.environ)
    if force_pure:
        env["LIMPCA_PURE_PYTHON"] = "1"
    else:
        env.pop("LIMPCA_PURE_PYTHON", None)
    proc = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")
def test_backends_agree_on_shared_workload():
    compiled = _run(force_pure=False)
    pure = _run(force_pure=True)
    assert compiled["backend"] == "compiled"
    assert pure["backend"] == "pure"
    assert compiled["trace"] == pure["trace"]


def test_forced_fallback_selects_pure_backend():
    report = _run(force_pure=True)
    assert report["backend"] == "pure"
