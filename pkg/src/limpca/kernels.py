"""Kernel backend selection.

Imports the compiled extension when it is available and falls back to the
pure-Python twin otherwise.  Setting ``LIMPCA_PURE_PYTHON=1`` in the
environment forces the fallback, which is how the two implementations are
compared in tests and benchmarks.

Everything the rest of the package needs from a kernel backend is
re-exported here; ``BACKEND`` names the one in use.
"""

import os

if os.environ.get("LIMPCA_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "pure"

OutOfFuel = _impl.OutOfFuel
Node = _impl.Node
node = _impl.node
clear_caches = _impl.clear_caches
sk_apply = _impl.sk_apply
sk_numeral = _impl.sk_numeral
nat_apply = _impl.nat_apply
nat_numeral = _impl.nat_numeral
err_value = _impl.err_value
run_code = _impl.run_code
cantor_pair = _impl.cantor_pair
cantor_split = _impl.cantor_split

OP_CONST = _impl.OP_CONST
OP_ARG = _impl.OP_ARG
OP_PRIM = _impl.OP_PRIM
OP_CALL = _impl.OP_CALL
OP_MAX = _impl.OP_MAX
OP_MIN = _impl.OP_MIN
OP_MU = _impl.OP_MU

PR_ADD = _impl.PR_ADD
PR_MUL = _impl.PR_MUL
PR_MONUS = _impl.PR_MONUS
PR_PAIR = _impl.PR_PAIR
PR_FST = _impl.PR_FST
PR_SND = _impl.PR_SND
PR_CHLT = _impl.PR_CHLT
PR_CHEQ = _impl.PR_CHEQ
