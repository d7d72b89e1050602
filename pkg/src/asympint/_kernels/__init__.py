"""Hot-loop kernels with a compiled core and a NumPy fallback.

Both implementations expose the same two entry points:

    mul_packed(exps_a, coefs_a, exps_b, coefs_b, order)
    eval_program(ops, args, consts, points)

Each entry point is bound at import time to the implementation that wins
on its workload (benchmarks/bench_eval.py measures both):

  * mul_packed runs on the compiled extension (_fastkern, Cython) when
    its build succeeded; the scalar C accumulation loop beats vectorized
    NumPy several-fold on the small sparse factors the series algebra
    produces.
  * eval_program stays on the NumPy implementation even when the
    extension is present: with few ops over large point batches,
    per-op array vectorization beats the per-point C dispatch loop.

`HAVE_COMPILED` reports whether the extension loaded; `compiled_impl` /
`fallback_impl` are both importable for side-by-side comparison.
"""
from . import _pyfallback as fallback_impl

try:
    from . import _fastkern as compiled_impl
    HAVE_COMPILED = True
except ImportError:
    compiled_impl = None
    HAVE_COMPILED = False

mul_packed = (compiled_impl if HAVE_COMPILED else fallback_impl).mul_packed
eval_program = fallback_impl.eval_program
