"""Side-by-side timing of the compiled kernel and the NumPy fallback.

Times the two hot entry points on representative workloads:

  * eval_program: a 2-D phase expression evaluated over growing point
    batches (the quadrature inner loop),
  * mul_packed: truncated products of packed sparse series of growing
    term count (the Morse construction inner loop).

Run as:  python3 benchmarks/bench_eval.py [--repeats R]
"""

import argparse
import statistics
import time

import numpy as np

from asympint._kernels import HAVE_COMPILED, compiled_impl, fallback_impl
from asympint.parser import compile_program, parse

_PHASE = "x^2 + y^2 + 0.3*x^3 + x^2*y^2 + exp(-0.5*(x^2 + y^2))"


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _row(label, fallback_s, compiled_s):
    if compiled_s is None:
        print(f"  {label:<28s} {fallback_s * 1e3:10.3f} ms          -        -")
    else:
        speedup = fallback_s / compiled_s if compiled_s > 0 else float("inf")
        print(f"  {label:<28s} {fallback_s * 1e3:10.3f} ms "
              f"{compiled_s * 1e3:10.3f} ms {speedup:7.1f}x")


def bench_eval_program(repeats):
    prog = compile_program(parse(_PHASE, 2, ("x", "y")), 2)
    rng = np.random.default_rng(0)
    print("eval_program (2-D phase, complex batches)")
    print(f"  {'batch size':<28s} {'fallback':>13s} {'compiled':>13s} "
          f"{'speedup':>8s}")
    for n in (256, 4096, 65536):
        pts = (rng.standard_normal((n, 2))
               + 0.2j * rng.standard_normal((n, 2))).astype(np.complex128)
        f = _time(lambda: fallback_impl.eval_program(
            prog.ops, prog.args, prog.consts, pts), repeats)
        c = None
        if HAVE_COMPILED:
            c = _time(lambda: compiled_impl.eval_program(
                prog.ops, prog.args, prog.consts, pts), repeats)
            a = np.asarray(fallback_impl.eval_program(
                prog.ops, prog.args, prog.consts, pts))
            b = np.asarray(compiled_impl.eval_program(
                prog.ops, prog.args, prog.consts, pts))
            if not np.allclose(a, b, rtol=1e-12, atol=1e-12):
                raise RuntimeError("kernel outputs disagree")
        _row(f"n = {n}", f, c)


def bench_mul_packed(repeats):
    rng = np.random.default_rng(1)
    print("mul_packed (2-D packed series product, order 12)")
    print(f"  {'terms per factor':<28s} {'fallback':>13s} {'compiled':>13s} "
          f"{'speedup':>8s}")
    order = 12
    for count in (50, 200, 800):
        exps = np.unique(
            rng.integers(0, order + 1, size=(count, 2)).astype(np.int64),
            axis=0)
        coefs = (rng.standard_normal(len(exps))
                 + 1j * rng.standard_normal(len(exps))).astype(np.complex128)
        f = _time(lambda: fallback_impl.mul_packed(
            exps, coefs, exps, coefs, order), repeats)
        c = None
        if HAVE_COMPILED:
            c = _time(lambda: compiled_impl.mul_packed(
                exps, coefs, exps, coefs, order), repeats)
        _row(f"K = {len(exps)}", f, c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=9,
                    help="timing repeats per cell (median is reported)")
    args = ap.parse_args()
    if HAVE_COMPILED:
        print("compiled extension: active")
    else:
        print("compiled extension: NOT built, timing the fallback only")
    print()
    bench_eval_program(args.repeats)
    print()
    bench_mul_packed(args.repeats)


if __name__ == "__main__":
    main()
