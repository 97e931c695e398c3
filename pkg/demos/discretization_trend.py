"""How fast grid exponential vectors approach the continuum Gram matrix.

The grid value Π(1 + δ f̄_c g_c) differs from exp(∫ f̄ g) by O(δ), so the
error should halve each time the level goes up by one.
"""
import numpy as np

from prodsys import ccr


def f(x):
    return 1.0 + x


def g(x):
    return np.cos(2.0 * x)


prev = None
for L in range(2, 8):
    err = ccr.exp_gram_error(f, g, L)
    ratio = "" if prev is None else f"  ratio {prev / err:.3f}"
    print(f"L={L}  δ=1/{1 << L:<4d} error {err:.3e}{ratio}")
    prev = err
