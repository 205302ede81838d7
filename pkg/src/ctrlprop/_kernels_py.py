"""Pure numpy versions of the dense kernels, used when the extension is absent."""

import numpy as np


def apply_local(m, g, left, right):
    gd = g.shape[0]
    cols = m.shape[1]
    view = m.reshape(left, gd, right * cols)
    return np.einsum("ij,ljk->lik", g, view).reshape(m.shape[0], cols)


def kron(a, b):
    return np.kron(a, b)


def controlled(u):
    n = u.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n] = np.eye(n)
    out[n:, n:] = u
    return out


def max_abs_diff(a, b):
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))
