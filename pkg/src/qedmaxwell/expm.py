"""Matrix exponential by scaling and squaring with a fixed [13/13] Pade approximant.

Only the degree-13 approximant is used: the matrix is scaled by ``2^-s`` with
``s = max(0, ceil(log2(||A||_1 / THETA_13)))`` so that the scaled 1-norm is at
most ``THETA_13``, the bound for which the [13/13] approximant is accurate to
double precision (Higham 2005, Table 2.3). Fixing the order keeps the
operation count, and therefore the rounding, reproducible.
"""

import math

import numpy as np

THETA_13 = 5.371920351148152

PADE_13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


def one_norm(a):
    return float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0


def scaling_exponent(a) -> int:
    norm = one_norm(a)
    if norm <= THETA_13:
        return 0
    return max(0, int(math.ceil(math.log2(norm / THETA_13))))


def expm(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm expects a square matrix")
    dtype = np.result_type(a.dtype, np.float64)
    a = a.astype(dtype)
    s = scaling_exponent(a)
    a = a / 2.0 ** s
    b = PADE_13
    ident = np.eye(a.shape[0], dtype=dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r
