"""Brute-force full-index reference computations used as test oracles.

Arrays hold ExactComplex entries with every index spelled out (superscript
axes first, then subscript axes, values 0..3).  Nothing here touches the
canonical-key machinery beyond reading and writing full arrays.
"""

import itertools

import numpy as np

from kmonogenic.exact import ZERO, ExactComplex


def perm_sign(perm):
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def average_axes(arr, axes, signed):
    """(Anti)symmetrize ``arr`` over the listed axes."""
    perms = list(itertools.permutations(range(len(axes))))
    out = np.empty(arr.shape, dtype=object)
    for idx in itertools.product(range(4), repeat=arr.ndim):
        acc = ZERO
        for perm in perms:
            j = list(idx)
            for src, dst in zip(axes, (axes[p] for p in perm)):
                j[src] = idx[dst]
            term = arr[tuple(j)]
            acc = acc + (term if not signed or perm_sign(perm) > 0 else -term)
        out[idx] = acc / len(perms)
    return out


def contract_full(arr, q):
    """sum_C f^{C A..}_{B.. C}: first superscript against last subscript."""
    shape = (4,) * (arr.ndim - 2)
    out = np.empty(shape, dtype=object)
    for idx in itertools.product(range(4), repeat=arr.ndim - 2):
        ups, los = idx[: q - 1], idx[q - 1 :]
        out[idx] = sum((arr[(c,) + ups + los + (c,)] for c in range(4)), ZERO)
    return out


def pairing_full(a, b):
    return sum((x * y.conj() for x, y in zip(a.flat, b.flat)), ZERO)


def delta_full(a, b):
    return ExactComplex(1 if a == b else 0)


def p1_full(arr, k):
    """((k-1)/(k+2)) delta^A_(B1 C(f)_B2..) on a full array with one superscript."""
    c = contract_full(arr, 1)
    raw = np.empty(arr.shape, dtype=object)
    for idx in itertools.product(range(4), repeat=arr.ndim):
        a, b = idx[0], idx[1:]
        raw[idx] = delta_full(a, b[0]) * c[b[1:]] if len(b) else ZERO
    sym = average_axes(raw, list(range(1, arr.ndim)), signed=False)
    return scale_full(sym, ExactComplex(k - 1) / (k + 2))


def p2_full(arr, k):
    """(2(k-2)/k) delta^[A1_(B1 C(f)^A2]_B2..) on a full array with two superscripts."""
    c = contract_full(arr, 2)
    raw = np.empty(arr.shape, dtype=object)
    for idx in itertools.product(range(4), repeat=arr.ndim):
        a1, a2, b = idx[0], idx[1], idx[2:]
        raw[idx] = delta_full(a1, b[0]) * c[(a2,) + b[1:]]
    sym = average_axes(raw, list(range(2, arr.ndim)), signed=False)
    alt = average_axes(sym, [0, 1], signed=True)
    return scale_full(alt, ExactComplex(2 * (k - 2)) / k)


def scale_full(arr, c):
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v * c
    return out


def d_full_linear(fibers, nabla_upper, q):
    """Full-index D_l of sum_j x_j F_j, which is a constant fiber.

    ``fibers[j]`` is the full array of F_j (q superscripts first).  Implements
    sum_{B1} nabla^{B1[A1} F^{A2..]}_{B1 B2..} with nabla^{B1 A1} acting on x_j
    through its coefficient of d/dx_j.
    """
    rank = fibers[0].ndim
    raw = np.empty((4,) * rank, dtype=object)
    for idx in itertools.product(range(4), repeat=rank):
        a1, rest_up, rest_lo = idx[0], idx[1 : q + 1], idx[q + 1 :]
        acc = ZERO
        for b1 in range(4):
            coeffs = nabla_upper[(b1 + 1, a1 + 1)]
            for j, c in enumerate(coeffs):
                if c:
                    acc = acc + c * fibers[j][rest_up + (b1,) + rest_lo]
        raw[idx] = acc
    return average_axes(raw, list(range(q + 1)), signed=True)


def sigma_full(m, arr, q):
    """sum_{B1} M^{B1[A1} F^{A2..]}_{B1 B2..} on a full array with q superscripts."""
    raw = np.empty((4,) * arr.ndim, dtype=object)
    for idx in itertools.product(range(4), repeat=arr.ndim):
        a1, rest_up, rest_lo = idx[0], idx[1 : q + 1], idx[q + 1 :]
        raw[idx] = sum((m[b1][a1] * arr[rest_up + (b1,) + rest_lo] for b1 in range(4)), ZERO)
    return average_axes(raw, list(range(q + 1)), signed=True)


def xi_tilde_full(minv, lifted, k):
    """Xi~^{E2 A1 A2}_{B1..B_{k-1}} = sym_B sum_{E1} Minv_{E1 B1} lift^{E2 A1 A2 E1}_{B2..}."""
    shape = (4,) * (3 + k - 1)
    raw = np.empty(shape, dtype=object)
    for idx in itertools.product(range(4), repeat=len(shape)):
        ups, b = idx[:3], idx[3:]
        raw[idx] = sum((minv[e1][b[0]] * lifted[ups + (e1,) + b[1:]] for e1 in range(4)), ZERO)
    return average_axes(raw, list(range(3, len(shape))), signed=False)
