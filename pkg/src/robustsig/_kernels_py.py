"""Reference kernels in numpy / plain Python.

Mirrors ``_kernels.pyx`` operation for operation so the two backends return
bit-identical arrays. Used when the compiled extension is unavailable.
"""
import math

import numpy as np

KIND_I, KIND_II, KIND_III = 1, 2, 3

# Per-step rounding bound of the sliding update (4 ulps) and the ratio of
# sum of squares to accumulated bound below which a window is recomputed.
ERR_SCALE = 4.0 * 2.220446049250313e-16
GUARD = 1e11


def optimal_paths(eps, sigma_lower, sigma_upper, mu, mu0, c, kind):
    """Threshold-policy paths for every row of ``eps`` (reps x n).

    Returns ``(z, sigma)`` arrays of the same shape.
    """
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    reps, n = eps.shape
    z = np.empty_like(eps)
    sig = np.empty_like(eps)
    xi = np.zeros(reps)
    sqrt_n = math.sqrt(n)
    for i in range(n):
        if i == 0:
            s = np.full(reps, sigma_upper)
        else:
            scaled = xi / sqrt_n
            if kind == KIND_I:
                up = scaled <= c
            elif kind == KIND_II:
                up = scaled >= c
            else:
                up = np.abs(scaled) <= c
            s = np.where(up, sigma_upper, sigma_lower)
        zi = s * eps[:, i] + mu
        z[:, i] = zi
        sig[:, i] = s
        xi = xi + (zi - mu0)
    return z, sig


def _block_var(x, start, m):
    total = 0.0
    for j in range(start, start + m):
        total += x[j]
    mean = total / m
    m2 = 0.0
    for j in range(start, start + m):
        d = x[j] - mean
        m2 += d * d
    return mean, m2


def rolling_block_variances(x, m, refresh):
    """Unbiased variances of all ``n - m + 1`` windows of length ``m``.

    Sliding Welford update with a running bound on its rounding error. A
    window is recomputed exactly when its sum of squares is within
    ``GUARD`` of that bound, and unconditionally every ``refresh`` windows.
    """
    x = [float(v) for v in np.asarray(x, dtype=np.float64)]
    n = len(x)
    L = n - m + 1
    out = np.empty(L)
    mean, m2 = _block_var(x, 0, m)
    err = 0.0
    out[0] = (m2 if m2 > 0.0 else 0.0) / (m - 1)
    for l in range(1, L):
        if l % refresh == 0:
            mean, m2 = _block_var(x, l, m)
            err = 0.0
        else:
            x_old = x[l - 1]
            x_new = x[l + m - 1]
            d = x_new - x_old
            new_mean = mean + d / m
            u = x_new - new_mean
            v = x_old - mean
            m2 = m2 + d * (u + v)
            err = err + ERR_SCALE * (abs(d) * (abs(u) + abs(v) + abs(new_mean)) + abs(m2))
            mean = new_mean
            if m2 < GUARD * err:
                mean, m2 = _block_var(x, l, m)
                err = 0.0
        out[l] = (m2 if m2 > 0.0 else 0.0) / (m - 1)
    return out


def _terminal(n, c, sigma_lower, sigma_upper, kind):
    k = np.arange(-n - 1, n + 2, dtype=np.float64)
    xi = k[:, None] * sigma_upper + k[None, :] * sigma_lower
    scaled = xi / math.sqrt(n)
    if kind == KIND_I:
        hit = scaled > c
    elif kind == KIND_II:
        hit = scaled < c
    else:
        hit = np.abs(scaled) > c
    return hit.astype(np.float64), scaled


def dp_value(n, c, sigma_lower, sigma_upper, kind, policy):
    """Backward induction on the (p, q) lattice of net sigma_upper / sigma_lower
    steps under +-1 noise; returns the value at the origin before step 1.

    ``policy`` False maximises over both actions; True forces the threshold rule.
    """
    v, scaled = _terminal(n, c, sigma_lower, sigma_upper, kind)
    if kind == KIND_I:
        up_rule = scaled[1:-1, 1:-1] <= c
    elif kind == KIND_II:
        up_rule = scaled[1:-1, 1:-1] >= c
    else:
        up_rule = np.abs(scaled[1:-1, 1:-1]) <= c
    for i in range(n, 0, -1):
        # value of choosing sigma_upper / sigma_lower at step i
        a_hi = 0.5 * (v[2:, 1:-1] + v[:-2, 1:-1])
        a_lo = 0.5 * (v[1:-1, 2:] + v[1:-1, :-2])
        if policy:
            if i == 1:
                inner = a_hi
            else:
                inner = np.where(up_rule, a_hi, a_lo)
        else:
            inner = np.maximum(a_hi, a_lo)
        nv = v.copy()
        nv[1:-1, 1:-1] = inner
        v = nv
    return float(v[n + 1, n + 1])


def g_heat_march(u, lam_upper, lam_lower, left, right):
    """Explicit steps of u_t = 0.5 (s_hi^2 (u_xx)^+ - s_lo^2 (u_xx)^-).

    ``lam_*`` are ``0.5 * sigma^2 * dt / dx^2``; ``left``/``right`` hold the
    Dirichlet values after each step.
    """
    u = np.array(u, dtype=np.float64)
    for k in range(len(left)):
        d2 = (u[2:] - 2.0 * u[1:-1]) + u[:-2]
        lam = np.where(d2 >= 0.0, lam_upper, lam_lower)
        u[1:-1] = u[1:-1] + lam * d2
        u[0] = left[k]
        u[-1] = right[k]
    return u
