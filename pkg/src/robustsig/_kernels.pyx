# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same arithmetic, in the same order, as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double ERR_SCALE = 4.0 * 2.220446049250313e-16
cdef double GUARD = 1e11


def optimal_paths(eps, double sigma_lower, double sigma_upper, double mu,
                  double mu0, double c, int kind):
    cdef double[:, ::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t reps = e.shape[0], n = e.shape[1]
    z_arr = np.empty((reps, n))
    sig_arr = np.empty((reps, n))
    cdef double[:, ::1] z = z_arr
    cdef double[:, ::1] sig = sig_arr
    cdef double sqrt_n = sqrt(<double>n)
    cdef double xi, s, zi, scaled
    cdef Py_ssize_t r, i
    cdef bint up
    for r in range(reps):
        xi = 0.0
        for i in range(n):
            if i == 0:
                s = sigma_upper
            else:
                scaled = xi / sqrt_n
                if kind == 1:
                    up = scaled <= c
                elif kind == 2:
                    up = scaled >= c
                else:
                    up = fabs(scaled) <= c
                s = sigma_upper if up else sigma_lower
            zi = s * e[r, i] + mu
            z[r, i] = zi
            sig[r, i] = s
            xi = xi + (zi - mu0)
    return z_arr, sig_arr


cdef inline void _block_var(double[::1] x, Py_ssize_t start, Py_ssize_t m,
                            double* mean, double* m2):
    cdef double total = 0.0, mu, acc = 0.0, d
    cdef Py_ssize_t j
    for j in range(start, start + m):
        total += x[j]
    mu = total / m
    for j in range(start, start + m):
        d = x[j] - mu
        acc += d * d
    mean[0] = mu
    m2[0] = acc


def rolling_block_variances(x, Py_ssize_t m, Py_ssize_t refresh):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], L = n - m + 1, l
    out_arr = np.empty(L)
    cdef double[::1] out = out_arr
    cdef double mean, m2, x_old, x_new, new_mean, d, u, v
    cdef double err = 0.0
    _block_var(xv, 0, m, &mean, &m2)
    out[0] = (m2 if m2 > 0.0 else 0.0) / (m - 1)
    for l in range(1, L):
        if l % refresh == 0:
            _block_var(xv, l, m, &mean, &m2)
            err = 0.0
        else:
            x_old = xv[l - 1]
            x_new = xv[l + m - 1]
            d = x_new - x_old
            new_mean = mean + d / m
            u = x_new - new_mean
            v = x_old - mean
            m2 = m2 + d * (u + v)
            err = err + ERR_SCALE * (fabs(d) * (fabs(u) + fabs(v) + fabs(new_mean)) + fabs(m2))
            mean = new_mean
            if m2 < GUARD * err:
                _block_var(xv, l, m, &mean, &m2)
                err = 0.0
        out[l] = (m2 if m2 > 0.0 else 0.0) / (m - 1)
    return out_arr


def dp_value(int n, double c, double sigma_lower, double sigma_upper,
             int kind, bint policy):
    cdef Py_ssize_t size = 2 * n + 3, a, b, i
    cdef double sqrt_n = sqrt(<double>n)
    cur_arr = np.empty((size, size))
    nxt_arr = np.empty((size, size))
    up_arr = np.empty((size, size), dtype=np.uint8)
    cdef double[:, ::1] cur = cur_arr
    cdef double[:, ::1] nxt = nxt_arr
    cdef unsigned char[:, ::1] up = up_arr
    cdef double[:, ::1] tmp
    cdef double scaled, a_hi, a_lo
    for a in range(size):
        for b in range(size):
            scaled = ((a - n - 1) * sigma_upper + (b - n - 1) * sigma_lower) / sqrt_n
            if kind == 1:
                cur[a, b] = 1.0 if scaled > c else 0.0
                up[a, b] = scaled <= c
            elif kind == 2:
                cur[a, b] = 1.0 if scaled < c else 0.0
                up[a, b] = scaled >= c
            else:
                cur[a, b] = 1.0 if fabs(scaled) > c else 0.0
                up[a, b] = fabs(scaled) <= c
    nxt[:, :] = cur
    for i in range(n, 0, -1):
        for a in range(1, size - 1):
            for b in range(1, size - 1):
                a_hi = 0.5 * (cur[a + 1, b] + cur[a - 1, b])
                a_lo = 0.5 * (cur[a, b + 1] + cur[a, b - 1])
                if policy:
                    if i == 1 or up[a, b]:
                        nxt[a, b] = a_hi
                    else:
                        nxt[a, b] = a_lo
                else:
                    nxt[a, b] = a_hi if a_hi >= a_lo else a_lo
        tmp = cur
        cur = nxt
        nxt = tmp
    return cur[n + 1, n + 1]


def g_heat_march(u0, double lam_upper, double lam_lower, left, right):
    cur_arr = np.array(u0, dtype=np.float64)
    nxt_arr = cur_arr.copy()
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr
    cdef double[::1] lv = np.ascontiguousarray(left, dtype=np.float64)
    cdef double[::1] rv = np.ascontiguousarray(right, dtype=np.float64)
    cdef double[::1] tmp
    cdef Py_ssize_t N = cur.shape[0], steps = lv.shape[0], k, j
    cdef double d2, lam
    for k in range(steps):
        for j in range(1, N - 1):
            d2 = (cur[j + 1] - 2.0 * cur[j]) + cur[j - 1]
            lam = lam_upper if d2 >= 0.0 else lam_lower
            nxt[j] = cur[j] + lam * d2
        nxt[0] = lv[k]
        nxt[N - 1] = rv[k]
        tmp = cur
        cur = nxt
        nxt = tmp
    return np.asarray(cur).copy()
