# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled epoch kernel for the sampled embedding trainers.

Semantics mirror the numpy fallback (`_train_numpy.run_epoch`): one pass over
a shuffled occurrence list in mini-batches, gradients for each batch computed
at the pre-step parameters, one ADAM step per touched row, optional
projection onto the non-negative orthant, per-batch debug checks.  The random
stream comes from the caller's generator via its C interface, so runs are
reproducible for a fixed seed.

Two layout choices keep the inner loop memory-friendly at large vocabularies:
negative contexts are drawn from an alias table (two dependent reads per draw
instead of a binary search over the cumulative distribution), and each row's
vector, gradient accumulator, and ADAM moments live in one contiguous block
so a row touch stays within a single region of memory.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, floor, isfinite, log1p, pow, sqrt
from numpy.random cimport bitgen_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define ROW_PREFETCH(p) __builtin_prefetch((p), 1, 3)
    #else
    #define ROW_PREFETCH(p) ((void) (p))
    #endif
    """
    void ROW_PREFETCH(const void *p) noexcept nogil

# Negative draws are buffered per positive so their rows can start loading
# while later draws are still being made; the buffer length bounds how far
# ahead of use a prefetched line must survive in cache.
DEF NEG_CHUNK = 64

cdef double BETA1 = 0.9
cdef double BETA2 = 0.999
cdef double EPS = 1e-8


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double _log_sigmoid(double x) noexcept nogil:
    if x >= 0:
        return -log1p(exp(-x))
    return x - log1p(exp(x))


def _build_alias(cum):
    """Build alias-method tables for the categorical given its CDF."""
    probs = np.diff(np.asarray(cum), prepend=0.0)
    size = probs.shape[0]
    scaled = probs * size
    keep = np.empty(size, dtype=np.float64)
    alias = np.arange(size, dtype=np.int64)
    small = [i for i in range(size) if scaled[i] < 1.0]
    large = [i for i in range(size) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        keep[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        if scaled[l] >= 1.0:
            large.append(l)
        else:
            small.append(l)
    for i in large:
        keep[i] = 1.0
    for i in small:
        keep[i] = 1.0
    return keep, alias


cdef inline long _draw_alias(bitgen_t *gen, double[::1] keep,
                             long[::1] alias) noexcept nogil:
    # One uniform supplies both the bucket and the accept test.
    cdef long size = keep.shape[0]
    cdef double u = gen.next_double(gen.state) * size
    cdef long k = <long> u
    if k >= size:
        k = size - 1
    if u - <double> k < keep[k]:
        return k
    return alias[k]


def run_epoch(double[:, ::1] word_vecs, double[:, ::1] ctx_vecs,
              double[:, ::1] m_w, double[:, ::1] v_w,
              double[:, ::1] m_c, double[:, ::1] v_c,
              int[::1] occ_w, int[::1] occ_c, long[::1] order,
              double[::1] neg_rate, double[::1] cum_probs,
              double lr, long batch_size, long step, object rng,
              int project, int debug):
    """Process one epoch; returns (step, sum of positive log-sigmoids, err)."""
    cdef long size = word_vecs.shape[0]
    cdef long dim = word_vecs.shape[1]
    cdef long n = order.shape[0]
    cdef long span = 4 * dim

    keep_arr, alias_arr = _build_alias(cum_probs)
    cdef double[::1] keep = keep_arr
    cdef long[::1] alias = alias_arr

    # Row layout: [vector | batch gradient | ADAM m | ADAM v].
    state_w_arr = np.empty((size, span), dtype=np.float64)
    state_c_arr = np.empty((size, span), dtype=np.float64)
    state_w_arr[:, 0:dim] = np.asarray(word_vecs)
    state_w_arr[:, dim : 2 * dim] = 0.0
    state_w_arr[:, 2 * dim : 3 * dim] = np.asarray(m_w)
    state_w_arr[:, 3 * dim : 4 * dim] = np.asarray(v_w)
    state_c_arr[:, 0:dim] = np.asarray(ctx_vecs)
    state_c_arr[:, dim : 2 * dim] = 0.0
    state_c_arr[:, 2 * dim : 3 * dim] = np.asarray(m_c)
    state_c_arr[:, 3 * dim : 4 * dim] = np.asarray(v_c)

    touched_w_arr = np.empty(size, dtype=np.int64)
    touched_c_arr = np.empty(size, dtype=np.int64)
    seen_w_arr = np.zeros(size, dtype=np.uint8)
    seen_c_arr = np.zeros(size, dtype=np.uint8)

    cdef double[:, ::1] sw = state_w_arr
    cdef double[:, ::1] sc = state_c_arr
    cdef long[::1] touched_w = touched_w_arr
    cdef long[::1] touched_c = touched_c_arr
    cdef unsigned char[::1] seen_w = seen_w_arr
    cdef unsigned char[::1] seen_c = seen_c_arr

    cdef bitgen_t *gen = <bitgen_t *> PyCapsule_GetPointer(
        rng.bit_generator.capsule, "BitGenerator"
    )

    cdef long start = 0, stop, ii, o, w, c, cn, i, j, r, n_draws
    cdef long ntw, ntc, drawn, chunk
    cdef double x, g, rate, base, u, bc1, bc2, gj, val
    cdef double logsig_sum = 0.0
    cdef int err = 0
    cdef long neg_buf[NEG_CHUNK]

    with nogil:
        while start < n and err == 0:
            stop = start + batch_size
            if stop > n:
                stop = n
            ntw = 0
            ntc = 0
            for ii in range(start, stop):
                o = order[ii]
                w = occ_w[o]
                c = occ_c[o]
                if ii + 1 < stop:
                    o = order[ii + 1]
                    for j in range(0, 2 * dim, 8):
                        ROW_PREFETCH(&sw[occ_w[o], j])
                        ROW_PREFETCH(&sc[occ_c[o], j])
                x = 0.0
                for j in range(dim):
                    x += sw[w, j] * sc[c, j]
                logsig_sum += _log_sigmoid(x)
                g = _sigmoid(-x)
                if seen_w[w] == 0:
                    seen_w[w] = 1
                    touched_w[ntw] = w
                    ntw += 1
                if seen_c[c] == 0:
                    seen_c[c] = 1
                    touched_c[ntc] = c
                    ntc += 1
                for j in range(dim):
                    sw[w, dim + j] += g * sc[c, j]
                    sc[c, dim + j] += g * sw[w, j]
                rate = neg_rate[w]
                base = floor(rate)
                n_draws = <long> base
                u = gen.next_double(gen.state)
                if u < rate - base:
                    n_draws += 1
                drawn = 0
                while drawn < n_draws:
                    chunk = n_draws - drawn
                    if chunk > NEG_CHUNK:
                        chunk = NEG_CHUNK
                    for i in range(chunk):
                        cn = _draw_alias(gen, keep, alias)
                        neg_buf[i] = cn
                        for j in range(0, 2 * dim, 8):
                            ROW_PREFETCH(&sc[cn, j])
                    for i in range(chunk):
                        cn = neg_buf[i]
                        x = 0.0
                        for j in range(dim):
                            x += sw[w, j] * sc[cn, j]
                        g = -_sigmoid(x)
                        if seen_c[cn] == 0:
                            seen_c[cn] = 1
                            touched_c[ntc] = cn
                            ntc += 1
                        for j in range(dim):
                            sw[w, dim + j] += g * sc[cn, j]
                            sc[cn, dim + j] += g * sw[w, j]
                    drawn += chunk
            step += 1
            bc1 = 1.0 - pow(BETA1, <double> step)
            bc2 = 1.0 - pow(BETA2, <double> step)
            for i in range(ntw):
                r = touched_w[i]
                if i + 1 < ntw:
                    for j in range(0, span, 8):
                        ROW_PREFETCH(&sw[touched_w[i + 1], j])
                for j in range(dim):
                    gj = sw[r, dim + j]
                    sw[r, 2 * dim + j] = BETA1 * sw[r, 2 * dim + j] + (1.0 - BETA1) * gj
                    sw[r, 3 * dim + j] = (
                        BETA2 * sw[r, 3 * dim + j] + (1.0 - BETA2) * gj * gj
                    )
                    val = sw[r, j] + lr * (sw[r, 2 * dim + j] / bc1) / (
                        sqrt(sw[r, 3 * dim + j] / bc2) + EPS
                    )
                    if project and val < 0.0:
                        val = 0.0
                    sw[r, j] = val
                    sw[r, dim + j] = 0.0
                seen_w[r] = 0
                if debug:
                    for j in range(dim):
                        if not isfinite(sw[r, j]):
                            err = 1
                        elif project and sw[r, j] < 0.0:
                            err = 2
            for i in range(ntc):
                r = touched_c[i]
                if i + 1 < ntc:
                    for j in range(0, span, 8):
                        ROW_PREFETCH(&sc[touched_c[i + 1], j])
                for j in range(dim):
                    gj = sc[r, dim + j]
                    sc[r, 2 * dim + j] = BETA1 * sc[r, 2 * dim + j] + (1.0 - BETA1) * gj
                    sc[r, 3 * dim + j] = (
                        BETA2 * sc[r, 3 * dim + j] + (1.0 - BETA2) * gj * gj
                    )
                    val = sc[r, j] + lr * (sc[r, 2 * dim + j] / bc1) / (
                        sqrt(sc[r, 3 * dim + j] / bc2) + EPS
                    )
                    if project and val < 0.0:
                        val = 0.0
                    sc[r, j] = val
                    sc[r, dim + j] = 0.0
                seen_c[r] = 0
                if debug:
                    for j in range(dim):
                        if not isfinite(sc[r, j]):
                            err = 1
                        elif project and sc[r, j] < 0.0:
                            err = 2
            start = stop
    np.asarray(word_vecs)[:] = state_w_arr[:, 0:dim]
    np.asarray(m_w)[:] = state_w_arr[:, 2 * dim : 3 * dim]
    np.asarray(v_w)[:] = state_w_arr[:, 3 * dim : 4 * dim]
    np.asarray(ctx_vecs)[:] = state_c_arr[:, 0:dim]
    np.asarray(m_c)[:] = state_c_arr[:, 2 * dim : 3 * dim]
    np.asarray(v_c)[:] = state_c_arr[:, 3 * dim : 4 * dim]
    return step, logsig_sum, err
