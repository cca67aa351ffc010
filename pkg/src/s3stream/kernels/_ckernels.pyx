# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels mirroring ``_pykernels`` draw for draw."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

cdef enum:
    ZCAP = 192
    CHAIN_CAP = 4096


cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil


cdef inline int flog2(uint64_t x) nogil:
    return 63 - __builtin_clzll(x)


# -- SplitMix64, identical to core.SeededSource -------------------------

cdef struct SM:
    uint64_t state


cdef inline uint64_t sm_next(SM* s) nogil:
    cdef uint64_t z
    s.state = s.state + <uint64_t>0x9E3779B97F4A7C15ULL
    z = s.state
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t sm_uniform(SM* s, uint64_t m) nogil:
    cdef uint64_t threshold, r
    if m == 1:
        return 0
    threshold = (<uint64_t>0 - m) % m
    while True:
        r = sm_next(s)
        if r >= threshold:
            return r % m


cdef inline bint sm_bernoulli(SM* s, uint64_t num, uint64_t den) nogil:
    if num == 0:
        return 0
    if num == den:
        return 1
    return sm_uniform(s, den) < num


cdef list _trial_seeds(uint64_t seed, Py_ssize_t trials):
    cdef SM master
    master.state = seed
    return [sm_next(&master) for _ in range(trials)]


cdef inline uint64_t _seed64(object seed):
    return <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)


# -- sequence samplers ---------------------------------------------------

cdef class _Seq:
    cdef int64_t n, k, N, seen, alen, plen
    cdef bint wor, has_active, has_partial
    cdef int64_t* act
    cdef int64_t* part
    cdef int64_t* pool

    def __cinit__(self, int64_t n, int64_t k, bint wor):
        self.n = n
        self.k = k
        self.wor = wor
        self.act = <int64_t*>malloc(k * sizeof(int64_t))
        self.part = <int64_t*>malloc(k * sizeof(int64_t))
        self.pool = <int64_t*>malloc(k * sizeof(int64_t))
        if not self.act or not self.part or not self.pool:
            raise MemoryError()
        self.reset()

    def __dealloc__(self):
        free(self.act)
        free(self.part)
        free(self.pool)

    cdef void reset(self):
        self.N = 0
        self.seen = 0
        self.alen = 0
        self.plen = 0
        self.has_active = 0
        self.has_partial = 0

    cdef void observe(self, int64_t i, SM* rng):
        cdef int64_t j
        if i % self.n == 0:
            self.has_partial = 1
            self.seen = 0
            self.plen = 0
        self.seen += 1
        if self.wor:
            if self.plen < self.k:
                self.part[self.plen] = i
                self.plen += 1
            elif sm_bernoulli(rng, self.k, self.seen):
                self.part[sm_uniform(rng, self.k)] = i
        else:
            # k single-slot reservoirs
            for j in range(self.k):
                if self.seen == 1:
                    self.part[j] = i
                elif sm_bernoulli(rng, 1, self.seen):
                    self.part[j] = i
            self.plen = self.k
        self.N = i + 1
        if self.N % self.n == 0:
            for j in range(self.plen):
                self.act[j] = self.part[j]
            self.alen = self.plen
            self.has_active = 1
            self.has_partial = 0

    cdef int64_t stored(self):
        return self.alen * self.has_active + self.plen * self.has_partial

    cdef int64_t query(self, int64_t* out, SM* rng):
        """Write the sample into ``out``; return how many indices were written."""
        cdef int64_t start = self.N - self.n
        cdef int64_t j, m, r, tmp, expired
        if start < 0:
            start = 0
        if not self.wor:
            for j in range(self.k):
                if self.has_active and (self.act[j] >= start or not self.has_partial):
                    out[j] = self.act[j]
                else:
                    out[j] = self.part[j]
            return self.k
        m = 0
        if not self.has_active:
            for j in range(self.plen):
                out[m] = self.part[j]
                m += 1
        elif not self.has_partial:
            for j in range(self.alen):
                out[m] = self.act[j]
                m += 1
        else:
            for j in range(self.alen):
                if self.act[j] >= start:
                    out[m] = self.act[j]
                    m += 1
            expired = self.alen - m
            for j in range(self.plen):
                self.pool[j] = self.part[j]
            for j in range(expired):
                r = j + <int64_t>sm_uniform(rng, self.plen - j)
                tmp = self.pool[j]
                self.pool[j] = self.pool[r]
                self.pool[r] = tmp
            for j in range(expired):
                out[m] = self.pool[j]
                m += 1
        _isort(out, m)
        return m


cdef inline void _isort(int64_t* a, int64_t m):
    cdef int64_t i, j, v
    for i in range(1, m):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


def seq_trials(n, k, wor, length, trials, seed):
    cdef int64_t kk = k, L = length, i, t, m, j
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((trials, k), dtype=np.int64)
    cdef int64_t* buf = <int64_t*>malloc(kk * sizeof(int64_t))
    cdef SM rng
    cdef _Seq s = _Seq(n, k, wor)
    try:
        for t, sd in enumerate(_trial_seeds(_seed64(seed), trials)):
            rng.state = sd
            s.reset()
            for i in range(L):
                s.observe(i, &rng)
            m = s.query(buf, &rng)
            for j in range(kk):
                out[t, j] = buf[j] if j < m else -1
    finally:
        free(buf)
    return out


def seq_memory(n, k, wor, length, seed):
    cdef int64_t L = length, i, c, peak = 0
    cdef double total = 0
    cdef SM rng
    cdef _Seq s = _Seq(n, k, wor)
    rng.state = _seed64(seed)
    for i in range(L):
        s.observe(i, &rng)
        c = s.stored()
        total += c
        if c > peak:
            peak = c
    return peak, total / max(1, L)


# -- chain sampling ------------------------------------------------------

cdef struct Chain:
    int64_t idx[CHAIN_CAP]
    int64_t nxt[CHAIN_CAP]
    int64_t head
    int64_t size


cdef inline void chain_push(Chain* c, int64_t idx, int64_t nxt) except *:
    cdef int64_t pos
    if c.size >= CHAIN_CAP:
        raise OverflowError("chain longer than the kernel capacity")
    pos = (c.head + c.size) % CHAIN_CAP
    c.idx[pos] = idx
    c.nxt[pos] = nxt
    c.size += 1


cdef inline void chain_observe(Chain* c, int64_t i, int64_t n, SM* rng) except *:
    cdef int64_t w = i + 1
    if w > n:
        w = n
    if sm_bernoulli(rng, 1, w):
        c.head = 0
        c.size = 0
        chain_push(c, i, i + 1 + <int64_t>sm_uniform(rng, n))
    elif c.size > 0 and c.nxt[(c.head + c.size - 1) % CHAIN_CAP] == i:
        chain_push(c, i, i + 1 + <int64_t>sm_uniform(rng, n))
    while c.idx[c.head] < i + 1 - n:
        c.head = (c.head + 1) % CHAIN_CAP
        c.size -= 1


def chain_trials(n, length, trials, seed):
    cdef int64_t nn = n, L = length, i, t
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offsets = np.empty(trials, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lengths = np.empty(trials, dtype=np.int64)
    cdef Chain* c = <Chain*>malloc(sizeof(Chain))
    cdef SM rng
    if not c:
        raise MemoryError()
    try:
        for t, sd in enumerate(_trial_seeds(_seed64(seed), trials)):
            rng.state = sd
            c.head = 0
            c.size = 0
            for i in range(L):
                chain_observe(c, i, nn, &rng)
            offsets[t] = L - 1 - c.idx[c.head]
            lengths[t] = c.size
    finally:
        free(c)
    return offsets, lengths


def chain_memory(n, length, seed):
    cdef int64_t nn = n, L = length, i, peak = 0
    cdef double total = 0
    cdef Chain* c = <Chain*>malloc(sizeof(Chain))
    cdef SM rng
    if not c:
        raise MemoryError()
    rng.state = _seed64(seed)
    c.head = 0
    c.size = 0
    try:
        for i in range(L):
            chain_observe(c, i, nn, &rng)
            total += c.size
            if c.size > peak:
                peak = c.size
    finally:
        free(c)
    return peak, total / max(1, L)


# -- timestamp samplers --------------------------------------------------

cdef struct Bucket:
    int64_t x
    int64_t y
    int64_t t
    int64_t r_idx
    int64_t r_t
    int64_t q_idx
    int64_t q_t


cdef class _Ts:
    """One single-sample instance; see ``timestamp.TsState``."""
    cdef Bucket z[ZCAP]
    cdef Bucket head
    cdef int nz
    cdef bint has_head
    cdef int64_t t0
    cdef int64_t now

    def __cinit__(self, int64_t t0):
        self.t0 = t0
        self.reset()

    cdef void reset(self):
        self.nz = 0
        self.has_head = 0
        self.now = 0

    cdef inline int units(self):
        return self.nz + self.has_head

    cdef void advance(self, int64_t now):
        cdef int i, j, drop
        self.now = now
        if self.nz == 0:
            return
        if now - self.z[0].t < self.t0:
            return
        if now - self.z[self.nz - 1].t >= self.t0:
            self.nz = 0
            self.has_head = 0
            return
        for i in range(self.nz - 1):
            if now - self.z[i + 1].t < self.t0:
                self.head = self.z[i]
                self.has_head = 1
                drop = i + 1
                for j in range(self.nz - drop):
                    self.z[j] = self.z[j + drop]
                self.nz -= drop
                return

    cdef void observe(self, int64_t idx, int64_t ts, int64_t now, SM* rng) except *:
        cdef int64_t a, b, span
        cdef int i, j
        self.advance(now)
        if self.nz == 0:
            self.has_head = 0
            self.z[0].x = idx
            self.z[0].y = idx + 1
            self.z[0].t = ts
            self.z[0].r_idx = idx
            self.z[0].r_t = ts
            self.z[0].q_idx = idx
            self.z[0].q_t = ts
            self.nz = 1
            return
        b = self.z[self.nz - 1].x
        i = 0
        while True:
            a = self.z[i].x
            if a == b:
                if self.nz >= ZCAP:
                    raise OverflowError("decomposition exceeds kernel capacity")
                self.z[self.nz].x = idx
                self.z[self.nz].y = idx + 1
                self.z[self.nz].t = ts
                self.z[self.nz].r_idx = idx
                self.z[self.nz].r_t = ts
                self.z[self.nz].q_idx = idx
                self.z[self.nz].q_t = ts
                self.nz += 1
                return
            span = b + 1 - a
            if flog2(span + 1) != flog2(span):
                if not sm_bernoulli(rng, 1, 2):
                    self.z[i].r_idx = self.z[i + 1].r_idx
                    self.z[i].r_t = self.z[i + 1].r_t
                if not sm_bernoulli(rng, 1, 2):
                    self.z[i].q_idx = self.z[i + 1].q_idx
                    self.z[i].q_t = self.z[i + 1].q_t
                self.z[i].y = self.z[i + 1].y
                for j in range(i + 1, self.nz - 1):
                    self.z[j] = self.z[j + 1]
                self.nz -= 1
            i += 1

    cdef inline int64_t _union(self, SM* rng):
        cdef int64_t remaining = self.z[self.nz - 1].y - self.z[0].x
        cdef int64_t w
        cdef int i
        for i in range(self.nz):
            w = self.z[i].y - self.z[i].x
            if sm_bernoulli(rng, w, remaining):
                return self.z[i].r_idx
            remaining -= w
        return -1

    cdef bint _gen_x(self, int64_t beta, SM* rng):
        cdef int64_t alpha = self.head.y - self.head.x
        cdef int64_t i = self.head.y - self.head.q_idx
        cdef int64_t y_t = self.head.t
        if 0 < i < alpha and sm_bernoulli(rng, alpha * beta, (beta + i) * (beta + i - 1)):
            y_t = self.head.q_t
        if self.now - y_t < self.t0:
            return 0
        return sm_bernoulli(rng, alpha, beta)

    cdef int64_t query(self, SM* rng) except -2:
        cdef int64_t alpha, beta
        if self.nz == 0:
            return -1
        if not self.has_head:
            return self._union(rng)
        alpha = self.head.y - self.head.x
        beta = self.z[self.nz - 1].y - self.z[0].x
        if alpha > beta:
            raise AssertionError("case-2 invariant broken")
        if self.now - self.head.r_t < self.t0 and self._gen_x(beta, rng):
            return self.head.r_idx
        return self._union(rng)


cdef class _TsSampler:
    cdef list cores
    cdef int64_t k, t0
    cdef bint wor
    cdef int64_t* buf_idx
    cdef int64_t* buf_t
    cdef int64_t blen, bstart

    def __cinit__(self, int64_t k, int64_t t0, bint wor):
        self.k = k
        self.t0 = t0
        self.wor = wor
        self.cores = [_Ts(t0) for _ in range(k)]
        self.buf_idx = <int64_t*>malloc(k * sizeof(int64_t))
        self.buf_t = <int64_t*>malloc(k * sizeof(int64_t))
        if not self.buf_idx or not self.buf_t:
            raise MemoryError()
        self.blen = 0
        self.bstart = 0

    def __dealloc__(self):
        free(self.buf_idx)
        free(self.buf_t)

    cdef void reset(self):
        cdef _Ts c
        for c in self.cores:
            c.reset()
        self.blen = 0
        self.bstart = 0

    cdef inline int64_t _pos_from_newest(self, int64_t i):
        # position of the i-th newest buffered element (i = 0 is the newest)
        return (self.bstart + self.blen - 1 - i) % self.k

    cdef void observe(self, int64_t idx, int64_t ts, SM* rng) except *:
        cdef _Ts c
        cdef int64_t i, pos
        if not self.wor:
            for c in self.cores:
                c.observe(idx, ts, ts, rng)
            return
        for c in self.cores:
            c.advance(ts)
        if self.blen < self.k:
            pos = (self.bstart + self.blen) % self.k
            self.blen += 1
        else:
            pos = self.bstart
            self.bstart = (self.bstart + 1) % self.k
        self.buf_idx[pos] = idx
        self.buf_t[pos] = ts
        for i in range(self.k):
            if self.blen <= i:
                break
            pos = self._pos_from_newest(i)
            if ts - self.buf_t[pos] < self.t0:
                c = self.cores[i]
                c.observe(self.buf_idx[pos], self.buf_t[pos], ts, rng)

    cdef int64_t units(self):
        cdef _Ts c
        cdef int64_t u = 0
        for c in self.cores:
            u += c.units()
        if self.wor:
            u += self.blen
        return u

    cdef int64_t query(self, int64_t now, int64_t* out, SM* rng) except -2:
        cdef _Ts c
        cdef int64_t i, j, m, pos, d, newest
        cdef bint found
        for c in self.cores:
            c.advance(now)
        if not self.wor:
            for i in range(self.k):
                c = self.cores[i]
                out[i] = c.query(rng)
            return self.k
        m = 0
        for i in range(self.blen):
            pos = (self.bstart + i) % self.k
            if now - self.buf_t[pos] < self.t0:
                out[m] = self.buf_idx[pos]
                m += 1
        if m < self.k:
            return m
        draws = [(<_Ts>self.cores[i]).query(rng) for i in range(self.k)]
        out[0] = draws[self.k - 1]
        m = 1
        for i in range(self.k - 2, -1, -1):
            d = draws[i]
            newest = self.buf_idx[self._pos_from_newest(i)]
            found = 0
            for j in range(m):
                if out[j] == d:
                    found = 1
                    break
            out[m] = newest if found else d
            m += 1
        _isort(out, m)
        return m


cdef int64_t _bound(int64_t k, int64_t arrivals, bint wor):
    if arrivals < 1:
        arrivals = 1
    return k * (2 * flog2(arrivals) + 2) + (k if wor else 0)


def ts_trials(times, counts, t0, k, wor, trials, seed, query_time):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tv = np.ascontiguousarray(times, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cv = np.ascontiguousarray(counts, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((trials, k), dtype=np.int64)
    cdef int64_t kk = k, qt = query_time, g, c, idx, m, j, t
    cdef int64_t* buf = <int64_t*>malloc(kk * sizeof(int64_t))
    cdef SM rng
    cdef _TsSampler s = _TsSampler(k, t0, wor)
    try:
        for t, sd in enumerate(_trial_seeds(_seed64(seed), trials)):
            rng.state = sd
            s.reset()
            idx = 0
            for g in range(tv.shape[0]):
                for c in range(cv[g]):
                    s.observe(idx, tv[g], &rng)
                    idx += 1
            m = s.query(qt, buf, &rng)
            for j in range(kk):
                out[t, j] = buf[j] if j < m else -1
    finally:
        free(buf)
    return out


def ts_memory(times, counts, t0, k, wor, seed):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tv = np.ascontiguousarray(times, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cv = np.ascontiguousarray(counts, dtype=np.int64)
    cdef int64_t kk = k, g, c, idx = 0, u, peak = 0, violation = -1
    cdef bint w = wor
    cdef SM rng
    cdef _TsSampler s = _TsSampler(k, t0, wor)
    rng.state = _seed64(seed)
    for g in range(tv.shape[0]):
        for c in range(cv[g]):
            s.observe(idx, tv[g], &rng)
            u = s.units()
            if u > peak:
                peak = u
            if violation < 0 and u > _bound(kk, idx + 1, w):
                violation = idx
            idx += 1
    return peak, violation
