# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the kernels in ``_pykernels``; same signatures, same output order."""
from libc.stdlib cimport malloc, free


cdef int _pack(list table, int n, int* t) except -1:
    cdef int a, b
    for a in range(n):
        row = table[a]
        for b in range(n):
            t[a * n + b] = <int>row[b]
    return 0


def ea_violations(table, int zero, int one, int max_per_axiom=8):
    cdef int n = len(table)
    cdef int* t = <int*>malloc(n * n * sizeof(int))
    cdef int a, b, d, e, f, s, de, ef, lhs, rhs, cnt, first, second
    cdef bint bad
    cdef int c1 = 0, c2 = 0, c3 = 0, c4 = 0
    out = []
    try:
        _pack(list(table), n, t)
        for a in range(n):
            for b in range(n):
                s = t[a * n + b]
                if s != -1 and t[b * n + a] != s:
                    if c1 < max_per_axiom:
                        out.append(("EA1", (a, b)))
                    c1 += 1
        for d in range(n):
            for e in range(n):
                de = t[d * n + e]
                for f in range(n):
                    bad = False
                    ef = t[e * n + f]
                    if de != -1:
                        lhs = t[de * n + f]
                        if lhs != -1:
                            if ef == -1 or t[d * n + ef] != lhs:
                                bad = True
                    if not bad and ef != -1:
                        rhs = t[d * n + ef]
                        if rhs != -1 and (de == -1 or t[de * n + f] != rhs):
                            bad = True
                    if bad:
                        if c2 < max_per_axiom:
                            out.append(("EA2", (d, e, f)))
                        c2 += 1
        for e in range(n):
            cnt = 0
            first = -1
            second = -1
            for f in range(n):
                if t[e * n + f] == one:
                    if cnt == 0:
                        first = f
                    elif cnt == 1:
                        second = f
                    cnt += 1
            if cnt == 0:
                if c3 < max_per_axiom:
                    out.append(("EA3", (e,)))
                c3 += 1
            elif cnt > 1:
                if c3 < max_per_axiom:
                    out.append(("EA3", (e, first, second)))
                c3 += 1
        for e in range(n):
            if e != zero and (t[e * n + one] != -1 or t[one * n + e] != -1):
                if c4 < max_per_axiom:
                    out.append(("EA4", (e, one)))
                c4 += 1
        for a in range(n):
            if t[zero * n + a] != a or t[a * n + zero] != a:
                out.append(("ZERO", (zero, a)))
                break
    finally:
        free(t)
    return out


cdef struct Ctx:
    int n
    int npairs
    int* t
    int* pa
    int* pb
    int* pc
    int* perp
    int* tau
    int* trail
    int top


cdef inline int _setv(Ctx* c, int x, int v):
    if c.tau[x] == -1:
        c.tau[x] = v
        c.trail[c.top] = x
        c.top += 1
        return 1
    return 0 if c.tau[x] == v else -1


cdef bint _propagate(Ctx* c):
    cdef bint changed = True
    cdef int i, a, ta, tb, s, r, v
    cdef int n = c.n
    while changed:
        changed = False
        for i in range(c.npairs):
            ta = c.tau[c.pa[i]]
            tb = c.tau[c.pb[i]]
            if ta == -1 or tb == -1:
                continue
            s = c.t[ta * n + tb]
            if s == -1:
                return False
            r = _setv(c, c.pc[i], s)
            if r < 0:
                return False
            if r > 0:
                changed = True
        for a in range(n):
            v = c.tau[a]
            if v == -1:
                continue
            r = _setv(c, c.perp[a], c.perp[v])
            if r < 0:
                return False
            if r > 0:
                changed = True
            r = _setv(c, v, v)
            if r < 0:
                return False
            if r > 0:
                changed = True
    return True


cdef void _undo(Ctx* c, int mark):
    while c.top > mark:
        c.top -= 1
        c.tau[c.trail[c.top]] = -1


cdef int _search(Ctx* c, list out) except -1:
    cdef int x = -1, i, v, mark
    for i in range(c.n):
        if c.tau[i] == -1:
            x = i
            break
    if x == -1:
        out.append(tuple([c.tau[i] for i in range(c.n)]))
        return 0
    for v in range(c.n):
        mark = c.top
        _setv(c, x, v)
        if _propagate(c):
            _search(c, out)
        _undo(c, mark)
    return 0


def enumerate_state_operators(table, perp, int zero, int one):
    cdef Ctx c
    cdef int n = len(table)
    cdef int a, b, k = 0
    cdef bint ok
    out = []
    c.n = n
    c.t = <int*>malloc(n * n * sizeof(int))
    c.pa = <int*>malloc(n * n * sizeof(int))
    c.pb = <int*>malloc(n * n * sizeof(int))
    c.pc = <int*>malloc(n * n * sizeof(int))
    c.perp = <int*>malloc(n * sizeof(int))
    c.tau = <int*>malloc(n * sizeof(int))
    c.trail = <int*>malloc((n + 1) * sizeof(int))
    c.top = 0
    try:
        _pack(list(table), n, c.t)
        for a in range(n):
            c.perp[a] = <int>perp[a]
            c.tau[a] = -1
            for b in range(a, n):
                if c.t[a * n + b] != -1:
                    c.pa[k] = a
                    c.pb[k] = b
                    c.pc[k] = c.t[a * n + b]
                    k += 1
        c.npairs = k
        ok = _setv(&c, zero, zero) >= 0 and _setv(&c, one, one) >= 0 and _propagate(&c)
        if ok:
            _search(&c, out)
    finally:
        free(c.t); free(c.pa); free(c.pb); free(c.pc)
        free(c.perp); free(c.tau); free(c.trail)
    out.sort()
    return out
