"""Pure-Python reference kernels.

Tables are square lists of lists of ints; ``-1`` marks an undefined sum.
The compiled module ``_ckernels`` implements the same functions with the
same output order, and the test suite holds both to identical results.
"""


def ea_violations(table, zero, one, max_per_axiom=8):
    """Scan a partial sum table for EA1-EA4 failures and a misplaced zero.

    Returns a list of ``(axiom, witness)`` pairs in a fixed scan order,
    at most ``max_per_axiom`` witnesses per axiom.
    """
    n = len(table)
    out = []
    counts = {"EA1": 0, "EA2": 0, "EA3": 0, "EA4": 0, "ZERO": 0}

    def emit(axiom, witness):
        if counts[axiom] < max_per_axiom:
            out.append((axiom, witness))
        counts[axiom] += 1

    t = table
    for a in range(n):
        row = t[a]
        for b in range(n):
            s = row[b]
            if s != -1 and t[b][a] != s:
                emit("EA1", (a, b))

    for d in range(n):
        td = t[d]
        for e in range(n):
            de = td[e]
            te = t[e]
            for f in range(n):
                bad = False
                if de != -1:
                    lhs = t[de][f]
                    if lhs != -1:
                        ef = te[f]
                        if ef == -1 or td[ef] != lhs:
                            bad = True
                if not bad:
                    ef = te[f]
                    if ef != -1:
                        rhs = td[ef]
                        if rhs != -1 and (de == -1 or t[de][f] != rhs):
                            bad = True
                if bad:
                    emit("EA2", (d, e, f))

    for e in range(n):
        sup = [f for f in range(n) if t[e][f] == one]
        if len(sup) == 0:
            emit("EA3", (e,))
        elif len(sup) > 1:
            emit("EA3", (e, sup[0], sup[1]))

    for e in range(n):
        if e != zero and (t[e][one] != -1 or t[one][e] != -1):
            emit("EA4", (e, one))

    for a in range(n):
        if t[zero][a] != a or t[a][zero] != a:
            emit("ZERO", (zero, a))
            break
    return out


def enumerate_state_operators(table, perp, zero, one):
    """All unital, additive, idempotent self-maps, sorted lexicographically.

    Backtracking over tau values with constraint propagation: defined sums
    force ``tau(a+b)``, orthosupplements force ``tau(a')``, and idempotence
    forces ``tau(tau(a)) = tau(a)``.
    """
    n = len(table)
    t = table
    pairs = [(a, b, t[a][b]) for a in range(n) for b in range(a, n) if t[a][b] != -1]
    tau = [-1] * n
    out = []

    def setv(x, v, trail):
        if tau[x] == -1:
            tau[x] = v
            trail.append(x)
            return 1
        return 0 if tau[x] == v else -1

    def propagate(trail):
        changed = True
        while changed:
            changed = False
            for a, b, c in pairs:
                ta = tau[a]
                tb = tau[b]
                if ta == -1 or tb == -1:
                    continue
                s = t[ta][tb]
                if s == -1:
                    return False
                r = setv(c, s, trail)
                if r < 0:
                    return False
                changed |= r > 0
            for a in range(n):
                v = tau[a]
                if v == -1:
                    continue
                r = setv(perp[a], perp[v], trail)
                if r < 0:
                    return False
                changed |= r > 0
                r = setv(v, v, trail)
                if r < 0:
                    return False
                changed |= r > 0
        return True

    def undo(trail):
        for x in trail:
            tau[x] = -1

    def search():
        x = next((i for i in range(n) if tau[i] == -1), -1)
        if x == -1:
            out.append(tuple(tau))
            return
        for v in range(n):
            trail = []
            setv(x, v, trail)
            if propagate(trail):
                search()
            undo(trail)

    trail = []
    ok = setv(zero, zero, trail) >= 0 and setv(one, one, trail) >= 0 and propagate(trail)
    if ok:
        search()
    out.sort()
    return out
