"""Independent oracle: Aut(Z_p^n)-orbit counts on subsets of Z_p^n via Burnside."""
import itertools, sys
from fractions import Fraction

def gl(p, n):
    vecs = list(itertools.product(range(p), repeat=n))
    def span(cols):
        s = {tuple([0]*n)}
        for c in cols:
            s = {tuple((a + k*b) % p for a, b in zip(x, c)) for x in s for k in range(p)}
        return s
    def rec(cols):
        if len(cols) == n:
            yield list(cols); return
        sp = span(cols)
        for v in vecs:
            if v not in sp:
                yield from rec(cols + [v])
    yield from rec([])

def point(v, p):
    return sum(c * p**i for i, c in enumerate(v))

def count(p, n):
    N = p**n
    vecs = [tuple((x // p**i) % p for i in range(n)) for x in range(N)]
    total, order = 0, 0
    for cols in gl(p, n):
        img = []
        for v in vecs:
            w = [0]*n
            for j, c in enumerate(v):
                for i in range(n):
                    w[i] = (w[i] + c * cols[j][i]) % p
            img.append(point(w, p))
        seen, cyc = [False]*N, 0
        for x in range(N):
            if not seen[x]:
                cyc += 1
                y = x
                while not seen[y]:
                    seen[y] = True; y = img[y]
        total += 2**cyc; order += 1
    return order, Fraction(total, order)

for p, n in [(2,1),(2,2),(2,3),(2,4),(3,1),(3,2)]:
    print(p, n, *count(p, n))
