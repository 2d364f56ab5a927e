"""Search for a short curve over F_p with m | p - 1 and all of E[m] rational.

Prints the first hit as JSON: the curve plus a basis (P, Q) of E[m].
Usage: python3 scripts/find_pairing_fixture.py [m]
"""

import json
import sys

from sympy import isprime


def points(p, a, b):
    sq = {}
    for y in range(p):
        sq.setdefault(y * y % p, []).append(y)
    return [(x, y) for x in range(p) for y in sq.get((x**3 + a * x + b) % p, [])]


def add(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    if P[0] == Q[0] and (P[1] + Q[1]) % p == 0:
        return None
    if P == Q:
        lam = (3 * P[0] ** 2 + a) * pow(2 * P[1], -1, p) % p
    else:
        lam = (Q[1] - P[1]) * pow(Q[0] - P[0], -1, p) % p
    x = (lam * lam - P[0] - Q[0]) % p
    return x, (lam * (P[0] - x) - P[1]) % p


def mul(k, P, p, a):
    R = None
    for bit in bin(k)[2:]:
        R = add(R, R, p, a)
        if bit == "1":
            R = add(R, P, p, a)
    return R


def search(m):
    for p in range(m + 1, 20000, m):
        if not isprime(p):
            continue
        chi = [0] + [-1] * (p - 1)
        for y in range(1, p):
            chi[y * y % p] = 1
        for a in range(p):
            for b in range(1, p):
                if (4 * a**3 + 27 * b * b) % p == 0:
                    continue
                order = p + 1 + sum(chi[(x**3 + a * x + b) % p] for x in range(p))
                if order % (m * m):
                    continue
                pts = points(p, a, b)
                torsion = [T for T in pts if mul(m, T, p, a) is None]
                if len(torsion) + 1 < m * m:
                    continue
                torsion = sorted(torsion)
                P = torsion[0]
                span = {mul(i, P, p, a) for i in range(m)}
                Q = next(T for T in torsion if T not in span)
                return {"p": p, "a": a, "b": b, "m": m, "order": order, "P": P, "Q": Q}
    raise SystemExit("no fixture found")


if __name__ == "__main__":
    print(json.dumps(search(int(sys.argv[1]) if len(sys.argv) > 1 else 13)))
