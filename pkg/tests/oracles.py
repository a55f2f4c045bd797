"""Independent brute-force oracles.  Nothing here imports descprox internals."""

import math
from fractions import Fraction


def cat_step_naive(p, N):
    a, b = p
    # explicit matrix-vector product [[1, 1], [1, 2]] @ (a, b)
    return ((1 * a + 1 * b) % N, (1 * a + 2 * b) % N)


def cat_permutation(N):
    return {(a, b): cat_step_naive((a, b), N) for a in range(N) for b in range(N)}


def permutation_period(N):
    """lcm of the cycle lengths of the cat-map permutation of Z_N^2."""
    perm = cat_permutation(N)
    seen, order = set(), 1
    for start in perm:
        if start in seen:
            continue
        length, p = 0, start
        while True:
            seen.add(p)
            p = perm[p]
            length += 1
            if p == start:
                break
        order = order * length // math.gcd(order, length)
    return order


def point_period(p, N):
    q, t = cat_step_naive(p, N), 1
    while q != p:
        q, t = cat_step_naive(q, N), t + 1
    return t


def sector_of(theta, n=4):
    """Sector index by explicit comparison against the boundaries i/n."""
    for i in range(n):
        if Fraction(i, n) <= theta < Fraction(i + 1, n):
            return i
    raise ValueError(theta)


def track_oracle(pixels, s1, s2, T):
    """Replay positions and color gaps step by step on a nested-list image ``pixels[row][col]``."""
    N = len(pixels)

    def color(p):
        return pixels[p[1]][p[0]]

    def gap(c1, c2):
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(c1, c2)))

    def tdist(p, q):
        dx = min((p[0] - q[0]) % N, (q[0] - p[0]) % N)
        dy = min((p[1] - q[1]) % N, (q[1] - p[1]) % N)
        return math.sqrt(dx * dx + dy * dy)

    carried = gap(color(s1), color(s2))
    rows, p, q = [], s1, s2
    for t in range(T + 1):
        rows.append((t, p, q, tdist(p, q), carried, gap(color(p), color(q))))
        p, q = cat_step_naive(p, N), cat_step_naive(q, N)
    return rows
