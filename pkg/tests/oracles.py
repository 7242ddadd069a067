"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the package's own code paths: different
enumeration algorithm, graph-based join, textbook recurrences.
"""

from fractions import Fraction

from finfree.partitions import SetPartition


def bell_oracle(n: int) -> int:
    """Bell number from the binomial recurrence B(n+1) = sum C(n,k) B(k)."""
    from math import comb

    b = [1]
    for m in range(n):
        b.append(sum(comb(m, k) * b[k] for k in range(m + 1)))
    return b[n]


def catalan_oracle(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


def partitions_by_insertion(n: int):
    """All partitions of [n] by inserting n into partitions of [n-1]."""
    if n == 1:
        yield [[1]]
        return
    for smaller in partitions_by_insertion(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n]] + smaller[i + 1:]
        yield smaller + [[n]]


def join_bfs(pi: SetPartition, sigma: SetPartition) -> SetPartition:
    """Join via breadth-first search on the union of block graphs."""
    n = pi.n
    adj: dict[int, set[int]] = {x: set() for x in range(1, n + 1)}
    for part in (pi, sigma):
        for b in part.blocks:
            for x in b:
                adj[x].update(y for y in b if y != x)
    seen: set[int] = set()
    blocks = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    frontier.append(y)
        seen |= comp
        blocks.append(sorted(comp))
    return SetPartition(n, blocks)


def finite_difference_coeffs(values):
    """Forward-difference table top row: Delta^j f(0) for j = 0..len-1.

    values[j] = f(j).  Exact over Fractions.
    """
    row = [Fraction(v) for v in values]
    out = [row[0]]
    while len(row) > 1:
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
        out.append(row[0])
    return out
