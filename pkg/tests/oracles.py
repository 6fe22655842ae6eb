"""Independent reference implementations used only by the tests.

These stay deliberately naive (full-matrix DP, exhaustive 3-way DP) so they
cannot share a bug with the production code paths they check.
"""
from __future__ import annotations

import itertools
from typing import Sequence


def reference_levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Full-matrix Levenshtein with case-insensitive token comparison."""
    ak = [t.casefold() for t in a]
    bk = [t.casefold() for t in b]
    m, n = len(ak), len(bk)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dp[i][0] = i
    for j in range(n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if ak[i - 1] == bk[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j - 1] + cost, dp[i - 1][j] + 1, dp[i][j - 1] + 1)
    return dp[m][n]


def exact_three_way_cost(
    h1: Sequence[str], h2: Sequence[str], h3: Sequence[str]
) -> int:
    """Exhaustive 3-sequence alignment under the same sequential cost model
    the progressive merge uses: the second sequence pays against the first,
    the third pays against whatever the column already holds.

    The minimum over all simultaneous alignments lower-bounds the
    progressive result.
    """

    def key(t: str) -> str:
        return t.casefold()

    n1, n2, n3 = len(h1), len(h2), len(h3)
    inf = 10**9
    dp = [[[inf] * (n3 + 1) for _ in range(n2 + 1)] for _ in range(n1 + 1)]
    dp[0][0][0] = 0
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            for k in range(n3 + 1):
                cur = dp[i][j][k]
                if cur == inf:
                    continue
                for di, dj, dk in itertools.product((0, 1), repeat=3):
                    if (di, dj, dk) == (0, 0, 0):
                        continue
                    if i + di > n1 or j + dj > n2 or k + dk > n3:
                        continue
                    a = h1[i] if di else None
                    b = h2[j] if dj else None
                    c = h3[k] if dk else None
                    if a is None and b is None:
                        cost_b = 0
                    elif a is None or b is None:
                        cost_b = 1
                    else:
                        cost_b = 0 if key(a) == key(b) else 1
                    present = [x for x in (a, b) if x is not None]
                    if c is None:
                        cost_c = 1 if present else 0
                    else:
                        cost_c = 0 if any(key(c) == key(x) for x in present) else 1
                    value = cur + cost_b + cost_c
                    if value < dp[i + di][j + dj][k + dk]:
                        dp[i + di][j + dj][k + dk] = value
    return dp[n1][n2][n3]
