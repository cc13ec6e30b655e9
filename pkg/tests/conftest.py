import random
import sys
from functools import lru_cache

import pytest

sys.setrecursionlimit(20000)


def memo_ed(a, b):
    """Reference edit distance by memoized recursion on suffixes."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j + 1), go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def mutate(seq, count, alphabet, rng):
    out = list(seq)
    for _ in range(count):
        r = rng.random()
        if r < 0.4 and out:
            out[rng.randrange(len(out))] = rng.randrange(alphabet)
        elif r < 0.7 and out:
            del out[rng.randrange(len(out))]
        else:
            out.insert(rng.randrange(len(out) + 1), rng.randrange(alphabet))
    return out


def planted_pair(n, rate, alphabet, rng):
    """Equal-length pair: a random string and a mutated, re-cut copy."""
    a = [rng.randrange(alphabet) for _ in range(n)]
    b = mutate(a, int(rate * n), alphabet, rng)
    b = (b + [rng.randrange(alphabet) for _ in range(n)])[:n]
    return a, b


@pytest.fixture
def rng():
    return random.Random(20240611)
