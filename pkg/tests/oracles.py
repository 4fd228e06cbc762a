"""Independent brute-force references used by the test suite."""

from itertools import combinations


def lcs_by_enumeration(a, b):
    """Longest common subsequence length by trying every subsequence of ``a``."""

    def is_subsequence(sub, seq):
        it = iter(seq)
        return all(tok in it for tok in sub)

    for k in range(min(len(a), len(b)), 0, -1):
        for idx in combinations(range(len(a)), k):
            if is_subsequence([a[i] for i in idx], b):
                return k
    return 0
