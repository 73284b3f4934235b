"""Brute-force unary-forest counters, independent of the package's DP.

A unary forest on {0..n-1} assigns each vertex either no out-edge or one
out-edge (target, label in {0,1}), subject to in-degree <= 1 and no cycles.
The unlabeled count is the number of distinct canonical forms, a canonical
form being the sorted multiset of the paths' edge-label strings.
"""

import itertools
from typing import List, Optional, Tuple


def _forests(n: int):
    # choice per vertex: None or (target, label)
    options: List[List[Optional[Tuple[int, int]]]] = []
    for u in range(n):
        opts: List[Optional[Tuple[int, int]]] = [None]
        opts += [(v, c) for v in range(n) if v != u for c in (0, 1)]
        options.append(opts)
    for combo in itertools.product(*options):
        targets = [t for t in combo if t is not None]
        heads = [t[0] for t in targets]
        if len(set(heads)) != len(heads):
            continue  # in-degree 2 somewhere
        # acyclicity: follow out-edges; a cycle revisits its start
        ok = True
        for start in range(n):
            seen = {start}
            cur = combo[start]
            while cur is not None:
                nxt = cur[0]
                if nxt in seen:
                    ok = False
                    break
                seen.add(nxt)
                cur = combo[nxt]
            if not ok:
                break
        if ok:
            yield combo

def brute_labeled(n: int) -> int:
    if n == 0:
        return 1
    return sum(1 for _ in _forests(n))


def _canonical(n: int, combo) -> Tuple[Tuple[int, ...], ...]:
    has_in = {t[0] for t in combo if t is not None}
    words = []
    for start in range(n):
        if start in has_in:
            continue  # not a path head
        word = []
        cur = combo[start]
        while cur is not None:
            word.append(cur[1])
            cur = combo[cur[0]]
        words.append(tuple(word))
    return tuple(sorted(words))


def brute_unlabeled(n: int) -> int:
    if n == 0:
        return 1
    return len({_canonical(n, combo) for combo in _forests(n)})
