"""Independent reference implementations used only by the tests.

None of these share code paths with the package beyond the bit encoding.
"""

from __future__ import annotations

import itertools

import numpy as np


def bits_span(vectors):
    """All vectors of the span, by brute-force closure under addition."""
    out = {0}
    for x in vectors:
        out |= {y ^ x for y in out}
    return frozenset(out)


def subspace_set(v: int, k: int):
    """Every k-subspace of GF(2)^v as a frozenset of its vectors."""
    seen = set()
    for combo in itertools.combinations(range(1, 1 << v), k):
        s = bits_span(combo)
        if len(s) == 1 << k:
            seen.add(s)
    return seen


def mat_apply(rows, x):
    out = 0
    for i, r in enumerate(rows):
        if (x >> i) & 1:
            out ^= r
    return out


def group_elements(gen_rows, v):
    """Closure of the generators by repeated products (numpy-free, set based)."""
    ident = tuple(1 << i for i in range(v))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gen_rows:
                prod = tuple(mat_apply(g, r) for r in a)
                if prod not in elems:
                    elems.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return elems


def orbits_by_elements(v, k, elements):
    """Orbits on k-subspaces (as vector sets) by applying every group element."""
    todo = subspace_set(v, k)
    out = []
    while todo:
        s = min(todo, key=lambda t: sorted(t))
        orb = {frozenset(mat_apply(g, x) for x in s) for g in elements}
        todo -= orb
        out.append(orb)
    return out


def exact_covers(n_rows, columns, forced=(), excluded=()):
    """All exact covers, by numpy enumeration of partial packings.

    ``columns`` is a list of (id, rows).  Packings are grown one column at a
    time: every packing either skips the column or absorbs it when disjoint.
    """
    full = (1 << n_rows) - 1
    ids = [c for c, _ in columns]
    masks = np.array([sum(1 << r for r in rows) for _, rows in columns], dtype=np.int64)
    cover = np.zeros(1, dtype=np.int64)
    chosen = np.zeros(1, dtype=np.int64)
    for j, m in enumerate(masks):
        cid = ids[j]
        fits = (cover & m) == 0
        add_cover = cover[fits] | m
        add_chosen = chosen[fits] | (1 << j)
        if cid in forced:
            cover, chosen = add_cover, add_chosen
        elif cid in excluded:
            continue
        else:
            cover = np.concatenate([cover, add_cover])
            chosen = np.concatenate([chosen, add_chosen])
    out = []
    for c in chosen[cover == full]:
        out.append(tuple(sorted(ids[j] for j in range(len(ids)) if (int(c) >> j) & 1)))
    return sorted(out)
