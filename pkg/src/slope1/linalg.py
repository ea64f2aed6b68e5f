"""Dense linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries reduced into [0, p).  Row
reduction is exact: entries stay below p and intermediate products fit in
64 bits comfortably for the primes in scope.
"""
from __future__ import annotations

import numpy as np


def reduce_mod(mat, p):
    return np.asarray(mat, dtype=np.int64) % p


def rref(mat, p):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    a = reduce_mod(mat, p).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(mat, p):
    return rref(mat, p)[0].shape[0]


def row_space(mat, p):
    """Canonical basis (rref rows) of the row space."""
    return rref(mat, p)[0]


def in_row_space(basis_rref, pivots, vec, p):
    """Membership of vec in a row space given in rref form."""
    v = reduce_mod(vec, p).copy()
    for row, c in zip(basis_rref, pivots):
        if v[c]:
            v = (v - v[c] * row) % p
    return not v.any()


def coords_in_row_space(basis_rref, pivots, vec, p):
    """Coordinates of vec w.r.t. rref basis rows, or None if outside."""
    v = reduce_mod(vec, p).copy()
    out = np.zeros(len(pivots), dtype=np.int64)
    for i, (row, c) in enumerate(zip(basis_rref, pivots)):
        if v[c]:
            out[i] = v[c]
            v = (v - v[c] * row) % p
    if v.any():
        return None
    return out


def nullspace(mat, p):
    """Basis of the right kernel, as rows of the returned matrix."""
    a, pivots = rref(mat, p)
    rows, cols = a.shape
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-a[i, fc]) % p
    return basis


def solve(mat, rhs, p):
    """One solution x of mat @ x = rhs mod p, or None when inconsistent."""
    a = reduce_mod(mat, p)
    b = reduce_mod(rhs, p).reshape(-1, 1)
    aug, pivots = rref(np.hstack([a, b]), p)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = aug[i, cols]
    return x


def intersect_row_spaces(a, b, p):
    """Basis of the intersection of two row spaces."""
    a = row_space(a, p)
    b = row_space(b, p)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, a.shape[1] if a.size else b.shape[1]), dtype=np.int64)
    stacked = np.vstack([a, b])
    ker = nullspace(stacked.T, p)
    # kernel rows (u | w) satisfy u@a = -w@b; u@a spans the intersection
    vecs = ker[:, : a.shape[0]] @ a % p
    return row_space(vecs, p)


def sum_row_spaces(a, b, p):
    if a.shape[0] == 0:
        return row_space(b, p)
    if b.shape[0] == 0:
        return row_space(a, p)
    return row_space(np.vstack([a, b]), p)
