"""Small dense matrices (2x2, 3x3) over F_q, stored as tuples of row tuples."""

from __future__ import annotations

import random

from .fields import BaseField, ZeroInverse

Matrix = tuple


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(fq: BaseField, a: Matrix, b: Matrix) -> Matrix:
    m = fq.mul
    n, k, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = 0
            for t in range(k):
                acc ^= m(a[i][t], b[t][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_vec(fq: BaseField, a: Matrix, v) -> tuple:
    m = fq.mul
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc ^= m(x, y)
        out.append(acc)
    return tuple(out)


def mat_det(fq: BaseField, a: Matrix) -> int:
    m = fq.mul
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return m(a[0][0], a[1][1]) ^ m(a[0][1], a[1][0])
    if n == 3:
        return (m(a[0][0], m(a[1][1], a[2][2]) ^ m(a[1][2], a[2][1]))
                ^ m(a[0][1], m(a[1][0], a[2][2]) ^ m(a[1][2], a[2][0]))
                ^ m(a[0][2], m(a[1][0], a[2][1]) ^ m(a[1][1], a[2][0])))
    raise ValueError("only sizes up to 3 are supported")


def mat_inv(fq: BaseField, a: Matrix) -> Matrix:
    """Adjugate inverse; signs vanish in characteristic 2."""
    det = mat_det(fq, a)
    if det == 0:
        raise ZeroInverse("singular matrix")
    di = fq.inv(det)
    m = fq.mul
    n = len(a)
    if n == 1:
        return ((di,),)
    if n == 2:
        return ((m(a[1][1], di), m(a[0][1], di)), (m(a[1][0], di), m(a[0][0], di)))
    out = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = m(a[r[0]][c[0]], a[r[1]][c[1]]) ^ m(a[r[0]][c[1]], a[r[1]][c[0]])
            out[j][i] = m(minor, di)
    return tuple(tuple(row) for row in out)


def column(a: Matrix, j: int) -> tuple:
    return tuple(row[j] for row in a)


def from_columns(cols) -> Matrix:
    n = len(cols[0])
    return tuple(tuple(col[i] for col in cols) for i in range(n))


def random_invertible(fq: BaseField, n: int, rng: random.Random) -> Matrix:
    while True:
        a = tuple(tuple(rng.randrange(fq.q) for _ in range(n)) for _ in range(n))
        if mat_det(fq, a):
            return a
