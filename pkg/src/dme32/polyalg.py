"""Polynomial helpers: exponent-matrix inversion, univariate gcd and roots, resultants.

Univariate polynomials are tuples of coefficients, lowest degree first, with
no trailing zeros (the zero polynomial is ``()``).  Arithmetic goes through a
``LevelView`` ``K`` from :mod:`dme32.fields`.  Bivariate polynomials are
dicts ``{(i, j): coeff}`` for the monomial ``X^i Y^j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .fields import LevelView


class NotInvertible(ValueError):
    pass


class DegenerateSystem(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# exponent matrices


@dataclass(frozen=True)
class ExpMatrix:
    rows: tuple[tuple[int, ...], ...]
    modulus: int

    def inverse(self) -> tuple[tuple[int, ...], ...]:
        return exp_matrix_inverse(self.rows, self.modulus)


def _int_det(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in (list(r) for r in m[1:])]
            total += (-1) ** j * m[0][j] * _int_det(minor)
    return total


def exp_matrix_inverse(m: Sequence[Sequence[int]], modulus: int) -> tuple[tuple[int, ...], ...]:
    """Inverse of an integer matrix modulo ``modulus`` via adjugate and det^-1."""
    n = len(m)
    det = _int_det(m)
    if gcd(det, modulus) != 1:
        raise NotInvertible(f"determinant {det} is not invertible modulo {modulus}")
    dinv = pow(det % modulus, -1, modulus)
    if n == 1:
        return ((dinv,),)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [list(row[:j]) + list(row[j + 1:]) for k, row in enumerate(m) if k != i]
            adj[j][i] = (-1) ** (i + j) * _int_det(minor)
    return tuple(tuple((adj[i][j] * dinv) % modulus for j in range(n)) for i in range(n))


def mat_mul_mod(a, b, modulus: int):
    n, k, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) % modulus for j in range(p))
                 for i in range(n))


# ---------------------------------------------------------------------------
# univariate polynomials


def trim(coeffs, K: LevelView) -> tuple:
    c = list(coeffs)
    zero = K.zero
    while c and c[-1] == zero:
        c.pop()
    return tuple(c)


def degree(f: tuple) -> int:
    return len(f) - 1


def padd(f: tuple, g: tuple, K: LevelView) -> tuple:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    add = K.add
    for i, c in enumerate(g):
        out[i] = add(out[i], c)
    return trim(out, K)


def pmul(f: tuple, g: tuple, K: LevelView) -> tuple:
    if not f or not g:
        return ()
    out = [K.zero] * (len(f) + len(g) - 1)
    add, mul, zero = K.add, K.mul, K.zero
    for i, a in enumerate(f):
        if a == zero:
            continue
        for j, b in enumerate(g):
            if b != zero:
                out[i + j] = add(out[i + j], mul(a, b))
    return trim(out, K)


def pscale(f: tuple, s, K: LevelView) -> tuple:
    return trim([K.mul(s, c) for c in f], K)


def pdivmod(f: tuple, g: tuple, K: LevelView) -> tuple[tuple, tuple]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    if len(r) <= dg:
        return (), tuple(r)
    inv_lc = K.inv(g[-1])
    qt = [K.zero] * (len(r) - dg)
    add, mul, zero = K.add, K.mul, K.zero
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k]
        if c == zero:
            continue
        t = mul(c, inv_lc)
        qt[k - dg] = t
        for i in range(dg + 1):
            r[k - dg + i] = add(r[k - dg + i], mul(t, g[i]))
    return trim(qt, K), trim(r[:dg], K)


def pmod(f: tuple, g: tuple, K: LevelView) -> tuple:
    return pdivmod(f, g, K)[1]


def monic(f: tuple, K: LevelView) -> tuple:
    if not f:
        return f
    return pscale(f, K.inv(f[-1]), K)


def upoly_gcd(f: tuple, g: tuple, K: LevelView) -> tuple:
    """Monic gcd; gcd(0, 0) = 0."""
    f, g = trim(f, K), trim(g, K)
    while g:
        f, g = g, pmod(f, g, K)
    return monic(f, K)


def peval(f: tuple, x, K: LevelView):
    acc = K.zero
    for c in reversed(f):
        acc = K.add(K.mul(acc, x), c)
    return acc


def psq_mod(f: tuple, m: tuple, K: LevelView) -> tuple:
    # characteristic 2: (sum c_i X^i)^2 = sum c_i^2 X^(2i)
    out = [K.zero] * (2 * len(f) - 1) if f else []
    for i, c in enumerate(f):
        out[2 * i] = K.sq(c)
    return pmod(trim(out, K), m, K)


def frobenius_x(m: tuple, K: LevelView, times: int) -> tuple:
    """X^(2^times) mod m."""
    x = pmod((K.zero, K.one), m, K)
    for _ in range(times):
        x = psq_mod(x, m, K)
    return x


def embed_poly(f: tuple, K: LevelView) -> tuple:
    """Coefficients from F_q lifted into the field of ``K``."""
    return tuple(K.embed(c) for c in f)


def upoly_roots(f: tuple, K: LevelView, rng: random.Random | None = None) -> list:
    """All roots of ``f`` lying in the field of ``K``, sorted by their coordinate tuples."""
    f = trim(f, K)
    if not f:
        raise ValueError("the zero polynomial has every element as a root")
    if len(f) == 1:
        return []
    f = monic(f, K)
    # product of the distinct linear factors: gcd(f, X^Q - X)
    xq = frobenius_x(f, K, K.bits)
    g = upoly_gcd(f, padd(xq, (K.zero, K.one), K), K)
    if rng is None:
        rng = random.Random(0x5EED)
    roots: list = []
    _split_linear(g, K, rng, roots)
    for r in roots:
        assert peval(f, r, K) == K.zero
    return sorted(roots, key=lambda r: r if isinstance(r, int) else tuple(reversed(r)))


def _split_linear(g: tuple, K: LevelView, rng: random.Random, out: list) -> None:
    # g is monic and a product of distinct linear factors
    d = degree(g)
    if d <= 0:
        return
    if d == 1:
        out.append(g[0])  # characteristic 2: X + g0 has root g0
        return
    while True:
        delta = K.element(rng.randrange(1, K.size))
        # trace map Tr(delta X) = sum_{i < bits} (delta X)^(2^i) mod g
        t = pmod((K.zero, delta), g, K)
        acc = t
        for _ in range(K.bits - 1):
            t = psq_mod(t, g, K)
            acc = padd(acc, t, K)
        h = upoly_gcd(g, acc, K)
        if 0 < degree(h) < d:
            _split_linear(h, K, rng, out)
            _split_linear(pdivmod(g, h, K)[0], K, rng, out)
            return


def roots_by_enumeration(f: tuple, K: LevelView) -> list:
    """Brute-force root list; only sensible for small fields."""
    return [K.element(i) for i in range(K.size) if peval(f, K.element(i), K) == K.zero]


# ---------------------------------------------------------------------------
# resultants


def bivar_degree(P: dict, var: int) -> int:
    return max((m[var] for m, c in P.items()), default=-1)


def _as_poly_in(P: dict, var: int, K: LevelView) -> list[tuple]:
    """Coefficients of P as a polynomial in ``var`` (each a UniPoly in the other variable)."""
    other = 1 - var
    deg = bivar_degree(P, var)
    cols: list[list] = [[] for _ in range(deg + 1)]
    for mon, c in P.items():
        if c == K.zero:
            continue
        i, j = mon[var], mon[other]
        col = cols[i]
        while len(col) <= j:
            col.append(K.zero)
        col[j] = K.add(col[j], c)
    return [trim(col, K) for col in cols]


def _det_poly(mat: list[list[tuple]], K: LevelView) -> tuple:
    n = len(mat)
    if n == 0:
        return (K.one,)
    if n == 1:
        return mat[0][0]
    total: tuple = ()
    for j in range(n):
        if not mat[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total = padd(total, pmul(mat[0][j], _det_poly(minor, K), K), K)
    return total


def sylvester_resultant(p: list[tuple], q: list[tuple], K: LevelView) -> tuple:
    """Resultant of two polynomials whose coefficients are themselves UniPolys."""
    while p and not p[-1]:
        p = p[:-1]
    while q and not q[-1]:
        q = q[:-1]
    m, n = len(p) - 1, len(q) - 1
    if m < 0 or n < 0:
        return ()
    size = m + n
    mat: list[list[tuple]] = []
    for r in range(n):
        row = [()] * size
        for k, c in enumerate(reversed(p)):
            row[r + k] = c
        mat.append(row)
    for r in range(m):
        row = [()] * size
        for k, c in enumerate(reversed(q)):
            row[r + k] = c
        mat.append(row)
    return _det_poly(mat, K)


def resultant_eliminate(P: dict, Q: dict, K: LevelView, eliminate: int = 0) -> tuple:
    """Res_X(P, Q) (``eliminate=0``) or Res_Y(P, Q) (``eliminate=1``) as a UniPoly in the other variable."""
    res = sylvester_resultant(_as_poly_in(P, eliminate, K), _as_poly_in(Q, eliminate, K), K)
    if not res:
        raise DegenerateSystem("resultant vanishes identically")
    return res


def bivar_mul(P: dict, Q: dict, K: LevelView) -> dict:
    out: dict = {}
    add, mul, zero = K.add, K.mul, K.zero
    for (a, b), c in P.items():
        for (d, e), f in Q.items():
            key = (a + d, b + e)
            out[key] = add(out.get(key, zero), mul(c, f))
    return {k: v for k, v in out.items() if v != zero}


def bivar_add(P: dict, Q: dict, K: LevelView) -> dict:
    out = dict(P)
    for k, v in Q.items():
        out[k] = K.add(out.get(k, K.zero), v)
    return {k: v for k, v in out.items() if v != K.zero}


def bivar_eval(P: dict, x, y, K: LevelView):
    acc = K.zero
    for (i, j), c in P.items():
        t = c
        if i:
            t = K.mul(t, K.pow(x, i))
        if j:
            t = K.mul(t, K.pow(y, j))
        acc = K.add(acc, t)
    return acc


def bivar_substitute(P: dict, var: int, value, K: LevelView) -> tuple:
    """Fix one variable and return the UniPoly in the other."""
    other = 1 - var
    out: list = []
    for mon, c in P.items():
        k = mon[other]
        while len(out) <= k:
            out.append(K.zero)
        v = K.pow(value, mon[var]) if mon[var] else K.one
        out[k] = K.add(out[k], K.mul(c, v))
    return trim(out, K)
