"""DME-(3,2,q): parameters, keys, the encryption composition and public-key expansion.

The encryption map is L3 o F o L2 o E o L1 (the permutation M is the
identity).  Plaintexts and ciphertexts are 6-tuples of F_q ints.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

from .fields import (
    NIST_TOWER,
    Tower,
    TowerParams,
    flatten,
    gen_tower_params,
    get_tower,
    to_ext2,
)
from .linalg import Matrix, column, mat_det, mat_inv, mat_vec, random_invertible
from .polyalg import NotInvertible, exp_matrix_inverse


class DMEError(ValueError):
    pass


class ZeroBlock(DMEError):
    pass


class InvalidCiphertext(DMEError):
    pass


Monomial = tuple  # six nonnegative exponents

E_PATTERN = ((1, 1, 0), (1, 0, 1), (0, 1, 1))

NIST_E = ((2 ** 24, 2 ** 59, 0), (2 ** 21, 0, 2 ** 28), (0, 2 ** 29, 2 ** 65))
NIST_F = ((2 ** 50, 2 ** 24), (2 ** 7, 2 ** 88))


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


@dataclass(frozen=True)
class SystemParams:
    tower: TowerParams
    E: tuple
    F: tuple

    def __post_init__(self):
        for i in range(3):
            for j in range(3):
                e = self.E[i][j]
                if E_PATTERN[i][j] and not _is_pow2(e):
                    raise ValueError(f"E[{i}][{j}] = {e} is not a power of 2")
                if not E_PATTERN[i][j] and e != 0:
                    raise ValueError(f"E[{i}][{j}] must be a structural zero")
        for row in self.F:
            for f in row:
                if not _is_pow2(f):
                    raise ValueError(f"F entry {f} is not a power of 2")
        try:
            exp_matrix_inverse(self.E, self.q ** 2 - 1)
            exp_matrix_inverse(self.F, self.q ** 3 - 1)
            exp_matrix_inverse(self.F, self.q - 1)
        except NotInvertible as exc:
            raise ValueError(f"exponent matrices are not invertible: {exc}") from None

    @property
    def w(self) -> int:
        return self.tower.w

    @property
    def q(self) -> int:
        return self.tower.q

    @cached_property
    def E_inv(self) -> tuple:
        return exp_matrix_inverse(self.E, self.q ** 2 - 1)

    @cached_property
    def F_inv(self) -> tuple:
        return exp_matrix_inverse(self.F, self.q ** 3 - 1)

    @cached_property
    def F_inv_base(self) -> tuple:
        """Inverse of F modulo q - 1, for pair exponentiation on F_q^*."""
        return exp_matrix_inverse(self.F, self.q - 1)

    @property
    def field(self) -> Tower:
        return get_tower(self.tower)


def gen_system_params(w: int, seed: int = 0, preset: str | None = None) -> SystemParams:
    """NIST preset, or random power-of-two E, F in the fixed zero pattern."""
    if preset is not None:
        if preset != "nist":
            raise ValueError(f"unknown preset {preset!r}")
        if w != 48:
            raise ValueError("the nist preset is defined for w = 48 only")
        return SystemParams(NIST_TOWER, NIST_E, NIST_F)
    tower = gen_tower_params(w, seed)
    rng = random.Random(f"dme32-exponents:{w}:{seed}")
    q = 1 << w
    while True:
        E = tuple(tuple(1 << rng.randrange(2 * w) if E_PATTERN[i][j] else 0 for j in range(3))
                  for i in range(3))
        F = tuple(tuple(1 << rng.randrange(3 * w) for _ in range(2)) for _ in range(2))
        detE = E[0][0] * E[1][2] * E[2][1] + E[0][1] * E[1][0] * E[2][2]
        detF = F[0][0] * F[1][1] - F[0][1] * F[1][0]
        if gcd(detE, q * q - 1) == 1 and gcd(detF, q ** 3 - 1) == 1:
            return SystemParams(tower, E, F)


# ---------------------------------------------------------------------------
# keys


KEY_BLOCKS = ("L11", "L12", "L13", "L21", "L22", "L31", "L32")


@dataclass(frozen=True)
class PrivateKey:
    L11: Matrix
    L12: Matrix
    L13: Matrix
    L21: Matrix
    L22: Matrix
    L31: Matrix
    L32: Matrix

    def blocks(self) -> tuple:
        return tuple(getattr(self, name) for name in KEY_BLOCKS)

    def replace(self, **changes) -> "PrivateKey":
        fields = {name: getattr(self, name) for name in KEY_BLOCKS}
        fields.update(changes)
        return PrivateKey(**fields)

    def is_valid(self, params: SystemParams) -> bool:
        fq = params.field.fq
        return all(mat_det(fq, b) for b in self.blocks())


def keygen(params: SystemParams, seed: int) -> PrivateKey:
    rng = random.Random(seed)
    fq = params.field.fq
    sizes = (2, 2, 2, 3, 3, 3, 3)
    return PrivateKey(*(random_invertible(fq, n, rng) for n in sizes))


@lru_cache(maxsize=256)
def _inverse_blocks(sk: PrivateKey, tower: TowerParams) -> tuple:
    fq = get_tower(tower).fq
    return tuple(mat_inv(fq, b) for b in sk.blocks())


# ---------------------------------------------------------------------------
# maps


def exp_map(tower: Tower, level: int, M: Sequence[Sequence[int]], blocks: Sequence) -> tuple:
    """Matrix exponentiation: component i is prod_j blocks[j]^M[i][j]."""
    if len(blocks) != len(M):
        raise ValueError("block count does not match the matrix size")
    for b in blocks:
        if tower.is_zero(level, b):
            raise ZeroBlock("matrix exponentiation needs nonzero blocks")
    out = []
    for row in M:
        acc = None
        for e, b in zip(row, blocks):
            if e:
                t = tower.pow(level, b, e)
                acc = t if acc is None else tower.mul(level, acc, t)
        out.append(acc if acc is not None else tower.one(level))
    return tuple(out)


def encrypt_private(sk: PrivateKey, params: SystemParams, m: Sequence[int]) -> tuple:
    T = params.field
    fq = T.fq
    if len(m) != 6:
        raise ValueError("plaintext must have 6 coordinates")
    for k in range(3):
        if m[2 * k] == 0 and m[2 * k + 1] == 0:
            raise ZeroBlock(f"plaintext block {k + 1} is zero")
    x = (mat_vec(fq, sk.L11, m[0:2]), mat_vec(fq, sk.L12, m[2:4]), mat_vec(fq, sk.L13, m[4:6]))
    y = flatten(exp_map(T, 2, params.E, x))
    u = (mat_vec(fq, sk.L21, y[0:3]), mat_vec(fq, sk.L22, y[3:6]))
    assert any(u[0]) and any(u[1]), "intermediate F_{q^3} block vanished"
    v = flatten(exp_map(T, 3, params.F, u))
    return mat_vec(fq, sk.L31, v[0:3]) + mat_vec(fq, sk.L32, v[3:6])


def decrypt(sk: PrivateKey, params: SystemParams, ct: Sequence[int]) -> tuple:
    T = params.field
    fq = T.fq
    if len(ct) != 6:
        raise ValueError("ciphertext must have 6 coordinates")
    i11, i12, i13, i21, i22, i31, i32 = _inverse_blocks(sk, params.tower)
    v = (mat_vec(fq, i31, ct[0:3]), mat_vec(fq, i32, ct[3:6]))
    if not any(v[0]) or not any(v[1]):
        raise InvalidCiphertext("zero F_{q^3} block before the F stage")
    u = flatten(exp_map(T, 3, params.F_inv, v))
    y = to_ext2(mat_vec(fq, i21, u[0:3]) + mat_vec(fq, i22, u[3:6]))
    if any(not any(b) for b in y):
        raise InvalidCiphertext("zero F_{q^2} block before the E stage")
    x = exp_map(T, 2, params.E_inv, y)
    return mat_vec(fq, i11, x[0]) + mat_vec(fq, i12, x[1]) + mat_vec(fq, i13, x[2])


# ---------------------------------------------------------------------------
# public key


def canonical_exponent(e: int, q: int) -> int:
    return 0 if e == 0 else (e - 1) % (q - 1) + 1


def canonical_monomial(exps: Iterable[int], q: int) -> Monomial:
    return tuple(0 if e == 0 else (e - 1) % (q - 1) + 1 for e in exps)


@dataclass(frozen=True)
class PublicKey:
    """Six polynomials over F_q; each is a sorted tuple of (monomial, coefficient)."""

    params: SystemParams
    polys: tuple

    @classmethod
    def from_dicts(cls, params: SystemParams, dicts: Sequence[dict]) -> "PublicKey":
        if len(dicts) != 6:
            raise ValueError("a public key has six components")
        q = params.q
        polys = []
        for d in dicts:
            merged: dict = {}
            for mon, c in d.items():
                key = canonical_monomial(mon, q)
                merged[key] = merged.get(key, 0) ^ c
            polys.append(tuple(sorted((m, c) for m, c in merged.items() if c)))
        return cls(params, tuple(polys))

    @cached_property
    def dicts(self) -> tuple:
        return tuple(dict(p) for p in self.polys)

    @cached_property
    def _compiled(self) -> tuple:
        return tuple(tuple((c, tuple((i, e) for i, e in enumerate(mon) if e)) for mon, c in p)
                     for p in self.polys)

    def num_terms(self) -> int:
        return sum(len(p) for p in self.polys)


def _mono(i: int, e: int = 1) -> Monomial:
    return tuple(e if k == i else 0 for k in range(6))


def _frob(poly: dict, T: Tower, level: int, k: int) -> dict:
    """(sum c m)^k for k a power of 2: coefficients and exponents are raised separately."""
    return {tuple(x * k for x in mon): T.pow(level, c, k) for mon, c in poly.items()}


def _pmul(P: dict, Q: dict, T: Tower, level: int) -> dict:
    out: dict = {}
    zero = T.zero(level)
    mul, add = T.mul, T.add
    for m1, c1 in P.items():
        for m2, c2 in Q.items():
            key = tuple(a + b for a, b in zip(m1, m2))
            prev = out.get(key)
            prod = mul(level, c1, c2)
            out[key] = prod if prev is None else add(level, prev, prod)
    return {k: v for k, v in out.items() if v != zero}


def _exp_stage(polys: Sequence[dict], M, T: Tower, level: int) -> list:
    out = []
    for row in M:
        acc = None
        for e, P in zip(row, polys):
            if e:
                t = _frob(P, T, level, e)
                acc = t if acc is None else _pmul(acc, t, T, level)
        out.append(acc)
    return out


def _coordinate_polys(P: dict, level: int) -> list:
    return [{m: c[k] for m, c in P.items() if c[k]} for k in range(level)]


def _combine(T: Tower, coords: Sequence[dict], coefs: Sequence, level: int) -> dict:
    """sum_k coefs[k] * coords[k], coefs living at ``level`` and coords over F_q."""
    out: dict = {}
    zero = T.zero(level)
    for P, col in zip(coords, coefs):
        for m, s in P.items():
            t = T.scale(level, s, col)
            prev = out.get(m)
            out[m] = t if prev is None else T.add(level, prev, t)
    return {k: v for k, v in out.items() if v != zero}


def derive_public_key(sk: PrivateKey, params: SystemParams) -> PublicKey:
    """Expand L3 o F o L2 o E o L1 symbolically into six F_q polynomials."""
    T = params.field
    # L1 blocks as linear forms over F_{q^2}
    X = []
    for k, L in enumerate((sk.L11, sk.L12, sk.L13)):
        P = {}
        for j in range(2):
            col = column(L, j)
            if any(col):
                P[_mono(2 * k + j)] = col
        X.append(P)
    Y = _exp_stage(X, params.E, T, 2)
    yc = [c for P in Y for c in _coordinate_polys(P, 2)]
    U = [
        _combine(T, yc[0:3], [column(sk.L21, j) for j in range(3)], 3),
        _combine(T, yc[3:6], [column(sk.L22, j) for j in range(3)], 3),
    ]
    V = _exp_stage(U, params.F, T, 3)
    vc = [c for P in V for c in _coordinate_polys(P, 3)]
    fq = T.fq
    outs = []
    for L, coords in ((sk.L31, vc[0:3]), (sk.L32, vc[3:6])):
        for r in range(3):
            acc: dict = {}
            for k in range(3):
                s = L[r][k]
                if s:
                    for m, c in coords[k].items():
                        acc[m] = acc.get(m, 0) ^ fq.mul(s, c)
            outs.append(acc)
    return PublicKey.from_dicts(params, outs)


def eval_public(pk: PublicKey, m: Sequence[int]) -> tuple:
    fq = pk.params.field.fq
    mul, pw = fq.mul, fq.pow
    cache: dict = {}
    out = []
    for poly in pk._compiled:
        acc = 0
        for c, factors in poly:
            t = c
            for i, e in factors:
                key = (i, e)
                p = cache.get(key)
                if p is None:
                    p = cache[key] = pw(m[i], e)
                if not p:
                    t = 0
                    break
                t = mul(t, p)
            acc ^= t
        out.append(acc)
    return tuple(out)


def coeff_lookup(pk: PublicKey, component: int, mon: Sequence[int]) -> int:
    """Coefficient of ``mon`` in component 1..6 (zero when absent)."""
    if not 1 <= component <= 6:
        raise IndexError(f"component must be in 1..6, got {component}")
    return pk.dicts[component - 1].get(canonical_monomial(mon, pk.params.q), 0)


def structural_support(params: SystemParams) -> tuple:
    """Monomials that can appear in each component for any key, from E and F alone."""
    q = params.q
    X = [{_mono(2 * k), _mono(2 * k + 1)} for k in range(3)]

    def stage(sets, M):
        out = []
        for row in M:
            acc = {(0,) * 6}
            for e, S in zip(row, sets):
                if e:
                    acc = {tuple(a + b * e for a, b in zip(m1, m2)) for m1 in acc for m2 in S}
            out.append(acc)
        return out

    Y = stage(X, params.E)
    U = [Y[0] | Y[1], Y[1] | Y[2]]
    V = stage(U, params.F)
    top = frozenset(canonical_monomial(m, q) for m in V[0])
    bottom = frozenset(canonical_monomial(m, q) for m in V[1])
    return (top,) * 3 + (bottom,) * 3


def precompose_blocks(pk: PublicKey, mats: Sequence) -> PublicKey:
    """Public key of x -> P(A x) where A = diag(mats) acts on the pairs (x1,x2), (x3,x4), (x5,x6).

    ``None`` entries stand for the identity.  Powers of the substituted linear
    forms are expanded with Lucas' theorem (binomial coefficients mod 2).
    """
    fq = pk.params.field.fq

    def fpow(a: int, e: int) -> int:
        return 1 if e == 0 else fq.pow(a, e)

    def submasks(e: int):
        s = e
        while True:
            yield s
            if s == 0:
                return
            s = (s - 1) & e

    outs = []
    for poly in pk.polys:
        terms = dict(poly)
        for k, A in enumerate(mats):
            if A is None:
                continue
            (p, r), (s, t) = A
            a, b = 2 * k, 2 * k + 1
            new: dict = {}
            for mon, c in terms.items():
                e1, e2 = mon[a], mon[b]
                # x_a -> p x_a + r x_b,  x_b -> s x_a + t x_b
                for i in submasks(e1):
                    c1 = fq.mul(fpow(p, i), fpow(r, e1 - i))
                    if not c1:
                        continue
                    for j in submasks(e2):
                        c2 = fq.mul(fpow(s, j), fpow(t, e2 - j))
                        if not c2:
                            continue
                        nm = list(mon)
                        nm[a] = i + j
                        nm[b] = (e1 - i) + (e2 - j)
                        key = canonical_monomial(nm, pk.params.q)
                        new[key] = new.get(key, 0) ^ fq.mul(c, fq.mul(c1, c2))
            terms = {m: c for m, c in new.items() if c}
        outs.append(terms)
    return PublicKey.from_dicts(pk.params, outs)
