"""Arithmetic in the binary field tower F_q = GF(2^w), F_{q^2}, F_{q^3}.

Elements of F_q are plain ints (bit i is the coefficient of x^i).  Elements
of F_{q^2} are pairs ``(c0, c1)`` in the basis (1, T) and elements of
F_{q^3} are triples ``(c0, c1, c2)`` in the basis (1, S, S^2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

Ext2 = Tuple[int, int]
Ext3 = Tuple[int, int, int]

TABLE_MAX_W = 16


class FieldError(ArithmeticError):
    pass


class ZeroInverse(FieldError, ZeroDivisionError):
    pass


class UndefinedPower(FieldError):
    pass


# ---------------------------------------------------------------------------
# GF(2)[x] on ints


_SPREAD = bytes.maketrans(b"01", b"\x00\x01")
_PACK = bytes.maketrans(b"\x00\x01", b"01")
_SLOT_BYTES = 4096
_SLOT_MASK = int.from_bytes(b"\x01" * _SLOT_BYTES, "big")


def spread(a: int) -> int:
    """Bit i of ``a`` moved to bit 8i."""
    return int.from_bytes(format(a, "b").encode().translate(_SPREAD), "big")


def _clmul_loop(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def clmul_spread(sa: int, sb: int) -> int:
    """Carry-less product of two spread operands.

    An ordinary product of spread operands counts, in each byte, the terms
    contributing to one output bit; its parity is the carry-less result.
    Valid while no byte count reaches 256, i.e. the shorter operand has
    fewer than 256 bits.
    """
    p = (sa * sb) & _SLOT_MASK
    if not p:
        return 0
    return int(p.to_bytes((p.bit_length() + 7) // 8, "big").translate(_PACK), 2)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit vectors."""
    la, lb = a.bit_length(), b.bit_length()
    if not la or not lb:
        return 0
    if min(la, lb) > 255 or la + lb > 8 * _SLOT_BYTES:
        return _clmul_loop(a, b)
    return clmul_spread(spread(a), spread(b))


_SQUARE = str.maketrans({"0": "00", "1": "01"})


def clsquare(a: int) -> int:
    """Carry-less square: bit i moves to bit 2i."""
    return int(format(a, "b").translate(_SQUARE), 2) if a else 0


def gf2_inverse(a: int, m: int) -> int:
    """Inverse of a modulo an irreducible m by the binary-polynomial extended Euclid algorithm."""
    u, v = gf2_mod(a, m), m
    if not u:
        raise ZeroDivisionError("zero has no inverse")
    g1, g2 = 1, 0
    while u != 1:
        j = u.bit_length() - v.bit_length()
        if j < 0:
            u, v, g1, g2 = v, u, g2, g1
            j = -j
        u ^= v << j
        g1 ^= g2 << j
    return gf2_mod(g1, m)


def gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_is_irreducible(f: int) -> bool:
    """Ben-Or test: gcd(f, x^(2^i) - x mod f) = 1 for 1 <= i <= deg/2."""
    n = f.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if not f & 1:
        return False
    u = 2
    for _ in range(n // 2):
        u = gf2_mod(clmul(u, u), f)
        if gf2_gcd(f, u ^ 2) != 1:
            return False
    return True


def poly_from_exponents(exps: Sequence[int]) -> int:
    v = 0
    for e in exps:
        v ^= 1 << e
    return v


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# parameter types


@dataclass(frozen=True)
class BaseFieldParams:
    w: int
    modulus: int

    def __post_init__(self):
        if not 3 <= self.w <= 64:
            raise ValueError(f"w must lie in [3, 64], got {self.w}")
        if self.modulus.bit_length() != self.w + 1:
            raise ValueError("base modulus degree does not match w")

    @property
    def q(self) -> int:
        return 1 << self.w


@dataclass(frozen=True)
class TowerParams:
    base: BaseFieldParams
    quad: Tuple[int, int]  # (a, b):  T^2 + a T + b
    cubic: Tuple[int, int, int]  # (c, d, e):  S^3 + c S^2 + d S + e

    @property
    def w(self) -> int:
        return self.base.w

    @property
    def q(self) -> int:
        return self.base.q


NIST_BASE_MODULUS = poly_from_exponents([48, 28, 27, 1, 0])
NIST_QUAD = (
    poly_from_exponents([43, 38, 36, 34, 29, 26, 25, 24, 23, 22, 21, 20, 19, 13, 9, 8, 4, 3, 1, 0]),
    poly_from_exponents([47, 46, 45, 43, 40, 39, 38, 37, 35, 31, 30, 27, 26, 24, 23, 22, 21, 18,
                         17, 16, 14, 9, 8, 7, 3, 2, 0]),
)
NIST_CUBIC = (
    poly_from_exponents([43, 42, 41, 40, 38, 37, 36, 34, 33, 29, 26, 24, 22, 20, 19, 17, 15, 14,
                         13, 12, 11, 8, 5, 3, 2, 1]),
    poly_from_exponents([46, 45, 44, 41, 38, 37, 33, 32, 31, 30, 25, 21, 20, 17, 16, 15, 14, 12,
                         10, 9, 8, 7, 4, 3, 2, 1, 0]),
    poly_from_exponents([47, 46, 42, 39, 38, 35, 32, 26, 25, 24, 23, 20, 19, 17, 15, 14, 13, 12,
                         11, 9, 8, 6, 5, 2, 1]),
)
NIST_TOWER = TowerParams(BaseFieldParams(48, NIST_BASE_MODULUS), NIST_QUAD, NIST_CUBIC)


# ---------------------------------------------------------------------------
# F_q


class BaseField:
    """GF(2^w) modulo an irreducible polynomial.

    Widths up to ``TABLE_MAX_W`` use exp/log tables; wider fields use
    carry-less multiplication followed by folding reduction.
    """

    def __init__(self, params: BaseFieldParams):
        self.params = params
        self.w = w = params.w
        self.q = 1 << w
        self.order = self.q - 1
        self.modulus = params.modulus
        self.mask = self.q - 1
        # fold tables: chunk k of the part above x^w, reduced modulo the modulus
        chunk = 16 if w > TABLE_MAX_W else 8
        self._chunk, self._chunk_mask = chunk, (1 << chunk) - 1
        self._folds = [self._fold_table(w + chunk * k, chunk) for k in range((w + chunk - 1) // chunk)]
        self._fold_bits = chunk * len(self._folds)
        self.exp = self.log = None
        self._frob_tables: dict = {}
        if w <= TABLE_MAX_W:
            self._build_tables()
        else:
            self.mul = self._mul_wide

    def _mul_wide(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        return self.reduce(clmul_spread(spread(a), spread(b)))

    def _fold_table(self, shift: int, bits: int) -> list[int]:
        # entry x is (x << shift) mod the modulus, filled in by linearity
        basis = [gf2_mod(1 << (shift + i), self.modulus) for i in range(bits)]
        tbl = [0] * (1 << bits)
        for x in range(1, 1 << bits):
            low = x & -x
            tbl[x] = tbl[x ^ low] ^ basis[low.bit_length() - 1]
        return tbl

    def reduce(self, r: int) -> int:
        """Residue of a polynomial of degree below 2w."""
        hi = r >> self.w
        if not hi:
            return r
        if hi >> self._fold_bits:
            return gf2_mod(r, self.modulus)
        r &= self.mask
        chunk, cmask = self._chunk, self._chunk_mask
        for tbl in self._folds:
            r ^= tbl[hi & cmask]
            hi >>= chunk
        return r

    def _clmul_reduce(self, a: int, b: int) -> int:
        return self.reduce(clmul(a, b))

    def _build_tables(self):
        n = self.order
        g = 2
        factors = _prime_factors(n)
        while True:
            if all(self._slow_pow(g, n // p) != 1 for p in factors):
                break
            g += 1
        exp = [0] * (2 * n + 1)
        log = [0] * self.q
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._clmul_reduce(x, g)
        for i in range(n, 2 * n + 1):
            exp[i] = exp[i - n]
        self.generator = g
        self.exp = exp
        self.log = log

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._clmul_reduce(r, a)
            a = self._clmul_reduce(a, a)
            e >>= 1
        return r

    def mul(self, a: int, b: int) -> int:
        if self.exp is not None:
            if a == 0 or b == 0:
                return 0
            return self.exp[self.log[a] + self.log[b]]
        return self.reduce(clmul(a, b))

    def sq(self, a: int) -> int:
        if self.exp is not None:
            return self.mul(a, a)
        return self.reduce(clsquare(a))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("inverse of zero in F_q")
        if self.exp is not None:
            return self.exp[self.order - self.log[a]]
        return gf2_inverse(a, self.modulus)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        if a == 0:
            if e == 0:
                raise UndefinedPower("0^0")
            return 0
        e %= self.order
        if self.exp is not None:
            return self.exp[(self.log[a] * e) % self.order]
        if e and not e & (e - 1):
            return self.frob(a, e.bit_length() - 1)
        return self._slow_pow(a, e)

    def frob(self, a: int, k: int) -> int:
        """a^(2^k).  Squaring is F_2-linear, so wide fields use byte tables per k."""
        k %= self.w
        if self.exp is not None:
            return self.exp[(self.log[a] << k) % self.order] if a else 0
        tables = self._frob_tables.get(k)
        if tables is None:
            tables = self._frob_tables[k] = self._build_frob_tables(k)
        r = 0
        for tbl in tables:
            r ^= tbl[a & 0xFF]
            a >>= 8
        return r

    def _build_frob_tables(self, k: int) -> list[list[int]]:
        images = []
        for i in range(self.w):
            x = 1 << i
            for _ in range(k):
                x = self.reduce(clsquare(x))
            images.append(x)
        tables = []
        for lo in range(0, self.w, 8):
            basis = images[lo:lo + 8]
            tbl = [0] * 256
            for x in range(1, 1 << len(basis)):
                low = x & -x
                tbl[x] = tbl[x ^ low] ^ basis[low.bit_length() - 1]
            tables.append(tbl)
        return tables

    def sqrt(self, a: int) -> int:
        # squaring is a bijection; its inverse is x -> x^(q/2)
        for _ in range(self.w - 1):
            a = self.sq(a)
        return a

    def trace(self, a: int) -> int:
        t = a
        x = a
        for _ in range(self.w - 1):
            x = self.sq(x)
            t ^= x
        return t

    def random(self, rng: random.Random, nonzero: bool = False) -> int:
        if nonzero:
            return rng.randrange(1, self.q)
        return rng.randrange(self.q)


# ---------------------------------------------------------------------------
# tower validity


def quad_is_irreducible(fq: BaseField, a: int, b: int) -> bool:
    """T^2 + aT + b over F_q, characteristic 2: irreducible iff a != 0 and Tr(b/a^2) = 1."""
    if a == 0 or b == 0:
        return False
    return fq.trace(fq.div(b, fq.sq(a))) == 1


def _cubic_mulmod(fq: BaseField, u, v, c, d, e):
    p = [0] * 5
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                if vj:
                    p[i + j] ^= fq.mul(ui, vj)
    for k in (4, 3):
        pk = p[k]
        if pk:
            p[k - 1] ^= fq.mul(c, pk)
            p[k - 2] ^= fq.mul(d, pk)
            p[k - 3] ^= fq.mul(e, pk)
    return p[0], p[1], p[2]


def cubic_is_irreducible(fq: BaseField, c: int, d: int, e: int) -> bool:
    """A cubic is irreducible iff it has no root in F_q, i.e. X^q = X mod f has no common factor."""
    if e == 0:
        return False
    x = (0, 1, 0)
    for _ in range(fq.w):
        x = _cubic_mulmod(fq, x, x, c, d, e)
    # r = X^q - X mod f; gcd(f, r) = 1 decides
    r = [x[0], x[1] ^ 1, x[2]]
    f = [e, d, c, 1]
    return _fq_poly_gcd_degree(fq, f, r) == 0


def _fq_poly_gcd_degree(fq: BaseField, f, g) -> int:
    def trim(p):
        p = list(p)
        while p and p[-1] == 0:
            p.pop()
        return p

    f, g = trim(f), trim(g)
    while g:
        inv_lc = fq.inv(g[-1])
        while len(f) >= len(g):
            t = fq.mul(f[-1], inv_lc)
            shift = len(f) - len(g)
            for i, gi in enumerate(g):
                f[shift + i] ^= fq.mul(t, gi)
            f = trim(f)
        f, g = g, f
    return len(f) - 1


def tower_is_valid(params: TowerParams) -> bool:
    if not gf2_is_irreducible(params.base.modulus):
        return False
    fq = BaseField(params.base)
    return quad_is_irreducible(fq, *params.quad) and cubic_is_irreducible(fq, *params.cubic)


def gen_tower_params(w: int, seed: int = 0, preset: str | None = None) -> TowerParams:
    """Return a tower for width ``w``; ``preset="nist"`` gives the w = 48 submission tower."""
    if preset is not None:
        if preset != "nist":
            raise ValueError(f"unknown preset {preset!r}")
        if w != 48:
            raise ValueError("the nist preset is defined for w = 48 only")
        return NIST_TOWER
    if not 3 <= w <= 64:
        raise ValueError(f"w must lie in [3, 64], got {w}")
    rng = random.Random(seed)
    while True:
        f = (1 << w) | (rng.getrandbits(w - 1) << 1) | 1
        if gf2_is_irreducible(f):
            break
    base = BaseFieldParams(w, f)
    fq = BaseField(base)
    q = 1 << w
    while True:
        a, b = rng.randrange(1, q), rng.randrange(1, q)
        if quad_is_irreducible(fq, a, b):
            break
    while True:
        c, d, e = rng.randrange(q), rng.randrange(q), rng.randrange(1, q)
        if cubic_is_irreducible(fq, c, d, e):
            break
    return TowerParams(base, (a, b), (c, d, e))


# ---------------------------------------------------------------------------
# the tower


class Tower:
    """Arithmetic at tower levels 1 (F_q), 2 (F_{q^2}) and 3 (F_{q^3})."""

    def __init__(self, params: TowerParams):
        self.params = params
        self.fq = fq = BaseField(params.base)
        self.w = fq.w
        self.q = fq.q
        self.qa, self.qb = params.quad
        self.cc, self.cd, self.ce = params.cubic
        self.orders = {1: self.q - 1, 2: self.q ** 2 - 1, 3: self.q ** 3 - 1}
        self._levels = {}
        self._frob_images: dict = {}
        if self.fq.exp is None and 3 * self.w < 256:
            # wide fields: one packed carry-less product per extension multiplication
            sh = self._sh = 2 * self.w
            self._slot = (1 << sh) - 1
            self._s_ba = spread(self.qb | self.qa << sh)
            self._s_edc = spread(self.ce | self.cd << sh | self.cc << 2 * sh)
            self.mul2, self.sq2 = self._mul2_packed, self._sq2_packed
            self.mul3, self.sq3 = self._mul3_packed, self._sq3_packed

    def _fold2(self, P: int) -> Ext2:
        sh, slot, red = self._sh, self._slot, self.fq.reduce
        r2 = red(P >> 2 * sh)
        if r2:
            P ^= clmul_spread(spread(r2), self._s_ba)
        return (red(P & slot), red((P >> sh) & slot))

    def _mul2_packed(self, x: Ext2, y: Ext2) -> Ext2:
        sh = self._sh
        return self._fold2(clmul_spread(spread(x[0] | x[1] << sh), spread(y[0] | y[1] << sh)))

    def _sq2_packed(self, x: Ext2) -> Ext2:
        return self._fold2(clsquare(x[0] | x[1] << self._sh))

    def _fold3(self, P: int) -> Ext3:
        sh, slot, red = self._sh, self._slot, self.fq.reduce
        r4 = red(P >> 4 * sh)
        if r4:
            P ^= clmul_spread(spread(r4), self._s_edc) << sh
        r3 = red((P >> 3 * sh) & slot)
        if r3:
            P ^= clmul_spread(spread(r3), self._s_edc)
        return (red(P & slot), red((P >> sh) & slot), red((P >> 2 * sh) & slot))

    def _mul3_packed(self, x: Ext3, y: Ext3) -> Ext3:
        sh = self._sh
        return self._fold3(clmul_spread(spread(x[0] | x[1] << sh | x[2] << 2 * sh),
                                        spread(y[0] | y[1] << sh | y[2] << 2 * sh)))

    def _sq3_packed(self, x: Ext3) -> Ext3:
        sh = self._sh
        return self._fold3(clsquare(x[0] | x[1] << sh | x[2] << 2 * sh))

    # -- level 2 -----------------------------------------------------------

    def mul2(self, x: Ext2, y: Ext2) -> Ext2:
        m = self.fq.mul
        x0, x1 = x
        y0, y1 = y
        hh = m(x1, y1)
        return (m(x0, y0) ^ m(hh, self.qb), m(x0, y1) ^ m(x1, y0) ^ m(hh, self.qa))

    def sq2(self, x: Ext2) -> Ext2:
        m = self.fq.mul
        x0, x1 = x
        hh = m(x1, x1)
        return (m(x0, x0) ^ m(hh, self.qb), m(hh, self.qa))

    def inv2(self, x: Ext2) -> Ext2:
        m = self.fq.mul
        x0, x1 = x
        if x0 == 0 and x1 == 0:
            raise ZeroInverse("inverse of zero in F_{q^2}")
        # conjugate is x^q = (x0 + a x1) + x1 T
        c0 = x0 ^ m(self.qa, x1)
        norm = m(x0, c0) ^ m(m(x1, x1), self.qb)
        ni = self.fq.inv(norm)
        return (m(c0, ni), m(x1, ni))

    # -- level 3 -----------------------------------------------------------

    def mul3(self, x: Ext3, y: Ext3) -> Ext3:
        m = self.fq.mul
        x0, x1, x2 = x
        y0, y1, y2 = y
        p0 = m(x0, y0)
        p1 = m(x0, y1) ^ m(x1, y0)
        p2 = m(x0, y2) ^ m(x1, y1) ^ m(x2, y0)
        p3 = m(x1, y2) ^ m(x2, y1)
        p4 = m(x2, y2)
        c, d, e = self.cc, self.cd, self.ce
        if p4:
            p3 ^= m(c, p4)
            p2 ^= m(d, p4)
            p1 ^= m(e, p4)
        if p3:
            p2 ^= m(c, p3)
            p1 ^= m(d, p3)
            p0 ^= m(e, p3)
        return (p0, p1, p2)

    def sq3(self, x: Ext3) -> Ext3:
        m = self.fq.mul
        x0, x1, x2 = x
        p0, p2, p4 = m(x0, x0), m(x1, x1), m(x2, x2)
        p1 = p3 = 0
        c, d, e = self.cc, self.cd, self.ce
        if p4:
            p3 = m(c, p4)
            p2 ^= m(d, p4)
            p1 = m(e, p4)
        if p3:
            p2 ^= m(c, p3)
            p1 ^= m(d, p3)
            p0 ^= m(e, p3)
        return (p0, p1, p2)

    def inv3(self, x: Ext3) -> Ext3:
        if not any(x):
            raise ZeroInverse("inverse of zero in F_{q^3}")
        m = self.fq.mul
        g = self.mul_matrix_g(x, check=False)
        (g00, g01, g02), (g10, g11, g12), (g20, g21, g22) = g
        c0 = m(g11, g22) ^ m(g12, g21)
        c1 = m(g10, g22) ^ m(g12, g20)
        c2 = m(g10, g21) ^ m(g11, g20)
        det = m(g00, c0) ^ m(g01, c1) ^ m(g02, c2)
        di = self.fq.inv(det)
        return (m(c0, di), m(c1, di), m(c2, di))

    # -- generic -----------------------------------------------------------

    def zero(self, level: int):
        return 0 if level == 1 else (0,) * level

    def one(self, level: int):
        return 1 if level == 1 else (1,) + (0,) * (level - 1)

    def is_zero(self, level: int, a) -> bool:
        return a == 0 if level == 1 else not any(a)

    def add(self, level: int, a, b):
        if level == 1:
            return a ^ b
        return tuple(x ^ y for x, y in zip(a, b))

    def mul(self, level: int, a, b):
        if level == 1:
            return self.fq.mul(a, b)
        if level == 2:
            return self.mul2(a, b)
        if level == 3:
            return self.mul3(a, b)
        raise ValueError(f"bad tower level {level}")

    def sq(self, level: int, a):
        if level == 1:
            return self.fq.sq(a)
        if level == 2:
            return self.sq2(a)
        return self.sq3(a)

    def inv(self, level: int, a):
        if level == 1:
            return self.fq.inv(a)
        if level == 2:
            return self.inv2(a)
        if level == 3:
            return self.inv3(a)
        raise ValueError(f"bad tower level {level}")

    def div(self, level: int, a, b):
        return self.mul(level, a, self.inv(level, b))

    def pow(self, level: int, a, e: int):
        """a^e with arbitrary-precision e, reduced modulo q^level - 1 here and nowhere else."""
        if level == 1:
            return self.fq.pow(a, e)
        if e < 0:
            raise ValueError("negative exponent")
        if self.is_zero(level, a):
            if e == 0:
                raise UndefinedPower("0^0")
            return a
        e %= self.orders[level]
        if e and not e & (e - 1):
            return self.frob(level, a, e.bit_length() - 1)
        mul = self.mul2 if level == 2 else self.mul3
        sq = self.sq2 if level == 2 else self.sq3
        result = self.one(level)
        for bit in bin(e)[2:]:
            result = sq(result)
            if bit == "1":
                result = mul(result, a)
        return result

    def frob(self, level: int, a, k: int):
        """a^(2^k) as sum_i a_i^(2^k) (basis_i)^(2^k), since squaring is additive."""
        if level == 1:
            return self.fq.frob(a, k)
        k %= self.w * level
        images = self._frob_images.get((level, k))
        if images is None:
            sq = self.sq2 if level == 2 else self.sq3
            images = []
            for i in range(level):
                x = tuple(int(j == i) for j in range(level))
                for _ in range(k):
                    x = sq(x)
                images.append(x)
            self._frob_images[(level, k)] = images
        fq = self.fq
        out = [0] * level
        for ai, img in zip(a, images):
            if ai:
                ai = fq.frob(ai, k)
                for j in range(level):
                    out[j] ^= fq.mul(ai, img[j])
        return tuple(out)

    def scale(self, level: int, s: int, a):
        """Product of an F_q scalar and an element of the given level."""
        if level == 1:
            return self.fq.mul(s, a)
        m = self.fq.mul
        return tuple(m(s, x) for x in a)

    def embed(self, level: int, s: int):
        """F_q inside F_{q^level}."""
        return s if level == 1 else (s,) + (0,) * (level - 1)

    def random(self, level: int, rng: random.Random, nonzero: bool = False):
        q = self.q
        while True:
            a = rng.randrange(q) if level == 1 else tuple(rng.randrange(q) for _ in range(level))
            if not nonzero or not self.is_zero(level, a):
                return a

    def level(self, k: int) -> "LevelView":
        view = self._levels.get(k)
        if view is None:
            view = self._levels[k] = LevelView(self, k)
        return view

    # -- multiplication matrices --------------------------------------------

    def mul_matrix_h(self, alpha: Ext2, check: bool = True):
        """Matrix of multiplication by alpha on coordinates in the basis (1, T)."""
        if check and not any(alpha):
            raise ZeroInverse("H(0) is singular")
        m = self.fq.mul
        c0, c1 = alpha
        return ((c0, m(c1, self.qb)), (c1, c0 ^ m(c1, self.qa)))

    def mul_matrix_g(self, lam: Ext3, check: bool = True):
        """Matrix of multiplication by lambda on coordinates in the basis (1, S, S^2)."""
        if check and not any(lam):
            raise ZeroInverse("G(0) is singular")
        col0 = tuple(lam)
        col1 = self._times_s(col0)
        col2 = self._times_s(col1)
        return tuple((col0[r], col1[r], col2[r]) for r in range(3))

    def _times_s(self, x: Ext3) -> Ext3:
        m = self.fq.mul
        x0, x1, x2 = x
        return (m(x2, self.ce), x0 ^ m(x2, self.cd), x1 ^ m(x2, self.cc))


class LevelView:
    """One level of a tower seen as a field object (used by the polynomial code)."""

    def __init__(self, tower: Tower, level: int):
        self.tower = tower
        self.level = level
        self.zero = tower.zero(level)
        self.one = tower.one(level)
        self.bits = tower.w * level
        self.size = 1 << self.bits
        if level == 1:
            fq = tower.fq
            self.mul, self.sq, self.inv = fq.mul, fq.sq, fq.inv
            self.add = int.__xor__
            self.pow = fq.pow
        elif level == 2:
            self.mul, self.sq, self.inv = tower.mul2, tower.sq2, tower.inv2
            self.add = lambda a, b: (a[0] ^ b[0], a[1] ^ b[1])
            self.pow = lambda a, e: tower.pow(2, a, e)
        else:
            self.mul, self.sq, self.inv = tower.mul3, tower.sq3, tower.inv3
            self.add = lambda a, b: (a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2])
            self.pow = lambda a, e: tower.pow(3, a, e)

    def is_zero(self, a) -> bool:
        return a == self.zero

    def embed(self, s: int):
        return self.tower.embed(self.level, s)

    def element(self, i: int):
        """The i-th element in a fixed enumeration of the field."""
        if self.level == 1:
            return i
        w, mask = self.tower.w, self.tower.q - 1
        return tuple((i >> (w * k)) & mask for k in range(self.level))


@lru_cache(maxsize=32)
def get_tower(params: TowerParams) -> Tower:
    return Tower(params)


# ---------------------------------------------------------------------------
# blocking of F_q^6


def to_ext2(v: Sequence[int]) -> tuple[Ext2, Ext2, Ext2]:
    if len(v) != 6:
        raise ValueError("expected 6 coordinates")
    return ((v[0], v[1]), (v[2], v[3]), (v[4], v[5]))


def to_ext3(v: Sequence[int]) -> tuple[Ext3, Ext3]:
    if len(v) != 6:
        raise ValueError("expected 6 coordinates")
    return ((v[0], v[1], v[2]), (v[3], v[4], v[5]))


def flatten(blocks) -> tuple[int, ...]:
    return tuple(x for b in blocks for x in b)


def reblock(direction: str, v):
    """``direction`` is "ext2", "ext3" (split 6 coordinates) or "flat" (join blocks)."""
    if direction == "ext2":
        return to_ext2(v)
    if direction == "ext3":
        return to_ext3(v)
    if direction == "flat":
        out = flatten(v)
        if len(out) != 6:
            raise ValueError("blocks do not cover 6 coordinates")
        return out
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# hex encoding


def hex_width(w: int) -> int:
    return (w + 3) // 4


def fq_to_hex(a: int, w: int) -> str:
    return format(a, f"0{hex_width(w)}x")


def fq_from_hex(s: str, w: int) -> int:
    v = int(s, 16)
    if v >> w:
        raise ValueError(f"{s!r} does not fit in {w} bits")
    return v


def elem_to_hex(a, w: int) -> str:
    if isinstance(a, int):
        return fq_to_hex(a, w)
    return ",".join(fq_to_hex(x, w) for x in a)


def elem_from_hex(s: str, w: int):
    parts = s.split(",")
    if len(parts) == 1:
        return fq_from_hex(parts[0], w)
    return tuple(fq_from_hex(p, w) for p in parts)
