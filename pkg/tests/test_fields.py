import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dme32.dme import gen_system_params
from dme32.fields import (
    NIST_TOWER,
    BaseField,
    BaseFieldParams,
    Tower,
    UndefinedPower,
    ZeroInverse,
    _clmul_loop,
    clmul,
    clsquare,
    fq_from_hex,
    fq_to_hex,
    gen_tower_params,
    get_tower,
    gf2_inverse,
    gf2_is_irreducible,
    gf2_mod,
    reblock,
)
from dme32.polyalg import frobenius_x, padd, upoly_gcd

GF8 = BaseField(BaseFieldParams(3, 0b1011))  # x^3 + x + 1
AES = BaseField(BaseFieldParams(8, 0x11B))
TOWER8 = gen_system_params(8, 1).tower


def schoolbook(a: int, b: int, modulus: int, w: int) -> int:
    """Shift-and-add multiplication with reduction after every shift."""
    r = 0
    for _ in range(w):
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> w:
            a ^= modulus
    return r


def sympy_irreducible(f: int) -> bool:
    x = sympy.symbols("x")
    expr = sum(x ** i for i in range(f.bit_length()) if f >> i & 1)
    return sympy.Poly(expr, x, modulus=2).is_irreducible


def rabin_irreducible(T: Tower, f: tuple) -> bool:
    """Rabin test for a monic degree-n polynomial over F_q, n prime."""
    K = T.level(1)
    n = len(f) - 1
    x = (0, 1)
    if frobenius_x(f, K, n * T.w) != x:
        return False
    xq = frobenius_x(f, K, T.w)
    return len(upoly_gcd(f, padd(xq, x, K), K)) == 1


# -- known values ----------------------------------------------------------


def test_gf8_examples():
    assert GF8.mul(0b010, 0b100) == 0b011
    assert GF8.mul(0b010, 0b101) == 1
    brute = [b for b in range(1, 8) if GF8.mul(0b010, b) == 1]
    assert brute == [0b101] == [GF8.inv(0b010)]
    assert GF8.pow(0b010, 7) == 1


def test_aes_field_published_products():
    assert AES.mul(0x57, 0x83) == 0xC1
    assert AES.mul(0x53, 0xCA) == 1
    assert AES.inv(0x53) == 0xCA


def test_zero_inverse_and_zero_power():
    T = get_tower(TOWER8)
    for level in (1, 2, 3):
        with pytest.raises(ZeroInverse):
            T.inv(level, T.zero(level))
        with pytest.raises(UndefinedPower):
            T.pow(level, T.zero(level), 0)
        assert T.pow(level, T.zero(level), 5) == T.zero(level)
        assert T.inv(level, T.one(level)) == T.one(level)


# -- carry-less helpers ----------------------------------------------------


@given(st.integers(0, 2 ** 200), st.integers(0, 2 ** 200))
def test_clmul_matches_loop(a, b):
    assert clmul(a, b) == _clmul_loop(a, b)


def test_clmul_long_operands():
    rng = random.Random(4)
    for bits in (255, 256, 400):
        a, b = rng.getrandbits(bits), rng.getrandbits(bits)
        assert clmul(a, b) == _clmul_loop(a, b)


@given(st.integers(0, 2 ** 150))
def test_clsquare(a):
    assert clsquare(a) == _clmul_loop(a, a)


@given(st.integers(1, 2 ** 48 - 1))
def test_gf2_inverse(a):
    m = NIST_TOWER.base.modulus
    assert gf2_mod(_clmul_loop(a, gf2_inverse(a, m)), m) == 1


# -- base field against the schoolbook oracle -------------------------------


@pytest.mark.parametrize("params", [TOWER8.base, NIST_TOWER.base], ids=["w8", "w48"])
def test_base_mul_schoolbook(params):
    fq = BaseField(params)
    rng = random.Random(9)
    for _ in range(2000):
        a, b = rng.randrange(fq.q), rng.randrange(fq.q)
        assert fq.mul(a, b) == schoolbook(a, b, params.modulus, params.w)
        assert fq.sq(a) == schoolbook(a, a, params.modulus, params.w)
        if a:
            assert fq.mul(a, fq.inv(a)) == 1


# -- field axioms at every level (w = 8 and the NIST tower) ------------------


@pytest.mark.parametrize("tp", [TOWER8, NIST_TOWER], ids=["w8", "w48"])
@pytest.mark.parametrize("level", [1, 2, 3])
@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_axioms(tp, level, seed):
    T = get_tower(tp)
    rng = random.Random(seed)
    a, b, c = (T.random(level, rng) for _ in range(3))
    mul, add = T.level(level).mul, T.level(level).add
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert mul(a, T.one(level)) == a
    assert add(a, T.zero(level)) == a
    if not T.is_zero(level, a):
        assert mul(a, T.inv(level, a)) == T.one(level)
        assert T.inv(level, T.inv(level, a)) == a


@pytest.mark.parametrize("tp", [TOWER8, NIST_TOWER], ids=["w8", "w48"])
@pytest.mark.parametrize("level", [1, 2, 3])
def test_powers(tp, level):
    T = get_tower(tp)
    rng = random.Random(level)
    order = T.orders[level]
    for _ in range(20):
        a = T.random(level, rng, nonzero=True)
        b = T.random(level, rng)
        k = rng.randrange(3 * T.w * level)
        e1, e2 = rng.getrandbits(200), rng.getrandbits(200)
        assert T.pow(level, a, order) == T.one(level)
        assert T.pow(level, a, e1) == T.pow(level, a, e1 % order)
        assert T.mul(level, T.pow(level, a, e1), T.pow(level, a, e2)) == T.pow(level, a, e1 + e2)
        # Frobenius additivity and agreement with repeated squaring
        s = a
        for _ in range(k):
            s = T.sq(level, s)
        assert T.pow(level, a, 2 ** k) == s
        lhs = T.pow(level, T.add(level, a, b), 2 ** k)
        rhs = T.add(level, T.pow(level, a, 2 ** k), T.pow(level, b, 2 ** k))
        assert lhs == rhs


def test_packed_extension_mul_matches_schoolbook():
    T = get_tower(NIST_TOWER)
    assert T.mul3 != Tower.mul3.__get__(T)
    rng = random.Random(2)
    for _ in range(500):
        x, y = T.random(2, rng), T.random(2, rng)
        assert T.mul2(x, y) == Tower.mul2(T, x, y)
        assert T.sq2(x) == Tower.mul2(T, x, x)
        u, v = T.random(3, rng), T.random(3, rng)
        assert T.mul3(u, v) == Tower.mul3(T, u, v)
        assert T.sq3(u) == Tower.mul3(T, u, u)


# -- multiplication matrices -----------------------------------------------


def _apply(M, v):
    T = get_tower(TOWER8)
    return tuple(T.fq.mul(M[r][0], v[0]) ^ T.fq.mul(M[r][1], v[1]) ^
                 (T.fq.mul(M[r][2], v[2]) if len(v) > 2 else 0) for r in range(len(v)))


def test_matrix_h_and_g():
    from dme32.linalg import identity, mat_mul

    T = get_tower(TOWER8)
    fq = T.fq
    rng = random.Random(5)
    assert T.mul_matrix_h((1, 0)) == identity(2)
    assert T.mul_matrix_g((1, 0, 0)) == identity(3)
    for _ in range(200):
        a, b, v = T.random(2, rng, True), T.random(2, rng, True), T.random(2, rng)
        assert _apply(T.mul_matrix_h(a), v) == T.mul2(a, v)
        assert mat_mul(fq, T.mul_matrix_h(a), T.mul_matrix_h(T.inv2(a))) == identity(2)
        assert mat_mul(fq, T.mul_matrix_h(a), T.mul_matrix_h(b)) == T.mul_matrix_h(T.mul2(a, b))
        lam, mu, u = T.random(3, rng, True), T.random(3, rng, True), T.random(3, rng)
        assert _apply(T.mul_matrix_g(lam), u) == T.mul3(lam, u)
        assert mat_mul(fq, T.mul_matrix_g(lam), T.mul_matrix_g(T.inv3(lam))) == identity(3)
        assert mat_mul(fq, T.mul_matrix_g(lam), T.mul_matrix_g(mu)) == T.mul_matrix_g(T.mul3(lam, mu))
    with pytest.raises(ZeroInverse):
        T.mul_matrix_h((0, 0))
    with pytest.raises(ZeroInverse):
        T.mul_matrix_g((0, 0, 0))


# -- reblocking and hex ------------------------------------------------------


def test_reblock():
    assert reblock("ext2", (1, 0, 0, 0, 0, 0)) == ((1, 0), (0, 0), (0, 0))
    assert reblock("ext2", (0, 0, 0, 0, 7, 9))[2] == (7, 9)
    v = (1, 2, 3, 4, 5, 6)
    assert reblock("flat", reblock("ext2", v)) == v
    assert reblock("flat", reblock("ext3", v)) == v
    with pytest.raises(ValueError):
        reblock("ext2", (1, 2, 3))


def test_hex_encoding():
    assert fq_to_hex(0xAB, 8) == "ab"
    assert fq_to_hex(5, 48) == "000000000005"
    assert fq_from_hex("000000000005", 48) == 5
    with pytest.raises(ValueError):
        fq_from_hex("1ff", 8)


# -- tower parameters --------------------------------------------------------


def test_nist_tower_preset():
    tp = gen_tower_params(48, preset="nist")
    exps = [i for i in range(49) if tp.base.modulus >> i & 1]
    assert exps == [0, 1, 27, 28, 48]
    assert sympy_irreducible(tp.base.modulus)
    T = get_tower(tp)
    a, b = tp.quad
    c, d, e = tp.cubic
    assert rabin_irreducible(T, (b, a, 1))
    assert rabin_irreducible(T, (e, d, c, 1))


@pytest.mark.parametrize("w,seed", [(3, 0), (5, 2), (8, 1), (8, 7), (13, 3)])
def test_generated_towers(w, seed):
    tp = gen_tower_params(w, seed)
    assert tp == gen_tower_params(w, seed)
    assert sympy_irreducible(tp.base.modulus)
    T = get_tower(tp)
    a, b = tp.quad
    c, d, e = tp.cubic
    # no root in F_q means irreducible for degree 2 and 3
    for x in range(T.q):
        assert T.fq.mul(x, x) ^ T.fq.mul(a, x) ^ b
        x2 = T.fq.mul(x, x)
        assert T.fq.mul(x2, x) ^ T.fq.mul(c, x2) ^ T.fq.mul(d, x) ^ e
    assert rabin_irreducible(T, (b, a, 1))
    assert rabin_irreducible(T, (e, d, c, 1))


def test_gf2_irreducibility_matches_sympy():
    for f in range(2 ** 4, 2 ** 10):
        assert gf2_is_irreducible(f) == sympy_irreducible(f), f


def test_invalid_width():
    with pytest.raises(ValueError):
        gen_tower_params(2, 0)
    with pytest.raises(ValueError):
        gen_tower_params(65, 0)


@pytest.mark.parametrize("tp", [TOWER8, NIST_TOWER], ids=["w8", "w48"])
def test_frobenius_wraps_and_fixes_zero(tp):
    T = get_tower(tp)
    rng = random.Random(12)
    for level in (1, 2, 3):
        n = T.w * level
        a = T.random(level, rng, nonzero=True)
        assert T.frob(level, a, n) == a
        assert T.frob(level, a, n + 3) == T.frob(level, a, 3)
        assert T.frob(level, T.zero(level), 5) == T.zero(level)
        s = a
        for _ in range(5):
            s = T.sq(level, s)
        assert T.frob(level, a, 5) == s
