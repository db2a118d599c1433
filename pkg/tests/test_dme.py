import random

import pytest

from dme32.dme import (
    NIST_E,
    NIST_F,
    InvalidCiphertext,
    PublicKey,
    ZeroBlock,
    canonical_monomial,
    coeff_lookup,
    decrypt,
    derive_public_key,
    encrypt_private,
    eval_public,
    exp_map,
    gen_system_params,
    keygen,
    precompose_blocks,
    structural_support,
)
from dme32.fields import to_ext2
from dme32.linalg import mat_det, mat_vec
from dme32.malleability import normalize_key

from helpers import eta_of, make_pure_t_key, random_message


def test_nist_preset(params_nist):
    assert params_nist.E == ((2 ** 24, 2 ** 59, 0), (2 ** 21, 0, 2 ** 28), (0, 2 ** 29, 2 ** 65))
    assert params_nist.F == ((2 ** 50, 2 ** 24), (2 ** 7, 2 ** 88))
    assert params_nist.E == NIST_E and params_nist.F == NIST_F
    assert params_nist.w == 48


def test_params_deterministic_and_valid():
    from math import gcd

    for seed in range(10):
        p = gen_system_params(8, seed)
        assert p == gen_system_params(8, seed)
        q = p.q
        E, F = p.E, p.F
        assert E[0][2] == E[1][1] == E[2][0] == 0
        detE = E[0][0] * E[1][2] * E[2][1] + E[0][1] * E[1][0] * E[2][2]
        detF = F[0][0] * F[1][1] - F[0][1] * F[1][0]
        assert gcd(detE, q * q - 1) == 1
        assert gcd(detF, q ** 3 - 1) == 1
        assert gcd(detF, q - 1) == 1


def test_bad_params_rejected(params8):
    from dme32.dme import SystemParams

    with pytest.raises(ValueError):
        SystemParams(params8.tower, ((1, 1, 1), (1, 0, 1), (0, 1, 1)), params8.F)
    with pytest.raises(ValueError):
        SystemParams(params8.tower, params8.E, ((1, 1), (1, 1)))
    with pytest.raises(ValueError):
        gen_system_params(8, preset="nist")


def test_keygen(params8):
    fq = params8.field.fq
    assert keygen(params8, 5) == keygen(params8, 5)
    assert keygen(params8, 5) != keygen(params8, 6)
    for seed in range(1000):
        assert all(mat_det(fq, b) for b in keygen(params8, seed).blocks())


def test_exp_map(params8):
    T = params8.field
    rng = random.Random(1)
    x = tuple(T.random(2, rng, nonzero=True) for _ in range(3))
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert exp_map(T, 2, ident, x) == x
    E = params8.E
    y = exp_map(T, 2, E, x)
    assert y[1] == T.mul2(T.pow(2, x[0], E[1][0]), T.pow(2, x[2], E[1][2]))
    assert exp_map(T, 2, params8.E_inv, y) == x
    with pytest.raises(ZeroBlock):
        exp_map(T, 2, E, (x[0], (0, 0), x[2]))


def test_round_trip_and_errors(params8, key8):
    sk, pk = key8
    rng = random.Random(2)
    for _ in range(200):
        m = random_message(params8, rng)
        ct = encrypt_private(sk, params8, m)
        assert decrypt(sk, params8, ct) == m
        assert eval_public(pk, m) == ct
    with pytest.raises(ZeroBlock):
        encrypt_private(sk, params8, (0, 0, 1, 2, 3, 4))
    with pytest.raises(InvalidCiphertext):
        decrypt(sk, params8, (0,) * 6)


def test_perturbed_ciphertext(params8, key8):
    sk, _ = key8
    rng = random.Random(3)
    outcomes = set()
    for _ in range(100):
        ct = list(encrypt_private(sk, params8, random_message(params8, rng)))
        ct[rng.randrange(6)] ^= 1 + rng.randrange(params8.q - 1)
        try:
            m2 = decrypt(sk, params8, ct)
        except InvalidCiphertext:
            outcomes.add("error")
            continue
        assert encrypt_private(sk, params8, m2) == tuple(ct)
        outcomes.add("ok")
    assert "ok" in outcomes


def test_nist_round_trip_and_public_key(params_nist):
    sk = keygen(params_nist, 1)
    pk = derive_public_key(sk, params_nist)
    rng = random.Random(4)
    for _ in range(5):
        m = random_message(params_nist, rng)
        ct = encrypt_private(sk, params_nist, m)
        assert decrypt(sk, params_nist, ct) == m
        assert eval_public(pk, m) == ct


def test_support_soundness():
    for w, seed in ((5, 1), (8, 1), (8, 4)):
        p = gen_system_params(w, seed)
        support = structural_support(p)
        for s in range(5):
            pk = derive_public_key(keygen(p, s), p)
            for k in range(6):
                assert {m for m, _ in pk.polys[k]} <= support[k]
                assert all(c for _, c in pk.polys[k])


def test_public_key_canonical_form(params8, key8):
    _, pk = key8
    q = params8.q
    for poly in pk.polys:
        mons = [m for m, _ in poly]
        assert mons == sorted(mons)
        assert all(e == 0 or 1 <= e <= q - 1 for m in mons for e in m)


def test_canonical_exponents_preserve_evaluation(params8):
    q = params8.q
    fq = params8.field.fq
    for x in range(q):
        for e in (1, 5, q - 1, q, q + 3, 7 * (q - 1), 2 ** 40 + 1):
            assert fq.pow(x, e) == fq.pow(x, canonical_monomial((e,), q)[0])


def test_coeff_lookup(params8, key8):
    _, pk = key8
    q = params8.q
    mon, c = pk.polys[0][0]
    assert coeff_lookup(pk, 1, mon) == c
    unreduced = tuple(e + (q - 1) if e else 0 for e in mon)
    assert coeff_lookup(pk, 1, unreduced) == c
    assert coeff_lookup(pk, 1, (0, 0, 0, 0, 0, 0)) == 0
    with pytest.raises(IndexError):
        coeff_lookup(pk, 7, mon)


def test_empty_public_key_and_nonlinearity(params8, key8):
    empty = PublicKey.from_dicts(params8, [{}] * 6)
    assert eval_public(empty, (1, 2, 3, 4, 5, 6)) == (0,) * 6
    _, pk = key8
    rng = random.Random(5)
    additive = True
    for _ in range(20):
        a, b = random_message(params8, rng), random_message(params8, rng)
        s = tuple(x ^ y for x, y in zip(a, b))
        if any(s[2 * k] == s[2 * k + 1] == 0 for k in range(3)):
            continue
        lhs = eval_public(pk, s)
        rhs = tuple(x ^ y for x, y in zip(eval_public(pk, a), eval_public(pk, b)))
        additive &= lhs == rhs
    assert not additive


def test_pair_coefficients_of_normalized_key(params8):
    # the (x2, x6)-only monomials carry eta_i c^F12 on top and eta_i c^F22 below
    E, F = params8.E, params8.F
    fq = params8.field.fq
    q = params8.q
    for seed in range(10):
        sk = keygen(params8, seed)
        pk = derive_public_key(sk, params8)
        key, tag = normalize_key(sk, params8)
        if tag.branch != "unit_c":
            continue
        eta = eta_of(key)
        for i in range(6):
            f_sum = F[0][0] + F[0][1] if i < 3 else F[1][0] + F[1][1]
            f2 = F[0][1] if i < 3 else F[1][1]
            mon = canonical_monomial((0, E[1][0] * f_sum, 0, 0, 0, E[1][2] * f_sum), q)
            assert coeff_lookup(pk, i + 1, mon) == fq.mul(eta[i], fq.pow(tag.c, f2))


def test_pure_t_key_has_no_pair_terms(params8):
    E, F = params8.E, params8.F
    q = params8.q
    sk = make_pure_t_key(keygen(params8, 0), params8)
    pk = derive_public_key(sk, params8)
    assert normalize_key(sk, params8)[1].branch == "pure_T"
    for i in range(6):
        f_sum = F[0][0] + F[0][1] if i < 3 else F[1][0] + F[1][1]
        mon = canonical_monomial((0, E[1][0] * f_sum, 0, 0, 0, E[1][2] * f_sum), q)
        assert coeff_lookup(pk, i + 1, mon) == 0


def test_precompose_blocks(params8, key8):
    sk, pk = key8
    fq = params8.field.fq
    rng = random.Random(6)
    A = ((3, 7), (1, 9))
    B = ((1, 5), (5, 1 ^ fq.mul(5, 5)))
    assert mat_det(fq, A) and mat_det(fq, B)
    composed = precompose_blocks(pk, (A, None, B))
    for _ in range(50):
        x = random_message(params8, rng)
        blocks = to_ext2(x)
        ax = mat_vec(fq, A, blocks[0]) + blocks[1] + mat_vec(fq, B, blocks[2])
        assert eval_public(composed, x) == eval_public(pk, ax)
