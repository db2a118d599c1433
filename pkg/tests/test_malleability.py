import random

import pytest

from dme32.dme import derive_public_key, keygen
from dme32.linalg import column
from dme32.malleability import (
    PURE_T,
    UNIT_C,
    ConstraintViolated,
    normalize_key,
    normalize_theta,
    same_public_key,
    transform_abc,
    transform_lm,
)

from helpers import admissible_abc, make_pure_t_key, normal_form_ok


def test_identity_transforms(params8, key8):
    sk, _ = key8
    assert transform_abc(sk, params8, (1, 0), (1, 0), (1, 0)) == sk
    assert transform_lm(sk, params8, (1, 0, 0), (1, 0, 0)) == sk


def test_transform_abc_preserves_public_key(params8, key8):
    sk, pk = key8
    rng = random.Random(1)
    for _ in range(20):
        key = transform_abc(sk, params8, *admissible_abc(params8, rng))
        assert key != sk
        assert derive_public_key(key, params8) == pk


def test_transform_abc_constraint(params8, key8):
    sk, _ = key8
    T = params8.field
    rng = random.Random(2)
    alpha, beta, gamma = admissible_abc(params8, rng)
    bad = T.mul2(gamma, (0, 1))  # multiplying by T leaves F_q^* for the product
    with pytest.raises(ConstraintViolated):
        transform_abc(sk, params8, alpha, beta, bad)


def test_transform_lm(params8, key8):
    sk, pk = key8
    T = params8.field
    rng = random.Random(3)
    for _ in range(20):
        lam, mu = T.random(3, rng, True), T.random(3, rng, True)
        assert derive_public_key(transform_lm(sk, params8, lam, mu), params8) == pk
    # composition equals the transform by the products
    l1, m1, l2, m2 = (T.random(3, rng, True) for _ in range(4))
    twice = transform_lm(transform_lm(sk, params8, l1, m1), params8, l2, m2)
    assert twice == transform_lm(sk, params8, T.mul3(l2, l1), T.mul3(m2, m1))


def test_normalize_key_shape_and_public_key(params8):
    branches = set()
    for seed in range(30):
        sk = keygen(params8, seed)
        key, tag = normalize_key(sk, params8)
        assert normal_form_ok(key, tag, params8)
        assert same_public_key(sk, key, params8)
        branches.add(tag.branch)
        again, tag2 = normalize_key(key, params8)
        assert tag2 == tag
        assert (again.L11, again.L12, again.L13) == (key.L11, key.L12, key.L13)
    assert UNIT_C in branches


def test_pure_t_branch(params8):
    made = 0
    for seed in range(20):
        sk = make_pure_t_key(keygen(params8, seed), params8, eps=1 + seed)
        if sk is None:
            continue
        key, tag = normalize_key(sk, params8)
        assert tag.branch == PURE_T
        assert normal_form_ok(key, tag, params8)
        assert same_public_key(sk, key, params8)
        made += 1
    assert made >= 5


def test_normalize_theta(params8, key8):
    from dme32.linalg import mat_inv

    sk, pk = key8
    key = normalize_theta(normalize_key(sk, params8)[0], params8)
    fq = params8.field.fq
    assert column(mat_inv(fq, key.L31), 2) == (1, 0, 0)
    assert column(mat_inv(fq, key.L32), 2) == (1, 0, 0)
    assert derive_public_key(key, params8) == pk


def test_same_public_key(params8, key8):
    sk, _ = key8
    assert same_public_key(sk, sk, params8)
    different = sum(not same_public_key(keygen(params8, s), keygen(params8, s + 1000), params8)
                    for s in range(100))
    assert different == 100
