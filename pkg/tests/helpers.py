"""Shared helpers for the test suite: key constructions, ground truth and result lines."""

from __future__ import annotations

import random

from dme32.attack import apply_substitution
from dme32.dme import PrivateKey, SystemParams
from dme32.linalg import column, from_columns, mat_det, mat_inv
from dme32.malleability import normalize_key, normalize_theta

# acceptance lines collected during the run, printed by the terminal summary hook
RESULTS: list[str] = []


def record(label: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def random_message(params: SystemParams, rng: random.Random) -> tuple:
    """Six coordinates with every F_{q^2} block nonzero."""
    q = params.q
    while True:
        m = tuple(rng.randrange(q) for _ in range(6))
        if all(m[2 * k] or m[2 * k + 1] for k in range(3)):
            return m


def admissible_abc(params: SystemParams, rng: random.Random) -> tuple:
    """alpha, beta, gamma with alpha^E21 gamma^E23 a random element of F_q^*."""
    T = params.field
    E = params.E
    alpha = T.random(2, rng, nonzero=True)
    beta = T.random(2, rng, nonzero=True)
    s = T.fq.random(rng, nonzero=True)
    e23_inv = pow(E[1][2], -1, T.orders[2])
    target = T.scale(2, s, T.inv2(T.pow(2, alpha, E[1][0])))
    gamma = T.pow(2, target, e23_inv)
    return alpha, beta, gamma


def make_pure_t_key(sk: PrivateKey, params: SystemParams, eps: int = 1) -> PrivateKey | None:
    """Replace the second column of L13 so that normalization lands in the (a+bT)^E23 = T branch.

    With alpha the inverse of the second column of L11 we need
    alpha^-E21 tau^E23 = eps T, so tau = (alpha^E21 eps T)^(E23^-1).
    Returns None when the new L13 would be singular.
    """
    T = params.field
    E = params.E
    alpha = T.inv2(column(sk.L11, 1))
    e23_inv = pow(E[1][2], -1, T.orders[2])
    tau = T.pow(2, T.mul2(T.pow(2, alpha, E[1][0]), (0, eps)), e23_inv)
    L13 = from_columns((column(sk.L13, 0), tau))
    if not mat_det(T.fq, L13):
        return None
    return sk.replace(L13=L13)


def l1_truth(sk: PrivateKey, params: SystemParams, substitution: int | None):
    """Normalized key and tag matching what the L1 recovery should report."""
    return normalize_key(apply_substitution(sk, params, substitution), params)


def eta_of(key: PrivateKey) -> tuple:
    return tuple(column(key.L31, 0)) + tuple(column(key.L32, 0))


def theta_truth(sk: PrivateKey, params: SystemParams) -> tuple:
    """Normalized key whose inverse L3 blocks end in (1, 0, 0), and its theta columns."""
    key = normalize_theta(normalize_key(sk, params)[0], params)
    fq = params.field.fq
    i31, i32 = mat_inv(fq, key.L31), mat_inv(fq, key.L32)
    return key, (column(i31, 0), column(i31, 1)), (column(i32, 0), column(i32, 1))


def normal_form_ok(key: PrivateKey, tag, params: SystemParams) -> bool:
    """Literal entry checks of the normal form."""
    T = params.field
    if column(key.L11, 1) != (1, 0) or column(key.L12, 1) != (1, 0):
        return False
    if column(key.L21, 2) != (1, 0, 0) or column(key.L22, 0) != (1, 0, 0):
        return False
    ab_e23 = T.pow(2, column(key.L13, 1), params.E[1][2])
    if tag.branch == "unit_c":
        return ab_e23 == (1, tag.c)
    return ab_e23 == (0, 1)
