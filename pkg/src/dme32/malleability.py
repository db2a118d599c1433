"""Equivalent-key transformations and reduction of a private key to normal form."""

from __future__ import annotations

from dataclasses import dataclass

from .dme import PrivateKey, SystemParams, derive_public_key, exp_map
from .fields import Ext2, Ext3
from .linalg import column, mat_inv, mat_mul


class ConstraintViolated(ValueError):
    pass


UNIT_C = "unit_c"
PURE_T = "pure_T"


@dataclass(frozen=True)
class NormalizedKeyTag:
    branch: str  # UNIT_C: (a+bT)^E23 = 1 + cT;  PURE_T: (a+bT)^E23 = T
    c: int = 0


def _block_diag_2_1(h, s):
    """diag(h, s) with h a 2x2 block and s an F_q scalar."""
    return ((h[0][0], h[0][1], 0), (h[1][0], h[1][1], 0), (0, 0, s))


def _block_diag_1_2(s, h):
    return ((s, 0, 0), (0, h[0][0], h[0][1]), (0, h[1][0], h[1][1]))


def transform_abc(sk: PrivateKey, params: SystemParams, alpha: Ext2, beta: Ext2, gamma: Ext2) -> PrivateKey:
    """Rescale the three F_{q^2} blocks of L1 and compensate inside L2."""
    T = params.field
    fq = T.fq
    E = params.E
    delta = T.mul2(T.pow(2, alpha, E[1][0]), T.pow(2, gamma, E[1][2]))
    if delta[1] != 0 or delta[0] == 0:
        raise ConstraintViolated("alpha^E21 * gamma^E23 must lie in F_q^*")
    d_inv = fq.inv(delta[0])
    p1 = T.mul2(T.pow(2, alpha, E[0][0]), T.pow(2, beta, E[0][1]))
    p3 = T.mul2(T.pow(2, beta, E[2][1]), T.pow(2, gamma, E[2][2]))
    h1 = T.mul_matrix_h(T.inv2(p1))
    h3 = T.mul_matrix_h(T.inv2(p3))
    return sk.replace(
        L11=mat_mul(fq, T.mul_matrix_h(alpha), sk.L11),
        L12=mat_mul(fq, T.mul_matrix_h(beta), sk.L12),
        L13=mat_mul(fq, T.mul_matrix_h(gamma), sk.L13),
        L21=mat_mul(fq, sk.L21, _block_diag_2_1(h1, d_inv)),
        L22=mat_mul(fq, sk.L22, _block_diag_1_2(d_inv, h3)),
    )


def transform_lm(sk: PrivateKey, params: SystemParams, lam: Ext3, mu: Ext3) -> PrivateKey:
    """Rescale the two F_{q^3} blocks of L2 and compensate inside L3."""
    T = params.field
    fq = T.fq
    nu1, nu2 = exp_map(T, 3, params.F, (lam, mu))
    return sk.replace(
        L21=mat_mul(fq, T.mul_matrix_g(lam), sk.L21),
        L22=mat_mul(fq, T.mul_matrix_g(mu), sk.L22),
        L31=mat_mul(fq, sk.L31, T.mul_matrix_g(T.inv3(nu1))),
        L32=mat_mul(fq, sk.L32, T.mul_matrix_g(T.inv3(nu2))),
    )


def normalize_key(sk: PrivateKey, params: SystemParams) -> tuple[PrivateKey, NormalizedKeyTag]:
    """Equivalent key with the fixed columns of the normal form.

    L11, L12 get second column (1, 0); L13 gets second column a + bT with
    (a+bT)^E23 equal to 1 + cT or to T; L21 gets third column (1, 0, 0) and
    L22 first column (1, 0, 0).
    """
    T = params.field
    fq = T.fq
    E = params.E
    e23_inv = pow(E[1][2], -1, T.orders[2])
    alpha = T.inv2(column(sk.L11, 1))
    beta = T.inv2(column(sk.L12, 1))
    tau = column(sk.L13, 1)
    # alpha^-E21 tau^E23 = delta + eps T
    a_e21 = T.pow(2, alpha, E[1][0])
    delta, eps = T.mul2(T.inv2(a_e21), T.pow(2, tau, E[1][2]))
    target = fq.inv(delta) if delta else fq.inv(eps)
    # gamma^E23 = target * alpha^-E21
    gamma = T.pow(2, T.scale(2, target, T.inv2(a_e21)), e23_inv)
    key = transform_abc(sk, params, alpha, beta, gamma)
    if delta:
        tag = NormalizedKeyTag(UNIT_C, fq.mul(eps, fq.inv(delta)))
    else:
        tag = NormalizedKeyTag(PURE_T, 0)
    lam = T.inv3(column(key.L21, 2))
    mu = T.inv3(column(key.L22, 0))
    key = transform_lm(key, params, lam, mu)
    return key, tag


def normalize_theta(sk: PrivateKey, params: SystemParams) -> PrivateKey:
    """Equivalent key in which L31^-1 and L32^-1 both have third column (1, 0, 0).

    This is the scaling fixed by the L2/L3 recovery (instead of the L2
    columns fixed by :func:`normalize_key`).
    """
    T = params.field
    fq = T.fq
    th3 = column(mat_inv(fq, sk.L31), 2)
    th6 = column(mat_inv(fq, sk.L32), 2)
    lam, mu = exp_map(T, 3, params.F_inv, (T.inv3(th3), T.inv3(th6)))
    return transform_lm(sk, params, lam, mu)


def same_public_key(sk1: PrivateKey, sk2: PrivateKey, params: SystemParams) -> bool:
    return derive_public_key(sk1, params) == derive_public_key(sk2, params)
