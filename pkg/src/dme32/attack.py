"""Structural key recovery for DME-(3,2,q).

Three stages: recover L11, L13 and the first columns of L31/L32 straight
from public coefficients; given a full L1, peel off the E stage and solve
for L2 and L3; close the gap with a search over the two free entries of L12.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .dme import (
    PrivateKey,
    PublicKey,
    SystemParams,
    ZeroBlock,
    coeff_lookup,
    derive_public_key,
    eval_public,
    exp_map,
    precompose_blocks,
)
from .fields import FieldError, flatten, to_ext2
from .linalg import from_columns, mat_det, mat_inv, mat_mul, mat_vec
from .malleability import UNIT_C
from .polyalg import (
    DegenerateSystem,
    bivar_add,
    bivar_degree,
    bivar_mul,
    bivar_substitute,
    degree,
    embed_poly,
    frobenius_x,
    padd,
    pdivmod,
    resultant_eliminate,
    trim,
    upoly_gcd,
    upoly_roots,
)


class AttackError(Exception):
    pass


class MissingMonomials(AttackError):
    pass


class ZeroQuotient(AttackError):
    pass


class NoCommonRoot(AttackError):
    pass


class AmbiguousRoot(AttackError):
    pass


class FallbackExhausted(AttackError):
    pass


class NoSolution(AttackError):
    pass


class Ambiguous(AttackError):
    pass


class Inconsistent(AttackError):
    pass


class VerificationFailed(AttackError):
    pass


class SearchExhausted(AttackError):
    pass


FALLBACK_LIMIT = 256

# ---------------------------------------------------------------------------
# L1 from public coefficients


@dataclass(frozen=True)
class EtaColumns:
    """Coefficients of the four two-variable monomial families, one entry per component."""

    col_c: tuple  # (x2, x6): c^F12 eta_i on top, c^F22 eta_i below
    col_f: tuple  # (x1, x5)
    col_g: tuple  # (x1, x6)
    col_h: tuple  # (x2, x5)


@dataclass(frozen=True)
class FGHValues:
    f1: int
    f2p: int
    g1: int
    g2p: int
    h1: int
    h2p: int


@dataclass(frozen=True)
class RecoveredL1:
    """Known part of a normalized key.

    When ``substitution`` is set, the matrices describe the key of the
    public key precomposed with :func:`substitution_matrix` on the pairs
    (x1, x2) and (x5, x6), not the original one.
    """

    L11: tuple
    L13: tuple
    c: int
    eta: tuple
    branch: str = UNIT_C
    substitution: int | None = None
    fallback_reason: str | None = None


def pair_monomial(params: SystemParams, a: int, b: int, bottom: bool) -> tuple:
    """Exponent vector of the only monomial in x_a, x_b (a in {1,2}, b in {5,6})."""
    E, F = params.E, params.F
    s = F[1][0] + F[1][1] if bottom else F[0][0] + F[0][1]
    mon = [0] * 6
    mon[a - 1] = E[1][0] * s
    mon[b - 1] = E[1][2] * s
    return tuple(mon)


def extract_eta_columns(pk: PublicKey) -> EtaColumns:
    params = pk.params

    def col(a: int, b: int) -> tuple:
        return tuple(coeff_lookup(pk, i, pair_monomial(params, a, b, i > 3)) for i in range(1, 7))

    cols = EtaColumns(col_c=col(2, 6), col_f=col(1, 5), col_g=col(1, 6), col_h=col(2, 5))
    if not any(cols.col_c[:3]) or not any(cols.col_c[3:]):
        raise MissingMonomials("no terms in x2, x6 alone: branch pure_T or c = 0")
    return cols


def _first_nonzero(col: Sequence[int], lo: int, hi: int) -> int:
    for i in range(lo, hi):
        if col[i]:
            return i
    raise MissingMonomials("a half of the c column vanishes")


def recover_fgh(cols: EtaColumns, params: SystemParams) -> FGHValues:
    T = params.field
    fq = T.fq
    it = _first_nonzero(cols.col_c, 0, 3)
    ib = _first_nonzero(cols.col_c, 3, 6)
    dt, db = cols.col_c[it], cols.col_c[ib]

    def solve(col: tuple, name: str) -> tuple:
        top, bot = fq.div(col[it], dt), fq.div(col[ib], db)
        if not top or not bot:
            raise ZeroQuotient(f"{name}-quotient vanishes")
        return exp_map(T, 1, params.F_inv_base, (top, bot))

    f1, f2p = solve(cols.col_f, "f")
    g1, g2p = solve(cols.col_g, "g")
    h1, h2p = solve(cols.col_h, "h")
    return FGHValues(f1, f2p, g1, g2p, h1, h2p)


def c_equations(fgh: FGHValues, params: SystemParams) -> tuple[tuple, tuple]:
    """The constant-term equation and the T-equation (already divided by c), as UniPolys in c."""
    T = params.field
    m = T.fq.mul
    k = fgh.f2p ^ m(fgh.g2p, fgh.h2p)
    K1 = T.level(1)
    const = trim((fgh.f1 ^ m(fgh.g1, fgh.h1), 0, m(T.qb, k)), K1)
    lin = trim((fgh.f1 ^ fgh.f2p ^ m(fgh.g1, fgh.h2p) ^ m(fgh.g2p, fgh.h1), m(T.qa, k)), K1)
    return const, lin


def solve_c(fgh: FGHValues, params: SystemParams) -> int:
    K1 = params.field.level(1)
    const, lin = c_equations(fgh, params)
    if not const and not lin:
        raise AmbiguousRoot("both equations vanish identically")
    g = upoly_gcd(const, lin, K1)
    roots = [r for r in upoly_roots(g, K1) if r]
    if not roots:
        raise NoCommonRoot("the two equations in c share no nonzero root")
    if len(roots) > 1:
        raise AmbiguousRoot(f"{len(roots)} common nonzero roots")
    return roots[0]


def _recover_l1_direct(pk: PublicKey) -> RecoveredL1:
    params = pk.params
    T = params.field
    fq = T.fq
    E, F = params.E, params.F
    cols = extract_eta_columns(pk)
    fgh = recover_fgh(cols, params)
    c = solve_c(fgh, params)
    f = (fgh.f1, fq.mul(c, fgh.f2p))
    h = (fgh.h1, fq.mul(c, fgh.h2p))
    o2 = T.orders[2]
    e21_inv = pow(E[1][0], -1, o2)
    e23_inv = pow(E[1][2], -1, o2)
    l31 = T.pow(2, h, e23_inv)
    l11 = T.pow(2, T.div(2, f, h), e21_inv)
    ab = T.pow(2, (1, c), e23_inv)
    ct, cb = fq.pow(c, F[0][1]), fq.pow(c, F[1][1])
    eta = tuple(fq.div(cols.col_c[i], ct if i < 3 else cb) for i in range(6))
    L11 = ((l11[0], 1), (l11[1], 0))
    L13 = ((l31[0], ab[0]), (l31[1], ab[1]))
    return RecoveredL1(L11, L13, c, eta)


def substitution_matrix(params: SystemParams, t: int) -> tuple:
    """((1, t), (t, 1 + t^2)): determinant 1 for every t."""
    return ((1, t), (t, 1 ^ params.field.fq.mul(t, t)))


def substitute(pk: PublicKey, t: int) -> PublicKey:
    """Public key of x -> pk(A x) with A = substitution_matrix(t) on (x1, x2) and (x5, x6)."""
    A = substitution_matrix(pk.params, t)
    return precompose_blocks(pk, (A, None, A))


def undo_substitution(sk: PrivateKey, params: SystemParams, t: int | None) -> PrivateKey:
    """Key for the original public key from a key of the substituted one."""
    if t is None:
        return sk
    fq = params.field.fq
    A_inv = mat_inv(fq, substitution_matrix(params, t))
    return sk.replace(L11=mat_mul(fq, sk.L11, A_inv), L13=mat_mul(fq, sk.L13, A_inv))


def apply_substitution(sk: PrivateKey, params: SystemParams, t: int | None) -> PrivateKey:
    """Key of the substituted public key, given a key of the original one."""
    if t is None:
        return sk
    fq = params.field.fq
    A = substitution_matrix(params, t)
    return sk.replace(L11=mat_mul(fq, sk.L11, A), L13=mat_mul(fq, sk.L13, A))


_FALLBACK_ERRORS = (MissingMonomials, ZeroQuotient, AmbiguousRoot)


def recover_l1(pk: PublicKey, params: SystemParams | None = None) -> RecoveredL1:
    """L11, L13, c and eta of the normalized key; retries after a change of variables if degenerate."""
    if params is not None and params != pk.params:
        raise ValueError("public key was made with different parameters")
    try:
        return _recover_l1_direct(pk)
    except _FALLBACK_ERRORS as exc:
        reason = type(exc).__name__
    for t in range(1, min(FALLBACK_LIMIT, pk.params.q)):
        try:
            rec = _recover_l1_direct(substitute(pk, t))
        except _FALLBACK_ERRORS:
            continue
        return RecoveredL1(rec.L11, rec.L13, rec.c, rec.eta, rec.branch, t, reason)
    raise FallbackExhausted(f"no substitution below {FALLBACK_LIMIT} reaches the unit_c branch")


# ---------------------------------------------------------------------------
# L2 and L3 from a full L1


@dataclass(frozen=True)
class ZTable:
    """(i, j) in {1,2,3} x {4,5,6} -> reduced map at e_i + e_j."""

    values: dict

    def __getitem__(self, key: tuple[int, int]) -> tuple:
        return self.values[key]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ThetaCandidates:
    top: tuple  # of (theta1, theta2)
    bottom: tuple  # of (theta4, theta5)
    resultant_degrees: tuple
    resultants: tuple


@dataclass(frozen=True)
class ThetaZeta:
    theta: tuple  # theta1, theta2, theta4, theta5
    zeta: tuple  # zeta1 .. zeta6

    def blocks(self, params: SystemParams) -> dict:
        fq = params.field.fq
        th1, th2, th4, th5 = self.theta
        one = (1, 0, 0)
        return {
            "L21": from_columns(self.zeta[0:3]),
            "L22": from_columns(self.zeta[3:6]),
            "L31": mat_inv(fq, from_columns((th1, th2, one))),
            "L32": mat_inv(fq, from_columns((th4, th5, one))),
        }


def reduced_eval(pk: PublicKey, l1: Sequence, params: SystemParams | None, v: Sequence[int]) -> tuple:
    """Public map after undoing L1 and the E stage: L3(F(L2 v)) when ``l1`` is right."""
    params = params or pk.params
    T = params.field
    fq = T.fq
    x = exp_map(T, 2, params.E_inv, to_ext2(v))
    m = flatten(mat_vec(fq, mat_inv(fq, L), xk) for L, xk in zip(l1, x))
    return eval_public(pk, m)


# offset keeping every F_{q^2} block nonzero; flipping bit 0 of any coordinate keeps it nonzero
Z_OFFSET = (2, 2, 2)


def collect_z(pk: PublicKey, l1: Sequence, params: SystemParams | None = None) -> ZTable:
    """Reduced map at the nine vectors e_i + e_j.

    Those vectors always contain a zero F_{q^2} block, so they are reached
    through biadditivity in the (top, bottom) halves:
    R(e_i, e_j) = R(o+e_i, o+e_j) + R(o, o+e_j) + R(o+e_i, o) + R(o, o).
    """
    params = params or pk.params
    cache: dict = {}

    def R(i: int, j: int) -> tuple:
        key = (i, j)
        if key not in cache:
            t, b = list(Z_OFFSET), list(Z_OFFSET)
            if i:
                t[i - 1] ^= 1
            if j:
                b[j - 1] ^= 1
            cache[key] = reduced_eval(pk, l1, params, t + b)
        return cache[key]

    values = {}
    for i in (1, 2, 3):
        for j in (4, 5, 6):
            parts = (R(i, j - 3), R(0, j - 3), R(i, 0), R(0, 0))
            values[(i, j)] = tuple(a ^ b ^ c ^ d for a, b, c, d in zip(*parts))
    return ZTable(values)


ROWS = (1, 2, 3)
COLS = (4, 5, 6)
# the paper's pair first, then the remaining ones in a fixed order
MINOR_PAIRS = (
    (((1, 2), (4, 5)), ((1, 2), (4, 6))),
    (((1, 2), (4, 5)), ((1, 3), (4, 6))),
    (((1, 3), (4, 5)), ((2, 3), (4, 6))),
    (((1, 2), (5, 6)), ((1, 3), (4, 5))),
    (((2, 3), (4, 5)), ((1, 2), (5, 6))),
)


def _linear_forms(z: ZTable, half: int) -> dict:
    """A^{ij} = z1 X + z2 Y + z3 as bivariate dicts over F_q (X, Y are the two unknown thetas)."""
    k = 3 * half
    out = {}
    for key, zz in z.values.items():
        d = {(1, 0): zz[k], (0, 1): zz[k + 1], (0, 0): zz[k + 2]}
        out[key] = {m: c for m, c in d.items() if c}
    return out


def _minor(A: dict, rows: tuple, cols: tuple, K) -> dict:
    (i, j), (k, l) = rows, cols
    return bivar_add(bivar_mul(A[(i, k)], A[(j, l)], K), bivar_mul(A[(i, l)], A[(j, k)], K), K)


def _all_minors(A: dict, K) -> list:
    return [_minor(A, (i, j), (k, l), K)
            for i, j in ((1, 2), (1, 3), (2, 3)) for k, l in ((4, 5), (4, 6), (5, 6))]


def _lift(P: dict, K3) -> dict:
    return {m: K3.embed(c) for m, c in P.items()}


def _non_base_part(R: tuple, T) -> tuple:
    """Factor of R collecting its roots in F_{q^3} but not in F_q (coefficients in F_q)."""
    K1 = T.level(1)
    w = T.w
    x = (0, 1)
    g = upoly_gcd(R, padd(frobenius_x(R, K1, 3 * w), x, K1), K1)
    base = upoly_gcd(g, padd(frobenius_x(g, K1, w), x, K1), K1) if degree(g) > 0 else (1,)
    return pdivmod(g, base, K1)[0]


def _is_independent(T, a, b) -> bool:
    """(a, b, 1) linearly independent over F_q."""
    return mat_det(T.fq, from_columns((a, b, (1, 0, 0)))) != 0


def _solve_half(z: ZTable, params: SystemParams, half: int) -> tuple[list, tuple]:
    T = params.field
    K1, K3 = T.level(1), T.level(3)
    A = _linear_forms(z, half)
    for (r1, c1), (r2, c2) in MINOR_PAIRS:
        P, Q = _minor(A, r1, c1, K1), _minor(A, r2, c2, K1)
        if not P or not Q or (bivar_degree(P, 0) <= 0 and bivar_degree(Q, 0) <= 0):
            continue
        try:
            R = resultant_eliminate(P, Q, K1, eliminate=0)
        except DegenerateSystem:
            continue
        break
    else:
        raise NoSolution("every minor pair is degenerate")
    h = _non_base_part(R, T)
    if degree(h) <= 0:
        return [], R
    minors = [_lift(M, K3) for M in _all_minors(A, K1)]
    A3 = {key: _lift(P, K3) for key, P in A.items()}
    out = []
    for th2 in upoly_roots(embed_poly(h, K3), K3):
        g = ()
        for M in minors:
            g = upoly_gcd(g, bivar_substitute(M, 1, th2, K3), K3)
            if g == (K3.one,):
                break
        if degree(g) <= 0:
            continue
        for th1 in upoly_roots(g, K3):
            if not _is_independent(T, th1, th2):
                continue
            if any(_eval_form(P, th1, th2, T) == K3.zero for P in A3.values()):
                continue
            out.append((th1, th2))
    return out, R


def _eval_form(P: dict, x, y, T):
    acc = T.zero(3)
    for (i, j), c in P.items():
        t = c
        if i:
            t = T.mul3(t, x)
        if j:
            t = T.mul3(t, y)
        acc = T.add(3, acc, t)
    return acc


def solve_thetas(z: ZTable, params: SystemParams) -> ThetaCandidates:
    """Candidate (theta1, theta2) and (theta4, theta5) with theta3 = theta6 = 1.

    Every survivor makes all nine 2x2 minors of the A^{ij} table vanish.  The
    Frobenius conjugates of a solution are solutions too (they give
    equivalent keys), so up to three candidates per half are returned.
    """
    top, r_top = _solve_half(z, params, 0)
    if not top:
        raise NoSolution("no admissible (theta1, theta2)")
    bottom, r_bot = _solve_half(z, params, 1)
    if not bottom:
        raise NoSolution("no admissible (theta4, theta5)")
    return ThetaCandidates(tuple(top), tuple(bottom), (degree(r_top), degree(r_bot)), (r_top, r_bot))


ZETA_PAIRS = ((1, 4), (1, 5), (1, 6), (2, 4), (3, 4))


def _a_values(z: ZTable, theta: tuple, T) -> dict:
    th1, th2, th4, th5 = theta
    out = {}
    for key, zz in z.values.items():
        top = T.add(3, T.add(3, T.scale(3, zz[0], th1), T.scale(3, zz[1], th2)), T.embed(3, zz[2]))
        bot = T.add(3, T.add(3, T.scale(3, zz[3], th4), T.scale(3, zz[4], th5)), T.embed(3, zz[5]))
        out[key] = (top, bot)
    return out


def recover_zetas(theta: tuple, z: ZTable, params: SystemParams) -> ThetaZeta:
    T = params.field
    A = _a_values(z, theta, T)
    found = {}
    for i, j in ZETA_PAIRS:
        top, bot = A[(i, j)]
        if T.is_zero(3, top) or T.is_zero(3, bot):
            raise Inconsistent(f"A^{i}{j} vanishes")
        zi, zj = exp_map(T, 3, params.F_inv, (top, bot))
        for idx, val in ((i, zi), (j, zj)):
            if found.setdefault(idx, val) != val:
                raise Inconsistent(f"zeta{idx} disagrees across pairs")
    zeta = tuple(found[k] for k in range(1, 7))
    for (i, j), pair in A.items():
        if exp_map(T, 3, params.F, (zeta[i - 1], zeta[j - 1])) != pair:
            raise Inconsistent(f"equation pair ({i}, {j}) fails")
    fq = T.fq
    if not mat_det(fq, from_columns(zeta[0:3])) or not mat_det(fq, from_columns(zeta[3:6])):
        raise Inconsistent("zeta columns are dependent")
    return ThetaZeta(tuple(theta), zeta)


def assemble_key(l1: Sequence, tz: ThetaZeta, params: SystemParams) -> PrivateKey:
    return PrivateKey(l1[0], l1[1], l1[2], **tz.blocks(params))


def recover_l2l3(pk: PublicKey, l1: Sequence, params: SystemParams | None = None) -> PrivateKey:
    """Complete a full L1 candidate into a key with exactly the public key ``pk``.

    Raises NoSolution or Inconsistent when the candidate is rejected by the
    equation system, VerificationFailed when only the final public-key
    comparison rejects it.
    """
    params = params or pk.params
    z = collect_z(pk, l1, params)
    cands = solve_thetas(z, params)
    consistent = 0
    for top in cands.top:
        for bot in cands.bottom:
            try:
                tz = recover_zetas(top + bot, z, params)
            except Inconsistent:
                continue
            consistent += 1
            key = assemble_key(l1, tz, params)
            if derive_public_key(key, params) == pk:
                return key
    if not consistent:
        raise Inconsistent("no theta combination yields consistent zetas")
    raise VerificationFailed("candidate keys do not reproduce the public key")


# ---------------------------------------------------------------------------
# search over L12


def l12_candidate(u: int, v: int) -> tuple:
    return ((u, 1), (v, 0))


def candidate_index(q: int, u: int, v: int) -> int:
    """Position of (u, v) in the search order: u outer over F_q, v inner over F_q^*."""
    return u * (q - 1) + (v - 1)


def candidate_at(q: int, index: int) -> tuple[int, int]:
    u, r = divmod(index, q - 1)
    return u, r + 1


# evaluation points of the biadditivity prefilter: (t, b) halves
_T0 = (2, 2, 2)
_T1 = (3, 5, 7)
_PREFILTER_POINTS = (
    _T0 + _T0,
    _T0 + _T1,
    _T0 + tuple(a ^ b for a, b in zip(_T0, _T1)),
    _T1 + _T0,
    tuple(a ^ b for a, b in zip(_T0, _T1)) + _T0,
)
# each relation: the three values sum to zero when L1 is right
_RELATIONS = ((0, 1, 2), (0, 3, 4))


class BatchFilter:
    """Vectorized biadditivity test of many L12 candidates at once.

    For each evaluation point only (x3, x4) depends on the candidate, so each
    output component collapses to sum_g C_g x3^a_g x4^b_g, evaluated with
    exp/log tables over numpy arrays of candidates.
    """

    def __init__(self, pk: PublicKey, L11, L13):
        import numpy as np

        self.np = np
        params = pk.params
        T = params.field
        fq = T.fq
        if fq.exp is None:
            raise ValueError("batch filtering needs table arithmetic")
        self.n = n = fq.order
        self.exp = np.array(fq.exp[:n], dtype=np.int64)
        self.log = np.array(fq.log, dtype=np.int64)
        i11, i13 = mat_inv(fq, L11), mat_inv(fq, L13)
        self.points = []
        for v in _PREFILTER_POINTS:
            X1, X2, X3 = exp_map(T, 2, params.E_inv, to_ext2(v))
            m12 = mat_vec(fq, i11, X1)
            m56 = mat_vec(fq, i13, X3)
            fixed = {0: m12[0], 1: m12[1], 4: m56[0], 5: m56[1]}
            comps = []
            for poly in pk.polys:
                groups: dict = {}
                for mon, c in poly:
                    t = c
                    for k, val in fixed.items():
                        if mon[k]:
                            t = fq.mul(t, fq.pow(val, mon[k]))
                    if t:
                        key = (mon[2], mon[3])
                        groups[key] = groups.get(key, 0) ^ t
                groups = {k: c for k, c in groups.items() if c}
                comps.append(tuple((a, b, fq.log[c]) for (a, b), c in sorted(groups.items())))
            self.points.append((X2, comps))

    def _eval(self, p: int, comp: int, u, v):
        np, n, exp, log = self.np, self.n, self.exp, self.log
        (x2a, x2b), comps = self.points[p]
        terms = comps[comp]
        if x2b:
            lm3 = (log[x2b] - log[v]) % n
            um3 = np.where(u == 0, 0, exp[(log[u] + lm3) % n])
        else:
            lm3 = None
            um3 = np.zeros_like(u)
        m4 = um3 ^ x2a
        m4zero = m4 == 0
        lm4 = log[m4]
        acc = np.zeros_like(u)
        p3: dict = {}
        p4: dict = {}
        for a, b, lc in terms:
            if a and lm3 is None:
                continue
            idx = lc
            if a:
                e3 = p3.get(a)
                if e3 is None:
                    e3 = p3[a] = (a * lm3) % n
                idx = idx + e3
            if b:
                e4 = p4.get(b)
                if e4 is None:
                    e4 = p4[b] = (b * lm4) % n
                idx = idx + e4
            term = exp[idx % n] if not np.isscalar(idx) else np.full_like(u, exp[idx % n])
            if b:
                term = np.where(m4zero, 0, term)
            acc ^= term
        return acc

    def survivors(self, u, v):
        """Indices (into u, v) of the candidates passing every relation on every component."""
        np = self.np
        keep = np.arange(len(u))
        for comp in range(6):
            for rel in _RELATIONS:
                if not len(keep):
                    return keep
                uu, vv = u[keep], v[keep]
                s = self._eval(rel[0], comp, uu, vv)
                s ^= self._eval(rel[1], comp, uu, vv)
                s ^= self._eval(rel[2], comp, uu, vv)
                keep = keep[s == 0]
        return keep


@dataclass
class ChunkResult:
    hit: int | None
    key: PrivateKey | None
    scanned: int
    prefilter_passed: int
    l2l3_calls: int
    rejected_early: int
    rejected_at_verification: int


_CTX: dict = {}


def _init_worker(pk: PublicKey, L11, L13, prefilter: bool) -> None:
    _CTX.clear()
    _CTX["pk"] = pk
    _CTX["L11"], _CTX["L13"] = L11, L13
    _CTX["filter"] = BatchFilter(pk, L11, L13) if prefilter else None


def _try_candidate(pk, L11, L13, u, v, stats: ChunkResult):
    stats.l2l3_calls += 1
    try:
        return recover_l2l3(pk, (L11, l12_candidate(u, v), L13))
    except VerificationFailed:
        stats.rejected_at_verification += 1
    except (AttackError, DegenerateSystem, ZeroBlock, FieldError):
        stats.rejected_early += 1
    return None


def _scan(start: int, stop: int) -> ChunkResult:
    """Scan candidate indices [start, stop) in order; stop at the first verified key."""
    pk, L11, L13, filt = _CTX["pk"], _CTX["L11"], _CTX["L13"], _CTX["filter"]
    q = pk.params.q
    stats = ChunkResult(None, None, 0, 0, 0, 0, 0)
    if filt is None:
        for idx in range(start, stop):
            u, v = candidate_at(q, idx)
            key = _try_candidate(pk, L11, L13, u, v, stats)
            if key is not None:
                stats.hit, stats.key, stats.scanned = idx, key, idx - start + 1
                return stats
        stats.scanned = stop - start
        return stats
    np = filt.np
    idx = np.arange(start, stop, dtype=np.int64)
    u, v = idx // (q - 1), idx % (q - 1) + 1
    keep = filt.survivors(u, v)
    stats.prefilter_passed = len(keep)
    for k in keep:
        key = _try_candidate(pk, L11, L13, int(u[k]), int(v[k]), stats)
        if key is not None:
            hit = int(idx[k])
            stats.hit, stats.key, stats.scanned = hit, key, hit - start + 1
            return stats
    stats.scanned = stop - start
    return stats


@dataclass
class SearchOutcome:
    key: PrivateKey  # key of the original public key
    index: int
    u: int
    v: int
    candidates_tried: int
    prefilter_passed: int
    l2l3_calls: int
    rejected_early: int
    rejected_at_verification: int


def default_chunk(q: int) -> int:
    return max(q - 1, (1 << 18) // (q - 1) * (q - 1))


def search_l12_detailed(pk: PublicKey, rec: RecoveredL1, workers: int = 1,
                        prefilter: bool | None = None, chunk: int | None = None,
                        start: int = 0) -> SearchOutcome:
    params = pk.params
    q = params.q
    work_pk = pk if rec.substitution is None else substitute(pk, rec.substitution)
    if prefilter is None:
        prefilter = params.field.fq.exp is not None
    total = q * (q - 1)
    chunk = chunk or default_chunk(q)
    bounds = [(s, min(s + chunk, total)) for s in range(start, total, chunk)]
    init = (work_pk, rec.L11, rec.L13, prefilter)
    results: list[ChunkResult] = []
    if workers <= 1:
        _init_worker(*init)
        for s, e in bounds:
            r = _scan(s, e)
            results.append(r)
            if r.hit is not None:
                break
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=init) as ex:
            futures = [ex.submit(_scan, s, e) for s, e in bounds]
            for fut in futures:
                r = fut.result()
                results.append(r)
                if r.hit is not None:
                    for other in futures:
                        other.cancel()
                    break
    hit = results[-1] if results and results[-1].hit is not None else None
    if hit is None:
        raise SearchExhausted(f"no L12 candidate among {total - start} verified")
    key = undo_substitution(hit.key, params, rec.substitution)
    if derive_public_key(key, params) != pk:
        raise VerificationFailed("mapped-back key does not reproduce the public key")
    u, v = candidate_at(q, hit.hit)
    return SearchOutcome(
        key=key, index=hit.hit, u=u, v=v, candidates_tried=hit.hit + 1 - start,
        prefilter_passed=sum(r.prefilter_passed for r in results),
        l2l3_calls=sum(r.l2l3_calls for r in results),
        rejected_early=sum(r.rejected_early for r in results),
        rejected_at_verification=sum(r.rejected_at_verification for r in results),
    )


def search_l12(pk: PublicKey, rec: RecoveredL1, params: SystemParams | None = None,
               workers: int = 1, prefilter: bool | None = None) -> PrivateKey:
    return search_l12_detailed(pk, rec, workers=workers, prefilter=prefilter).key


# ---------------------------------------------------------------------------
# full pipeline


def key_fingerprint(sk: PrivateKey) -> str:
    data = ";".join(",".join(str(x) for row in b for x in row) for b in sk.blocks())
    return hashlib.sha256(data.encode()).hexdigest()[:16]


@dataclass
class AttackReport:
    w: int
    branch: str
    fallback_reason: str | None
    substitution: int | None
    c: int
    candidates_tried: int
    u: int
    v: int
    prefilter_passed: int
    l2l3_calls: int
    verified: bool
    fingerprint: str
    timings: dict = field(default_factory=dict)

    def line(self) -> str:
        return (f"key={self.fingerprint} candidates_tried={self.candidates_tried} "
                f"branch={self.branch if self.substitution is None else 'fallback'} "
                f"verified={'true' if self.verified else 'false'}")

    def summary(self) -> str:
        q = 1 << self.w
        lines = [
            f"field: GF(2^{self.w}), search space q(q-1) = {q * (q - 1)}",
            f"L1 branch: {self.branch}, c = {self.c:#x}",
        ]
        if self.substitution is not None:
            lines.append(f"change of variables: t = {self.substitution} (trigger: {self.fallback_reason})")
        lines += [
            f"L12 hit: u = {self.u:#x}, v = {self.v:#x}",
            f"candidates tried: {self.candidates_tried}",
            f"passed prefilter: {self.prefilter_passed}, full L2/L3 solves: {self.l2l3_calls}",
        ]
        lines += [f"time {name}: {secs:.3f} s" for name, secs in self.timings.items()]
        lines.append(self.line())
        return "\n".join(lines)


def full_attack(pk: PublicKey, params: SystemParams | None = None, workers: int = 1,
                prefilter: bool | None = None) -> tuple[PrivateKey, AttackReport]:
    if params is not None and params != pk.params:
        raise ValueError("public key was made with different parameters")
    t0 = time.perf_counter()
    rec = recover_l1(pk)
    t1 = time.perf_counter()
    out = search_l12_detailed(pk, rec, workers=workers, prefilter=prefilter)
    t2 = time.perf_counter()
    verified = derive_public_key(out.key, pk.params) == pk
    if not verified:
        raise VerificationFailed("recovered key does not reproduce the public key")
    report = AttackReport(
        w=pk.params.w, branch=rec.branch, fallback_reason=rec.fallback_reason,
        substitution=rec.substitution, c=rec.c, candidates_tried=out.candidates_tried,
        u=out.u, v=out.v, prefilter_passed=out.prefilter_passed, l2l3_calls=out.l2l3_calls,
        verified=verified, fingerprint=key_fingerprint(out.key),
        timings={"recover_l1": t1 - t0, "search": t2 - t1, "total": t2 - t0},
    )
    return out.key, report
