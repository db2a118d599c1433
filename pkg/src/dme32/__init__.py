"""DME-(3,2,q) cryptosystem and its structural key-recovery attack."""

from .attack import AttackReport, full_attack, recover_l1, recover_l2l3, search_l12
from .dme import (
    PrivateKey,
    PublicKey,
    SystemParams,
    decrypt,
    derive_public_key,
    encrypt_private,
    eval_public,
    gen_system_params,
    keygen,
)
from .malleability import normalize_key, same_public_key

__all__ = [
    "AttackReport", "PrivateKey", "PublicKey", "SystemParams", "decrypt", "derive_public_key",
    "encrypt_private", "eval_public", "full_attack", "gen_system_params", "keygen", "normalize_key",
    "recover_l1", "recover_l2l3", "same_public_key", "search_l12",
]
