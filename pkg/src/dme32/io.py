"""Text formats for parameters, keys, messages and attack reports.

Every writer produces a canonical text, so write -> read -> write is
byte-identical.  Field elements are fixed-width lowercase hex.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .dme import KEY_BLOCKS, PrivateKey, PublicKey, SystemParams
from .fields import BaseFieldParams, TowerParams, fq_from_hex, fq_to_hex


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers


def poly_to_str(f: int) -> str:
    """Binary polynomial as text, e.g. x^48+x^28+x^27+x+1."""
    terms = []
    for i in range(f.bit_length() - 1, -1, -1):
        if f >> i & 1:
            terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return "+".join(terms) or "0"


def poly_from_str(s: str) -> int:
    f = 0
    for term in s.replace(" ", "").split("+"):
        if term == "1":
            e = 0
        elif term == "x":
            e = 1
        elif term.startswith("x^") and term[2:].isdigit():
            e = int(term[2:])
        else:
            raise ParseError(f"bad polynomial term {term!r}")
        f ^= 1 << e
    return f


def _pow2_to_str(e: int) -> str:
    return "0" if e == 0 else f"2^{e.bit_length() - 1}"


def _pow2_from_str(s: str) -> int:
    if s == "0":
        return 0
    if s.startswith("2^") and s[2:].isdigit():
        return 1 << int(s[2:])
    if s.isdigit():
        return int(s)
    raise ParseError(f"bad exponent entry {s!r}")


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _header(line: str, tag: str) -> int:
    parts = line.split()
    if not parts or parts[0] != tag or len(parts) < 2 or not parts[1].startswith("w="):
        raise ParseError(f"expected header '{tag} w=<width>', got {line!r}")
    try:
        return int(parts[1][2:])
    except ValueError:
        raise ParseError(f"bad width in {line!r}") from None


def _hex(s: str, w: int) -> int:
    try:
        return fq_from_hex(s, w)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# parameters


def format_params(params: SystemParams) -> str:
    t = params.tower
    w = t.w
    out = [f"dme32-params w={w}", f"base {poly_to_str(t.base.modulus)}",
           "quad " + " ".join(fq_to_hex(x, w) for x in t.quad),
           "cubic " + " ".join(fq_to_hex(x, w) for x in t.cubic)]
    out += ["E " + " ".join(_pow2_to_str(e) for e in row) for row in params.E]
    out += ["F " + " ".join(_pow2_to_str(e) for e in row) for row in params.F]
    return "\n".join(out) + "\n"


def parse_params(text: str) -> SystemParams:
    lines = _lines(text)
    if len(lines) != 9:
        raise ParseError(f"parameter file needs 9 lines, found {len(lines)}")
    w = _header(lines[0], "dme32-params")
    rows: dict[str, list] = {"base": [], "quad": [], "cubic": [], "E": [], "F": []}
    for ln in lines[1:]:
        tag, _, rest = ln.partition(" ")
        if tag not in rows:
            raise ParseError(f"unknown parameter line {ln!r}")
        rows[tag].append(rest.split())
    if [len(rows[k]) for k in ("base", "quad", "cubic", "E", "F")] != [1, 1, 1, 3, 2]:
        raise ParseError("parameter file needs one base, quad, cubic line, three E and two F lines")
    modulus = poly_from_str("".join(rows["base"][0]))
    quad = tuple(_hex(x, w) for x in rows["quad"][0])
    cubic = tuple(_hex(x, w) for x in rows["cubic"][0])
    E = tuple(tuple(_pow2_from_str(x) for x in r) for r in rows["E"])
    F = tuple(tuple(_pow2_from_str(x) for x in r) for r in rows["F"])
    if len(quad) != 2 or len(cubic) != 3 or any(len(r) != 3 for r in E) or any(len(r) != 2 for r in F):
        raise ParseError("wrong number of entries in a parameter line")
    try:
        tower = TowerParams(BaseFieldParams(w, modulus), quad, cubic)
        return SystemParams(tower, E, F)
    except ValueError as exc:
        raise ParseError(f"invalid parameters: {exc}") from None


# ---------------------------------------------------------------------------
# private keys


def format_private_key(sk: PrivateKey, params: SystemParams) -> str:
    w = params.w
    out = [f"dme32-private w={w}"]
    for name, block in zip(KEY_BLOCKS, sk.blocks()):
        out.append(name)
        out += [" ".join(fq_to_hex(x, w) for x in row) for row in block]
    return "\n".join(out) + "\n"


def parse_private_key(text: str, params: SystemParams) -> PrivateKey:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty key file")
    w = _header(lines[0], "dme32-private")
    if w != params.w:
        raise ParseError(f"key width {w} does not match parameter width {params.w}")
    blocks = {}
    i = 1
    for name, size in zip(KEY_BLOCKS, (2, 2, 2, 3, 3, 3, 3)):
        if i >= len(lines) or lines[i] != name:
            raise ParseError(f"expected block label {name}")
        rows = lines[i + 1:i + 1 + size]
        if len(rows) != size:
            raise ParseError(f"block {name} is truncated")
        block = tuple(tuple(_hex(x, w) for x in r.split()) for r in rows)
        if any(len(r) != size for r in block):
            raise ParseError(f"block {name} must be {size}x{size}")
        blocks[name] = block
        i += 1 + size
    if i != len(lines):
        raise ParseError("trailing data after the last key block")
    sk = PrivateKey(**blocks)
    if not sk.is_valid(params):
        raise ParseError("a key block is singular")
    return sk


# ---------------------------------------------------------------------------
# public keys


def format_public_key(pk: PublicKey) -> str:
    w = pk.params.w
    out = [f"dme32-public w={w} terms={pk.num_terms()}"]
    for k, poly in enumerate(pk.polys, 1):
        out.append(f"component {k}")
        out += [" ".join(str(e) for e in mon) + " " + fq_to_hex(c, w) for mon, c in poly]
    return "\n".join(out) + "\n"


def parse_public_key(text: str, params: SystemParams) -> PublicKey:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty public key file")
    w = _header(lines[0], "dme32-public")
    if w != params.w:
        raise ParseError(f"public key width {w} does not match parameter width {params.w}")
    dicts: list[dict] = []
    for ln in lines[1:]:
        if ln.startswith("component"):
            if ln != f"component {len(dicts) + 1}":
                raise ParseError(f"unexpected {ln!r}")
            dicts.append({})
            continue
        if not dicts:
            raise ParseError("term before the first component marker")
        parts = ln.split()
        if len(parts) != 7:
            raise ParseError(f"term line needs 6 exponents and a coefficient: {ln!r}")
        try:
            mon = tuple(int(x) for x in parts[:6])
        except ValueError:
            raise ParseError(f"bad exponent in {ln!r}") from None
        if any(e < 0 or e >= params.q for e in mon):
            raise ParseError(f"exponent out of range in {ln!r}")
        if mon in dicts[-1]:
            raise ParseError(f"repeated monomial in {ln!r}")
        dicts[-1][mon] = _hex(parts[6], w)
    if len(dicts) != 6:
        raise ParseError(f"expected 6 components, found {len(dicts)}")
    return PublicKey.from_dicts(params, dicts)


# ---------------------------------------------------------------------------
# messages


def format_vector(v: Sequence[int], w: int) -> str:
    return "".join(fq_to_hex(x, w) + "\n" for x in v)


def parse_vector(text: str, w: int) -> tuple:
    lines = _lines(text)
    if len(lines) != 6:
        raise ParseError(f"expected 6 hex lines, found {len(lines)}")
    return tuple(_hex(x, w) for x in lines)


# ---------------------------------------------------------------------------
# files


def read_text(path: str | Path) -> str:
    return Path(path).read_text()


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text)
