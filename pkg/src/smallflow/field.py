"""Arithmetic in binary fields GF(2^s).

Field elements are plain Python ints in [0, 2^s): bit i is the coefficient
of x^i in the polynomial basis.  The zero and one elements are 0 and 1.
Addition is XOR; multiplication is carryless (polynomial) multiplication
reduced modulo an irreducible polynomial of degree s.

The default field is GF(2^64) with reduction polynomial
x^64 + x^4 + x^3 + x + 1, large enough that a random evaluation of a
polynomial of degree ~10^7 is zero with probability below 10^-11.  Small
fields (s = 8, 16) are supported for exhaustive cross-checks.

The module also provides "packed vectors": many field elements stored in
one big int, 128 bits per slot, so that a whole vector can be multiplied
by a shared scalar with a handful of CPython big-int operations.  Products
are left unreduced (< 128 bits per slot) and folded back to s bits with
vec_reduce once a DP layer is complete.
"""

from __future__ import annotations

import hashlib
import random

# Verified irreducible reduction polynomials (low-weight, standard tables).
# Key: exponent s; value: full polynomial including the x^s bit.
DEFAULT_POLYS = {
    8: (1 << 8) | 0b1_1011,          # x^8 + x^4 + x^3 + x + 1
    16: (1 << 16) | 0b10_1011,       # x^16 + x^5 + x^3 + x + 1
    64: (1 << 64) | 0b1_1011,        # x^64 + x^4 + x^3 + x + 1
}

SLOT_BITS = 128
SLOT_BYTES = SLOT_BITS // 8


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, b: int) -> int:
    """Remainder of carryless division of a by b over GF(2)."""
    db = _poly_degree(b)
    while a.bit_length() - 1 >= db and a:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def is_irreducible(poly: int, s: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..s//2.

    Only intended for s <= 16; the shipped defaults for larger s come from
    a verified table.
    """
    if _poly_degree(poly) != s:
        return False
    if poly & 1 == 0:  # divisible by x
        return s == 1 and poly == 0b10
    for d in range(1, s // 2 + 1):
        for low in range(1 << d):
            cand = (1 << d) | low
            if _poly_mod(poly, cand) == 0:
                return False
    return True


class GF2Field:
    """GF(2^s) with a fixed degree-s irreducible reduction polynomial.

    Parameters
    ----------
    exponent : int
        s >= 1; the field has 2^s elements.
    reduction_poly : int or None
        Full polynomial bitmask including the x^s term.  None selects the
        built-in default for s in {8, 16, 64}.  For s <= 16 irreducibility
        is verified exhaustively at construction; for larger s the
        polynomial must be one of the shipped defaults.
    """

    def __init__(self, exponent: int, reduction_poly: int | None = None):
        if exponent < 1:
            raise ValueError(f"field exponent must be >= 1, got {exponent}")
        if reduction_poly is None:
            if exponent not in DEFAULT_POLYS:
                raise ValueError(
                    f"no built-in reduction polynomial for s={exponent}; "
                    f"built-ins: {sorted(DEFAULT_POLYS)}"
                )
            reduction_poly = DEFAULT_POLYS[exponent]
        if _poly_degree(reduction_poly) != exponent:
            raise ValueError(
                f"reduction polynomial 0x{reduction_poly:x} does not have "
                f"degree {exponent}"
            )
        if exponent <= 16:
            if not is_irreducible(reduction_poly, exponent):
                raise ValueError(
                    f"reduction polynomial 0x{reduction_poly:x} is reducible"
                )
        elif DEFAULT_POLYS.get(exponent) != reduction_poly:
            raise ValueError(
                f"degree-{exponent} polynomials cannot be checked exhaustively; "
                f"use the shipped default"
            )
        self.exponent = exponent
        self.poly = reduction_poly
        self.order = 1 << exponent
        self.mask = self.order - 1
        # Bit positions of the reduction tail (poly minus the x^s term).
        self.tail = tuple(
            i for i in range(exponent) if (reduction_poly >> i) & 1
        )

    def __repr__(self):
        return f"GF2Field(2^{self.exponent}, poly=0x{self.poly:x})"

    def __eq__(self, other):
        return (
            isinstance(other, GF2Field)
            and other.exponent == self.exponent
            and other.poly == self.poly
        )

    def __hash__(self):
        return hash((self.exponent, self.poly))

    def add(self, a: int, b: int) -> int:
        """Field addition: XOR of representations (characteristic two)."""
        return a ^ b

    def reduce(self, p: int) -> int:
        """Fold a carryless product back below 2^s."""
        s = self.exponent
        mask = self.mask
        tail = self.tail
        while p >> s:
            hi = p >> s
            p &= mask
            for j in tail:
                p ^= hi << j
        return p

    def mul(self, a: int, b: int) -> int:
        """Carryless product of a and b, reduced.  4-bit window method."""
        if a == 0 or b == 0:
            return 0
        if a == 1:
            return b
        if b == 1:
            return a
        t2 = b << 1
        t4 = b << 2
        t8 = b << 3
        t6 = t4 ^ t2
        table = (
            0, b, t2, t2 ^ b, t4, t4 ^ b, t6, t6 ^ b,
            t8, t8 ^ b, t8 ^ t2, t8 ^ t2 ^ b, t8 ^ t4, t8 ^ t4 ^ b,
            t8 ^ t6, t8 ^ t6 ^ b,
        )
        p = 0
        shift = 0
        while a:
            w = a & 15
            if w:
                p ^= table[w] << shift
            a >>= 4
            shift += 4
        return self.reduce(p)

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def random_element(self, rng: random.Random) -> int:
        """Uniform element of the field; deterministic given rng state."""
        return rng.getrandbits(self.exponent)


def derive_rng(seed: int, *path) -> random.Random:
    """Independent child stream keyed by (seed, *path).

    Hash-based so the mapping is stable across runs and platforms; used to
    hand each repetition / edge test / retry attempt its own stream.
    """
    key = ":".join(str(p) for p in (seed, *path)).encode()
    digest = hashlib.sha256(key).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


# ---------------------------------------------------------------------------
# Packed vectors: field elements in 128-bit slots of one big int.
# ---------------------------------------------------------------------------

_LOW_MASKS: dict[tuple[int, int], int] = {}


def _low_mask(count: int, s: int) -> int:
    """Mask with the low s bits set in each of `count` slots."""
    key = (count, s)
    m = _LOW_MASKS.get(key)
    if m is None:
        chunk = ((1 << s) - 1).to_bytes(SLOT_BYTES, "little")
        m = int.from_bytes(chunk * count, "little")
        _LOW_MASKS[key] = m
    return m


def vec_pack(values) -> int:
    """Pack a sequence of reduced elements into slot form."""
    buf = bytearray(SLOT_BYTES * len(values))
    for i, v in enumerate(values):
        if v:
            off = SLOT_BYTES * i
            buf[off:off + 8] = v.to_bytes(8, "little")
    return int.from_bytes(buf, "little")


def vec_unpack(packed: int, count: int) -> list[int]:
    """Unpack `count` slots (values may be unreduced, up to 128 bits)."""
    buf = packed.to_bytes(SLOT_BYTES * count, "little")
    return [
        int.from_bytes(buf[SLOT_BYTES * i:SLOT_BYTES * (i + 1)], "little")
        for i in range(count)
    ]


def vec_window(packed: int):
    """4-bit window table of a packed vector, for repeated scalar products.

    Slots must hold reduced (< 2^64) values so that all window multiples
    stay inside their slot.
    """
    t2 = packed << 1
    t4 = packed << 2
    t8 = packed << 3
    t6 = t4 ^ t2
    return (
        0, packed, t2, t2 ^ packed, t4, t4 ^ packed, t6, t6 ^ packed,
        t8, t8 ^ packed, t8 ^ t2, t8 ^ t2 ^ packed, t8 ^ t4,
        t8 ^ t4 ^ packed, t8 ^ t6, t8 ^ t6 ^ packed,
    )


def vec_scalar_mul_w(window, scalar: int) -> int:
    """Multiply every slot of the windowed vector by a shared scalar.

    Returns unreduced slots (< 128 bits); XOR results together freely and
    call vec_reduce before the values feed another multiplication.
    """
    p = 0
    shift = 0
    while scalar:
        w = scalar & 15
        if w:
            p ^= window[w] << shift
        scalar >>= 4
        shift += 4
    return p


def vec_scalar_mul(packed: int, scalar: int) -> int:
    if scalar == 0 or packed == 0:
        return 0
    if scalar == 1:
        return packed
    return vec_scalar_mul_w(vec_window(packed), scalar)


def vec_reduce(packed: int, count: int, field: GF2Field) -> int:
    """Fold every slot of a packed vector below 2^s."""
    s = field.exponent
    low = _low_mask(count, s)
    high_sel = _low_mask(count, SLOT_BITS - s)
    tail = field.tail
    while True:
        hi = (packed >> s) & high_sel
        if not hi:
            return packed & low
        packed &= low
        for j in tail:
            packed ^= hi << j
