"""Exact integer convolution by Kronecker substitution on GMP big integers."""
from __future__ import annotations

import gmpy2


def _slot_bytes(bits: int) -> int:
    return (bits + 7) // 8


def pack(values, nbytes: int):
    """Nonnegative integers < 2^(8*nbytes) into one mpz, lowest index in the lowest slot."""
    buf = b"".join(int(v).to_bytes(nbytes, "little") for v in values)
    return gmpy2.mpz(int.from_bytes(buf, "little"))


def unpack(z, nbytes: int, count: int) -> list:
    z = int(z)
    buf = z.to_bytes(max(nbytes * count, (z.bit_length() + 7) // 8), "little")
    return [int.from_bytes(buf[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]


def convolve_nonneg(a, b, max_a: int, max_b: int) -> list:
    """Full linear convolution of nonnegative sequences with entries below max_a, max_b."""
    la, lb = len(a), len(b)
    bound = min(la, lb) * max_a * max_b
    nb = _slot_bytes(bound.bit_length() + 1)
    prod = pack(a, nb) * pack(b, nb)
    return unpack(prod, nb, la + lb - 1)


def _pack_signed(values, nbytes: int):
    pos = pack((v if v > 0 else 0 for v in values), nbytes)
    neg = pack((-v if v < 0 else 0 for v in values), nbytes)
    return pos - neg


def convolve_signed(a, b, max_abs_a: int, max_abs_b: int) -> list:
    """Full linear convolution of signed integer sequences."""
    la, lb = len(a), len(b)
    bound = min(la, lb) * max_abs_a * max_abs_b
    nb = _slot_bytes(bound.bit_length() + 2)
    count = la + lb - 1
    prod = _pack_signed(a, nb) * _pack_signed(b, nb)
    half = 1 << (8 * nb - 1)
    bias = gmpy2.mpz(int.from_bytes((b"\x00" * (nb - 1) + b"\x80") * count, "little"))
    vals = unpack(prod + bias, nb, count)
    return [v - half for v in vals]


def convolve_mod(a, b, modulus: int) -> list:
    """Full linear convolution of residues modulo `modulus`, reduced."""
    return [v % modulus for v in convolve_nonneg(a, b, modulus, modulus)]
