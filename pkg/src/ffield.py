"""Exact arithmetic in F_p and in the quadratic extension F_p(sqrt(eps)).

Residues are stored in ``[0, p-1]``. The non-residue ``eps`` and the primitive
root are always the smallest ones, so every table built on top of this module
(conjugacy representatives, character values) is reproducible between runs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Union

from sympy import factorint, isprime, n_order, primitive_root as _sympy_primitive_root
from sympy.ntheory import discrete_log as _sympy_discrete_log
from sympy.ntheory import legendre_symbol, sqrt_mod as _sympy_sqrt_mod

from src.errors import FieldMismatchError, InvalidModulusError, ZeroElementError

logger = logging.getLogger(__name__)


def check_odd_prime(p: int) -> int:
    """Return ``p`` as int or raise InvalidModulusError."""
    try:
        p = int(p)
    except (TypeError, ValueError):
        raise InvalidModulusError(f"not an integer: {p!r}")
    if p < 3 or not isprime(p):
        raise InvalidModulusError(f"{p} is not prime" if p != 2 else "2 is even")
    return p


def smallest_nonresidue(p: int) -> int:
    """Smallest n >= 2 with n^((p-1)/2) == -1 (mod p)."""
    p = check_odd_prime(p)
    n = 2
    while pow(n, (p - 1) // 2, p) != p - 1:
        n += 1
    return n


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return legendre_symbol(a, p)


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """Smallest square root of ``a`` mod ``p`` or None for a non-residue."""
    return _sympy_sqrt_mod(a % p, p)


@dataclass(frozen=True)
class PrimeField:
    p: int
    epsilon: int
    primitive_root: int

    def is_square(self, a: int) -> bool:
        return legendre(a, self.p) == 1


@lru_cache(maxsize=None)
def prime_field(p: int) -> PrimeField:
    p = check_odd_prime(p)
    field = PrimeField(p=p, epsilon=smallest_nonresidue(p), primitive_root=int(_sympy_primitive_root(p)))
    logger.debug("F_%d: epsilon=%d, primitive root=%d", p, field.epsilon, field.primitive_root)
    return field


@dataclass(frozen=True)
class QuadExtElement:
    """zeta = x + y*sqrt(eps) over F_p."""
    x: int
    y: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "x", self.x % self.p)
        object.__setattr__(self, "y", self.y % self.p)

    @property
    def key(self):
        return (self.x, self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __mul__(self, other: "QuadExtElement") -> "QuadExtElement":
        return ext_mul(self, other, prime_field(self.p))

    def __neg__(self) -> "QuadExtElement":
        return QuadExtElement(-self.x, -self.y, self.p)

    def __str__(self) -> str:
        return f"{self.x}+{self.y}*sqrt(eps) mod {self.p}"


Scalar = Union[int, QuadExtElement]


def _same_field(a: QuadExtElement, field: PrimeField) -> None:
    if a.p != field.p:
        raise FieldMismatchError(f"element mod {a.p} used over F_{field.p}")


def ext_one(field: PrimeField) -> QuadExtElement:
    return QuadExtElement(1, 0, field.p)


def ext_mul(a: QuadExtElement, b: QuadExtElement, field: PrimeField) -> QuadExtElement:
    _same_field(a, field)
    _same_field(b, field)
    p, eps = field.p, field.epsilon
    return QuadExtElement(
        (a.x * b.x + eps * a.y * b.y) % p,
        (a.x * b.y + a.y * b.x) % p,
        p,
    )


def norm(z: QuadExtElement, field: PrimeField) -> int:
    """N(x + y sqrt(eps)) = x^2 - eps*y^2."""
    _same_field(z, field)
    return (z.x * z.x - field.epsilon * z.y * z.y) % field.p


def conjugate(z: QuadExtElement) -> QuadExtElement:
    """Frobenius image z^p = x - y sqrt(eps)."""
    return QuadExtElement(z.x, -z.y, z.p)


def ext_inv(z: QuadExtElement, field: PrimeField) -> QuadExtElement:
    n = norm(z, field)
    if n == 0:
        raise ZeroElementError("zero element has no inverse")
    n_inv = pow(n, -1, field.p)
    return QuadExtElement(z.x * n_inv, -z.y * n_inv, field.p)


def ext_pow(z: QuadExtElement, k: int, field: PrimeField) -> QuadExtElement:
    if k < 0:
        z, k = ext_inv(z, field), -k
    result = ext_one(field)
    base = z
    while k:
        if k & 1:
            result = ext_mul(result, base, field)
        base = ext_mul(base, base, field)
        k >>= 1
    return result


def in_norm_one_subgroup(z: QuadExtElement, field: PrimeField) -> bool:
    return norm(z, field) == 1


def mult_order(z: Scalar, field: PrimeField) -> int:
    """Least k >= 1 with z^k = 1, for a residue or an extension element."""
    if isinstance(z, QuadExtElement):
        _same_field(z, field)
        if z.is_zero():
            raise ZeroElementError("order of zero is undefined")
        group_order = field.p * field.p - 1
        order = group_order
        one = ext_one(field)
        for q in factorint(group_order):
            while order % q == 0 and ext_pow(z, order // q, field) == one:
                order //= q
        return order
    z = int(z) % field.p
    if z == 0:
        raise ZeroElementError("order of zero is undefined")
    return int(n_order(z, field.p))


@lru_cache(maxsize=None)
def norm_one_generator(p: int) -> QuadExtElement:
    """Canonical generator of C = {z : z^(p+1) = 1}: lexicographically smallest of order p+1."""
    field = prime_field(p)
    for x in range(p):
        for y in range(1, p):
            z = QuadExtElement(x, y, p)
            if in_norm_one_subgroup(z, field) and mult_order(z, field) == p + 1:
                return z
    raise InvalidModulusError(f"no generator of C found for p={p}")  # pragma: no cover


@lru_cache(maxsize=None)
def _norm_one_log_table(p: int) -> Dict[tuple, int]:
    field = prime_field(p)
    gamma = norm_one_generator(p)
    table: Dict[tuple, int] = {}
    z = ext_one(field)
    for j in range(p + 1):
        table[z.key] = j
        z = ext_mul(z, gamma, field)
    return table


def discrete_log(z: Scalar, field: PrimeField) -> int:
    """Log base the primitive root (residues) or base the C generator (norm-one elements)."""
    if isinstance(z, QuadExtElement):
        _same_field(z, field)
        if not in_norm_one_subgroup(z, field):
            raise FieldMismatchError(f"{z} is not in the norm-one subgroup")
        return _norm_one_log_table(field.p)[z.key]
    z = int(z) % field.p
    if z == 0:
        raise ZeroElementError("log of zero is undefined")
    return int(_sympy_discrete_log(field.p, z, field.primitive_root))
