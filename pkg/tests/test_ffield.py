import random

import pytest

from src.errors import FieldMismatchError, InvalidModulusError, ZeroElementError
from src.ffield import (
    QuadExtElement,
    check_odd_prime,
    conjugate,
    discrete_log,
    ext_inv,
    ext_mul,
    ext_one,
    ext_pow,
    in_norm_one_subgroup,
    legendre,
    mult_order,
    norm,
    norm_one_generator,
    prime_field,
    smallest_nonresidue,
    sqrt_mod,
)


@pytest.mark.parametrize("p, eps", [(7, 3), (11, 2), (19, 2), (23, 5)])
def test_smallest_nonresidue(p, eps):
    assert smallest_nonresidue(p) == eps
    assert prime_field(p).epsilon == eps


def test_check_odd_prime_rejects_composites_and_two():
    with pytest.raises(InvalidModulusError, match="not prime"):
        check_odd_prime(8)
    with pytest.raises(InvalidModulusError, match="even"):
        check_odd_prime(2)
    assert check_odd_prime(23) == 23


def test_primitive_root_is_smallest():
    assert prime_field(7).primitive_root == 3
    assert prime_field(23).primitive_root == 5


def test_legendre_and_sqrt():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    r = sqrt_mod(2, 7)
    assert r * r % 7 == 2
    assert sqrt_mod(3, 7) is None


def test_norm_is_multiplicative():
    """Тест: N(ab) = N(a) N(b) на всех парах для p=7."""
    f = prime_field(7)
    elems = [QuadExtElement(x, y, 7) for x in range(7) for y in range(7)]
    for a in elems[::5]:
        for b in elems[::3]:
            assert norm(ext_mul(a, b, f), f) == norm(a, f) * norm(b, f) % 7


def test_conjugate_is_frobenius():
    f = prime_field(11)
    z = QuadExtElement(3, 4, 11)
    assert ext_pow(z, 11, f) == conjugate(z)


def test_inverse_and_negative_powers():
    f = prime_field(19)
    z = QuadExtElement(5, 7, 19)
    assert ext_mul(z, ext_inv(z, f), f) == ext_one(f)
    assert ext_mul(ext_pow(z, -3, f), ext_pow(z, 3, f), f) == ext_one(f)
    with pytest.raises(ZeroElementError):
        ext_inv(QuadExtElement(0, 0, 19), f)


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        ext_mul(QuadExtElement(1, 1, 7), QuadExtElement(1, 1, 11), prime_field(7))


@pytest.mark.parametrize("p", [7, 11, 23])
def test_norm_one_generator(p):
    f = prime_field(p)
    gamma = norm_one_generator(p)
    assert norm(gamma, f) == 1
    assert mult_order(gamma, f) == p + 1
    assert discrete_log(ext_pow(gamma, 5, f), f) == 5


def test_mult_order_and_log_on_residues():
    f = prime_field(23)
    assert mult_order(1, f) == 1
    assert mult_order(22, f) == 2
    assert pow(f.primitive_root, discrete_log(17, f), 23) == 17
    with pytest.raises(ZeroElementError):
        mult_order(0, f)


def test_is_square():
    f = prime_field(7)
    assert [a for a in range(7) if f.is_square(a)] == [1, 2, 4]


def test_conjugate_pair_product_p7():
    f = prime_field(7)
    z = QuadExtElement(1, 1, 7)
    assert ext_mul(z, conjugate(z), f) == QuadExtElement(5, 0, 7)
    assert norm(z, f) == 5


@pytest.mark.parametrize("p", [7, 11, 23])
def test_extension_multiplication_laws(p):
    """Тест: умножение в F_p(sqrt(eps)) ассоциативно и коммутативно."""
    f = prime_field(p)
    rng = random.Random(p)

    def rand():
        return QuadExtElement(rng.randrange(p), rng.randrange(p), p)

    for _ in range(200):
        a, b, c = rand(), rand(), rand()
        assert ext_mul(a, b, f) == ext_mul(b, a, f)
        assert ext_mul(ext_mul(a, b, f), c, f) == ext_mul(a, ext_mul(b, c, f), f)


@pytest.mark.parametrize("p", [7, 11])
def test_norm_one_subgroup_by_order(p):
    """Тест: z в C <=> порядок z делит p+1 <=> N(z) = 1; порядок делит p^2-1."""
    f = prime_field(p)
    for x in range(p):
        for y in range(p):
            if x == y == 0:
                continue
            z = QuadExtElement(x, y, p)
            order = mult_order(z, f)
            assert (p * p - 1) % order == 0
            assert in_norm_one_subgroup(z, f) == ((p + 1) % order == 0) == (norm(z, f) == 1)
