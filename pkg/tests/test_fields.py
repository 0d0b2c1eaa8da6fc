import pytest

from expander_cs import GF, find_irreducible, poly_eval, poly_mod_pow
from expander_cs.errors import CapacityError
from expander_cs.fields import poly_from_indices, poly_is_irreducible
from expander_cs.rng import Stream


def test_prime_field_mul_inv():
    gf = GF(7)
    assert gf.mul((3,), (5,)) == (1,)   # 15 mod 7
    assert gf.inv((3,)) == (5,)         # 3 * 5 = 1 mod 7


def test_extension_field_square():
    gf = GF(3, 2)
    assert gf.modulus == (1, 0, 1)      # x^2 + 1
    x = (0, 1)
    assert gf.mul(x, x) == (2, 0)       # x^2 = -1 = 2 mod (x^2 + 1)


def test_inverse_of_zero_raises():
    gf = GF(5)
    with pytest.raises(ValueError):
        gf.inv(gf.zero)


@pytest.mark.parametrize("r,k", [(2, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (2, 9)])
def test_inverse_and_frobenius_exhaustive(r, k):
    gf = GF(r, k)
    for a in gf.elements():
        assert gf.pow(a, gf.q) == a
        if a != gf.zero:
            assert gf.mul(a, gf.inv(a)) == gf.one


def test_add_mul_commute_small():
    gf = GF(2, 3)
    els = list(gf.elements())
    for a in els:
        for b in els:
            assert gf.add(a, b) == gf.add(b, a)
            assert gf.mul(a, b) == gf.mul(b, a)


def test_element_index_roundtrip():
    gf = GF(3, 2)
    for i in range(gf.q):
        assert gf.index(gf.element(i)) == i


def test_find_irreducible_known_values():
    assert GF(3, 2).modulus == (1, 0, 1)        # x^2 + 1
    assert GF(2, 2).modulus == (1, 1, 1)        # the unique quadratic
    assert GF(2, 1).modulus == (0, 1)           # x, placeholder for k=1
    gf2 = GF(2)
    assert find_irreducible(gf2, 1) == ((0,), (1,))


def test_find_irreducible_has_no_roots():
    for r, k in [(2, 2), (2, 3), (3, 2), (5, 2), (2, 5)]:
        gf = GF(r)
        f = find_irreducible(gf, k)
        assert len(f) == k + 1 and f[-1] == gf.one
        for i in range(r):
            assert poly_eval(gf, f, gf.element(i)) != gf.zero


def test_find_irreducible_over_extension_field():
    gf9 = GF(3, 2)
    f = find_irreducible(gf9, 2)
    assert len(f) == 3 and f[-1] == gf9.one
    assert poly_is_irreducible(gf9, f)
    for a in gf9.elements():
        assert poly_eval(gf9, f, a) != gf9.zero


def test_find_irreducible_capacity():
    with pytest.raises(CapacityError):
        find_irreducible(GF(2, 8), 10, limit=1000)


def test_field_order_capacity():
    with pytest.raises(CapacityError):
        GF(2, 10)


def test_poly_eval_examples():
    gf = GF(3)
    f = poly_from_indices(gf, [1, 1])            # x + 1
    assert poly_eval(gf, f, (2,)) == gf.zero     # 2 + 1 = 0 mod 3
    const = poly_from_indices(gf, [2])
    for a in gf.elements():
        assert poly_eval(gf, const, a) == (2,)
        assert poly_eval(gf, (), a) == gf.zero   # zero polynomial


def test_poly_mod_pow_examples():
    gf = GF(3)
    x = poly_from_indices(gf, [0, 1])
    modulus = poly_from_indices(gf, [1, 0, 1])   # x^2 + 1
    assert poly_mod_pow(gf, x, 2, modulus) == ((2,),)
    f = poly_from_indices(gf, [2, 1])
    assert poly_mod_pow(gf, f, 1, modulus) == f  # identity exponent
    one = (gf.one,)
    assert poly_mod_pow(gf, one, 12345, modulus) == one


def test_poly_mod_pow_rejects_bad_modulus():
    gf = GF(3)
    x = poly_from_indices(gf, [0, 1])
    with pytest.raises(ValueError):
        poly_mod_pow(gf, x, 2, poly_from_indices(gf, [2]))       # constant
    with pytest.raises(ValueError):
        poly_mod_pow(gf, x, 2, poly_from_indices(gf, [1, 2]))    # non-monic


def test_poly_mod_pow_exponent_composition():
    gf = GF(5)
    modulus = find_irreducible(gf, 3)
    rng = Stream(9)
    for _ in range(25):
        f = poly_from_indices(gf, [rng.below(5) for _ in range(3)])
        e1, e2 = 1 + rng.below(20), 1 + rng.below(20)
        once = poly_mod_pow(gf, f, e1 * e2, modulus)
        twice = poly_mod_pow(gf, poly_mod_pow(gf, f, e1, modulus), e2, modulus)
        assert once == twice


def test_modulus_validation():
    with pytest.raises(ValueError):
        GF(4)                              # not prime
    with pytest.raises(ValueError):
        GF(2, 2, modulus=(1, 0, 1))        # x^2 + 1 = (x+1)^2 over GF(2)
    gf = GF(2, 2, modulus=(1, 1, 1))       # explicit valid modulus accepted
    assert gf.q == 4
