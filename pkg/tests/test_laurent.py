from pseudolinks.laurent import A, A_INV, DELTA, Laurent, MINUS_A3, MINUS_A_INV3, zvar


def test_basic_arithmetic():
    x = Laurent.var("A")
    assert x * x == Laurent.var("A", 2)
    assert x + x == Laurent.term(2, (("A", 1),))
    assert x - x == Laurent.zero()
    assert not (x - x)
    assert (x + Laurent.const(1)) * (x - Laurent.const(1)) == Laurent.var("A", 2) - Laurent.const(1)


def test_negative_exponents():
    assert A * A_INV == Laurent.const(1)
    assert A_INV ** 3 == Laurent.var("A", -3)


def test_delta():
    assert DELTA == -(A ** 2) - A_INV ** 2
    assert DELTA.text() == "-1*A^-2 - 1*A^2"
    assert MINUS_A3 * MINUS_A_INV3 == Laurent.const(1)


def test_power_of_sum():
    d2 = DELTA ** 2
    # (-A^2 - A^-2)^2 = A^4 + 2 + A^-4
    assert d2 == Laurent.var("A", 4) + Laurent.const(2) + Laurent.var("A", -4)


def test_multivariate():
    z = Laurent.var(zvar(2))
    t = Laurent.var(zvar(0, 1), 3)
    p = z * t + z
    assert p.coeff((("z", 1), ("z[0,1]", 3))) == 1
    assert p.coeff((("z", 1),)) == 1
    assert sorted(p.variables()) == ["z", "z[0,1]"]


def test_text_ordering():
    t = Laurent.var("t")
    p = t + t ** 3 - t ** 4
    assert p.text() == "1*t^1 + 1*t^3 - 1*t^4"
    q = Laurent.const(3) - Laurent.var("t", -2)
    assert q.text() == "-1*t^-2 + 3"
    assert Laurent.zero().text() == "0"


def test_invert_var():
    t = Laurent.var("t")
    p = t + t ** 3 - t ** 4
    assert p.invert_var("t") == Laurent.var("t", -1) + Laurent.var("t", -3) - Laurent.var("t", -4)


def test_map_var_exponent():
    # A^-4 -> t, so A^-12 -> t^3
    p = Laurent.var("A", -12) + Laurent.var("A", 4)
    q = p.map_var_exponent("A", "t", -4)
    assert q == Laurent.var("t", 3) + Laurent.var("t", -1)


def test_map_var_exponent_divisibility():
    import pytest

    with pytest.raises(ValueError):
        Laurent.var("A", 3).map_var_exponent("A", "t", -4)


def test_exponents_of():
    p = Laurent.var("A", -2) + Laurent.var("A", 6) + Laurent.const(5)
    assert p.exponents_of("A") == (-2, 0, 6)
