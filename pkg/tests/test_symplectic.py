import random

import pytest

from qshift.gf2poly import LaurentPoly, ONE, ZERO, ParseError, parse_poly as pp
from qshift.symplectic import (
    Gate,
    StabilizerMatrix,
    SympMatrix,
    dual_containing,
    gate_matrix,
    lam,
    parse_gate,
    row_space_equiv,
)


def cnot(i, j, f, n):
    return gate_matrix(Gate("CNOT", (i, j), pp(f)), n)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1), ONE)
    with pytest.raises(ValueError):
        Gate("CPHASE1", (1,), pp("1+D"))  # constant term is a P gate
    with pytest.raises(ValueError):
        Gate("INF_Z", (1,), pp("D+D^2"))  # delay must be 0
    with pytest.raises(ValueError):
        Gate("INF_X", (1,), ONE)  # degree must be >= 1
    with pytest.raises(ValueError):
        Gate("H", (1,), ONE)
    with pytest.raises(ValueError):
        Gate("DELAY", (1,), pp("1+D"))


def test_gate_text_round_trip():
    for line in ("CNOT 3 2 D^-1+1", "CPHASE 1 3 D^-1+1+D", "CPHASE1 1 D",
                 "H 1", "P 2", "DELAY 1 2", "INFZ 2 1+D", "INFX 1 1+D^3"):
        assert str(parse_gate(line)) == line
    # non-canonical spelling parses to the same gate
    assert parse_gate("CNOT 3 2 1+D^-1") == parse_gate("CNOT 3 2 D^-1+1")
    with pytest.raises(ParseError):
        parse_gate("NOPE 1 2")
    with pytest.raises(ParseError):
        parse_gate("CNOT 1 2")


def test_cnot_matrix_unit_delay_combo():
    # two-wire combo with f0 = f1 = 1: f(D) in the X block, f(D^-1) in Z
    m = cnot(1, 2, "1+D", 2)
    assert m.entry(2, 3) == pp("1+D")       # x_1 -> x_2
    assert m.entry(1, 0) == pp("1+D^-1")    # z_2 -> z_1
    assert m.entry(0, 0) == ONE and m.entry(3, 3) == ONE
    assert m.entry(0, 2) == ZERO


def test_cnot_zero_poly_is_identity():
    assert cnot(1, 2, "0", 3) == SympMatrix.identity(3)


def test_overall_encoding_matrix_example():
    # explicit 6x6 composition of three CNOT blocks
    m = cnot(3, 2, "1+D^-1", 3) @ cnot(1, 2, "D", 3) @ cnot(1, 3, "1+D", 3)
    z = [["1", "0", "0"], ["D", "1", "1+D"], ["1+D^-1", "0", "1"]]
    x = [["1", "D", "1+D"], ["0", "1", "0"], ["0", "1+D^-1", "1"]]
    expected = SympMatrix.block_diag_zx(
        [[pp(e) for e in row] for row in z],
        [[pp(e) for e in row] for row in x])
    assert m == expected
    assert m.abs_deg() == 1


def test_mat_mul_combines_same_pair_cnots():
    a = cnot(1, 2, "1+D", 2)
    b = cnot(1, 2, "D^2", 2)
    assert a @ b == cnot(1, 2, "1+D+D^2", 2)
    assert a @ SympMatrix.identity(2) == a


def test_mat_mul_associative():
    a = cnot(1, 2, "1+D", 3)
    b = gate_matrix(Gate("CPHASE", (2, 3), pp("D^-1+D")), 3)
    c = gate_matrix(Gate("H", (1,)), 3)
    assert (a @ b) @ c == a @ (b @ c)


def test_mat_mul_mutual_pair():
    l0, l1 = 1, 3
    m = cnot(1, 2, f"D^{l0}", 2) @ cnot(2, 1, f"D^{l1}", 2)
    assert m.entry(2, 2) == ONE + LaurentPoly.monomial(l0 + l1)
    assert m.entry(2, 3) == LaurentPoly.monomial(l0)
    assert m.entry(3, 2) == LaurentPoly.monomial(l1)
    assert m.entry(0, 1) == LaurentPoly.monomial(-l1)
    assert m.entry(1, 0) == LaurentPoly.monomial(-l0)
    assert m.entry(1, 1) == ONE + LaurentPoly.monomial(-(l0 + l1))


def test_mat_mul_chain_pair():
    l0, l1 = 2, 3
    m = cnot(1, 2, f"D^{l0}", 3) @ cnot(3, 1, f"D^{l1}", 3)
    assert m.entry(0, 2) == LaurentPoly.monomial(-l1)
    assert m.entry(1, 0) == LaurentPoly.monomial(-l0)
    assert m.entry(1, 2) == LaurentPoly.monomial(-(l0 + l1))
    assert m.entry(3, 4) == LaurentPoly.monomial(l0)
    assert m.entry(5, 3) == LaurentPoly.monomial(l1)
    assert m.is_symplectic()


def test_abs_deg_examples():
    two_delay_combo = cnot(1, 2, "1+D+D^2", 2)
    assert two_delay_combo.abs_deg() == 2
    assert SympMatrix.identity(2).abs_deg() == 0
    with pytest.raises(ValueError):
        gate_matrix(Gate("INF_Z", (1,), pp("1+D")), 1).abs_deg()


def test_latency_shift():
    m = cnot(1, 2, "1+D+D^2", 2).shifted(2)
    assert m.latency_shift() == 2
    assert m.shifted(-2).latency_shift() == 0
    # delay-style matrix: ties resolve to the smallest shift
    rows = [[pp("D"), ZERO, ZERO, ZERO], [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, pp("D"), ZERO], [ZERO, ZERO, ZERO, ONE]]
    assert SympMatrix(2, rows).latency_shift() == 0


def test_symplectic_check_all_primitives():
    gates = [
        Gate("CNOT", (1, 2), pp("1+D^-1+D^3")),
        Gate("CPHASE", (1, 2), pp("D^-2+1+D")),
        Gate("CPHASE1", (2,), pp("D+D^3")),
        Gate("H", (1,)),
        Gate("P", (2,)),
        Gate("DELAY", (1,), pp("D^2")),
        Gate("INF_Z", (2,), pp("1+D+D^2")),
        Gate("INF_X", (1,), pp("1+D^3")),
    ]
    for g in gates:
        assert gate_matrix(g, 3).is_symplectic(), str(g)


def test_symplectic_check_negative_case():
    assert SympMatrix.identity(2).is_symplectic()
    rows = [list(r) for r in SympMatrix.identity(2).rows]
    rows[2][3] = ONE  # lone off-diagonal 1 in the X block breaks the pairing
    assert not SympMatrix(2, rows).is_symplectic()


def test_self_inverse_gates():
    for g in (Gate("CNOT", (1, 2), pp("1+D^2")),
              Gate("CPHASE", (1, 3), pp("D^-1+D")),
              Gate("CPHASE1", (1,), pp("D")),
              Gate("H", (2,)),
              Gate("P", (1,))):
        m = gate_matrix(g, 3)
        assert m @ m == SympMatrix.identity(3), str(g)


def test_random_gate_matrices_symplectic():
    rng = random.Random(301)
    for _ in range(100):
        n = rng.randint(1, 4)
        kind = rng.choice(("CNOT", "CPHASE", "CPHASE1", "H", "P", "DELAY",
                           "INF_Z", "INF_X"))
        if kind in ("CNOT", "CPHASE") and n < 2:
            continue
        if kind in ("CNOT", "CPHASE"):
            i = rng.randint(1, n)
            j = rng.randint(1, n)
            while j == i:
                j = rng.randint(1, n)
            f = LaurentPoly([rng.randint(-4, 4) for _ in range(rng.randint(1, 3))])
            if not f:
                continue
            g = Gate(kind, (i, j), f)
        elif kind == "CPHASE1":
            f = LaurentPoly([rng.randint(1, 4) for _ in range(rng.randint(1, 3))])
            if not f:
                continue
            g = Gate(kind, (rng.randint(1, n),), f)
        elif kind == "DELAY":
            g = Gate(kind, (rng.randint(1, n),),
                     LaurentPoly.monomial(rng.randint(0, 4)))
        elif kind in ("INF_Z", "INF_X"):
            f = LaurentPoly([0] + [rng.randint(1, 4) for _ in range(rng.randint(1, 2))])
            if not f or f.delay != 0 or f.deg < 1:
                continue
            g = Gate(kind, (rng.randint(1, n),), f)
        else:
            g = Gate(kind, (rng.randint(1, n),))
        assert gate_matrix(g, n).is_symplectic(), str(g)


def unencoded_3q():
    return StabilizerMatrix.from_css([[ONE, ZERO, ZERO]],
                                     [[ZERO, ONE, ZERO]])


def test_apply_to_stabilizer_first_cnots():
    stab = unencoded_3q().apply(cnot(3, 2, "1+D^-1", 3))
    assert stab.rows[0] == (ZERO, ZERO, ZERO, ONE, ZERO, ZERO)
    assert stab.rows[1] == (ZERO, ONE, pp("1+D"), ZERO, ZERO, ZERO)


def test_apply_to_stabilizer_second_cnots():
    stab = unencoded_3q().apply(cnot(3, 2, "1+D^-1", 3))
    stab = stab.apply(cnot(1, 2, "D", 3) @ cnot(1, 3, "1+D", 3))
    assert stab.rows[0] == (ZERO, ZERO, ZERO, ONE, pp("D"), pp("1+D"))
    assert stab.rows[1] == (pp("D"), ONE, pp("1+D"), ZERO, ZERO, ZERO)


def test_apply_identity():
    stab = unencoded_3q()
    assert stab.apply(SympMatrix.identity(3)).rows == stab.rows


def test_apply_preserves_commutation():
    rng = random.Random(17)
    stab = unencoded_3q()
    assert stab.commutation_ok()
    for _ in range(30):
        i = rng.randint(1, 3)
        j = rng.randint(1, 3)
        while j == i:
            j = rng.randint(1, 3)
        f = LaurentPoly([rng.randint(-2, 2) for _ in range(rng.randint(1, 2))])
        if not f:
            continue
        kind = rng.choice(("CNOT", "CPHASE"))
        stab = stab.apply(gate_matrix(Gate(kind, (i, j), f), 3))
        assert stab.commutation_ok()


def encoded_3q():
    return StabilizerMatrix.from_css([[ONE, pp("D"), pp("1+D")]],
                                     [[pp("D"), ONE, pp("1+D")]])


def test_row_space_equiv_swap_and_mix():
    stab = encoded_3q()
    swapped = StabilizerMatrix(3, [stab.rows[1], stab.rows[0]])
    assert row_space_equiv(stab, swapped)
    # row 2 plus a delayed copy of row 1 generates the same group
    mixed_row = tuple(b + pp("D") * a for a, b in zip(stab.rows[0], stab.rows[1]))
    mixed = StabilizerMatrix(3, [stab.rows[0], mixed_row])
    assert row_space_equiv(stab, mixed)
    # shifting a generator in time is a unit premultiplication
    shifted = StabilizerMatrix(3, [stab.rows[0],
                                   tuple(pp("D^2") * e for e in stab.rows[1])])
    assert row_space_equiv(stab, shifted)


def test_row_space_equiv_negative():
    assert not row_space_equiv(encoded_3q(), unencoded_3q())
    # scaling a row by 1+D is not a unit operation: the group shrinks
    stab = encoded_3q()
    scaled = StabilizerMatrix(3, [stab.rows[0],
                                  tuple(pp("1+D") * e for e in stab.rows[1])])
    assert not row_space_equiv(stab, scaled)


def test_dual_containing():
    assert dual_containing([[ONE, pp("D"), pp("1+D")]],
                           [[pp("D"), ONE, pp("1+D")]])
    assert not dual_containing([[ONE]], [[ONE]])
    assert dual_containing([[ONE, ZERO]], [[ZERO, ONE]])


def test_stabilizer_text_round_trip():
    text = "n 3\ncss\nX: 1 D 1+D\nZ: D 1 1+D\n"
    stab = StabilizerMatrix.from_text(text)
    assert stab.to_text() == text
    hx, hz = stab.css_parts
    assert hx == ((ONE, pp("D"), pp("1+D")),)
    with pytest.raises(ParseError):
        StabilizerMatrix.from_text("n 3\nX: 1 D\n")
    with pytest.raises(ParseError):
        StabilizerMatrix.from_text("X: 1\n")


def test_matrix_text_round_trip():
    m = cnot(3, 2, "1+D^-1", 3) @ cnot(1, 2, "D", 3)
    again = SympMatrix.from_text(m.to_text())
    assert again == m
    inf = gate_matrix(Gate("INF_Z", (1,), pp("1+D")), 2)
    assert SympMatrix.from_text(inf.to_text()) == inf


def test_equal_mod_monomial():
    m = cnot(1, 2, "1+D", 2)
    assert m.equal_mod_monomial(m.shifted(3)) == -3
    assert m.shifted(2).equal_mod_monomial(m) == 2
    assert m.equal_mod_monomial(cnot(1, 2, "1+D^2", 2)) is None


def test_lambda_matrix():
    l = lam(2)
    assert l.entry(0, 2) == ONE and l.entry(2, 0) == ONE
    assert l.entry(0, 0) == ZERO
