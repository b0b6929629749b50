import pytest
from hypothesis import given, strategies as st

from mgw import AffineWeylGroup, CharacterRing, CharElt, KLTable, PeriodicSystem, build_root_datum
from mgw.characters import Window, check_prime, lusztig_sum, verify_star
from oracles import baby_verma_brute, kostant_count, kostant_multiplicities, weyl_dimension


def ring(label):
    return CharacterRing(AffineWeylGroup.of_type(label))


def test_a1_weyl_character():
    assert ring("A1").weyl_character((2,)).terms == {(2,): 1, (0,): 1, (-2,): 1}


def test_a2_adjoint_dimension():
    assert ring("A2").weyl_character((1, 1)).dimension() == 8


@pytest.mark.parametrize("label,weight", [
    ("A2", (2, 1)), ("B2", (1, 1)), ("B2", (0, 3)), ("G2", (1, 1)), ("C3", (0, 1, 1)), ("A3", (1, 0, 2)),
])
def test_weyl_character_matches_kostant_formula(label, weight):
    d = build_root_datum(label)
    want = kostant_multiplicities(d.cartan, d.positive_roots_simple, weight)
    assert ring(label).weyl_character(weight).terms == want


@given(st.sampled_from(["A2", "B2", "G2"]), st.integers(0, 4), st.integers(0, 4))
def test_weyl_dimension_formula(label, a, b):
    d = build_root_datum(label)
    ch = ring(label).weyl_character((a, b))
    assert ch.dimension() == weyl_dimension(d.cartan, d.positive_coroots, (a, b))
    assert ch.coeff((a, b)) == 1


def test_weyl_character_rejects_non_dominant():
    with pytest.raises(ValueError):
        ring("A2").weyl_character((-1, 0))


def test_divide_exact_detects_remainder():
    R = ring("A1")
    with pytest.raises(ArithmeticError):
        R.divide_exact(CharElt({(1,): 1}), R.alternant((1,)))


@pytest.mark.parametrize("label", ["A2", "B2", "G2"])
def test_partition_counts_match_oracle(label):
    R = ring(label)
    d = R.datum
    for kappa, c in R.partition_counts(6).items():
        assert c == kostant_count(kappa, d.positive_roots_simple)


@pytest.mark.parametrize("label,weight,budget", [("A1", (0,), 2), ("A1", (2,), 6), ("A2", (1, 1), 6), ("B2", (1, 0), 5)])
def test_kostant_expansion_agrees_with_weyl(label, weight, budget):
    R = ring(label)
    k = R.kostant_expansion(weight, budget)
    w = R.truncate(R.weyl_character(weight), Window(tuple(weight), budget))
    for lam in R.window_weights(k.window):
        assert k.coeff(lam) == w.coeff(lam)


def test_kostant_expansion_zero_collapses():
    k = ring("A1").kostant_expansion((0,), 2)
    assert k.char.terms == {(0,): 1}


def test_baby_verma_examples():
    assert ring("A1").baby_verma_character((0,), 3).terms == {(0,): 1, (-2,): 1, (-4,): 1}
    assert ring("A2").baby_verma_character((0, 0), 3).dimension() == 27


@pytest.mark.parametrize("label,weight,p", [("A2", (1, 2), 3), ("B2", (0, 1), 5), ("G2", (1, 0), 7)])
def test_baby_verma_matches_brute_force(label, weight, p):
    d = build_root_datum(label)
    assert ring(label).baby_verma_character(weight, p).terms == baby_verma_brute(d.cartan, d.positive_roots, weight, p)


@pytest.mark.parametrize("label,p", [("A1", 3), ("A1", 5), ("A2", 3), ("A2", 5), ("B2", 5)])
def test_lusztig_sum_at_identity_is_trivial(label, p):
    G = AffineWeylGroup.of_type(label)
    P = PeriodicSystem(KLTable.of_type(label))
    R = CharacterRing(G)
    assert lusztig_sum(P, R, G.identity, p).terms == {(0,) * G.rank: 1}


def test_check_prime():
    G = AffineWeylGroup.of_type("A2")
    check_prime(G, 3)
    with pytest.raises(ValueError, match="not prime"):
        check_prime(G, 4)
    with pytest.raises(ValueError, match="Coxeter"):
        check_prime(G, 2)


@pytest.mark.parametrize("label,w,p,budget", [
    ("A1", "e", 3, 10), ("A1", "e", 5, 12), ("A2", "e", 3, 4), ("A2", "s0", 3, 4), ("B2", "e", 5, 3),
])
def test_star_identity(label, w, p, budget):
    G = AffineWeylGroup.of_type(label)
    P = PeriodicSystem(KLTable.of_type(label))
    rep = verify_star(P, CharacterRing(G), G.parse(w), p, budget)
    assert rep.passed, rep.mismatches
    assert rep.checked > budget


def test_star_rejects_unrestricted_w():
    G = AffineWeylGroup.of_type("A1")
    with pytest.raises(ValueError):
        verify_star(PeriodicSystem(KLTable.of_type("A1")), CharacterRing(G), G.parse("s1"), 3, 4)


@given(st.dictionaries(st.tuples(st.integers(-3, 3)), st.integers(-3, 3), max_size=4),
       st.dictionaries(st.tuples(st.integers(-3, 3)), st.integers(-3, 3), max_size=4))
def test_char_ring_multiplication(a, b):
    x, y = CharElt(a), CharElt(b)
    assert (x * y).dimension() == x.dimension() * y.dimension()
    assert x * y == y * x
