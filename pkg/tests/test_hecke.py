import pytest
from hypothesis import given, strategies as st

from mgw import AffineWeylGroup, HeckeAlgebra, HeckeElt, KLTable, LaurentPoly
from mgw.cache import Cache
from mgw.hecke import check_kl_element
from mgw.laurent import ONE, V, V_INV, ZERO
from oracles import AffinePerm, KLOracle


def as_dict(G, elt):
    return {G.render(x): str(c) for x, c in elt.coeffs.items()}


def test_quadratic_relation(A1):
    H = HeckeAlgebra(A1)
    s = A1.parse("s1")
    sq = H.multiply(H.basis(s), H.basis(s))
    assert sq.coeff(A1.identity) == ONE
    assert sq.coeff(s) == V_INV - V


def test_bar_of_simple(A1):
    H = HeckeAlgebra(A1)
    s = A1.parse("s0")
    b = H.bar(H.basis(s))
    assert b.coeff(s) == ONE and b.coeff(A1.identity) == V - V_INV


def test_braid_relation(A2):
    H = HeckeAlgebra(A2)
    for a, b in ((0, 1), (1, 2), (0, 2)):
        lhs = H.one()
        rhs = H.one()
        for i in (a, b, a):
            lhs = H.mul_simple_right(lhs, i)
        for i in (b, a, b):
            rhs = H.mul_simple_right(rhs, i)
        assert lhs == rhs == H.basis(A2.from_word((a, b, a)))


def test_left_and_right_simple_products_commute(A2):
    H = HeckeAlgebra(A2)
    x = H.basis(A2.parse("s0 s1 s2"), V + 2)
    assert H.mul_simple_left(1, H.mul_simple_right(x, 0)) == H.mul_simple_right(H.mul_simple_left(1, x), 0)


hecke_terms = st.lists(
    st.tuples(st.lists(st.integers(0, 2), max_size=4), st.integers(-2, 2), st.integers(-3, 3)),
    max_size=3,
)


def _elt(G, terms):
    out = HeckeElt()
    for word, e, c in terms:
        out = out + HeckeElt({G.from_word(word): LaurentPoly({e: c})})
    return out


@given(hecke_terms, hecke_terms)
def test_bar_is_an_involutive_ring_map(t1, t2):
    G = AffineWeylGroup.of_type("A2")
    H = HeckeAlgebra(G)
    a, b = _elt(G, t1), _elt(G, t2)
    assert H.bar(H.bar(a)) == a
    assert H.bar(H.multiply(a, b)) == H.multiply(H.bar(a), H.bar(b))


def test_kl_small_values(A1, kl_A1):
    s = A1.parse("s1")
    assert kl_A1.element(A1.identity) == HeckeElt({A1.identity: ONE})
    assert kl_A1.element(s) == HeckeElt({s: ONE, A1.identity: V})
    w = A1.parse("s0 s1 s0")
    col = kl_A1.column(w)
    assert {A1.render(x): c for x, c in col.items()} == {
        A1.render(x): V ** (3 - A1.length(x)) for x in A1.lower_interval(w)
    }
    assert kl_A1.h(A1.parse("s0 s1"), A1.parse("s1 s0")) == ZERO


@pytest.mark.parametrize("label,n,L", [("A1", 2, 10), ("A2", 3, 6)])
def test_kl_matches_pairwise_recursion(label, n, L):
    G = AffineWeylGroup.of_type(label)
    kl = KLTable.of_type(label)
    W = AffinePerm(n)
    oracle = KLOracle(W)
    elts = G.elements_up_to_length(L)
    perm = {x: W.from_word(G.reduced_word(x)) for x in elts}
    for w in elts:
        for x in elts:
            if G.length(x) <= G.length(w):
                assert kl.h(x, w).terms == oracle.h(perm[x], perm[w]), (G.render(x), G.render(w))


def test_a2_nontrivial_polynomial_present(A2, kl_A2):
    kl_A2.build_up_to(6)
    nonmono = [(x, w) for w, x, h in kl_A2.entries() if not h.is_monomial()]
    assert nonmono
    x, w = min(nonmono, key=lambda p: (A2.length(p[1]), A2.sort_key(p[1]), A2.sort_key(p[0])))
    # the first non-monomial entry appears at length 4, P_{e,w} = 1 + q
    assert A2.length(w) == 4 and x == A2.identity
    assert kl_A2.h(x, w) == V ** 4 + V ** 2


@pytest.mark.parametrize("label,L", [("A1", 8), ("A2", 5), ("B2", 5), ("G2", 5)])
def test_kl_elements_self_consistent(label, L):
    kl = KLTable.of_type(label)
    for w in kl.build_up_to(L):
        assert check_kl_element(kl, w) == []


def test_parallel_build_agrees():
    a, b = KLTable.of_type("A2"), KLTable.of_type("A2")
    a.build_up_to(5)
    b.build_up_to(5, workers=3)
    assert list(a.entries()) == list(b.entries())


def test_cached_table_roundtrip(tmp_path):
    cache = Cache(tmp_path / "c")
    a = KLTable.of_type("A2", cache)
    a.build_up_to(4)
    a.save()
    b = KLTable.of_type("A2", cache)
    assert list(a.entries()) == list(b.entries())
    c = KLTable.of_type("A2")
    c.build_up_to(4)
    assert list(c.entries()) == list(b.entries())
