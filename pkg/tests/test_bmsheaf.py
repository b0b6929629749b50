import random

import pytest

from mgw import AffineWeylGroup, KLTable, parse_field
from mgw.bmsheaf import (
    DegreePolicy,
    GKMError,
    IndeterminateStalk,
    build_bm_sheaf,
    random_linear_extension,
    verify_momconj,
    verify_multiplicity_one,
    verify_structure,
)
from mgw.laurent import ONE, V
from mgw.momentgraph import build_affine_graph


def test_top_stalk_and_a1_simple(A1):
    sh = build_bm_sheaf(A1, A1.parse("s1"), parse_field("Q"))
    assert sh.stalks[A1.parse("s1")].generator_degrees == [0]
    assert sh.graded_rank(A1.identity) == ONE
    assert sh.graded_rank(A1.parse("s0")) == 0 * ONE


def test_a1_length_three_all_rank_one(A1):
    sh = build_bm_sheaf(A1, A1.parse("s0 s1 s0"), parse_field("Q"))
    assert all(sh.graded_rank(x) == ONE for x in sh.graph.vertices)


def test_a2_first_singular_stalk(A2, kl_A2):
    w = A2.parse("s1 s0 s2 s1")
    assert kl_A2.h(A2.identity, w) == V ** 4 + V ** 2
    sh = build_bm_sheaf(A2, w, parse_field("Q"))
    assert sorted(sh.stalks[A2.identity].generator_degrees) == [0, 2]
    assert sh.graded_rank(A2.identity) == ONE + V ** -2


@pytest.mark.parametrize("label,L,spec", [
    ("A1", 6, "Q"), ("A1", 6, "Fp:5"), ("A2", 4, "Q"), ("A2", 4, "Fp:3"), ("A2", 4, "Fp:5"), ("B2", 3, "Q"),
])
def test_momconj_small(label, L, spec):
    G = AffineWeylGroup.of_type(label)
    kl = KLTable.of_type(label)
    fld = parse_field(spec)
    built = 0
    for w in G.elements_up_to_length(L):
        try:
            sh = build_bm_sheaf(G, w, fld)
        except GKMError:
            continue
        built += 1
        rep = verify_momconj(sh, kl)
        assert rep.passed, rep.mismatches
    assert built > L


@pytest.mark.parametrize("spec", ["Fp:2", "Fp:3"])
def test_multiplicity_one_small(A2, kl_A2, spec):
    fld = parse_field(spec)
    n = 0
    for w in A2.elements_up_to_length(4):
        try:
            sh = build_bm_sheaf(A2, w, fld)
        except GKMError:
            continue
        n += 1
        assert verify_multiplicity_one(sh, kl_A2).passed
    assert n > 10


def test_non_gkm_interval_refused(A1):
    with pytest.raises(GKMError):
        build_bm_sheaf(A1, A1.parse("s0 s1 s0"), parse_field("Fp:2"))


@pytest.mark.parametrize("word,spec", [("s1 s0 s2 s1", "Q"), ("s0 s1 s2 s0", "Fp:3"), ("s1 s2 s1 s0 s2", "Fp:5")])
def test_structure_rederived(A2, word, spec):
    rep = verify_structure(build_bm_sheaf(A2, A2.parse(word), parse_field(spec)))
    assert rep.passed, rep.mismatches


def test_backends_agree(A2):
    w = A2.parse("s1 s0 s2 s1 s0")
    a = build_bm_sheaf(A2, w, parse_field("Fp:3"))
    b = build_bm_sheaf(A2, w, parse_field("Fp:3", backend="py"))
    assert a.degree_multisets() == b.degree_multisets()


def test_linear_extensions_and_workers(A2):
    w = A2.parse("s0 s1 s2 s1 s0")
    fld = parse_field("Q")
    base = build_bm_sheaf(A2, w, fld).degree_multisets()
    g = build_affine_graph(A2, w, fld)
    for seed in (1, 2):
        order = random_linear_extension(A2, g, random.Random(seed))
        assert build_bm_sheaf(A2, w, fld, order=order, graph=g).degree_multisets() == base
    assert build_bm_sheaf(A2, w, fld, workers=3).degree_multisets() == base


def test_bad_order_rejected(A1):
    w = A1.parse("s0 s1")
    g = build_affine_graph(A1, w, parse_field("Q"))
    with pytest.raises(ValueError):
        build_bm_sheaf(A1, w, parse_field("Q"), order=list(g.vertices), graph=g)


def test_doubling_degree_bound_changes_nothing(A2):
    w = A2.parse("s1 s0 s2 s1 s0")
    a = build_bm_sheaf(A2, w, parse_field("Q"))
    b = build_bm_sheaf(A2, w, parse_field("Q"), DegreePolicy(2))
    assert a.degree_multisets() == b.degree_multisets()
    assert b.degree_bound == 2 * a.degree_bound


class _TinyPolicy(DegreePolicy):
    def bound(self, length_gap):
        return 2 if length_gap else 0


def test_generator_at_bound_is_flagged(A2, kl_A2):
    w = A2.parse("s1 s0 s2 s1")
    sh = build_bm_sheaf(A2, w, parse_field("Q"), _TinyPolicy())
    singular = sorted(A2.render(x) for x in sh.graph.vertices if not kl_A2.h(x, w).is_monomial())
    assert "e" in singular
    with pytest.raises(IndeterminateStalk):
        sh.graded_rank(A2.identity)
    rep = verify_momconj(sh, kl_A2)
    assert not rep.passed and not rep.mismatches
    assert sorted(rep.indeterminate) == singular


def test_degree_policy():
    assert [DegreePolicy().bound(k) for k in range(5)] == [2, 2, 4, 4, 6]
    assert DegreePolicy(2).bound(3) == 8
