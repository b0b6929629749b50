"""Stalks of intersection sheaves on the affine moment graph of type A~2,
compared with Kazhdan-Lusztig polynomials, in characteristic 0 and 3.

    python3 demos/sheaves_vs_kl.py
"""
from mgw import AffineWeylGroup, KLTable, build_bm_sheaf, parse_field
from mgw.bmsheaf import GKMError
from mgw.momentgraph import build_affine_graph, gkm_check

G = AffineWeylGroup.of_type("A2")
kl = KLTable.of_type("A2")

# the shortest elements with a non-monomial KL polynomial
kl.build_up_to(5)
singular = sorted({w for w, x, h in kl.entries() if not h.is_monomial()}, key=G.sort_key)
print(f"{len(singular)} elements of length <= 5 have a non-monomial h_(x,w)")

w = singular[0]
print(f"\nw = {G.render(w)}")
for spec in ("Q", "Fp:3"):
    sheaf = build_bm_sheaf(G, w, parse_field(spec))
    print(f"  over {spec} ({sheaf.timings['total_seconds']}s, degree bound {sheaf.degree_bound})")
    for x in sheaf.graph.vertices:
        h = kl.h(x, w)
        rank = sheaf.graded_rank(x)
        mark = "" if rank == h.shift(G.length(x) - G.length(w)) else "  <-- differs"
        print(f"    x = {G.render(x):<12} h = {str(h):<12} rk = {rank}{mark}")

# in characteristic 2 the moment graph stops being GKM already in A~1
A1 = AffineWeylGroup.of_type("A1")
top = A1.parse("s0 s1 s0")
rep = gkm_check(build_affine_graph(A1, top, parse_field("Fp:2")))
print(f"\nA~1, [e, {A1.render(top)}] over F2: GKM {'holds' if rep.passed else 'fails'}")
for m in rep.mismatches:
    print(f"  at {m['vertex']}: labels {m['labels'][0]} and {m['labels'][1]} are proportional")
try:
    build_bm_sheaf(A1, top, parse_field("Fp:2"))
except GKMError as exc:
    print(f"  sheaf construction refused: {exc}")
