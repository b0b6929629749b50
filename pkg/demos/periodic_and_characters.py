"""Generic and periodic polynomials on a window of alcoves, and the
character identity between Weyl characters and baby Verma characters.

    python3 demos/periodic_and_characters.py [A1|A2]
"""
import sys

from mgw import AffineWeylGroup, CharacterRing, KLTable, PeriodicSystem
from mgw.characters import star_sides

label = sys.argv[1] if len(sys.argv) > 1 else "A2"
G = AffineWeylGroup.of_type(label)
P = PeriodicSystem(KLTable.of_type(label))
boxes = G.box_sets()
print(f"type {label}: restricted dominant alcoves {[G.render(w) for w in boxes.res_plus]}")

ref = G.identity
win = P.window(ref, 2)
print(f"\nwindow of radius 2 around A+: {len(win)} alcoves")
print(f"  {'A':<14}{'q_(A+,A)':<14}p_(A,A+)")
for a in win:
    print(f"  {G.render(a):<14}{str(P.generic_poly(ref, a)):<14}{P.periodic_poly(a, ref)}")

for rep in (P.verify_inversion(win), P.verify_kato(ref, 1)):
    print(rep.line())

p = 5 if G.h > 3 else 3
R = CharacterRing(G)
lhs, rhs, used = star_sides(P, R, G.identity, p, 4)
print(f"\ncharacter identity at w = e, p = {p}, {len(used)} baby Verma modules contribute:")
for lam in R.window_weights(lhs.window):
    if not (lhs.coeff(lam) or rhs.coeff(lam)):
        continue
    print(f"  {str(lam):<12} weyl side {lhs.coeff(lam):>3}   baby Verma side {rhs.coeff(lam):>3}")
