"""Alcove-indexed polynomial families built from Kazhdan-Lusztig polynomials.

An alcove ``A`` is represented by the element ``w_A`` with ``A = w_A(A+)``.

* ``h_{A,B} = h_{w0 w_A, w0 w_B}``
* generic polynomials ``q_{A,B}``: the value of ``h_{t A, t B}`` for deep
  dominant translations ``t = t_{m * 2rho}``, found by increasing ``m`` until
  two consecutive translates agree
* periodic polynomials ``p_{A,C}``: the unique solution of the unitriangular
  system ``sum_B (-1)^{d(A,B)} q_{w0 B, w0 A} p_{B,C} = delta_{A,C}``.

The triangular order is ``B <=' A  iff  w0 B <= w0 A`` in the generic order,
since that is exactly when the matrix entry can be nonzero.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import floor

from .affine import AffineWeylElt, AffineWeylGroup
from .hecke import KLTable
from .laurent import ONE, ZERO, LaurentPoly
from .report import CheckReport

DEFAULT_CAP = 6


class StabilizationError(RuntimeError):
    pass


class PeriodicSystem:
    def __init__(self, kl: KLTable, cap: int = DEFAULT_CAP):
        self.kl = kl
        self.group: AffineWeylGroup = kl.group
        self.cap = cap
        G = self.group
        self.w0 = G.w0()
        self._two_rho = tuple(2 * x for x in G.datum.rho)
        self._translations: dict[int, AffineWeylElt] = {}
        self._q: dict = {}
        self._order: dict = {}
        self._below: dict = {}
        self._p: dict = {}
        self.translates: dict = {}

    # -- translations ----------------------------------------------------

    def translation(self, m: int) -> AffineWeylElt:
        t = self._translations.get(m)
        if t is None:
            t = self.group.translation(tuple(m * x for x in self._two_rho))
            self._translations[m] = t
        return t

    def translate(self, m: int, a: AffineWeylElt) -> AffineWeylElt:
        return self.group.mul(self.translation(m), a)

    def _start(self, alcoves) -> int:
        m = 1
        while not all(self.group.in_dominant_cone(self.translate(m, a)) for a in alcoves):
            m += 1
        return m

    def _stabilize(self, fn, alcoves, what: str):
        """Evaluate ``fn(m)`` from the first dominant translate until two
        consecutive values agree.  Returns ``(value, m)``."""
        m0 = self._start(alcoves)
        for cap in (self.cap, 2 * self.cap):
            prev = fn(m0)
            for m in range(m0 + 1, m0 + cap + 1):
                cur = fn(m)
                if cur == prev:
                    return cur, m - 1
                prev = cur
        raise StabilizationError(
            f"{what} did not stabilize within {2 * self.cap} translation steps"
        )

    def twist(self, a: AffineWeylElt) -> AffineWeylElt:
        """The alcove ``w0(A)``."""
        return self.group.mul(self.w0, a)

    # -- the three polynomial families -------------------------------------

    def h_alcove(self, a: AffineWeylElt, b: AffineWeylElt) -> LaurentPoly:
        return self.kl.h(self.twist(a), self.twist(b))

    def generic_poly(self, a: AffineWeylElt, b: AffineWeylElt) -> LaurentPoly:
        key = (a, b)
        hit = self._q.get(key)
        if hit is not None:
            return hit
        if a == b:
            val, m = ONE, 0
        elif not self.generic_order_leq(a, b):
            val, m = ZERO, self._order[key][1]
        else:
            G = self.group
            val, m = self._stabilize(
                lambda m: self.h_alcove(self.translate(m, a), self.translate(m, b)),
                (a, b),
                f"q for ({G.render(a)}, {G.render(b)})",
            )
        self._q[key] = val
        self.translates[key] = m
        return val

    def generic_order_leq(self, a: AffineWeylElt, b: AffineWeylElt) -> bool:
        key = (a, b)
        hit = self._order.get(key)
        if hit is None:
            G = self.group
            hit = self._stabilize(
                lambda m: G.bruhat_leq(self.translate(m, a), self.translate(m, b)),
                (a, b),
                f"order for ({G.render(a)}, {G.render(b)})",
            )
            self._order[key] = hit
        return hit[0]

    def _tri_leq(self, b, a) -> bool:
        return self.generic_order_leq(self.twist(b), self.twist(a))

    def tri_interval(self, c: AffineWeylElt, a: AffineWeylElt) -> list[AffineWeylElt]:
        """``{B : C <=' B <=' A}`` via Bruhat intervals of deep translates."""
        key = (c, a)
        hit = self._below.get(key)
        if hit is not None:
            return hit
        if not self._tri_leq(c, a):
            self._below[key] = []
            return []
        G = self.group
        tc, ta = self.twist(c), self.twist(a)

        def members(m):
            # mirror images of the interval in other chambers drift with m;
            # only the dominant-chamber part is translation invariant
            inv = G.inverse(self.translation(m))
            lo, hi = self.translate(m, tc), self.translate(m, ta)
            return frozenset(
                self.twist(G.mul(inv, z)) for z in G.interval(lo, hi) if G.in_dominant_cone(z)
            )

        found, _ = self._stabilize(members, (tc, ta), f"interval ({G.render(c)}, {G.render(a)})")
        found = [b for b in found if self._tri_leq(c, b) and self._tri_leq(b, a)]
        out = sorted(found, key=lambda b: (-G.alcove_distance(b, a), G.sort_key(b)))
        self._below[key] = out
        return out

    def inversion_entry(self, a: AffineWeylElt, b: AffineWeylElt) -> LaurentPoly:
        """``(-1)^{d(A,B)} q_{w0 B, w0 A}``."""
        q = self.generic_poly(self.twist(b), self.twist(a))
        return -q if self.group.alcove_distance(a, b) % 2 else q

    def periodic_poly(self, a: AffineWeylElt, c: AffineWeylElt) -> LaurentPoly:
        key = (a, c)
        hit = self._p.get(key)
        if hit is not None:
            return hit
        if a == c:
            val = ONE
        elif not self._tri_leq(c, a):
            val = ZERO
        else:
            val = ZERO
            for b in self.tri_interval(c, a):
                if b != a:
                    val = val - self.inversion_entry(a, b) * self.periodic_poly(b, c)
        self._p[key] = val
        return val

    # -- windows and verifiers -------------------------------------------------

    def ball(self, center: AffineWeylElt, radius: int) -> list[AffineWeylElt]:
        """Alcoves within gallery distance ``radius`` of ``center``."""
        G = self.group
        seen = {center}
        frontier = [center]
        for _ in range(radius):
            nxt = []
            for a in frontier:
                for i in range(G.rank + 1):
                    b = G.rmul(a, i)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return sorted(seen, key=lambda b: (G.alcove_distance(b, center), G.sort_key(b)))

    def window(self, reference: AffineWeylElt, radius: int) -> list[AffineWeylElt]:
        """Alcoves ``A`` with ``C <=' A`` and ``d(A, C) <= radius``, closed under
        ``<='``-intervals from the reference ``C``."""
        G = self.group
        core = [a for a in self.ball(reference, radius) if self._tri_leq(reference, a)]
        out = set(core)
        for a in core:
            out.update(self.tri_interval(reference, a))
        return sorted(out, key=lambda b: (G.alcove_distance(b, reference), G.sort_key(b)))

    def verify_inversion(self, window: list[AffineWeylElt]) -> CheckReport:
        G = self.group
        rep = CheckReport("inversion", True)
        members = set(window)
        for a in window:
            for c in window:
                total = ZERO
                for b in self.tri_interval(c, a):
                    if b not in members:
                        raise ValueError(f"window is not interval-closed at {G.render(b)}")
                    total = total + self.inversion_entry(a, b) * self.periodic_poly(b, c)
                expected = ONE if a == c else ZERO
                rep.checked += 1
                if total != expected:
                    rep.passed = False
                    rep.mismatches.append({"A": G.render(a), "C": G.render(c), "value": str(total)})
        return rep

    def verify_h_equals_p_at_one(self, pairs) -> CheckReport:
        """``h_{w0 x, w0 w}(1) == p_{A_x, A_w}(1)`` for each ``(x, w)``."""
        G = self.group
        rep = CheckReport("h-eq-p", True)
        for x, w in pairs:
            lhs = self.kl.h(self.twist(x), self.twist(w)).at_one()
            rhs = self.periodic_poly(x, w).at_one()
            rep.checked += 1
            if lhs != rhs:
                rep.passed = False
                rep.mismatches.append({"x": G.render(x), "w": G.render(w), "h(1)": lhs, "p(1)": rhs})
        return rep

    def eta_coefficient(self, a: AffineWeylElt, b: AffineWeylElt) -> LaurentPoly:
        """Coefficient of ``A`` in ``eta(P_B) = sum_kappa c_kappa t_{-kappa} P_B``.

        Only ``kappa`` with ``x_B - x_A - kappa`` in the positive root cone can
        contribute, where ``x`` denotes sample points; that bounds the sum.
        """
        G = self.group
        d = G.datum
        diff = d.to_root_coords(tuple(xb - xa for xa, xb in zip(G.scaled_point(a), G.scaled_point(b))))
        bound = [floor(Fraction(c, G.h)) for c in diff]
        if any(x < 0 for x in bound):
            return ZERO
        total = ZERO
        for kappa, coeff in kostant_weights(d, bound).items():
            t = G.translation(d.from_root_coords(kappa))
            total = total + coeff * self.periodic_poly(G.mul(t, a), b)
        return total

    def verify_kato(self, b: AffineWeylElt, radius: int) -> CheckReport:
        G = self.group
        rep = CheckReport("kato", True)
        for a in self.ball(b, radius):
            lhs = self.eta_coefficient(a, b)
            rhs = self.generic_poly(a, b)
            rep.checked += 1
            if lhs != rhs:
                rep.passed = False
                rep.mismatches.append({"A": G.render(a), "B": G.render(b), "eta": str(lhs), "q": str(rhs)})
        return rep


def kostant_weights(datum, bound) -> dict[tuple[int, ...], LaurentPoly]:
    """``c_kappa = sum v^(2 * #parts)`` over multisets of positive roots summing
    to ``kappa``, for every ``kappa`` (root coordinates) with ``kappa <= bound``."""
    table = {tuple(0 for _ in bound): ONE}
    for beta in datum.positive_roots_simple:
        new = dict(table)
        for kappa, c in table.items():
            for k in itertools.count(1):
                tgt = tuple(x + k * y for x, y in zip(kappa, beta))
                if any(t > m for t, m in zip(tgt, bound)):
                    break
                new[tgt] = new.get(tgt, ZERO) + c * LaurentPoly.monomial(2 * k)
        table = new
    return table
