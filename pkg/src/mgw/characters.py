"""Formal characters in Z[X] and its completion with an explicit window.

A truncated character is only trusted on the window

    {lambda : mu0 - lambda in Z_{>=0} R+,  ht(mu0 - lambda) <= budget}

where ``mu0`` is a reference weight and ``ht`` sums simple-root coordinates.
Everything outside the window is dropped.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .affine import AffineWeylElt, AffineWeylGroup
from .report import CheckReport

Weight = tuple[int, ...]


class CharElt:
    """Finite element ``sum c_lambda e^lambda`` of the group ring Z[X].

    >>> a = CharElt({(1,): 1, (-1,): 1})
    >>> (a * a).as_list()
    [[[-2], 1], [[0], 2], [[2], 1]]
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Sequence[int], int] | None = None):
        clean: dict[Weight, int] = {}
        for wt, c in (terms or {}).items():
            if c:
                key = tuple(wt)
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def monomial(cls, weight: Sequence[int], c: int = 1) -> "CharElt":
        return cls({tuple(weight): c})

    def coeff(self, weight: Sequence[int]) -> int:
        return self.terms.get(tuple(weight), 0)

    def __eq__(self, other):
        return isinstance(other, CharElt) and self.terms == other.terms

    def __add__(self, other: "CharElt") -> "CharElt":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return CharElt(out)

    def __sub__(self, other: "CharElt") -> "CharElt":
        return self + other.scale(-1)

    def scale(self, c: int) -> "CharElt":
        return CharElt({k: c * a for k, a in self.terms.items()})

    def shift(self, weight: Sequence[int]) -> "CharElt":
        return CharElt({tuple(x + y for x, y in zip(k, weight)): c for k, c in self.terms.items()})

    def __mul__(self, other: "CharElt") -> "CharElt":
        out: dict[Weight, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return CharElt(out)

    def is_zero(self) -> bool:
        return not self.terms

    def dimension(self) -> int:
        return sum(self.terms.values())

    def as_list(self) -> list:
        return [[list(k), c] for k, c in sorted(self.terms.items())]

    def __repr__(self):
        return f"CharElt({dict(sorted(self.terms.items()))})"


@dataclass(frozen=True)
class Window:
    reference: Weight
    budget: int


@dataclass
class TruncatedChar:
    char: CharElt
    window: Window

    def coeff(self, weight) -> int:
        return self.char.coeff(weight)


class CharacterRing:
    """Character computations for the finite Weyl group inside ``group``."""

    def __init__(self, group: AffineWeylGroup):
        self.group = group
        self.datum = group.datum
        self._finite = [(w.linear, (-1) ** group.length(w)) for w in group.finite_weyl_group()]
        self._partitions: dict[tuple[int, ...], int] = {}
        self._partition_height = -1

    # -- ordering and windows -------------------------------------------------

    def order_key(self, weight: Sequence[int]):
        coords = self.datum.to_root_coords(weight)
        return (sum(coords, Fraction(0)), coords)

    def depth(self, window: Window, weight: Sequence[int]) -> int | None:
        """``ht(mu0 - weight)`` if ``weight`` is in the window, else ``None``."""
        diff = self.datum.to_root_coords(tuple(a - b for a, b in zip(window.reference, weight)))
        if any(c < 0 or c.denominator != 1 for c in diff):
            return None
        ht = int(sum(diff))
        return ht if ht <= window.budget else None

    def truncate(self, char: CharElt, window: Window) -> TruncatedChar:
        kept = {k: c for k, c in char.terms.items() if self.depth(window, k) is not None}
        return TruncatedChar(CharElt(kept), window)

    def window_weights(self, window: Window) -> list[Weight]:
        d = self.datum
        out = []
        for coords in itertools.product(range(window.budget + 1), repeat=d.rank):
            if sum(coords) <= window.budget:
                kappa = d.from_root_coords(coords)
                out.append(tuple(a - b for a, b in zip(window.reference, kappa)))
        return sorted(out, key=self.order_key, reverse=True)

    # -- finite Weyl group actions ---------------------------------------------

    def _act(self, mat, weight):
        return tuple(sum(row[k] * weight[k] for k in range(len(weight))) for row in mat)

    def finite_dot(self, mat, weight):
        rho = self.datum.rho
        img = self._act(mat, tuple(a + r for a, r in zip(weight, rho)))
        return tuple(a - r for a, r in zip(img, rho))

    def alternant(self, weight: Sequence[int]) -> CharElt:
        """``sum_w (-1)^{l(w)} e^{w(weight)}``."""
        out: dict[Weight, int] = {}
        for mat, sign in self._finite:
            k = self._act(mat, weight)
            out[k] = out.get(k, 0) + sign
        return CharElt(out)

    def divide_exact(self, num: CharElt, den: CharElt, floor_weight=None) -> CharElt:
        """Exact division in Z[X] by long division on the leading term.

        Raises if the division is not exact.  ``floor_weight`` is a lower
        bound on the quotient's support; by default it is the lowest term of
        ``num`` minus the lowest term of ``den``, which is valid because the
        order is compatible with addition.
        """
        if num.is_zero():
            return CharElt()
        lead = max(den.terms, key=self.order_key)
        lead_c = den.terms[lead]
        if floor_weight is None:
            lo_n, lo_d = min(num.terms, key=self.order_key), min(den.terms, key=self.order_key)
            floor_weight = tuple(a - b for a, b in zip(lo_n, lo_d))
        floor_key = self.order_key(floor_weight)
        rem = dict(num.terms)
        quot: dict[Weight, int] = {}
        while rem:
            top = max(rem, key=self.order_key)
            c = rem[top]
            q_wt = tuple(a - b for a, b in zip(top, lead))
            if c % lead_c or self.order_key(q_wt) < floor_key:
                raise ArithmeticError("character division left a nonzero remainder")
            qc = c // lead_c
            quot[q_wt] = quot.get(q_wt, 0) + qc
            for k, dc in den.terms.items():
                t = tuple(a + b for a, b in zip(q_wt, k))
                v = rem.get(t, 0) - qc * dc
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return CharElt(quot)

    # -- characters ------------------------------------------------------------

    def weyl_character(self, weight: Sequence[int]) -> CharElt:
        """Weyl's character formula by exact division of alternants.

        >>> from mgw.affine import AffineWeylGroup
        >>> R = CharacterRing(AffineWeylGroup.of_type("A1"))
        >>> R.weyl_character((2,)).as_list()
        [[[-2], 1], [[0], 1], [[2], 1]]
        """
        weight = tuple(weight)
        if any(c < 0 for c in weight):
            raise ValueError(f"weight {weight} is not dominant")
        rho = self.datum.rho
        num = self.alternant(tuple(a + r for a, r in zip(weight, rho)))
        den = self.alternant(rho)
        w0 = self.group.w0().linear
        return self.divide_exact(num, den, floor_weight=self._act(w0, weight))

    def partition_counts(self, max_height: int) -> dict[tuple[int, ...], int]:
        """Kostant partition function on root-coordinate vectors of height <= max_height."""
        if max_height > self._partition_height:
            table = {tuple(0 for _ in range(self.datum.rank)): 1}
            for beta in self.datum.positive_roots_simple:
                step = sum(beta)
                new = dict(table)
                for kappa, c in table.items():
                    for k in itertools.count(1):
                        if sum(kappa) + k * step > max_height:
                            break
                        tgt = tuple(x + k * y for x, y in zip(kappa, beta))
                        new[tgt] = new.get(tgt, 0) + c
                table = new
            self._partitions = table
            self._partition_height = max_height
        return {k: c for k, c in self._partitions.items() if sum(k) <= max_height}

    def kostant_expansion(self, weight: Sequence[int], budget: int, reference=None) -> TruncatedChar:
        """``sum_y (-1)^{l(y)} e^{y . weight} prod (1 - e^{-alpha})^{-1}`` on a window.

        The window defaults to reference ``weight`` with the given height budget.
        """
        weight = tuple(weight)
        window = Window(tuple(reference) if reference is not None else weight, budget)
        d = self.datum
        out: dict[Weight, int] = {}
        parts = self.partition_counts(budget)
        for mat, sign in self._finite:
            nu = self.finite_dot(mat, weight)
            top = self.depth(Window(window.reference, 10**9), nu)
            if top is None or top > budget:
                continue
            for kappa, c in parts.items():
                if top + sum(kappa) > budget:
                    continue
                k = tuple(a - b for a, b in zip(nu, d.from_root_coords(kappa)))
                out[k] = out.get(k, 0) + sign * c
        return TruncatedChar(CharElt(out), window)

    def baby_verma_character(self, weight: Sequence[int], p: int) -> CharElt:
        """``e^mu prod_{alpha > 0} (1 + e^{-alpha} + ... + e^{-(p-1) alpha})``."""
        out = CharElt.monomial(weight)
        for alpha in self.datum.positive_roots:
            factor = CharElt({tuple(-k * a for a in alpha): 1 for k in range(p)})
            out = out * factor
        return out


def check_prime(group: AffineWeylGroup, p: int):
    if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    if p < group.h:
        raise ValueError(f"p = {p} is below the Coxeter number {group.h}")


def lusztig_sum(periodic, ring: CharacterRing, w: AffineWeylElt, p: int) -> CharElt:
    """``sum_x (-1)^{l(w)-l(x)} h_{w0 x, w0 w}(1) chi(x . 0)`` over the dominant
    part of the restricted box's lower interval."""
    G = ring.group
    check_prime(G, p)
    boxes = G.box_sets()
    if w not in boxes.res_plus:
        raise ValueError(f"{G.render(w)} is not a dominant restricted element")
    zero = (0,) * G.rank
    total = CharElt()
    for x in boxes.circ_plus:
        hv = periodic.kl.h(periodic.twist(x), periodic.twist(w)).at_one()
        if hv:
            sign = (-1) ** (G.length(w) - G.length(x))
            total = total + ring.weyl_character(G.dot_action(x, zero, p)).scale(sign * hv)
    return total


def star_sides(periodic, ring: CharacterRing, w: AffineWeylElt, p: int, budget: int):
    """Both sides of the identity relating Weyl characters to baby Verma
    characters, truncated to the window below ``w . 0``.

    Returns ``(lhs, rhs, zs)`` where ``zs`` lists every ``z`` whose baby Verma
    character meets the window.
    """
    G = ring.group
    check_prime(G, p)
    boxes = G.box_sets()
    if w not in boxes.res_plus:
        raise ValueError(f"{G.render(w)} is not a dominant restricted element")
    zero = (0,) * G.rank
    window = Window(G.dot_action(w, zero, p), budget)

    lhs = CharElt()
    for x in boxes.circ_plus:
        hv = periodic.kl.h(periodic.twist(x), periodic.twist(w)).at_one()
        if hv:
            lhs = lhs + ring.weyl_character(G.dot_action(x, zero, p)).scale((-1) ** G.length(x) * hv)
    lhs = ring.truncate(lhs, window)

    # e^lambda occurs in [Z'(mu)] iff mu - lambda = sum c_alpha alpha with 0 <= c_alpha < p,
    # so every contributing z has z . 0 among these candidates
    shifts = {(0,) * G.rank}
    for alpha in G.datum.positive_roots:
        shifts = {tuple(s + k * a for s, a in zip(sh, alpha)) for sh in shifts for k in range(p)}
    zs = set()
    for lam in ring.window_weights(window):
        for sh in shifts:
            z = G.element_of_dot_orbit_point(tuple(a + b for a, b in zip(lam, sh)), p)
            if z is not None:
                zs.add(z)
    zs = sorted(zs, key=G.sort_key)

    rhs = CharElt()
    used = []
    for z in zs:
        qv = periodic.generic_poly(z, w).at_one()
        if qv:
            used.append(z)
            rhs = rhs + ring.baby_verma_character(G.dot_action(z, zero, p), p).scale((-1) ** G.length(z) * qv)
    rhs = ring.truncate(rhs, window)
    return lhs, rhs, used


def verify_star(periodic, ring: CharacterRing, w: AffineWeylElt, p: int, budget: int) -> CheckReport:
    G = ring.group
    lhs, rhs, used = star_sides(periodic, ring, w, p, budget)
    rep = CheckReport("star", True)
    for lam in ring.window_weights(lhs.window):
        a, b = lhs.coeff(lam), rhs.coeff(lam)
        rep.checked += 1
        if a != b:
            rep.passed = False
            rep.mismatches.append({"weight": list(lam), "lhs": a, "rhs": b})
    rep.details = {
        "window": {"reference": list(lhs.window.reference), "budget": budget},
        "contributing_z": [G.render(z) for z in used],
    }
    return rep
