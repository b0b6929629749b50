"""The affine Hecke algebra in the standard basis ``H_x = v^{l(x)} T_x``.

Multiplication only ever needs the rule for a simple generator on either side:

    H_x H_s = H_{xs}                     if l(xs) > l(x)
    H_x H_s = H_{xs} + (v^-1 - v) H_x    otherwise

and symmetrically on the left.  The bar involution is the semilinear ring
homomorphism with ``bar(H_s) = H_s + (v - v^-1) H_e``.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Mapping

from .affine import AffineWeylElt, AffineWeylGroup
from .cache import Cache
from .laurent import ONE, V, V_INV, ZERO, LaurentPoly

_V_INV_MINUS_V = V_INV - V
_V_MINUS_V_INV = V - V_INV


class HeckeElt:
    """Finite sum ``sum_x c_x H_x`` with Laurent polynomial coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[AffineWeylElt, LaurentPoly] | None = None):
        self.coeffs = {x: c for x, c in (coeffs or {}).items() if not c.is_zero()}

    def __eq__(self, other):
        return isinstance(other, HeckeElt) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        out = dict(self.coeffs)
        for x, c in other.coeffs.items():
            out[x] = out.get(x, ZERO) + c
        return HeckeElt(out)

    def __sub__(self, other: "HeckeElt") -> "HeckeElt":
        return self + other.scale(-1)

    def scale(self, c) -> "HeckeElt":
        if not isinstance(c, LaurentPoly):
            c = LaurentPoly.const(c)
        return HeckeElt({x: a * c for x, a in self.coeffs.items()})

    def coeff(self, x: AffineWeylElt) -> LaurentPoly:
        return self.coeffs.get(x, ZERO)

    def support(self) -> set[AffineWeylElt]:
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"HeckeElt({len(self.coeffs)} terms)"


class HeckeAlgebra:
    """Hecke algebra of an affine Weyl group.

    >>> H = HeckeAlgebra(AffineWeylGroup.of_type("A1"))
    >>> s = H.group.parse("s1")
    >>> sq = H.multiply(H.basis(s), H.basis(s))
    >>> str(sq.coeff(H.group.identity)), str(sq.coeff(s))
    ('1', '-v + v^-1')
    """

    def __init__(self, group: AffineWeylGroup):
        self.group = group
        self._bar_basis: dict[AffineWeylElt, HeckeElt] = {}

    def basis(self, x: AffineWeylElt, c: LaurentPoly = ONE) -> HeckeElt:
        return HeckeElt({x: c})

    def one(self) -> HeckeElt:
        return self.basis(self.group.identity)

    def mul_simple_right(self, a: HeckeElt, i: int) -> HeckeElt:
        G = self.group
        out: dict[AffineWeylElt, LaurentPoly] = {}
        for x, c in a.coeffs.items():
            xs = G.rmul(x, i)
            out[xs] = out.get(xs, ZERO) + c
            if G.length(xs) < G.length(x):
                out[x] = out.get(x, ZERO) + c * _V_INV_MINUS_V
        return HeckeElt(out)

    def mul_simple_left(self, i: int, a: HeckeElt) -> HeckeElt:
        G = self.group
        out: dict[AffineWeylElt, LaurentPoly] = {}
        for x, c in a.coeffs.items():
            sx = G.lmul(i, x)
            out[sx] = out.get(sx, ZERO) + c
            if G.length(sx) < G.length(x):
                out[x] = out.get(x, ZERO) + c * _V_INV_MINUS_V
        return HeckeElt(out)

    def multiply(self, a: HeckeElt, b: HeckeElt) -> HeckeElt:
        """Product, expanding each ``H_y`` of ``b`` along a reduced word of ``y``."""
        total = HeckeElt()
        for y, c in b.coeffs.items():
            part = a.scale(c)
            for i in self.group.reduced_word(y):
                part = self.mul_simple_right(part, i)
            total = total + part
        return total

    def _bar_of_basis(self, x: AffineWeylElt) -> HeckeElt:
        hit = self._bar_basis.get(x)
        if hit is not None:
            return hit
        G = self.group
        word = G.reduced_word(x)
        if not word:
            res = self.one()
        else:
            # bar(H_x) = bar(H_{x'}) bar(H_s) with x = x' s
            prefix = G.from_word(word[:-1])
            base = self._bar_of_basis(prefix)
            res = self.mul_simple_right(base, word[-1]) + base.scale(_V_MINUS_V_INV)
        self._bar_basis[x] = res
        return res

    def bar(self, a: HeckeElt) -> HeckeElt:
        total = HeckeElt()
        for x, c in a.coeffs.items():
            total = total + self._bar_of_basis(x).scale(c.bar())
        return total


class KLTable:
    """Memoized Kazhdan-Lusztig basis ``w -> {x: h_{x,w}}``.

    Entries are built by ``C_w = C_s C_{sw} - sum mu(z, sw) C_z`` over
    ``z < sw`` with ``sz < z``, where ``C_s = H_s + v H_e`` and ``mu`` is the
    coefficient of ``v`` in ``h_{z,sw}``.
    """

    def __init__(self, hecke: HeckeAlgebra, cache: Cache | None = None):
        self.hecke = hecke
        self.group = hecke.group
        self.cache = cache
        self._table: dict[AffineWeylElt, dict[AffineWeylElt, LaurentPoly]] = {}
        self._lock = threading.Lock()
        self._dirty = False
        if cache is not None:
            self._load()

    @classmethod
    def of_type(cls, label: str, cache: Cache | None = None) -> "KLTable":
        return cls(HeckeAlgebra(AffineWeylGroup.of_type(label)), cache)

    # -- persistence ---------------------------------------------------

    def _cache_key(self):
        return self.cache.key("kl", self.group.datum.label)

    def _load(self):
        payload = self.cache.read(self._cache_key())
        if not payload:
            return
        G = self.group
        for entry in payload["entries"]:
            w = G.from_word(entry["w"])
            self._table[w] = {G.from_word(x): LaurentPoly.from_pairs(h) for x, h in entry["column"]}

    def to_payload(self) -> dict:
        G = self.group
        entries = []
        for w in sorted(self._table, key=G.sort_key):
            col = self._table[w]
            entries.append({
                "w": list(G.reduced_word(w)),
                "column": [[list(G.reduced_word(x)), col[x].to_pairs()] for x in sorted(col, key=G.sort_key)],
            })
        return {"entries": entries}

    def save(self):
        if self.cache is not None and self._dirty:
            self.cache.write(self._cache_key(), self.to_payload())
            self._dirty = False

    # -- computation -----------------------------------------------------

    def column(self, w: AffineWeylElt) -> dict[AffineWeylElt, LaurentPoly]:
        """``{x: h_{x,w}}`` over the support of the KL basis element."""
        hit = self._table.get(w)
        if hit is not None:
            return hit
        # iterate down a reduced word so the recursion depth stays flat
        G = self.group
        chain = []
        cur = w
        while cur not in self._table:
            s = G.first_left_descent(cur)
            if s is None:
                self._publish(cur, {cur: ONE})
                break
            chain.append((cur, s))
            cur = G.lmul(s, cur)
        for elt, s in reversed(chain):
            self._publish(elt, self._compute(elt, s))
        return self._table[w]

    def _publish(self, w, col):
        with self._lock:
            self._table.setdefault(w, col)
            self._dirty = True

    def _compute(self, w: AffineWeylElt, s: int) -> dict[AffineWeylElt, LaurentPoly]:
        G = self.group
        y = G.lmul(s, w)
        cy = HeckeElt(self.column(y))
        prod = self.hecke.mul_simple_left(s, cy) + cy.scale(V)
        for z, hz in list(self.column(y).items()):
            if z == y:
                continue
            mu = hz.coeff(1)
            if mu and G.length(G.lmul(s, z)) < G.length(z):
                prod = prod - HeckeElt(self.column(z)).scale(mu)
        return dict(prod.coeffs)

    def element(self, w: AffineWeylElt) -> HeckeElt:
        return HeckeElt(self.column(w))

    def h(self, x: AffineWeylElt, w: AffineWeylElt) -> LaurentPoly:
        return self.column(w).get(x, ZERO)

    def build_up_to(self, max_length: int, workers: int = 1) -> list[AffineWeylElt]:
        """Fill the table for every element of length at most ``max_length``.

        Elements of one length only depend on shorter ones, so each length
        stratum can be mapped over a worker pool.
        """
        elts = self.group.elements_up_to_length(max_length)
        strata: dict[int, list] = {}
        for w in elts:
            strata.setdefault(self.group.length(w), []).append(w)
        for k in sorted(strata):
            if workers > 1 and len(strata[k]) > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    list(pool.map(self.column, strata[k]))
            else:
                for w in strata[k]:
                    self.column(w)
        return elts

    def entries(self) -> Iterable[tuple[AffineWeylElt, AffineWeylElt, LaurentPoly]]:
        G = self.group
        for w in sorted(self._table, key=G.sort_key):
            col = self._table[w]
            for x in sorted(col, key=G.sort_key):
                yield w, x, col[x]


def check_kl_element(table: KLTable, w: AffineWeylElt) -> list[str]:
    """Problems with ``C_w``: bar invariance, degree condition, support, positivity."""
    G = table.group
    elt = table.element(w)
    problems = []
    if table.hecke.bar(elt) != elt:
        problems.append("not bar invariant")
    if elt.coeff(w) != ONE:
        problems.append("h_{w,w} != 1")
    for x, c in elt.coeffs.items():
        if x != w and c.valuation() < 1:
            problems.append(f"h_{{{G.render(x)},w}} = {c} not in vZ[v]")
        if any(a < 0 for a in c.terms.values()):
            problems.append(f"h_{{{G.render(x)},w}} = {c} has a negative coefficient")
    if set(elt.coeffs) != set(G.lower_interval(w)):
        problems.append("support differs from the Bruhat interval [e, w]")
    return problems
