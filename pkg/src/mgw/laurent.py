"""Integer Laurent polynomials in a single variable ``v``."""
from __future__ import annotations

from typing import Iterable, Mapping


class LaurentPoly:
    """Immutable element of Z[v, v^-1], stored as ``{exponent: coefficient}``.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their term dictionaries are equal.

    >>> v = LaurentPoly.v()
    >>> (v + 1) * (v - 1)
    LaurentPoly({0: -1, 2: 1})
    >>> (v + v**-1).at_one()
    2
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, int] = {}
        for e, c in items:
            if c:
                clean[int(e)] = clean.get(int(e), 0) + int(c)
        self._terms = {e: c for e, c in sorted(clean.items()) if c}
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exponent: coeff})

    @classmethod
    def v(cls) -> "LaurentPoly":
        return cls({1: 1})

    @classmethod
    def from_pairs(cls, pairs) -> "LaurentPoly":
        """Inverse of :meth:`to_pairs`."""
        return cls((int(e), int(c)) for e, c in pairs)

    def to_pairs(self) -> list[list[int]]:
        return [[e, c] for e, c in self._terms.items()]

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def coeff(self, exponent: int) -> int:
        return self._terms.get(exponent, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial")
        return max(self._terms)

    def valuation(self) -> int:
        if not self._terms:
            raise ValueError("valuation of the zero polynomial")
        return min(self._terms)

    def at_one(self) -> int:
        return sum(self._terms.values())

    def bar(self) -> "LaurentPoly":
        """Substitute v -> v^-1."""
        return LaurentPoly({-e: c for e, c in self._terms.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def substitute_power(self, k: int) -> "LaurentPoly":
        """Substitute v -> v^k."""
        return LaurentPoly({e * k: c for e, c in self._terms.items()})

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials are invertible")
            (e, c), = self._terms.items()
            if c not in (1, -1):
                raise ValueError("only unit monomials are invertible")
            return LaurentPoly({e * n: c ** abs(n)})
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"LaurentPoly({self._terms})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            if e == 0:
                mono = str(abs(c))
            else:
                mono = "v" if e == 1 else f"v^{e}"
                if abs(c) != 1:
                    mono = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, mono))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, mono in parts[1:]:
            text += f" {sign} {mono}"
        return text


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
V = LaurentPoly.v()
V_INV = LaurentPoly.monomial(-1)
