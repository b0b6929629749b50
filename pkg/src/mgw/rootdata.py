"""Finite root systems in integer coordinates.

Weights are integer vectors in the basis of fundamental weights and coroots
are integer vectors in the basis of simple coroots, so the natural pairing is
a dot product.  The Cartan matrix is stored with ``cartan[i][j] = <alpha_i,
alpha_j^vee>``, which makes row ``i`` the simple root ``alpha_i`` written in
fundamental-weight coordinates.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

Weight = tuple[int, ...]
Coroot = tuple[int, ...]

SUPPORTED_TYPES = (
    "A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4",
)

# closure of the simple roots under reflections; anything larger is not finite type
_MAX_ROOTS = 200


class RootDataError(ValueError):
    pass


@dataclass(frozen=True)
class RootDatum:
    label: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[Weight, ...]
    positive_roots_simple: tuple[tuple[int, ...], ...]
    positive_coroots: tuple[Coroot, ...]
    rho: Weight
    highest_coroot: Coroot
    highest_coroot_root: Weight
    coxeter_number: int

    @property
    def simple_roots(self) -> tuple[Weight, ...]:
        return self.cartan

    @property
    def simple_coroots(self) -> tuple[Coroot, ...]:
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    @property
    def num_positive_roots(self) -> int:
        return len(self.positive_roots)

    def to_root_coords(self, weight: Sequence[int]) -> tuple[Fraction, ...]:
        """Express a weight in the basis of simple roots (rational in general)."""
        inv = _inverse_cartan(self.cartan)
        r = self.rank
        return tuple(sum(Fraction(weight[i]) * inv[i][j] for i in range(r)) for j in range(r))

    def from_root_coords(self, coeffs: Sequence[int]) -> Weight:
        r = self.rank
        return tuple(sum(coeffs[i] * self.cartan[i][j] for i in range(r)) for j in range(r))

    def height(self, weight: Sequence[int]) -> Fraction:
        return sum(self.to_root_coords(weight), Fraction(0))

    def as_dict(self) -> dict:
        return {
            "type": self.label,
            "rank": self.rank,
            "cartan": [list(row) for row in self.cartan],
            "positive_roots": [list(a) for a in self.positive_roots],
            "positive_coroots": [list(c) for c in self.positive_coroots],
            "rho": list(self.rho),
            "highest_coroot": list(self.highest_coroot),
            "coxeter_number": self.coxeter_number,
        }


def pairing(weight: Sequence[int], coroot: Sequence[int]) -> int:
    """<weight, coroot> for a weight in fundamental-weight coordinates and a
    coroot in simple-coroot coordinates."""
    if len(weight) != len(coroot):
        raise ValueError(f"dimension mismatch: weight of length {len(weight)}, coroot of length {len(coroot)}")
    return sum(a * b for a, b in zip(weight, coroot))


def is_dominant(weight: Sequence[int]) -> bool:
    # <lambda, alpha_i^vee> is the i-th fundamental-weight coordinate
    return all(c >= 0 for c in weight)


def cartan_matrix(label: str) -> tuple[tuple[int, ...], ...]:
    m = re.fullmatch(r"([A-G])(\d+)", label)
    if not m or label not in SUPPORTED_TYPES:
        raise RootDataError(
            f"unsupported root system type {label!r}; supported: {', '.join(SUPPORTED_TYPES)}"
        )
    kind, n = m.group(1), int(m.group(2))
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a_ij=-1, a_ji=-1):
        c[i][j], c[j][i] = a_ij, a_ji

    if kind == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif kind == "B":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -2, -1)  # alpha_n short
    elif kind == "C":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)  # alpha_n long
    elif kind == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif kind == "G":
        link(0, 1, -1, -3)  # alpha_1 short
    elif kind == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    return tuple(tuple(row) for row in c)


@lru_cache(maxsize=None)
def _inverse_cartan(cartan):
    n = len(cartan)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(cartan)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def _check_cartan(cartan):
    n = len(cartan)
    for i in range(n):
        if cartan[i][i] != 2:
            raise RootDataError("Cartan matrix must have 2 on the diagonal")
        for j in range(n):
            if i != j and cartan[i][j] > 0:
                raise RootDataError("Cartan matrix must be non-positive off the diagonal")
            if i != j and (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise RootDataError("Cartan matrix zero pattern must be symmetric")


def _positive_root_pairs(cartan):
    """Close the simple (root, coroot) pairs under simple reflections.

    Returns tuples ``(root_in_simple_root_coords, coroot_in_simple_coroot_coords)``.
    """
    n = len(cartan)
    simple = [(tuple(int(i == j) for j in range(n)), tuple(int(i == j) for j in range(n))) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta, beta_v in frontier:
            weight = tuple(sum(beta[i] * cartan[i][j] for i in range(n)) for j in range(n))
            for j in range(n):
                # s_j(beta) = beta - <beta, alpha_j^vee> alpha_j
                b = list(beta)
                b[j] -= weight[j]
                # s_j(beta^vee) = beta^vee - <alpha_j, beta^vee> alpha_j^vee
                bv = list(beta_v)
                bv[j] -= sum(beta_v[i] * cartan[j][i] for i in range(n))
                pair = (tuple(b), tuple(bv))
                if all(x >= 0 for x in b) and any(b) and pair not in seen:
                    seen.add(pair)
                    nxt.append(pair)
        if len(seen) > _MAX_ROOTS:
            raise RootDataError("reflection closure of the simple roots is not finite")
        frontier = nxt
    return sorted(seen, key=lambda p: (sum(p[0]), p[0]))


@lru_cache(maxsize=None)
def build_root_datum(type_label: str) -> RootDatum:
    """Build the root datum of a finite simply connected type.

    >>> d = build_root_datum("A2")
    >>> d.coxeter_number, d.rho, d.highest_coroot
    (3, (1, 1), (1, 1))
    """
    cartan = cartan_matrix(type_label)
    _check_cartan(cartan)
    n = len(cartan)
    pairs = _positive_root_pairs(cartan)
    roots_simple = tuple(p[0] for p in pairs)
    roots = tuple(tuple(sum(b[i] * cartan[i][j] for i in range(n)) for j in range(n)) for b in roots_simple)
    coroots = tuple(p[1] for p in pairs)
    rho = tuple(1 for _ in range(n))
    top = max(range(len(coroots)), key=lambda k: (sum(coroots[k]), coroots[k]))
    h = max(pairing(rho, c) for c in coroots) + 1
    datum = RootDatum(
        label=type_label,
        rank=n,
        cartan=cartan,
        positive_roots=roots,
        positive_roots_simple=roots_simple,
        positive_coroots=coroots,
        rho=rho,
        highest_coroot=coroots[top],
        highest_coroot_root=roots[top],
        coxeter_number=h,
    )
    _validate(datum)
    return datum


def _validate(d: RootDatum):
    for i in range(d.rank):
        simple_v = tuple(int(i == j) for j in range(d.rank))
        if pairing(d.rho, simple_v) != 1:
            raise RootDataError("rho must pair to 1 with every simple coroot")
    if 2 * len(d.positive_roots) != d.coxeter_number * d.rank:
        raise RootDataError("|R+| != h * rank / 2")
    for a, c in zip(d.positive_roots, d.positive_coroots):
        if pairing(a, c) != 2:
            raise RootDataError("root/coroot pairing must be 2")
