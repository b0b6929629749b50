"""The affine Weyl group ``W_hat = W x| ZR`` acting on rational weight space.

Everything here uses the normalization in which reflection hyperplanes sit at
integer levels, ``H_{alpha,n} = {<v, alpha^vee> = n}``.  The prime ``p`` only
enters through :meth:`AffineWeylGroup.dot_action`.  Alcove sidedness is decided
exactly with the interior point ``x0 = rho / h`` of the fundamental alcove; to
stay in integers we work with ``h * w(x0)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rootdata import RootDatum, build_root_datum, pairing

Matrix = tuple[tuple[int, ...], ...]


class AffineWeylElt:
    """An affine map ``v -> linear @ v + translation`` on weight coordinates.

    ``linear`` is the finite Weyl group part as an integer matrix acting on
    column vectors of fundamental-weight coordinates, ``translation`` is an
    element of the root lattice written in fundamental-weight coordinates.
    Equality is structural.
    """

    __slots__ = ("linear", "translation", "_hash")

    def __init__(self, linear: Matrix, translation: tuple[int, ...]):
        self.linear = linear
        self.translation = translation
        self._hash = hash((linear, translation))

    def __eq__(self, other):
        return (
            isinstance(other, AffineWeylElt)
            and self._hash == other._hash
            and self.linear == other.linear
            and self.translation == other.translation
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"AffineWeylElt({self.linear}, {self.translation})"

    def __reduce__(self):
        return (AffineWeylElt, (self.linear, self.translation))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class BoxSets:
    """The restricted sets of the affine Weyl group."""

    res_plus: tuple[AffineWeylElt, ...]
    res_minus: tuple[AffineWeylElt, ...]
    w0_hat: AffineWeylElt
    circ: tuple[AffineWeylElt, ...]
    circ_plus: tuple[AffineWeylElt, ...]


@dataclass(frozen=True)
class ReflectionEdge:
    lower: AffineWeylElt
    upper: AffineWeylElt
    root_index: int
    level: int
    label: tuple[int, ...]  # (coroot in simple-coroot coordinates..., -level)


class AffineWeylGroup:
    """Affine Weyl group of a finite root datum.

    Generators are indexed ``0..rank``: index ``i >= 1`` is the finite simple
    reflection ``s_i`` and index ``0`` is the affine reflection ``s_{gamma,1}``
    in the highest coroot.

    >>> G = AffineWeylGroup.of_type("A1")
    >>> w = G.parse("s1 s0")
    >>> G.length(w), G.render(w)
    (2, 's1 s0')
    """

    def __init__(self, datum: RootDatum):
        self.datum = datum
        self.rank = datum.rank
        self.h = datum.coxeter_number
        r = self.rank
        self.identity = AffineWeylElt(_identity(r), (0,) * r)
        self._refl_mats = tuple(self._reflection_matrix(a, c) for a, c in zip(datum.positive_roots, datum.positive_coroots))
        gamma_index = datum.positive_coroots.index(datum.highest_coroot)
        self._gamma_index = gamma_index
        gens = [AffineWeylElt(self._refl_mats[gamma_index], datum.highest_coroot_root)]
        for i in range(r):
            idx = datum.positive_roots.index(datum.cartan[i])
            gens.append(AffineWeylElt(self._refl_mats[idx], (0,) * r))
        self.generators: tuple[AffineWeylElt, ...] = tuple(gens)
        self._simple_root_index = tuple(datum.positive_roots.index(datum.cartan[i]) for i in range(r))
        self._length: dict[AffineWeylElt, int] = {}
        self._point: dict[AffineWeylElt, tuple[int, ...]] = {}
        self._word: dict[AffineWeylElt, tuple[int, ...]] = {}
        self._leq: dict[tuple[AffineWeylElt, AffineWeylElt], bool] = {}
        self._lower: dict[AffineWeylElt, frozenset] = {}
        self._w0 = None

    @classmethod
    def of_type(cls, label: str) -> "AffineWeylGroup":
        return cls(build_root_datum(label))

    def _reflection_matrix(self, root, coroot) -> Matrix:
        # s_alpha(v)_k = v_k - <v, alpha^vee> alpha_k
        r = self.rank
        return tuple(tuple(int(k == j) - root[k] * coroot[j] for j in range(r)) for k in range(r))

    # -- group structure -------------------------------------------------

    def mul(self, a: AffineWeylElt, b: AffineWeylElt) -> AffineWeylElt:
        lin = _matmul(a.linear, b.linear)
        tr = tuple(x + y for x, y in zip(_matvec(a.linear, b.translation), a.translation))
        return AffineWeylElt(lin, tr)

    def prod(self, elts: Iterable[AffineWeylElt]) -> AffineWeylElt:
        out = self.identity
        for e in elts:
            out = self.mul(out, e)
        return out

    def inverse(self, a: AffineWeylElt) -> AffineWeylElt:
        # Weyl group matrices have integer inverses; invert via the finite word
        inv_lin = self._finite_inverse(a.linear)
        tr = tuple(-x for x in _matvec(inv_lin, a.translation))
        return AffineWeylElt(inv_lin, tr)

    def _finite_inverse(self, m: Matrix) -> Matrix:
        word = self._finite_word(m)
        out = _identity(self.rank)
        for i in word:  # (s_a s_b ... )^-1 = ... s_b s_a
            out = _matmul(self.generators[i].linear, out)
        return out

    def _finite_word(self, m: Matrix) -> list[int]:
        word = []
        cur = m
        rho = self.datum.rho
        while True:
            img = _matvec(cur, rho)
            i = next((i for i in range(self.rank) if img[i] < 0), None)
            if i is None:
                break
            word.append(i + 1)
            cur = _matmul(self.generators[i + 1].linear, cur)
        return word

    def reflection(self, root_index: int, level: int) -> AffineWeylElt:
        """The affine reflection ``s_{alpha,n}: v -> s_alpha(v) + n alpha``."""
        root = self.datum.positive_roots[root_index]
        return AffineWeylElt(self._refl_mats[root_index], tuple(level * a for a in root))

    def translation(self, eta: Sequence[int]) -> AffineWeylElt:
        """Translation by a root-lattice element given in weight coordinates."""
        coords = self.datum.to_root_coords(eta)
        if any(c.denominator != 1 for c in coords):
            raise ValueError(f"{tuple(eta)} is not in the root lattice")
        return AffineWeylElt(_identity(self.rank), tuple(eta))

    def translation_root_coords(self, a: AffineWeylElt) -> tuple[int, ...]:
        return tuple(int(c) for c in self.datum.to_root_coords(a.translation))

    def finite_part(self, a: AffineWeylElt) -> AffineWeylElt:
        return AffineWeylElt(a.linear, (0,) * self.rank)

    def w0(self) -> AffineWeylElt:
        """Longest element of the finite Weyl group."""
        if self._w0 is None:
            w = self.identity
            while True:
                p = self.scaled_point(w)
                i = next((i for i in range(self.rank) if p[i] > 0), None)
                if i is None:
                    break
                w = self.mul(self.generators[i + 1], w)
            self._w0 = w
        return self._w0

    def finite_weyl_group(self) -> list[AffineWeylElt]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for w in frontier:
                for i in range(1, self.rank + 1):
                    u = self.mul(w, self.generators[i])
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return sorted(seen, key=self.sort_key)

    # -- action and alcove geometry ----------------------------------------

    def act(self, a: AffineWeylElt, point: Sequence) -> tuple:
        return tuple(x + y for x, y in zip(_matvec(a.linear, point), a.translation))

    def scaled_point(self, a: AffineWeylElt) -> tuple[int, ...]:
        """``h * a(rho / h)``, an integer vector inside ``h * A_a``."""
        p = self._point.get(a)
        if p is None:
            p = tuple(x + self.h * y for x, y in zip(_matvec(a.linear, self.datum.rho), a.translation))
            self._point[a] = p
        return p

    def sample_point(self, a: AffineWeylElt) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.h) for x in self.scaled_point(a))

    def coroot_values(self, a: AffineWeylElt) -> tuple[int, ...]:
        """``h * <a(x0), alpha^vee>`` for every positive coroot."""
        p = self.scaled_point(a)
        return tuple(pairing(p, c) for c in self.datum.positive_coroots)

    def length(self, a: AffineWeylElt) -> int:
        """Number of reflection hyperplanes separating ``A+`` from ``A_a``."""
        n = self._length.get(a)
        if n is None:
            h = self.h
            n = sum(abs(val // h) for val in self.coroot_values(a))
            self._length[a] = n
        return n

    def alcove_distance(self, a: AffineWeylElt, b: AffineWeylElt) -> int:
        """Number of hyperplanes separating ``A_a`` and ``A_b``."""
        h = self.h
        va, vb = self.coroot_values(a), self.coroot_values(b)
        return sum(abs(x // h - y // h) for x, y in zip(va, vb))

    def in_dominant_cone(self, a: AffineWeylElt) -> bool:
        p = self.scaled_point(a)
        return all(x > 0 for x in p)

    def in_box(self, a: AffineWeylElt) -> bool:
        """Whether ``A_a`` lies in ``{0 < <v, alpha^vee> < 1, alpha simple}``."""
        p = self.scaled_point(a)
        return all(0 < x < self.h for x in p)

    def alcove_of_point(self, point: Sequence) -> AffineWeylElt | None:
        """Element whose alcove contains ``point``; ``None`` on a hyperplane."""
        y = tuple(Fraction(x) for x in point)
        gamma_v = self.datum.highest_coroot
        word = []
        while True:
            i = next((i for i in range(self.rank) if y[i] < 0), None)
            if i is not None:
                word.append(i + 1)
                y = self.act(self.generators[i + 1], y)
                continue
            if pairing(y, gamma_v) > 1:
                word.append(0)
                y = self.act(self.generators[0], y)
                continue
            break
        if any(x == 0 for x in y) or pairing(y, gamma_v) == 1:
            return None
        return self.from_word(word)

    # -- words ---------------------------------------------------------------

    def left_descents(self, a: AffineWeylElt) -> list[int]:
        p = self.scaled_point(a)
        out = [0] if pairing(p, self.datum.highest_coroot) > self.h else []
        out.extend(i + 1 for i in range(self.rank) if p[i] < 0)
        return out

    def first_left_descent(self, a: AffineWeylElt) -> int | None:
        p = self.scaled_point(a)
        if pairing(p, self.datum.highest_coroot) > self.h:
            return 0
        for i in range(self.rank):
            if p[i] < 0:
                return i + 1
        return None

    def right_descents(self, a: AffineWeylElt) -> list[int]:
        la = self.length(a)
        return [i for i in range(self.rank + 1) if self.length(self.mul(a, self.generators[i])) < la]

    def lmul(self, i: int, a: AffineWeylElt) -> AffineWeylElt:
        return self.mul(self.generators[i], a)

    def rmul(self, a: AffineWeylElt, i: int) -> AffineWeylElt:
        return self.mul(a, self.generators[i])

    def reduced_word(self, a: AffineWeylElt) -> tuple[int, ...]:
        """Reduced word obtained by repeatedly stripping the first left descent."""
        word = self._word.get(a)
        if word is None:
            out = []
            cur = a
            while True:
                s = self.first_left_descent(cur)
                if s is None:
                    break
                out.append(s)
                cur = self.lmul(s, cur)
            word = tuple(out)
            self._word[a] = word
        return word

    def from_word(self, word: Iterable[int]) -> AffineWeylElt:
        out = self.identity
        for i in word:
            if not 0 <= i <= self.rank:
                raise ValueError(f"generator index {i} out of range 0..{self.rank}")
            out = self.mul(out, self.generators[i])
        return out

    def parse(self, text: str) -> AffineWeylElt:
        """Parse a word such as ``"s0 s1 s2"``; ``"e"`` or ``""`` is the identity."""
        tokens = [t for t in re.split(r"[\s,*]+", text.strip()) if t]
        if tokens in ([], ["e"]):
            return self.identity
        word = []
        for t in tokens:
            m = re.fullmatch(r"s(\d+)", t)
            if not m:
                raise ValueError(f"cannot parse generator {t!r}; expected s0..s{self.rank}")
            word.append(int(m.group(1)))
        return self.from_word(word)

    def render(self, a: AffineWeylElt) -> str:
        word = self.reduced_word(a)
        return " ".join(f"s{i}" for i in word) if word else "e"

    def sort_key(self, a: AffineWeylElt):
        return (self.length(a), self.reduced_word(a))

    # -- Bruhat order ----------------------------------------------------------

    def bruhat_leq(self, x: AffineWeylElt, w: AffineWeylElt) -> bool:
        """Bruhat order via the lifting property.

        If ``s`` is a left descent of ``w`` then ``x <= w`` iff
        ``min(x, s x) <= s w``.
        """
        key = (x, w)
        hit = self._leq.get(key)
        if hit is not None:
            return hit
        lx, lw = self.length(x), self.length(w)
        if lx >= lw:
            res = x == w
        elif lx == 0:
            res = True
        else:
            s = self.first_left_descent(w)
            sx = self.lmul(s, x)
            res = self.bruhat_leq(sx if self.length(sx) < lx else x, self.lmul(s, w))
        self._leq[key] = res
        return res

    def bruhat_lt(self, x: AffineWeylElt, w: AffineWeylElt) -> bool:
        return x != w and self.bruhat_leq(x, w)

    def lower_interval(self, w: AffineWeylElt) -> frozenset:
        """``{x : x <= w}`` via ``[e, w] = [e, sw] u s[e, sw]`` for a left descent ``s``."""
        hit = self._lower.get(w)
        if hit is not None:
            return hit
        chain = []
        cur = w
        while cur not in self._lower and self.length(cur) > 0:
            s = self.first_left_descent(cur)
            chain.append((cur, s))
            cur = self.lmul(s, cur)
        below = self._lower.get(cur, frozenset([self.identity]))
        self._lower.setdefault(cur, below)
        for elt, s in reversed(chain):
            below = below | frozenset(self.lmul(s, x) for x in below)
            self._lower[elt] = below
        return below

    def sorted_lower_interval(self, w: AffineWeylElt) -> list[AffineWeylElt]:
        return sorted(self.lower_interval(w), key=self.sort_key)

    def left_inversion_reflections(self, a: AffineWeylElt) -> list[tuple[int, int]]:
        """Pairs ``(root_index, n)`` with ``H_{alpha,n}`` separating ``A+`` from ``A_a``."""
        out = []
        h = self.h
        for k, val in enumerate(self.coroot_values(a)):
            fl = val // h
            if fl >= 1:
                out.extend((k, n) for n in range(1, fl + 1))
            elif fl < 0:
                out.extend((k, n) for n in range(fl + 1, 1))
        return out

    def interval(self, x: AffineWeylElt, w: AffineWeylElt) -> list[AffineWeylElt]:
        """The Bruhat interval ``[x, w]``, found by walking down covers from ``w``."""
        if not self.bruhat_leq(x, w):
            return []
        seen = {w}
        stack = [w]
        while stack:
            z = stack.pop()
            lz = self.length(z)
            if lz == self.length(x):
                continue
            for k, n in self.left_inversion_reflections(z):
                u = self.mul(self.reflection(k, n), z)
                if u not in seen and self.length(u) == lz - 1 and self.bruhat_leq(x, u):
                    seen.add(u)
                    stack.append(u)
        return sorted(seen, key=self.sort_key)

    def elements_up_to_length(self, max_length: int) -> list[AffineWeylElt]:
        layer = [self.identity]
        out = [self.identity]
        for k in range(max_length):
            nxt = {}
            for w in layer:
                for i in range(self.rank + 1):
                    u = self.rmul(w, i)
                    if self.length(u) == k + 1 and u not in nxt:
                        nxt[u] = None
            layer = list(nxt)
            out.extend(layer)
        return sorted(out, key=self.sort_key)

    # -- dot action and restricted sets ------------------------------------------

    def dot_action(self, a: AffineWeylElt, weight: Sequence[int], p: int) -> tuple[int, ...]:
        """``w . lambda = w_bar(lambda + rho) + p eta - rho`` (translations scaled by p)."""
        if p < 2:
            raise ValueError("p must be at least 2")
        rho = self.datum.rho
        shifted = _matvec(a.linear, tuple(x + r for x, r in zip(weight, rho)))
        return tuple(s + p * t - r for s, t, r in zip(shifted, a.translation, rho))

    def element_of_dot_orbit_point(self, weight: Sequence[int], p: int) -> AffineWeylElt | None:
        """The unique ``z`` with ``z . 0 = weight`` (p >= h), or ``None``."""
        rho = self.datum.rho
        point = tuple(Fraction(x + r, p) for x, r in zip(weight, rho))
        z = self.alcove_of_point(point)
        if z is None or self.dot_action(z, (0,) * self.rank, p) != tuple(weight):
            return None
        return z

    def box_sets(self) -> BoxSets:
        res_plus = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for w in frontier:
                for i in range(self.rank + 1):
                    u = self.rmul(w, i)
                    if u not in res_plus and self.in_box(u):
                        res_plus.add(u)
                        nxt.append(u)
            frontier = nxt
        w0 = self.w0()
        res_minus = [self.mul(w0, w) for w in res_plus]
        top = max(self.length(w) for w in res_minus)
        longest = [w for w in res_minus if self.length(w) == top]
        if len(longest) != 1:
            raise RuntimeError("antidominant restricted set has no unique longest element")
        w0_hat = longest[0]
        circ = self.sorted_lower_interval(w0_hat)
        circ_plus = [w for w in circ if self.in_dominant_cone(w)]
        return BoxSets(
            res_plus=tuple(sorted(res_plus, key=self.sort_key)),
            res_minus=tuple(sorted(res_minus, key=self.sort_key)),
            w0_hat=w0_hat,
            circ=tuple(circ),
            circ_plus=tuple(circ_plus),
        )

    # -- reflections ---------------------------------------------------------------

    def affine_coroot(self, root_index: int, level: int) -> tuple[int, ...]:
        """``alpha^vee_n = (alpha^vee, -n)``."""
        return tuple(self.datum.positive_coroots[root_index]) + (-level,)

    def reflections_between(self, bound: AffineWeylElt) -> list[ReflectionEdge]:
        """All ``(x, s_{alpha,n} x)`` with both ends in ``[e, bound]``, lower end first."""
        verts = self.lower_interval(bound)
        cap = self.length(bound)
        h = self.h
        edges = []
        for x in sorted(verts, key=self.sort_key):
            lx = self.length(x)
            for k, val in enumerate(self.coroot_values(x)):
                # the image value 2n - val/h must satisfy |floor(.)| <= cap
                lo = -((cap * h - val) // (2 * h)) - 1
                hi = (val + (cap + 1) * h) // (2 * h) + 1
                for n in range(lo, hi + 1):
                    y = self.mul(self.reflection(k, n), x)
                    if y in verts and self.length(y) > lx:
                        edges.append(ReflectionEdge(x, y, k, n, self.affine_coroot(k, n)))
        edges.sort(key=lambda e: (self.sort_key(e.lower), self.sort_key(e.upper)))
        return edges
