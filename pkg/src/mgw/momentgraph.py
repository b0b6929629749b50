"""Moment graphs, their structure algebra, and the affine moment graph.

The symmetric algebra ``S`` on ``k^{rank+1}`` is graded with the variables in
degree 2, so ``S_{2i}`` has the degree-``i`` monomials as a basis.  Monomials
are exponent tuples ordered degree-lexicographically (descending), which fixes
every matrix built here.

Edge labels of the affine graph are affine coroots ``(alpha^vee, -n)``, the
last coordinate pairing with the extra variable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .affine import AffineWeylElt, AffineWeylGroup
from .linalg import Field
from .report import CheckReport


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of total degree ``degree``, descending lex order.

    >>> monomials(2, 2)
    ((2, 0), (1, 1), (0, 2))
    """
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


class GradedRing:
    """Matrices describing ``S`` and its quotients ``S / alpha S`` degree by degree.

    A quotient ``S / alpha S`` is identified with the polynomial ring in the
    variables other than ``x_j``, where ``j`` is the lowest index with a
    nonzero coefficient in ``alpha``; ``x_j`` is eliminated using ``alpha = 0``.
    """

    def __init__(self, fld: Field, nvars: int):
        self.field = fld
        self.nvars = nvars
        self._red: dict = {}
        self._qmul: dict = {}

    def dim(self, i: int) -> int:
        """``dim S_{2i}``."""
        return len(monomials(self.nvars, i)) if i >= 0 else 0

    def quotient_dim(self, i: int) -> int:
        return len(monomials(self.nvars - 1, i)) if i >= 0 else 0

    def eliminated(self, label: Sequence) -> int:
        for j, a in enumerate(label):
            if not self.field.is_zero_scalar(a):
                return j
        raise ValueError("zero label has no quotient")

    def _quotient_monomials(self, label, i):
        j = self.eliminated(label)
        return [m[:j] + (0,) + m[j:] for m in monomials(self.nvars - 1, i)], j

    def reduction(self, label: Sequence, i: int):
        """Matrix of ``S_{2i} -> (S / alpha S)_{2i}``."""
        key = (tuple(label), i)
        hit = self._red.get(key)
        if hit is not None:
            return hit
        fld = self.field
        qmons, j = self._quotient_monomials(label, i)
        qindex = {m: k for k, m in enumerate(qmons)}
        # x_j = sum_k c_k x_k modulo alpha
        lin = {k: fld.div(-label[k], label[j])
               for k in range(self.nvars) if k != j and not fld.is_zero_scalar(label[k])}
        rows = []
        for m in monomials(self.nvars, i):
            poly = {m[:j] + (0,) + m[j + 1:]: fld.reduce(1)}
            for _ in range(m[j]):
                nxt: dict = {}
                for mono, c in poly.items():
                    for k, ck in lin.items():
                        t = list(mono)
                        t[k] += 1
                        t = tuple(t)
                        nxt[t] = nxt.get(t, 0) + c * ck
                poly = nxt
            row = [0] * len(qmons)
            for mono, c in poly.items():
                row[qindex[mono]] += c
            rows.append(row)
        mat = fld.matrix(rows, len(qmons))
        self._red[key] = mat
        return mat

    def multiplication(self, var: int, i: int):
        """Matrix of ``x_var: S_{2i} -> S_{2i+2}``."""
        idx = _monomial_index(self.nvars, i + 1)
        rows = []
        for m in monomials(self.nvars, i):
            t = list(m)
            t[var] += 1
            row = [0] * len(idx)
            row[idx[tuple(t)]] = 1
            rows.append(row)
        return self.field.matrix(rows, len(idx))

    def quotient_multiplication(self, label: Sequence, var: int, i: int):
        """Matrix of ``x_var`` on ``(S / alpha S)_{2i} -> (S / alpha S)_{2i+2}``."""
        key = (tuple(label), var, i)
        hit = self._qmul.get(key)
        if hit is not None:
            return hit
        fld = self.field
        qmons, _ = self._quotient_monomials(label, i)
        idx = _monomial_index(self.nvars, i)
        lift = fld.matrix([[int(idx[m] == k) for k in range(len(idx))] for m in qmons], len(idx))
        mat = fld.mul(fld.mul(lift, self.multiplication(var, i)), self.reduction(label, i + 1))
        self._qmul[key] = mat
        return mat


@dataclass(frozen=True)
class Edge:
    lower: object
    upper: object
    label: tuple[int, ...]


@dataclass
class MomentGraph:
    """Vertices with a partial order and labelled edges between comparable vertices.

    For the affine graph the vertices are group elements and the order is
    the Bruhat order; the generic constructor takes any order oracle.
    """

    field: Field
    vertices: list
    edges: list[Edge]
    leq: Callable
    rank_vars: int
    render: Callable = str
    length: Callable | None = None
    up_edges: dict = field(default_factory=dict)
    down_edges: dict = field(default_factory=dict)

    def __post_init__(self):
        vs = set(self.vertices)
        seen = set()
        for e in self.edges:
            if e.lower == e.upper:
                raise ValueError("moment graphs have no loops")
            pair = frozenset((e.lower, e.upper))
            if pair in seen:
                raise ValueError("moment graphs have no double edges")
            seen.add(pair)
            if e.lower not in vs or e.upper not in vs:
                raise ValueError("edge endpoint outside the vertex set")
            if not self.leq(e.lower, e.upper):
                raise ValueError("edge endpoints must be comparable with lower <= upper")
            if len(e.label) != self.rank_vars or all(self.field.is_zero_scalar(a) for a in e.label):
                raise ValueError(f"label {e.label} vanishes in {self.field.name}")
        self.up_edges = {v: [] for v in self.vertices}
        self.down_edges = {v: [] for v in self.vertices}
        for e in self.edges:
            self.up_edges[e.lower].append(e)
            self.down_edges[e.upper].append(e)

    def incident(self, v) -> list[Edge]:
        return self.down_edges[v] + self.up_edges[v]

    def full_subgraph(self, keep) -> "MomentGraph":
        keep = set(keep)
        return MomentGraph(
            self.field,
            [v for v in self.vertices if v in keep],
            [e for e in self.edges if e.lower in keep and e.upper in keep],
            self.leq,
            self.rank_vars,
            self.render,
            self.length,
        )

    def to_dot(self) -> str:
        lines = ["graph moment {"]
        names = {v: f"v{i}" for i, v in enumerate(self.vertices)}
        for v in self.vertices:
            lines.append(f'  {names[v]} [label="{self.render(v)}"];')
        for e in self.edges:
            lab = ",".join(str(a) for a in e.label)
            lines.append(f'  {names[e.lower]} -- {names[e.upper]} [label="({lab})"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {
            "field": self.field.name,
            "vertices": [self.render(v) for v in self.vertices],
            "edges": [
                {"lower": self.render(e.lower), "upper": self.render(e.upper), "label": list(e.label)}
                for e in self.edges
            ],
        }


def build_affine_graph(group: AffineWeylGroup, bound: AffineWeylElt, fld: Field) -> MomentGraph:
    """The affine moment graph on the Bruhat interval ``[e, bound]`` over ``fld``."""
    verts = group.sorted_lower_interval(bound)
    edges = [Edge(r.lower, r.upper, r.label) for r in group.reflections_between(bound)]
    for e in edges:
        if all(fld.is_zero_scalar(a) for a in e.label):
            raise ValueError(f"label {e.label} vanishes in {fld.name}")
    return MomentGraph(
        fld, verts, edges, group.bruhat_leq, group.rank + 1, group.render, group.length
    )


def _dependent(fld: Field, a, b) -> bool:
    a = [fld.reduce(x) for x in a]
    b = [fld.reduce(x) for x in b]
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            det = a[i] * b[j] - a[j] * b[i]
            if not fld.is_zero_scalar(det):
                return False
    return True


def gkm_check(g: MomentGraph, stop_at_first: bool = True) -> CheckReport:
    """Pairwise linear independence of the labels at every vertex."""
    rep = CheckReport(f"gkm over {g.field.name}", True)
    for v in g.vertices:
        inc = g.incident(v)
        for e1, e2 in itertools.combinations(inc, 2):
            rep.checked += 1
            if _dependent(g.field, e1.label, e2.label):
                rep.passed = False
                rep.mismatches.append({
                    "vertex": g.render(v),
                    "edges": [[g.render(e.lower), g.render(e.upper)] for e in (e1, e2)],
                    "labels": [list(e1.label), list(e2.label)],
                })
                if stop_at_first:
                    return rep
    return rep


class StructureStalks:
    """Every stalk is ``S`` and every edge map is the quotient ``S -> S / alpha S``."""

    def __init__(self, ring: GradedRing):
        self.ring = ring

    def stalk_dim(self, v, d: int) -> int:
        return self.ring.dim(d // 2)

    def edge_dim(self, e: Edge, d: int) -> int:
        return self.ring.quotient_dim(d // 2)

    def edge_maps(self, e: Edge, d: int):
        r = self.ring.reduction(e.label, d // 2)
        return r, r


@dataclass
class SectionSpace:
    vertices: list
    degree_bound: int
    offsets: dict  # degree -> {vertex: column offset}
    bases: dict  # degree -> matrix whose rows are sections
    dims: dict

    def dim(self, d: int) -> int:
        return self.dims[d]


def _congruence_matrix(g: MomentGraph, verts, d, stalks, fld):
    offsets = {}
    total = 0
    for v in verts:
        offsets[v] = total
        total += stalks.stalk_dim(v, d)
    vs = set(verts)
    blocks = []
    for e in g.edges:
        if e.lower not in vs or e.upper not in vs:
            continue
        lo_map, up_map = stalks.edge_maps(e, d)
        width = stalks.edge_dim(e, d)
        rows = [[0] * width for _ in range(total)]
        for src, mat, sign in ((e.lower, lo_map, 1), (e.upper, up_map, -1)):
            for i, row in enumerate(fld.to_rows(mat)):
                for j, x in enumerate(row):
                    if x:
                        rows[offsets[src] + i][j] += sign * x
        blocks.append(fld.matrix(rows, width))
    if blocks:
        cmat = fld.hstack(blocks, total)
    else:
        cmat = fld.zeros(total, 0)
    return cmat, offsets, total


def sections(g: MomentGraph, vertex_subset=None, degree_bound: int = 0, stalk_data=None) -> SectionSpace:
    """Sections of a sheaf on the full subgraph on ``vertex_subset``, per even degree.

    Solved directly as the left kernel of the congruence map
    ``(m_v) -> (rho_lower(m_x) - rho_upper(m_y))_E``.
    """
    if degree_bound % 2:
        raise ValueError("degree bound must be even")
    fld = g.field
    verts = [v for v in g.vertices if vertex_subset is None or v in set(vertex_subset)]
    stalks = stalk_data or StructureStalks(GradedRing(fld, g.rank_vars))
    offsets, bases, dims = {}, {}, {}
    for d in range(0, degree_bound + 1, 2):
        cmat, offs, total = _congruence_matrix(g, verts, d, stalks, fld)
        if fld.ncols(cmat) == 0:
            basis = fld.identity(total)
        else:
            basis = fld.left_kernel(cmat)
        if fld.nrows(basis) and fld.ncols(cmat) and not fld.is_zero(fld.mul(basis, cmat)):
            raise ArithmeticError("computed section violates a congruence")
        offsets[d] = offs
        bases[d] = basis
        dims[d] = fld.nrows(basis)
    return SectionSpace(verts, degree_bound, offsets, bases, dims)
