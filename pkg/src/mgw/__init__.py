"""Exact computations around alcove combinatorics, Kazhdan-Lusztig theory and
Braden-MacPherson sheaves on affine moment graphs."""

from .affine import AffineWeylElt, AffineWeylGroup
from .bmsheaf import BMSheaf, DegreePolicy, build_bm_sheaf, verify_momconj, verify_multiplicity_one
from .characters import CharacterRing, CharElt, TruncatedChar, verify_star
from .hecke import HeckeAlgebra, HeckeElt, KLTable
from .laurent import LaurentPoly
from .linalg import parse_field
from .momentgraph import MomentGraph, build_affine_graph, gkm_check, sections
from .periodic import PeriodicSystem
from .rootdata import RootDatum, build_root_datum, is_dominant, pairing

__version__ = "0.1.0"
