"""Finite limits and colimits of module restrictions over subposets.

Colimits are realized as coequalizer quotients of the block direct sum over the
subposet (relations along the subposet's own Hasse covers), limits dually as
equalizer kernels.  `factor_from_colim` / `factor_into_lim` then produce the
unique comparison maps out of / into these objects, which is how every induced
map and canonical transformation downstream is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exactlin import FieldSpec, Mat, hstack, image_basis, kernel_basis, quotient_map, rref, solve, vstack
from .pmod import PersistenceModule
from .poset import Connectivity, FinitePoset, _is_connected_idx

__all__ = [
    "ColimResult",
    "LimResult",
    "colim_over",
    "lim_over",
    "colim_induced",
    "lim_induced",
    "factor_from_colim",
    "factor_into_lim",
    "check_universal",
    "fubini_compare",
    "FubiniReport",
]


@dataclass
class _Diagram:
    """A finite diagram of vector spaces indexed by a subposet: nodes in ambient
    index order, the subposet's own covers, and the matrix along each cover."""

    fieldspec: FieldSpec
    nodes: Tuple[int, ...]
    dims: Dict[int, int]
    covers: List[Tuple[int, int]]
    mat: Callable[[int, int], Mat]


def _module_diagram(m: PersistenceModule, subset: Sequence[int]) -> _Diagram:
    nodes = tuple(sorted(subset))
    return _Diagram(
        fieldspec=m.field,
        nodes=nodes,
        dims={x: m.dims[x] for x in nodes},
        covers=m.poset.subposet_covers(nodes),
        mat=m.map_for_idx,
    )


@dataclass
class ColimResult:
    """colim of a diagram: quotient dimension, projection from the block sum,
    and one leg M(x) -> object per node."""

    fieldspec: FieldSpec
    nodes: Tuple[int, ...]
    offsets: Dict[int, int]
    total: int
    dim: int
    proj: Mat  # dim x total, surjective
    legs: Dict[int, Mat]
    relations: Mat  # total x (#relations); ker(proj) = span(relations)


@dataclass
class LimResult:
    """lim of a diagram: kernel dimension, inclusion into the block sum, and one
    leg object -> M(x) per node."""

    fieldspec: FieldSpec
    nodes: Tuple[int, ...]
    offsets: Dict[int, int]
    total: int
    dim: int
    incl: Mat  # total x dim, injective
    legs: Dict[int, Mat]


def _offsets(diag: _Diagram) -> Tuple[Dict[int, int], int]:
    offs, pos = {}, 0
    for x in diag.nodes:
        offs[x] = pos
        pos += diag.dims[x]
    return offs, pos


def _colim_diagram(diag: _Diagram) -> ColimResult:
    F = diag.fieldspec
    offs, total = _offsets(diag)
    cols = []
    for (x, y) in diag.covers:
        mxy = diag.mat(x, y)
        for k in range(diag.dims[x]):
            col = Mat.zeros(F, total, 1)
            for r in range(mxy.rows):
                col.a[offs[y] + r, 0] = mxy.a[r, k]
            col.a[offs[x] + k, 0] -= F.one()
            if F.is_prime_field:
                col.a %= F.p
            cols.append(col)
    rel = hstack(F, cols, rows=total)
    proj, dim = quotient_map(F, total, rel)
    legs = {x: proj.take_cols(range(offs[x], offs[x] + diag.dims[x])) for x in diag.nodes}
    return ColimResult(F, diag.nodes, offs, total, dim, proj, legs, rel)


def _lim_diagram(diag: _Diagram) -> LimResult:
    F = diag.fieldspec
    offs, total = _offsets(diag)
    rows = []
    for (x, y) in diag.covers:
        mxy = diag.mat(x, y)
        block = Mat.zeros(F, mxy.rows, total)
        block.a[:, offs[x] : offs[x] + mxy.cols] = mxy.a
        for r in range(mxy.rows):
            block.a[r, offs[y] + r] -= F.one()
        if F.is_prime_field:
            block.a %= F.p
        rows.append(block)
    eq = vstack(F, rows, cols=total)
    incl = kernel_basis(eq)
    legs = {
        x: Mat(F, incl.a[offs[x] : offs[x] + diag.dims[x], :].copy())
        for x in diag.nodes
    }
    return LimResult(F, diag.nodes, offs, total, incl.cols, incl, legs)


def colim_over(m: PersistenceModule, subset: Sequence[int]) -> ColimResult:
    """colim of M restricted to the full subposet on `subset` (ambient indices).

    The empty subset yields the zero object.
    """
    return _colim_diagram(_module_diagram(m, subset))


def lim_over(m: PersistenceModule, subset: Sequence[int]) -> LimResult:
    return _lim_diagram(_module_diagram(m, subset))


def factor_from_colim(col: ColimResult, blocks: Dict[int, Mat], target_rows: int) -> Mat:
    """The unique map out of the colimit whose composites with the legs are `blocks`.

    `blocks[x]` must form a cocone; inconsistency raises (it would mean the
    caller's family does not respect the diagram's relations).
    """
    F = col.fieldspec
    stacked = hstack(F, [blocks[x] for x in col.nodes], rows=target_rows)
    sol = solve(col.proj.T, stacked.T)
    if sol is None:
        raise ValueError("family is not a cocone: no factorization through the colimit")
    return sol.T


def factor_into_lim(lim: LimResult, blocks: Dict[int, Mat], source_cols: int) -> Mat:
    """The unique map into the limit whose composites with the legs are `blocks`."""
    F = lim.fieldspec
    stacked = vstack(F, [blocks[x] for x in lim.nodes], cols=source_cols)
    sol = solve(lim.incl, stacked)
    if sol is None:
        raise ValueError("family is not a cone: no factorization through the limit")
    return sol


def colim_induced(m: PersistenceModule, small: Sequence[int], big: Sequence[int],
                  col_small: Optional[ColimResult] = None,
                  col_big: Optional[ColimResult] = None) -> Mat:
    """The comparison map colim M|_small -> colim M|_big for small <= big."""
    s_set, b_set = set(small), set(big)
    if not s_set <= b_set:
        raise ValueError("subset inclusion violated")
    cs = col_small if col_small is not None else colim_over(m, small)
    cb = col_big if col_big is not None else colim_over(m, big)
    return factor_from_colim(cs, {x: cb.legs[x] for x in cs.nodes}, cb.dim)


def lim_induced(m: PersistenceModule, big: Sequence[int], small: Sequence[int],
                lim_big: Optional[LimResult] = None,
                lim_small: Optional[LimResult] = None) -> Mat:
    """The comparison map lim M|_big -> lim M|_small for small <= big."""
    s_set, b_set = set(small), set(big)
    if not s_set <= b_set:
        raise ValueError("subset inclusion violated")
    lb = lim_big if lim_big is not None else lim_over(m, big)
    ls = lim_small if lim_small is not None else lim_over(m, small)
    return factor_into_lim(ls, {x: lb.legs[x] for x in ls.nodes}, lb.dim)


UNIVERSAL_SIZE_CAP = 6


def check_universal(m: PersistenceModule, subset: Sequence[int], candidate) -> bool:
    """Brute-force universal-property oracle for a claimed (co)limit.

    For colimits: the legs must form a cocone, factor uniquely (joint
    surjectivity), and every test cocone built from the standard basis
    functionals must factor.  Dual checks for limits.  Deliberately independent
    of how the candidate was constructed.
    """
    subset = sorted(subset)
    if len(subset) > UNIVERSAL_SIZE_CAP:
        raise ValueError(f"universal-property oracle capped at {UNIVERSAL_SIZE_CAP} elements")
    diag = _module_diagram(m, subset)
    F = diag.fieldspec
    offs, total = _offsets(diag)
    if isinstance(candidate, ColimResult):
        for (x, y) in diag.covers:
            if candidate.legs[y] @ diag.mat(x, y) != candidate.legs[x]:
                return False
        stacked = hstack(F, [candidate.legs[x] for x in diag.nodes], rows=candidate.dim)
        if rref(stacked).rank != candidate.dim:
            return False  # factorizations would not be unique
        rel_cols = []
        for (x, y) in diag.covers:
            mxy = diag.mat(x, y)
            for k in range(diag.dims[x]):
                col = Mat.zeros(F, total, 1)
                for r in range(mxy.rows):
                    col.a[offs[y] + r, 0] = mxy.a[r, k]
                col.a[offs[x] + k, 0] -= F.one()
                if F.is_prime_field:
                    col.a %= F.p
                rel_cols.append(col)
        rel = hstack(F, rel_cols, rows=total)
        test_cocones = kernel_basis(rel.T)  # functionals vanishing on the relations
        for j in range(test_cocones.cols):
            delta = test_cocones.col(j)
            if solve(stacked.T, delta) is None:
                return False
        return True
    if isinstance(candidate, LimResult):
        for (x, y) in diag.covers:
            if diag.mat(x, y) @ candidate.legs[x] != candidate.legs[y]:
                return False
        stacked = vstack(F, [candidate.legs[x] for x in diag.nodes], cols=candidate.dim)
        if rref(stacked).rank != candidate.dim:
            return False
        rows = []
        for (x, y) in diag.covers:
            mxy = diag.mat(x, y)
            block = Mat.zeros(F, mxy.rows, total)
            block.a[:, offs[x] : offs[x] + mxy.cols] = mxy.a
            for r in range(mxy.rows):
                block.a[r, offs[y] + r] -= F.one()
            if F.is_prime_field:
                block.a %= F.p
            rows.append(block)
        eq = vstack(F, rows, cols=total)
        test_cones = kernel_basis(eq)
        for j in range(test_cones.cols):
            if solve(stacked, test_cones.col(j)) is None:
                return False
        return True
    raise TypeError("candidate must be a ColimResult or LimResult")


@dataclass
class FubiniReport:
    comparison: Mat  # iterated colimit -> colim over the union
    iso: bool
    iterated_dim: int
    union_dim: int
    connected_per_point: Dict[int, str]
    all_connected: bool


def fubini_compare(m: PersistenceModule, index_subset: Sequence[int],
                   family: Dict[int, Sequence[int]]) -> FubiniReport:
    """Compare colim_{x in I} colim M|_{F(x)} with colim M|_{union F(x)}.

    `family[x]` must be monotone in x and each value a downset of the union.
    The report carries the canonical comparison map, whether it is an
    isomorphism, and per point q of the union the connectivity of
    {x in I : q in F(x)} (the finality criterion's index sets).
    """
    P = m.poset
    I = tuple(sorted(index_subset))
    F = {x: sorted(set(family[x])) for x in I}
    union = sorted(set().union(*[set(F[x]) for x in I]) if I else set())
    for x in I:
        for y in I:
            if P.leq[x, y] and not set(F[x]) <= set(F[y]):
                raise ValueError(f"family not monotone between {P.elements[x]!r} and {P.elements[y]!r}")
    uset = set(union)
    for x in I:
        fx = set(F[x])
        for q in F[x]:
            for p_ in union:
                if P.leq[p_, q] and p_ not in fx:
                    raise ValueError(f"family value at {P.elements[x]!r} is not a downset of the union")
    col_union = colim_over(m, union)
    inner = {x: colim_over(m, F[x]) for x in I}
    outer_diag = _Diagram(
        fieldspec=m.field,
        nodes=I,
        dims={x: inner[x].dim for x in I},
        covers=P.subposet_covers(I),
        mat=lambda x, y: factor_from_colim(inner[x], {w: inner[y].legs[w] for w in inner[x].nodes},
                                           inner[y].dim),
    )
    outer = _colim_diagram(outer_diag)
    to_union = {
        x: factor_from_colim(inner[x], {w: col_union.legs[w] for w in inner[x].nodes}, col_union.dim)
        for x in I
    }
    comparison = factor_from_colim(outer, to_union, col_union.dim)
    iso = outer.dim == col_union.dim and rref(comparison).rank == col_union.dim
    connected = {}
    for q in union:
        iq = [x for x in I if q in set(F[x])]
        connected[q] = _is_connected_idx(P, iq)
    all_conn = all(v != Connectivity.DISCONNECTED for v in connected.values())
    return FubiniReport(
        comparison=comparison,
        iso=iso,
        iterated_dim=outer.dim,
        union_dim=col_union.dim,
        connected_per_point=connected,
        all_connected=all_conn,
    )
