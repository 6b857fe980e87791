"""Persistence modules over a finite poset and their morphisms.

A module stores one dimension per element and one exact matrix per Hasse cover;
the map for a general pair a <= b is composed along a canonical cover path
(validated path-independence makes any path equivalent, the canonical one keeps
outputs reproducible).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exactlin import FieldSpec, Mat, image_basis, kernel_basis, rref, solve
from .poset import FinitePoset, OrderMap, PosetError

__all__ = [
    "PersistenceModule",
    "ModuleMorphism",
    "ModuleReport",
    "validate_module",
    "interval_module",
    "zero_module",
    "direct_sum",
    "pullback_module",
    "hom_basis",
    "is_isomorphic",
    "IsoResult",
]


class PersistenceModule:
    """A functor from a finite poset to vector spaces, stored on Hasse covers."""

    __slots__ = ("poset", "field", "dims", "maps", "_pair_maps", "_key")

    def __init__(self, poset: FinitePoset, fieldspec: FieldSpec, dims: Sequence[int],
                 maps: Dict[Tuple[int, int], Mat]):
        self.poset = poset
        self.field = fieldspec
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != len(poset):
            raise ValueError("one dimension per poset element required")
        if any(d < 0 for d in self.dims):
            raise ValueError("dimensions must be nonnegative")
        full = {}
        for (a, b) in poset.covers:
            m = maps.get((a, b))
            if m is None:
                m = Mat.zeros(fieldspec, self.dims[b], self.dims[a])
            full[(a, b)] = m
        self.maps = full
        self._pair_maps: Dict[Tuple[int, int], Mat] = {}
        self._key = None

    def dim(self, e: str) -> int:
        return self.dims[self.poset.idx(e)]

    def total_dim(self) -> int:
        return sum(self.dims)

    def map_for_idx(self, a: int, b: int) -> Mat:
        """M(a <= b), composed along the canonical (smallest-next-index) cover path."""
        if not self.poset.leq[a, b]:
            raise PosetError(f"{self.poset.elements[a]!r} is not below {self.poset.elements[b]!r}")
        if a == b:
            return Mat.eye(self.field, self.dims[a])
        cached = self._pair_maps.get((a, b))
        if cached is not None:
            return cached
        step = None
        for (lo, hi) in self.poset.covers:
            if lo == a and self.poset.leq[hi, b]:
                step = hi
                break
        assert step is not None, "cover path must exist for a strict relation"
        out = self.map_for_idx(step, b) @ self.maps[(a, step)]
        self._pair_maps[(a, b)] = out
        return out

    def map_for(self, a: str, b: str) -> Mat:
        return self.map_for_idx(self.poset.idx(a), self.poset.idx(b))

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                self.poset.key(),
                self.field,
                self.dims,
                tuple(sorted((c, self.maps[c].entries()) for c in self.maps)),
            )
        return self._key

    def __repr__(self):
        return f"PersistenceModule(dims={list(self.dims)})"


@dataclass
class ModuleReport:
    valid: bool
    shape_violations: List[tuple] = field(default_factory=list)
    commutativity_violations: List[tuple] = field(default_factory=list)


def validate_module(m: PersistenceModule) -> ModuleReport:
    """Check cover-map shapes and path-independence for every comparable pair.

    Path-independence is verified by a first-branch scan: for each pair a < b,
    the composites over all covers a < mid <= b must agree; inductively this
    pins down every cover path.
    """
    P = m.poset
    shape_bad = []
    for (a, b), mat in m.maps.items():
        want = (m.dims[b], m.dims[a])
        if (mat.rows, mat.cols) != want:
            shape_bad.append((P.elements[a], P.elements[b], want, (mat.rows, mat.cols)))
    if shape_bad:
        return ModuleReport(valid=False, shape_violations=shape_bad)
    comm_bad = []
    for a, b in P.comparable_pairs():
        if a == b:
            continue
        composites = []
        for (lo, hi) in P.covers:
            if lo == a and P.leq[hi, b]:
                composites.append((hi, m.map_for_idx(hi, b) @ m.maps[(a, hi)]))
        for (h1, c1), (h2, c2) in zip(composites, composites[1:]):
            if c1 != c2:
                comm_bad.append((P.elements[a], P.elements[b], P.elements[h1], P.elements[h2]))
    return ModuleReport(valid=not comm_bad, commutativity_violations=comm_bad)


def zero_module(poset: FinitePoset, fieldspec: FieldSpec) -> PersistenceModule:
    return PersistenceModule(poset, fieldspec, [0] * len(poset), {})


def interval_module(poset: FinitePoset, J: Iterable[str], fieldspec: FieldSpec) -> PersistenceModule:
    """The module k_J for a convex subset J: dimension one on J with identity maps."""
    jdx = {poset.idx(e) for e in J}
    for x, z in itertools.product(sorted(jdx), repeat=2):
        if poset.leq[x, z]:
            for y in poset.interval_idx(x, z):
                if y not in jdx:
                    raise PosetError(
                        f"subset not convex: {poset.elements[x]!r} <= {poset.elements[y]!r}"
                        f" <= {poset.elements[z]!r} but the middle element is missing"
                    )
    dims = [1 if i in jdx else 0 for i in range(len(poset))]
    maps = {}
    for (a, b) in poset.covers:
        if a in jdx and b in jdx:
            maps[(a, b)] = Mat.eye(fieldspec, 1)
    return PersistenceModule(poset, fieldspec, dims, maps)


def direct_sum(m: PersistenceModule, n: PersistenceModule) -> PersistenceModule:
    if m.poset.key() != n.poset.key() or m.field != n.field:
        raise ValueError("direct sum requires the same poset and field")
    dims = [dm + dn for dm, dn in zip(m.dims, n.dims)]
    maps = {}
    for (a, b) in m.poset.covers:
        out = Mat.zeros(m.field, dims[b], dims[a])
        ma, na = m.maps[(a, b)], n.maps[(a, b)]
        out.a[: ma.rows, : ma.cols] = ma.a
        out.a[ma.rows :, ma.cols :] = na.a
        maps[(a, b)] = out
    return PersistenceModule(m.poset, m.field, dims, maps)


def pullback_module(f: OrderMap, m: PersistenceModule) -> PersistenceModule:
    """(f*M)(x) = M(f(x)); source covers pick up the composed target maps."""
    if m.poset.key() != f.target.key():
        raise PosetError("module must live on the target of f")
    Q = f.source
    dims = [m.dims[f.apply_idx(i)] for i in range(len(Q))]
    maps = {}
    for (a, b) in Q.covers:
        maps[(a, b)] = m.map_for_idx(f.apply_idx(a), f.apply_idx(b))
    return PersistenceModule(Q, m.field, dims, maps)


class ModuleMorphism:
    """A natural transformation: one matrix per element, commuting with the structure maps."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: PersistenceModule, target: PersistenceModule,
                 components: Sequence[Mat], check: bool = True):
        self.source = source
        self.target = target
        self.components = tuple(components)
        if len(self.components) != len(source.poset):
            raise ValueError("one component per element required")
        for i, c in enumerate(self.components):
            if (c.rows, c.cols) != (target.dims[i], source.dims[i]):
                raise ValueError(
                    f"component at {source.poset.elements[i]!r} has shape "
                    f"{(c.rows, c.cols)}, expected {(target.dims[i], source.dims[i])}"
                )
        if check:
            bad = self.naturality_violations()
            if bad:
                raise ValueError(f"naturality fails on cover {bad[0]}")

    def naturality_violations(self) -> List[Tuple[str, str]]:
        bad = []
        P = self.source.poset
        for (a, b) in P.covers:
            lhs = self.target.maps[(a, b)] @ self.components[a]
            rhs = self.components[b] @ self.source.maps[(a, b)]
            if lhs != rhs:
                bad.append((P.elements[a], P.elements[b]))
        return bad

    def component(self, e: str) -> Mat:
        return self.components[self.source.poset.idx(e)]

    def compose(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """self after other."""
        if other.target is not self.source and other.target.key() != self.source.key():
            raise ValueError("composition source/target mismatch")
        comps = [self.components[i] @ other.components[i] for i in range(len(self.components))]
        return ModuleMorphism(other.source, self.target, comps, check=False)

    def __add__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        comps = [a + b for a, b in zip(self.components, other.components)]
        return ModuleMorphism(self.source, self.target, comps, check=False)

    def __sub__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        comps = [a - b for a, b in zip(self.components, other.components)]
        return ModuleMorphism(self.source, self.target, comps, check=False)

    def scale(self, x) -> "ModuleMorphism":
        return ModuleMorphism(self.source, self.target,
                              [c.scale(x) for c in self.components], check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleMorphism):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    def __hash__(self):
        raise TypeError("unhashable")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_iso(self) -> bool:
        return all(c.rows == c.cols and rref(c).rank == c.rows for c in self.components)

    def is_mono(self) -> bool:
        return all(rref(c).rank == c.cols for c in self.components)

    def is_epi(self) -> bool:
        return all(rref(c).rank == c.rows for c in self.components)

    @staticmethod
    def identity(m: PersistenceModule) -> "ModuleMorphism":
        return ModuleMorphism(m, m, [Mat.eye(m.field, d) for d in m.dims], check=False)

    @staticmethod
    def zero(m: PersistenceModule, n: PersistenceModule) -> "ModuleMorphism":
        return ModuleMorphism(m, n, [Mat.zeros(m.field, dn, dm) for dm, dn in zip(m.dims, n.dims)],
                              check=False)

    def __repr__(self):
        return f"ModuleMorphism({list(self.source.dims)} -> {list(self.target.dims)})"


def _component_offsets(m: PersistenceModule, n: PersistenceModule) -> List[Tuple[int, int]]:
    offsets = []
    pos = 0
    for i in range(len(m.poset)):
        size = n.dims[i] * m.dims[i]
        offsets.append((pos, size))
        pos += size
    return offsets


def hom_basis(m: PersistenceModule, n: PersistenceModule) -> List[ModuleMorphism]:
    """Deterministic basis of the space of natural transformations m => n.

    Solves the stacked linear system of cover naturality equations; for valid
    modules cover naturality implies naturality on all pairs.
    """
    if m.poset.key() != n.poset.key() or m.field != n.field:
        raise ValueError("hom requires the same poset and field")
    P, F = m.poset, m.field
    offsets = _component_offsets(m, n)
    total = offsets[-1][0] + offsets[-1][1] if offsets else 0
    rows = []
    for (a, b) in P.covers:
        nm, mm = n.maps[(a, b)], m.maps[(a, b)]
        eqs = nm.rows * m.dims[a]
        if eqs == 0:
            continue
        block = Mat.zeros(F, eqs, total)
        # vec(N(a<=b) f(a)) - vec(f(b) M(a<=b)) = 0 with row-major vec
        oa, sa = offsets[a]
        ob, sb = offsets[b]
        for r in range(nm.rows):
            for c in range(m.dims[a]):
                eq = r * m.dims[a] + c
                for k in range(n.dims[a]):
                    block.a[eq, oa + k * m.dims[a] + c] = nm.a[r, k]
                for k in range(m.dims[b]):
                    v = -mm.a[k, c]
                    block.a[eq, ob + r * m.dims[b] + k] = v % F.p if F.is_prime_field else v
        rows.append(block)
    if rows:
        from .exactlin import vstack

        system = vstack(F, rows, cols=total)
    else:
        system = Mat.zeros(F, 0, total)
    kern = kernel_basis(system)
    basis = []
    for j in range(kern.cols):
        comps = []
        for i in range(len(P)):
            oa, sa = offsets[i]
            comp = Mat.zeros(F, n.dims[i], m.dims[i])
            if sa:
                comp.a[:, :] = kern.a[oa : oa + sa, j].reshape(n.dims[i], m.dims[i])
            comps.append(comp)
        basis.append(ModuleMorphism(m, n, comps, check=False))
    return basis


def morphism_from_coeffs(basis: List[ModuleMorphism], coeffs: Sequence) -> ModuleMorphism:
    out = basis[0].scale(coeffs[0])
    for b, c in zip(basis[1:], coeffs[1:]):
        out = out + b.scale(c)
    return out


class SubmoduleError(ValueError):
    pass


@dataclass
class Submodule:
    """A pointwise-spanned submodule: per-element column bases inside the parent,
    the abstract module they carry, and the inclusion morphism."""

    parent: PersistenceModule
    bases: Tuple[Mat, ...]
    module: PersistenceModule
    incl: ModuleMorphism

    def dim(self, i: int) -> int:
        return self.bases[i].cols

    def contains(self, other: "Submodule") -> bool:
        return all(
            solve(self.bases[i], other.bases[i]) is not None
            for i in range(len(self.bases))
        )


def submodule_from_bases(parent: PersistenceModule, bases: Sequence[Mat]) -> Submodule:
    """Build the submodule spanned pointwise by `bases`; raises if the spans are
    not closed under the structure maps.  Bases are canonicalized (pivot columns)."""
    P, F = parent.poset, parent.field
    canon = [image_basis(b) for b in bases]
    maps = {}
    for (a, b) in P.covers:
        pushed = parent.maps[(a, b)] @ canon[a]
        w = solve(canon[b], pushed)
        if w is None:
            raise SubmoduleError(
                f"span not closed under the structure map on cover "
                f"({P.elements[a]!r}, {P.elements[b]!r})"
            )
        maps[(a, b)] = w
    module = PersistenceModule(P, F, [c.cols for c in canon], maps)
    incl = ModuleMorphism(module, parent, list(canon), check=False)
    return Submodule(parent, tuple(canon), module, incl)


def submodule_image(f: ModuleMorphism) -> Submodule:
    """im(f) as a submodule of the target (always closed)."""
    return submodule_from_bases(f.target, [image_basis(c) for c in f.components])


def submodule_kernel(f: ModuleMorphism) -> Submodule:
    """ker(f) as a submodule of the source (always closed)."""
    return submodule_from_bases(f.source, [kernel_basis(c) for c in f.components])


def submodule_full(m: PersistenceModule) -> Submodule:
    return submodule_from_bases(m, [Mat.eye(m.field, d) for d in m.dims])


def submodule_zero(m: PersistenceModule) -> Submodule:
    return submodule_from_bases(m, [Mat.zeros(m.field, d, 0) for d in m.dims])


def submodule_sum(s1: Submodule, s2: Submodule) -> Submodule:
    from .exactlin import hstack

    bases = [
        hstack(s1.parent.field, [s1.bases[i], s2.bases[i]], rows=s1.parent.dims[i])
        for i in range(len(s1.bases))
    ]
    return submodule_from_bases(s1.parent, bases)


def submodule_intersection(s1: Submodule, s2: Submodule) -> Submodule:
    """Pointwise intersection of spans (closed whenever both inputs are)."""
    from .exactlin import hstack

    F = s1.parent.field
    bases = []
    for i in range(len(s1.bases)):
        v1, v2 = s1.bases[i], s2.bases[i]
        paired = hstack(F, [v1, -v2], rows=s1.parent.dims[i])
        null = kernel_basis(paired)
        x_part = Mat(F, null.a[: v1.cols, :].copy())
        bases.append(image_basis(v1 @ x_part))
    return submodule_from_bases(s1.parent, bases)


def morphism_preimage(f: ModuleMorphism, target_sub: Submodule) -> Submodule:
    """The preimage f^{-1}(target_sub) as a submodule of f.source (always closed)."""
    from .exactlin import quotient_map

    F = f.source.field
    bases = []
    for i in range(len(f.source.poset)):
        q, _ = quotient_map(F, f.target.dims[i], target_sub.bases[i])
        bases.append(kernel_basis(q @ f.components[i]))
    return submodule_from_bases(f.source, bases)


def _factor_through_surjection(q: Mat, rhs: Mat) -> Mat:
    """Unique X with X @ q = rhs, for surjective q."""
    sol = solve(q.T, rhs.T)
    if sol is None:
        raise SubmoduleError("map does not factor through the quotient")
    return sol.T


def quotient_by_submodule(big: Submodule, small: Submodule) -> Tuple[PersistenceModule, ModuleMorphism]:
    """The quotient module big/small (small must sit inside big) and the
    projection big.module -> quotient."""
    from .exactlin import quotient_map

    F = big.parent.field
    P = big.parent.poset
    projs = []
    dims = []
    for i in range(len(P)):
        inside = solve(big.bases[i], small.bases[i])
        if inside is None:
            raise SubmoduleError(
                f"submodule containment fails at {P.elements[i]!r}"
            )
        q, d = quotient_map(F, big.bases[i].cols, inside)
        projs.append(q)
        dims.append(d)
    maps = {}
    for (a, b) in P.covers:
        rhs = projs[b] @ big.module.maps[(a, b)]
        maps[(a, b)] = _factor_through_surjection(projs[a], rhs)
    quot = PersistenceModule(P, F, dims, maps)
    proj = ModuleMorphism(big.module, quot, projs, check=False)
    return quot, proj


@dataclass
class IsoResult:
    verdict: str  # "yes" | "no" | "unknown"
    witness: Optional[ModuleMorphism] = None


def is_isomorphic(m: PersistenceModule, n: PersistenceModule, budget: int = 1 << 20,
                  seed: int = 0) -> IsoResult:
    """Search for an isomorphism m ~ n.

    Over GF(p) the Hom space is enumerated exhaustively (up to `budget`
    candidates, lexicographic coefficient order), so "no" is a proof.  Over the
    rationals only a bounded integer lattice of coefficients is tried and the
    failure verdict is "unknown".
    """
    if m.poset.key() != n.poset.key() or m.field != n.field:
        raise ValueError("isomorphism test requires the same poset and field")
    if m.dims != n.dims:
        return IsoResult("no")
    if m.total_dim() == 0:
        return IsoResult("yes", ModuleMorphism.zero(m, n))
    basis = hom_basis(m, n)
    h = len(basis)
    if h == 0:
        return IsoResult("no")
    order = sorted(range(len(m.dims)), key=lambda i: (-m.dims[i], i))
    check_order = [i for i in order if m.dims[i] > 0]

    def try_coeffs(coeffs) -> Optional[ModuleMorphism]:
        cand = morphism_from_coeffs(basis, coeffs)
        for i in check_order:
            c = cand.components[i]
            if rref(c).rank != c.rows:
                return None
        return cand

    if m.field.is_prime_field:
        p = m.field.p
        count = 0
        exhausted = True
        for coeffs in itertools.product(range(p), repeat=h):
            count += 1
            if count > budget:
                exhausted = False
                break
            cand = try_coeffs(coeffs)
            if cand is not None:
                return IsoResult("yes", cand)
        return IsoResult("no" if exhausted else "unknown")
    rng = np.random.default_rng(seed)
    for trial in range(min(budget, 4096)):
        if trial < 1:
            coeffs = [Fraction(1)] * h
        else:
            coeffs = [Fraction(int(rng.integers(-3, 4))) for _ in range(h)]
        cand = try_coeffs(coeffs)
        if cand is not None:
            return IsoResult("yes", cand)
    return IsoResult("unknown")
