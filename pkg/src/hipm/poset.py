"""Finite posets as index categories: order queries, connectivity, diamond-freeness,
order-preserving maps, and Galois insertions.

Elements are opaque string ids; internal dense indices follow input order, so
every derived object (neighborhoods, bases, reports) is stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "FinitePoset",
    "OrderMap",
    "PosetError",
    "Connectivity",
    "is_connected",
    "check_order_map",
    "check_galois_insertion",
]

MAX_ELEMENTS = 512


class PosetError(ValueError):
    pass


class Connectivity:
    EMPTY = "empty"
    CONNECTED = "connected"
    DISCONNECTED = "disconnected"


class FinitePoset:
    """Immutable finite poset: elements, Hasse covers, and the full order relation.

    `leq` is a dense boolean matrix (leq[i, j] iff element i <= element j), so
    order queries are O(1).  Covers are stored transitively reduced.
    """

    __slots__ = ("elements", "index", "leq", "covers", "coords", "_key")

    def __init__(self, elements: Tuple[str, ...], leq: np.ndarray, covers: Tuple[Tuple[int, int], ...],
                 coords: Optional[Dict[int, Tuple[int, ...]]] = None):
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self.leq = leq
        self.covers = covers
        self.coords = coords
        self._key = None

    # -- construction ---------------------------------------------------

    @staticmethod
    def from_covers(elements: Sequence[str], covers: Iterable[Tuple[str, str]],
                    coords: Optional[Dict[str, Tuple[int, ...]]] = None) -> "FinitePoset":
        elements = tuple(elements)
        n = len(elements)
        if n > MAX_ELEMENTS:
            raise PosetError(f"poset has {n} elements, configured cap is {MAX_ELEMENTS}")
        seen = set()
        for e in elements:
            if e in seen:
                raise PosetError(f"duplicate element id {e!r}")
            seen.add(e)
        index = {e: i for i, e in enumerate(elements)}
        adj = np.zeros((n, n), dtype=bool)
        for lo, hi in covers:
            if lo not in index:
                raise PosetError(f"unknown element id {lo!r} in covers")
            if hi not in index:
                raise PosetError(f"unknown element id {hi!r} in covers")
            if lo == hi:
                raise PosetError(f"self-cover {lo!r}")
            adj[index[lo], index[hi]] = True
        lt = _transitive_closure(adj)
        cyc = lt & lt.T
        if cyc.any():
            i, j = map(int, np.argwhere(cyc)[0])
            raise PosetError(f"cycle detected through {elements[i]!r} and {elements[j]!r}")
        leq = lt | np.eye(n, dtype=bool)
        red = _transitive_reduction(lt)
        cov = tuple(sorted((int(i), int(j)) for i, j in np.argwhere(red)))
        idx_coords = None
        if coords is not None:
            idx_coords = {index[e]: tuple(c) for e, c in coords.items()}
        return FinitePoset(elements, leq, cov, idx_coords)

    @staticmethod
    def grid(shape: Sequence[int]) -> "FinitePoset":
        """Product-order grid {0..s1-1} x ... with elements named v_i_j_... and coords attached."""
        shape = tuple(int(s) for s in shape)
        if any(s < 1 for s in shape):
            raise PosetError("grid shape entries must be >= 1")
        points = list(itertools.product(*[range(s) for s in shape]))
        name = lambda pt: "v_" + "_".join(str(c) for c in pt)
        elements = [name(pt) for pt in points]
        covers = []
        for pt in points:
            for d in range(len(shape)):
                if pt[d] + 1 < shape[d]:
                    nxt = list(pt)
                    nxt[d] += 1
                    covers.append((name(pt), name(tuple(nxt))))
        return FinitePoset.from_covers(elements, covers, coords={name(pt): pt for pt in points})

    @staticmethod
    def chain(elements: Sequence[str]) -> "FinitePoset":
        els = list(elements)
        return FinitePoset.from_covers(els, list(zip(els, els[1:])))

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def idx(self, e: str) -> int:
        try:
            return self.index[e]
        except KeyError:
            raise PosetError(f"unknown element {e!r}") from None

    def le(self, a: str, b: str) -> bool:
        return bool(self.leq[self.idx(a), self.idx(b)])

    def le_idx(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def comparable_pairs(self) -> List[Tuple[int, int]]:
        """All (i, j) with element i <= element j, including i == j, in index order."""
        return [(int(i), int(j)) for i, j in np.argwhere(self.leq)]

    def down_set(self, a: str) -> FrozenSet[str]:
        i = self.idx(a)
        return frozenset(self.elements[j] for j in np.flatnonzero(self.leq[:, i]))

    def up_set(self, a: str) -> FrozenSet[str]:
        i = self.idx(a)
        return frozenset(self.elements[j] for j in np.flatnonzero(self.leq[i, :]))

    def down_idx(self, i: int) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.leq[:, i])]

    def up_idx(self, i: int) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.leq[i, :])]

    def interval_idx(self, i: int, j: int) -> List[int]:
        return [int(z) for z in np.flatnonzero(self.leq[i, :] & self.leq[:, j])]

    def subposet_covers(self, subset_idx: Sequence[int]) -> List[Tuple[int, int]]:
        """Hasse covers of the full subposet on `subset_idx` (its own transitive
        reduction, not the ambient covers restricted)."""
        ix = sorted(subset_idx)
        sub = self.leq[np.ix_(ix, ix)].copy()
        np.fill_diagonal(sub, False)
        red = _transitive_reduction(sub)
        return [(ix[int(i)], ix[int(j)]) for i, j in sorted(map(tuple, np.argwhere(red)))]

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.elements, self.covers)
        return self._key

    def __repr__(self) -> str:
        return f"FinitePoset({len(self.elements)} elements, {len(self.covers)} covers)"


def _transitive_closure(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    reach = adj.copy()
    if n == 0:
        return reach
    step = adj.astype(np.uint8)
    while True:
        nxt = reach | ((reach.astype(np.uint8) @ step) > 0)
        if (nxt == reach).all():
            return reach
        reach = nxt


def _transitive_reduction(lt: np.ndarray) -> np.ndarray:
    # a cover survives iff no intermediate element witnesses it as composite
    if lt.shape[0] == 0:
        return lt.copy()
    via = (lt.astype(np.uint8) @ lt.astype(np.uint8)) > 0
    return lt & ~via


def is_connected(poset: FinitePoset, subset: Iterable[str]) -> str:
    """Connectivity of the comparability graph of the full subposet on `subset`.

    Returns one of Connectivity.EMPTY / CONNECTED / DISCONNECTED; the empty set
    is reported as its own state so callers can treat it as passing.
    """
    ix = sorted(poset.idx(e) for e in subset)
    return _is_connected_idx(poset, ix)


def _is_connected_idx(poset: FinitePoset, ix: Sequence[int]) -> str:
    ix = list(ix)
    if not ix:
        return Connectivity.EMPTY
    pos = {v: k for k, v in enumerate(ix)}
    parent = list(range(len(ix)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations(ix, 2):
        if poset.leq[a, b] or poset.leq[b, a]:
            ra, rb = find(pos[a]), find(pos[b])
            if ra != rb:
                parent[ra] = rb
    root = find(0)
    ok = all(find(k) == root for k in range(len(ix)))
    return Connectivity.CONNECTED if ok else Connectivity.DISCONNECTED


def is_diamond_free(poset: FinitePoset) -> bool:
    """True iff every interval [a, b] is a chain.

    Equivalent test: no incomparable pair has both a common lower and a common
    upper bound (such a pair together with those bounds spans a non-chain
    interval, and conversely).
    """
    n = len(poset)
    if n == 0:
        return True
    L = poset.leq.astype(np.uint8)
    common_lower = (L.T @ L) > 0  # [x,y]: exists z <= x and z <= y
    common_upper = (L @ L.T) > 0  # [x,y]: exists z >= x and z >= y
    incomparable = ~(poset.leq | poset.leq.T)
    return not bool((incomparable & common_lower & common_upper).any())


@dataclass(frozen=True)
class OrderMap:
    """A map between posets given by an element-to-element assignment."""

    source: FinitePoset
    target: FinitePoset
    assignment: Dict[str, str]

    def __post_init__(self):
        for e in self.source.elements:
            if e not in self.assignment:
                raise PosetError(f"assignment missing source element {e!r}")
            if self.assignment[e] not in self.target.index:
                raise PosetError(f"assignment sends {e!r} to unknown element {self.assignment[e]!r}")

    def __call__(self, e: str) -> str:
        return self.assignment[e]

    def apply_idx(self, i: int) -> int:
        return self.target.index[self.assignment[self.source.elements[i]]]

    @staticmethod
    def identity(poset: FinitePoset) -> "OrderMap":
        return OrderMap(poset, poset, {e: e for e in poset.elements})

    @staticmethod
    def inclusion(sub: FinitePoset, ambient: FinitePoset) -> "OrderMap":
        return OrderMap(sub, ambient, {e: e for e in sub.elements})

    def compose(self, other: "OrderMap") -> "OrderMap":
        """self after other."""
        if other.target is not self.source and other.target.key() != self.source.key():
            raise PosetError("composition mismatch")
        return OrderMap(other.source, self.target,
                        {e: self.assignment[other.assignment[e]] for e in other.source.elements})


@dataclass
class OrderMapReport:
    preserving: bool
    embedding: Optional[bool]
    preservation_violations: List[Tuple[str, str]] = field(default_factory=list)
    embedding_violations: List[Tuple[str, str]] = field(default_factory=list)


def check_order_map(f: OrderMap, require_embedding: bool = False) -> OrderMapReport:
    """Verify order preservation (always) and optionally the embedding property."""
    pres_bad: List[Tuple[str, str]] = []
    emb_bad: List[Tuple[str, str]] = []
    src, tgt = f.source, f.target
    for i in range(len(src)):
        for j in range(len(src)):
            if src.leq[i, j] and not tgt.leq[f.apply_idx(i), f.apply_idx(j)]:
                pres_bad.append((src.elements[i], src.elements[j]))
    if require_embedding:
        for i in range(len(src)):
            for j in range(len(src)):
                if tgt.leq[f.apply_idx(i), f.apply_idx(j)] and not src.leq[i, j]:
                    emb_bad.append((src.elements[i], src.elements[j]))
    return OrderMapReport(
        preserving=not pres_bad,
        embedding=(not emb_bad) if require_embedding else None,
        preservation_violations=pres_bad,
        embedding_violations=emb_bad,
    )


@dataclass
class GaloisReport:
    valid: bool
    adjunction_violations: List[Tuple[str, str]] = field(default_factory=list)
    embedding_violations: List[Tuple[str, str]] = field(default_factory=list)
    preservation_violations: List[Tuple[str, str]] = field(default_factory=list)


def check_galois_insertion(iota: OrderMap, pi: OrderMap) -> GaloisReport:
    """Check that iota -| pi and iota is an order-embedding.

    The adjunction condition iota(a) <= x  <=>  a <= pi(x) is verified over all
    pairs (a, x); every failing pair is listed.
    """
    if iota.target.key() != pi.source.key() or pi.target.key() != iota.source.key():
        raise PosetError("iota and pi must connect the same pair of posets")
    P, Pp = iota.source, iota.target
    pres = check_order_map(iota).preservation_violations + check_order_map(pi).preservation_violations
    adj_bad: List[Tuple[str, str]] = []
    for a_i in range(len(P)):
        for x_i in range(len(Pp)):
            lhs = Pp.leq[iota.apply_idx(a_i), x_i]
            rhs = P.leq[a_i, pi.apply_idx(x_i)]
            if bool(lhs) != bool(rhs):
                adj_bad.append((P.elements[a_i], Pp.elements[x_i]))
    emb = check_order_map(iota, require_embedding=True).embedding_violations
    return GaloisReport(
        valid=not (adj_bad or emb or pres),
        adjunction_violations=adj_bad,
        embedding_violations=emb,
        preservation_violations=pres,
    )
