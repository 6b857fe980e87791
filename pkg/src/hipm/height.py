"""Height-difference functions on finite posets.

A height-difference function assigns to every comparable pair (a, b) a value in
[0, oo] with rho(a, a) = 0 and rho(a, c) >= rho(a, b) + rho(b, c) along chains.
This module owns the extended-value conventions, r-neighborhoods, the critical
value stratification, distortion, the connected-intersections property, and the
approximate intermediate-value constant.

All values are exact: `fractions.Fraction` or the INF sentinel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .poset import Connectivity, FinitePoset, OrderMap, PosetError, _is_connected_idx

__all__ = [
    "INF",
    "ExtVal",
    "ext_add",
    "abs_diff_inf",
    "parse_ext",
    "format_ext",
    "HeightFunction",
    "HeightDiff",
    "RhoValidation",
    "validate_rho",
    "from_phi",
    "rho_diag",
    "rho_strict",
    "nbhd_down",
    "nbhd_up",
    "nbhd_iterated",
    "critical_values",
    "strata",
    "Stratum",
    "distortion",
    "check_cip",
    "check_ivc",
    "c_rho",
    "pullback_rho",
    "dominates_diagonal",
]


class _Infinity:
    """The single extended value oo; compares above every Fraction."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("hipm-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()
ExtVal = Union[Fraction, _Infinity]


def is_inf(x: ExtVal) -> bool:
    return x is INF


def ext_add(a: ExtVal, b: ExtVal) -> ExtVal:
    if a is INF or b is INF:
        return INF
    return a + b


def abs_diff_inf(a: ExtVal, b: ExtVal) -> ExtVal:
    """|a - b| extended to [0, oo]: 0 if both infinite, oo if exactly one is."""
    ai, bi = a is INF, b is INF
    if ai and bi:
        return Fraction(0)
    if ai or bi:
        return INF
    return abs(a - b)


def parse_ext(s: Union[str, int, Fraction]) -> ExtVal:
    if isinstance(s, _Infinity):
        return s
    if isinstance(s, str) and s.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    v = Fraction(s)
    return v


def format_ext(x: ExtVal) -> str:
    return "inf" if x is INF else str(x)


# ---------------------------------------------------------------------------
# height functions and height-difference functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightFunction:
    """An order-preserving exact-rational map on a poset."""

    poset: FinitePoset
    phi: Dict[str, Fraction]

    def __post_init__(self):
        for e in self.poset.elements:
            if e not in self.phi:
                raise PosetError(f"height value missing for {e!r}")

    def value(self, e: str) -> Fraction:
        return self.phi[e]

    def order_violations(self) -> List[Tuple[str, str]]:
        bad = []
        P = self.poset
        for i, j in P.comparable_pairs():
            if i != j and self.phi[P.elements[i]] > self.phi[P.elements[j]]:
                bad.append((P.elements[i], P.elements[j]))
        return bad


class HeightDiff:
    """A validated height-difference function; values indexed by element indices."""

    __slots__ = ("poset", "values", "_crit", "_key")

    def __init__(self, poset: FinitePoset, values: Dict[Tuple[int, int], ExtVal]):
        self.poset = poset
        self.values = values
        self._crit = None
        self._key = None

    def value(self, a: str, b: str) -> ExtVal:
        return self.values[(self.poset.idx(a), self.poset.idx(b))]

    def value_idx(self, i: int, j: int) -> ExtVal:
        return self.values[(i, j)]

    def key(self) -> tuple:
        if self._key is None:
            items = tuple(sorted((i, j, format_ext(v)) for (i, j), v in self.values.items()))
            self._key = (self.poset.key(), items)
        return self._key

    def __repr__(self):
        return f"HeightDiff(on {len(self.poset)} elements)"


@dataclass
class RhoValidation:
    ok: bool
    rho: Optional[HeightDiff]
    missing_pairs: List[Tuple[str, str]] = field(default_factory=list)
    extra_pairs: List[Tuple[str, str]] = field(default_factory=list)
    diagonal_violations: List[str] = field(default_factory=list)
    negative_violations: List[Tuple[str, str]] = field(default_factory=list)
    superadditivity_violations: List[Tuple[str, str, str]] = field(default_factory=list)


def validate_rho(poset: FinitePoset, table: Dict[Tuple[str, str], ExtVal]) -> RhoValidation:
    """Validate a value table into a HeightDiff, or report every violation.

    The table must cover exactly the comparable pairs; diagonal entries may be
    omitted (they are forced to 0) but must be 0 when present.
    """
    values: Dict[Tuple[int, int], ExtVal] = {}
    missing, extra, diag_bad, neg_bad = [], [], [], []
    comparable = set(poset.comparable_pairs())
    for (a, b), v in table.items():
        ia, ib = poset.idx(a), poset.idx(b)
        if (ia, ib) not in comparable:
            extra.append((a, b))
            continue
        v = parse_ext(v)
        if ia == ib:
            if v != 0:
                diag_bad.append(a)
        elif v is not INF and v < 0:
            neg_bad.append((a, b))
        else:
            values[(ia, ib)] = v
    for i, j in comparable:
        if i == j:
            values[(i, j)] = Fraction(0)
        elif (poset.elements[i], poset.elements[j]) not in table:
            missing.append((poset.elements[i], poset.elements[j]))
    super_bad: List[Tuple[str, str, str]] = []
    if not (missing or extra or diag_bad or neg_bad):
        els = poset.elements
        strict = [(i, j) for i, j in comparable if i != j]
        below: Dict[int, List[int]] = {}
        for i, j in strict:
            below.setdefault(j, []).append(i)
        for i, j in strict:
            target = values[(i, j)]
            for k in below.get(j, ()):
                if k != i and poset.leq[i, k]:
                    if target < ext_add(values[(i, k)], values[(k, j)]):
                        super_bad.append((els[i], els[k], els[j]))
    ok = not (missing or extra or diag_bad or neg_bad or super_bad)
    return RhoValidation(
        ok=ok,
        rho=HeightDiff(poset, values) if ok else None,
        missing_pairs=missing,
        extra_pairs=extra,
        diagonal_violations=diag_bad,
        negative_violations=neg_bad,
        superadditivity_violations=super_bad,
    )


def from_phi(phi: HeightFunction) -> HeightDiff:
    """The height-difference rho(a, b) = phi(b) - phi(a); superadditivity holds with equality."""
    bad = phi.order_violations()
    if bad:
        raise PosetError(f"height function not order-preserving, e.g. on pair {bad[0]}")
    P = phi.poset
    values: Dict[Tuple[int, int], ExtVal] = {}
    for i, j in P.comparable_pairs():
        values[(i, j)] = phi.phi[P.elements[j]] - phi.phi[P.elements[i]]
    return HeightDiff(P, values)


def rho_diag(grid: FinitePoset) -> HeightDiff:
    """The coordinatewise-minimum difference on a product grid: min_i (b_i - a_i)."""
    if grid.coords is None:
        raise PosetError("poset carries no grid coordinates")
    values: Dict[Tuple[int, int], ExtVal] = {}
    for i, j in grid.comparable_pairs():
        ci, cj = grid.coords[i], grid.coords[j]
        values[(i, j)] = Fraction(min(b - a for a, b in zip(ci, cj)))
    return HeightDiff(grid, values)


def rho_strict(poset: FinitePoset) -> HeightDiff:
    """0 on the diagonal and oo on every strict pair; r-neighborhoods for r > 0
    are then the strict down/up sets (the classical latching/matching index sets)."""
    values: Dict[Tuple[int, int], ExtVal] = {}
    for i, j in poset.comparable_pairs():
        values[(i, j)] = Fraction(0) if i == j else INF
    return HeightDiff(poset, values)


def pullback_rho(f: OrderMap, rho: HeightDiff) -> HeightDiff:
    """(f*rho)(q, q') = rho(f(q), f(q')); superadditivity is inherited and
    re-validated on the result."""
    if rho.poset.key() != f.target.key():
        raise PosetError("rho must live on the target of f")
    Q = f.source
    values: Dict[Tuple[int, int], ExtVal] = {}
    for i, j in Q.comparable_pairs():
        values[(i, j)] = rho.value_idx(f.apply_idx(i), f.apply_idx(j))
    table = {(Q.elements[i], Q.elements[j]): v for (i, j), v in values.items()}
    validation = validate_rho(Q, table)
    assert validation.ok, f"pullback broke superadditivity: {validation.superadditivity_violations[:1]}"
    return validation.rho


# ---------------------------------------------------------------------------
# neighborhoods
# ---------------------------------------------------------------------------


def nbhd_down_idx(rho: HeightDiff, i: int, r: Fraction) -> List[int]:
    return [x for x in rho.poset.down_idx(i) if rho.values[(x, i)] >= r]


def nbhd_up_idx(rho: HeightDiff, i: int, r: Fraction) -> List[int]:
    return [y for y in rho.poset.up_idx(i) if rho.values[(i, y)] >= r]


def nbhd_down(rho: HeightDiff, a: str, r) -> frozenset:
    """{x <= a : rho(x, a) >= r}; r = 0 gives the full down set."""
    r = Fraction(r)
    P = rho.poset
    return frozenset(P.elements[x] for x in nbhd_down_idx(rho, P.idx(a), r))


def nbhd_up(rho: HeightDiff, a: str, r) -> frozenset:
    r = Fraction(r)
    P = rho.poset
    return frozenset(P.elements[y] for y in nbhd_up_idx(rho, P.idx(a), r))


def nbhd_iterated_idx(rho: HeightDiff, i: int, s: Fraction, r: Fraction, direction: str) -> List[int]:
    if direction == "down":
        first, second = nbhd_down_idx(rho, i, s), lambda x: nbhd_down_idx(rho, x, r)
    elif direction == "up":
        first, second = nbhd_up_idx(rho, i, r), lambda x: nbhd_up_idx(rho, x, s)
    else:
        raise ValueError("direction must be 'down' or 'up'")
    out = set()
    for x in first:
        out.update(second(x))
    return sorted(out)


def nbhd_iterated(rho: HeightDiff, a: str, s, r, direction: str = "down") -> frozenset:
    """Iterated neighborhood: union of x-neighborhoods over the first hop.

    down: union over x in a^{down_s} of x^{down_r}; always inside a^{down_{s+r}}
    (asserted, a superadditivity consequence).  up dually.
    """
    s, r = Fraction(s), Fraction(r)
    P = rho.poset
    i = P.idx(a)
    out = nbhd_iterated_idx(rho, i, s, r, direction)
    outer = nbhd_down_idx(rho, i, s + r) if direction == "down" else nbhd_up_idx(rho, i, s + r)
    assert set(out) <= set(outer), "iterated neighborhood escaped the (s+r)-neighborhood"
    return frozenset(P.elements[x] for x in out)


# ---------------------------------------------------------------------------
# critical values and strata
# ---------------------------------------------------------------------------


def critical_values(rho: HeightDiff) -> List[Fraction]:
    """Sorted distinct finite values of rho, always including 0.

    Every neighborhood a^{down_r} is constant for r ranging inside a stratum cut
    out by consecutive critical values.
    """
    if rho._crit is None:
        vals = {Fraction(0)}
        for v in rho.values.values():
            if v is not INF:
                vals.add(v)
        rho._crit = sorted(vals)
    return list(rho._crit)


@dataclass(frozen=True)
class Stratum:
    """One constancy interval of r: the point {0}, a half-open (lo, hi], or the
    unbounded tail (lo, oo).  `rep` is the exact representative used for all
    neighborhood computations on the stratum."""

    lo: Fraction
    hi: Optional[Fraction]  # None for the unbounded tail
    rep: Fraction
    kind: str  # "zero" | "interval" | "top"

    def contains(self, r: Fraction) -> bool:
        if self.kind == "zero":
            return r == 0
        if self.kind == "top":
            return r > self.lo
        return self.lo < r <= self.hi


def strata(rho: HeightDiff) -> List[Stratum]:
    crit = critical_values(rho)
    out = [Stratum(Fraction(0), Fraction(0), Fraction(0), "zero")]
    for lo, hi in zip(crit, crit[1:]):
        out.append(Stratum(lo, hi, hi, "interval"))
    top = crit[-1]
    out.append(Stratum(top, None, top + 1, "top"))
    return out


# ---------------------------------------------------------------------------
# distortion
# ---------------------------------------------------------------------------


def distortion(rho1: HeightDiff, rho2: HeightDiff) -> ExtVal:
    """Largest |rho1 - rho2|_oo over comparable pairs (attained; finite posets)."""
    if rho1.poset.key() != rho2.poset.key():
        raise PosetError("distortion requires the same poset")
    best: ExtVal = Fraction(0)
    for pair, v1 in rho1.values.items():
        d = abs_diff_inf(v1, rho2.values[pair])
        if d > best:
            best = d
        if best is INF:
            break
    return best


# ---------------------------------------------------------------------------
# connected intersections property
# ---------------------------------------------------------------------------


@dataclass
class CipReport:
    holds: Optional[bool]  # None when the budget was exhausted
    witness: Optional[Tuple[str, str, Fraction, Fraction]] = None  # (a, q, s, r)
    witness_set: Optional[Tuple[str, ...]] = None
    tests_run: int = 0
    budget_exceeded: bool = False


def check_cip(rho: HeightDiff, budget: int = 4_000_000) -> CipReport:
    """Check that every I_{s,r}(a, q) = a^{down_s} & q^{up_r} is empty or connected.

    (s, r) ranges over the critical stratum representatives, which is exhaustive
    because each neighborhood is constant per stratum.  Aborts with
    budget_exceeded rather than sampling.
    """
    P = rho.poset
    reps = [st.rep for st in strata(rho)]
    n = len(P)
    total = 0
    down_cache: Dict[Tuple[int, Fraction], set] = {}
    up_cache: Dict[Tuple[int, Fraction], set] = {}
    for s in reps:
        for a in range(n):
            down_cache[(a, s)] = set(nbhd_down_idx(rho, a, s))
        for q in range(n):
            up_cache[(q, s)] = set(nbhd_up_idx(rho, q, s))
    for a in range(n):
        for q in range(n):
            for s in reps:
                da = down_cache[(a, s)]
                if not da:
                    continue
                for r in reps:
                    total += 1
                    if total > budget:
                        return CipReport(holds=None, tests_run=total - 1, budget_exceeded=True)
                    inter = da & up_cache[(q, r)]
                    if not inter:
                        continue
                    verdict = _is_connected_idx(P, sorted(inter))
                    if verdict == Connectivity.DISCONNECTED:
                        return CipReport(
                            holds=False,
                            witness=(P.elements[a], P.elements[q], s, r),
                            witness_set=tuple(P.elements[x] for x in sorted(inter)),
                            tests_run=total,
                        )
    return CipReport(holds=True, tests_run=total)


# ---------------------------------------------------------------------------
# approximate intermediate-value property and its constant
# ---------------------------------------------------------------------------


@dataclass
class IvcReport:
    holds: bool
    witness: Optional[Tuple[str, str, Fraction]] = None  # (a, b, uncovered t)


def _ivc_intervals(rho: HeightDiff, ia: int, ib: int, c: Fraction) -> Tuple[List[Tuple[Fraction, Fraction]], Fraction]:
    """Good-t intervals for the pair (ia <= ib) at tolerance c, and the coverage target T.

    Finite rho(a,b) = R: z in [a,b] contributes [max(A,B) - c/2, min(A,B) + c/2]
    where A = rho(a,z), B = R - rho(z,b); target is [0, R].
    Infinite rho(a,b): only z with rho(z,b) = oo and rho(a,z) finite contribute
    [rho(a,z) - c/2, rho(a,z) + c/2]; the target [0, T] with T past every finite
    value plus c is equivalent to the unbounded quantifier.
    """
    P = rho.poset
    R = rho.values[(ia, ib)]
    half = c / 2
    intervals: List[Tuple[Fraction, Fraction]] = []
    if R is not INF:
        target = R
        for z in P.interval_idx(ia, ib):
            A = rho.values[(ia, z)]
            Bz = rho.values[(z, ib)]
            if A is INF or Bz is INF:
                continue  # |.|_oo constraint can never hold against finite t / R - t
            B = R - Bz
            lo = max(A, B) - half
            hi = min(A, B) + half
            if lo <= hi:
                intervals.append((lo, hi))
    else:
        finite = [v for v in rho.values.values() if v is not INF]
        fmax = max(finite) if finite else Fraction(0)
        target = fmax + c + 1
        for z in P.interval_idx(ia, ib):
            A = rho.values[(ia, z)]
            if A is INF:
                continue
            if rho.values[(z, ib)] is not INF:
                continue
            intervals.append((A - half, A + half))
    return intervals, target


def _covers_interval(intervals: List[Tuple[Fraction, Fraction]], target: Fraction) -> Optional[Fraction]:
    """None if the closed intervals cover [0, target]; else an uncovered witness t."""
    clipped = sorted(
        (max(lo, Fraction(0)), min(hi, target))
        for lo, hi in intervals
        if hi >= 0 and lo <= target
    )
    covered = Fraction(0)
    started = False
    for lo, hi in clipped:
        if not started:
            if lo > 0:
                return lo / 2
            started = True
            covered = hi
        else:
            if lo > covered:
                return (covered + lo) / 2
            if hi > covered:
                covered = hi
        if covered >= target:
            return None
    if not started:
        return Fraction(0)
    if covered < target:
        return (covered + target) / 2
    return None


def check_ivc(rho: HeightDiff, c) -> IvcReport:
    """Verify the approximate intermediate-value property at tolerance c.

    For every a <= b and every real t in [0, rho(a,b)], some z in [a,b] must
    satisfy |rho(a,z) - t|_oo <= c/2 and |rho(z,b) - (rho(a,b)-t)|_oo <= c/2;
    the continuum of t is decided by exact interval-union coverage.
    """
    c = Fraction(c)
    if c < 0:
        raise ValueError("tolerance c must be >= 0")
    P = rho.poset
    for ia, ib in P.comparable_pairs():
        if ia == ib:
            continue
        intervals, target = _ivc_intervals(rho, ia, ib, c)
        t = _covers_interval(intervals, target)
        if t is not None:
            return IvcReport(holds=False, witness=(P.elements[ia], P.elements[ib], t))
    return IvcReport(holds=True)


@dataclass
class CRhoResult:
    value: ExtVal
    attained: bool


def c_rho(rho: HeightDiff) -> CRhoResult:
    """The least c for which the intermediate-value property holds.

    The pass set is closed and monotone in c, so the infimum, when finite, is
    attained and lies in the finite breakpoint set generated by the interval
    endpoints; a binary search over those breakpoints finds it exactly.  When a
    strict pair has rho = oo no finite c can pass and the result is oo
    (not attained: the infimum is over an empty set of finite tolerances).
    """
    P = rho.poset
    pairs = [(i, j) for i, j in P.comparable_pairs() if i != j]
    if any(rho.values[p] is INF for p in pairs):
        return CRhoResult(value=INF, attained=False)
    candidates = {Fraction(0)}
    for ia, ib in pairs:
        R = rho.values[(ia, ib)]
        ends = set()
        for z in P.interval_idx(ia, ib):
            A = rho.values[(ia, z)]
            B = R - rho.values[(z, ib)]
            ends.add(A)
            ends.add(B)
        for x in ends:
            candidates.add(2 * abs(x))
            candidates.add(2 * abs(R - x))
        for x, y in itertools.combinations(sorted(ends), 2):
            candidates.add(abs(x - y))
    cand = sorted(candidates)
    lo, hi = 0, len(cand) - 1
    if not check_ivc(rho, cand[hi]).holds:
        return CRhoResult(value=INF, attained=False)
    while lo < hi:
        mid = (lo + hi) // 2
        if check_ivc(rho, cand[mid]).holds:
            hi = mid
        else:
            lo = mid + 1
    return CRhoResult(value=cand[lo], attained=True)


# ---------------------------------------------------------------------------
# diagonal domination on grids
# ---------------------------------------------------------------------------


def dominates_diagonal(rho: HeightDiff, grid: FinitePoset) -> bool:
    """rho(a, a + k*diag) >= k and rho(a - k*diag, a) >= k for every
    grid-representable diagonal step k."""
    if grid.coords is None:
        raise PosetError("diagonal domination needs grid coordinates")
    if rho.poset.key() != grid.key():
        raise PosetError("rho must live on the given grid")
    by_coord = {c: i for i, c in grid.coords.items()}
    for i, c in grid.coords.items():
        k = 1
        while True:
            up = tuple(x + k for x in c)
            if up not in by_coord:
                break
            if rho.values[(i, by_coord[up])] < k:
                return False
            k += 1
        k = 1
        while True:
            dn = tuple(x - k for x in c)
            if dn not in by_coord:
                break
            if rho.values[(by_coord[dn], i)] < k:
                return False
            k += 1
    return True
