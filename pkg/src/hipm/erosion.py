"""Erosion neighborhoods and the erosion-neighborhood distance.

An r-erosion neighborhood of M is a subquotient M1/M2 where M1 contains the
image of L_r M -> M and M2 sits inside the kernel of M -> R_r M.  Two modules
are compared by asking for a common isomorphism class of such subquotients; the
resulting distance lower-bounds the interleaving distance and, under the
connected-intersections property, determines it up to a factor 2 plus the
intermediate-value defect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactlin import FieldSpec, Mat, hstack, image_basis, kernel_basis, rref, solve, vstack
from .height import ExtVal, HeightDiff, INF, Stratum, strata
from .functors import apply_L, apply_R, e_r, eta_L_to_id, eta_R_from_id, erosion_E, im_r, ker_r, sharp, flat
from .interleave import Certificate, InterleaveResult, find_interleaving, DEFAULT_BUDGET
from .pmod import (
    IsoResult,
    ModuleMorphism,
    PersistenceModule,
    Submodule,
    _factor_through_surjection,
    is_isomorphic,
    morphism_preimage,
    quotient_by_submodule,
    submodule_from_bases,
    submodule_full,
    submodule_intersection,
    submodule_sum,
    submodule_zero,
)

__all__ = [
    "Subquotient",
    "en_construct",
    "en_canonical_Q",
    "en_enumerate",
    "EnEnumeration",
    "en_interleaving_certificate",
    "en_mediate",
    "d_en",
    "EnDistanceReport",
]


class ErosionNeighborhoodError(ValueError):
    pass


@dataclass
class Subquotient:
    """M1/M2 with its witnesses: both submodules of the parent, the quotient
    module, and the projection from M1's abstract module."""

    parent: PersistenceModule
    sub1: Submodule
    sub2: Submodule
    quotient: PersistenceModule
    proj: ModuleMorphism
    r: Fraction


def en_construct(rho: HeightDiff, r, m: PersistenceModule,
                 m1: Submodule, m2: Submodule) -> Subquotient:
    """Validate the erosion-neighborhood conditions and form the quotient.

    Needs: m2 <= m1 pointwise, image of the r-latching counit inside m1, and m2
    inside the kernel of the r-matching unit.  Violations name the element.
    """
    r = Fraction(r)
    P = m.poset
    imr = im_r(rho, r, m)
    kerr = ker_r(rho, r, m)
    for i in range(len(P)):
        if solve(m1.bases[i], m2.bases[i]) is None:
            raise ErosionNeighborhoodError(
                f"M2 is not inside M1 at {P.elements[i]!r}")
        if solve(m1.bases[i], imr.bases[i]) is None:
            raise ErosionNeighborhoodError(
                f"latching image not inside M1 at {P.elements[i]!r}")
        if solve(kerr.bases[i], m2.bases[i]) is None:
            raise ErosionNeighborhoodError(
                f"M2 not inside the matching kernel at {P.elements[i]!r}")
    quot, proj = quotient_by_submodule(m1, m2)
    return Subquotient(m, m1, m2, quot, proj, r)


def en_canonical_Q(rho: HeightDiff, r, m: PersistenceModule, n: PersistenceModule,
                   cert: Certificate) -> Tuple[Subquotient, Subquotient]:
    """The canonical shared neighborhood built from an interleaving certificate.

    Realized twice: as a subquotient of m (via M1 = im[eta, q#] and
    M2 = M1 & ker[eta; p]) and symmetrically of n; the defining block maps are
    verified to agree, so the two quotients are the same isomorphism class.
    """
    r = Fraction(r)
    p, q = cert.p, cert.q
    ps = sharp(rho, r, n, p)
    qs = sharp(rho, r, m, q)
    etaL_m, etaR_m = eta_L_to_id(rho, r, m), eta_R_from_id(rho, r, m)
    etaL_n, etaR_n = eta_L_to_id(rho, r, n), eta_R_from_id(rho, r, n)

    def one_side(base, eta_l, eta_r, incoming, outgoing):
        F = base.field
        m1_bases = [
            image_basis(hstack(F, [eta_l.components[i], incoming.components[i]],
                               rows=base.dims[i]))
            for i in range(len(base.poset))
        ]
        m1 = submodule_from_bases(base, m1_bases)
        ker_bases = [
            kernel_basis(vstack(F, [eta_r.components[i], outgoing.components[i]],
                                cols=base.dims[i]))
            for i in range(len(base.poset))
        ]
        kerb = submodule_from_bases(base, ker_bases)
        m2 = submodule_intersection(m1, kerb)
        return en_construct(rho, r, base, m1, m2)

    # block identity [eta_r; p] o [eta_l, q#] = [q; eta_r_n] o [p#, eta_l_n]
    for i in range(len(m.poset)):
        lhs_top = hstack(m.field, [etaR_m.components[i] @ etaL_m.components[i],
                                   etaR_m.components[i] @ qs.components[i]],
                         rows=etaR_m.components[i].rows)
        rhs_top = hstack(m.field, [q.components[i] @ ps.components[i],
                                   q.components[i] @ etaL_n.components[i]],
                         rows=q.components[i].rows)
        lhs_bot = hstack(m.field, [p.components[i] @ etaL_m.components[i],
                                   p.components[i] @ qs.components[i]],
                         rows=p.components[i].rows)
        rhs_bot = hstack(m.field, [etaR_n.components[i] @ ps.components[i],
                                   etaR_n.components[i] @ etaL_n.components[i]],
                         rows=etaR_n.components[i].rows)
        if lhs_top != rhs_top or lhs_bot != rhs_bot:
            raise ErosionNeighborhoodError(
                "certificate identities fail; the supplied pair is not an interleaving")
    q_m = one_side(m, etaL_m, etaR_m, incoming=qs, outgoing=p)
    q_n = one_side(n, etaL_n, etaR_n, incoming=ps, outgoing=q)
    return q_m, q_n


def en_interleaving_certificate(rho: HeightDiff, r, m: PersistenceModule,
                                sq: Subquotient) -> Certificate:
    """The explicit interleaving between m and one of its erosion neighborhoods:
    alpha: L_r m ->> im -> M1 -> Q transposed on one side, and the factorization
    of the matching unit through the quotient on the other."""
    r = Fraction(r)
    P = m.poset
    etaL = eta_L_to_id(rho, r, m)
    etaR = eta_R_from_id(rho, r, m)
    alpha_comps = []
    beta_comps = []
    for i in range(len(P)):
        into_m1 = solve(sq.sub1.bases[i], etaL.components[i])
        if into_m1 is None:
            raise ErosionNeighborhoodError(
                f"latching image escapes M1 at {P.elements[i]!r}")
        alpha_comps.append(sq.proj.components[i] @ into_m1)
        beta_comps.append(
            _factor_through_surjection(sq.proj.components[i],
                                       etaR.components[i] @ sq.sub1.bases[i])
        )
    alpha = ModuleMorphism(etaL.source, sq.quotient, alpha_comps)
    beta = ModuleMorphism(sq.quotient, etaR.target, beta_comps)
    p = flat(rho, r, m, alpha)
    return Certificate(r, p, beta)


def en_mediate(rho: HeightDiff, s, r, x: PersistenceModule,
               q1: Subquotient, q2: Subquotient) -> Tuple[Subquotient, Subquotient]:
    """Given Q1 = X1/X1' at scale r and Q2 = X2/X2' at scale s over the same
    middle module, produce Q3 = (X1 & X2)/((X1' + X2') & X1 & X2) realized both
    as an s-erosion neighborhood of Q1 and an r-erosion neighborhood of Q2."""
    s, r = Fraction(s), Fraction(r)
    x3 = submodule_intersection(q1.sub1, q2.sub1)
    x3p = submodule_intersection(submodule_sum(q1.sub2, q2.sub2), x3)

    def realize(carrier: Subquotient, scale: Fraction) -> Subquotient:
        Q = carrier.quotient
        proj = carrier.proj
        P = x.poset
        img_bases = []
        imgp_bases = []
        for i in range(len(P)):
            in_x1 = solve(carrier.sub1.bases[i], x3.bases[i])
            if in_x1 is None:
                raise ErosionNeighborhoodError(
                    f"mediating submodule escapes the carrier at {P.elements[i]!r}")
            img_bases.append(image_basis(proj.components[i] @ in_x1))
            in_x1p = solve(carrier.sub1.bases[i], x3p.bases[i])
            if in_x1p is None:
                raise ErosionNeighborhoodError(
                    f"mediating submodule escapes the carrier at {P.elements[i]!r}")
            imgp_bases.append(image_basis(proj.components[i] @ in_x1p))
        m1 = submodule_from_bases(Q, img_bases)
        m2 = submodule_from_bases(Q, imgp_bases)
        return en_construct(rho, scale, Q, m1, m2)

    return realize(q1, s), realize(q2, r)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _all_rref_subspaces(fieldspec: FieldSpec, n: int) -> List[Mat]:
    """Every subspace of k^n as a canonical column basis (transposed row-echelon
    representatives), ordered by dimension then lexicographic shape."""
    if not fieldspec.is_prime_field:
        raise ValueError("subspace enumeration needs a finite field")
    p = fieldspec.p
    out = [Mat.zeros(fieldspec, n, 0)]
    for d in range(1, n + 1):
        for pivots in itertools.combinations(range(n), d):
            free_pos = []
            for i, pv in enumerate(pivots):
                for j in range(pv + 1, n):
                    if j not in pivots:
                        free_pos.append((i, j))
            for assign in itertools.product(range(p), repeat=len(free_pos)):
                rr = Mat.zeros(fieldspec, d, n)
                for i, pv in enumerate(pivots):
                    rr.a[i, pv] = 1
                for (i, j), v in zip(free_pos, assign):
                    rr.a[i, j] = v
                out.append(rr.T)
    return out


def _subspaces_between(fieldspec: FieldSpec, lower: Mat, upper: Mat) -> List[Mat]:
    """All subspaces W with span(lower) <= W <= span(upper), as bases in the
    ambient coordinates (`upper` columns live in the ambient, `lower` inside it)."""
    from .exactlin import quotient_map

    inside = solve(upper, lower)
    if inside is None:
        raise ValueError("lower subspace must sit inside the upper one")
    q, d = quotient_map(fieldspec, upper.cols, inside)
    section = solve(q, Mat.eye(fieldspec, d))
    out = []
    for w in _all_rref_subspaces(fieldspec, d):
        lifted = hstack(fieldspec, [inside, section @ w], rows=upper.cols)
        out.append(image_basis(upper @ lifted))
    return out


@dataclass
class EnEnumeration:
    members: List[Subquotient]
    complete: bool
    raw_count: int = 0


def _enumerate_closed_families(m: PersistenceModule, choices: List[List[Mat]],
                               budget: List[int]) -> List[List[Mat]]:
    """Backtracking over per-element subspace choices, pruning families that are
    not closed under the structure maps.  `budget` is a mutable countdown."""
    P = m.poset
    n = len(P)
    out: List[List[Mat]] = []
    partial: List[Optional[Mat]] = [None] * n

    in_covers = {i: [] for i in range(n)}
    out_covers = {i: [] for i in range(n)}
    for (a, b) in P.covers:
        in_covers[b].append(a)
        out_covers[a].append(b)

    def closed_so_far(i: int) -> bool:
        for a in in_covers[i]:
            if partial[a] is not None:
                pushed = m.maps[(a, i)] @ partial[a]
                if solve(partial[i], pushed) is None:
                    return False
        for b in out_covers[i]:
            if partial[b] is not None:
                pushed = m.maps[(i, b)] @ partial[i]
                if solve(partial[b], pushed) is None:
                    return False
        return True

    def rec(i: int) -> None:
        if budget[0] <= 0:
            return
        if i == n:
            out.append([w.copy() for w in partial])
            budget[0] -= 1
            return
        for w in choices[i]:
            partial[i] = w
            if closed_so_far(i):
                rec(i + 1)
            partial[i] = None

    rec(0)
    return out


def en_enumerate(rho: HeightDiff, r, m: PersistenceModule,
                 budget: int = 20000) -> EnEnumeration:
    """All r-erosion neighborhoods of m up to isomorphism (finite fields only).

    Enumerates pointwise subspace families for M1 (above the latching image)
    and M2 (inside the matching kernel and M1), keeps the closed ones, forms
    quotients, and deduplicates by the budgeted isomorphism test.  If the
    backtracking budget runs out the listing is flagged incomplete.
    """
    r = Fraction(r)
    if not m.field.is_prime_field:
        raise ValueError("erosion-neighborhood enumeration needs a finite field")
    P = m.poset
    imr = im_r(rho, r, m)
    kerr = ker_r(rho, r, m)
    full = [Mat.eye(m.field, d) for d in m.dims]
    m1_choices = [
        _subspaces_between(m.field, imr.bases[i], full[i]) for i in range(len(P))
    ]
    countdown = [budget]
    m1_families = _enumerate_closed_families(m, m1_choices, countdown)
    complete = countdown[0] > 0
    members: List[Subquotient] = []
    raw = 0
    for fam1 in m1_families:
        m1 = submodule_from_bases(m, fam1)
        ceiling = submodule_intersection(m1, kerr)
        m2_choices = [
            _subspaces_between(m.field, Mat.zeros(m.field, m.dims[i], 0), ceiling.bases[i])
            for i in range(len(P))
        ]
        # choices live in ceiling coordinates already mapped to ambient
        m2_families = _enumerate_closed_families(m, m2_choices, countdown)
        if countdown[0] <= 0:
            complete = False
        for fam2 in m2_families:
            m2 = submodule_from_bases(m, fam2)
            sq = en_construct(rho, r, m, m1, m2)
            raw += 1
            if not any(
                is_isomorphic(sq.quotient, seen.quotient).verdict == "yes"
                for seen in members
            ):
                members.append(sq)
    return EnEnumeration(members=members, complete=complete, raw_count=raw)


# ---------------------------------------------------------------------------
# the erosion-neighborhood distance
# ---------------------------------------------------------------------------


@dataclass
class EnStratumVerdict:
    stratum: Stratum
    verdict: str  # "yes" | "no" | "unknown" | "implied-yes" | "implied-no" | "skipped"
    via: Optional[str] = None  # "erosion-iso" | "certificate" | "enumeration"


@dataclass
class EnDistanceReport:
    strata: List[EnStratumVerdict]
    distance: ExtVal
    distance_lo: ExtVal
    distance_hi: ExtVal
    decided: bool
    witness: Optional[Subquotient] = None


def _en_stratum_test(rho: HeightDiff, rep: Fraction, m: PersistenceModule,
                     n: PersistenceModule, budget: int) -> Tuple[str, Optional[str], Optional[Subquotient]]:
    em = erosion_E(rho, rep, m, verify=False)
    en_ = erosion_E(rho, rep, n, verify=False)
    if is_isomorphic(em.module, en_.module, budget=budget).verdict == "yes":
        imr = im_r(rho, rep, m)
        kerr = ker_r(rho, rep, m)
        witness = en_construct(rho, rep, m, imr, submodule_intersection(imr, kerr))
        return "yes", "erosion-iso", witness
    res = find_interleaving(rho, rep, m, n, budget=budget)
    if res.verdict == "yes":
        qm, _ = en_canonical_Q(rho, rep, m, n, res.certificate)
        return "yes", "certificate", qm
    enum_m = en_enumerate(rho, rep, m, budget=budget)
    enum_n = en_enumerate(rho, rep, n, budget=budget)
    for sm in enum_m.members:
        for sn in enum_n.members:
            iso = is_isomorphic(sm.quotient, sn.quotient, budget=budget)
            if iso.verdict == "yes":
                return "yes", "enumeration", sm
    if enum_m.complete and enum_n.complete:
        return "no", "enumeration", None
    return "unknown", "enumeration", None


def d_en(rho: HeightDiff, m: PersistenceModule, n: PersistenceModule,
         budget: int = DEFAULT_BUDGET) -> EnDistanceReport:
    """The erosion-neighborhood distance by stratified search.

    Stratum verdict: do the r-erosion-neighborhood classes of m and n intersect?
    Canonical candidates (the erosions themselves, then the certificate-derived
    neighborhood) are tried before full cross-enumeration.  Incomplete
    enumerations degrade the verdict to unknown and the distance to a bracket.
    """
    sts = strata(rho)
    K = len(sts)
    memo: Dict[int, Tuple[str, Optional[str], Optional[Subquotient]]] = {}

    def evaluate(i: int) -> str:
        if i not in memo:
            memo[i] = _en_stratum_test(rho, sts[i].rep, m, n, budget)
        return memo[i][0]

    last_no = -1
    first_yes = K
    lo, hi = 0, K - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        v = evaluate(mid)
        if v == "yes":
            first_yes = min(first_yes, mid)
            hi = mid - 1
        elif v == "no":
            last_no = max(last_no, mid)
            lo = mid + 1
        else:
            resolved = False
            for j in range(lo, hi + 1):
                if j == mid:
                    continue
                vj = evaluate(j)
                if vj == "yes":
                    first_yes = min(first_yes, j)
                    hi = j - 1
                    resolved = True
                    break
                if vj == "no":
                    last_no = max(last_no, j)
                    lo = j + 1
                    resolved = True
                    break
            if not resolved:
                break

    verdicts = []
    for i, st in enumerate(sts):
        if i in memo:
            verdicts.append(EnStratumVerdict(st, memo[i][0], memo[i][1]))
        elif i >= first_yes:
            verdicts.append(EnStratumVerdict(st, "implied-yes"))
        elif i <= last_no:
            verdicts.append(EnStratumVerdict(st, "implied-no"))
        else:
            verdicts.append(EnStratumVerdict(st, "skipped"))
    decided = first_yes == last_no + 1
    if first_yes < K:
        dist: ExtVal = sts[first_yes].lo
    else:
        dist = INF
    lo_bound: ExtVal = sts[last_no + 1].lo if last_no + 1 < K else dist
    witness = memo[first_yes][2] if first_yes in memo else None
    return EnDistanceReport(
        strata=verdicts,
        distance=dist,
        distance_lo=lo_bound if not decided else dist,
        distance_hi=dist,
        decided=decided,
        witness=witness,
    )
