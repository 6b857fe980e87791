"""The functor calculus on persistence modules induced by a height-difference
function: pointwise-colimit latching functors, pointwise-limit matching
functors, their adjunction transposes, the iterated-neighborhood functors, and
the canonical natural transformations between all of them.

Every transformation is assembled directly from the retained (co)cone legs of
the functor applications, so outputs are deterministic matrix computations, and
each claimed factorization identity is verified as an exact matrix identity at
construction time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactlin import Mat, image_basis, kernel_basis, rref, solve
from .height import (
    HeightDiff,
    check_ivc,
    nbhd_down_idx,
    nbhd_iterated_idx,
    nbhd_up_idx,
    pullback_rho,
)
from .kan import ColimResult, LimResult, colim_over, factor_from_colim, factor_into_lim, lim_over
from .pmod import (
    ModuleMorphism,
    PersistenceModule,
    Submodule,
    quotient_by_submodule,
    submodule_image,
    submodule_intersection,
    submodule_kernel,
)
from .poset import OrderMap, PosetError

__all__ = [
    "FunctorApplication",
    "apply_L",
    "apply_R",
    "apply_T",
    "apply_L_mor",
    "apply_R_mor",
    "eta_L",
    "eta_R",
    "eta_L_to_id",
    "eta_R_from_id",
    "e_r",
    "mu_L",
    "mu_R",
    "sharp",
    "flat",
    "unit",
    "counit",
    "kappa",
    "tau",
    "theta",
    "sigma",
    "mate_of_eta_L",
    "mate_of_mu_L",
    "im_r",
    "ker_r",
    "erosion_E",
    "ErosionResult",
    "xi_pullback",
    "clear_cache",
    "IntermediateValueError",
    "FubiniComparisonError",
]


@dataclass
class FunctorApplication:
    """One functor value: the output module plus per-element (co)limit data.

    For latching-type kinds (`L`, `TL`) `data[a]` is a ColimResult whose legs go
    M(x) -> out(a); for matching-type kinds (`R`, `TR`) it is a LimResult whose
    legs go out(a) -> M(y).  The retained legs make transposes and canonical
    transformations direct matrix assemblies.
    """

    kind: str  # "L" | "R" | "TL" | "TR"
    params: tuple
    rho: HeightDiff
    source: PersistenceModule
    module: PersistenceModule
    nbhd: Dict[int, Tuple[int, ...]]
    data: dict


_CACHE: Dict[tuple, object] = {}


def clear_cache() -> None:
    _CACHE.clear()


def _cached(key_parts, build):
    key = tuple(key_parts)
    hit = _CACHE.get(key)
    if hit is None:
        hit = build()
        _CACHE[key] = hit
    return hit


def _r(x) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("scale parameter must be >= 0")
    return x


def apply_L(rho: HeightDiff, r, m: PersistenceModule) -> FunctorApplication:
    """The r-latching functor value: pointwise colimits over the lower
    r-neighborhoods, with the inclusion-induced structure maps."""
    r = _r(r)

    def build():
        P = m.poset
        nbhd = {a: tuple(nbhd_down_idx(rho, a, r)) for a in range(len(P))}
        data = {a: colim_over(m, nbhd[a]) for a in range(len(P))}
        dims = [data[a].dim for a in range(len(P))]
        maps = {}
        for (a, b) in P.covers:
            maps[(a, b)] = factor_from_colim(
                data[a], {x: data[b].legs[x] for x in data[a].nodes}, data[b].dim
            )
        out = PersistenceModule(P, m.field, dims, maps)
        return FunctorApplication("L", (r,), rho, m, out, nbhd, data)

    return _cached(("L", rho.key(), r, m.key()), build)


def apply_R(rho: HeightDiff, r, m: PersistenceModule) -> FunctorApplication:
    """The r-matching functor value: pointwise limits over the upper
    r-neighborhoods."""
    r = _r(r)

    def build():
        P = m.poset
        nbhd = {a: tuple(nbhd_up_idx(rho, a, r)) for a in range(len(P))}
        data = {a: lim_over(m, nbhd[a]) for a in range(len(P))}
        dims = [data[a].dim for a in range(len(P))]
        maps = {}
        for (a, b) in P.covers:
            maps[(a, b)] = factor_into_lim(
                data[b], {y: data[a].legs[y] for y in data[b].nodes}, data[a].dim
            )
        out = PersistenceModule(P, m.field, dims, maps)
        return FunctorApplication("R", (r,), rho, m, out, nbhd, data)

    return _cached(("R", rho.key(), r, m.key()), build)


def apply_T(rho: HeightDiff, s, r, m: PersistenceModule, direction: str) -> FunctorApplication:
    """Iterated-neighborhood functor: colim over a's lower-s-then-lower-r union
    (direction 'L'), or lim over the upper-r-then-upper-s union ('R')."""
    s, r = _r(s), _r(r)
    if direction not in ("L", "R"):
        raise ValueError("direction must be 'L' or 'R'")

    def build():
        P = m.poset
        if direction == "L":
            nbhd = {a: tuple(nbhd_iterated_idx(rho, a, s, r, "down")) for a in range(len(P))}
            data = {a: colim_over(m, nbhd[a]) for a in range(len(P))}
            dims = [data[a].dim for a in range(len(P))]
            maps = {
                (a, b): factor_from_colim(data[a], {x: data[b].legs[x] for x in data[a].nodes},
                                          data[b].dim)
                for (a, b) in P.covers
            }
            out = PersistenceModule(P, m.field, dims, maps)
            return FunctorApplication("TL", (s, r), rho, m, out, nbhd, data)
        nbhd = {a: tuple(nbhd_iterated_idx(rho, a, s, r, "up")) for a in range(len(P))}
        data = {a: lim_over(m, nbhd[a]) for a in range(len(P))}
        dims = [data[a].dim for a in range(len(P))]
        maps = {
            (a, b): factor_into_lim(data[b], {y: data[a].legs[y] for y in data[b].nodes},
                                    data[a].dim)
            for (a, b) in P.covers
        }
        out = PersistenceModule(P, m.field, dims, maps)
        return FunctorApplication("TR", (s, r), rho, m, out, nbhd, data)

    return _cached(("T" + direction, rho.key(), s, r, m.key()), build)


def apply_L_mor(rho: HeightDiff, r, f: ModuleMorphism) -> ModuleMorphism:
    """Functoriality of the latching functor on a morphism."""
    am, an = apply_L(rho, r, f.source), apply_L(rho, r, f.target)
    comps = []
    for a in range(len(f.source.poset)):
        blocks = {x: an.data[a].legs[x] @ f.components[x] for x in am.data[a].nodes}
        comps.append(factor_from_colim(am.data[a], blocks, an.data[a].dim))
    return ModuleMorphism(am.module, an.module, comps)


def apply_R_mor(rho: HeightDiff, r, f: ModuleMorphism) -> ModuleMorphism:
    am, an = apply_R(rho, r, f.source), apply_R(rho, r, f.target)
    comps = []
    for a in range(len(f.source.poset)):
        blocks = {y: f.components[y] @ am.data[a].legs[y] for y in an.data[a].nodes}
        comps.append(factor_into_lim(an.data[a], blocks, am.data[a].dim))
    return ModuleMorphism(am.module, an.module, comps)


# ---------------------------------------------------------------------------
# the eta family and the erosion composite
# ---------------------------------------------------------------------------


def eta_L(rho: HeightDiff, s, r, m: PersistenceModule) -> ModuleMorphism:
    """The comparison L_s M -> L_r M induced by shrinking neighborhoods (s >= r)."""
    s, r = _r(s), _r(r)
    if s < r:
        raise ValueError("eta_L needs s >= r")

    def build():
        hi, lo = apply_L(rho, s, m), apply_L(rho, r, m)
        comps = [
            factor_from_colim(hi.data[a], {x: lo.data[a].legs[x] for x in hi.data[a].nodes},
                              lo.data[a].dim)
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(hi.module, lo.module, comps)

    return _cached(("etaL", rho.key(), s, r, m.key()), build)


def eta_R(rho: HeightDiff, r, s, m: PersistenceModule) -> ModuleMorphism:
    """The comparison R_r M -> R_s M (s >= r)."""
    r, s = _r(r), _r(s)
    if s < r:
        raise ValueError("eta_R needs s >= r")

    def build():
        lo, hi = apply_R(rho, r, m), apply_R(rho, s, m)
        comps = [
            factor_into_lim(hi.data[a], {y: lo.data[a].legs[y] for y in hi.data[a].nodes},
                            lo.data[a].dim)
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(lo.module, hi.module, comps)

    return _cached(("etaR", rho.key(), r, s, m.key()), build)


def eta_L_to_id(rho: HeightDiff, r, m: PersistenceModule) -> ModuleMorphism:
    """The counit-style map L_r M -> M, assembled from the structure-map cocone."""
    r = _r(r)

    def build():
        app = apply_L(rho, r, m)
        comps = [
            factor_from_colim(app.data[a], {x: m.map_for_idx(x, a) for x in app.data[a].nodes},
                              m.dims[a])
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(app.module, m, comps)

    return _cached(("etaL-id", rho.key(), r, m.key()), build)


def eta_R_from_id(rho: HeightDiff, r, m: PersistenceModule) -> ModuleMorphism:
    """The unit-style map M -> R_r M."""
    r = _r(r)

    def build():
        app = apply_R(rho, r, m)
        comps = [
            factor_into_lim(app.data[a], {y: m.map_for_idx(a, y) for y in app.data[a].nodes},
                            m.dims[a])
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(m, app.module, comps)

    return _cached(("etaR-id", rho.key(), r, m.key()), build)


def e_r(rho: HeightDiff, r, m: PersistenceModule) -> ModuleMorphism:
    """The canonical composite L_r M -> M -> R_r M whose image is the erosion."""
    return _cached(
        ("e", rho.key(), _r(r), m.key()),
        lambda: eta_R_from_id(rho, r, m).compose(eta_L_to_id(rho, r, m)),
    )


# ---------------------------------------------------------------------------
# mu: the oplax composition maps
# ---------------------------------------------------------------------------


def mu_L(rho: HeightDiff, s, r, m: PersistenceModule) -> ModuleMorphism:
    """The canonical L_s(L_r M) -> L_{s+r} M."""
    s, r = _r(s), _r(r)

    def build():
        inner = apply_L(rho, r, m)
        outer = apply_L(rho, s, inner.module)
        big = apply_L(rho, s + r, m)
        comps = []
        for a in range(len(m.poset)):
            blocks = {}
            for x in outer.data[a].nodes:
                blocks[x] = factor_from_colim(
                    inner.data[x],
                    {w: big.data[a].legs[w] for w in inner.data[x].nodes},
                    big.data[a].dim,
                )
            comps.append(factor_from_colim(outer.data[a], blocks, big.data[a].dim))
        return ModuleMorphism(outer.module, big.module, comps)

    return _cached(("muL", rho.key(), s, r, m.key()), build)


def mu_R(rho: HeightDiff, r, s, m: PersistenceModule) -> ModuleMorphism:
    """The canonical R_{s+r} M -> R_r(R_s M)."""
    r, s = _r(r), _r(s)

    def build():
        inner = apply_R(rho, s, m)
        outer = apply_R(rho, r, inner.module)
        big = apply_R(rho, s + r, m)
        comps = []
        for a in range(len(m.poset)):
            blocks = {}
            for y in outer.data[a].nodes:
                blocks[y] = factor_into_lim(
                    inner.data[y],
                    {w: big.data[a].legs[w] for w in inner.data[y].nodes},
                    big.data[a].dim,
                )
            comps.append(factor_into_lim(outer.data[a], blocks, big.data[a].dim))
        return ModuleMorphism(big.module, outer.module, comps)

    return _cached(("muR", rho.key(), r, s, m.key()), build)


# ---------------------------------------------------------------------------
# the adjunction transposes
# ---------------------------------------------------------------------------


def sharp(rho: HeightDiff, r, n: PersistenceModule, g: ModuleMorphism) -> ModuleMorphism:
    """Transpose a morphism M -> R_r N to its adjoint L_r M -> N."""
    r = _r(r)
    m = g.source
    app_l = apply_L(rho, r, m)
    app_r = apply_R(rho, r, n)
    if g.target.key() != app_r.module.key():
        raise ValueError("target of g is not the r-matching module of n")
    comps = []
    for a in range(len(m.poset)):
        blocks = {x: app_r.data[x].legs[a] @ g.components[x] for x in app_l.data[a].nodes}
        comps.append(factor_from_colim(app_l.data[a], blocks, n.dims[a]))
    return ModuleMorphism(app_l.module, n, comps)


def flat(rho: HeightDiff, r, m: PersistenceModule, f: ModuleMorphism) -> ModuleMorphism:
    """Transpose a morphism L_r M -> N to its adjoint M -> R_r N."""
    r = _r(r)
    n = f.target
    app_l = apply_L(rho, r, m)
    app_r = apply_R(rho, r, n)
    if f.source.key() != app_l.module.key():
        raise ValueError("source of f is not the r-latching module of m")
    comps = []
    for a in range(len(m.poset)):
        blocks = {y: f.components[y] @ app_l.data[y].legs[a] for y in app_r.data[a].nodes}
        comps.append(factor_into_lim(app_r.data[a], blocks, m.dims[a]))
    return ModuleMorphism(m, app_r.module, comps)


def unit(rho: HeightDiff, r, m: PersistenceModule) -> ModuleMorphism:
    """M -> R_r L_r M."""
    app_l = apply_L(rho, r, m)
    return flat(rho, r, m, ModuleMorphism.identity(app_l.module))


def counit(rho: HeightDiff, r, n: PersistenceModule) -> ModuleMorphism:
    """L_r R_r N -> N."""
    app_r = apply_R(rho, r, n)
    return sharp(rho, r, n, ModuleMorphism.identity(app_r.module))


def mate_of_eta_L(rho: HeightDiff, s, r, n: PersistenceModule) -> ModuleMorphism:
    """The two-adjunction mate of eta_L(s, r) evaluated at n: a map R_r N -> R_s N.

    Built as R_s(counit_r) o R_s(eta_L at R_r N) o unit_s, the composite of the
    two one-adjunction transpositions.
    """
    s, r = _r(s), _r(r)
    app_r = apply_R(rho, r, n)
    x = app_r.module
    u = unit(rho, s, x)  # R_rN -> R_s L_s R_rN
    e = eta_L(rho, s, r, x)  # L_s R_rN -> L_r R_rN
    c = counit(rho, r, n)  # L_r R_rN -> N
    return apply_R_mor(rho, s, c.compose(e)).compose(u)


def mate_of_mu_L(rho: HeightDiff, s, r, n: PersistenceModule) -> ModuleMorphism:
    """The mate of mu_L(s, r) under the composite adjunction
    L_s L_r -| R_r R_s, evaluated at n: a map R_{s+r} N -> R_r(R_s N).

    The composition maps are constructed independently from neighborhood
    inclusions; agreement of this mate with mu_R is verified by the tests as an
    exact identity rather than assumed.
    """
    s, r = _r(s), _r(r)
    x = apply_R(rho, s + r, n).module  # R_{s+r} N
    # unit of the composite adjunction at x: x -> R_r R_s L_s L_r x
    app_lr_x = apply_L(rho, r, x)
    unit_r_x = unit(rho, r, x)  # x -> R_r L_r x
    unit_s_inner = unit(rho, s, app_lr_x.module)  # L_r x -> R_s L_s L_r x
    comp_unit = apply_R_mor(rho, r, unit_s_inner).compose(unit_r_x)
    # mu_L at x then the counit of L_{s+r} -| R_{s+r} at n, both pushed through R_r R_s
    mu_x = mu_L(rho, s, r, x)  # L_s L_r x -> L_{s+r} x
    eps = counit(rho, s + r, n)  # L_{s+r} R_{s+r} N -> N
    pushed = apply_R_mor(rho, r, apply_R_mor(rho, s, eps.compose(mu_x)))
    return pushed.compose(comp_unit)


# ---------------------------------------------------------------------------
# kappa, tau, theta, sigma
# ---------------------------------------------------------------------------


def kappa(rho: HeightDiff, s, r, m: PersistenceModule, direction: str) -> ModuleMorphism:
    """The Fubini comparison: L_s L_r M -> T^L_{s,r} M, or T^R_{r,s} M -> R_r R_s M."""
    s, r = _r(s), _r(r)
    if direction == "L":
        inner = apply_L(rho, r, m)
        outer = apply_L(rho, s, inner.module)
        t = apply_T(rho, s, r, m, "L")
        comps = []
        for a in range(len(m.poset)):
            blocks = {
                x: factor_from_colim(inner.data[x],
                                     {w: t.data[a].legs[w] for w in inner.data[x].nodes},
                                     t.data[a].dim)
                for x in outer.data[a].nodes
            }
            comps.append(factor_from_colim(outer.data[a], blocks, t.data[a].dim))
        return ModuleMorphism(outer.module, t.module, comps)
    if direction == "R":
        inner = apply_R(rho, s, m)
        outer = apply_R(rho, r, inner.module)
        t = apply_T(rho, s, r, m, "R")
        comps = []
        for a in range(len(m.poset)):
            blocks = {
                y: factor_into_lim(inner.data[y],
                                   {w: t.data[a].legs[w] for w in inner.data[y].nodes},
                                   t.data[a].dim)
                for y in outer.data[a].nodes
            }
            comps.append(factor_into_lim(outer.data[a], blocks, t.data[a].dim))
        return ModuleMorphism(t.module, outer.module, comps)
    raise ValueError("direction must be 'L' or 'R'")


def tau(rho: HeightDiff, s, r, m: PersistenceModule, direction: str) -> ModuleMorphism:
    """The inclusion-induced comparison T^L_{s,r} M -> L_{s+r} M (or
    R_{s+r} M -> T^R_{r,s} M), second factor of the mu factorization."""
    s, r = _r(s), _r(r)
    if direction == "L":
        t = apply_T(rho, s, r, m, "L")
        big = apply_L(rho, s + r, m)
        comps = [
            factor_from_colim(t.data[a], {w: big.data[a].legs[w] for w in t.data[a].nodes},
                              big.data[a].dim)
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(t.module, big.module, comps)
    if direction == "R":
        t = apply_T(rho, s, r, m, "R")
        big = apply_R(rho, s + r, m)
        comps = [
            factor_into_lim(t.data[a], {w: big.data[a].legs[w] for w in t.data[a].nodes},
                            big.data[a].dim)
            for a in range(len(m.poset))
        ]
        return ModuleMorphism(big.module, t.module, comps)
    raise ValueError("direction must be 'L' or 'R'")


class IntermediateValueError(ValueError):
    pass


def theta(rho: HeightDiff, s, r, c, m: PersistenceModule, direction: str) -> ModuleMorphism:
    """The tolerance-c comparison L_{s+r+c} M -> T^L_{s,r} M (dually for R),
    available exactly when the intermediate-value property holds at c.

    The defining neighborhood inclusion and the factorization of the eta
    comparison through tau are both verified exactly.
    """
    s, r, c = _r(s), _r(r), _r(c)
    ivc = check_ivc(rho, c)
    if not ivc.holds:
        raise IntermediateValueError(
            f"intermediate-value property fails at tolerance {c}: witness {ivc.witness}"
        )
    P = m.poset
    if direction == "L":
        big = apply_L(rho, s + r + c, m)
        t = apply_T(rho, s, r, m, "L")
        for a in range(len(P)):
            if not set(big.nbhd[a]) <= set(t.nbhd[a]):
                raise IntermediateValueError(
                    f"neighborhood inclusion fails at {P.elements[a]!r}"
                )
        comps = [
            factor_from_colim(big.data[a], {w: t.data[a].legs[w] for w in big.data[a].nodes},
                              t.data[a].dim)
            for a in range(len(P))
        ]
        out = ModuleMorphism(big.module, t.module, comps)
        assert tau(rho, s, r, m, "L").compose(out) == eta_L(rho, s + r + c, s + r, m)
        return out
    if direction == "R":
        big = apply_R(rho, s + r + c, m)
        t = apply_T(rho, s, r, m, "R")
        for a in range(len(P)):
            if not set(big.nbhd[a]) <= set(t.nbhd[a]):
                raise IntermediateValueError(
                    f"neighborhood inclusion fails at {P.elements[a]!r}"
                )
        comps = [
            factor_into_lim(big.data[a], {w: t.data[a].legs[w] for w in big.data[a].nodes},
                            t.data[a].dim)
            for a in range(len(P))
        ]
        out = ModuleMorphism(t.module, big.module, comps)
        assert out.compose(tau(rho, s, r, m, "R")) == eta_R(rho, s + r, s + r + c, m)
        return out
    raise ValueError("direction must be 'L' or 'R'")


class FubiniComparisonError(ValueError):
    pass


def sigma(rho: HeightDiff, s, r, c, m: PersistenceModule, direction: str) -> ModuleMorphism:
    """kappa^{-1} after theta: the interleaving-composition helper
    L_{s+r+c} M -> L_s L_r M (dually R_r R_s M -> R_{s+r+c} M).

    Requires every kappa component invertible (the connected-intersections
    situation); verifies the eta = mu o sigma factorization exactly.
    """
    s, r, c = _r(s), _r(r), _r(c)
    k = kappa(rho, s, r, m, direction)
    th = theta(rho, s, r, c, m, direction)
    P = m.poset
    if direction == "L":
        comps = []
        for a in range(len(P)):
            ka = k.components[a]
            if ka.rows != ka.cols or rref(ka).rank != ka.rows:
                raise FubiniComparisonError(
                    f"iterated-colimit comparison not invertible at {P.elements[a]!r}"
                )
            sol = solve(ka, th.components[a])
            comps.append(sol)
        out = ModuleMorphism(th.source, k.source, comps)
        assert mu_L(rho, s, r, m).compose(out) == eta_L(rho, s + r + c, s + r, m)
        return out
    if direction == "R":
        comps = []
        for a in range(len(P)):
            ka = k.components[a]
            if ka.rows != ka.cols or rref(ka).rank != ka.rows:
                raise FubiniComparisonError(
                    f"iterated-limit comparison not invertible at {P.elements[a]!r}"
                )
            # sigma_a = theta_a o kappa_a^{-1}: solve X @ ka = theta_a
            sol = solve(ka.T, th.components[a].T)
            comps.append(sol.T)
        out = ModuleMorphism(k.target, th.target, comps)
        assert out.compose(mu_R(rho, r, s, m)) == eta_R(rho, s + r, s + r + c, m)
        return out
    raise ValueError("direction must be 'L' or 'R'")


# ---------------------------------------------------------------------------
# image / kernel / erosion functors
# ---------------------------------------------------------------------------


def im_r(rho: HeightDiff, r, m: PersistenceModule) -> Submodule:
    """The image of L_r M -> M, as a submodule of M."""
    return submodule_image(eta_L_to_id(rho, r, m))


def ker_r(rho: HeightDiff, r, m: PersistenceModule) -> Submodule:
    """The kernel of M -> R_r M, as a submodule of M."""
    return submodule_kernel(eta_R_from_id(rho, r, m))


@dataclass
class ErosionResult:
    """The erosion subquotient: image of L_r M -> R_r M with its factorization
    retained, plus the verified identification with im/(im & ker)."""

    module: PersistenceModule
    sub: Submodule  # inside R_r M
    proj: ModuleMorphism  # L_r M ->> erosion
    incl: ModuleMorphism  # erosion -> R_r M


def erosion_E(rho: HeightDiff, r, m: PersistenceModule, verify: bool = True) -> ErosionResult:
    """The r-erosion of M: the image of the canonical L_r M -> R_r M.

    When `verify` is set, the canonical isomorphism with
    im(L_r -> M) / (im & ker(M -> R_r)) is checked exactly.
    """
    e = e_r(rho, r, m)
    sub = submodule_image(e)
    comps = [solve(sub.bases[a], e.components[a]) for a in range(len(m.poset))]
    if any(c is None for c in comps):
        raise AssertionError("erosion image must factor its own defining map")
    proj = ModuleMorphism(e.source, sub.module, comps, check=False)
    if verify:
        _verify_erosion_subquotient(rho, r, m, sub)
    return ErosionResult(sub.module, sub, proj, sub.incl)


def _verify_erosion_subquotient(rho: HeightDiff, r, m: PersistenceModule, esub: Submodule) -> None:
    imr = im_r(rho, r, m)
    kerr = ker_r(rho, r, m)
    inter = submodule_intersection(imr, kerr)
    quot, proj = quotient_by_submodule(imr, inter)
    eta_r_mor = eta_R_from_id(rho, r, m)
    # canonical map im_r -> erosion: push the image generators through M -> R_rM
    phi = []
    for a in range(len(m.poset)):
        pushed = eta_r_mor.components[a] @ imr.bases[a]
        x = solve(esub.bases[a], pushed)
        if x is None:
            raise AssertionError("image of im_r must land in the erosion")
        phi.append(x)
    # the map descends to the quotient and the induced map must be an iso
    for a in range(len(m.poset)):
        qa = proj.components[a]
        psi = solve(qa.T, phi[a].T)
        if psi is None:
            raise AssertionError("canonical map does not descend to the subquotient")
        psi = psi.T
        if psi.rows != psi.cols or rref(psi).rank != psi.rows:
            raise AssertionError(
                f"erosion is not isomorphic to the canonical subquotient at "
                f"{m.poset.elements[a]!r}"
            )


# ---------------------------------------------------------------------------
# pullback comparison
# ---------------------------------------------------------------------------


def xi_pullback(f: OrderMap, rho: HeightDiff, r, m: PersistenceModule,
                direction: str) -> ModuleMorphism:
    """The base-change comparison along an order-preserving map f: Q -> P.

    'L': latching of the pulled-back data -> pullback of the latching value;
    'R': pullback of the matching value -> matching of the pulled-back data.
    """
    from .pmod import pullback_module

    r = _r(r)
    if rho.poset.key() != f.target.key():
        raise PosetError("rho must live on the target of f")
    rho_q = pullback_rho(f, rho)
    mq = pullback_module(f, m)
    if direction == "L":
        src = apply_L(rho_q, r, mq)
        tgt_app = apply_L(rho, r, m)
        tgt = pullback_module(f, tgt_app.module)
        comps = []
        for q in range(len(f.source)):
            fa = f.apply_idx(q)
            blocks = {y: tgt_app.data[fa].legs[f.apply_idx(y)] for y in src.data[q].nodes}
            comps.append(factor_from_colim(src.data[q], blocks, tgt_app.data[fa].dim))
        return ModuleMorphism(src.module, tgt, comps)
    if direction == "R":
        tgt = apply_R(rho_q, r, mq)
        src_app = apply_R(rho, r, m)
        src = pullback_module(f, src_app.module)
        comps = []
        for q in range(len(f.source)):
            fa = f.apply_idx(q)
            blocks = {y: src_app.data[fa].legs[f.apply_idx(y)] for y in tgt.data[q].nodes}
            comps.append(factor_into_lim(tgt.data[q], blocks, src_app.data[fa].dim))
        return ModuleMorphism(src, tgt.module, comps)
    raise ValueError("direction must be 'L' or 'R'")
