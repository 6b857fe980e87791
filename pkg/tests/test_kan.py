import itertools
import random
from fractions import Fraction

import pytest

from hipm.exactlin import GF2, Mat, rref
from hipm.fixtures import chain_example, grid_example
from hipm.height import nbhd_down_idx
from hipm.kan import (
    ColimResult,
    LimResult,
    check_universal,
    colim_induced,
    colim_over,
    factor_from_colim,
    fubini_compare,
    lim_induced,
    lim_over,
)
from hipm.pmod import PersistenceModule, interval_module, validate_module
from hipm.poset import FinitePoset
from hipm.randgen import random_module, random_poset


def _edge_module(field=GF2):
    p = FinitePoset.chain(["x", "y"])
    return PersistenceModule(p, field, [1, 1], {(0, 1): Mat.eye(field, 1)})


def test_colim_edge():
    m = _edge_module()
    col = colim_over(m, [0, 1])
    assert col.dim == 1
    assert not col.legs[0].is_zero() and not col.legs[1].is_zero()


def test_colim_singleton_and_empty(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    col = colim_over(m, [2])
    assert col.dim == m.dims[2]
    assert col.legs[2] == Mat.eye(GF2, m.dims[2])
    assert colim_over(m, []).dim == 0
    assert lim_over(m, []).dim == 0


def test_colim_grid_v22_vanishes():
    ge = grid_example()
    a = ge.poset.idx("v_2_2")
    nb = nbhd_down_idx(ge.rho, a, Fraction(1))
    assert colim_over(ge.module, nb).dim == 0


def test_lim_edge_and_chain():
    m = _edge_module()
    lim = lim_over(m, [0, 1])
    assert lim.dim == 1  # the graph of the identity
    ce = chain_example(2)
    lim2 = lim_over(ce.M, [1, 2, 3])  # the upper set {b, c, d}
    assert lim2.dim == 1
    assert all(not lim2.legs[i].is_zero() for i in [1, 2, 3])


def test_induced_identity_and_zero(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    s = [0, 1]
    assert colim_induced(m, s, s) == Mat.eye(GF2, colim_over(m, s).dim)
    z = colim_induced(m, [], [0, 1])
    assert z.cols == 0
    with pytest.raises(ValueError, match="inclusion"):
        colim_induced(m, [0, 1], [1])


def test_induced_composes(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    s, t, u = [0], [0, 1], [0, 1, 2]
    left = colim_induced(m, t, u) @ colim_induced(m, s, t)
    assert left == colim_induced(m, s, u)
    lleft = lim_induced(m, u, t)
    assert lim_induced(m, t, s) @ lleft == lim_induced(m, u, s)


def test_grid_example_induced_map_rank():
    # the printed transpose-[1 0] arrow between consecutive latching values
    ge = grid_example()
    a, b = ge.poset.idx("v_1_1"), ge.poset.idx("v_2_1")
    na = nbhd_down_idx(ge.rho, a, Fraction(1))
    nb = nbhd_down_idx(ge.rho, b, Fraction(1))
    ca, cb = colim_over(ge.module, na), colim_over(ge.module, nb)
    induced = colim_induced(ge.module, na, nb, ca, cb)
    assert (induced.rows, induced.cols) == (2, 1)
    assert rref(induced).rank == 1
    for x in ca.nodes:  # leg commutation pins the map down
        assert induced @ ca.legs[x] == cb.legs[x]


def test_check_universal_accepts_and_rejects(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    for subset in [[0], [0, 1], [0, 1, 2, 3]]:
        assert check_universal(m, subset, colim_over(m, subset))
        assert check_universal(m, subset, lim_over(m, subset))
    col = colim_over(m, [0, 1])
    if col.dim > 0:
        truncated = ColimResult(
            col.fieldspec, col.nodes, col.offsets, col.total, col.dim + 1,
            Mat(GF2, __import__("numpy").vstack([col.proj.a, col.proj.a[:1] * 0])),
            {x: Mat(GF2, __import__("numpy").vstack([col.legs[x].a, col.legs[x].a[:1] * 0]))
             for x in col.nodes},
            col.relations,
        )
        assert not check_universal(m, [0, 1], truncated)
        zero_cand = ColimResult(
            col.fieldspec, col.nodes, col.offsets, col.total, 0,
            Mat.zeros(GF2, 0, col.total),
            {x: Mat.zeros(GF2, 0, m.dims[x]) for x in col.nodes},
            col.relations,
        )
        assert not check_universal(m, [0, 1], zero_cand)


def test_check_universal_size_cap(chain4, rng):
    m = random_module(rng, FinitePoset.chain([f"x{i}" for i in range(7)]), GF2, 1)
    with pytest.raises(ValueError, match="capped"):
        check_universal(m, list(range(7)), colim_over(m, list(range(7))))


def test_universal_oracle_random_exhaustive(rng):
    for _ in range(15):
        p = random_poset(rng, 4)
        m = random_module(rng, p, GF2, 2)
        for k in range(len(p) + 1):
            for subset in itertools.combinations(range(len(p)), k):
                assert check_universal(m, list(subset), colim_over(m, list(subset)))
                assert check_universal(m, list(subset), lim_over(m, list(subset)))


def test_colim_lim_duality_dimensions(rng):
    # reversing the poset and transposing all maps swaps colim and lim
    for _ in range(10):
        p = random_poset(rng, 5)
        m = random_module(rng, p, GF2, 2)
        rev = FinitePoset.from_covers(
            p.elements, [(p.elements[b], p.elements[a]) for a, b in p.covers]
        )
        maps = {}
        for (a, b) in p.covers:
            ra, rb = rev.idx(p.elements[b]), rev.idx(p.elements[a])
            maps[(ra, rb)] = Mat(GF2, m.maps[(a, b)].a.T.copy())
        dual = PersistenceModule(
            rev, GF2, [m.dims[p.idx(e)] for e in rev.elements], maps
        )
        subset = sorted(rng.sample(range(len(p)), rng.randint(0, len(p))))
        dual_subset = [rev.idx(p.elements[i]) for i in subset]
        assert colim_over(m, subset).dim == lim_over(dual, dual_subset).dim


def test_fubini_connected_iso(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    # downset family along the chain: always connected index sets
    fam = {0: [0], 1: [0, 1], 2: [0, 1, 2]}
    rep = fubini_compare(m, [0, 1, 2], fam)
    assert rep.all_connected and rep.iso


def test_fubini_singleton(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    rep = fubini_compare(m, [1], {1: [0, 1]})
    assert rep.iso


def test_fubini_diamond_witness(diamond, diamond_rho):
    kp = interval_module(diamond, diamond.elements, GF2)
    d = diamond.idx("d")
    I = nbhd_down_idx(diamond_rho, d, Fraction(1))
    fam = {x: nbhd_down_idx(diamond_rho, x, Fraction(1)) for x in I}
    rep = fubini_compare(kp, I, fam)
    assert not rep.all_connected
    assert not rep.iso
    assert rep.iterated_dim == 2 and rep.union_dim == 1  # the comparison collapses


def test_fubini_validates_family(chain4, rng):
    m = random_module(rng, chain4, GF2, 2)
    with pytest.raises(ValueError, match="monotone"):
        fubini_compare(m, [0, 1], {0: [0, 1], 1: [1]})
    with pytest.raises(ValueError, match="downset"):
        fubini_compare(m, [0, 1], {0: [1], 1: [0, 1, 2]})  # {1} misses 0 below it
