#!/usr/bin/env python3
"""The discrete bipath (circle glued from two chains): Hom vanishing forces a
large distance between the constant module and its twice-eroded latching, while
both single steps stay at distance zero -- the relaxed triangle inequality with
defect c(phi) fails because the circle is not diamond-free."""

import argparse

from hipm.exactlin import GF2
from hipm.fixtures import bipath_example
from hipm.functors import apply_L, e_r
from hipm.height import c_rho, check_cip, format_ext, strata
from hipm.interleave import distance
from hipm.pmod import hom_basis


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--G", type=int, default=8, help="glue height (> 4)")
    args = ap.parse_args()
    bp = bipath_example(args.G, GF2)
    M = bp.M
    M1 = apply_L(bp.rho, 1, M).module
    N = apply_L(bp.rho, 1, M1).module
    cip = check_cip(bp.rho)
    print(f"bipath with {len(bp.poset)} points, G = {args.G}")
    print(f"CIP holds: {cip.holds}" + (f" (witness {cip.witness})" if cip.witness else ""))
    print(f"c(phi) = {format_ext(c_rho(bp.rho).value)}")
    print("rep   dim Hom(L_r M, N)   e_r nonzero")
    for st in strata(bp.rho):
        h = len(hom_basis(apply_L(bp.rho, st.rep, M).module, N))
        nz = not e_r(bp.rho, st.rep, M).is_zero()
        print(f"{str(st.rep):>4}  {h:^18}  {nz}")
    d_mn = distance(bp.rho, M, N)
    d_mm1 = distance(bp.rho, M, M1)
    d_m1n = distance(bp.rho, M1, N)
    print(f"d(M, N)  = {format_ext(d_mn.distance)}")
    print(f"d(M, M1) = {format_ext(d_mm1.distance)}")
    print(f"d(M1, N) = {format_ext(d_m1n.distance)}")


if __name__ == "__main__":
    main()
