#!/usr/bin/env python3
"""Reproduce the 4x3 grid computation: latching/matching values of the
indecomposable module at scale 1, with their interval decompositions."""

import argparse

from hipm.exactlin import GF2
from hipm.fixtures import grid_example
from hipm.functors import apply_L, apply_R, erosion_E
from hipm.pmod import direct_sum, interval_module, is_isomorphic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--r", default="1")
    args = ap.parse_args()

    ge = grid_example(GF2)
    aL = apply_L(ge.rho, args.r, ge.module)
    aR = apply_R(ge.rho, args.r, ge.module)

    def table(dims):
        rows = []
        for j in reversed(range(3)):
            rows.append("  ".join(str(dims[ge.poset.idx(f"v_{i}_{j}")]) for i in range(4)))
        return "\n".join(rows)

    print(f"M dims:\n{table(ge.module.dims)}\n")
    print(f"L_{args.r} M dims:\n{table(aL.module.dims)}\n")
    print(f"R_{args.r} M dims:\n{table(aR.module.dims)}\n")

    L_dec = direct_sum(
        direct_sum(interval_module(ge.poset, ge.J1, GF2),
                   interval_module(ge.poset, ["v_1_2"], GF2)),
        interval_module(ge.poset, ["v_2_1"], GF2),
    )
    R_dec = direct_sum(
        direct_sum(interval_module(ge.poset, ge.J2, GF2),
                   interval_module(ge.poset, ge.J3, GF2)),
        interval_module(ge.poset, ["v_3_0"], GF2),
    )
    print("L_1 M ~ k_J1 + k_{(1,2)} + k_{(2,1)}:", is_isomorphic(aL.module, L_dec).verdict)
    print("R_1 M ~ k_J2 + k_J3 + k_{(3,0)}:", is_isomorphic(aR.module, R_dec).verdict)
    er = erosion_E(ge.rho, args.r, ge.module)
    print(f"E_{args.r} M dims:\n{table(er.module.dims)}")


if __name__ == "__main__":
    main()
