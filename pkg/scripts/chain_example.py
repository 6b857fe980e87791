#!/usr/bin/env python3
"""The four-point chain family: the triple whose pairwise distances are
(0, 0, C), exhibiting the triangle-inequality defect exactly c(phi) = C."""

import argparse
from fractions import Fraction

from hipm.exactlin import GF2
from hipm.fixtures import chain_example
from hipm.height import c_rho, format_ext
from hipm.interleave import distance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--C", default="2", help="gap constant (> 1), exact fraction")
    args = ap.parse_args()
    ce = chain_example(Fraction(args.C), GF2)
    d_mx = distance(ce.rho, ce.M, ce.X)
    d_xn = distance(ce.rho, ce.X, ce.N)
    d_mn = distance(ce.rho, ce.M, ce.N)
    print(f"heights: 0, 1, {ce.C + 1}, {2 * ce.C + 1}")
    print(f"d(M, X) = {format_ext(d_mx.distance)} (attained: {d_mx.attained})")
    print(f"d(X, N) = {format_ext(d_xn.distance)} (attained: {d_xn.attained})")
    print(f"d(M, N) = {format_ext(d_mn.distance)} (attained: {d_mn.attained})")
    c = c_rho(ce.rho)
    print(f"c(phi)  = {format_ext(c.value)}")
    print("strata for (M, N):")
    for sv in d_mn.strata:
        st = sv.stratum
        if st.kind == "zero":
            iv = "{0}"
        elif st.hi is None:
            iv = f"({st.lo}, inf)"
        else:
            iv = f"({st.lo}, {st.hi}]"
        print(f"  {iv:>12}  {sv.verdict}")
    gap = d_mn.distance
    print(f"triangle inequality fails by {format_ext(gap)}; "
          f"the relaxed bound with defect c(phi) is tight")


if __name__ == "__main__":
    main()
