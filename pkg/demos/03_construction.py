"""Tour 3: building blocks and the recursive divergence-witness construction.

Certifies the five block properties for a near-boundary parameter, then runs
a two-step BMOA construction at 256 bits and prints the doubly-exponential
collapse of the block gaps, the certified step quantities, and the negative
control (the linear symbol g = z, which correctly fails at step one).
"""

import mpmath as mp

from holoflow import construct


def main():
    print("== block certification at w = 0.99 ==")
    rep = construct.verify_block(0.99)
    print("  passed: %s" % rep.passed)
    print("  bloch seminorm %.4f <= %.1f, bmoa seminorm %.4f <= %.1f"
          % (rep.bloch, construct.BLOCK_BOUNDS["bloch"],
             rep.bmoa, construct.BLOCK_BOUNDS["bmoa"]))
    print("  min Re beta = %.2e >= 0, max |Im beta| = %.4f <= pi/2"
          % (rep.min_re, rep.max_abs_im))
    print("  peak constant c4 = %.4f >= %.1f, off-box bound %.4f <= %d"
          % (rep.c4, construct.BLOCK_BOUNDS["c4_floor"], rep.c0_measured,
             construct.BLOCK_BOUNDS["c0"]))

    print("\n== two-step BMOA construction (256 bits) ==")
    state = construct.build_bmoa(n_max=2)
    for n, step in enumerate(state.steps, start=1):
        print("  step %d: a_%d = %-12s log2 delta = %-7s log2 gap = %s"
              % (n, n, mp.nstr(step["a"], 8),
                 mp.nstr(mp.log(step["delta"], 2), 6),
                 mp.nstr(mp.log(step["gap"], 2), 6)))
    for cert in state.certifications:
        if "step" in cert:
            print("  step %d certified average %.4f >= %.2f"
                  % (cert["step"], float(cert["property2_average"]),
                     1 - state.tol_c))
        else:
            print("  partial-sum seminorms: %s (C_g = %.4f)"
                  % (["%.4f" % v for v in cert["property3_norms"]],
                     cert["C_g"]))

    print("\n== negative control: g = z ==")
    try:
        construct.build_bmoa(symbol=construct.LINEAR_SYMBOL, n_max=2)
    except construct.ConstructionFailure as exc:
        print("  ConstructionFailure: %s" % exc)


if __name__ == "__main__":
    main()
