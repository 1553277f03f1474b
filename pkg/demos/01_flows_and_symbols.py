"""Tour 1: semigroup flows, classification, Koenigs and gamma symbols.

Integrates the five-member generator corpus, checks two closed-form flows,
and evaluates the Koenigs conjugation identity for an elliptic and a
parabolic member.
"""

import cmath
import math

import numpy as np

from holoflow.semigroup import Generator, classify, flow, koenigs

CORPUS = ("i*z", "-z", "-z*(1 + z)/(1 - z)", "(1 - z)^2", "z^2 - 1")


def main():
    print("== classification of the generator corpus ==")
    for src in CORPUS:
        cls = classify(Generator.from_source(src))
        print("  G = %-22s %-10s tau = %-8s lambda = %s"
              % (src, cls.kind, np.round(cls.tau, 6), np.round(cls.lam, 6)))

    print("\n== closed-form flow checks ==")
    z0, t = 0.3 + 0.2j, 1.25
    for src, exact in (("-z", math.exp(-t) * z0),
                       ("(1 - z)^2", (z0 + t * (1 - z0)) / (1 + t * (1 - z0)))):
        end = flow(Generator.from_source(src), z0, t).endpoint
        print("  G = %-12s phi_t(z0) = %s   |error| = %.2e"
              % (src, np.round(end, 10), abs(end - exact)))

    print("\n== Koenigs conjugation ==")
    gen = Generator.from_source("-z*(1 + z)/(1 - z)")
    cls = classify(gen)
    h, _ = koenigs(gen)
    w = flow(gen, 0.25, 0.8).endpoint
    lhs, rhs = complex(h(w)), cmath.exp(-cls.lam * 0.8) * complex(h(0.25))
    print("  elliptic:  h(phi_t(z)) = %s" % np.round(lhs, 10))
    print("             e^{-lambda t} h(z) = %s" % np.round(rhs, 10))
    gen = Generator.from_source("(1 - z)^2")
    h, _ = koenigs(gen)
    w = flow(gen, 0.1j, 0.6).endpoint
    print("  parabolic: h(phi_t(z)) - h(z) = %s  (expected %s)"
          % (np.round(complex(h(w)) - complex(h(0.1j)), 10), 0.6j))


if __name__ == "__main__":
    main()
