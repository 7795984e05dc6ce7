"""The analytic ingredients behind the spatial drift-ratio bound.

Three small computations:

1. complete elliptic integrals by two independent routes (adaptive
   quadrature and the arithmetic-geometric mean), which the library
   cross-checks against each other on every call;
2. the envelope 2 E(-cot^2 phi) that dominates 4 |W'| for the spatial
   family, whose maximum 2 E(-1) < 3.83 gives an n-free bound;
3. the sign certificate for the second landmark: a comparison level beta
   plus an explicit integral whose positive total certifies v2 > 0.
"""

import numpy as np

from schubart import conditions as cond
from schubart import problems as pr


def main():
    print("m        K(m) quadrature      K(m) AGM             |gap|")
    for m in (-1.0, -0.5, 0.0, 0.5, 0.9):
        kq, eq = cond.elliptic(m, method="quadrature")
        ka, ea = cond.elliptic(m, method="agm")
        print("%+.2f   %.15f  %.15f  %.1e" % (m, kq, ka, abs(kq - ka)))

    print()
    val = 2.0 * cond.elliptic(-1.0)[1]
    print("envelope maximum 2 E(-1) = %.12f  (< 3.83)" % val)
    for n in (2, 3, 7, 20, 100):
        got = cond.spatial_Wprime_bound(n)
        print("spatial n=%-4d max 4|W'| = %10.4f  vs bound %.4f  %s"
              % (n, got["max_4Wprime"], got["bound"],
                 "ok" if got["pass"] else "VIOLATED"))

    print()
    for beta in (-1.32, -1.40, np.sqrt(2.0) - 2.0):
        try:
            got = cond.v2_certificate(pr.pyramidal(2), beta_hat=beta)
        except Exception as err:  # the bound can be too weak to integrate
            print("beta = %+.4f: %s" % (beta, err))
            continue
        print("beta = %+.4f: integral %.6f, lower bound %+.6f -> %s"
              % (beta, got["integral"], got["lower_bound_g_at_0"],
                 "v2 > 0 certified" if got["pass"] else "inconclusive"))


if __name__ == "__main__":
    main()
