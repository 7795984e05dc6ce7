"""Where do the existence conditions start to hold?

Sweeps the polygon size n for the pyramidal and spatial families and
prints one row per problem with the status of each condition.  The
interesting feature is the boundary in n: the drift-ratio bound behind N3
only holds for flat enough potentials (pyramidal n >= 4, spatial n >= 7),
while the weaker N3' certificate kicks in earlier.
"""

import argparse

from schubart import conditions as cond
from schubart import problems as pr

STATUS_MARK = {"pass": "ok", "fail": "X", "not-applicable": "-"}


def row(problem, beta):
    report = cond.condition_report(problem, beta=beta)
    cells = []
    for name in cond.CONDITION_NAMES:
        entry = report.entries[name]
        mark = STATUS_MARK[entry["status"]]
        # attach the deciding number where there is a single obvious one
        if name == "N3" and entry["status"] != "not-applicable":
            ratio = dict(entry["evidence"]).get("max_abs_Wprime_over_W")
            if ratio is not None:
                mark += " (%.3f)" % ratio
        if name == "N3prime" and entry["status"] != "not-applicable":
            end = dict(entry["evidence"]).get("g3_endpoint")
            if end is not None:
                mark += " (%.4f)" % end
        cells.append(mark.ljust(12))
    return "  ".join(cells)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--beta", type=float, default=None,
                    help="comparison level for N3' (default %g)"
                    % cond.DEFAULT_BETA)
    args = ap.parse_args()

    header = "problem".ljust(16) + "  ".join(
        name.ljust(12) for name in cond.CONDITION_NAMES)
    print(header)
    print("-" * len(header))
    for n in range(2, args.n_max + 1):
        print("pyramidal n=%-3d " % n + row(pr.pyramidal(n), args.beta))
    for n in range(2, args.n_max + 1):
        print("spatial   n=%-3d " % n + row(pr.spatial(n), args.beta))
    print("planar    n=10  " + row(pr.planar(10), args.beta))


if __name__ == "__main__":
    main()
