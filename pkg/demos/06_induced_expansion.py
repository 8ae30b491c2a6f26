"""
Inducing until the map expands
==============================

Past the bifurcation the map has one lazy symbol: orbits can linger near
the former circle and accumulate almost no expansion.  The cure is
classical -- don't look at the map, look at its *first-return* version.
Stop each orbit the first time its accumulated expansion floors clear
the per-step threshold; the resulting induced map expands uniformly by
construction, and the certificate is arithmetic, not sampling.

This script builds the induced map at the depth where the deepest slow
words die out, checks the certified floor margins, cross-checks with
sampled derivatives, and bounds the volume of the induced hole (points
whose return never happens).
"""

import argparse

from repeller_lab import (
    HopfModel2D,
    build_induced,
    depth_threshold,
    induced_hole_volume,
    verify_expansion,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--mu", type=float, default=0.1)
    ap.add_argument("--depth", type=int, default=None,
                    help="return-time budget (default: auto from the envelope)")
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = HopfModel2D(args.mu)
    n0 = args.depth or depth_threshold(model.mu_f, model.delta_mu)
    print(f"{model.label}, mu = {args.mu}: inducing with budget n0 = {n0}")

    expander = build_induced(model, n0)
    times = sorted({len(w) for w in expander.words})
    print(f"domain pieces: {len(expander.words)}   "
          f"return times seen: {times[:6]}{' ...' if len(times) > 6 else ''}")

    # Certified margins: every first-crossing word clears its floor budget
    # by construction; the minimum margin is a hard inequality on the
    # derivative of the induced map, no sampling involved.
    worst = min(expander.floor_margin(w) for w in expander.words)
    print(f"certified floor margin (min over pieces): {worst:.4f}")
    print(f"  (floors exceed threshold * return-time by at least this much, "
          f"so the induced\n   inverse contracts by e^-{worst:.4f} beyond "
          f"the required e^(-threshold * tau))")

    # Sampled cross-check: actual singular values along sampled orbits
    # should beat the certified floor, never undercut it.
    check = verify_expansion(expander, samples=args.samples, seed=args.seed)
    print(f"sampled margins over {check.checked} crossings: "
          f"min {check.min_margin:.4f}   certified floor {worst:.4f}   "
          f"passed: {check.passed}")

    # The induced hole: points that never return.  Its volume bound combines
    # the original hole, the depth envelope, and a crude series over word
    # counts -- often astronomically loose, which is fine: any finite bound
    # below 1 with the measured volume under it closes the argument.
    hole = induced_hole_volume(expander, samples=max(args.samples, 50_000),
                               seed=args.seed)
    bound = ("no bound (series diverges)" if hole.trivially_true
             else f"{hole.bound:.3e}")
    print(f"induced-hole volume: measured {hole.measured:.6f} "
          f"+/- {hole.mc_halfwidth:.6f}")
    print(f"  analytic bound: {bound}   (log10 ~ {hole.bound_log10:.1f})")
    print(f"  verdict: {'PASS' if hole.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
