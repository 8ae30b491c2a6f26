"""
Dimension sweeps, reproducibly
==============================

The sweep driver ties the estimator to a config, a cache, and fixed
output formats: ``dim.csv`` (one row per parameter, sorted), ``dim.svg``
(dimension vs parameter with error bars), and a ``dim.log`` sidecar that
is the only place timings go.  Everything else is byte-identical across
reruns -- the CSV embeds a hash of the resolved config so a stray file
can always be traced back to the settings that made it.

This script runs a small sweep twice and diffs the artifacts to show
the determinism contract, then prints the dimension trend.
"""

import argparse
import csv
import pathlib
import tempfile

from repeller_lab import cmd_dim


def run(outdir: str, mus, grid: int, horizon: int, seed: int) -> dict:
    cfg = {
        "family": "hopf2d",
        "mu_values": tuple(mus),
        "grid_n": grid,
        "horizon": horizon,
        "k_min": 3,
        "k_max": 6,
        "seed": seed,
        "out": outdir,
    }
    code = cmd_dim(cfg, jobs=2, cache=False)
    assert code == 0, f"sweep exited with {code}"
    return {p.name: p.read_bytes()
            for p in pathlib.Path(outdir).iterdir()
            if p.suffix != ".log"}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--mu", type=float, nargs="*", default=[0.1, 0.05, 0.02])
    ap.add_argument("--grid", type=int, default=192)
    ap.add_argument("--horizon", type=int, default=60)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        # Rerun into the *same* path: the output directory is part of the
        # resolved config (and its hash), so only an identical config is
        # promised byte-identical artifacts.
        first = run(f"{tmp}/a", args.mu, args.grid, args.horizon, args.seed)
        for name in first:
            pathlib.Path(tmp, "a", name).unlink()
        second = run(f"{tmp}/a", args.mu, args.grid, args.horizon, args.seed)

        # The .log sidecars differ (timestamps); everything else must not.
        same = {k: first[k] == second[k] for k in sorted(first)}
        print("artifact determinism (two fresh runs, same config):")
        for name, ok in same.items():
            print(f"  {name:10s} byte-identical: {ok}")
        assert all(same.values())

        rows = list(csv.DictReader(
            (l for l in first["dim.csv"].decode().splitlines()
             if not l.startswith("#"))))

    print("\n      mu     mu_f        dimension    ci        survivors  flags")
    for r in rows:
        print(f"  {float(r['mu']):7.3f}  {float(r['mu_f']):.6f}   "
              f"{float(r['dimension']):.4f}     {float(r['ci']):.4f}    "
              f"{int(r['survivors']):8d}  {r['flags'] or '-'}")
    print("\nsmaller holes leave fatter repellers: the dimension climbs "
          "toward 2 as mu -> 0.")
    print("(coarse grids inflate the CI; the acceptance-grade run uses "
          "grid_n = 1024, horizon = 500.)")


if __name__ == "__main__":
    main()
