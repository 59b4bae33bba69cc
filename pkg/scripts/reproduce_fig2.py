"""Covert rate versus noise uncertainty for the bounded and unbounded priors.

Runs the fig2a (log-uniform, axis rho_db) and fig2b (log-normal, axis
sigma_delta_db) presets, one sweep per epsilon.
"""

import argparse

from covertnu import experiments


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--epsilons", default=",".join(map(str, experiments.FIG2_EPSILONS)),
                        help="comma-separated covertness levels")
    parser.add_argument("--gnuplot", action="store_true")
    args = parser.parse_args()
    epsilons = tuple(float(e) for e in args.epsilons.split(","))

    for figure in ("fig2a", "fig2b"):
        for spec in experiments.preset(figure, epsilons):
            result = experiments.run_sweep(spec)
            paths = experiments.save(result, args.out_dir, gnuplot=args.gnuplot)
            last = result.rows[-1]
            print(f"{spec.name}: rate {last['rate']:.4f} at {spec.axis}={last[spec.axis]:g}"
                  f"  -> {paths['csv']}")


if __name__ == "__main__":
    main()
