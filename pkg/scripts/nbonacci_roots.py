"""Dominant roots, shifts and q-ratios of the N-bonacci family."""

import argparse
from dataclasses import dataclass

from recurzeta.lrs_core import MAX_NBONACCI, nbonacci
from recurzeta.spectral import normalize, spectral_data


@dataclass
class Config:
    n_min: int = 2
    n_max: int = MAX_NBONACCI
    precision: int = 256
    digits: int = 25


def main(cfg: Config):
    prev = None
    print(f"{'N':>3}  {'dominant root':<{cfg.digits + 8}}{'n0':>4}  {'q':>10}  increasing")
    for n in range(cfg.n_min, cfg.n_max + 1):
        spec = nbonacci(n)
        root = spectral_data(spec, cfg.precision).alphas[0].real
        ns = normalize(spec, cfg.precision)
        inc = "" if prev is None else str(bool(prev < root))
        print(f"{n:>3}  {root.str(cfg.digits, radius=True):<{cfg.digits + 8}}"
              f"{ns.shift_n0:>4}  {ns.q_ratio:>10.4g}  {inc}")
        prev = root


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max", type=int, default=Config.n_max)
    p.add_argument("--precision", type=int, default=Config.precision)
    a = p.parse_args()
    main(Config(n_max=a.n_max, precision=a.precision))
