"""Table of phi(-m) for a few sequences, with the exact quadratic oracle alongside.

    python scripts/negative_values.py --m-max 8
"""

import argparse
from dataclasses import dataclass, field

from recurzeta.errors import IsPole, NotQuadratic
from recurzeta.lrs_core import RecurrenceSpec, builtin_sequence
from recurzeta.spectral import normalize
from recurzeta.special_values import phi_negative_integer, quadratic_exact_value


@dataclass
class Config:
    m_max: int = 6
    precision: int = 128
    sequences: list = field(default_factory=lambda: [
        "fibonacci", "lucas", "tribonacci", "nbonacci(4)", "geometric(1,3)"])
    extra: list = field(default_factory=lambda: [RecurrenceSpec(2, (-6, 5), (5, 13), "2^n+3^n")])


def row(spec, m, precision):
    try:
        v = phi_negative_integer(normalize(spec, precision), m)
    except IsPole:
        return "pole", "pole"
    try:
        oracle = str(quadratic_exact_value(spec, m))
    except NotQuadratic:
        oracle = "-"
    return str(v), oracle


def main(cfg: Config):
    specs = [builtin_sequence(n) for n in cfg.sequences] + list(cfg.extra)
    print(f"{'sequence':<16}{'m':>3}  {'phi(-m)':<40}{'exact oracle':<40}")
    for spec in specs:
        for m in range(1, cfg.m_max + 1):
            value, oracle = row(spec, m, cfg.precision)
            flag = "" if oracle in ("-", value) else "  MISMATCH"
            print(f"{spec.label:<16}{m:>3}  {value:<40}{oracle:<40}{flag}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m-max", type=int, default=Config.m_max)
    p.add_argument("--precision", type=int, default=Config.precision)
    args = p.parse_args()
    main(Config(m_max=args.m_max, precision=args.precision))
