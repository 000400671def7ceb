"""Pole map of a builtin sequence, written as SVG or CSV.

    python scripts/pole_map.py --sequence tribonacci --re-min -6 --out trib.svg
"""

import argparse
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from recurzeta.lrs_core import builtin_sequence
from recurzeta.poles import Window, enumerate_poles, export_pole_map
from recurzeta.spectral import normalize


@dataclass
class Config:
    sequence: str = "fibonacci"
    re_min: float = -8.5
    re_max: float = 0.5
    im_min: float = -20.0
    im_max: float = 20.0
    fmt: str = "svg"
    out: str = "pole_map.svg"
    precision: int = 128


def parse_config() -> Config:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(Config):
        p.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=f.default)
    return Config(**vars(p.parse_args()))


def main(cfg: Config):
    ns = normalize(builtin_sequence(cfg.sequence), cfg.precision)
    groups = enumerate_poles(ns, Window(cfg.re_min, cfg.re_max, cfg.im_min, cfg.im_max))
    Path(cfg.out).write_bytes(export_pole_map(groups, cfg.fmt))
    columns = sorted({round(float(g.location.real.mid()), 6) for g in groups}, reverse=True)
    merged = sum(len(g.tuples) > 1 for g in groups)
    print(f"{cfg.sequence}: {len(groups)} groups ({merged} merged), wrote {cfg.out}")
    print("real parts:", ", ".join(f"{c:g}" for c in columns))


if __name__ == "__main__":
    main(parse_config())
