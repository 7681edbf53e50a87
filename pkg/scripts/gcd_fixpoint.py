"""Solve the recursive gcd block over several moduli and report size, rounds and time.

    python scripts/gcd_fixpoint.py
    python scripts/gcd_fixpoint.py --moduli 5 13 31 --strategies seminaive naive
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from folx.extend import HornSystem, least_fixpoint
from folx.parser import parse_program
from folx.syntax import HornBlock
from folx.universe import make_mod_ring

GCD = """
theory ED { const zero, unit; func add/2, sub/2, mul/2; rel lt/2; }
rec gcd/3 {
  gcd(x, y, z) <- lt(x, y), gcd(x, sub(y, x), z);
  gcd(x, y, z) <- lt(y, x), gcd(sub(x, y), y, z);
  gcd(x, y, z) <- y = x, z = x;
}
"""


@dataclass
class Config:
    moduli: list[int] = field(default_factory=lambda: [5, 13, 31, 61])
    strategies: list[str] = field(default_factory=lambda: ["seminaive"])
    # the compositional strategy enumerates |D|^3 per clause and round
    naive_limit: int = 31


@dataclass
class Row:
    modulus: int
    strategy: str
    tuples: int
    rounds: int
    seconds: float
    matches_euclid: bool


def euclid(a: int, b: int) -> int | None:
    if a == 0 or b == 0:
        return a if a == b else None
    while a != b:
        a, b = (a - b, b) if a > b else (a, b - a)
    return a


def run(cfg: Config) -> list[Row]:
    (block,) = [s for s in parse_program(GCD) if isinstance(s, HornBlock)]
    rows = []
    for m in cfg.moduli:
        M = make_mod_ring(m)
        oracle = {(a, b, g) for a in range(m) for b in range(m) if (g := euclid(a, b)) is not None}
        for strategy in cfg.strategies:
            if strategy == "naive" and m > cfg.naive_limit:
                continue
            t0 = time.perf_counter()
            result = least_fixpoint(HornSystem.from_block(block, M), strategy)
            dt = time.perf_counter() - t0
            got = result.relations["gcd"].rows
            rows.append(Row(m, strategy, len(got), result.iterations, round(dt, 4), got == oracle))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--moduli", type=int, nargs="+")
    ap.add_argument("--strategies", nargs="+", choices=["seminaive", "naive"])
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = Config()
    if args.moduli:
        cfg.moduli = args.moduli
    if args.strategies:
        cfg.strategies = args.strategies
    rows = run(cfg)
    if args.json:
        print(json.dumps({"config": asdict(cfg), "rows": [asdict(r) for r in rows]}, indent=2))
        return
    print(f"{'m':>4} {'strategy':>10} {'|gcd|':>7} {'rounds':>6} {'seconds':>8}  euclid")
    for r in rows:
        print(f"{r.modulus:>4} {r.strategy:>10} {r.tuples:>7} {r.rounds:>6} {r.seconds:>8.3f}  {r.matches_euclid}")


if __name__ == "__main__":
    main()
