"""Check the commutative-ring axioms, and the field axiom, in mod(m) for a range of m.

The field axiom should hold exactly when m is prime; every failure comes with
the smallest counterexample found.

    python scripts/ring_axioms.py --max-modulus 16
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from folx.parser import parse_formula, render_formula
from folx.universe import MOD_RING_FUNCTIONS, check_satisfies, make_mod_ring

RING = [
    "forall x, y. add(x, y) = add(y, x)",
    "forall x, y, z. add(add(x, y), z) = add(x, add(y, z))",
    "forall x. add(x, zero) = x",
    "forall x. exists y. add(x, y) = zero",
    "forall x, y. mul(x, y) = mul(y, x)",
    "forall x, y, z. mul(mul(x, y), z) = mul(x, mul(y, z))",
    "forall x. mul(x, unit) = x",
    "forall x, y, z. mul(x, add(y, z)) = add(mul(x, y), mul(x, z))",
]
FIELD = "forall x. x != zero -> exists y. mul(x, y) = unit"


@dataclass
class Config:
    min_modulus: int = 2
    max_modulus: int = 16


def is_prime(m: int) -> bool:
    return m > 1 and all(m % d for d in range(2, int(m**0.5) + 1))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-modulus", type=int, default=Config.min_modulus)
    ap.add_argument("--max-modulus", type=int, default=Config.max_modulus)
    args = ap.parse_args()
    cfg = Config(args.min_modulus, args.max_modulus)
    axioms = [parse_formula(t, MOD_RING_FUNCTIONS) for t in RING + [FIELD]]
    field_ax = axioms[-1]
    disagreements = 0
    for m in range(cfg.min_modulus, cfg.max_modulus + 1):
        report = check_satisfies(make_mod_ring(m), axioms)
        ring_ok = all(r.holds for r in report.results[:-1])
        field_res = report.results[-1]
        disagreements += field_res.holds != is_prime(m)
        note = ""
        if not field_res.holds:
            note = f"  counterexample {dict(field_res.witness.items())}"
        print(f"mod({m:>2})  ring={ring_ok!s:<5}  field={field_res.holds!s:<5}  prime={is_prime(m)!s:<5}{note}")
    print(f"field axiom: {render_formula(field_ax)}")
    print(f"moduli where field-ness and primality disagree: {disagreements}")


if __name__ == "__main__":
    main()
