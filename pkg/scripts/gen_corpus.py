#!/usr/bin/env python3
"""Write a seeded corpus of instance files for external tooling."""

import argparse
from pathlib import Path

from cstardual import jsonio
from cstardual.generators import GenParams, gen_category, gen_spaceoid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="corpus")
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--scramble", default="unitary",
                        choices=("none", "unitary", "invertible"))
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.count):
        params = GenParams(seed=seed, n_objects=1 + seed % 5,
                           max_base=1 + seed % 6,
                           edge_density=(seed % 11) / 10.0,
                           phase_mode="random", scramble=args.scramble)
        S = gen_spaceoid(params)
        (out / f"spaceoid_{seed:03d}.json").write_text(
            jsonio.dump_json(jsonio.spaceoid_to_json(S)) + "\n")
        cat, oracle = gen_category(params)
        (out / f"category_{seed:03d}.json").write_text(
            jsonio.dump_json(jsonio.category_to_json(cat)) + "\n")
        (out / f"oracle_{seed:03d}.json").write_text(
            jsonio.dump_json(jsonio.spaceoid_to_json(oracle)) + "\n")
    print(f"wrote {3 * args.count} files to {out}/")


if __name__ == "__main__":
    main()
