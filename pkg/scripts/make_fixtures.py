"""Regenerate the JSON fixtures under tests/fixtures from their generator specs."""

import argparse
from pathlib import Path

from hdxwalk.generators import GeneratorSpec, generate
from hdxwalk.io import complex_to_json, faceset_to_json, write_json

SPECS = {
    "triangle": GeneratorSpec("complete", {"m": 3, "n": 2}),
    "k4": GeneratorSpec("complete", {"m": 4, "n": 2}),
    "complete-6-2": GeneratorSpec("complete", {"m": 6, "n": 2}),
    "complete-7-3": GeneratorSpec("complete", {"m": 7, "n": 3}),
    "random-pure-12-2-p0.6-s7": GeneratorSpec("random-pure", {"m": 12, "n": 2, "p": 0.6}, 7),
    "random-pure-9-3-p0.6-s1": GeneratorSpec("random-pure", {"m": 9, "n": 3, "p": 0.6}, 1),
    **{
        f"regular-40-{s}-s1": GeneratorSpec("regular-graph-matching", {"v": 40, "s": s, "dim": 2}, 1)
        for s in (8, 16, 32)
    },
    "regular-1d-40-8-s1": GeneratorSpec("regular-graph-matching", {"v": 40, "s": 8, "dim": 1}, 1),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parents[1] / "tests" / "fixtures", type=Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, spec in SPECS.items():
        out = generate(spec)
        write_json(args.out / f"{name}.json", complex_to_json(out[1], metadata=out[-1]))
        if spec.kind == "regular-graph-matching":
            write_json(args.out / f"{name}.matching.json", faceset_to_json(out[2]))
        print(name, out[0])
    write_json(args.out / "k4.matching.json", {"k": 1, "faces": [[0, 1], [2, 3]]})


if __name__ == "__main__":
    main()
