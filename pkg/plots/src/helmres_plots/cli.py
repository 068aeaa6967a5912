"""Render figures from a JSON spec file: render --spec FILE --out DIR."""

from __future__ import annotations

import argparse
import json

from helmres_plots.figures import FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="helmres-render",
        description="Render benchmark artifacts into static figures")
    parser.add_argument("--spec", required=True,
                        help="JSON file: one figure spec or a list of them")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    with open(args.spec) as f:
        raw = json.load(f)
    specs = raw if isinstance(raw, list) else [raw]
    for d in specs:
        spec = FigureSpec.from_dict(d)
        result = render(spec, args.out)
        for path in result["files"]:
            print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
