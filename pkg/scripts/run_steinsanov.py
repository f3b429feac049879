#!/usr/bin/env python3
"""Type-II exponent experiment: empirical window-rule rates vs the limit.

Prints the CSV emitted by `winfer steinsanov` for a weighted binary instance
and a plain one, over n in {25, 50, 100, 200}.
"""

import json
import sys
import tempfile

from winfer.cli import main as winfer_main

WEIGHTED = {
    "schema": 1,
    "seed": 1,
    "distributions": [{"pmf": [0.5, 0.5]}, {"pmf": [0.25, 0.75]}],
    "weight": {"kind": "table", "values": [2.0, 1.0]},
    "quantities": ["stein-sanov-limit"],
}
PLAIN = dict(WEIGHTED, weight={"kind": "constant", "c": 1.0})


def main() -> int:
    for label, spec in (("weighted", WEIGHTED), ("plain", PLAIN)):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(spec, fh)
            path = fh.name
        print(f"# {label}")
        code = winfer_main(["steinsanov", "--spec", path,
                            "--n-list", "25,50,100,200", "--eta", "0.05",
                            "--method", "exact"])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
