"""Residual convergence study across n = 16, 32, 64, both stencil orders.

Writes residuals.csv / residuals.json per order under out/converge-order<k>/
and prints the per-order exit status.
"""

import json
import sys
import tempfile

from eulerwave import cli


def main() -> int:
    status = 0
    for order in (2, 4):
        with tempfile.NamedTemporaryFile("w", suffix=".json",
                                         delete=False) as fh:
            json.dump({"grid": {"order": order}}, fh)
            path = fh.name
        code = cli.main(["converge", "--config", path, "--out",
                         f"out/converge-order{order}"])
        print(f"order {order}: exit {code}")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
