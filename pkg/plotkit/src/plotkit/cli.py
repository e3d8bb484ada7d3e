"""Command line entry point: ``plotkit --spec <file>``.

The spec file is a JSON object with the PlotSpec fields.  Failures
print one ``PLOTKIT-ERROR`` line with a JSON payload and exit 2, the
same convention the dirsec CLI uses.
"""

import argparse
import json
import sys

from plotkit.kit import render, spec_from_json


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="render a dirsec results CSV")
    parser.add_argument("--spec", required=True,
                        help="JSON file with PlotSpec fields")
    args = parser.parse_args(argv)
    try:
        result = render(spec_from_json(args.spec))
    except Exception as exc:  # one uniform machine-readable failure path
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(f"PLOTKIT-ERROR {json.dumps(payload)}", file=sys.stderr)
        return 2
    print(f"wrote {result.output_image} "
          f"({result.model.kind}, {len(result.model.series)} series)"
          if result.model.series else
          f"wrote {result.output_image} ({result.model.kind})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
