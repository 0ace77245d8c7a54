#!/usr/bin/env python3
"""Generate a runnable offline demo (mock script, tool fixtures, config).

Usage: python3 scripts/make_demo_run.py [TARGET_DIR]

Prints the CLI invocation that replays the demo deterministically.
"""

import sys

from researchflow.demo import write_demo


def main() -> int:
    target = sys.argv[1] if len(sys.argv) > 1 else "demo"
    paths = write_demo(target)
    print("demo materialized:")
    for key in ("config", "script", "fixtures"):
        print(f"  {key}: {paths[key]}")
    print("\nrun it with:\n  " + paths["command"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
