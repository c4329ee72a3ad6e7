"""Regenerate the golden files from the independent oracles.

    python scripts/make_goldens.py [output-dir]
"""
import sys

from curvsym.goldens import write_all

if __name__ == "__main__":
    for path in write_all(sys.argv[1] if len(sys.argv) > 1 else None):
        print(f"wrote {path}")
