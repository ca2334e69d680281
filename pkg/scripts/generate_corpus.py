#!/usr/bin/env python3
"""Regenerate the packaged corpus (model files and manifest) from the builders.

The builders in pacheck.casestudies are the source of truth; this script
renders them to disk.  The test suite asserts the shipped files match the
builder output byte for byte, so rerun this after changing a builder.
"""

import argparse
from pathlib import Path

from pacheck.casestudies import corpus_file_texts

_DEFAULT_OUT = Path(__file__).resolve().parent.parent / "src" / "pacheck" / "corpus"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=_DEFAULT_OUT, help="target directory")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(corpus_file_texts().items()):
        (args.out / name).write_text(text, encoding="utf-8")
        print(f"wrote {args.out / name}")


if __name__ == "__main__":
    main()
