#!/usr/bin/env python3
"""Start the API daemon on a fresh default three-node lab (see gantry.daemon for
flags; --walkthrough preloads the full bring-up)."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gantry.daemon import main

if __name__ == "__main__":
    raise SystemExit(main())
