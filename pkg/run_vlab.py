#!/usr/bin/env python
"""
Run one affine-vlab command.

    python run_vlab.py constants --set n=3 --set p=2
    python run_vlab.py solve configs/solve_disk.txt -o output/solve
    python run_vlab.py verify --set level=fast

See docs/02-CONFIGURATION.md for every config key.
"""
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from affine_vlab.core.config import settings  # noqa: E402

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)

from affine_vlab.cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
