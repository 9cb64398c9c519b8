#!/usr/bin/env python3
"""Corner maps command line

Runs the angles, trace, mesh-images, winslow, validate and fit sub-commands
from a checkout without installing the package.
"""
# Standard library imports
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

# Local imports
from src.cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
