#!/usr/bin/env python3
"""
Launcher for the entangle command line
"""

import os
import sys


def main():
    # Make the package importable without installing it
    script_dir = os.path.dirname(os.path.abspath(__file__))
    sys.path.insert(0, os.path.join(script_dir, 'src'))

    from entangle.cli.main import main as entangle_main

    try:
        sys.exit(entangle_main())
    except KeyboardInterrupt:
        sys.stderr.write("\ninterrupted\n")
        sys.exit(130)


if __name__ == "__main__":
    main()
