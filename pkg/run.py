"""
Simple entry point script for the square-minors command line.

Equivalent to the installed `square-minors` console script, kept for running
straight from a checkout:

    python run.py experiment --experiment thick --family grid_z2 --radii 6,8,10 --m 2..5
"""

from square_minors.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
