#!/usr/bin/env python3
"""
Period Congruences - Main Entry Point
Exact period-polynomial computations for Γ₀(N): spaces, Hecke and
Atkin-Lehner operators, Eisenstein classes and congruence verifiers
"""

import sys

from app.cli import run


def main():
    """Main entry point"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
