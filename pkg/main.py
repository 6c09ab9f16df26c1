"""
supra-fixpoint - b-suprametric spaces and certified fixed points

Usage:
    python main.py verify-space --kind quadratic --a 1 --scale 2
    python main.py solve --kind absolute --b 1 --rho 0 --map "x/2+1" --psi linear:0.5 --x0 0
    python main.py psi-check --psi rational --b 1
    python main.py demo-discrete --N 200

Every command prints a JSON report on stdout; logs go to stderr.
"""

from supra_fixpoint.cli import main

if __name__ == "__main__":
    main()
