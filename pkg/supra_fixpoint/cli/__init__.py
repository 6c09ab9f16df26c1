"""Command-line surface: argparse tree, handlers and the expression DSL."""

import sys
from typing import Optional, Sequence

from supra_fixpoint.cli.commands import run


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


__all__ = ["main", "run"]
