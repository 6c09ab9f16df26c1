"""supra-fixpoint: b-suprametric spaces, comparison functions and certified Picard iteration."""

__version__ = "0.1.0"
