# Services: one module per area (axiom checks, constructions, the discrete
# example, comparison functions, fixed-point machinery) plus seeded samplers.
