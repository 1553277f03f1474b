"""holoflow: numerics for semigroups of holomorphic self-maps of the disc."""

__version__ = "0.1.0"
