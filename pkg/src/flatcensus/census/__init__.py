"""Automorphism-weighted census of square-tiled surfaces: models, enumerators, sharded runner and storage."""
