"""Glue between order specifications and triangulations.

A zn order binds through the complex's H1 projection (edge exponent
vectors to lattice coordinates); a surface_lex order binds through the
Tietze rewriting of edges into the core generators and the relator's
degree-2 vector."""

from __future__ import annotations

from .errors import OrderError
from .orders import (
    OrderOracle,
    SurfaceLexOrder,
    ZnOrder,
    check_edges_positive_or_flip,
    order_from_spec,
)


def oracle_for_complex(spec: dict, tri) -> OrderOracle:
    """Build an oracle over the complex's edge generators from a JSON-style
    order spec."""
    backend = spec.get("backend")
    gens = tri.gens
    if backend == "zn":
        if int(spec["rank"]) != tri.h1.betti:
            raise OrderError(
                f"order rank {spec['rank']} != H1 rank {tri.h1.betti} of the complex"
            )
        return order_from_spec(spec, gens=gens, projection=tri.h1.projection)
    if backend == "surface_lex":
        if tri.dimension != 2:
            raise OrderError("surface_lex orders apply to surface complexes")
        if tri.rewrite is None:
            raise OrderError("complex carries no generator_edges rewriting")
        return order_from_spec(
            spec,
            gens=gens,
            rewrite_profiles=tri.rewrite_profiles(),
            core_rank=len(tri.generator_edges),
            relator_pairs=tri.relator_pairs,
        )
    if backend == "table":
        return order_from_spec(spec, gens=gens)
    raise OrderError(f"unknown order backend {backend!r}")


def edge_signs(oracle: OrderOracle, tri):
    """Positivity signs of all edge loops, or EdgeEquivalentToUnit."""
    names = tri.gens.names if tri.dimension == 2 else tri.edge_names
    words = [tri.edge_word(e) for e in range(tri.n_edges if tri.dimension == 3 else tri.n_edges)]
    return check_edges_positive_or_flip(oracle, words, names=names)
