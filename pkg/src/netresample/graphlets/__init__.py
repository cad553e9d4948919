"""Graphlet degree vectors for signed simple graphs.

Unsigned orbits follow the standard 0..14 numbering over graphlets with up
to 4 nodes: G0 edge (0); G1 3-path (1 end, 2 center); G2 triangle (3);
G3 4-path (4 end, 5 interior); G4 3-star (6 leaf, 7 center); G5 4-cycle (8);
G6 tailed triangle (9 tail leaf, 10 triangle node off the tail, 11 cut
vertex); G7 diamond (12 degree-2, 13 degree-3); G8 4-clique (14).

Signed orbits refine the <=3-node orbits by edge-sign pattern into the 15
columns listed in :data:`SIGNED_COLUMNS`; summing the columns belonging to
one unsigned orbit reproduces that orbit's count exactly.
"""

from .core import (
    ORBIT_COLUMNS,
    SIGNED_COLUMNS,
    SignedGraph,
    gdv_similarity,
    gdvm_signed,
    gdvm_unsigned,
    random_signed_graph,
    read_graph_tsv,
    write_gdvm,
    write_signed_gdvm,
)
from ._oracle import brute_force_oracle

__all__ = [
    "ORBIT_COLUMNS",
    "SIGNED_COLUMNS",
    "SignedGraph",
    "brute_force_oracle",
    "gdv_similarity",
    "gdvm_signed",
    "gdvm_unsigned",
    "random_signed_graph",
    "read_graph_tsv",
    "write_gdvm",
    "write_signed_gdvm",
]
