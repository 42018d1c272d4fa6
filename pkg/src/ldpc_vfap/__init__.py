"""Reweighted belief-propagation decoding of LDPC codes.

Standard BP, uniformly reweighted BP and the variable-FAP reweighted decoder,
with Tanner-graph cycle counting, PEG construction and an AWGN Monte Carlo
harness.
"""

from ldpc_vfap.code_model import (
    DegreeProfile,
    ParityCheckMatrix,
    average_connectivity,
    empirical_connectivity,
    from_dense,
    read_alist,
    syndrome,
    write_alist,
)
from ldpc_vfap.construction import (
    ConstructionSpec,
    fixture_complete_bipartite,
    fixture_tree_code,
    peg_construct,
)
from ldpc_vfap.cycles import CycleCensus, census, count_cycles_of_length
from ldpc_vfap.decoder import (
    DecodeResult,
    DecoderConfig,
    ReweightVector,
    Variant,
    assign_faps,
    decode,
)

__version__ = "0.1.0"

__all__ = [
    "ConstructionSpec",
    "CycleCensus",
    "DecodeResult",
    "DecoderConfig",
    "DegreeProfile",
    "ParityCheckMatrix",
    "ReweightVector",
    "Variant",
    "assign_faps",
    "average_connectivity",
    "census",
    "count_cycles_of_length",
    "decode",
    "empirical_connectivity",
    "fixture_complete_bipartite",
    "fixture_tree_code",
    "from_dense",
    "peg_construct",
    "read_alist",
    "syndrome",
    "write_alist",
]
