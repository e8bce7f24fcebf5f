"""Minimum-weight perfect matching decoding with exact and local matching."""

__version__ = "0.1.0"

from .blossom import PerfectMatching, WeightedGraph, brute_force_mwpm, check_certificate, solve_mwpm
from .codes import (CodeInstance, NoiseSample, logical_failure, repetition_code, sample_noise,
                    toric_2d, toric_3d_phenomenological)
from .decoder import Decoder, DecodeResult, SyndromeGraph
from .exceptions import DecodeError, GraphValidationError, InfeasibleMatchingError
from .graph import CheckMatrix, Edge, MatchingGraph, from_check_matrix, weight_from_probability
from .paths import DijkstraScratch, dijkstra_full, local_dijkstra, recover_path, reset

__all__ = [
    "CheckMatrix",
    "CodeInstance",
    "DecodeError",
    "DecodeResult",
    "Decoder",
    "DijkstraScratch",
    "Edge",
    "GraphValidationError",
    "InfeasibleMatchingError",
    "MatchingGraph",
    "NoiseSample",
    "PerfectMatching",
    "SyndromeGraph",
    "WeightedGraph",
    "brute_force_mwpm",
    "check_certificate",
    "dijkstra_full",
    "from_check_matrix",
    "local_dijkstra",
    "logical_failure",
    "recover_path",
    "repetition_code",
    "reset",
    "sample_noise",
    "solve_mwpm",
    "toric_2d",
    "toric_3d_phenomenological",
    "weight_from_probability",
]
