"""Reliable simulation of Markovian two-party protocols over noisy channels.

The package simulates two coding schemes over binary symmetric channels with
exact channel-use ledgers, compresses per-segment stuck-position descriptions
with an enumerative two-part code, and evaluates the matching achievable-rate
and description-length bounds, including a certified concave maximization for
the worst-case spectrum.
"""

from .bitstream import BitReader, Bits, BitWriter, MalformedBitstreamError
from .channel import (
    CostLedger,
    NoisePair,
    OracleFailureError,
    oracle_code_cost,
    oracle_deliver,
    oracle_slepian_wolf_cost,
    sample_noise,
    substream,
    transmit_bsc,
)
from .optimizer import (
    CkMatrix,
    NonConvergenceError,
    OptimizationResult,
    assemble_L,
    build_ck,
    ell,
    maximize_s1,
    objective,
    objective_gradient,
)
from .protocol import (
    MarkovianProtocol,
    TransmissionFunction,
    Transcript,
    apply,
    clean_transcript,
    is_linear,
    pack_functions,
    random_protocol,
    read_protocol,
    unpack_functions,
    write_protocol,
)
from .rates import (
    RateBound,
    binary_entropy,
    ell_check,
    ell_entropy_bound,
    entropy,
    l_check,
    rate_scheme1,
    rate_scheme2,
)
from .schemes import (
    InconsistentStuckValueError,
    SimulationResult,
    combined_error_indicator,
    correct_transcript,
    extract_stuck_indicator,
    noisy_run,
    run_scheme1,
    run_scheme2,
    simulate_scheme2,
)
from .stuck_codec import (
    DegenerateSpectrumError,
    DescriptionLength,
    NoSegmentsError,
    Segment,
    SegmentStats,
    SpectrumVector,
    decode,
    decode_with_residual,
    description_length,
    empirical_dist,
    encode,
    expected_counters,
    kn_schedule,
    l_bar,
    parse_segments,
    pi_bar,
    segment_list,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BitReader", "Bits", "BitWriter", "MalformedBitstreamError",
    "CostLedger", "NoisePair", "OracleFailureError", "oracle_code_cost",
    "oracle_deliver", "oracle_slepian_wolf_cost", "sample_noise", "substream",
    "transmit_bsc",
    "CkMatrix", "NonConvergenceError", "OptimizationResult", "assemble_L",
    "build_ck", "ell", "maximize_s1", "objective", "objective_gradient",
    "MarkovianProtocol", "TransmissionFunction", "Transcript", "apply",
    "clean_transcript", "is_linear", "pack_functions", "random_protocol",
    "read_protocol", "unpack_functions", "write_protocol",
    "RateBound", "binary_entropy", "ell_check", "ell_entropy_bound", "entropy",
    "l_check", "rate_scheme1", "rate_scheme2",
    "InconsistentStuckValueError", "SimulationResult", "combined_error_indicator",
    "correct_transcript", "extract_stuck_indicator", "noisy_run", "run_scheme1",
    "run_scheme2", "simulate_scheme2",
    "DegenerateSpectrumError", "DescriptionLength", "NoSegmentsError", "Segment",
    "SegmentStats", "SpectrumVector", "decode", "decode_with_residual",
    "description_length", "empirical_dist", "encode", "expected_counters",
    "kn_schedule", "l_bar", "parse_segments", "pi_bar", "segment_list", "spectrum",
]
