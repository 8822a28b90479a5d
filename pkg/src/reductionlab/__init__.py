"""Simulation lab for a quantum-reduction model of subjective states.

Superposition/reduction algebra, an amplitude-bias hypothesis in two
variants, a virtual two-channel shock experiment with its trinomial
statistics, a peptide uncertainty calculator and a survival simulator.
"""

from reductionlab.bias import BiasModel, Variant, apply_bias, bias_shift
from reductionlab.errors import (
    AllZeroAmplitudes,
    ConfigError,
    DegenerateP0,
    EmptyGroup,
    IndexOutOfRange,
    NonPositiveInput,
    TooLarge,
    ZeroSigma,
)
from reductionlab.quantum import (
    EXTERNAL,
    Amplitude,
    Branch,
    CMInternal,
    External,
    ObserverChain,
    Superposition,
    born_probabilities,
    first_reduction,
    normalize,
    reduce,
    second_reduction,
)

__version__ = "0.1.0"

__all__ = [
    "AllZeroAmplitudes",
    "Amplitude",
    "BiasModel",
    "Branch",
    "CMInternal",
    "ConfigError",
    "DegenerateP0",
    "EXTERNAL",
    "EmptyGroup",
    "External",
    "IndexOutOfRange",
    "NonPositiveInput",
    "ObserverChain",
    "Superposition",
    "TooLarge",
    "Variant",
    "ZeroSigma",
    "apply_bias",
    "bias_shift",
    "born_probabilities",
    "first_reduction",
    "normalize",
    "reduce",
    "second_reduction",
]
