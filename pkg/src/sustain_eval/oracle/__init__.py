"""Ground-truth tooling: synthetic datasets and brute-force oracles.

Nothing in this package imports :mod:`sustain_eval.metrics` or
:mod:`sustain_eval.rerank`.
"""

from .frontier import all_objective_vectors, is_dominated, oracle_frontier
from .naive import oracle_breakdown, oracle_label_coverage, oracle_metric
from .rng import SplitMix64
from .synth import SynthConfig, generate, random_config
