"""Joint coreset and quantizer configuration under a communication budget."""
from .coreset import WeightedCoreset, apply_quantizer, build_rcc, merge
from .data import Dataset, load_dataset, normalize
from .distributed import Envelope, allocate, compute_envelope, partition_random, run_mecbd
from .errors import BudgetError, ConfigurationError, DomainError, InputParseError, NumericError, QCoresetError
from .evaluation import TaskSpec, eval_task
from .kernels import BACKEND
from .optimizer import METHODS, Config, combine_errors, optimize
from .quantizer import QuantizerSpec, RoundingQuantizer, delta_bound, quantize_points

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BudgetError", "Config", "ConfigurationError", "Dataset", "DomainError", "Envelope",
    "InputParseError", "METHODS", "NumericError", "QCoresetError", "QuantizerSpec", "RoundingQuantizer",
    "TaskSpec", "WeightedCoreset", "allocate", "apply_quantizer", "build_rcc", "combine_errors",
    "compute_envelope", "delta_bound", "eval_task", "load_dataset", "merge", "normalize",
    "optimize", "partition_random", "quantize_points", "run_mecbd",
]
