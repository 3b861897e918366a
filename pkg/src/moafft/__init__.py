"""Radix-2 FFT workbench: array algebra, sequential refinements, parallel plans and simulators."""
from .errors import (ArityError, CellShapeError, ConfigError, ContractViolation, DeadlockError,
                     IndexBoundsError, MapError, MoaError, ShapeError, StateError)
from .fftseq import (SeqVariant, StageSpec, bit_reversal_permutation, butterfly_stage, make_weights,
                     naive_dft, random_signal, rel_l2_error, run_sequential_fft)
from .highlevel import fft_high_level
from .msgsim import DistTemplateId, RedistKind, redistribute, run_distributed
from .plan import FftConfig, PlanId, breakpoint_range, plan_fft, run_plan, validate_config
from .runner import compute
from .shmsim import CopyKind, SharedTemplateId, copy_shared_private, run_shared, shared_fft
from .trace import TraceRecord

__version__ = "0.1.0"
