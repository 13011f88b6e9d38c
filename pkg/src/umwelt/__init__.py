"""Extrinsic and intrinsic world partitions of finite sensorimotor loops."""
from .arith import Arithmetic
from .intrinsic import (EquivalenceBasis, IntrinsicResult, brute_force_equivalent, brute_force_partition,
                        build_basis, check_containment, intrinsic_partition)
from .model import (CapExceeded, FiniteSpace, Kernel, LoopModel, ModelError, SensorProcess, compose, gamma,
                    identity, kappa, make_model, sensor_process, simulate, validate)
from .multiagent import TwoAgentModel, agent_view, shared_distinctions, umwelt_table
from .partition import Partition, join, meet
from .refinement import RefinementTrace, check_invariance, refine_step, sigma_beta, w_am, w_sep
from .synthesis import (ModifiedModel, Selector, certify_minimal_model, minimize, select_representatives,
                        synthesize_alpha_prime, verify_equivalence)

__all__ = [
    "Arithmetic", "CapExceeded", "EquivalenceBasis", "FiniteSpace", "IntrinsicResult", "Kernel", "LoopModel",
    "ModelError", "ModifiedModel", "Partition", "RefinementTrace", "Selector", "SensorProcess",
    "TwoAgentModel", "agent_view", "brute_force_equivalent", "brute_force_partition", "build_basis",
    "certify_minimal_model", "check_containment", "check_invariance", "compose", "gamma", "identity",
    "intrinsic_partition", "join", "kappa", "make_model", "meet", "minimize", "refine_step", "select_representatives",
    "sensor_process", "shared_distinctions", "sigma_beta", "simulate", "synthesize_alpha_prime",
    "umwelt_table", "validate", "verify_equivalence", "w_am", "w_sep",
]
