"""Cavity-to-nuclear-spin quantum state transfer simulator.

The core package builds every Hamiltonian stage of the model, evolves states
numerically (Schrodinger, Lindblad, conditional no-jump) and through exact
closed forms, and computes transfer times and conditional fidelities with
and without dephasing.  An HTTP service (``qstsim.service``) wraps the core
for multi-client use; the command line client in ``qstsim.cli`` talks to it.
"""

__version__ = "0.1.0"

from .analytic import (
    AmplitudeTriple,
    DephasedConstants,
    amplitudes,
    conditional_fidelity,
    dephased_amplitudes,
    eigen_solution,
)
from .dynamics import (
    EvolutionSpec,
    TimeSeries,
    lindblad_evolve,
    nonhermitian_evolve,
    schrodinger_evolve,
    validate_effective_theory,
)
from .hamiltonians import (
    TimeDependentHamiltonian,
    build_cavity_nv,
    build_dressed_total,
    build_effective,
    build_effective_dephasing,
    build_effective_general,
    build_hyperfine,
    build_rwa_interaction,
)
from .linalg import (
    DensityMatrix,
    HilbertDims,
    Operator,
    StateVector,
    dagger,
    expectation,
    is_hermitian,
    partial_trace,
    tensor,
)
from .model import (
    EffectiveParams,
    HyperfineCoefficients,
    ModelParams,
    coupling_h,
    effective_params,
    hyperfine_coefficients,
    reference_params,
    resonant_params,
    solve_resonance,
)
from .scenario import (
    RunReport,
    ScenarioConfig,
    calibrate_dephasing,
    emit,
    load_config,
    parse_angle,
    run_scenario,
    sweep,
)

__all__ = [
    "__version__",
    "AmplitudeTriple",
    "DephasedConstants",
    "DensityMatrix",
    "EffectiveParams",
    "EvolutionSpec",
    "HilbertDims",
    "HyperfineCoefficients",
    "ModelParams",
    "Operator",
    "RunReport",
    "ScenarioConfig",
    "StateVector",
    "TimeDependentHamiltonian",
    "TimeSeries",
    "amplitudes",
    "build_cavity_nv",
    "build_dressed_total",
    "build_effective",
    "build_effective_dephasing",
    "build_effective_general",
    "build_hyperfine",
    "build_rwa_interaction",
    "calibrate_dephasing",
    "conditional_fidelity",
    "coupling_h",
    "dagger",
    "dephased_amplitudes",
    "effective_params",
    "eigen_solution",
    "emit",
    "expectation",
    "hyperfine_coefficients",
    "is_hermitian",
    "lindblad_evolve",
    "load_config",
    "nonhermitian_evolve",
    "parse_angle",
    "partial_trace",
    "reference_params",
    "resonant_params",
    "run_scenario",
    "schrodinger_evolve",
    "solve_resonance",
    "sweep",
    "tensor",
    "validate_effective_theory",
]
