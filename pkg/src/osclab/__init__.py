"""osclab: correlation decay laboratory for disordered oscillator lattices.

Closed-form position-momentum correlation matrices (eigenstates, thermal
states, quantum quenches) for coupled harmonic oscillators with random spring
constants, disorder-averaged fractional-moment estimators with exponential
decay fits, and a truncated-Fock-space brute-force oracle that validates
every closed form from first principles.
"""

__version__ = "0.1.0"

from .correlations import (
    CorrelationMatrix,
    Eigenstate,
    EnvelopeBound,
    ProductState,
    Thermal,
    block_norm,
    block_norms_all,
    ccr_defect,
    coth,
    eigenfunction_correlator,
    eigenstate_corr,
    eigenstate_sup_envelope,
    evolve_correlations,
    product_block_corr,
    quench_propagator,
    single_site_corr,
    symplectic_form,
    thermal_corr,
)
from .disorder import DisorderConfig, KField, sample_kfield
from .experiments import (
    DecayFit,
    EigencorrScenario,
    EigenstateScenario,
    MomentTable,
    QuenchScenario,
    RunSpec,
    ThermalScenario,
    bound_constant,
    fit_decay,
    run_disorder_average,
    single_site_moment_bound_check,
)
from .fock_oracle import (
    TruncatedSpace,
    build_truncated_H,
    find_eigenstate,
    oracle_corr,
    oracle_corr_series,
    product_initial_density,
)
from .lattice import Decomposition, LatticeBox, decompose, distance, make_box
from .spectral import (
    EffectiveHamiltonian,
    ExcitationVector,
    SpectralData,
    build_h,
    diagonalize,
    func_calc,
    mode_diagonal,
    spectrum_bounds,
)
