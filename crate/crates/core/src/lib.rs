//! PT-symmetric qubit in a biorthonormal energy basis, its η-pseudo-unitary
//! evolution against a truncated thermal mode, ergotropy and the laws of
//! thermodynamics along the resulting trajectories.

pub mod bistate;
pub mod ergotropy;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod open_system;
pub mod scenario;
pub mod thermo;
pub mod tol;

pub use bistate::{
    build_rho_g, generalized_expectation, initial_state, lambda_eigenvalues, passive_state,
    rho_g_closed_form, CoefficientMatrix, GeneralizedDensityMatrix, InitialState,
};
pub use ergotropy::{
    ergotropy_checked, ergotropy_closed_form, ergotropy_numeric, ergotropy_open, ErgotropyResult,
    OpenErgotropy,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_pt_hamiltonian, classify_point, energy_eigensystem, energy_eigensystem_with, f_basis,
    f_basis_with, verify_ladder, EnergyEigensystem, FBasis, PTHamiltonian, PTParams, PhiConvention,
    Regime,
};
pub use linalg::{
    eig_general, kron, matrix_exp, matrix_log_psd, partial_trace_bath, partial_trace_system,
    CMatrix, CVector, EigDecomposition, C64,
};
pub use open_system::{
    annihilation_op, build_composite, check_eta_unitarity, evolve, sigma_g_ops, thermal_state,
    uniform_times, BathSpec, CompositeSystem, Propagator, PropagatorKind, Trajectory,
};
pub use scenario::{
    third_law_holds, third_law_scan, ClosedPoint, ClosedSystem, OpenSystem, ScanPoint, Scenario,
};
pub use thermo::{
    entropy_production, heat_exchanged, internal_energy_change, relative_entropy, thermo_records,
    von_neumann_entropy, work_done, Frame, ThermoRecord,
};
