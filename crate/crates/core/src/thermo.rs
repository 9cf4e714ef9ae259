//! Energy balance and entropies along an open trajectory.
//!
//! Generalized states are similar to positive Hermitian matrices through the
//! square root of the metric. Every spectral function is evaluated after that
//! similarity, where Hermitian eigensolvers and clipping apply.

use rayon::prelude::*;
use serde::Serialize;

use crate::ergotropy;
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyEigensystem, PTHamiltonian};
use crate::linalg::{self, kron, CMatrix};
use crate::open_system::{BathSpec, CompositeSystem, Trajectory};
use crate::tol;

/// Similarity `X ↦ F^{1/2} X F^{-1/2}` by the square root of a positive metric.
#[derive(Clone, Debug)]
pub struct Frame {
    pub sqrt: CMatrix,
    pub inv_sqrt: CMatrix,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Self {
            sqrt: CMatrix::identity(n),
            inv_sqrt: CMatrix::identity(n),
        }
    }

    pub fn from_metric(metric: &CMatrix) -> Result<Self> {
        let (sqrt, inv_sqrt) = linalg::sqrt_positive_definite(metric)?;
        Ok(Self { sqrt, inv_sqrt })
    }

    pub fn from_parts(sqrt: CMatrix, inv_sqrt: CMatrix) -> Self {
        Self { sqrt, inv_sqrt }
    }

    /// `F^{1/2} ⊗ I_dim`.
    pub fn lift(&self, dim: usize) -> Self {
        let id = CMatrix::identity(dim);
        Self {
            sqrt: kron(&self.sqrt, &id),
            inv_sqrt: kron(&self.inv_sqrt, &id),
        }
    }

    pub fn dim(&self) -> usize {
        self.sqrt.nrows()
    }

    /// Condition number of the metric `F`.
    pub fn condition(&self) -> f64 {
        match linalg::hermitian_eigen(&self.sqrt) {
            Ok((values, _)) => {
                let lo = values[0];
                let hi = values[values.len() - 1];
                if lo > 0.0 {
                    (hi / lo).powi(2)
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub fn similarity(&self, m: &CMatrix) -> CMatrix {
        &(&self.sqrt * m) * &self.inv_sqrt
    }

    /// Rotated matrix, checked Hermitian within [`tol::FRAME_HERMITICITY`] and symmetrized.
    pub fn rotate(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} state in a frame of dimension {}",
                m.nrows(),
                m.ncols(),
                self.dim()
            )));
        }
        let rotated = self.similarity(m);
        let skew = rotated.max_abs_diff(&rotated.adjoint());
        if skew > tol::FRAME_HERMITICITY {
            return Err(Error::InvalidState(format!(
                "state is not Hermitian in the metric frame (skew {skew:.3e})"
            )));
        }
        Ok(rotated.hermitian_part())
    }
}

/// Ascending spectrum of a generalized state in the given frame.
pub fn frame_spectrum(rho: &CMatrix, frame: &Frame) -> Result<Vec<f64>> {
    let (values, _) = linalg::hermitian_eigen(&frame.rotate(rho)?)?;
    if let Some(&bad) = values.iter().find(|&&v| v < -tol::ENTROPY_NEGATIVITY) {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {bad:.3e}"
        )));
    }
    Ok(values)
}

fn entropy_of_spectrum(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&v| v > tol::EIG_CLIP)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// `-Tr ρ log ρ`, evaluated in the frame where `ρ` is Hermitian.
pub fn von_neumann_entropy(rho: &CMatrix, frame: &Frame) -> Result<f64> {
    Ok(entropy_of_spectrum(&frame_spectrum(rho, frame)?))
}

/// `Tr(ρ log ρ - ρ log σ)`; `+∞` when `ρ` has weight outside the support of `σ`.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix, frame: &Frame) -> Result<f64> {
    let rho_r = frame.rotate(rho)?;
    let sigma_r = frame.rotate(sigma)?;
    let (rho_vals, _) = linalg::hermitian_eigen(&rho_r)?;
    let (sigma_vals, sigma_vecs) = linalg::hermitian_eigen(&sigma_r)?;
    for v in rho_vals.iter().chain(&sigma_vals) {
        if *v < -tol::ENTROPY_NEGATIVITY {
            return Err(Error::InvalidState(format!("negative eigenvalue {v:.3e}")));
        }
    }
    // Tr ρ log σ = Σ_k ⟨v_k|ρ|v_k⟩ log μ_k
    let mut cross = 0.0;
    for (k, &mu) in sigma_vals.iter().enumerate() {
        let v = sigma_vecs.column(k);
        let weight = v.dotc(&rho_r.mul_vec(&v)).re;
        if mu > tol::EIG_CLIP {
            cross += weight * mu.ln();
        } else if weight > tol::SUPPORT {
            log::warn!(
                "relative entropy: weight {weight:.3e} outside support of the reference state"
            );
            return Ok(f64::INFINITY);
        }
    }
    Ok(-entropy_of_spectrum(&rho_vals) - cross)
}

fn real_trace(m: &CMatrix) -> Result<f64> {
    let z = m.trace();
    if z.im.abs() > tol::ENERGY_IMAG_ERROR {
        return Err(Error::NonPhysicalEnergy { imag: z.im });
    }
    if z.im.abs() > tol::ENERGY_IMAG_DISCARD {
        log::debug!("discarding imaginary energy residue {:.3e}", z.im);
    }
    Ok(z.re)
}

/// `dU = Tr[H(ρ_G(t) - ρ_G(0))]`.
pub fn internal_energy_change(h: &PTHamiltonian, traj: &Trajectory, k: usize) -> Result<f64> {
    traj.check_index(k)?;
    real_trace(&(&h.matrix * &(&traj.rho_g[k] - &traj.rho_g[0])))
}

/// `dW = Tr[H_GB(ρ_GB(0) - ρ_GB(t))]`.
pub fn work_done(c: &CompositeSystem, traj: &Trajectory, k: usize) -> Result<f64> {
    traj.check_index(k)?;
    real_trace(&(&c.h_int * &(&traj.rho_gb[0] - &traj.rho_gb[k])))
}

/// `dQ_B = Tr[H_B(ρ_B(t) - ρ_B(0))]`, positive when the bath gains energy.
pub fn heat_exchanged(bath: &BathSpec, traj: &Trajectory, k: usize) -> Result<f64> {
    traj.check_index(k)?;
    real_trace(&(&bath.hamiltonian() * &(&traj.rho_b[k] - &traj.rho_b0)))
}

/// `Σ = S[ρ_GB(t) || ρ_G(t) ⊗ ρ_B(0)]` in the `η^{1/2} ⊗ I` frame.
pub fn entropy_production(c: &CompositeSystem, traj: &Trajectory, k: usize) -> Result<f64> {
    traj.check_index(k)?;
    let reference = kron(&traj.rho_g[k], &traj.rho_b0);
    relative_entropy(&traj.rho_gb[k], &reference, &c.frame)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoRecord {
    pub t: f64,
    pub du: f64,
    pub dw: f64,
    pub dq_b: f64,
    /// `dU - dW + dQ_B`.
    pub first_law_residual: f64,
    pub sigma: f64,
    pub s_vn: f64,
    pub ergotropy: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub trace_rho_g: f64,
}

/// Evaluates every thermodynamic quantity at each trajectory point.
pub fn thermo_records(
    h: &PTHamiltonian,
    esys: &EnergyEigensystem,
    c: &CompositeSystem,
    bath: &BathSpec,
    traj: &Trajectory,
) -> Result<Vec<ThermoRecord>> {
    (0..traj.len())
        .into_par_iter()
        .map(|k| {
            let du = internal_energy_change(h, traj, k)?;
            let dw = work_done(c, traj, k)?;
            let dq_b = heat_exchanged(bath, traj, k)?;
            let erg = ergotropy::ergotropy_open(&traj.rho_g[k], h, esys)?;
            Ok(ThermoRecord {
                t: traj.times[k],
                du,
                dw,
                dq_b,
                first_law_residual: du - dw + dq_b,
                sigma: entropy_production(c, traj, k)?,
                s_vn: von_neumann_entropy(&traj.rho_g[k], &c.system_frame)?,
                ergotropy: erg.result.work,
                lambda_plus: erg.lambda_plus,
                lambda_minus: erg.lambda_minus,
                trace_rho_g: real_trace(&traj.rho_g[k])?,
            })
        })
        .collect()
}

/// Maximum system entropy over a trajectory.
pub fn max_entropy(c: &CompositeSystem, traj: &Trajectory) -> Result<f64> {
    let values: Vec<f64> = traj
        .rho_g
        .par_iter()
        .map(|rho| von_neumann_entropy(rho, &c.system_frame))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Checks that a temperature list is positive and strictly descending.
pub fn validate_scan_temperatures(temperatures: &[f64]) -> Result<()> {
    if temperatures.is_empty() {
        return Err(Error::InvalidBath("empty temperature list".into()));
    }
    if temperatures.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidBath(
            "scan temperatures must be positive".into(),
        ));
    }
    if temperatures.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidBath(
            "scan temperatures must be descending".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistate::{initial_state, InitialState};
    use crate::hamiltonian::{build_pt_hamiltonian, energy_eigensystem, PTParams};
    use crate::open_system::{build_composite, evolve, uniform_times};

    fn c(re: f64, im: f64) -> crate::linalg::C64 {
        crate::linalg::C64::new(re, im)
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_real_diagonal(values)
    }

    #[test]
    fn entropy_examples() {
        let id = Frame::identity(2);
        assert!(von_neumann_entropy(&diag(&[1.0, 0.0]), &id).unwrap().abs() < 1e-10);
        let mixed = von_neumann_entropy(&diag(&[0.5, 0.5]), &id).unwrap();
        assert!((mixed - 2f64.ln()).abs() < 1e-12);
        let p = 1.0 / (1.0 + (-0.2f64).exp());
        let s = von_neumann_entropy(&diag(&[p, 1.0 - p]), &id).unwrap();
        assert!((s - 0.68818).abs() < 1e-5);
        assert!(von_neumann_entropy(&diag(&[1.1, -0.1]), &id).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let id = Frame::identity(2);
        let rho = diag(&[0.7, 0.3]);
        assert!(relative_entropy(&rho, &rho, &id).unwrap().abs() < 1e-14);
        let v = relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), &id).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
        let v = relative_entropy(&rho, &diag(&[0.5, 0.5]), &id).unwrap();
        let expected = 0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln();
        assert!((v - expected).abs() < 1e-12);
        assert!((expected - 0.08228).abs() < 1e-5);
        let v = relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0]), &id).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn system_entropy_is_frame_invariant() {
        let h = build_pt_hamiltonian(PTParams::anticommutator_class(0.8, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let coeffs = crate::bistate::CoefficientMatrix::new(
            c(0.3, 0.0),
            c(0.2, 0.1),
            c(0.2, -0.1),
            c(0.7, 0.0),
        )
        .unwrap();
        let g = crate::bistate::build_rho_g(coeffs, &e).unwrap();
        let frame = Frame::from_parts(e.eta_sqrt.clone(), e.eta_inv_sqrt.clone());
        let in_frame = von_neumann_entropy(&g.matrix, &frame).unwrap();
        let of_coeffs = von_neumann_entropy(&coeffs.as_matrix(), &Frame::identity(2)).unwrap();
        assert!((in_frame - of_coeffs).abs() < 1e-10);
        // the raw matrix is not Hermitian, so the identity frame refuses it
        assert!(von_neumann_entropy(&g.matrix, &Frame::identity(2)).is_err());
    }

    #[test]
    fn decoupled_laws_vanish() {
        let h = build_pt_hamiltonian(PTParams::anticommutator_class(0.5, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let bath = BathSpec::new(2.0, 6, 10.0).unwrap();
        let c = build_composite(&h, &e, &bath, 0.0).unwrap();
        let g0 = initial_state(InitialState::Excited, &e).unwrap();
        let traj = evolve(&c, &g0, &bath, &uniform_times(5.0, 9).unwrap()).unwrap();
        for rec in thermo_records(&h, &e, &c, &bath, &traj).unwrap() {
            assert!(rec.du.abs() < 1e-10);
            assert!(rec.dw.abs() < 1e-10);
            assert!(rec.dq_b.abs() < 1e-10);
            assert!(rec.sigma.abs() < 1e-10);
            assert!(rec.s_vn.abs() < 1e-10);
        }
    }

    #[test]
    fn coupled_laws_hold() {
        let h = build_pt_hamiltonian(PTParams::anticommutator_class(0.5, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let bath = BathSpec::new(2.0, 8, 10.0).unwrap();
        let c = build_composite(&h, &e, &bath, 0.5).unwrap();
        let g0 = initial_state(InitialState::Excited, &e).unwrap();
        let traj = evolve(&c, &g0, &bath, &uniform_times(3.0, 31).unwrap()).unwrap();
        let recs = thermo_records(&h, &e, &c, &bath, &traj).unwrap();
        assert_eq!(recs[0].du, 0.0);
        assert_eq!(recs[0].dw, 0.0);
        assert_eq!(recs[0].dq_b, 0.0);
        assert!(recs[0].sigma.abs() < 1e-12);
        for rec in &recs {
            assert!(rec.first_law_residual.abs() < 1e-8);
            assert!(rec.sigma >= -1e-10);
            assert!(rec.s_vn >= -1e-10 && rec.s_vn <= 2f64.ln() + 1e-10);
        }
        // excited system dumps energy into the bath early on
        assert!(recs[3].dq_b > 0.0);
    }

    #[test]
    fn index_out_of_range() {
        let h = build_pt_hamiltonian(PTParams::anticommutator_class(0.0, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let bath = BathSpec::new(2.0, 3, 1.0).unwrap();
        let c = build_composite(&h, &e, &bath, 0.1).unwrap();
        let g0 = initial_state(InitialState::Ground, &e).unwrap();
        let traj = evolve(&c, &g0, &bath, &[0.0, 1.0]).unwrap();
        assert!(matches!(
            internal_energy_change(&h, &traj, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn scan_temperature_validation() {
        assert!(validate_scan_temperatures(&[10.0, 1.0, 0.1, 1e-3]).is_ok());
        assert!(validate_scan_temperatures(&[1.0, 10.0]).is_err());
        assert!(validate_scan_temperatures(&[1.0, 0.0]).is_err());
        assert!(validate_scan_temperatures(&[]).is_err());
    }
}
