//! Ergotropy of generalized density matrices.

use serde::Serialize;

use crate::bistate::{self, CoefficientMatrix, GeneralizedDensityMatrix};
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyEigensystem, PTHamiltonian, PTParams};
use crate::linalg::{CMatrix, C64};
use crate::thermo::{self, Frame};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErgotropyResult {
    pub work: f64,
    /// `Tr(H ρ_G)`.
    pub active_energy: f64,
    /// `Tr(H ρ^p)`.
    pub passive_energy: f64,
}

/// `𝒲 = |E|(1 - 2ρ¹¹ - λ- + λ+)`.
pub fn ergotropy_closed_form(coeffs: &CoefficientMatrix, params: &PTParams) -> Result<f64> {
    let PTParams { r, s, .. } = *params;
    if r.abs() >= s {
        return Err(Error::BrokenOrExceptional { r, s });
    }
    let (plus, minus) = coeffs.lambdas();
    if plus - minus <= 0.0 {
        return Ok(0.0);
    }
    let energy = ((s * s - r * r) / (2.0 * (r * r + s * s))).sqrt();
    Ok(energy * (1.0 - 2.0 * coeffs.c11.re - minus + plus))
}

/// Real part of `Tr(H ρ)`, rejecting imaginary residue above [`tol::ENERGY_IMAG_ERROR`].
pub(crate) fn real_energy(h: &CMatrix, rho: &CMatrix) -> Result<f64> {
    let value = (h * rho).trace();
    if value.im.abs() > tol::ENERGY_IMAG_ERROR {
        return Err(Error::NonPhysicalEnergy { imag: value.im });
    }
    Ok(value.re)
}

/// `Tr(H ρ_G) - Tr(H ρ^p)` with the passive state built from the numerical spectrum.
pub fn ergotropy_numeric(
    g: &GeneralizedDensityMatrix,
    h: &PTHamiltonian,
) -> Result<ErgotropyResult> {
    let active_energy = real_energy(&h.matrix, &g.matrix)?;
    let (hi, lo) = g.numeric_eigenvalues()?;
    let passive_energy = if hi - lo <= 0.0 {
        active_energy
    } else {
        real_energy(&h.matrix, &bistate::passive_state(g)?.matrix)?
    };
    let work = active_energy - passive_energy;
    if work < -tol::ERGOTROPY_FLOOR {
        return Err(Error::InvalidState(format!(
            "negative ergotropy {work:.3e}"
        )));
    }
    Ok(ErgotropyResult {
        work,
        active_energy,
        passive_energy,
    })
}

/// Ergotropy of a state produced by open evolution.
///
/// The numerical value is authoritative; when the state carries a coefficient
/// matrix the closed form is evaluated as well and must agree within
/// [`tol::ERGOTROPY_AGREEMENT`].
pub fn ergotropy_checked(
    g: &GeneralizedDensityMatrix,
    h: &PTHamiltonian,
) -> Result<ErgotropyResult> {
    let numeric = ergotropy_numeric(g, h)?;
    let closed = ergotropy_closed_form(&g.coeffs, &h.params)?;
    let gap = (closed - numeric.work).abs();
    if gap > tol::ERGOTROPY_AGREEMENT {
        return Err(Error::InvalidState(format!(
            "closed-form and numerical ergotropy differ by {gap:.3e}"
        )));
    }
    Ok(numeric)
}

/// Ergotropy of an evolved system state with its spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OpenErgotropy {
    pub result: ErgotropyResult,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Closed-form value, present when the re-projected coefficients are Hermitian.
    pub closed_form: Option<f64>,
}

/// Ergotropy of a state arriving from open evolution.
///
/// Eigenvalues come from the metric-rotated matrix and the passive state is
/// built from them. When the coefficient matrix `⟨⟨E_i|ρ_G|E_j⟩⟩` is Hermitian
/// within [`tol::CROSS_CHECK_HERMITIAN`] the closed form must agree within
/// [`tol::ERGOTROPY_AGREEMENT`].
pub fn ergotropy_open(
    rho: &CMatrix,
    h: &PTHamiltonian,
    esys: &EnergyEigensystem,
) -> Result<OpenErgotropy> {
    let frame = Frame::from_parts(esys.eta_sqrt.clone(), esys.eta_inv_sqrt.clone());
    let spectrum = thermo::frame_spectrum(rho, &frame)?;
    let (lo, hi) = (spectrum[0], spectrum[1]);
    let active_energy = real_energy(&h.matrix, rho)?;
    let passive_energy = if hi - lo <= 0.0 {
        active_energy
    } else {
        let total = hi + lo;
        let coeffs = CoefficientMatrix::diagonal(
            (hi / total).clamp(0.0, 1.0),
            (lo / total).clamp(0.0, 1.0),
        )?;
        real_energy(&h.matrix, &bistate::build_rho_g(coeffs, esys)?.matrix)?
    };
    let work = active_energy - passive_energy;
    if work < -tol::ERGOTROPY_FLOOR {
        return Err(Error::InvalidState(format!(
            "negative ergotropy {work:.3e}"
        )));
    }

    let raw = CMatrix::from_fn(2, 2, |i, j| {
        esys.duals()[i].dotc(&rho.mul_vec(esys.kets()[j]))
    });
    let drift = raw[(0, 0)]
        .im
        .abs()
        .max(raw[(1, 1)].im.abs())
        .max((raw[(0, 1)] - raw[(1, 0)].conj()).norm());
    let closed_form = if drift <= tol::CROSS_CHECK_HERMITIAN {
        let coherence = 0.5 * (raw[(0, 1)] + raw[(1, 0)].conj());
        let coeffs = CoefficientMatrix {
            c11: C64::new(raw[(0, 0)].re, 0.0),
            c12: coherence,
            c21: coherence.conj(),
            c22: C64::new(raw[(1, 1)].re, 0.0),
        };
        let closed = ergotropy_closed_form(&coeffs, &h.params)?;
        let gap = (closed - work).abs();
        if gap > tol::ERGOTROPY_AGREEMENT {
            return Err(Error::InvalidState(format!(
                "closed-form and numerical ergotropy differ by {gap:.3e}"
            )));
        }
        Some(closed)
    } else {
        log::debug!("skipping closed-form ergotropy cross-check (coefficient drift {drift:.3e})");
        None
    };
    Ok(OpenErgotropy {
        result: ErgotropyResult {
            work,
            active_energy,
            passive_energy,
        },
        lambda_plus: hi,
        lambda_minus: lo,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistate::{build_rho_g, initial_state, InitialState};
    use crate::hamiltonian::{build_pt_hamiltonian, energy_eigensystem};
    use num_complex::Complex64 as C64;

    fn ham(r: f64) -> PTHamiltonian {
        build_pt_hamiltonian(PTParams::anticommutator_class(r, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn closed_form_anchors() {
        let p = PTParams::anticommutator_class(0.0, 1.0).unwrap();
        let excited = CoefficientMatrix::diagonal(0.0, 1.0).unwrap();
        assert!((ergotropy_closed_form(&excited, &p).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let ground = CoefficientMatrix::diagonal(1.0, 0.0).unwrap();
        assert!(ergotropy_closed_form(&ground, &p).unwrap().abs() < 1e-12);
        let mixed = CoefficientMatrix::diagonal(0.5, 0.5).unwrap();
        assert_eq!(ergotropy_closed_form(&mixed, &p).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_rejects_broken_phase() {
        let p = PTParams::anticommutator_class(1.5, 1.0).unwrap();
        let excited = CoefficientMatrix::diagonal(0.0, 1.0).unwrap();
        assert!(matches!(
            ergotropy_closed_form(&excited, &p),
            Err(Error::BrokenOrExceptional { .. })
        ));
    }

    #[test]
    fn numeric_anchors() {
        let h = ham(0.5);
        let e = energy_eigensystem(&h).unwrap();
        let g = initial_state(InitialState::Excited, &e).unwrap();
        let res = ergotropy_checked(&g, &h).unwrap();
        assert!((res.work - 2.0 * 0.3f64.sqrt()).abs() < 1e-10);

        let h0 = ham(0.0);
        let e0 = energy_eigensystem(&h0).unwrap();
        let g = initial_state(InitialState::Intermediate, &e0).unwrap();
        let res = ergotropy_checked(&g, &h0).unwrap();
        assert!((res.work - 0.5f64.sqrt() / 2.0).abs() < 1e-10);

        let passive = bistate::passive_state(&g).unwrap();
        assert!(ergotropy_numeric(&passive, &h0).unwrap().work.abs() < 1e-12);
    }

    #[test]
    fn coherent_state_with_complex_phase() {
        let h = ham(0.8);
        let e = energy_eigensystem(&h).unwrap();
        let coeffs = CoefficientMatrix::new(
            C64::new(0.35, 0.0),
            C64::new(0.1, 0.4),
            C64::new(0.1, -0.4),
            C64::new(0.65, 0.0),
        )
        .unwrap();
        let g = build_rho_g(coeffs, &e).unwrap();
        let res = ergotropy_checked(&g, &h).unwrap();
        assert!(res.work > 0.0);
    }
}
