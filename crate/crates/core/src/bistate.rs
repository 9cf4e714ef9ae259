//! Generalized density matrices on the biorthonormal energy basis.
//!
//! A state is `ρ_G = Σ_ij ρ^{ij} |E_i⟩⟨⟨E_j|` with a Hermitian, positive,
//! unit-trace coefficient matrix. Index 0 (label `1` in `ρ¹¹`) is the ground
//! level `E-`, index 1 the excited level `E+`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyEigensystem, PTParams};
use crate::linalg::{self, CMatrix, C64};
use crate::tol;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Coefficients `ρ^{ij}` of the projectors `|E_i⟩⟨⟨E_j|`, ordered `(E-, E+)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientMatrix {
    pub c11: C64,
    pub c12: C64,
    pub c21: C64,
    pub c22: C64,
}

impl CoefficientMatrix {
    pub fn new(c11: C64, c12: C64, c21: C64, c22: C64) -> Result<Self> {
        let coeffs = Self { c11, c12, c21, c22 };
        coeffs.validate(tol::COEFF_TRACE)?;
        Ok(coeffs)
    }

    /// Diagonal populations of the ground and excited levels.
    pub fn diagonal(ground: f64, excited: f64) -> Result<Self> {
        Self::new(c(ground, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(excited, 0.0))
    }

    /// Pure state `α_-|E-⟩ + α_+|E+⟩`.
    pub fn pure(alpha_minus: C64, alpha_plus: C64) -> Result<Self> {
        Self::new(
            alpha_minus * alpha_minus.conj(),
            alpha_minus * alpha_plus.conj(),
            alpha_plus * alpha_minus.conj(),
            alpha_plus * alpha_plus.conj(),
        )
    }

    fn validate(&self, slack: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCoefficients(msg));
        let all = [self.c11, self.c12, self.c21, self.c22];
        if all.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return bad("non-finite coefficient".into());
        }
        if self.c11.im.abs() > slack || self.c22.im.abs() > slack {
            return bad("populations must be real".into());
        }
        if (self.c11.re + self.c22.re - 1.0).abs() > slack {
            return bad(format!("trace {} != 1", self.c11.re + self.c22.re));
        }
        for p in [self.c11.re, self.c22.re] {
            if p < -slack || p > 1.0 + slack {
                return bad(format!("population {p} outside [0, 1]"));
            }
        }
        if (self.c21 - self.c12.conj()).norm() > slack {
            return bad("coherences must be complex conjugates".into());
        }
        let det = self.c11.re * self.c22.re - self.c12.norm_sqr();
        if det < -tol::COEFF_POSITIVITY.max(slack) {
            return bad(format!("coefficient matrix not positive (det {det})"));
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match (i, j) {
            (0, 0) => self.c11,
            (0, 1) => self.c12,
            (1, 0) => self.c21,
            (1, 1) => self.c22,
            _ => panic!("coefficient index ({i}, {j}) out of range"),
        }
    }

    pub fn as_matrix(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| self.get(i, j))
    }

    /// Extracts `ρ^{ij} = ⟨⟨E_i|ρ_G|E_j⟩⟩` from a generalized density matrix.
    ///
    /// Imaginary drift of the populations and the anti-Hermitian part of the
    /// coherences are discarded once they are checked to be below
    /// [`tol::REPROJECTION`].
    pub fn from_matrix(matrix: &CMatrix, esys: &EnergyEigensystem) -> Result<Self> {
        if matrix.nrows() != 2 || matrix.ncols() != 2 {
            return Err(Error::DimensionMismatch("system state must be 2x2".into()));
        }
        let raw = CMatrix::from_fn(2, 2, |i, j| {
            esys.duals()[i].dotc(&matrix.mul_vec(esys.kets()[j]))
        });
        let coherence = 0.5 * (raw[(0, 1)] + raw[(1, 0)].conj());
        let coeffs = Self {
            c11: c(raw[(0, 0)].re, 0.0),
            c12: coherence,
            c21: coherence.conj(),
            c22: c(raw[(1, 1)].re, 0.0),
        };
        let drift = raw[(0, 0)]
            .im
            .abs()
            .max(raw[(1, 1)].im.abs())
            .max((raw[(0, 1)] - raw[(1, 0)].conj()).norm());
        if drift > tol::REPROJECTION {
            return Err(Error::InvalidCoefficients(format!(
                "re-projected coefficients are not Hermitian (drift {drift:.3e})"
            )));
        }
        coeffs.validate(tol::REPROJECTION)?;
        Ok(coeffs)
    }

    /// Closed-form eigenvalues `(λ+, λ-)`, `λ+ ≥ λ-`, of the coefficient matrix
    /// and hence of `ρ_G`, which is similar to it.
    pub fn lambdas(&self) -> (f64, f64) {
        let radicand = (self.c11.re - self.c22.re).powi(2) + 4.0 * self.c12.norm_sqr();
        let root = radicand.max(0.0).sqrt();
        (0.5 + 0.5 * root, 0.5 - 0.5 * root)
    }

    /// Coefficients after closed evolution for time `t`: `ρ^{ij} e^{-i(E_i - E_j)t}`.
    pub fn closed_evolution(&self, esys: &EnergyEigensystem, t: f64) -> Self {
        let gap = esys.energies()[0] - esys.energies()[1];
        let phase = C64::from_polar(1.0, -gap * t);
        Self {
            c11: self.c11,
            c12: self.c12 * phase,
            c21: self.c21 * phase.conj(),
            c22: self.c22,
        }
    }
}

/// Element-wise closed form of `ρ_G` in the computational basis.
///
/// With `x = √(s+r) + i√(s-r)` and `y = √(s+r) - i√(s-r)`:
///
/// ```text
/// ρ_G¹¹ = (-i x² ρ¹¹ - 2is ρ¹² + 2is ρ²¹ + i y² ρ²²) / 4√(s²-r²)
/// ρ_G¹² = (-2s ρ¹¹ - x² ρ¹² + y² ρ²¹ + 2s ρ²²)       / 4√(s²-r²)
/// ρ_G²¹ = (-2s ρ¹¹ - y² ρ¹² + x² ρ²¹ + 2s ρ²²)       / 4√(s²-r²)
/// ρ_G²² = ( i y² ρ¹¹ + 2is ρ¹² - 2is ρ²¹ - i x² ρ²²) / 4√(s²-r²)
/// ```
pub fn rho_g_closed_form(coeffs: &CoefficientMatrix, params: &PTParams) -> CMatrix {
    let PTParams { r, s, .. } = *params;
    let (p, m) = ((s + r).sqrt(), (s - r).sqrt());
    let x2 = c(p, m) * c(p, m);
    let y2 = c(p, -m) * c(p, -m);
    let pre = c(1.0 / (4.0 * (s * s - r * r).sqrt()), 0.0);
    let i = c(0.0, 1.0);
    let two_s = c(2.0 * s, 0.0);
    let CoefficientMatrix { c11, c12, c21, c22 } = *coeffs;
    let g11 = -i * x2 * c11 - i * two_s * c12 + i * two_s * c21 + i * y2 * c22;
    let g12 = -two_s * c11 - x2 * c12 + y2 * c21 + two_s * c22;
    let g21 = -two_s * c11 - y2 * c12 + x2 * c21 + two_s * c22;
    let g22 = i * y2 * c11 + i * two_s * c12 - i * two_s * c21 - i * x2 * c22;
    CMatrix::from_fn(2, 2, |a, b| {
        pre * match (a, b) {
            (0, 0) => g11,
            (0, 1) => g12,
            (1, 0) => g21,
            _ => g22,
        }
    })
}

/// `Σ_ij ρ^{ij} |E_i⟩⟨⟨E_j|`.
pub fn projector_sum(coeffs: &CoefficientMatrix, esys: &EnergyEigensystem) -> CMatrix {
    let mut acc = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            acc = &acc + &esys.projector(i, j).scale(coeffs.get(i, j));
        }
    }
    acc
}

/// A generalized density matrix together with its biorthonormal coefficients.
#[derive(Clone, Debug)]
pub struct GeneralizedDensityMatrix {
    pub matrix: CMatrix,
    pub coeffs: CoefficientMatrix,
    pub esys: EnergyEigensystem,
}

impl GeneralizedDensityMatrix {
    /// Wraps an evolved `ρ_G` by re-projecting it onto the energy basis.
    pub fn from_matrix(matrix: CMatrix, esys: &EnergyEigensystem) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - c(1.0, 0.0)).norm() > tol::REPROJECTION {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let coeffs = CoefficientMatrix::from_matrix(&matrix, esys)?;
        Ok(Self {
            matrix,
            coeffs,
            esys: esys.clone(),
        })
    }

    /// `η^{1/2} ρ_G η^{-1/2}`, Hermitian with the spectrum of `ρ_G`.
    pub fn rotated(&self) -> CMatrix {
        &(&self.esys.eta_sqrt * &self.matrix) * &self.esys.eta_inv_sqrt
    }

    /// Numerical eigenvalues `(largest, smallest)` from the metric-rotated matrix.
    pub fn numeric_eigenvalues(&self) -> Result<(f64, f64)> {
        let rotated = self.rotated();
        let skew = rotated.max_abs_diff(&rotated.adjoint());
        if skew > tol::IMAG_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "generalized state has complex spectrum (skew {skew:.3e})"
            )));
        }
        let (values, _) = linalg::hermitian_eigen(&rotated)?;
        Ok((values[1], values[0]))
    }
}

pub fn build_rho_g(
    coeffs: CoefficientMatrix,
    esys: &EnergyEigensystem,
) -> Result<GeneralizedDensityMatrix> {
    coeffs.validate(tol::COEFF_TRACE)?;
    let matrix = projector_sum(&coeffs, esys);
    let closed = rho_g_closed_form(&coeffs, &esys.params);
    let mismatch = matrix.max_abs_diff(&closed);
    if mismatch > tol::ALGEBRA {
        return Err(Error::InvalidState(format!(
            "projector sum and closed form disagree by {mismatch:.3e}"
        )));
    }
    let trace = matrix.trace();
    if (trace - c(1.0, 0.0)).norm() > tol::STATE_TRACE {
        return Err(Error::InvalidState(format!("trace {trace} != 1")));
    }
    Ok(GeneralizedDensityMatrix {
        matrix,
        coeffs,
        esys: esys.clone(),
    })
}

/// Closed-form `(λ+, λ-)`, checked against the numerical spectrum of `ρ_G`.
pub fn lambda_eigenvalues(g: &GeneralizedDensityMatrix) -> Result<(f64, f64)> {
    let (plus, minus) = g.coeffs.lambdas();
    let (hi, lo) = g.numeric_eigenvalues()?;
    let gap = (plus - hi).abs().max((minus - lo).abs());
    if gap > tol::LAMBDA_AGREEMENT {
        return Err(Error::InvalidState(format!(
            "closed-form eigenvalues off by {gap:.3e}"
        )));
    }
    Ok((plus, minus))
}

/// Energy-ordered rearrangement: the larger eigenvalue on `E-`, the smaller on `E+`.
pub fn passive_state(g: &GeneralizedDensityMatrix) -> Result<GeneralizedDensityMatrix> {
    let (hi, lo) = g.numeric_eigenvalues()?;
    // eigenvalues sum to one up to rounding; renormalize so the diagonal validates
    let total = hi + lo;
    let coeffs =
        CoefficientMatrix::diagonal((hi / total).clamp(0.0, 1.0), (lo / total).clamp(0.0, 1.0))?;
    build_rho_g(coeffs, &g.esys)
}

/// `Tr(obs · ρ_G)`.
pub fn generalized_expectation(obs: &CMatrix, g: &GeneralizedDensityMatrix) -> Result<C64> {
    if obs.nrows() != 2 || obs.ncols() != 2 {
        return Err(Error::DimensionMismatch("observable must be 2x2".into()));
    }
    Ok((obs * &g.matrix).trace())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Ground,
    Excited,
    /// `(√3/2)|E-⟩ + (1/2)|E+⟩`.
    Intermediate,
}

impl InitialState {
    pub fn coefficients(self) -> CoefficientMatrix {
        let q = 3f64.sqrt() / 4.0;
        let (c11, c12, c22) = match self {
            InitialState::Ground => (1.0, 0.0, 0.0),
            InitialState::Excited => (0.0, 0.0, 1.0),
            InitialState::Intermediate => (0.75, q, 0.25),
        };
        CoefficientMatrix {
            c11: c(c11, 0.0),
            c12: c(c12, 0.0),
            c21: c(c12, 0.0),
            c22: c(c22, 0.0),
        }
    }
}

pub fn initial_state(
    kind: InitialState,
    esys: &EnergyEigensystem,
) -> Result<GeneralizedDensityMatrix> {
    build_rho_g(kind.coefficients(), esys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_pt_hamiltonian, energy_eigensystem, PTHamiltonian};

    fn setup(r: f64) -> (PTHamiltonian, EnergyEigensystem) {
        let h = build_pt_hamiltonian(PTParams::anticommutator_class(r, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        (h, e)
    }

    #[test]
    fn coefficient_validation() {
        assert!(CoefficientMatrix::diagonal(0.3, 0.7).is_ok());
        assert!(CoefficientMatrix::diagonal(0.3, 0.6).is_err());
        assert!(CoefficientMatrix::diagonal(1.2, -0.2).is_err());
        // non-Hermitian coherences
        assert!(
            CoefficientMatrix::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)).is_err()
        );
        // not positive: |c12|² > c11 c22
        assert!(
            CoefficientMatrix::new(c(0.5, 0.0), c(0.6, 0.0), c(0.6, 0.0), c(0.5, 0.0)).is_err()
        );
        assert!(
            CoefficientMatrix::new(c(0.5, 1e-3), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)).is_err()
        );
    }

    #[test]
    fn pure_excited_is_single_projector() {
        let (_, e) = setup(0.0);
        let g = build_rho_g(CoefficientMatrix::diagonal(0.0, 1.0).unwrap(), &e).unwrap();
        let projector = CMatrix::outer(&e.ket_plus, &e.dual_plus);
        assert!(g.matrix.max_abs_diff(&projector) < 1e-15);
        assert!((g.matrix.trace() - c(1.0, 0.0)).norm() < tol::STATE_TRACE);
    }

    #[test]
    fn maximally_mixed_is_half_identity() {
        for r in [0.0, 0.5, 0.9] {
            let (_, e) = setup(r);
            let g = build_rho_g(CoefficientMatrix::diagonal(0.5, 0.5).unwrap(), &e).unwrap();
            assert!(g.matrix.max_abs_diff(&CMatrix::identity(2).scale_re(0.5)) < 1e-12);
        }
    }

    #[test]
    fn ground_matches_closed_form() {
        let (_, e) = setup(0.5);
        let coeffs = CoefficientMatrix::diagonal(1.0, 0.0).unwrap();
        let g = build_rho_g(coeffs, &e).unwrap();
        // ρ_G = |E-⟩⟨⟨E-| at r = 0.5, s = 1
        let x2 = c(1.5f64.sqrt(), 0.5f64.sqrt()).powi(2);
        let pre = 1.0 / (4.0 * 0.75f64.sqrt());
        let expected = CMatrix::from_rows(
            2,
            2,
            &[
                c(0.0, -1.0) * x2 * pre,
                c(-2.0 * pre, 0.0),
                c(-2.0 * pre, 0.0),
                c(0.0, 1.0) * x2.conj() * pre,
            ],
        )
        .unwrap();
        assert!(g.matrix.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let (_, e) = setup(0.5);
        let g = build_rho_g(CoefficientMatrix::diagonal(0.0, 1.0).unwrap(), &e).unwrap();
        let (p, m) = lambda_eigenvalues(&g).unwrap();
        assert!((p - 1.0).abs() < 1e-12 && m.abs() < 1e-12);

        let g = build_rho_g(CoefficientMatrix::diagonal(0.5, 0.5).unwrap(), &e).unwrap();
        let (p, m) = lambda_eigenvalues(&g).unwrap();
        assert!((p - 0.5).abs() < 1e-12 && (m - 0.5).abs() < 1e-12);

        let (_, e0) = setup(0.0);
        let g = initial_state(InitialState::Intermediate, &e0).unwrap();
        let (p, m) = lambda_eigenvalues(&g).unwrap();
        assert!((p - 1.0).abs() < 1e-12 && m.abs() < 1e-12);
    }

    #[test]
    fn passive_state_examples() {
        let (h, e) = setup(0.5);
        let excited = initial_state(InitialState::Excited, &e).unwrap();
        let passive = passive_state(&excited).unwrap();
        assert!(passive.matrix.max_abs_diff(&e.projector(0, 0)) < 1e-12);
        let energy = generalized_expectation(&h.matrix, &passive).unwrap();
        assert!((energy.re + e.energy_abs).abs() < 1e-12);

        let mixed = build_rho_g(CoefficientMatrix::diagonal(0.5, 0.5).unwrap(), &e).unwrap();
        let passive = passive_state(&mixed).unwrap();
        assert!(passive.matrix.max_abs_diff(&mixed.matrix) < 1e-12);

        let skewed = build_rho_g(CoefficientMatrix::diagonal(0.2, 0.8).unwrap(), &e).unwrap();
        let passive = passive_state(&skewed).unwrap();
        assert!((passive.coeffs.c11.re - 0.8).abs() < 1e-12);
        assert!((passive.coeffs.c22.re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let (h, e) = setup(0.5);
        let excited = initial_state(InitialState::Excited, &e).unwrap();
        let energy = generalized_expectation(&h.matrix, &excited).unwrap();
        assert!((energy - c(e.energy_abs, 0.0)).norm() < 1e-12);

        let inter = initial_state(InitialState::Intermediate, &e).unwrap();
        assert!(
            (generalized_expectation(&CMatrix::identity(2), &inter).unwrap() - c(1.0, 0.0)).norm()
                < 1e-12
        );
        // |E|(1/4 − 3/4)
        let energy = generalized_expectation(&h.matrix, &inter).unwrap();
        assert!((energy.re + 0.3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(energy.im.abs() < 1e-12);
    }

    #[test]
    fn initial_states() {
        let (h, e0) = setup(0.0);
        let ground = initial_state(InitialState::Ground, &e0).unwrap();
        // Hermitian limit: dual = right
        let expected = CMatrix::outer(&e0.ket_minus, &e0.ket_minus);
        assert!(ground.matrix.max_abs_diff(&expected) < 1e-15);

        let excited = initial_state(InitialState::Excited, &e0).unwrap();
        let energy = generalized_expectation(&h.matrix, &excited).unwrap();
        assert!((energy.re - e0.energy_abs).abs() < 1e-12);

        let inter = initial_state(InitialState::Intermediate, &e0).unwrap();
        assert!((inter.matrix.trace() - c(1.0, 0.0)).norm() < 1e-12);
        let pure = CoefficientMatrix::pure(c(3f64.sqrt() / 2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(pure.as_matrix().max_abs_diff(&inter.coeffs.as_matrix()) < 1e-15);
    }

    #[test]
    fn reprojection_recovers_coefficients() {
        let (_, e) = setup(0.7);
        let coeffs =
            CoefficientMatrix::new(c(0.6, 0.0), c(0.2, -0.3), c(0.2, 0.3), c(0.4, 0.0)).unwrap();
        let g = build_rho_g(coeffs, &e).unwrap();
        let back = GeneralizedDensityMatrix::from_matrix(g.matrix.clone(), &e).unwrap();
        assert!(back.coeffs.as_matrix().max_abs_diff(&coeffs.as_matrix()) < 1e-12);
    }

    #[test]
    fn closed_evolution_matches_propagator() {
        let (h, e) = setup(0.6);
        let g = initial_state(InitialState::Intermediate, &e).unwrap();
        let t = 2.3;
        let u = linalg::matrix_exp(&h.matrix.scale(c(0.0, -t))).unwrap();
        let u_dd = linalg::matrix_exp(&h.matrix.scale(c(0.0, t))).unwrap();
        let evolved = &(&u * &g.matrix) * &u_dd;
        let by_phase = projector_sum(&g.coeffs.closed_evolution(&e, t), &e);
        assert!(evolved.max_abs_diff(&by_phase) < 1e-12);
    }
}
