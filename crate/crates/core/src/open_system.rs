//! Qubit coupled to a truncated single-mode thermal bath.
//!
//! The composite Hamiltonian is
//! `H̃ = H ⊗ I + I ⊗ ω_c a†a + g(σ⁺_G ⊗ a + σ⁻_G ⊗ a†)` with the system as the
//! left tensor factor. States evolve as `ρ_GB(t) = U ρ_GB(0) U‡`, where
//! `U = exp(-iH̃t)` and `U‡ = exp(iH̃t)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bistate::GeneralizedDensityMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyEigensystem, PTHamiltonian};
use crate::linalg::{self, kron, CMatrix, C64};
use crate::thermo::Frame;
use crate::tol;

/// Truncated single bosonic mode at temperature `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BathSpec {
    pub omega_c: f64,
    pub dim: usize,
    pub temperature: f64,
    /// Thermal weight of the untruncated distribution above the cutoff.
    pub tail_mass: f64,
}

impl BathSpec {
    pub fn new(omega_c: f64, dim: usize, temperature: f64) -> Result<Self> {
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::InvalidBath(format!(
                "omega_c must be positive, got {omega_c}"
            )));
        }
        if dim < 2 {
            return Err(Error::InvalidBath(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidBath(format!(
                "temperature must be non-negative, got {temperature}"
            )));
        }
        let tail_mass = if temperature == 0.0 {
            0.0
        } else {
            (-omega_c * dim as f64 / temperature).exp()
        };
        Ok(Self {
            omega_c,
            dim,
            temperature,
            tail_mass,
        })
    }

    /// Whether the dropped thermal weight exceeds [`tol::TAIL_MASS_WARNING`].
    pub fn truncation_significant(&self) -> bool {
        self.tail_mass > tol::TAIL_MASS_WARNING
    }

    /// `ω_c a†a`.
    pub fn hamiltonian(&self) -> CMatrix {
        let diag: Vec<f64> = (0..self.dim).map(|n| self.omega_c * n as f64).collect();
        CMatrix::from_real_diagonal(&diag)
    }
}

/// Truncated annihilation operator with `a[n-1, n] = √n`.
pub fn annihilation_op(dim: usize) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::InvalidBath(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Gibbs state of the truncated mode, renormalized on the kept levels.
pub fn thermal_state(bath: &BathSpec) -> Result<CMatrix> {
    if !(bath.temperature.is_finite() && bath.temperature >= 0.0) {
        return Err(Error::InvalidBath(format!(
            "temperature must be non-negative, got {}",
            bath.temperature
        )));
    }
    let weights: Vec<f64> = if bath.temperature == 0.0 {
        (0..bath.dim)
            .map(|n| if n == 0 { 1.0 } else { 0.0 })
            .collect()
    } else {
        (0..bath.dim)
            .map(|n| (-bath.omega_c * n as f64 / bath.temperature).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    Ok(CMatrix::from_real_diagonal(&probs))
}

/// `σ⁺_G = |E+⟩⟨⟨E-|` and `σ⁻_G = |E-⟩⟨⟨E+|`.
pub fn sigma_g_ops(esys: &EnergyEigensystem) -> (CMatrix, CMatrix) {
    (esys.projector(1, 0), esys.projector(0, 1))
}

/// How the propagator is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorKind {
    /// Hermitian eigenbasis of the metric-rotated generator.
    MetricEigen,
    /// Biorthogonal eigenbasis of the generator itself.
    Eigen,
    /// Scaling-and-squaring exponential at every time.
    Direct,
}

/// `U(t) = V e^{-iΛt} V⁻¹` from one decomposition, or a direct exponential
/// when the eigenbasis is ill-conditioned.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub kind: PropagatorKind,
    pub condition_estimate: f64,
    generator: CMatrix,
    values: Vec<C64>,
    right: CMatrix,
    right_inv: CMatrix,
}

impl Propagator {
    pub fn new(generator: &CMatrix, frame: &Frame) -> Result<Self> {
        let rotated = frame.similarity(generator);
        let skew = rotated.max_abs_diff(&rotated.adjoint());
        if skew <= tol::BIORTHO * rotated.max_abs().max(1.0) {
            let condition = frame.condition();
            if condition < tol::EIG_FAST_PATH {
                let (values, w) = linalg::hermitian_eigen(&rotated)?;
                return Ok(Self {
                    kind: PropagatorKind::MetricEigen,
                    condition_estimate: condition,
                    generator: generator.clone(),
                    values: values.into_iter().map(|v| C64::new(v, 0.0)).collect(),
                    right: &frame.inv_sqrt * &w,
                    right_inv: &w.adjoint() * &frame.sqrt,
                });
            }
        }
        match linalg::eig_general(generator) {
            Ok(eig) if eig.condition_estimate < tol::EIG_FAST_PATH => Ok(Self {
                kind: PropagatorKind::Eigen,
                condition_estimate: eig.condition_estimate,
                generator: generator.clone(),
                values: eig.values,
                right_inv: eig.left_vectors.adjoint(),
                right: eig.right_vectors,
            }),
            other => {
                let condition = match other {
                    Ok(eig) => eig.condition_estimate,
                    Err(_) => f64::INFINITY,
                };
                log::debug!(
                    "ill-conditioned eigenbasis ({condition:.3e}); using direct exponentials"
                );
                Ok(Self {
                    kind: PropagatorKind::Direct,
                    condition_estimate: condition,
                    generator: generator.clone(),
                    values: Vec::new(),
                    right: CMatrix::zeros(0, 0),
                    right_inv: CMatrix::zeros(0, 0),
                })
            }
        }
    }

    fn phases(&self, t: f64, sign: f64) -> Vec<C64> {
        self.values
            .iter()
            .map(|&l| (C64::new(0.0, -sign * t) * l).exp())
            .collect()
    }

    fn assemble(&self, diag: &[C64]) -> CMatrix {
        let scaled = CMatrix::from_fn(self.right.nrows(), self.right.ncols(), |i, j| {
            self.right[(i, j)] * diag[j]
        });
        &scaled * &self.right_inv
    }

    /// `U(t) = exp(-iH̃t)`.
    pub fn u(&self, t: f64) -> Result<CMatrix> {
        match self.kind {
            PropagatorKind::Direct => linalg::matrix_exp(&self.generator.scale(C64::new(0.0, -t))),
            _ => Ok(self.assemble(&self.phases(t, 1.0))),
        }
    }

    /// `U‡(t) = exp(iH̃t)`.
    pub fn u_dagger_eta(&self, t: f64) -> Result<CMatrix> {
        match self.kind {
            PropagatorKind::Direct => linalg::matrix_exp(&self.generator.scale(C64::new(0.0, t))),
            _ => Ok(self.assemble(&self.phases(t, -1.0))),
        }
    }

    /// `U(t) ρ U‡(t)` for every time in `times`, evaluated in parallel.
    pub fn conjugate_all(&self, rho: &CMatrix, times: &[f64]) -> Result<Vec<CMatrix>> {
        match self.kind {
            PropagatorKind::Direct => times
                .par_iter()
                .map(|&t| Ok(&(&self.u(t)? * rho) * &self.u_dagger_eta(t)?))
                .collect(),
            _ => {
                // ρ in the eigenbasis picks up e^{-i(λ_i - λ_j)t}
                let inner = &(&self.right_inv * rho) * &self.right;
                let n = inner.nrows();
                Ok(times
                    .par_iter()
                    .map(|&t| {
                        let fwd = self.phases(t, 1.0);
                        let bwd = self.phases(t, -1.0);
                        let evolved =
                            CMatrix::from_fn(n, n, |i, j| inner[(i, j)] * fwd[i] * bwd[j]);
                        &(&self.right * &evolved) * &self.right_inv
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompositeSystem {
    pub h_tilde: CMatrix,
    /// `g(σ⁺_G ⊗ a + σ⁻_G ⊗ a†)`.
    pub h_int: CMatrix,
    /// `I ⊗ ω_c a†a`, acting on the composite space.
    pub h_bath: CMatrix,
    /// `ω_c a†a` on the bath alone.
    pub h_bath_local: CMatrix,
    /// `H ⊗ I`.
    pub h_sys: CMatrix,
    pub sigma_plus_g: CMatrix,
    pub sigma_minus_g: CMatrix,
    /// `η ⊗ I`.
    pub eta_total: CMatrix,
    /// `η^{1/2} ⊗ I` and its inverse.
    pub frame: Frame,
    pub system_frame: Frame,
    pub g: f64,
    pub dim_bath: usize,
    pub propagator: Propagator,
}

impl CompositeSystem {
    pub fn dim(&self) -> usize {
        2 * self.dim_bath
    }

    /// `‖(η⁻¹⊗I) H̃† (η⊗I) - H̃‖_max`.
    pub fn pseudo_hermiticity_residual(&self) -> Result<f64> {
        let eta_inv = self.eta_total.inverse()?;
        let adj = &(&eta_inv * &self.h_tilde.adjoint()) * &self.eta_total;
        Ok(adj.max_abs_diff(&self.h_tilde))
    }
}

pub fn build_composite(
    h: &PTHamiltonian,
    esys: &EnergyEigensystem,
    bath: &BathSpec,
    g: f64,
) -> Result<CompositeSystem> {
    if !g.is_finite() {
        return Err(Error::InvalidParams(format!(
            "coupling must be finite, got {g}"
        )));
    }
    let a = annihilation_op(bath.dim)?;
    let a_dag = a.adjoint();
    let id_b = CMatrix::identity(bath.dim);
    let id_s = CMatrix::identity(2);
    let (sigma_plus_g, sigma_minus_g) = sigma_g_ops(esys);

    let pseudo_gap = esys
        .pseudo_adjoint(&sigma_plus_g)?
        .max_abs_diff(&sigma_minus_g);
    if pseudo_gap > tol::ALGEBRA {
        return Err(Error::InvalidState(format!(
            "ladder operators are not pseudo-adjoint (gap {pseudo_gap:.3e})"
        )));
    }

    if bath.truncation_significant() {
        log::warn!(
            "bath truncation at d_B = {} drops thermal weight {:.4}; state renormalized",
            bath.dim,
            bath.tail_mass
        );
    }
    let h_bath_local = bath.hamiltonian();
    let h_sys = kron(&h.matrix, &id_b);
    let h_bath = kron(&id_s, &h_bath_local);
    let h_int = (&kron(&sigma_plus_g, &a) + &kron(&sigma_minus_g, &a_dag)).scale_re(g);
    let h_tilde = &(&h_sys + &h_bath) + &h_int;

    let system_frame = Frame::from_parts(esys.eta_sqrt.clone(), esys.eta_inv_sqrt.clone());
    let frame = system_frame.lift(bath.dim);
    let propagator = Propagator::new(&h_tilde, &frame)?;
    let composite = CompositeSystem {
        h_tilde,
        h_int,
        h_bath,
        h_bath_local,
        h_sys,
        sigma_plus_g,
        sigma_minus_g,
        eta_total: kron(&esys.eta, &id_b),
        frame,
        system_frame,
        g,
        dim_bath: bath.dim,
        propagator,
    };
    let residual = composite.pseudo_hermiticity_residual()?;
    if residual > tol::BIORTHO {
        return Err(Error::InvalidState(format!(
            "composite Hamiltonian is not pseudo-Hermitian (residual {residual:.3e})"
        )));
    }
    Ok(composite)
}

/// Time series of composite and reduced states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub rho_gb: Vec<CMatrix>,
    pub rho_g: Vec<CMatrix>,
    pub rho_b: Vec<CMatrix>,
    pub rho_g0: GeneralizedDensityMatrix,
    pub rho_b0: CMatrix,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `ρ_G(t_k)` re-projected onto the biorthonormal basis.
    pub fn system_state(&self, k: usize) -> Result<GeneralizedDensityMatrix> {
        self.check_index(k)?;
        GeneralizedDensityMatrix::from_matrix(self.rho_g[k].clone(), &self.rho_g0.esys)
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimes("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidTimes(
            "times must be finite and non-negative".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes("times must be sorted".into()));
    }
    Ok(())
}

/// `n` uniformly spaced times on `[0, t_max]`, endpoints included.
pub fn uniform_times(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidTimes(format!(
            "need t_max > 0 and at least two points, got t_max = {t_max}, n = {n}"
        )));
    }
    let step = t_max / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { t_max } else { k as f64 * step })
        .collect())
}

fn check_trace(label: &str, m: &CMatrix, t: f64) -> Result<()> {
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol::TRAJECTORY_TRACE {
        return Err(Error::InvalidState(format!("Tr {label} = {tr} at t = {t}")));
    }
    Ok(())
}

pub fn evolve(
    c: &CompositeSystem,
    rho_g0: &GeneralizedDensityMatrix,
    bath: &BathSpec,
    times: &[f64],
) -> Result<Trajectory> {
    validate_times(times)?;
    if bath.dim != c.dim_bath {
        return Err(Error::DimensionMismatch(format!(
            "bath dimension {} does not match composite {}",
            bath.dim, c.dim_bath
        )));
    }
    let rho_b0 = thermal_state(bath)?;
    let product = kron(&rho_g0.matrix, &rho_b0);
    let mut rho_gb = c.propagator.conjugate_all(&product, times)?;
    for (state, &t) in rho_gb.iter_mut().zip(times) {
        if t == 0.0 {
            *state = product.clone();
        }
    }
    let reduced: Vec<(CMatrix, CMatrix)> = rho_gb
        .par_iter()
        .map(|m| {
            Ok((
                linalg::partial_trace_bath(m, 2, c.dim_bath)?,
                linalg::partial_trace_system(m, 2, c.dim_bath)?,
            ))
        })
        .collect::<Result<_>>()?;
    let (mut rho_g, mut rho_b): (Vec<_>, Vec<_>) = reduced.into_iter().unzip();
    for (k, &t) in times.iter().enumerate() {
        if t == 0.0 {
            rho_g[k] = rho_g0.matrix.clone();
            rho_b[k] = rho_b0.clone();
        }
    }
    for (k, &t) in times.iter().enumerate() {
        check_trace("rho_GB", &rho_gb[k], t)?;
        check_trace("rho_G", &rho_g[k], t)?;
        check_trace("rho_B", &rho_b[k], t)?;
    }
    Ok(Trajectory {
        times: times.to_vec(),
        rho_gb,
        rho_g,
        rho_b,
        rho_g0: rho_g0.clone(),
        rho_b0,
    })
}

/// `‖U‡(t)U(t) - I‖_F` with both factors from independent exponentials.
pub fn check_eta_unitarity(c: &CompositeSystem, t: f64) -> Result<f64> {
    let u = linalg::matrix_exp(&c.h_tilde.scale(C64::new(0.0, -t)))?;
    let u_dd = linalg::matrix_exp(&c.h_tilde.scale(C64::new(0.0, t)))?;
    Ok((&(&u_dd * &u) - &CMatrix::identity(c.dim())).norm())
}
