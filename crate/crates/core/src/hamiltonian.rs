//! Rescaled two-level PT-symmetric Hamiltonian in its Hermitian basis.
//!
//! For `psi = pi/2` the Hamiltonian `[[i r, s], [s, -i r]]` satisfies
//! `{H, H†} = d·I` with `d = 2(r² + s²)`. After rescaling by `1/√d` the
//! eigenvectors of `F = H†H` form an orthonormal basis `|f⟩, |1-f⟩` on which
//! `H` and `H†` act as ladder operators, and the right/left energy
//! eigenvectors are fixed combinations of those two vectors.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::tol;

/// Raw parameters `(r, s, psi)` of the 2×2 PT-symmetric Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PTParams {
    pub r: f64,
    pub s: f64,
    pub psi: f64,
}

impl PTParams {
    pub fn new(r: f64, s: f64, psi: f64) -> Result<Self> {
        if !(r.is_finite() && s.is_finite() && psi.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if s <= 0.0 {
            return Err(Error::InvalidParams(format!("s must be positive, got {s}")));
        }
        Ok(Self { r, s, psi })
    }

    /// Parameters in the anticommutator class, `psi = pi/2`.
    pub fn anticommutator_class(r: f64, s: f64) -> Result<Self> {
        Self::new(r, s, FRAC_PI_2)
    }

    fn near_exceptional(&self) -> bool {
        (self.s - self.r.abs()).abs() <= tol::EXCEPTIONAL * self.s
    }
}

/// Parameter regime of `(r, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `r = 0`: the rescaled Hamiltonian is Hermitian.
    Normal,
    /// `0 < |r| < s`.
    GenericUnbroken,
    /// `|r| = s`: eigenvectors coalesce.
    Exceptional,
    /// `|r| > s`: complex energies.
    Broken,
}

pub fn classify_point(params: &PTParams) -> Regime {
    if params.near_exceptional() {
        Regime::Exceptional
    } else if params.r.abs() > params.s {
        Regime::Broken
    } else if params.r.abs() <= tol::EXCEPTIONAL * params.s {
        Regime::Normal
    } else {
        Regime::GenericUnbroken
    }
}

/// Choice of the azimuthal phase of `|1-f⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiConvention {
    /// `|1-f⟩ = (-1, i)/√2`.
    #[default]
    Pi,
    /// `|1-f⟩ = (1, -i)/√2`.
    Zero,
}

impl PhiConvention {
    pub fn angle(self) -> f64 {
        match self {
            PhiConvention::Pi => PI,
            PhiConvention::Zero => 0.0,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(1/√d)·[[i r, s], [s, -i r]]` with `d = 2(r² + s²)`, without any phase guard.
pub fn rescaled_matrix(r: f64, s: f64) -> CMatrix {
    let norm = 1.0 / (2.0 * (r * r + s * s)).sqrt();
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(0.0, r * norm),
        (1, 1) => c(0.0, -r * norm),
        _ => c(s * norm, 0.0),
    })
}

/// The rescaled Hamiltonian with `{H, H†} = I`.
#[derive(Clone, Debug)]
pub struct PTHamiltonian {
    pub params: PTParams,
    /// Anticommutator eigenvalue `2(r² + s²)`.
    pub d: f64,
    pub kappa: f64,
    pub matrix: CMatrix,
}

impl PTHamiltonian {
    /// `F = H†H`.
    pub fn f_operator(&self) -> CMatrix {
        &self.matrix.adjoint() * &self.matrix
    }

    /// `{H, H†}`, the identity after rescaling.
    pub fn anticommutator(&self) -> CMatrix {
        let hd = self.matrix.adjoint();
        &(&self.matrix * &hd) + &(&hd * &self.matrix)
    }
}

pub fn build_pt_hamiltonian(params: PTParams) -> Result<PTHamiltonian> {
    if (params.psi - FRAC_PI_2).abs() > tol::PSI {
        return Err(Error::OutsideAnticommutatorClass { psi: params.psi });
    }
    if params.near_exceptional() || params.r.abs() >= params.s {
        return Err(Error::BrokenOrExceptional {
            r: params.r,
            s: params.s,
        });
    }
    let d = 2.0 * (params.r * params.r + params.s * params.s);
    Ok(PTHamiltonian {
        params,
        d,
        kappa: 1.0 / d,
        matrix: rescaled_matrix(params.r, params.s),
    })
}

/// Orthonormal eigenbasis of `F`.
#[derive(Clone, Debug)]
pub struct FBasis {
    /// Eigenvalue `κ(s + r)²` belonging to `ket_f`.
    pub f: f64,
    pub ket_f: CVector,
    pub ket_1mf: CVector,
    pub phi: PhiConvention,
}

pub fn f_basis(h: &PTHamiltonian) -> FBasis {
    f_basis_with(h, PhiConvention::Pi)
}

pub fn f_basis_with(h: &PTHamiltonian, phi: PhiConvention) -> FBasis {
    let PTParams { r, s, .. } = h.params;
    let ket_f = CVector::from_column_slice(&[c(0.0, -FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)]);
    let ket_1mf = match phi {
        PhiConvention::Pi => {
            CVector::from_column_slice(&[c(-FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)])
        }
        PhiConvention::Zero => {
            CVector::from_column_slice(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)])
        }
    };
    FBasis {
        f: h.kappa * (s + r) * (s + r),
        ket_f,
        ket_1mf,
        phi,
    }
}

/// Residual norms of the four ladder relations
/// `H|f⟩ = e^{iφ}√f|1-f⟩`, `H|1-f⟩ = e^{-iφ}√(1-f)|f⟩`,
/// `H†|f⟩ = e^{iφ}√(1-f)|1-f⟩`, `H†|1-f⟩ = e^{-iφ}√f|f⟩`.
pub fn verify_ladder(h: &PTHamiltonian, b: &FBasis) -> [f64; 4] {
    let phi = b.phi.angle();
    let up = C64::from_polar(1.0, phi);
    let down = C64::from_polar(1.0, -phi);
    let sf = b.f.sqrt();
    let s1mf = (1.0 - b.f).max(0.0).sqrt();
    let hd = h.matrix.adjoint();
    let residual = |lhs: CVector, rhs: CVector| (lhs - rhs).norm();
    [
        residual(h.matrix.mul_vec(&b.ket_f), &b.ket_1mf * (up * sf)),
        residual(h.matrix.mul_vec(&b.ket_1mf), &b.ket_f * (down * s1mf)),
        residual(hd.mul_vec(&b.ket_f), &b.ket_1mf * (up * s1mf)),
        residual(hd.mul_vec(&b.ket_1mf), &b.ket_f * (down * sf)),
    ]
}

/// `√f e^{iφ}|1-f⟩⟨f| + √(1-f) e^{-iφ}|f⟩⟨1-f|`, the Hamiltonian assembled in the Hermitian basis.
pub fn hamiltonian_from_basis(b: &FBasis) -> CMatrix {
    let phi = b.phi.angle();
    let a = CMatrix::outer(&b.ket_1mf, &b.ket_f).scale(C64::from_polar(b.f.sqrt(), phi));
    let bm = CMatrix::outer(&b.ket_f, &b.ket_1mf)
        .scale(C64::from_polar((1.0 - b.f).max(0.0).sqrt(), -phi));
    &a + &bm
}

/// Biorthonormal energy eigensystem and the metric `η`.
#[derive(Clone, Debug)]
pub struct EnergyEigensystem {
    pub params: PTParams,
    /// `|E| = √(κ(s² - r²))`.
    pub energy_abs: f64,
    /// `|a| = √((s + r)/(s - r))`.
    pub a_mag: f64,
    pub phi: f64,
    pub ket_plus: CVector,
    pub ket_minus: CVector,
    pub dual_plus: CVector,
    pub dual_minus: CVector,
    /// `Σ_n |E_n⟩⟩⟨⟨E_n|`.
    pub eta: CMatrix,
    pub eta_sqrt: CMatrix,
    pub eta_inv_sqrt: CMatrix,
}

impl EnergyEigensystem {
    /// Right eigenvectors in coefficient order `(E-, E+)`.
    pub fn kets(&self) -> [&CVector; 2] {
        [&self.ket_minus, &self.ket_plus]
    }

    /// Dual eigenvectors in coefficient order `(E-, E+)`.
    pub fn duals(&self) -> [&CVector; 2] {
        [&self.dual_minus, &self.dual_plus]
    }

    /// Energies in coefficient order `(E-, E+)`.
    pub fn energies(&self) -> [f64; 2] {
        [-self.energy_abs, self.energy_abs]
    }

    /// `|E_i⟩⟨⟨E_j|` with indices in coefficient order.
    pub fn projector(&self, i: usize, j: usize) -> CMatrix {
        CMatrix::outer(self.kets()[i], self.duals()[j])
    }

    /// Matrix of overlaps `⟨⟨E_i|E_j⟩⟩`.
    pub fn overlaps(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| self.duals()[i].dotc(self.kets()[j]))
    }

    /// `η⁻¹ H† η`.
    pub fn pseudo_adjoint(&self, op: &CMatrix) -> Result<CMatrix> {
        Ok(&(&self.eta.inverse()? * &op.adjoint()) * &self.eta)
    }
}

pub fn energy_eigensystem(h: &PTHamiltonian) -> Result<EnergyEigensystem> {
    energy_eigensystem_with(h, PhiConvention::Pi)
}

pub fn energy_eigensystem_with(h: &PTHamiltonian, phi: PhiConvention) -> Result<EnergyEigensystem> {
    let PTParams { r, s, .. } = h.params;
    if h.params.near_exceptional() || r.abs() >= s {
        return Err(Error::ExceptionalPoint { r, s });
    }
    let basis = f_basis_with(h, phi);
    let energy_abs = (h.kappa * (s * s - r * r)).sqrt();
    let a_mag = ((s + r) / (s - r)).sqrt();
    let angle = phi.angle();
    // |E±⟩ = (|f⟩ ± |a| e^{±iφ} |1-f⟩)/√2, duals with 1/|a|
    let combine = |weight: f64, phase: f64| {
        (&basis.ket_f + &basis.ket_1mf * C64::from_polar(weight, phase)) * c(FRAC_1_SQRT_2, 0.0)
    };
    let ket_plus = combine(a_mag, angle);
    let ket_minus = combine(-a_mag, -angle);
    let dual_plus = combine(1.0 / a_mag, angle);
    let dual_minus = combine(-1.0 / a_mag, -angle);
    let eta = &CMatrix::outer(&dual_plus, &dual_plus) + &CMatrix::outer(&dual_minus, &dual_minus);
    let (eta_sqrt, eta_inv_sqrt) = linalg::sqrt_positive_definite(&eta)?;
    Ok(EnergyEigensystem {
        params: h.params,
        energy_abs,
        a_mag,
        phi: angle,
        ket_plus,
        ket_minus,
        dual_plus,
        dual_minus,
        eta,
        eta_sqrt,
        eta_inv_sqrt,
    })
}
