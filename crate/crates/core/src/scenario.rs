//! End-to-end runs from a flat physical configuration.

use serde::{Deserialize, Serialize};

use crate::bistate::{self, GeneralizedDensityMatrix, InitialState};
use crate::ergotropy;
use crate::error::Result;
use crate::hamiltonian::{self, EnergyEigensystem, PTHamiltonian, PTParams, PhiConvention, Regime};
use crate::open_system::{self, BathSpec, CompositeSystem, Trajectory};
use crate::thermo::{self, ThermoRecord};

/// Physical parameters of one experiment.
///
/// Defaults: `s = 1, g = 0.5, ω_c = 2, d_B = 15, T = 10`, excited state,
/// 400 points on `[0, 20]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub r: f64,
    pub s: f64,
    pub g: f64,
    pub omega_c: f64,
    pub d_bath: usize,
    pub temperature: f64,
    pub initial_state: InitialState,
    pub t_max: f64,
    pub n_steps: usize,
    pub phi_convention: PhiConvention,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            r: 0.0,
            s: 1.0,
            g: 0.5,
            omega_c: 2.0,
            d_bath: 15,
            temperature: 10.0,
            initial_state: InitialState::Excited,
            t_max: 20.0,
            n_steps: 400,
            phi_convention: PhiConvention::Pi,
        }
    }
}

impl Scenario {
    pub fn params(&self) -> Result<PTParams> {
        PTParams::anticommutator_class(self.r, self.s)
    }

    pub fn regime(&self) -> Result<Regime> {
        Ok(hamiltonian::classify_point(&self.params()?))
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        open_system::uniform_times(self.t_max, self.n_steps)
    }

    pub fn bath(&self) -> Result<BathSpec> {
        BathSpec::new(self.omega_c, self.d_bath, self.temperature)
    }

    /// Hamiltonian and energy eigensystem only.
    pub fn closed(&self) -> Result<ClosedSystem> {
        let h = hamiltonian::build_pt_hamiltonian(self.params()?)?;
        let esys = hamiltonian::energy_eigensystem_with(&h, self.phi_convention)?;
        Ok(ClosedSystem { h, esys })
    }

    pub fn build(&self) -> Result<OpenSystem> {
        let ClosedSystem { h, esys } = self.closed()?;
        let bath = self.bath()?;
        let composite = open_system::build_composite(&h, &esys, &bath, self.g)?;
        Ok(OpenSystem {
            scenario: self.clone(),
            h,
            esys,
            bath,
            composite,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ClosedSystem {
    pub h: PTHamiltonian,
    pub esys: EnergyEigensystem,
}

/// One row of the closed-system ergotropy series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedPoint {
    pub t: f64,
    pub ergotropy: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl ClosedSystem {
    /// Ergotropy under the closed evolution `ρ^{ij} ↦ ρ^{ij} e^{-i(E_i - E_j)t}`.
    pub fn ergotropy_series(&self, kind: InitialState, times: &[f64]) -> Result<Vec<ClosedPoint>> {
        let coeffs = kind.coefficients();
        times
            .iter()
            .map(|&t| {
                let g = bistate::build_rho_g(coeffs.closed_evolution(&self.esys, t), &self.esys)?;
                let work = ergotropy::ergotropy_checked(&g, &self.h)?.work;
                let (lambda_plus, lambda_minus) = bistate::lambda_eigenvalues(&g)?;
                Ok(ClosedPoint {
                    t,
                    ergotropy: work,
                    lambda_plus,
                    lambda_minus,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct OpenSystem {
    pub scenario: Scenario,
    pub h: PTHamiltonian,
    pub esys: EnergyEigensystem,
    pub bath: BathSpec,
    pub composite: CompositeSystem,
}

impl OpenSystem {
    pub fn initial_state(&self) -> Result<GeneralizedDensityMatrix> {
        bistate::initial_state(self.scenario.initial_state, &self.esys)
    }

    pub fn evolve(&self) -> Result<Trajectory> {
        self.evolve_on(&self.scenario.times()?)
    }

    pub fn evolve_on(&self, times: &[f64]) -> Result<Trajectory> {
        open_system::evolve(&self.composite, &self.initial_state()?, &self.bath, times)
    }

    pub fn records(&self, traj: &Trajectory) -> Result<Vec<ThermoRecord>> {
        thermo::thermo_records(&self.h, &self.esys, &self.composite, &self.bath, traj)
    }

    /// Evolves and evaluates every thermodynamic quantity on the scenario grid.
    pub fn run(&self) -> Result<Vec<ThermoRecord>> {
        self.records(&self.evolve()?)
    }
}

/// One row of a third-law scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub temperature: f64,
    pub max_entropy: f64,
}

/// Maximum system entropy over the time grid for each bath temperature.
pub fn third_law_scan(base: &Scenario, temperatures: &[f64]) -> Result<Vec<ScanPoint>> {
    thermo::validate_scan_temperatures(temperatures)?;
    temperatures
        .iter()
        .map(|&temperature| {
            let scenario = Scenario {
                temperature,
                ..base.clone()
            };
            let system = scenario.build()?;
            let traj = system.evolve()?;
            Ok(ScanPoint {
                temperature,
                max_entropy: thermo::max_entropy(&system.composite, &traj)?,
            })
        })
        .collect()
}

/// Whether a scan decreases strictly and ends below `bound`.
pub fn third_law_holds(scan: &[ScanPoint], bound: f64) -> bool {
    let decreasing = scan.windows(2).all(|w| w[1].max_entropy < w[0].max_entropy);
    decreasing && scan.last().is_some_and(|p| p.max_entropy < bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_reference_setup() {
        let s = Scenario::default();
        assert_eq!(
            (s.s, s.g, s.omega_c, s.d_bath, s.temperature),
            (1.0, 0.5, 2.0, 15, 10.0)
        );
        assert_eq!((s.t_max, s.n_steps), (20.0, 400));
        assert_eq!(s.regime().unwrap(), Regime::Normal);
    }

    #[test]
    fn closed_series_constants() {
        let closed = Scenario::default().closed().unwrap();
        let times = [0.0, 1.0, 7.5];
        for p in closed
            .ergotropy_series(InitialState::Excited, &times)
            .unwrap()
        {
            assert!((p.ergotropy - 2f64.sqrt()).abs() < 1e-10);
        }
        for p in closed
            .ergotropy_series(InitialState::Ground, &times)
            .unwrap()
        {
            assert!(p.ergotropy.abs() < 1e-12);
        }
        for p in closed
            .ergotropy_series(InitialState::Intermediate, &times)
            .unwrap()
        {
            assert!((p.ergotropy - 0.5f64.sqrt() / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn decoupled_scan_is_flat() {
        let base = Scenario {
            g: 0.0,
            d_bath: 4,
            n_steps: 5,
            t_max: 2.0,
            ..Scenario::default()
        };
        let scan = third_law_scan(&base, &[1.0, 0.1]).unwrap();
        assert!(scan.iter().all(|p| p.max_entropy.abs() < 1e-10));
        assert!(third_law_scan(&base, &[0.1, 1.0]).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<Scenario>(r#"{"r": 0.1, "bogus": 1}"#);
        assert!(err.is_err());
        let ok: Scenario =
            serde_json::from_str(r#"{"r": 0.1, "initial_state": "ground"}"#).unwrap();
        assert_eq!(ok.initial_state, InitialState::Ground);
    }
}
