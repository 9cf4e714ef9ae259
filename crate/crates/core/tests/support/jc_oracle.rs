//! Plain Hermitian Jaynes–Cummings simulation at the normal point.
//!
//! Everything here is built from scratch with dense nalgebra arithmetic:
//! the eigenvectors are written out by hand, the propagator is a Taylor
//! series of one time step raised to integer powers, and no eigensolver or
//! metric is involved.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

pub type M = DMatrix<C>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `H = σ_x/√2` and its eigenvectors `|E+⟩ = (1-i)(1,1)/2`, `|E-⟩ = (1+i)(-1,1)/2`.
pub fn qubit() -> (M, [C; 2], [C; 2]) {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let h = M::from_row_slice(2, 2, &[c(0.0, 0.0), c(w, 0.0), c(w, 0.0), c(0.0, 0.0)]);
    let plus = [c(0.5, -0.5), c(0.5, -0.5)];
    let minus = [c(-0.5, -0.5), c(0.5, 0.5)];
    (h, plus, minus)
}

fn outer(ket: &[C; 2], bra: &[C; 2]) -> M {
    M::from_fn(2, 2, |i, j| ket[i] * bra[j].conj())
}

fn tensor(a: &M, b: &M) -> M {
    let (n, m) = (a.nrows(), b.nrows());
    M::from_fn(n * m, n * m, |i, j| a[(i / m, j / m)] * b[(i % m, j % m)])
}

fn taylor_exp(a: &M) -> M {
    let n = a.nrows();
    let mut term = M::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * a / c(k as f64, 0.0);
        sum += &term;
    }
    sum
}

pub struct Oracle {
    pub h_total: M,
    pub rho0: M,
    pub dim_bath: usize,
}

impl Oracle {
    pub fn new(
        initial: [[f64; 2]; 2],
        g: f64,
        omega_c: f64,
        dim_bath: usize,
        temperature: f64,
    ) -> Self {
        let (h, plus, minus) = qubit();
        let sp = outer(&plus, &minus);
        let sm = sp.adjoint();
        let a = M::from_fn(dim_bath, dim_bath, |i, j| {
            if j == i + 1 {
                c((j as f64).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let n_op = M::from_fn(dim_bath, dim_bath, |i, j| {
            if i == j {
                c(omega_c * i as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let id_b = M::identity(dim_bath, dim_bath);
        let id_s = M::identity(2, 2);
        let h_total = tensor(&h, &id_b)
            + tensor(&id_s, &n_op)
            + (tensor(&sp, &a) + tensor(&sm, &a.adjoint())) * c(g, 0.0);

        // system state in the computational basis from energy-basis populations
        let kets = [minus, plus];
        let mut rho_s = M::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                rho_s += outer(&kets[i], &kets[j]) * c(initial[i][j], 0.0);
            }
        }
        let weights: Vec<f64> = (0..dim_bath)
            .map(|n| (-omega_c * n as f64 / temperature).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        let rho_b = M::from_fn(dim_bath, dim_bath, |i, j| {
            if i == j {
                c(weights[i] / z, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Self {
            h_total,
            rho0: tensor(&rho_s, &rho_b),
            dim_bath,
        }
    }

    /// Reduced system states on the uniform grid `k·dt`, `k = 0..n`.
    pub fn system_states(&self, dt: f64, n: usize) -> Vec<M> {
        let step = taylor_exp(&(&self.h_total * c(0.0, -dt)));
        let dim = self.h_total.nrows();
        let mut u = M::identity(dim, dim);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let rho = &u * &self.rho0 * u.adjoint();
            let d = self.dim_bath;
            out.push(M::from_fn(2, 2, |i, j| {
                (0..d).map(|k| rho[(i * d + k, j * d + k)]).sum()
            }));
            u = &step * &u;
        }
        out
    }
}
