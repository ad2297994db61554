//! Truncated Fock-space model of one- and two-mode Gaussian states.
//!
//! States are built from their physical preparation (thermal seed,
//! squeezer, rotation, displacement, beam splitter) by exponentiating
//! truncated generators, and compared through the definition
//! `F = (Tr √(√ρ σ √ρ))²`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Extra levels used while exponentiating generators, dropped afterwards.
const PADDING: usize = 40;
/// Eigenvalues of ρ below this are treated as zero when taking √ρ.
const EIGEN_FLOOR: f64 = 1e-15;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Annihilation operator on `{|0⟩, …, |dim-1⟩}`.
pub fn annihilation(dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    m
}

/// `exp(A)` for anti-Hermitian `A`, through the spectrum of `iA`.
pub fn exp_anti_hermitian(a: &CMatrix) -> CMatrix {
    let h = a * Complex64::i();
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l)));
    v * phases * v.adjoint()
}

fn thermal(dim: usize, mu: f64) -> CMatrix {
    let nbar = 0.5 * (mu - 1.0);
    let q = nbar / (nbar + 1.0);
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = c(q.powi(n as i32) / (nbar + 1.0));
    }
    m
}

/// Density matrix of the single-mode Gaussian state with covariance `cov`
/// (vacuum = identity) and first moments `mean`, truncated to `dim` levels.
///
/// Uses `ρ = D R S ρ_th S† R† D†` where the Williamson data come from the
/// eigen-decomposition of `cov`.
pub fn single_mode_density(cov: [[f64; 2]; 2], mean: [f64; 2], dim: usize) -> CMatrix {
    let big = dim + PADDING;
    let sym = nalgebra::Matrix2::new(cov[0][0], cov[0][1], cov[1][0], cov[1][1]);
    let mu = sym.determinant().sqrt();
    let eig = sym.symmetric_eigen();
    let (i_min, i_max) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let r = 0.25 * (eig.eigenvalues[i_max] / eig.eigenvalues[i_min]).ln();
    let v = eig.eigenvectors.column(i_min);
    let phi = v[1].atan2(v[0]);

    let a = annihilation(big);
    let ad = a.adjoint();
    let squeeze = exp_anti_hermitian(&((&a * &a - &ad * &ad) * c(0.5 * r)));
    let rotate = CMatrix::from_diagonal(&DVector::from_fn(big, |n, _| Complex64::from_polar(1.0, phi * n as f64)));
    let alpha = Complex64::new(mean[0], mean[1]) / 2f64.sqrt();
    let displace = exp_anti_hermitian(&(&ad * alpha - &a * alpha.conj()));
    let u = displace * rotate * squeeze;
    let rho = &u * thermal(big, mu) * u.adjoint();
    rho.view((0, 0), (dim, dim)).into_owned()
}

/// Basis `|n₁, n₂⟩` with `n₁ + n₂ ≤ n_total`.
#[derive(Debug, Clone)]
pub struct TwoModeBasis {
    pub n_total: usize,
    states: Vec<(usize, usize)>,
}

impl TwoModeBasis {
    pub fn new(n_total: usize) -> Self {
        let mut states = Vec::new();
        for total in 0..=n_total {
            for n1 in 0..=total {
                states.push((n1, total - n1));
            }
        }
        Self { n_total, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, n1: usize, n2: usize) -> Option<usize> {
        let t = n1 + n2;
        (t <= self.n_total).then(|| t * (t + 1) / 2 + n1)
    }

    /// Annihilation operator of mode `k ∈ {0, 1}`.
    pub fn annihilation(&self, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (j, &(n1, n2)) in self.states.iter().enumerate() {
            let (n, target) = if k == 0 {
                (n1, n1.checked_sub(1).map(|m1| (m1, n2)))
            } else {
                (n2, n2.checked_sub(1).map(|m2| (n1, m2)))
            };
            if let Some((t1, t2)) = target {
                let i = self.index(t1, t2).expect("lower state is in the basis");
                m[(i, j)] = c((n as f64).sqrt());
            }
        }
        m
    }

    /// `ρ₁ ⊗ ρ₂` restricted to the basis.
    pub fn product(&self, rho1: &CMatrix, rho2: &CMatrix) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| {
            let (n1, n2) = self.states[i];
            let (m1, m2) = self.states[j];
            let get = |r: &CMatrix, a: usize, b: usize| {
                if a < r.nrows() && b < r.ncols() {
                    r[(a, b)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            };
            get(rho1, n1, m1) * get(rho2, n2, m2)
        })
    }

    /// `exp(φ(a₁†a₂ - a₁a₂†))`; conserves the total photon number, so the
    /// truncation is exact.
    pub fn beam_splitter(&self, phi: f64) -> CMatrix {
        let a1 = self.annihilation(0);
        let a2 = self.annihilation(1);
        let g = (a1.adjoint() * &a2 - &a1 * a2.adjoint()) * c(phi);
        exp_anti_hermitian(&g)
    }

    /// `Σ (tanh r)ⁿ / cosh r |n, n⟩`.
    pub fn two_mode_squeezed_vector(&self, r: f64) -> DVector<Complex64> {
        let mut psi = DVector::from_element(self.dim(), Complex64::new(0.0, 0.0));
        for n in 0..=self.n_total / 2 {
            let i = self.index(n, n).expect("diagonal state in basis");
            psi[i] = c(r.tanh().powi(n as i32) / r.cosh());
        }
        psi
    }

    pub fn two_mode_squeezed_vacuum(&self, r: f64) -> CMatrix {
        let psi = self.two_mode_squeezed_vector(r);
        &psi * psi.adjoint()
    }
}

/// Quadrature moments `(⟨X⟩, Σ)` with `Σ_ij = ⟨{ΔX_i, ΔX_j}⟩` for the given
/// annihilation operators, ordered `(x₁, p₁, x₂, p₂, …)`.
pub fn moments(rho: &CMatrix, modes: &[CMatrix]) -> (Vec<f64>, DMatrix<f64>) {
    let s2 = 2f64.sqrt();
    let mut quads = Vec::new();
    for a in modes {
        let ad = a.adjoint();
        quads.push((a + &ad) / c(s2));
        quads.push((a - &ad) * Complex64::new(0.0, -1.0 / s2));
    }
    let rq: Vec<CMatrix> = quads.iter().map(|q| rho * q).collect();
    let mean: Vec<f64> = rq.iter().map(|m| m.trace().re).collect();
    // Tr(ρ Q_i Q_j) = Σ_kl (ρQ_i)_kl (Q_j)_lk.
    let trace_product = |m: &CMatrix, q: &CMatrix| m.component_mul(&q.transpose()).sum().re;
    let n = quads.len();
    let cov = DMatrix::from_fn(n, n, |i, j| 2.0 * trace_product(&rq[i], &quads[j]) - 2.0 * mean[i] * mean[j]);
    (mean, cov)
}

fn sqrt_psd(rho: &CMatrix) -> CMatrix {
    let eig = rho.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    let roots = eig
        .eigenvalues
        .map(|l| if l > EIGEN_FLOOR * scale { c(l.sqrt()) } else { c(0.0) });
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&roots) * v.adjoint()
}

/// `(Tr √(√ρ σ √ρ))²`, computed as the squared nuclear norm of `√ρ √σ`.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let m = sqrt_psd(rho) * sqrt_psd(sigma);
    let nuclear: f64 = m.singular_values().iter().sum();
    nuclear * nuclear
}

/// `|⟨ψ|φ⟩|²` for two pure states.
pub fn pure_fidelity(psi: &DVector<Complex64>, phi: &DVector<Complex64>) -> f64 {
    psi.dotc(phi).norm_sqr()
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity when one of the states is pure.
pub fn fidelity_with_pure(psi: &DVector<Complex64>, rho: &CMatrix) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re
}
