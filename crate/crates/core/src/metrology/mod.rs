//! Probe schemes, quantum Fisher information and Cramér–Rao bounds.

pub mod bounds;
pub mod fisher;
pub mod mixed;
pub mod qfi;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::gaussian::{
    beam_splitter, beam_splitter_derivative, two_channel_beam_splitter, two_channel_beam_splitter_derivatives,
    GaussianState, SqueezingConvention, SymplecticMatrix,
};
use crate::wavepacket::{dln_overlap_ddelta, overlap_from_delta, GaussianWavepacket};

pub use bounds::{
    bound_l, bound_rs, compare_at_equal_resources, figure_of_merit, printed_bound_l, printed_bound_rs,
    scheme_relative_bound_x, scheme_relative_bound_x_nbar, x_from_link, Parameter, PrecisionBound,
};
pub use fisher::{fisher_matrix_rs_l, gaussian_qfi, CentralMatrixMode, FisherMatrix};
pub use mixed::general_mixed_fidelity_coefficient;
pub use qfi::{appendix_delta_theta_bound, qfi_closed_form_appendix, qfi_from_fidelity, QfiEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Coherent,
    SingleModeSqueezed,
    TwoModeSqueezed,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Coherent, SchemeKind::SingleModeSqueezed, SchemeKind::TwoModeSqueezed];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Coherent => "coherent",
            SchemeKind::SingleModeSqueezed => "single_mode_squeezed",
            SchemeKind::TwoModeSqueezed => "two_mode_squeezed",
        }
    }

    /// Number of probe modes Bob receives.
    pub fn probe_modes(self) -> usize {
        match self {
            SchemeKind::TwoModeSqueezed => 2,
            _ => 1,
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Probe state Alice sends and the frequencies it is carried on.
///
/// Ancilla modes start thermal with mixedness `mu_b`; `mu_a` is the
/// mixedness of the probe itself. `omega2` is only read by the two-mode scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    #[serde(default)]
    pub alpha: Complex64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub psi: f64,
    #[serde(default = "one")]
    pub mu_a: f64,
    #[serde(default = "one")]
    pub mu_b: f64,
    pub omega1: f64,
    #[serde(default)]
    pub omega2: f64,
    #[serde(default)]
    pub convention: SqueezingConvention,
}

impl SchemeSpec {
    pub fn coherent(alpha: Complex64, omega: f64) -> Self {
        Self {
            kind: SchemeKind::Coherent,
            alpha,
            r: 0.0,
            psi: 0.0,
            mu_a: 1.0,
            mu_b: 1.0,
            omega1: omega,
            omega2: omega,
            convention: SqueezingConvention::Single,
        }
    }

    pub fn single_mode_squeezed(r: f64, omega: f64) -> Self {
        Self {
            kind: SchemeKind::SingleModeSqueezed,
            r,
            ..Self::coherent(Complex64::ZERO, omega)
        }
    }

    pub fn two_mode_squeezed(r: f64, omega1: f64, omega2: f64) -> Self {
        Self {
            kind: SchemeKind::TwoModeSqueezed,
            r,
            omega1,
            omega2,
            ..Self::coherent(Complex64::ZERO, omega1)
        }
    }

    pub fn with_mixedness(mut self, mu_a: f64, mu_b: f64) -> Self {
        self.mu_a = mu_a;
        self.mu_b = mu_b;
        self
    }

    pub fn with_psi(mut self, psi: f64) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_convention(mut self, convention: SqueezingConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha.re", self.alpha.re),
            ("alpha.im", self.alpha.im),
            ("r", self.r),
            ("psi", self.psi),
        ] {
            check_finite(name, v)?;
        }
        for (name, v) in [("mu_a", self.mu_a), ("mu_b", self.mu_b)] {
            check_finite(name, v)?;
            if v < 1.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "mixedness must be at least 1",
                });
            }
        }
        let omegas: &[(&'static str, f64)] = match self.kind {
            SchemeKind::TwoModeSqueezed => &[("omega1", self.omega1), ("omega2", self.omega2)],
            _ => &[("omega1", self.omega1)],
        };
        for &(name, v) in omegas {
            check_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "frequencies must be positive",
                });
            }
        }
        if self.r < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
                reason: "squeezing must be non-negative",
            });
        }
        Ok(())
    }

    /// Resource count `n̄`: `|α|²` for the coherent probe, `sinh²r` otherwise.
    pub fn mean_photon_number(&self) -> f64 {
        match self.kind {
            SchemeKind::Coherent => self.alpha.norm_sqr(),
            _ => self.r.sinh().powi(2),
        }
    }

    /// Carrier frequencies of the probe modes.
    pub fn omegas(&self) -> Vec<f64> {
        match self.kind {
            SchemeKind::TwoModeSqueezed => vec![self.omega1, self.omega2],
            _ => vec![self.omega1],
        }
    }

    /// Wave packets of common width `sigma` on each probe frequency.
    pub fn packets(&self, sigma: f64) -> Result<Vec<GaussianWavepacket>> {
        self.omegas().into_iter().map(|w| GaussianWavepacket::new(w, sigma)).collect()
    }

    /// Probe modes followed by their ancillas.
    pub fn input_state(&self) -> Result<GaussianState> {
        self.validate()?;
        let anc = GaussianState::thermal(self.mu_b)?;
        Ok(match self.kind {
            SchemeKind::Coherent => {
                let probe = GaussianState::coherent(self.alpha);
                let cov = probe.covariance() * self.mu_a;
                GaussianState::new(probe.first_moments().clone(), cov)?.tensor(&anc)
            }
            SchemeKind::SingleModeSqueezed => {
                GaussianState::squeezed_thermal(self.mu_a, self.r, self.psi, self.convention)?.tensor(&anc)
            }
            SchemeKind::TwoModeSqueezed => {
                let tms = GaussianState::two_mode_squeezed(self.r)?;
                let cov = tms.covariance() * self.mu_a;
                GaussianState::new(tms.first_moments().clone(), cov)?
                    .tensor(&anc)
                    .tensor(&anc)
            }
        })
    }

    fn check_overlaps(&self, overlaps: &[f64]) -> Result<()> {
        let need = self.kind.probe_modes();
        if overlaps.len() != need {
            return Err(Error::DimensionMismatch {
                expected: need,
                found: overlaps.len(),
            });
        }
        Ok(())
    }

    /// Channel acting on probe and ancilla modes for the given overlaps.
    pub fn channel(&self, overlaps: &[f64]) -> Result<SymplecticMatrix> {
        self.check_overlaps(overlaps)?;
        match self.kind {
            SchemeKind::TwoModeSqueezed => two_channel_beam_splitter(overlaps[0], overlaps[1]),
            _ => beam_splitter(overlaps[0]),
        }
    }

    fn kept_modes(&self) -> Vec<usize> {
        (0..self.kind.probe_modes()).collect()
    }

    /// State Bob holds after the ancillas are traced out.
    pub fn output_state(&self, overlaps: &[f64]) -> Result<GaussianState> {
        self.input_state()?
            .apply(&self.channel(overlaps)?)?
            .partial_trace(&self.kept_modes())
    }

    /// Bob's state when every channel has overlap `theta`.
    pub fn output_state_at_theta(&self, theta: f64) -> Result<GaussianState> {
        self.output_state(&vec![theta; self.kind.probe_modes()])
    }

    /// Derivatives of Bob's first moments and covariance along a curve with
    /// `dΘᵢ/dt = rates[i]`, propagated through `dS`.
    pub fn output_derivative(&self, overlaps: &[f64], rates: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.check_overlaps(overlaps)?;
        self.check_overlaps(rates)?;
        let input = self.input_state()?;
        let s = self.channel(overlaps)?;
        let ds = match self.kind {
            SchemeKind::TwoModeSqueezed => {
                let [d1, d2] = two_channel_beam_splitter_derivatives(overlaps[0], overlaps[1])?;
                d1 * rates[0] + d2 * rates[1]
            }
            _ => beam_splitter_derivative(overlaps[0])? * rates[0],
        };
        let m = s.matrix();
        let cov0 = input.covariance();
        let mut dcov = &ds * cov0 * m.transpose();
        dcov += dcov.transpose();
        let dx = &ds * input.first_moments();
        let keep = self.kept_modes();
        let idx: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        Ok((
            DVector::from_iterator(idx.len(), idx.iter().map(|&i| dx[i])),
            DMatrix::from_fn(idx.len(), idx.len(), |i, j| dcov[(idx[i], idx[j])]),
        ))
    }

    /// Channel overlaps `Θᵢ(δ)` and their δ-derivatives for packets of width `sigma`.
    pub fn overlaps_at_delta(&self, delta: f64, sigma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let packets = self.packets(sigma)?;
        let mut theta = Vec::with_capacity(packets.len());
        let mut rate = Vec::with_capacity(packets.len());
        for p in &packets {
            let t = overlap_from_delta(delta, p)?;
            theta.push(t);
            rate.push(t * dln_overlap_ddelta(delta, p));
        }
        Ok((theta, rate))
    }
}
