//! Gaussian frequency distributions and the channel they see between two
//! static observers.
//!
//! Only the ratios `Ω₀/σ` and `δ` enter the formulas, so frequencies may be
//! given in any unit as long as peak and width share it. Scenario files use
//! cyclic frequency in Hz.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::spacetime::{ObserverPair, SchwarzschildGeometry};

/// `σ/Ω₀` above which a packet is no longer considered narrowband.
pub const DEFAULT_NARROWBAND_THRESHOLD: f64 = 1e-3;

/// `(δΩ₀/σ)²` at which the perturbative overlap stops being trustworthy.
pub const PERTURBATIVE_REGIME_LIMIT: f64 = 0.1;

/// Real normalized Gaussian `F(Ω) = (2πσ²)^{-1/4} exp(-(Ω-Ω₀)²/(4σ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWavepacket {
    pub omega0: f64,
    pub sigma: f64,
}

/// Named frequency presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PacketPreset {
    /// 700 THz peak, 1 MHz width: typical optical communication.
    #[serde(rename = "comm-700THz")]
    Comm700THz,
    /// 400 THz peak, 1 MHz width: current space-based experiments.
    #[serde(rename = "state-of-the-art-400THz")]
    StateOfTheArt400THz,
}

impl PacketPreset {
    pub const ALL: [PacketPreset; 2] = [PacketPreset::Comm700THz, PacketPreset::StateOfTheArt400THz];

    pub fn name(self) -> &'static str {
        match self {
            PacketPreset::Comm700THz => "comm-700THz",
            PacketPreset::StateOfTheArt400THz => "state-of-the-art-400THz",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn packet(self) -> GaussianWavepacket {
        match self {
            PacketPreset::Comm700THz => GaussianWavepacket {
                omega0: 7.0e14,
                sigma: 1.0e6,
            },
            PacketPreset::StateOfTheArt400THz => GaussianWavepacket {
                omega0: 4.0e14,
                sigma: 1.0e6,
            },
        }
    }
}

impl GaussianWavepacket {
    pub fn new(omega0: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("sigma", sigma)] {
            check_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "frequencies must be positive",
                });
            }
        }
        let packet = Self { omega0, sigma };
        if !packet.is_narrowband(DEFAULT_NARROWBAND_THRESHOLD) {
            log::warn!(
                "wave-packet sigma/omega0 = {:e} exceeds the narrowband threshold {:e}",
                sigma / omega0,
                DEFAULT_NARROWBAND_THRESHOLD
            );
        }
        Ok(packet)
    }

    pub fn is_narrowband(&self, threshold: f64) -> bool {
        self.sigma / self.omega0 <= threshold
    }

    /// Frequency distribution evaluated at `omega`.
    pub fn amplitude(&self, omega: f64) -> f64 {
        self.amplitude_at_offset(omega - self.omega0)
    }

    /// Frequency distribution at `omega0 + offset`, without forming `omega0 + offset`.
    pub fn amplitude_at_offset(&self, offset: f64) -> f64 {
        let norm = (2.0 * PI * self.sigma * self.sigma).powf(-0.25);
        let u = offset / (2.0 * self.sigma);
        norm * (-u * u).exp()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega0: self.omega0 * factor,
            sigma: self.sigma * factor,
        }
    }
}

/// Packet received at `r_b` when `packet` is emitted at `r_a`.
///
/// `F_B(Ω) = (f_B/f_A)^{1/4} F_A(√(f_B/f_A) Ω)`: for a Gaussian this rescales
/// peak and width by the redshift ratio `√(f_A/f_B)` and keeps it normalized.
pub fn propagate(
    packet: &GaussianWavepacket,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
) -> Result<GaussianWavepacket> {
    Ok(packet.scaled(geom.redshift_ratio(pair)?))
}

/// `x = δ²Ω₀²/(8σ²)` for the given packet.
pub fn small_parameter(delta: f64, packet: &GaussianWavepacket) -> f64 {
    let ratio = delta * packet.omega0 / packet.sigma;
    ratio * ratio / 8.0
}

/// Closed-form mode overlap
/// `Θ = √(2/(1+(1+δ)²)) (1+δ)⁻¹ exp(-δ²Ω₀²/(4(1+(1+δ)²)σ²))`
/// with `Ω₀`, `σ` taken from the received packet.
pub fn overlap_from_delta(delta: f64, received: &GaussianWavepacket) -> Result<f64> {
    Ok(ln_overlap_from_delta(delta, received)?.exp())
}

/// `ln Θ` of [`overlap_from_delta`]; finite even where Θ underflows.
pub fn ln_overlap_from_delta(delta: f64, received: &GaussianWavepacket) -> Result<f64> {
    check_finite("delta", delta)?;
    if delta <= -1.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must exceed -1",
        });
    }
    let one_plus = 1.0 + delta;
    let denom = 1.0 + one_plus * one_plus;
    let ratio = delta * received.omega0 / received.sigma;
    Ok(0.5 * (2.0 / denom).ln() - delta.ln_1p() - ratio * ratio / (4.0 * denom))
}

/// `d ln Θ / dδ` of [`overlap_from_delta`].
pub fn dln_overlap_ddelta(delta: f64, received: &GaussianWavepacket) -> f64 {
    let one_plus = 1.0 + delta;
    let denom = 1.0 + one_plus * one_plus;
    let k = (received.omega0 / received.sigma).powi(2) / 4.0;
    -one_plus / denom - 1.0 / one_plus - k * (2.0 * delta * denom - 2.0 * delta * delta * one_plus) / (denom * denom)
}

/// Closed-form overlap between a sent packet and its received image.
///
/// δ is recovered from the ratio of peak frequencies, which costs digits
/// when δ is near the rounding level of that ratio. Prefer
/// [`channel_params`] when the geometry is known.
pub fn overlap_exact(sent: &GaussianWavepacket, received: &GaussianWavepacket) -> Result<f64> {
    let scale = received.omega0 / sent.omega0;
    let delta = scale.sqrt() - 1.0;
    overlap_from_delta(delta, received)
}

/// Inner product `∫ F_a(Ω) F_b(Ω) dΩ` of two normalized real Gaussians over the real line.
pub fn gaussian_overlap(a: &GaussianWavepacket, b: &GaussianWavepacket) -> f64 {
    let var_sum = a.sigma * a.sigma + b.sigma * b.sigma;
    let shift = a.omega0 - b.omega0;
    (2.0 * a.sigma * b.sigma / var_sum).sqrt() * (-shift * shift / (4.0 * var_sum)).exp()
}

/// Result of the small-deformation overlap `Θ ≈ 1 - x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeOverlap {
    pub theta: f64,
    pub x: f64,
    /// `(δΩ₀/σ)²`; the expansion holds while this is well below one.
    pub regime_parameter: f64,
    pub regime_ok: bool,
}

pub fn overlap_perturbative(packet: &GaussianWavepacket, delta: f64) -> PerturbativeOverlap {
    let x = small_parameter(delta, packet);
    let regime_parameter = 8.0 * x;
    let regime_ok = regime_parameter < PERTURBATIVE_REGIME_LIMIT;
    if !regime_ok {
        log::warn!(
            "(delta*omega0/sigma)^2 = {regime_parameter:e} is outside the perturbative regime"
        );
    }
    PerturbativeOverlap {
        theta: 1.0 - x,
        x,
        regime_parameter,
        regime_ok,
    }
}

/// Overlap `Θ`, loss `q = 1 - Θ²`, small parameter `x` and deformation `δ` of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub theta: f64,
    pub q: f64,
    pub x: f64,
    pub delta: f64,
}

impl ChannelParams {
    pub fn from_delta(delta: f64, received: &GaussianWavepacket) -> Result<Self> {
        let theta = overlap_from_delta(delta, received)?;
        Ok(Self {
            theta,
            q: 1.0 - theta * theta,
            x: small_parameter(delta, received),
            delta,
        })
    }

    /// Single-photon transmission fidelity `|Θ|²`.
    pub fn single_photon_fidelity(&self) -> f64 {
        self.theta * self.theta
    }
}

pub fn channel_params(
    packet: &GaussianWavepacket,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
) -> Result<ChannelParams> {
    let delta = geom.delta_exact(pair)?;
    let received = propagate(packet, geom, pair)?;
    ChannelParams::from_delta(delta, &received)
}
