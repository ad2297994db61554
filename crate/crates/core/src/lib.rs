//! Gravitational redshift of Gaussian light pulses between Earth and a
//! satellite, and the quantum-metrology bounds it implies for estimating
//! the Schwarzschild radius and the observer separation.

mod dd;
pub mod error;
pub mod estimator;
pub mod fidelity;
pub mod gaussian;
pub mod metrology;
pub mod spacetime;
pub mod wavepacket;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, SqueezingConvention, SymplecticMatrix};
pub use spacetime::{ObserverPair, SchwarzschildGeometry};
pub use wavepacket::{ChannelParams, GaussianWavepacket, PacketPreset};
