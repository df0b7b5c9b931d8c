//! Survival probability of an unstable quantum system, at rest and in
//! relativistic motion.
//!
//! The survival amplitude is the Fourier transform of the mass spectrum,
//! `A(t) = ∫ dm |ρ(m)|² e^{-imt}`, and the survival probability is
//! `P(t) = |A(t)|²`. On top of that rest-frame building block the crate
//! provides three moving-frame treatments:
//!
//! * a time-only boost, which yields `P(γt)`;
//! * a space-time amplitude evaluated along the classical trajectory, which
//!   yields `P(t/γ)`;
//! * a Gaussian wave packet integrated over space, exactly and in the
//!   narrow-width limit, plus a brute-force spatial-grid check of the
//!   exact result.
//!
//! All quantities are in natural units (`ħ = c = 1`) with one free energy
//! scale.

pub mod amplitude;
pub mod error;
pub mod masspec;
pub mod quadrature;
pub mod regimes;
pub mod report;
pub mod scenario;
pub mod wavepacket;

pub use amplitude::{Boost, SurvivalCurve, Treatment};
pub use error::{Error, Result};
pub use masspec::{Family, MassDistribution};
pub use quadrature::{OscillatoryResult, QuadOptions, Spacing, TimeGrid};
pub use regimes::{RegimeReport, RegimeThresholds, Verdict};
pub use wavepacket::{MomentumPacket, WavepacketScenario};

pub(crate) fn map_points<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
