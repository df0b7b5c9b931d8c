//! Mass (rest-frame energy) distributions `|ρ(m)|²`.
//!
//! | family | support | norm_const | mean |
//! |---|---|---|---|
//! | [`Family::BreitWignerFullLine`] | ℝ | 1 | undefined |
//! | [`Family::BreitWignerTruncated`] | `[threshold, ∞)` | `1 / (1/2 + atan(2(M − m₀)/Γ)/π)` | undefined (log-divergent) |
//! | [`Family::Gaussian`] | ℝ | 1 | `M` |
//!
//! For the Gaussian family `width` holds the full width at half maximum,
//! `2√(2 ln 2) σ_m`, so that regime checks can treat every family alike.

use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `2√(2 ln 2)`: FWHM of a unit-variance Gaussian.
pub const GAUSSIAN_FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    BreitWignerFullLine,
    BreitWignerTruncated { threshold: f64 },
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassDistribution {
    pub family: Family,
    /// Central (kinematical) mass `M`.
    pub mass: f64,
    /// Decay width `Γ`; FWHM for the Gaussian family.
    pub width: f64,
    pub norm_const: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `None` when the first moment diverges.
    pub mean: Option<f64>,
    pub fwhm: f64,
}

impl MassDistribution {
    pub fn breit_wigner(mass: f64, width: f64) -> Result<Self> {
        Self::raw(Family::BreitWignerFullLine, mass, width)?.normalize()
    }

    pub fn breit_wigner_truncated(mass: f64, width: f64, threshold: f64) -> Result<Self> {
        Self::raw(Family::BreitWignerTruncated { threshold }, mass, width)?.normalize()
    }

    pub fn gaussian(mass: f64, sigma: f64) -> Result<Self> {
        Self::raw(
            Family::Gaussian { sigma },
            mass,
            GAUSSIAN_FWHM_PER_SIGMA * sigma,
        )?
        .normalize()
    }

    /// Validated but unnormalized distribution (`norm_const = 1`).
    pub fn raw(family: Family, mass: f64, width: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid(
                "mass",
                format!("must be finite and > 0, got {mass}"),
            ));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid(
                "width",
                format!("must be finite and > 0, got {width}"),
            ));
        }
        match family {
            Family::BreitWignerFullLine => {}
            Family::BreitWignerTruncated { threshold } => {
                if !threshold.is_finite() || threshold >= mass {
                    return Err(invalid(
                        "threshold",
                        format!("must be finite and below the mass {mass}, got {threshold}"),
                    ));
                }
            }
            Family::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(invalid(
                        "sigma",
                        format!("must be finite and > 0, got {sigma}"),
                    ));
                }
            }
        }
        Ok(Self {
            family,
            mass,
            width,
            norm_const: 1.0,
        })
    }

    /// Sets `norm_const` so that the density integrates to one over its support.
    pub fn normalize(self) -> Result<Self> {
        let norm_const = match self.family {
            Family::BreitWignerFullLine | Family::Gaussian { .. } => 1.0,
            Family::BreitWignerTruncated { threshold } => {
                let kept = 0.5 + (2.0 * (self.mass - threshold) / self.width).atan() * FRAC_1_PI;
                if !(kept.is_finite() && kept > 0.0) {
                    return Err(Error::NonNormalizable(format!(
                        "support above {threshold} carries no probability"
                    )));
                }
                1.0 / kept
            }
        };
        Ok(Self { norm_const, ..self })
    }

    /// `|ρ(m)|²`.
    pub fn pdf(&self, m: f64) -> f64 {
        if m < self.lower_bound() {
            return 0.0;
        }
        self.envelope(m - self.mass)
    }

    /// Density as a function of the offset `u = m − M`, ignoring the support cut.
    pub(crate) fn envelope(&self, u: f64) -> f64 {
        match self.family {
            Family::BreitWignerFullLine | Family::BreitWignerTruncated { .. } => {
                let half = 0.5 * self.width;
                self.norm_const * half * FRAC_1_PI / (u * u + half * half)
            }
            Family::Gaussian { sigma } => {
                let z = u / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }

    /// Analytic continuation of [`Self::envelope`]; only the rational
    /// Breit-Wigner families admit one that stays bounded off the real axis.
    pub(crate) fn envelope_complex(&self, u: Complex64) -> Option<Complex64> {
        match self.family {
            Family::BreitWignerFullLine | Family::BreitWignerTruncated { .. } => {
                let half = 0.5 * self.width;
                Some(self.norm_const * half * FRAC_1_PI / (u * u + half * half))
            }
            Family::Gaussian { .. } => None,
        }
    }

    /// Lower edge of the support in `m` (−∞ for full-line families).
    pub fn lower_bound(&self) -> f64 {
        match self.family {
            Family::BreitWignerTruncated { threshold } => threshold,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn is_bounded_below(&self) -> bool {
        matches!(self.family, Family::BreitWignerTruncated { .. })
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.family {
            Family::Gaussian { sigma } => Some(sigma),
            _ => None,
        }
    }

    /// Probability mass with `m − M > u` (for `u ≥ 0`).
    pub(crate) fn upper_tail_mass(&self, u: f64) -> f64 {
        match self.family {
            Family::BreitWignerFullLine | Family::BreitWignerTruncated { .. } => {
                self.norm_const * (0.5 - (2.0 * u / self.width).atan() * FRAC_1_PI)
            }
            Family::Gaussian { sigma } => gaussian_tail_bound(u / sigma),
        }
    }

    /// Probability mass with `m − M < −u` inside the support (for `u ≥ 0`).
    pub(crate) fn lower_tail_mass(&self, u: f64) -> f64 {
        match self.family {
            Family::BreitWignerTruncated { threshold } if threshold - self.mass >= -u => 0.0,
            _ => self.upper_tail_mass(u),
        }
    }

    pub fn moments(&self) -> Moments {
        match self.family {
            Family::BreitWignerFullLine | Family::BreitWignerTruncated { .. } => Moments {
                mean: None,
                fwhm: self.width,
            },
            Family::Gaussian { sigma } => Moments {
                mean: Some(self.mass),
                fwhm: GAUSSIAN_FWHM_PER_SIGMA * sigma,
            },
        }
    }
}

/// Upper bound on the standard normal tail `P(Z > z)` for `z ≥ 0`.
fn gaussian_tail_bound(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.5;
    }
    // Mills-ratio bound, capped by the trivial one.
    let mills = (-0.5 * z * z).exp() / (z * (2.0 * PI).sqrt());
    mills.min(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn breit_wigner_peak_and_half_maximum() {
        let bw = MassDistribution::breit_wigner(1.0, 0.1).unwrap();
        assert_relative_eq!(bw.pdf(1.0), 2.0 / (PI * 0.1), max_relative = 1e-15);
        assert_relative_eq!(bw.pdf(1.0), 6.366198, epsilon = 1e-6);
        assert_relative_eq!(bw.pdf(1.05), 3.183099, epsilon = 1e-6);
        assert_relative_eq!(bw.pdf(0.95), bw.pdf(1.05), max_relative = 1e-14);
    }

    #[test]
    fn truncated_is_zero_below_threshold() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        assert_eq!(bw.pdf(-0.5), 0.0);
        assert!(bw.pdf(0.0) > 0.0);
    }

    #[test]
    fn truncated_norm_const_matches_riemann_sum() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        let closed = 1.0 / (0.5 + (20.0f64).atan() / PI);
        assert_relative_eq!(bw.norm_const, closed, max_relative = 1e-15);
        assert_relative_eq!(bw.norm_const, 1.016159, epsilon = 1e-6);

        // Fine-grid oracle on the unnormalized density; the upper tail past
        // 10⁴ is added from its 1/m² asymptote.
        let raw = MassDistribution::raw(bw.family, 1.0, 0.1).unwrap();
        let upper = 1.0e4;
        let body = midpoint(|m| raw.pdf(m), 0.0, upper, 20_000_000);
        let tail = 0.05 / PI / (upper - 1.0);
        assert_relative_eq!(1.0 / (body + tail), closed, max_relative = 1e-9);
    }

    #[test]
    fn full_line_families_have_unit_norm_const() {
        assert_eq!(
            MassDistribution::breit_wigner(1.0, 0.1).unwrap().norm_const,
            1.0
        );
        assert_eq!(
            MassDistribution::gaussian(1.0, 0.01).unwrap().norm_const,
            1.0
        );
    }

    #[test]
    fn moments() {
        let g = MassDistribution::gaussian(1.0, 0.01).unwrap().moments();
        assert_eq!(g.mean, Some(1.0));
        assert_relative_eq!(g.fwhm, 0.023548, epsilon = 1e-6);

        let bw = MassDistribution::breit_wigner(1.0, 0.1).unwrap().moments();
        assert_eq!(bw.mean, None);
        assert_eq!(bw.fwhm, 0.1);
    }

    #[test]
    fn truncated_mean_diverges() {
        // ∫₀^Λ m pdf(m) dm keeps growing by ~ Γ N/(2π) ln 10 per decade of Λ.
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        assert_eq!(bw.moments().mean, None);
        let window = |lo: f64, hi: f64| {
            // substitute m = e^y to resolve many decades evenly
            midpoint(
                |y| {
                    let m = y.exp();
                    m * m * bw.pdf(m)
                },
                lo.ln(),
                hi.ln(),
                200_000,
            )
        };
        let per_two_decades = bw.norm_const * 0.05 / PI * 2.0 * 10f64.ln();
        for lo in [1e2, 1e4, 1e6] {
            assert_relative_eq!(window(lo, lo * 1e2), per_two_decades, max_relative = 1e-2);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(MassDistribution::breit_wigner(0.0, 0.1).is_err());
        assert!(MassDistribution::breit_wigner(1.0, -0.1).is_err());
        assert!(MassDistribution::breit_wigner_truncated(1.0, 0.1, 1.0).is_err());
        assert!(MassDistribution::gaussian(1.0, 0.0).is_err());
        assert!(matches!(
            MassDistribution::breit_wigner(f64::NAN, 0.1),
            Err(Error::InvalidParameter { field: "mass", .. })
        ));
    }

    #[test]
    fn truncation_limit_is_monotone() {
        let mut previous = f64::INFINITY;
        for threshold in [0.9, 0.5, 0.0, -1.0, -10.0, -100.0, -1e4] {
            let c = MassDistribution::breit_wigner_truncated(1.0, 0.1, threshold)
                .unwrap()
                .norm_const;
            assert!(c >= 1.0 && c < previous, "{threshold}: {c}");
            previous = c;
        }
        assert!(previous - 1.0 < 1e-5);
    }

    #[test]
    fn tail_masses() {
        let bw = MassDistribution::breit_wigner(1.0, 2.0).unwrap();
        assert_relative_eq!(bw.upper_tail_mass(1.0), 0.25, max_relative = 1e-15);
        let tr = MassDistribution::breit_wigner_truncated(1.0, 2.0, 0.0).unwrap();
        assert_eq!(tr.lower_tail_mass(1.0), 0.0);
        assert!(tr.lower_tail_mass(0.5) > 0.0);
        let g = MassDistribution::gaussian(1.0, 1.0).unwrap();
        // P(Z > 3) = 1.3499e-3 ≤ bound
        assert!(g.upper_tail_mass(3.0) >= 1.3499e-3 && g.upper_tail_mass(3.0) < 1.5e-3);
    }
}
