//! Gaussian spectral profiles and bandwidth conversions.
//!
//! Every spectrum in this crate is Gaussian. A profile is stored as its
//! center frequency ω₀ and its amplitude width Δω (both rad/s), with the
//! amplitude convention
//!
//! ```text
//! f(ω) = exp(-(ω - ω₀)² / (2 Δω²)) / √(Δω √π),      ∫ |f(ω)|² dω = 1.
//! ```
//!
//! Optical bandwidths quoted in wavelength are *intensity* FWHM values; the
//! conversions below use that convention, so a 5 nm filter at 810 nm maps to
//! Δω ≈ 8.62·10¹² rad/s and a √2·c/Δω coherence length of ≈ 49 μm.

use crate::{Error, Result, SPEED_OF_LIGHT};

/// Converts an intensity-FWHM wavelength bandwidth to the Gaussian amplitude
/// width Δω in rad/s. Both lengths are in meters; `fwhm = 0` is allowed and
/// maps to a monochromatic (zero-width) profile.
pub fn fwhm_to_gaussian_width(fwhm: f64, center: f64) -> Result<f64> {
    if !center.is_finite() || center <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "center wavelength must be positive and finite, got {center:e}"
        )));
    }
    if !fwhm.is_finite() || fwhm < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "wavelength FWHM must be non-negative and finite, got {fwhm:e}"
        )));
    }
    let fwhm_omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * fwhm / (center * center);
    Ok(fwhm_omega / (2.0 * std::f64::consts::LN_2.sqrt()))
}

/// Inverse of [`fwhm_to_gaussian_width`]: amplitude width in rad/s back to
/// the intensity-FWHM wavelength bandwidth in meters.
pub fn gaussian_width_to_fwhm(width: f64, center: f64) -> Result<f64> {
    if !center.is_finite() || center <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "center wavelength must be positive and finite, got {center:e}"
        )));
    }
    if !width.is_finite() || width < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian width must be non-negative and finite, got {width:e}"
        )));
    }
    let fwhm_omega = width * 2.0 * std::f64::consts::LN_2.sqrt();
    Ok(fwhm_omega * center * center / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT))
}

/// A Gaussian spectral amplitude: center frequency ω₀ and amplitude width Δω,
/// both in rad/s. `width = 0` models a monochromatic line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralProfile {
    center_frequency: f64,
    width: f64,
}

impl SpectralProfile {
    pub fn new(center_frequency: f64, width: f64) -> Result<Self> {
        if !center_frequency.is_finite() || center_frequency <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "center frequency must be positive and finite, got {center_frequency:e}"
            )));
        }
        if !width.is_finite() || width < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spectral width must be non-negative and finite, got {width:e}"
            )));
        }
        Ok(Self { center_frequency, width })
    }

    /// Builds a profile from a center wavelength and an intensity-FWHM
    /// bandwidth, both in meters.
    pub fn from_wavelength(center: f64, intensity_fwhm: f64) -> Result<Self> {
        let width = fwhm_to_gaussian_width(intensity_fwhm, center)?;
        Self::new(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / center, width)
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn is_monochromatic(&self) -> bool {
        self.width == 0.0
    }

    /// Spectral amplitude at ω, normalized so that ∫ |f(ω)|² dω = 1.
    pub fn amplitude(&self, omega: f64) -> Result<f64> {
        if self.is_monochromatic() {
            return Err(Error::DegenerateProfile);
        }
        let d = (omega - self.center_frequency) / self.width;
        Ok((-0.5 * d * d).exp() / (self.width * std::f64::consts::PI.sqrt()).sqrt())
    }

    /// Spectral intensity density (the |amplitude|² lineshape) normalized to
    /// unit area: a Gaussian in ω with standard deviation Δω.
    pub fn pump_density(&self, omega: f64) -> Result<f64> {
        if self.is_monochromatic() {
            return Err(Error::DegenerateProfile);
        }
        let d = (omega - self.center_frequency) / self.width;
        Ok((-0.5 * d * d).exp() / (self.width * (2.0 * std::f64::consts::PI).sqrt()))
    }

    /// 1/e half-width √2/Δω of the wavepacket amplitude envelope, in seconds.
    /// Infinite for a monochromatic profile.
    pub fn coherence_time(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.width
    }

    /// Coherence time expressed as a path length, c·√2/Δω, in meters.
    pub fn coherence_length(&self) -> f64 {
        SPEED_OF_LIGHT * self.coherence_time()
    }

    pub fn center_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.center_frequency
    }

    /// Round trip of [`SpectralProfile::from_wavelength`]'s bandwidth argument.
    pub fn intensity_fwhm(&self) -> Result<f64> {
        gaussian_width_to_fwhm(self.width, self.center_wavelength())
    }
}

/// The bandwidth governing the decay of the two-photon fringe envelope,
/// combining pump and filter in inverse quadrature: 1/Δω_e² = 1/Δω_p² + 1/Δω².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveBandwidth {
    value: f64,
}

impl EffectiveBandwidth {
    /// Combined width in rad/s. Zero for a monochromatic pump (the fringe
    /// envelope never decays).
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn coherence_time(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.value
    }

    pub fn coherence_length(&self) -> f64 {
        SPEED_OF_LIGHT * self.coherence_time()
    }
}

/// Combines a pump width (≥ 0, 0 = monochromatic) and a filter width (> 0)
/// into the effective fringe-envelope bandwidth. The result never exceeds
/// either input and approaches the filter width for a very broad pump.
pub fn effective_bandwidth(pump_width: f64, filter_width: f64) -> Result<EffectiveBandwidth> {
    if pump_width.is_nan() || pump_width < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "pump width must be non-negative, got {pump_width:e}"
        )));
    }
    if !filter_width.is_finite() || filter_width <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "filter width must be positive and finite, got {filter_width:e}"
        )));
    }
    let value = if pump_width == 0.0 {
        0.0
    } else {
        1.0 / (1.0 / (pump_width * pump_width) + 1.0 / (filter_width * filter_width)).sqrt()
    };
    Ok(EffectiveBandwidth { value })
}
