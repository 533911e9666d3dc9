//! Photon-pair source models and their time-domain wavepacket kernels.
//!
//! The three models feeding the interferometer differ only in the two-photon
//! state on the input ports:
//!
//! * [`SourceModel::SpdcBroadbandPump`]: frequency-entangled signal/idler
//!   pairs from collinear degenerate SPDC behind identical Gaussian filters;
//! * [`SourceModel::SeparableIdentical`]: two independent photons in the same
//!   pure Gaussian wavepacket, one per port;
//! * [`SourceModel::DistinguishablePolarized`]: as above but with orthogonal
//!   polarizations, which makes exchanged and non-exchanged detection
//!   amplitudes incoherent.
//!
//! Kernels are the exact Fourier transforms of the Gaussian spectra, so they
//! evaluate in closed Gaussian form; `..._by_quadrature` variants integrate
//! the defining spectral integral directly and exist as cross-checks.

use num_complex::Complex64;

use crate::spectra::{effective_bandwidth, SpectralProfile};
use crate::{Error, Result};

/// Largest tolerated relative detuning of the pump center from twice the
/// filter center frequency.
pub const PUMP_DEGENERACY_LIMIT: f64 = 1e-2;

/// Photon polarization tag; only its equality matters to the physics here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Horizontal,
    Vertical,
}

/// A two-photon source at the interferometer inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    /// SPDC pairs behind identical filters, pump centered at twice the
    /// filter center frequency (enforced to within [`PUMP_DEGENERACY_LIMIT`]).
    SpdcBroadbandPump { pump: SpectralProfile, filter: SpectralProfile },
    /// Independent identical photons, one per input port.
    SeparableIdentical { photon: SpectralProfile },
    /// Independent identical wavepackets with orthogonal polarizations.
    DistinguishablePolarized { photon: SpectralProfile },
}

impl SourceModel {
    pub fn spdc(pump: SpectralProfile, filter: SpectralProfile) -> Result<Self> {
        if filter.is_monochromatic() {
            return Err(Error::InvalidParameter(
                "SPDC filter must have a nonzero width".into(),
            ));
        }
        let degenerate = 2.0 * filter.center_frequency();
        let relative = (pump.center_frequency() - degenerate).abs() / degenerate;
        if relative > PUMP_DEGENERACY_LIMIT {
            return Err(Error::PumpDetuned { relative, limit: PUMP_DEGENERACY_LIMIT });
        }
        Ok(Self::SpdcBroadbandPump { pump, filter })
    }

    pub fn separable(photon: SpectralProfile) -> Result<Self> {
        if photon.is_monochromatic() {
            return Err(Error::InvalidParameter(
                "separable photons must have a nonzero spectral width".into(),
            ));
        }
        Ok(Self::SeparableIdentical { photon })
    }

    pub fn distinguishable(photon: SpectralProfile) -> Result<Self> {
        if photon.is_monochromatic() {
            return Err(Error::InvalidParameter(
                "distinguishable photons must have a nonzero spectral width".into(),
            ));
        }
        Ok(Self::DistinguishablePolarized { photon })
    }

    /// The single-photon spectral profile (the filter, for SPDC).
    pub fn photon_profile(&self) -> &SpectralProfile {
        match self {
            Self::SpdcBroadbandPump { filter, .. } => filter,
            Self::SeparableIdentical { photon } | Self::DistinguishablePolarized { photon } => {
                photon
            }
        }
    }

    /// The pump profile, for sources that have one.
    pub fn pump(&self) -> Option<&SpectralProfile> {
        match self {
            Self::SpdcBroadbandPump { pump, .. } => Some(pump),
            _ => None,
        }
    }

    pub fn center_frequency(&self) -> f64 {
        self.photon_profile().center_frequency()
    }

    pub fn photon_width(&self) -> f64 {
        self.photon_profile().width()
    }

    /// Width of the fringe-envelope decay: the pump/filter combination for
    /// SPDC, the photon width otherwise.
    pub fn effective_width(&self) -> f64 {
        match self {
            Self::SpdcBroadbandPump { pump, filter } => {
                effective_bandwidth(pump.width(), filter.width())
                    .expect("validated at construction")
                    .value()
            }
            _ => self.photon_width(),
        }
    }

    /// Polarization tags of the photons on input ports (a, b).
    pub fn input_polarizations(&self) -> (Polarization, Polarization) {
        match self {
            Self::DistinguishablePolarized { .. } => {
                (Polarization::Horizontal, Polarization::Vertical)
            }
            _ => (Polarization::Horizontal, Polarization::Horizontal),
        }
    }

    /// The wavepacket kernel generating this source's detection amplitudes.
    pub fn kernel(&self) -> Result<WavepacketKernel> {
        match self {
            Self::SpdcBroadbandPump { filter, .. } => {
                Ok(WavepacketKernel::Pair(SpdcPairKernel::new(filter)?))
            }
            Self::SeparableIdentical { photon } | Self::DistinguishablePolarized { photon } => {
                Ok(WavepacketKernel::Single(SinglePhotonKernel::new(photon)?))
            }
        }
    }
}

/// Time-domain amplitude kernel of a source: one factor per photon for the
/// independent-photon models, a joint two-photon amplitude for SPDC.
#[derive(Debug, Clone, Copy)]
pub enum WavepacketKernel {
    Single(SinglePhotonKernel),
    Pair(SpdcPairKernel),
}

/// Single-photon wavepacket
///
/// ```text
/// g(t) = (Δω/√π)^{1/2} · exp(-Δω² t²/2) · e^{-i ω₀ t},     ∫ |g(t)|² dt = 1,
/// ```
///
/// the unitary Fourier transform of the profile amplitude.
#[derive(Debug, Clone, Copy)]
pub struct SinglePhotonKernel {
    width: f64,
    center_frequency: f64,
}

impl SinglePhotonKernel {
    pub fn new(profile: &SpectralProfile) -> Result<Self> {
        if profile.is_monochromatic() {
            return Err(Error::DegenerateProfile);
        }
        Ok(Self { width: profile.width(), center_frequency: profile.center_frequency() })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.envelope(t), -self.center_frequency * t)
    }

    /// Amplitude modulus: carrier-free Gaussian envelope.
    pub fn envelope(&self, t: f64) -> f64 {
        let u = self.width * t;
        (self.width / std::f64::consts::PI.sqrt()).sqrt() * (-0.5 * u * u).exp()
    }

    /// Direct quadrature of (1/√2π) ∫ f(ω) e^{-iωt} dω over ω₀ ± `sigmas`·Δω,
    /// as a cross-check of the closed form.
    pub fn amplitude_by_quadrature(&self, t: f64, sigmas: f64, samples: usize) -> Complex64 {
        let profile = SpectralProfile::new(self.center_frequency, self.width)
            .expect("kernel fields are valid");
        let lo = self.center_frequency - sigmas * self.width;
        let hi = self.center_frequency + sigmas * self.width;
        let h = (hi - lo) / (samples - 1) as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..samples {
            let omega = lo + i as f64 * h;
            let weight = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
            let f = profile.amplitude(omega).expect("nonzero width");
            sum += weight * f * Complex64::from_polar(1.0, -omega * t);
        }
        sum * h / (2.0 * std::f64::consts::PI).sqrt()
    }
}

/// Joint signal/idler amplitude of an SPDC pair behind identical filters of
/// width Δω centered at ω₀, at a fixed pump frequency ω_p:
///
/// ```text
/// A(t_s, t_i; ω_p) = exp(-(ω_p - 2ω₀)²/(4Δω²)) · e^{-i ω_p (t_s+t_i)/2}
///                    · exp(-Δω² (t_s - t_i)²/4),
/// ```
///
/// the exact convolution of the two filter amplitudes (the prefactor is 1 in
/// this normalization). Only the carrier depends on ω_p; the envelope lives
/// on the detection-time difference.
#[derive(Debug, Clone, Copy)]
pub struct SpdcPairKernel {
    filter_width: f64,
    filter_center: f64,
}

impl SpdcPairKernel {
    pub fn new(filter: &SpectralProfile) -> Result<Self> {
        if filter.is_monochromatic() {
            return Err(Error::DegenerateProfile);
        }
        Ok(Self { filter_width: filter.width(), filter_center: filter.center_frequency() })
    }

    pub fn filter_width(&self) -> f64 {
        self.filter_width
    }

    pub fn filter_center(&self) -> f64 {
        self.filter_center
    }

    pub fn amplitude(&self, t_signal: f64, t_idler: f64, pump_frequency: f64) -> Complex64 {
        let envelope =
            self.detuning_amplitude(pump_frequency) * self.difference_envelope(t_signal - t_idler);
        Complex64::from_polar(envelope, -0.5 * pump_frequency * (t_signal + t_idler))
    }

    /// Pump-detuning amplitude factor exp(-(ω_p - 2ω₀)²/(4Δω²)).
    pub fn detuning_amplitude(&self, pump_frequency: f64) -> f64 {
        let d = (pump_frequency - 2.0 * self.filter_center) / self.filter_width;
        (-0.25 * d * d).exp()
    }

    /// Envelope in the detection-time difference x = t_s − t_i:
    /// exp(-Δω² x²/4). Its 1/e half-width is 2/Δω, √2 coherence times.
    pub fn difference_envelope(&self, x: f64) -> f64 {
        let u = self.filter_width * x;
        (-0.25 * u * u).exp()
    }

    /// Direct quadrature of ∫ f(ω) f(ω_p−ω) e^{-iω t_s} e^{-i(ω_p−ω) t_i} dω
    /// over ω₀ ± `sigmas`·Δω, as a cross-check of the closed form.
    pub fn amplitude_by_quadrature(
        &self,
        t_signal: f64,
        t_idler: f64,
        pump_frequency: f64,
        sigmas: f64,
        samples: usize,
    ) -> Complex64 {
        let profile = SpectralProfile::new(self.filter_center, self.filter_width)
            .expect("kernel fields are valid");
        let lo = self.filter_center - sigmas * self.filter_width;
        let hi = self.filter_center + sigmas * self.filter_width;
        let h = (hi - lo) / (samples - 1) as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..samples {
            let omega = lo + i as f64 * h;
            let weight = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
            let f = profile.amplitude(omega).expect("nonzero width")
                * profile.amplitude(pump_frequency - omega).expect("nonzero width");
            let phase = -omega * t_signal - (pump_frequency - omega) * t_idler;
            sum += weight * f * Complex64::from_polar(1.0, phase);
        }
        sum * h
    }
}
