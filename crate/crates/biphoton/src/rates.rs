//! Closed-form detection rates, normalized so that a configuration with all
//! path lines well separated approaches 1 (and the coalescence rate after
//! the first splitter approaches 1 at large delay).
//!
//! The two-photon coincidence at the interferometer output is the square of
//! the signed sum over the eight paths of [`crate::interferometer`]. For a
//! Gaussian spectrum each cross term integrates to a Gaussian of the line
//! separations, giving
//!
//! ```text
//! R(τ₁, τ₂) = ¼ [ 4 + G(τ₁-τ₂) + G(τ₁+τ₂) - 2 G(τ₂)
//!                 - 2 cos(2ω₀τ₂) E(τ₂) (1 + G(τ₁)) ]
//! ```
//!
//! with G(τ) = exp(-Δω²τ²/2) and E(τ) = exp(-Δω_e²τ²/2). The fringe term
//! oscillates at twice the carrier frequency: the signature of the pair
//! interfering as a single object of half the wavelength. Only its envelope
//! distinguishes the sources: a broadband-pumped pair keeps Δω_e < Δω (the
//! fringe outlives the one-photon coherence length), separable identical
//! photons have Δω_e = Δω, and orthogonally polarized photons lose the
//! exchange terms entirely and keep only the classical-fringe product, which
//! is independent of τ₁.

use crate::interferometer::DelayConfig;
use crate::sources::SourceModel;
use crate::SPEED_OF_LIGHT;

/// Unit Gaussian, exp(-x²/2).
fn gauss(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

/// Two-photon coalescence rate after the first splitter for photon width
/// `width` (rad/s) and relative delay `tau1`: 1 - exp(-Δω²τ₁²/2). Zero at
/// perfect overlap, 1 for separated wavepackets.
pub fn hom_rate(width: f64, tau1: f64) -> f64 {
    1.0 - gauss(width * tau1)
}

// Grouped so the τ₂ = 0 null is exact in floating point: every bracketed
// term vanishes identically there (at unit visibility).
fn debroglie_rate(
    center: f64,
    width: f64,
    envelope_width: f64,
    tau1: f64,
    tau2: f64,
    visibility: f64,
) -> f64 {
    let fringe = visibility * (2.0 * center * tau2).cos() * gauss(envelope_width * tau2);
    let p = gauss(width * tau1);
    0.25 * (2.0 * (1.0 - gauss(width * tau2))
        + (gauss(width * (tau1 - tau2)) - fringe * p)
        + (gauss(width * (tau1 + tau2)) - fringe * p)
        + 2.0 * (1.0 - fringe))
}

/// Coincidence rate for a pair from a broadband-pumped downconverter behind
/// a filter of width `filter_width`; `effective_width` combines pump and
/// filter in inverse quadrature and governs the fringe envelope alone.
pub fn spdc_debroglie_rate(
    center: f64,
    filter_width: f64,
    effective_width: f64,
    tau1: f64,
    tau2: f64,
) -> f64 {
    debroglie_rate(center, filter_width, effective_width, tau1, tau2, 1.0)
}

/// Coincidence rate for two independent identical photons: the pair case
/// with the fringe envelope collapsed onto the photon bandwidth.
pub fn separable_rate(center: f64, width: f64, tau1: f64, tau2: f64) -> f64 {
    debroglie_rate(center, width, width, tau1, tau2, 1.0)
}

fn distinguishable_rate_with_visibility(
    center: f64,
    width: f64,
    tau2: f64,
    visibility: f64,
) -> f64 {
    // Orthogonal polarizations kill the exchange terms; what is left is the
    // product of the two classical one-photon fringe patterns, whose
    // counter-phased cos(ω₀τ₂) parts merge into a half-wavelength fringe.
    let g2 = gauss(width * tau2);
    0.25 * (2.0 * (1.0 - g2) + 2.0 * (1.0 - visibility * (2.0 * center * tau2).cos() * g2))
}

/// Coincidence rate for orthogonally polarized photons. Independent of τ₁:
/// nothing interferes at the first splitter.
pub fn distinguishable_rate(center: f64, width: f64, tau2: f64) -> f64 {
    distinguishable_rate_with_visibility(center, width, tau2, 1.0)
}

/// Closed-form coincidence rate for any source model.
pub fn coincidence_rate(source: &SourceModel, delays: &DelayConfig) -> f64 {
    coincidence_rate_degraded(source, delays, 1.0)
}

/// Coincidence rate with the fringe term scaled by `fringe_visibility` in
/// [0, 1], modeling imperfect mode overlap; 1 reproduces
/// [`coincidence_rate`].
pub fn coincidence_rate_degraded(
    source: &SourceModel,
    delays: &DelayConfig,
    fringe_visibility: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&fringe_visibility));
    let center = source.center_frequency();
    let width = source.photon_width();
    match source {
        SourceModel::SpdcBroadbandPump { .. } | SourceModel::SeparableIdentical { .. } => {
            debroglie_rate(
                center,
                width,
                source.effective_width(),
                delays.tau1,
                delays.tau2,
                fringe_visibility,
            )
        }
        SourceModel::DistinguishablePolarized { .. } => {
            distinguishable_rate_with_visibility(center, width, delays.tau2, fringe_visibility)
        }
    }
}

/// Time-integrated one-photon rate at either final output, as a fraction of
/// the total flux. The two inputs produce counter-phased one-photon fringes
/// that cancel in the sum, so the value is exactly flat: no setting of the
/// delays reveals which port a photon entered.
pub const FLAT_SINGLES_RATE: f64 = 0.5;

/// Fringe period of cos(2ω₀τ₂) in the delay τ₂, in seconds.
pub fn fringe_period_delay(center: f64) -> f64 {
    std::f64::consts::PI / center
}

/// Fringe period as a path-length difference, in meters: half the carrier
/// wavelength.
pub fn fringe_period_length(center: f64) -> f64 {
    std::f64::consts::PI * SPEED_OF_LIGHT / center
}

/// One sample of a rate scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    /// Scan coordinate, in the unit of the scanned axis.
    pub axis: f64,
    pub rate: f64,
}
