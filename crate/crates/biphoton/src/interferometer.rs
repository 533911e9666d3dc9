//! Mach-Zehnder geometry: arm delays, beam-splitter conventions, and the
//! eight-amplitude decomposition of a two-photon detection event.
//!
//! Both 50:50 splitters use the symmetric convention (reflection picks up a
//! factor i). Input a crosses a delay τ₁ before the first splitter; the
//! output arm d between the splitters carries the delay τ₂:
//!
//! ```text
//! E_c(t) = [i·E_a(t-τ₁) + E_b(t)] / √2      E_e(t) = [i·E_c(t) + E_d(t-τ₂)] / √2
//! E_d(t) = [E_a(t-τ₁) + i·E_b(t)] / √2      E_f(t) = [E_c(t) + i·E_d(t-τ₂)] / √2
//! ```
//!
//! Expanding a two-photon coincidence at port e therefore yields four
//! amplitude lines with signs (+, −, −, +) on a common i/4, each doubled by
//! the exchange of detection times. [`enumerate_paths`] derives those eight
//! paths from the field composition rather than hardcoding them.

use num_complex::Complex64;

use crate::sources::{Polarization, SourceModel};
use crate::SPEED_OF_LIGHT;

/// Relative delays of the two interferometer arms, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayConfig {
    /// Delay of input a before the first splitter.
    pub tau1: f64,
    /// Delay of inner arm d between the splitters.
    pub tau2: f64,
}

impl DelayConfig {
    pub fn new(tau1: f64, tau2: f64) -> Self {
        Self { tau1, tau2 }
    }

    /// From path-length differences in meters.
    pub fn from_path_lengths(x1: f64, x2: f64) -> Self {
        Self { tau1: x1 / SPEED_OF_LIGHT, tau2: x2 / SPEED_OF_LIGHT }
    }

    pub fn path_length_1(&self) -> f64 {
        self.tau1 * SPEED_OF_LIGHT
    }

    pub fn path_length_2(&self) -> f64 {
        self.tau2 * SPEED_OF_LIGHT
    }
}

/// Interferometer input port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    A,
    B,
}

/// One time-shifted term of an output field: `coeff · E_input(t - shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldTerm {
    pub input: InputMode,
    pub shift: f64,
    pub coeff: Complex64,
}

/// The symmetric 50:50 splitter matrix [[i, 1], [1, i]]/√2; row = output
/// port, column = input port.
pub fn beam_splitter_matrix() -> [[Complex64; 2]; 2] {
    let r = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let t = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[r, t], [t, r]]
}

fn apply_splitter(first: &[FieldTerm], second: &[FieldTerm]) -> [Vec<FieldTerm>; 2] {
    let m = beam_splitter_matrix();
    let mut ports = [Vec::new(), Vec::new()];
    for (row, port) in m.iter().zip(ports.iter_mut()) {
        for (coeff, terms) in row.iter().zip([first, second]) {
            port.extend(terms.iter().map(|t| FieldTerm { coeff: coeff * t.coeff, ..*t }));
        }
    }
    ports
}

fn delayed(terms: &[FieldTerm], delay: f64) -> Vec<FieldTerm> {
    terms.iter().map(|t| FieldTerm { shift: t.shift + delay, ..*t }).collect()
}

/// Fields at the outputs (c, d) of the first splitter, where two-photon
/// coalescence is measured.
pub fn hom_output_fields(delays: &DelayConfig) -> [Vec<FieldTerm>; 2] {
    let a = [FieldTerm { input: InputMode::A, shift: delays.tau1, coeff: Complex64::ONE }];
    let b = [FieldTerm { input: InputMode::B, shift: 0.0, coeff: Complex64::ONE }];
    apply_splitter(&a, &b)
}

/// Fields at the final outputs (e, f), composing both splitters and both
/// delays.
pub fn interferometer_output_fields(delays: &DelayConfig) -> [Vec<FieldTerm>; 2] {
    let [c, d] = hom_output_fields(delays);
    apply_splitter(&c, &delayed(&d, delays.tau2))
}

/// One of the eight amplitudes of a two-photon coincidence at port e: the
/// photon from input a arrives `shift_a` late, the one from b `shift_b` late,
/// with sign `sign` on a common prefactor i/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeynmanPath {
    pub shift_a: f64,
    pub shift_b: f64,
    pub sign: i8,
    /// Whether the a-photon occupies the later detection slot t′ instead of t.
    pub exchanged: bool,
    /// Polarization tags of the (a, b) photons.
    pub polarizations: (Polarization, Polarization),
    /// Paths in different groups end in orthogonal final states and add
    /// incoherently; identical-polarization sources put all eight in group 0.
    pub coherence_group: u8,
}

/// Expands the two-photon coincidence amplitude at port e into its eight
/// paths, derived from [`interferometer_output_fields`].
pub fn enumerate_paths(source: &SourceModel, delays: &DelayConfig) -> Vec<FeynmanPath> {
    let [mode_e, _] = interferometer_output_fields(delays);
    let polarizations = source.input_polarizations();
    let distinguishable = polarizations.0 != polarizations.1;
    let mut paths = Vec::with_capacity(8);
    for ta in mode_e.iter().filter(|t| t.input == InputMode::A) {
        for tb in mode_e.iter().filter(|t| t.input == InputMode::B) {
            // Splitter phases multiply to ±i/4 for 50:50 ratios.
            let amp = ta.coeff * tb.coeff;
            debug_assert!(amp.re.abs() < 1e-15 && (amp.im.abs() - 0.25).abs() < 1e-15);
            let sign = if amp.im > 0.0 { 1 } else { -1 };
            for exchanged in [false, true] {
                paths.push(FeynmanPath {
                    shift_a: ta.shift,
                    shift_b: tb.shift,
                    sign,
                    exchanged,
                    polarizations,
                    coherence_group: u8::from(distinguishable && exchanged),
                });
            }
        }
    }
    paths
}

/// How well the four amplitude lines of the coincidence overlap in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOverlapClass {
    /// |τ₂| below a tenth of the coherence time: all lines collapse onto each
    /// other (for any τ₁) and interference is complete.
    AllIndistinguishable,
    /// Some, but not all, cross terms survive.
    PartiallyDistinguishable,
    /// Every ordered pair of lines differs by more than five coherence times
    /// in at least one arrival slot: all cross terms are dead.
    FullyDistinguishable,
}

/// Classifies the delay configuration by wavepacket overlap.
pub fn path_overlap_class(delays: &DelayConfig, coherence_time: f64) -> PathOverlapClass {
    let (t1, t2) = (delays.tau1, delays.tau2);
    if t2.abs() < 0.1 * coherence_time {
        return PathOverlapClass::AllIndistinguishable;
    }
    let lines = [(t1 + t2, t2), (t1, 0.0), (t1, t2), (t1 + t2, 0.0)];
    let separated = |j: usize, k: usize| {
        let (aj, bj) = lines[j];
        let (ak, bk) = lines[k];
        (aj - ak).abs().max((bj - bk).abs()) > 5.0 * coherence_time
    };
    let all_separated =
        (0..4).all(|j| (j + 1..4).all(|k| separated(j, k)));
    if all_separated {
        PathOverlapClass::FullyDistinguishable
    } else {
        PathOverlapClass::PartiallyDistinguishable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::SpectralProfile;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn separable_source() -> SourceModel {
        SourceModel::separable(SpectralProfile::from_wavelength(810e-9, 5e-9).unwrap()).unwrap()
    }

    fn distinguishable_source() -> SourceModel {
        SourceModel::distinguishable(SpectralProfile::from_wavelength(810e-9, 5e-9).unwrap())
            .unwrap()
    }

    #[test]
    fn splitter_matrix_is_unitary() {
        let m = beam_splitter_matrix();
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot.re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(dot.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn output_fields_conserve_power_per_input() {
        let delays = DelayConfig::new(3e-13, 1e-13);
        for ports in [hom_output_fields(&delays), interferometer_output_fields(&delays)] {
            for input in [InputMode::A, InputMode::B] {
                let power: f64 = ports
                    .iter()
                    .flatten()
                    .filter(|t| t.input == input)
                    .map(|t| t.coeff.norm_sqr())
                    .sum();
                assert_relative_eq!(power, 1.0, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn hom_fields_match_splitter_convention() {
        let delays = DelayConfig::new(2e-13, 0.0);
        let [c, d] = hom_output_fields(&delays);
        // E_c = (i·E_a(t-τ₁) + E_b)/√2, E_d = (E_a(t-τ₁) + i·E_b)/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].input, InputMode::A);
        assert_eq!(c[0].shift, 2e-13);
        assert_abs_diff_eq!(c[0].coeff.im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1].coeff.re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(d[0].coeff.re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1].coeff.im, s, epsilon = 1e-15);
    }

    #[test]
    fn both_via_c_and_both_via_d_have_opposite_signs() {
        let delays = DelayConfig::new(3e-13, 1.2e-13);
        let [mode_e, _] = interferometer_output_fields(&delays);
        let coeff = |input: InputMode, shift: f64| {
            mode_e
                .iter()
                .find(|t| t.input == input && (t.shift - shift).abs() < 1e-20)
                .expect("term present")
                .coeff
        };
        // via c: a keeps shift τ₁, b keeps shift 0; via d: both pick up τ₂.
        let via_c = coeff(InputMode::A, 3e-13) * coeff(InputMode::B, 0.0);
        let via_d = coeff(InputMode::A, 4.2e-13) * coeff(InputMode::B, 1.2e-13);
        assert_abs_diff_eq!((via_c + via_d).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(via_c.norm(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn eight_paths_with_balanced_signs() {
        let delays = DelayConfig::new(3e-13, 1.2e-13);
        let paths = enumerate_paths(&separable_source(), &delays);
        assert_eq!(paths.len(), 8);
        assert_eq!(paths.iter().filter(|p| p.sign > 0).count(), 4);
        assert_eq!(paths.iter().filter(|p| p.exchanged).count(), 4);

        // The four lines, each doubled by exchange: (τ₁+τ₂, τ₂, +),
        // (τ₁, 0, −), (τ₁, τ₂, −), (τ₁+τ₂, 0, +).
        let (t1, t2) = (delays.tau1, delays.tau2);
        let expected = [
            (t1 + t2, t2, 1),
            (t1, 0.0, -1),
            (t1, t2, -1),
            (t1 + t2, 0.0, 1),
        ];
        for (a, b, sign) in expected {
            let n = paths
                .iter()
                .filter(|p| {
                    (p.shift_a - a).abs() < 1e-25
                        && (p.shift_b - b).abs() < 1e-25
                        && i32::from(p.sign) == sign
                })
                .count();
            assert_eq!(n, 2, "line ({a:e}, {b:e}, {sign}) missing its exchange pair");
        }
    }

    #[test]
    fn paths_cancel_pairwise_at_zero_fringe_delay() {
        // At τ₂ = 0 all four lines share the same shifts, so the signed sum
        // of their carrier phases vanishes for any frequency: the exact null.
        let delays = DelayConfig::new(2.7e-13, 0.0);
        let paths = enumerate_paths(&separable_source(), &delays);
        for omega in [1.0e15, 2.3e15] {
            let total: Complex64 = paths
                .iter()
                .filter(|p| !p.exchanged)
                .map(|p| {
                    f64::from(p.sign)
                        * Complex64::from_polar(1.0, omega * (p.shift_a + p.shift_b))
                })
                .sum();
            assert_abs_diff_eq!(total.norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn fringe_delay_sign_flip_negates_the_path_sum() {
        // Flipping τ₂ and translating all shifts by τ₂ reproduces the original
        // lines with every sign negated, so |amplitude|² is even in τ₂.
        let (t1, t2) = (3.1e-13, 0.9e-13);
        let fwd = enumerate_paths(&separable_source(), &DelayConfig::new(t1, t2));
        let rev = enumerate_paths(&separable_source(), &DelayConfig::new(t1, -t2));
        let key = |a: f64, b: f64, sign: i8, ex: bool| {
            (format!("{:.25e},{:.25e}", a, b), sign, ex)
        };
        let mut fwd_keys: Vec<_> =
            fwd.iter().map(|p| key(p.shift_a, p.shift_b, p.sign, p.exchanged)).collect();
        let mut rev_keys: Vec<_> = rev
            .iter()
            .map(|p| key(p.shift_a + t2, p.shift_b + t2, -p.sign, p.exchanged))
            .collect();
        fwd_keys.sort();
        rev_keys.sort();
        assert_eq!(fwd_keys, rev_keys);
    }

    #[test]
    fn distinguishable_paths_split_into_exchange_groups() {
        let delays = DelayConfig::new(3e-13, 1.2e-13);
        let dist = enumerate_paths(&distinguishable_source(), &delays);
        for p in &dist {
            assert_eq!(p.coherence_group, u8::from(p.exchanged));
            assert_ne!(p.polarizations.0, p.polarizations.1);
        }
        let sep = enumerate_paths(&separable_source(), &delays);
        assert!(sep.iter().all(|p| p.coherence_group == 0));
    }

    #[test]
    fn overlap_classification() {
        let tc = 1.6e-13;
        assert_eq!(
            path_overlap_class(&DelayConfig::new(5.0 * tc, 0.0), tc),
            PathOverlapClass::AllIndistinguishable
        );
        assert_eq!(
            path_overlap_class(&DelayConfig::new(0.0, 100.0 * tc), tc),
            PathOverlapClass::FullyDistinguishable
        );
        assert_eq!(
            path_overlap_class(&DelayConfig::new(0.0, tc), tc),
            PathOverlapClass::PartiallyDistinguishable
        );
        // Large τ₁ at small (but nonzero) τ₂ still leaves overlapping lines.
        assert_eq!(
            path_overlap_class(&DelayConfig::new(100.0 * tc, 0.2 * tc), tc),
            PathOverlapClass::PartiallyDistinguishable
        );
    }

    #[test]
    fn delays_from_path_lengths() {
        let d = DelayConfig::from_path_lengths(62e-6, 405e-9);
        assert_relative_eq!(d.tau1, 62e-6 / SPEED_OF_LIGHT, max_relative = 1e-15);
        assert_relative_eq!(d.path_length_2(), 405e-9, max_relative = 1e-15);
    }
}
