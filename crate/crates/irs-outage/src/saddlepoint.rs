//! Saddlepoint asymptotics for the lower tail of the channel gain.
//!
//! The outage probability is the CDF of a sum of N product-Rayleigh gains
//! (plus one scaled Rayleigh gain with a direct link) evaluated far below
//! its mean. Inverting the Laplace transform through the stationary point
//! of ln L_G(t) + (x/N) t gives asymptotic densities and CDFs whose
//! accuracy improves as x/N shrinks, which is exactly the deep-tail regime
//! where plain Monte Carlo runs out of samples and the CLT is orders of
//! magnitude off.
//!
//! The formulas are meaningful for s < 2N/e, where ln(2N/s) - 1 > 0.
//! Evaluations outside that region return a flagged value (never panic or
//! error) so sweep output can mark the points honestly.
//!
//! Everything is assembled in log domain; linear-domain tail values here
//! reach 1e-300 territory well inside the parameter ranges of interest.

use crate::laplace::{laplace_g, laplace_g_derivative, TiltParameter};
use crate::specfun::{erfc, ln_factorial, upper_incomplete_gamma_int, LogProb};
use crate::{Error, Method, Result, TailValue};

/// Evaluation context: element count, evaluation point, and whether the
/// point sits inside the asymptotic validity region s < 2N/e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlepointContext {
    pub n: u32,
    pub x_or_s: f64,
    pub validity: bool,
}

impl SaddlepointContext {
    pub fn new(n: u32, x_or_s: f64) -> Result<Self> {
        check_inputs(x_or_s, n)?;
        Ok(SaddlepointContext {
            n,
            x_or_s,
            validity: decay_depth(x_or_s, n) > 0.0,
        })
    }
}

fn check_inputs(x: f64, n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidConfig("element count must be at least 1".into()));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositive {
            name: "evaluation point",
            value: x,
        });
    }
    Ok(())
}

/// m = ln(2N/x) - 1, the log depth of the point below the scale 2N/e.
/// Positive inside the validity region; every asymptotic formula below is
/// a function of it.
fn decay_depth(x: f64, n: u32) -> f64 {
    (2.0 * f64::from(n) / x).ln() - 1.0
}

/// Tilt t-hat at which the tilted per-element mean equals x/N, found by
/// bisection on the strictly decreasing Q(t) = -L_G'(t)/L_G(t). The
/// residual |Q(t-hat) - x/N| is at most 1e-10.
///
/// Only the lower tail is covered: x/N must lie below the per-element
/// mean pi/4, otherwise the required tilt would be nonpositive.
pub fn saddlepoint_numeric(x: f64, n: u32) -> Result<f64> {
    check_inputs(x, n)?;
    let target = x / f64::from(n);
    let mean = std::f64::consts::FRAC_PI_4;
    if target >= mean {
        return Err(Error::SaddlepointAboveMean {
            ratio: target,
            mean,
        });
    }
    let q = |t: f64| {
        let t = TiltParameter::new(t).expect("bracket stays positive");
        -laplace_g_derivative(t) / laplace_g(t)
    };
    // bracket: Q decreases from pi/4 at 0+ to 0, so walk the ends out
    // until they straddle the target
    let mut lo = 1e-9;
    while q(lo) <= target {
        lo /= 16.0;
        if lo < 1e-300 {
            return Err(Error::SaddlepointAboveMean {
                ratio: target,
                mean,
            });
        }
    }
    let mut hi = (2.0 / target).max(1.0);
    while q(hi) >= target {
        hi *= 2.0;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..300 {
        mid = 0.5 * (lo + hi);
        let r = q(mid) - target;
        if r.abs() <= 1e-11 {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * mid {
            break;
        }
    }
    Ok(mid)
}

/// Closed-form large-tilt limit of the saddlepoint location, 2N/x. The
/// numeric solve approaches this from below as x/N -> 0.
pub fn asymptotic_saddlepoint(x: f64, n: u32) -> f64 {
    2.0 * f64::from(n) / x
}

/// Log CDF of the N-element sum at s:
/// ln [ 2^N / (N^N sqrt(4 pi N)) * Gamma(N+1, 2N m) ], m = ln(2N/s) - 1.
///
/// Outside the validity region the value is NaN with `valid` false; at
/// the boundary m = 0 the value is still computable (the incomplete gamma
/// becomes N!) but flagged invalid.
pub fn log_cdf_h1(s: f64, n: u32) -> Result<TailValue> {
    check_inputs(s, n)?;
    let nf = f64::from(n);
    let m = decay_depth(s, n);
    let log_prob = if m >= 0.0 {
        nf * 2f64.ln() - nf * nf.ln() - 0.5 * (4.0 * std::f64::consts::PI * nf).ln()
            + upper_incomplete_gamma_int(n, 2.0 * nf * m)?
    } else {
        f64::NAN
    };
    Ok(TailValue {
        log_prob: LogProb::new(log_prob),
        method: Method::Saddlepoint,
        valid: m > 0.0,
    })
}

/// Leading-order version of [`log_cdf_h1`]:
/// ln [ 4^N e^{-2Nm} m^N / sqrt(4 pi N) ]. Keeps only the dominant term
/// of the incomplete gamma, so it underestimates the full form and the
/// gap closes as s/N -> 0.
pub fn log_cdf_h1_leading(s: f64, n: u32) -> Result<TailValue> {
    check_inputs(s, n)?;
    let nf = f64::from(n);
    let m = decay_depth(s, n);
    let log_prob = if m >= 0.0 {
        nf * 4f64.ln() - 2.0 * nf * m + nf * m.ln()
            - 0.5 * (4.0 * std::f64::consts::PI * nf).ln()
    } else {
        f64::NAN
    };
    Ok(TailValue {
        log_prob: LogProb::new(log_prob),
        method: Method::SaddlepointLeading,
        valid: m > 0.0,
    })
}

/// Finite-N rate function J_N(s) = -ln4 + 2m - ln m + ln(4 pi N)/(2N),
/// the normalized tail decay rate. Algebraically identical to
/// -log_cdf_h1_leading / N; kept as its own operation because tests pin
/// that regrouping.
pub fn rate_function(s: f64, n: u32) -> Result<f64> {
    check_inputs(s, n)?;
    let m = decay_depth(s, n);
    if m <= 0.0 {
        return Err(Error::OutsideValidity { s, n });
    }
    let nf = f64::from(n);
    Ok(-4f64.ln() + 2.0 * m - m.ln() + (4.0 * std::f64::consts::PI * nf).ln() / (2.0 * nf))
}

/// Log CDF of the sum plus direct-path gain:
/// ln [ 2^N sqrt(N) / (e^2 sqrt(pi) alpha_l (N+1)^{N+1}) *
///      Gamma(N+1, 2(N+1) m) ].
///
/// The extra +1 in the gamma argument relative to [`log_cdf_h1`] is what
/// deepens the tail decay by one order; alpha_l enters as a 1/alpha_l
/// prefactor, so rescaling it shifts the log value by exactly minus the
/// log ratio.
pub fn log_cdf_h2(s: f64, n: u32, alpha_l: f64) -> Result<TailValue> {
    check_inputs(s, n)?;
    if !(alpha_l > 0.0) || !alpha_l.is_finite() {
        return Err(Error::NonPositive {
            name: "alpha_l",
            value: alpha_l,
        });
    }
    let nf = f64::from(n);
    let m = decay_depth(s, n);
    let log_prob = if m >= 0.0 {
        nf * 2f64.ln() + 0.5 * nf.ln() - 2.0 - 0.5 * std::f64::consts::PI.ln() - alpha_l.ln()
            - (nf + 1.0) * (nf + 1.0).ln()
            + upper_incomplete_gamma_int(n, 2.0 * (nf + 1.0) * m)?
    } else {
        f64::NAN
    };
    Ok(TailValue {
        log_prob: LogProb::new(log_prob),
        method: Method::Saddlepoint,
        valid: m > 0.0,
    })
}

/// Log density of the N-element sum at x:
/// ln [ e^{2N} m^N / ((N/x)^{2N-1} sqrt(pi N)) ]. A density, so the value
/// may exceed 0; same validity handling as the CDFs.
pub fn log_pdf_h1(x: f64, n: u32) -> Result<TailValue> {
    check_inputs(x, n)?;
    let nf = f64::from(n);
    let m = decay_depth(x, n);
    let log_prob = if m >= 0.0 {
        2.0 * nf + nf * m.ln() - (2.0 * nf - 1.0) * (nf / x).ln()
            - 0.5 * (std::f64::consts::PI * nf).ln()
    } else {
        f64::NAN
    };
    Ok(TailValue {
        log_prob: LogProb::new(log_prob),
        method: Method::Saddlepoint,
        valid: m > 0.0,
    })
}

/// Diagnostic pair (exact, expansion) for the complementary error
/// function at sqrt(alpha_l) N / x: the expansion
/// x e^{-alpha_l N^2/x^2} (1 - x^2/(2 alpha_l N^2)) / (sqrt(pi alpha_l) N)
/// is the step that turns the direct-path erfc factor into the algebraic
/// tail form, and tests quantify its error against the exact value.
pub fn erfc_asymptotic_check(x: f64, n: u32, alpha_l: f64) -> Result<(f64, f64)> {
    check_inputs(x, n)?;
    if !(alpha_l > 0.0) || !alpha_l.is_finite() {
        return Err(Error::NonPositive {
            name: "alpha_l",
            value: alpha_l,
        });
    }
    let nf = f64::from(n);
    let exact = erfc(alpha_l.sqrt() * nf / x);
    let ratio_sq = alpha_l * nf * nf / (x * x);
    let expansion = x * (-ratio_sq).exp() * (1.0 - 0.5 / ratio_sq)
        / ((std::f64::consts::PI * alpha_l).sqrt() * nf);
    Ok((exact, expansion))
}

/// ln of the boundary CDF value at s = 2N/e, where the incomplete gamma
/// degenerates to N!. Exposed for tests of the flagged boundary.
fn boundary_log_cdf_h1(n: u32) -> f64 {
    let nf = f64::from(n);
    nf * 2f64.ln() - nf * nf.ln() - 0.5 * (4.0 * std::f64::consts::PI * nf).ln()
        + ln_factorial(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, FRAC_PI_4};

    // 30-digit reference values for every pinned constant below were
    // produced by evaluating the same formulas in 40-digit arithmetic,
    // with the incomplete gamma from an independent library routine.

    fn s_at_db(db: f64) -> f64 {
        (1.0 / (10f64.powf(db / 10.0) * 3.2e-4)).sqrt()
    }

    #[test]
    fn context_validity_flag() {
        let edge = 2.0 * 8.0 / E;
        let inside = SaddlepointContext::new(8, edge * (1.0 - 1e-9)).unwrap();
        assert!(inside.validity);
        let outside = SaddlepointContext::new(8, edge * (1.0 + 1e-9)).unwrap();
        assert!(!outside.validity);
        assert!(SaddlepointContext::new(0, 1.0).is_err());
        assert!(SaddlepointContext::new(8, -1.0).is_err());
    }

    #[test]
    fn numeric_saddlepoint_inverts_the_forward_map() {
        // Q(5) computed in high precision
        let q5 = 0.2324042591382122335946;
        let t = saddlepoint_numeric(4.0 * q5, 4).unwrap();
        assert!((t - 5.0).abs() < 1e-8, "t = {t}");
    }

    #[test]
    fn numeric_saddlepoint_residual_is_small() {
        for &(x, n) in &[(1.0, 16u32), (0.5, 8), (3.0, 16), (0.05, 4)] {
            let t = saddlepoint_numeric(x, n).unwrap();
            let tp = TiltParameter::new(t).unwrap();
            let q = -laplace_g_derivative(tp) / laplace_g(tp);
            assert!((q - x / f64::from(n)).abs() <= 1e-10);
        }
    }

    #[test]
    fn numeric_saddlepoint_rejects_points_above_the_mean() {
        assert!(matches!(
            saddlepoint_numeric(4.0, 4),
            Err(Error::SaddlepointAboveMean { .. })
        ));
        // exactly the mean has its tilt at 0, also out of scope
        assert!(saddlepoint_numeric(f64::from(4u32) * FRAC_PI_4, 4).is_err());
    }

    #[test]
    fn numeric_saddlepoint_at_the_reference_point() {
        // x = 1, N = 16: the closed-form guess 2N/x = 32 is still 21.4%
        // high here; the gap closes as x/N shrinks
        let t = saddlepoint_numeric(1.0, 16).unwrap();
        assert!((t - 25.14096178040663854761).abs() < 1e-7, "t = {t}");
        let gap = (asymptotic_saddlepoint(1.0, 16) - t) / asymptotic_saddlepoint(1.0, 16);
        assert!(gap > 0.20 && gap < 0.22, "gap = {gap}");
    }

    #[test]
    fn asymptote_tightens_as_the_tail_deepens() {
        let mut prev_gap = f64::INFINITY;
        for &ratio in &[0.2, 0.1, 0.05, 0.01] {
            let x = 8.0 * ratio;
            let t = saddlepoint_numeric(x, 8).unwrap();
            let guess = asymptotic_saddlepoint(x, 8);
            let gap = (guess - t).abs() / guess;
            assert!(gap < prev_gap, "ratio {ratio}: gap {gap} vs {prev_gap}");
            prev_gap = gap;
        }
        // t-hat * x/N approaches 2 from below, slowly (logarithmically)
        let t = saddlepoint_numeric(16.0 * 1e-4, 16).unwrap();
        let product = t * 1e-4;
        assert!(product < 2.0 && (2.0 - product) / 2.0 < 0.08, "product = {product}");
    }

    #[test]
    fn asymptotic_form_basics() {
        assert_eq!(asymptotic_saddlepoint(32.0, 16), 1.0);
        // scale covariance: (x, N) -> (2x, 2N) leaves the value fixed
        assert_eq!(
            asymptotic_saddlepoint(0.7, 8),
            asymptotic_saddlepoint(1.4, 16)
        );
        let a = saddlepoint_numeric(0.7, 8).unwrap();
        let b = saddlepoint_numeric(1.4, 16).unwrap();
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn cdf_h1_reference_values() {
        let v = log_cdf_h1(s_at_db(30.0), 8).unwrap();
        assert!(v.valid);
        assert!((v.log_prob.log_value - -8.495028673287471722101).abs() < 1e-11);
        let v = log_cdf_h1(s_at_db(20.0), 16).unwrap();
        assert!((v.log_prob.log_value - -8.063472987691341215508).abs() < 1e-11);
        let v = log_cdf_h1(0.5, 8).unwrap();
        assert!((v.log_prob.log_value - -23.22759444682057179562).abs() < 1e-11);
    }

    #[test]
    fn cdf_h1_hits_the_design_tail_depth() {
        // the reference geometry is tuned so outage sits near 1e-4 at
        // 30 dB for 8 elements and at 20 dB for 16
        let v = log_cdf_h1(s_at_db(30.0), 8).unwrap();
        assert!((v.log_prob.log10() + 4.0).abs() <= 0.5);
        let v = log_cdf_h1(s_at_db(20.0), 16).unwrap();
        assert!((v.log_prob.log10() + 4.0).abs() <= 0.5);
    }

    #[test]
    fn cdf_h1_boundary_and_invalid_region() {
        let edge = 2.0 * 8.0 / E;
        // just inside: finite, valid, and insensitive to the tiny offset
        let v = log_cdf_h1(edge * (1.0 - 1e-13), 8).unwrap();
        assert!(v.valid);
        assert!((v.log_prob.log_value - boundary_log_cdf_h1(8)).abs() < 1e-10);
        assert!((boundary_log_cdf_h1(8) - -2.790984880538438082873).abs() < 1e-12);
        // just outside: flagged, NaN value
        let v = log_cdf_h1(edge * (1.0 + 1e-9), 8).unwrap();
        assert!(!v.valid);
        assert!(v.log_prob.log_value.is_nan());
    }

    #[test]
    fn leading_form_reference_and_gap_shrink() {
        let v = log_cdf_h1_leading(0.5, 8).unwrap();
        assert!((v.log_prob.log_value - -23.44673002112271655642).abs() < 1e-11);
        assert_eq!(v.method, Method::SaddlepointLeading);
        // the leading form sits below the full form and closes in as the
        // evaluation point deepens
        let mut prev = f64::INFINITY;
        for &s in &[0.5, 0.1, 0.02] {
            let full = log_cdf_h1(s, 8).unwrap().log_prob.log_value;
            let lead = log_cdf_h1_leading(s, 8).unwrap().log_prob.log_value;
            assert!(lead < full);
            let gap = full - lead;
            assert!(gap < prev, "s = {s}");
            prev = gap;
        }
    }

    #[test]
    fn leading_form_vanishes_at_the_boundary() {
        // m = 0 makes the m^N factor collapse
        let s = 2.0 * 8.0 / E;
        let m = (16.0 / s).ln() - 1.0;
        if m >= 0.0 {
            let v = log_cdf_h1_leading(s, 8).unwrap();
            assert_eq!(v.log_prob.log_value, f64::NEG_INFINITY);
        } else {
            // float rounding landed the boundary point just outside
            let v = log_cdf_h1_leading(s * (1.0 - 1e-15), 8).unwrap();
            assert!(v.log_prob.log_value < -30.0);
        }
    }

    #[test]
    fn rate_function_is_the_normalized_leading_form() {
        let r = rate_function(0.5, 8).unwrap();
        assert!((r - 2.930841252640339569553).abs() < 1e-12);
        for &(s, n) in &[(0.5, 8u32), (1.0, 4), (3.0, 16), (0.02, 8)] {
            let lead = log_cdf_h1_leading(s, n).unwrap().log_prob.log_value;
            let r = rate_function(s, n).unwrap();
            assert!(
                (r - (-lead / f64::from(n))).abs() < 1e-12,
                "regrouping mismatch at ({s}, {n})"
            );
        }
        assert!(matches!(
            rate_function(6.0, 8),
            Err(Error::OutsideValidity { .. })
        ));
    }

    #[test]
    fn rate_function_decreases_in_s() {
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let s = 0.08 * f64::from(i);
            let r = rate_function(s, 8).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn cdf_h2_reference_values() {
        let a = 3.4435538721686154083;
        let s25 = s_at_db(25.0);
        let v = log_cdf_h2(s25, 8, a).unwrap();
        assert!(v.valid);
        assert!((v.log_prob.log_value - -7.968244571788260350537).abs() < 1e-11);
        let v = log_cdf_h2(0.5, 8, 1.0).unwrap();
        assert!((v.log_prob.log_value - -29.60974578710544910893).abs() < 1e-11);
    }

    #[test]
    fn cdf_h2_alpha_rescale_shifts_by_exact_log_ratio() {
        let base = log_cdf_h2(1.0, 8, 1.0).unwrap().log_prob.log_value;
        let scaled = log_cdf_h2(1.0, 8, 7.3).unwrap().log_prob.log_value;
        assert!((scaled - (base - 7.3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn cdf_h2_boundary_value() {
        let edge = 2.0 * 8.0 / E;
        let v = log_cdf_h2(edge * (1.0 - 1e-13), 8, 1.0).unwrap();
        assert!((v.log_prob.log_value - -5.157885020885943864305).abs() < 1e-10);
        let v = log_cdf_h2(edge * (1.0 + 1e-9), 8, 1.0).unwrap();
        assert!(!v.valid && v.log_prob.log_value.is_nan());
    }

    #[test]
    fn cdfs_monotone_in_s_inside_validity() {
        let n = 8;
        let hi = 2.0 * f64::from(n) / E * 0.999;
        let mut prev_h1 = f64::NEG_INFINITY;
        let mut prev_h2 = f64::NEG_INFINITY;
        for i in 1..=200 {
            let s = hi * f64::from(i) / 200.0;
            let v1 = log_cdf_h1(s, n).unwrap().log_prob.log_value;
            let v2 = log_cdf_h2(s, n, 3.44).unwrap().log_prob.log_value;
            assert!(v1 >= prev_h1, "h1 not monotone at s = {s}");
            assert!(v2 >= prev_h2, "h2 not monotone at s = {s}");
            prev_h1 = v1;
            prev_h2 = v2;
        }
    }

    #[test]
    fn pdf_reference_values() {
        let v = log_pdf_h1(0.3, 4).unwrap();
        assert!(v.valid);
        assert!((v.log_prob.log_value - -8.094694909688824969772).abs() < 1e-11);
        let v = log_pdf_h1(0.5, 8).unwrap();
        assert!((v.log_prob.log_value - -19.98099411832299000934).abs() < 1e-11);
        let v = log_pdf_h1(2.0 * 8.0 / E * (1.0 + 1e-9), 8).unwrap();
        assert!(!v.valid && v.log_prob.log_value.is_nan());
    }

    #[test]
    fn erfc_expansion_quality() {
        // deep argument: expansion good to 1e-3
        let (exact, approx) = erfc_asymptotic_check(1.0, 10, 1.0).unwrap();
        assert!(((approx - exact) / exact).abs() <= 1e-3);
        // shallower argument: strictly worse
        let (exact2, approx2) = erfc_asymptotic_check(1.0, 2, 1.0).unwrap();
        let gap2 = ((approx2 - exact2) / exact2).abs();
        let gap10 = ((approx - exact) / exact).abs();
        assert!(gap2 > gap10);
        // large alpha at fixed N/x: both sides tiny, ratio near 1
        let (exact3, approx3) = erfc_asymptotic_check(1.0, 2, 25.0).unwrap();
        assert!(exact3 < 1e-40 && approx3 < 1e-40);
        assert!((approx3 / exact3 - 1.0).abs() < 0.01);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(log_cdf_h1(0.0, 8).is_err());
        assert!(log_cdf_h1(1.0, 0).is_err());
        assert!(log_cdf_h2(1.0, 8, -1.0).is_err());
        assert!(log_pdf_h1(f64::NAN, 8).is_err());
        assert!(erfc_asymptotic_check(1.0, 8, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn forward_inverse_roundtrip(t in 0.05f64..100.0) {
            let tp = TiltParameter::new(t).unwrap();
            let q = -laplace_g_derivative(tp) / laplace_g(tp);
            let n = 8u32;
            let back = saddlepoint_numeric(f64::from(n) * q, n).unwrap();
            prop_assert!((back - t).abs() <= 1e-6 * t.max(1.0));
        }

        #[test]
        fn tilt_decreases_as_the_point_rises(
            x in 0.05f64..5.0,
            bump in 1.05f64..2.0,
        ) {
            let n = 8u32;
            prop_assume!(x * bump / 8.0 < FRAC_PI_4);
            let t1 = saddlepoint_numeric(x, n).unwrap();
            let t2 = saddlepoint_numeric(x * bump, n).unwrap();
            prop_assert!(t2 < t1);
        }

        #[test]
        fn numeric_scale_covariance(x in 0.1f64..3.0) {
            let a = saddlepoint_numeric(x, 8).unwrap();
            let b = saddlepoint_numeric(2.0 * x, 16).unwrap();
            prop_assert!((a - b).abs() < 1e-6 * a);
        }
    }
}
