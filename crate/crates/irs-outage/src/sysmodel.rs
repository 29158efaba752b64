//! Link geometry, SNR bookkeeping, and the reduction of an outage query to
//! a CDF evaluation point.
//!
//! The setup is a source talking to a destination through a reflecting
//! surface with `n_elements` elements (source-to-surface distance `d1`,
//! surface-to-destination `d2`, path-loss exponents `v1`, `v2`), with an
//! optional direct source-to-destination path (`d_l`, `v_l`). Outage means
//! the received SNR falls below the threshold `gamma_bar`. All analytic and
//! sampling machinery works on the normalized channel amplitude, so the
//! only job of this module is to turn a query (config, scenario, transmit
//! SNR) into the scalar threshold that amplitude is compared against.

use crate::specfun::LogProb;
use crate::{Error, Result};

/// Static description of the link: element count, geometry, path-loss
/// exponents, and the linear-scale SNR threshold that defines outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_elements: u32,
    pub d1: f64,
    pub d2: f64,
    pub d_l: f64,
    pub v1: f64,
    pub v2: f64,
    pub v_l: f64,
    pub gamma_bar: f64,
}

impl Default for SystemConfig {
    /// The reference geometry used throughout the tests and as the CLI
    /// default: 16 elements, d1 = d2 = 5 m at exponent 2.5, direct path
    /// 7 m at exponent 3.5, threshold 0 dB.
    fn default() -> Self {
        SystemConfig {
            n_elements: 16,
            d1: 5.0,
            d2: 5.0,
            d_l: 7.0,
            v1: 2.5,
            v2: 2.5,
            v_l: 3.5,
            gamma_bar: 1.0,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_elements < 1 {
            return Err(Error::InvalidConfig(
                "n_elements must be at least 1".into(),
            ));
        }
        for (name, value) in [
            ("d1", self.d1),
            ("d2", self.d2),
            ("dL", self.d_l),
            ("v1", self.v1),
            ("v2", self.v2),
            ("vL", self.v_l),
            ("gamma_bar", self.gamma_bar),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Combined path loss of the reflected route, d1^{-v1} d2^{-v2}.
    pub fn beta_r(&self) -> f64 {
        self.d1.powf(-self.v1) * self.d2.powf(-self.v2)
    }

    /// Path loss of the direct route relative to the reflected one,
    /// dL^{-vL} / beta_r. This is the weight the direct-path amplitude
    /// carries once the channel is normalized by the reflected route.
    pub fn alpha_l(&self) -> f64 {
        self.d_l.powf(-self.v_l) / self.beta_r()
    }
}

/// Whether the destination additionally hears the direct path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    NoDirectLink,
    WithDirectLink,
}

/// One outage question: a config, a scenario, and a transmit SNR
/// (linear scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub config: SystemConfig,
    pub scenario: Scenario,
    pub gamma_t: f64,
}

impl OutageQuery {
    pub fn new(config: SystemConfig, scenario: Scenario, gamma_t: f64) -> Result<Self> {
        config.validate()?;
        if !(gamma_t > 0.0) || !gamma_t.is_finite() {
            return Err(Error::NonPositive {
                name: "gamma_t",
                value: gamma_t,
            });
        }
        Ok(OutageQuery {
            config,
            scenario,
            gamma_t,
        })
    }
}

/// The amplitude threshold s with P_out = P(H < s), namely
/// s = sqrt(gamma_bar / (gamma_t beta_r)). Strictly decreasing in the
/// transmit SNR: more power means a smaller slice of the amplitude
/// distribution counts as outage.
pub fn channel_threshold(q: &OutageQuery) -> f64 {
    (q.config.gamma_bar / (q.gamma_t * q.config.beta_r())).sqrt()
}

/// Least-squares slope of -log10(P_out) against log10(gamma_t).
///
/// For a curve that behaves like gamma_t^{-k} in the fitted window the
/// result approaches k, so this measures the decay order of a tail curve.
/// The grid must be strictly increasing with finite, negative log
/// probabilities.
pub fn diversity_order_estimate(curve: &[(f64, LogProb)]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::DegenerateCurve);
    }
    let mut prev = 0.0;
    for (i, &(g, p)) in curve.iter().enumerate() {
        if !(g > 0.0) || !g.is_finite() || !p.log_value.is_finite() {
            return Err(Error::DegenerateCurve);
        }
        if i > 0 && g <= prev {
            return Err(Error::DegenerateCurve);
        }
        prev = g;
    }
    let n = curve.len() as f64;
    let xs: Vec<f64> = curve.iter().map(|&(g, _)| g.log10()).collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, p)| -p.log10()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    Ok(sxy / sxx)
}
