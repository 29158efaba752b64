//! Chernoff upper bound on the outage probability.
//!
//! For the channel gain H (a sum of independent per-element gains, plus
//! the direct-path gain when present), P(H < s) <= e^{ts} E[e^{-tH}] for
//! every tilt t > 0. The right side factors into the Laplace transforms
//! from [`crate::laplace`], so the bound is min over t of
//! w(t) = e^{ts} L_G(t)^N (times L_D(t) with a direct link). w is convex,
//! and its log is minimized here by plain gradient descent with a
//! backtracking line search.
//!
//! Everything runs on ln w: the linear-domain objective under- or
//! overflows already at moderate N, while its log is a sum of benign
//! terms (and is itself convex, since ln L_G and ln L_D are).

use crate::laplace::{laplace_d, laplace_d_derivative, laplace_g, laplace_g_derivative, TiltParameter};
use crate::specfun::LogProb;
use crate::sysmodel::{channel_threshold, OutageQuery, Scenario};
use crate::{Error, Result};

/// Gradient descent settings: start point, gradient tolerance,
/// backtracking (sufficient-decrease fraction and step shrink factor),
/// and the iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdmConfig {
    pub t0: f64,
    pub epsilon: f64,
    pub backtrack_alpha: f64,
    pub backtrack_beta: f64,
    pub max_iters: u32,
}

impl Default for GdmConfig {
    fn default() -> Self {
        GdmConfig {
            t0: 1.0,
            epsilon: 1e-8,
            backtrack_alpha: 0.25,
            backtrack_beta: 0.5,
            max_iters: 10_000,
        }
    }
}

impl GdmConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t0 > 0.0
            && self.t0.is_finite()
            && self.epsilon > 0.0
            && self.backtrack_alpha > 0.0
            && self.backtrack_alpha < 0.5
            && self.backtrack_beta > 0.0
            && self.backtrack_beta < 1.0
            && self.max_iters >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "gradient descent settings out of range: {self:?}"
            )))
        }
    }
}

/// Outcome of a bound minimization. `t_star` is `None` when the minimum
/// sits on the t -> 0 boundary, where the bound degenerates to 1. The
/// bound is valid at any t, so even a non-converged run (`converged`
/// false) reports the best value seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    pub t_star: Option<f64>,
    pub log_bound: LogProb,
    pub iterations: u32,
    pub converged: bool,
}

/// One of the two bound objectives with its parameters bound: ln w(t) for
/// the surface-only channel, ln z(t) with the direct-path factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundObjective {
    NoLink { s: f64, n: u32 },
    WithLink { s: f64, n: u32, alpha_l: f64 },
}

impl BoundObjective {
    pub fn no_link(s: f64, n: u32) -> Result<Self> {
        check_s_n(s, n)?;
        Ok(BoundObjective::NoLink { s, n })
    }

    pub fn with_link(s: f64, n: u32, alpha_l: f64) -> Result<Self> {
        check_s_n(s, n)?;
        if !(alpha_l > 0.0) || !alpha_l.is_finite() {
            return Err(Error::NonPositive {
                name: "alpha_l",
                value: alpha_l,
            });
        }
        Ok(BoundObjective::WithLink { s, n, alpha_l })
    }

    /// ln of the bound objective at tilt t.
    pub fn log_value(&self, t: TiltParameter) -> f64 {
        match *self {
            BoundObjective::NoLink { s, n } => t.value() * s + f64::from(n) * laplace_g(t).ln(),
            BoundObjective::WithLink { s, n, alpha_l } => {
                let ld = laplace_d(t, alpha_l).expect("alpha_l validated at construction");
                t.value() * s + ld.ln() + f64::from(n) * laplace_g(t).ln()
            }
        }
    }

    /// d/dt of [`Self::log_value`], assembled from the analytic transform
    /// derivatives.
    pub fn derivative(&self, t: TiltParameter) -> f64 {
        match *self {
            BoundObjective::NoLink { s, n } => {
                s + f64::from(n) * laplace_g_derivative(t) / laplace_g(t)
            }
            BoundObjective::WithLink { s, n, alpha_l } => {
                let ld = laplace_d(t, alpha_l).expect("alpha_l validated at construction");
                let ldp = laplace_d_derivative(t, alpha_l).expect("alpha_l validated");
                s + ldp / ld + f64::from(n) * laplace_g_derivative(t) / laplace_g(t)
            }
        }
    }

    /// Exact limit of the objective slope at t -> 0+, namely s minus the
    /// mean of the channel gain (N pi/4, plus sqrt(pi alpha_l)/2 with the
    /// direct link). Nonnegative slope at the origin means the infimum
    /// over t > 0 is the trivial bound 1.
    pub fn gradient_at_origin(&self) -> f64 {
        match *self {
            BoundObjective::NoLink { s, n } => {
                s - f64::from(n) * std::f64::consts::FRAC_PI_4
            }
            BoundObjective::WithLink { s, n, alpha_l } => {
                s - f64::from(n) * std::f64::consts::FRAC_PI_4
                    - (std::f64::consts::PI * alpha_l).sqrt() / 2.0
            }
        }
    }
}

fn check_s_n(s: f64, n: u32) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NonPositive {
            name: "threshold s",
            value: s,
        });
    }
    if n < 1 {
        return Err(Error::InvalidConfig("element count must be at least 1".into()));
    }
    Ok(())
}

/// ln w(t) = t s + N ln L_G(t), the bound objective without direct link.
pub fn objective_no_link(t: TiltParameter, s: f64, n: u32) -> Result<LogProb> {
    Ok(LogProb::new(BoundObjective::no_link(s, n)?.log_value(t)))
}

/// ln z(t) = t s + ln L_D(t) + N ln L_G(t), with the direct link.
pub fn objective_with_link(t: TiltParameter, s: f64, n: u32, alpha_l: f64) -> Result<LogProb> {
    Ok(LogProb::new(
        BoundObjective::with_link(s, n, alpha_l)?.log_value(t),
    ))
}

/// Minimize a bound objective by gradient descent with backtracking.
///
/// The boundary case (nonnegative slope at t -> 0) short-circuits to the
/// trivial bound 1. Otherwise plain descent steps t <- t - xi g run until
/// |g| <= epsilon or the iteration cap; the cap is reported through
/// `converged`, never as an error, and the best visited value is returned
/// either way (every t > 0 yields a valid bound). The result is clamped
/// at ln 1 = 0 since a CDF bound above 1 carries no information.
pub fn minimize(objective: &BoundObjective, cfg: &GdmConfig) -> Result<ChernoffResult> {
    cfg.validate()?;
    if objective.gradient_at_origin() >= 0.0 {
        return Ok(ChernoffResult {
            t_star: None,
            log_bound: LogProb::new(0.0),
            iterations: 0,
            converged: true,
        });
    }
    let mut t = cfg.t0;
    let mut f = objective.log_value(TiltParameter::new(t)?);
    let mut best_t = t;
    let mut best_f = f;
    let mut iterations = 0;
    let mut converged = false;
    // step scale carried between iterations: each accepted step relaxes it
    // one notch, each rejection backtracks, so the search settles on the
    // objective's own curvature scale instead of crawling at unit steps
    let mut xi = 1.0;
    loop {
        let g = objective.derivative(TiltParameter::new(t).expect("t stays positive"));
        if g.abs() <= cfg.epsilon {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iters {
            break;
        }
        iterations += 1;
        let dir = -g;
        let mut moved = false;
        for _ in 0..600 {
            let cand = t + xi * dir;
            if let Ok(cand_t) = TiltParameter::new(cand) {
                let fc = objective.log_value(cand_t);
                // sufficient decrease along the descent direction
                if fc <= f + cfg.backtrack_alpha * xi * g * dir {
                    t = cand;
                    f = fc;
                    moved = true;
                    break;
                }
            }
            xi *= cfg.backtrack_beta;
        }
        if !moved {
            // line search hit float resolution; do not spin
            break;
        }
        xi = (xi / cfg.backtrack_beta).min(1e12);
        if f < best_f {
            best_f = f;
            best_t = t;
        }
    }
    Ok(ChernoffResult {
        t_star: Some(best_t),
        log_bound: LogProb::new(best_f.min(0.0)),
        iterations,
        converged,
    })
}

/// Chernoff bound for an outage query: reduce to the amplitude threshold,
/// pick the matching objective, minimize.
pub fn chernoff_outage(q: &OutageQuery, cfg: &GdmConfig) -> Result<ChernoffResult> {
    q.config.validate()?;
    let s = channel_threshold(q);
    let objective = match q.scenario {
        Scenario::NoDirectLink => BoundObjective::no_link(s, q.config.n_elements)?,
        Scenario::WithDirectLink => {
            BoundObjective::with_link(s, q.config.n_elements, q.config.alpha_l())?
        }
    };
    minimize(&objective, cfg)
}
