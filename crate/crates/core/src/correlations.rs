//! Gaussian Rényi-2 entanglement and discord of standard-form two-mode
//! states, plus a derivative-free Gaussian-measurement optimiser that serves
//! as an independent discord oracle.
//!
//! All measures are in nats. Tiny negative values (above `-1e-12`) produced by
//! floating-point cancellation are clamped to zero; anything more negative is
//! an error rather than a clamp.

use crate::error::{Error, Result};
use crate::gaussian::{mutual_information_r2, symplectic_eigenvalues, TwoModeCM};

/// Which mode a Gaussian measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measured {
    A,
    B,
}

/// Pure single-mode measurement seed
/// `sigma_m = R(theta) diag(lambda, 1/lambda) R(theta)^T / 2`:
/// `lambda = 1` is heterodyne, `lambda -> 0` or `infinity` approach homodyne.
#[derive(Debug, Clone, Copy)]
pub struct GaussianMeasurement {
    pub lambda: f64,
    pub theta: f64,
}

impl GaussianMeasurement {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("lambda must be finite and > 0, got {lambda}")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidInput(format!("theta must be finite, got {theta}")));
        }
        Ok(GaussianMeasurement { lambda, theta })
    }

    /// Entries `(s_qq, s_pp, s_qp)` of the seed CM.
    pub fn seed_cm(&self) -> (f64, f64, f64) {
        let (sin, cos) = self.theta.sin_cos();
        let (lam, inv) = (self.lambda, 1.0 / self.lambda);
        (
            0.5 * (lam * cos * cos + inv * sin * sin),
            0.5 * (lam * sin * sin + inv * cos * cos),
            0.5 * (lam - inv) * sin * cos,
        )
    }
}

/// Everything the sweep reports per bipartition.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationReport {
    /// Gaussian Rényi-2 entanglement.
    pub e2: f64,
    /// Rényi-2 discord with the measurement on mode B.
    pub d2_a_given_b: f64,
    /// Rényi-2 discord with the measurement on mode A.
    pub d2_b_given_a: f64,
    /// Rényi-2 mutual information.
    pub i2: f64,
    /// One-way classical correlations `I2 - D2(A|B)`.
    pub j2: f64,
    /// Determinant of the cross-covariance block; `< 0` is necessary for
    /// entanglement.
    pub det_v3: f64,
    /// Smaller symplectic eigenvalue.
    pub nu_minus: f64,
    pub entangled: bool,
}

const NEGATIVE_CLAMP: f64 = 1e-12;

fn clamp_measure(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NEGATIVE_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::InvalidInput(format!(
            "{what} came out negative beyond cancellation tolerance: {value:.3e}"
        )))
    }
}

/// Gaussian Rényi-2 entanglement of a squeezed-thermal-class state
/// (`nu3 * nu3p <= 0`), for which the closed form is exact:
/// with `s = (nu1+nu2)/2`, `d = (nu1-nu2)/2`, `f = sqrt(det V)`,
///
/// ```text
/// E2 = ln[ ((4f+1)s - sqrt([(4f-1)^2 - 16 d^2][s^2 - d^2 - f])) / (4(d^2+f)) ]
/// ```
///
/// when `4f < 4s - 1`, and zero otherwise. States with `nu3 * nu3p > 0` fall
/// outside the class and are rejected instead of silently evaluated.
pub fn gr2_entanglement(cm: &TwoModeCM) -> Result<f64> {
    let det_v3 = cm.det_offdiag();
    if det_v3 > 0.0 {
        return Err(Error::OutOfClass { det_v3 });
    }
    let s = 0.5 * (cm.nu1 + cm.nu2);
    let d = 0.5 * (cm.nu1 - cm.nu2);
    let f = cm.det().sqrt();
    if 4.0 * f >= 4.0 * s - 1.0 {
        return Ok(0.0);
    }
    let m1 = ((4.0 * f - 1.0) * (4.0 * f - 1.0) - 16.0 * d * d).max(0.0);
    let m2 = (s * s - d * d - f).max(0.0);
    let val = ((4.0 * f + 1.0) * s - (m1 * m2).sqrt()) / (4.0 * (d * d + f));
    clamp_measure(val.ln(), "gr2_entanglement")
}

/// Variance roles with the measured mode second, in the canonical orientation
/// `|c1| >= |c2|` (reachable by local pi/2 rotations on both modes, which no
/// correlation measure can see).
fn discord_roles(cm: &TwoModeCM, measured: Measured) -> (f64, f64, f64, f64) {
    let (a, b) = match measured {
        Measured::B => (cm.nu1, cm.nu2),
        Measured::A => (cm.nu2, cm.nu1),
    };
    let (c1, c2) = if cm.nu3.abs() >= cm.nu3p.abs() {
        (cm.nu3, cm.nu3p)
    } else {
        (cm.nu3p, cm.nu3)
    };
    (a, b, c1, c2)
}

/// Gaussian Rényi-2 discord `D2 = ln(2 nu_b) - (1/2) ln(16 det V) + (1/2) ln eps`,
/// where `eps` is four times the smallest conditional determinant reachable by
/// Gaussian measurements on the measured mode:
///
/// * homodyne branch (strictly negative branch product):
///   `eps = 4 a (a - c1^2 / b)`;
/// * otherwise the heterodyne-like optimum
///   `eps = [(4|c1 c2| + 2 sqrt([a(4b^2-1) - 4 b c2^2][a(4b^2-1) - 4 b c1^2])) / (4b^2-1)]^2`.
///
/// A vanishing branch product (the pure-state boundary, where both factors
/// vanish) routes to the second branch. Product states short-circuit to an
/// exact zero.
pub fn gr2_discord(cm: &TwoModeCM, measured: Measured) -> Result<f64> {
    let (a, b, c1, c2) = discord_roles(cm, measured);
    if c1 == 0.0 && c2 == 0.0 {
        // discord vanishes exactly iff the state is a product state
        return Ok(0.0);
    }
    let det_v = cm.det();
    if !det_v.is_finite() || det_v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "covariance determinant must be positive, got {det_v}"
        )));
    }

    let branch_product = (4.0 * a * b * b * c2 * c2 - c1 * c1 * (a + 4.0 * b * c2 * c2))
        * (4.0 * a * b * b * c1 * c1 - c2 * c2 * (a + 4.0 * b * c1 * c1));
    let eps = if branch_product < 0.0 {
        4.0 * a * (a - c1 * c1 / b)
    } else {
        let f1 = a * (4.0 * b * b - 1.0) - 4.0 * b * c2 * c2;
        let f2 = a * (4.0 * b * b - 1.0) - 4.0 * b * c1 * c1;
        let root = (f1 * f2).max(0.0).sqrt();
        let num = 4.0 * (c1 * c2).abs() + 2.0 * root;
        let ratio = num / (4.0 * b * b - 1.0);
        ratio * ratio
    };
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "conditional determinant must be positive, got eps = {eps}"
        )));
    }

    let d2 = (2.0 * b).ln() - 0.5 * (16.0 * det_v).ln() + 0.5 * eps.ln();
    clamp_measure(d2, "gr2_discord")
}

/// One-way classical correlations `J2 = I2 - D2`.
pub fn classical_correlations(cm: &TwoModeCM, measured: Measured) -> Result<f64> {
    let j2 = mutual_information_r2(cm)? - gr2_discord(cm, measured)?;
    if j2 >= 0.0 {
        Ok(j2)
    } else if j2 > -1e-10 {
        Ok(0.0)
    } else {
        Err(Error::InvalidInput(format!(
            "classical correlations came out negative: {j2:.3e}"
        )))
    }
}

/// Rényi-2 entropy decrease of the unmeasured mode for one measurement seed.
fn entropy_decrease(cm: &TwoModeCM, measured: Measured, m: &GaussianMeasurement) -> f64 {
    let (a, b) = match measured {
        Measured::B => (cm.nu1, cm.nu2),
        Measured::A => (cm.nu2, cm.nu1),
    };
    // the cross block is diagonal either way round
    let (c_q, c_p) = (cm.nu3, cm.nu3p);
    let (s_qq, s_pp, s_qp) = m.seed_cm();
    let k_qq = b + s_qq;
    let k_pp = b + s_pp;
    let det_k = k_qq * k_pp - s_qp * s_qp;
    // conditional CM of the kept mode: V1 - V3 (V2 + sigma)^-1 V3^T
    let cond_qq = a - c_q * c_q * k_pp / det_k;
    let cond_pp = b_to_a_pp(a, c_p, k_qq, det_k);
    let cond_qp = c_q * c_p * s_qp / det_k;
    let cond_det = cond_qq * cond_pp - cond_qp * cond_qp;
    if !(cond_det.is_finite() && cond_det > 0.0) {
        return f64::NEG_INFINITY;
    }
    0.5 * ((a * a) / cond_det).ln()
}

fn b_to_a_pp(a: f64, c_p: f64, k_qq: f64, det_k: f64) -> f64 {
    a - c_p * c_p * k_qq / det_k
}

/// Independent discord oracle: numerically maximises the entropy decrease of
/// the unmeasured mode over all pure-seed Gaussian measurements on the other
/// one, then returns `I2 - max`. A coarse grid over
/// `log lambda in [-8, 8] x theta in [0, pi)` seeds a compass (pattern)
/// search that refines until the parameter step drops below `tol`; the
/// refinement may wander outside the initial box, which matters when the
/// optimum is an ideal homodyne (`lambda -> 0` or `infinity`).
pub fn discord_oracle(cm: &TwoModeCM, measured: Measured, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol <= 1e-10 || tol >= 1e-3 {
        return Err(Error::InvalidInput(format!(
            "oracle tolerance must lie in (1e-10, 1e-3), got {tol}"
        )));
    }
    let i2 = mutual_information_r2(cm)?;

    let objective = |log_lambda: f64, theta: f64| {
        entropy_decrease(
            cm,
            measured,
            &GaussianMeasurement { lambda: log_lambda.exp(), theta },
        )
    };

    let mut best = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for i in -8..=8 {
        let log_lambda = f64::from(i);
        for k in 0..8 {
            let theta = std::f64::consts::PI * f64::from(k) / 8.0;
            let val = objective(log_lambda, theta);
            if val > best.0 {
                best = (val, log_lambda, theta);
            }
        }
    }

    let (mut value, mut log_lambda, mut theta) = best;
    let mut step_l = 0.5;
    let mut step_t = std::f64::consts::PI / 16.0;
    while f64::max(step_l, step_t) >= tol {
        let candidates = [
            (log_lambda + step_l, theta),
            (log_lambda - step_l, theta),
            (log_lambda, theta + step_t),
            (log_lambda, theta - step_t),
        ];
        let mut improved = false;
        for (l, t) in candidates {
            let val = objective(l, t);
            if val > value {
                value = val;
                log_lambda = l;
                theta = t;
                improved = true;
            }
        }
        if !improved {
            step_l *= 0.5;
            step_t *= 0.5;
        }
    }

    clamp_measure(i2 - value.max(0.0), "discord_oracle")
}

/// Bundles every measure for one bipartition.
pub fn analyze(cm: &TwoModeCM) -> Result<CorrelationReport> {
    let spectrum = symplectic_eigenvalues(cm)?;
    let e2 = gr2_entanglement(cm)?;
    let d2_a_given_b = gr2_discord(cm, Measured::B)?;
    let d2_b_given_a = gr2_discord(cm, Measured::A)?;
    let i2 = mutual_information_r2(cm)?;
    let j2 = classical_correlations(cm, Measured::B)?;
    Ok(CorrelationReport {
        e2,
        d2_a_given_b,
        d2_b_given_a,
        i2,
        j2,
        det_v3: cm.det_offdiag(),
        nu_minus: spectrum.nu_minus,
        entangled: e2 > 0.0,
    })
}
