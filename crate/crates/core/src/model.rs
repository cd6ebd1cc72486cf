//! Optomechanical model: physical parameters, classical steady state, reduced
//! dimensionless parameters and the closed-form steady-state covariance
//! matrices of the two bipartitions.
//!
//! The closed forms for identical, red-sideband-driven cavities in the
//! resolved-sideband regime are
//!
//! ```text
//! nu1_m  = nu2_m  = [(2 n_th + 1)(1 + G + G C) + C cosh 2r] / [2 (1 + G)(1 + C)]
//! nu3_m  = -nu3p_m = C sinh 2r / [2 (1 + G)(1 + C)]
//! nu1_op = nu2_op = [(2 n_th + 1) G C + (1 + G + C) cosh 2r] / [2 (1 + G)(1 + C)]
//! nu3_op = -nu3p_op = (1 + G + C) sinh 2r / [2 (1 + G)(1 + C)]
//! ```
//!
//! with `G = gamma/kappa` the damping ratio and `C` the optomechanical
//! cooperativity. `cosh 2r`/`sinh 2r` are evaluated directly (no exponential
//! differencing) to hold precision at large squeezing.

use nalgebra::Complex;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCM;

/// Reduced Planck constant, J s (2018 CODATA, exact SI).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact SI).
pub const KB: f64 = 1.380_649e-23;

/// SI-unit parameters of one of the two identical cavities.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Mechanical angular frequency, rad/s.
    pub omega_mu: f64,
    /// Effective mirror mass, kg.
    pub m_mu: f64,
    /// Mechanical damping rate, rad/s.
    pub gamma: f64,
    /// Cavity length, m.
    pub l: f64,
    /// Cavity angular frequency, rad/s.
    pub omega_c: f64,
    /// Cavity decay rate, rad/s.
    pub kappa: f64,
    /// Laser angular frequency, rad/s.
    pub omega_l: f64,
    /// Input laser power, W.
    pub power: f64,
    /// Bath temperature, K.
    pub temperature: f64,
    /// Squeezing parameter of the injected two-mode squeezed light.
    pub r: f64,
}

impl PhysicalParams {
    /// Parameter set of a typical membrane-in-cavity experiment; also the
    /// default the CLI uses when only a mechanical frequency is needed.
    pub fn typical() -> Self {
        use std::f64::consts::TAU;
        PhysicalParams {
            omega_mu: TAU * 947e3,
            m_mu: 145e-12,
            gamma: TAU * 140.0,
            l: 25e-3,
            omega_c: TAU * 5.26e14,
            kappa: TAU * 172e3,
            omega_l: TAU * 2.82e14,
            power: 1.5e-3,
            temperature: 0.0,
            r: 0.0,
        }
    }

    /// Hard validity checks; returns soft warnings (low quality factor,
    /// unresolved sideband) instead of failing on them.
    pub fn validate(&self) -> Result<Vec<String>> {
        let positive = [
            ("omega_mu", self.omega_mu),
            ("m_mu", self.m_mu),
            ("gamma", self.gamma),
            ("l", self.l),
            ("omega_c", self.omega_c),
            ("kappa", self.kappa),
            ("omega_l", self.omega_l),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::validation(
                    format!("physical.{name}"),
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        if self.power < 0.0 || !self.power.is_finite() {
            return Err(Error::validation("physical.power", format!("must be >= 0, got {}", self.power)));
        }
        if self.temperature < 0.0 || !self.temperature.is_finite() {
            return Err(Error::validation(
                "physical.temperature",
                format!("must be >= 0, got {}", self.temperature),
            ));
        }
        if self.r < 0.0 || !self.r.is_finite() {
            return Err(Error::validation("physical.r", format!("must be >= 0, got {}", self.r)));
        }
        let mut warnings = Vec::new();
        if self.omega_mu / self.gamma < 1e3 {
            warnings.push(format!(
                "mechanical quality factor omega_mu/gamma = {:.3e} is below 1e3; the delta-correlated mirror-noise limit is questionable",
                self.omega_mu / self.gamma
            ));
        }
        if self.omega_mu <= self.kappa {
            warnings.push(format!(
                "not in the resolved-sideband regime (omega_mu = {:.3e} <= kappa = {:.3e}); the rotating-wave model is unreliable",
                self.omega_mu, self.kappa
            ));
        }
        Ok(warnings)
    }

    /// Vacuum optomechanical coupling `g0 = (omega_c / l) sqrt(hbar / (m omega_mu))`.
    pub fn vacuum_coupling(&self) -> f64 {
        (self.omega_c / self.l) * (HBAR / (self.m_mu * self.omega_mu)).sqrt()
    }

    /// Drive amplitude `epsilon = sqrt(2 kappa P / (hbar omega_L))`.
    pub fn drive_amplitude(&self) -> f64 {
        (2.0 * self.kappa * self.power / (HBAR * self.omega_l)).sqrt()
    }
}

/// The dimensionless quadruple that fully determines both subsystem CMs.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedParams {
    /// Damping ratio `gamma / kappa`.
    pub gamma_ratio: f64,
    /// Optomechanical cooperativity `4 G^2 / (gamma kappa)`.
    pub cooperativity: f64,
    /// Mean thermal phonon occupation of the mirror baths.
    pub n_th: f64,
    /// Squeezing parameter of the injected light.
    pub r: f64,
}

impl ReducedParams {
    pub fn new(gamma_ratio: f64, cooperativity: f64, n_th: f64, r: f64) -> Result<Self> {
        let rp = ReducedParams { gamma_ratio, cooperativity, n_th, r };
        rp.validate()?;
        Ok(rp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_ratio <= 0.0 || !self.gamma_ratio.is_finite() {
            return Err(Error::validation(
                "gamma_ratio",
                format!("must be finite and > 0, got {}", self.gamma_ratio),
            ));
        }
        for (name, v) in [
            ("cooperativity", self.cooperativity),
            ("n_th", self.n_th),
            ("r", self.r),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Classical steady state of one driven cavity.
#[derive(Debug, Clone, Copy)]
pub struct SteadyState {
    /// Steady cavity field amplitude.
    pub c_s: Complex<f64>,
    /// Steady mirror amplitude.
    pub b_s: Complex<f64>,
    /// Effective detuning including the radiation-pressure shift, rad/s.
    pub delta_prime: f64,
    /// Bare laser-cavity detuning recovered from `delta_prime`, rad/s.
    pub delta: f64,
    /// Mean intracavity photon number `|c_s|^2`.
    pub n_cav: f64,
    /// Many-photon coupling `g0 sqrt(n_cav)`, rad/s.
    pub coupling: f64,
    /// Vacuum coupling, rad/s.
    pub g0: f64,
    /// Drive amplitude, rad/s.
    pub epsilon: f64,
    /// Laser phase chosen so that `c_s = -i |c_s|`.
    pub phi: f64,
}

/// Mean thermal occupation `1 / (exp(hbar omega / kB T) - 1)`; exactly zero at
/// `T = 0`.
pub fn thermal_occupation(omega_mu: f64, temperature: f64) -> Result<f64> {
    if omega_mu <= 0.0 || !omega_mu.is_finite() {
        return Err(Error::InvalidInput(format!(
            "omega_mu must be finite and > 0, got {omega_mu}"
        )));
    }
    if temperature < 0.0 || !temperature.is_finite() {
        return Err(Error::InvalidInput(format!(
            "temperature must be finite and >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    // exp_m1 keeps the high-temperature limit accurate; overflow of the
    // exponent simply yields 0 occupation.
    Ok(1.0 / (HBAR * omega_mu / (KB * temperature)).exp_m1())
}

/// Inverse of [`thermal_occupation`]: the temperature at which the bath holds
/// `n_th` thermal phonons.
pub fn temperature_for_occupation(omega_mu: f64, n_th: f64) -> Result<f64> {
    if omega_mu <= 0.0 || !omega_mu.is_finite() {
        return Err(Error::InvalidInput(format!(
            "omega_mu must be finite and > 0, got {omega_mu}"
        )));
    }
    if n_th < 0.0 || !n_th.is_finite() {
        return Err(Error::InvalidInput(format!("n_th must be finite and >= 0, got {n_th}")));
    }
    if n_th == 0.0 {
        return Ok(0.0);
    }
    Ok(HBAR * omega_mu / (KB * (1.0 / n_th).ln_1p()))
}

/// Optomechanical cooperativity from physical parameters:
/// `C = 8 omega_c^2 P / (gamma m omega_mu omega_L l^2 [(kappa/2)^2 + omega_mu^2])`.
///
/// Equals `4 G^2 / (gamma kappa)` computed through [`steady_state`]; both
/// routes agree to better than 1e-9 relative.
pub fn cooperativity(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    let lorentz = (p.kappa / 2.0) * (p.kappa / 2.0) + p.omega_mu * p.omega_mu;
    Ok(8.0 * p.omega_c * p.omega_c * p.power
        / (p.gamma * p.m_mu * p.omega_mu * p.omega_l * p.l * p.l * lorentz))
}

/// Maps physical parameters onto the dimensionless quadruple.
pub fn reduce(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    ReducedParams::new(
        p.gamma / p.kappa,
        cooperativity(p)?,
        thermal_occupation(p.omega_mu, p.temperature)?,
        p.r,
    )
}

/// Classical steady state of one cavity.
///
/// With `red_sideband` set, the effective detuning is pinned at
/// `delta_prime = -omega_mu` (no self-consistent iteration is required: the
/// field amplitude depends only on `delta_prime`) and the bare detuning is
/// back-computed for reporting. Without the flag, the laser-cavity detuning
/// `omega_L - omega_c` is used as the effective detuning directly.
pub fn steady_state(p: &PhysicalParams, red_sideband: bool) -> Result<SteadyState> {
    p.validate()?;
    let delta_prime = if red_sideband {
        -p.omega_mu
    } else {
        p.omega_l - p.omega_c
    };
    let epsilon = p.drive_amplitude();
    let g0 = p.vacuum_coupling();
    let phi = -(2.0 * delta_prime / p.kappa).atan();
    // c_s = -i epsilon e^{i phi} / (kappa/2 - i delta'); the phase choice makes
    // it purely imaginary, c_s = -i |c_s|.
    let denom = Complex::new(p.kappa / 2.0, -delta_prime);
    let c_s = Complex::new(0.0, -epsilon) * Complex::from_polar(1.0, phi) / denom;
    let n_cav = c_s.norm_sqr();
    let b_s = Complex::new(0.0, -g0 * n_cav) / Complex::new(p.gamma / 2.0, p.omega_mu);
    let delta = delta_prime + g0 * 2.0 * b_s.re;
    Ok(SteadyState {
        c_s,
        b_s,
        delta_prime,
        delta,
        n_cav,
        coupling: g0 * n_cav.sqrt(),
        g0,
        epsilon,
        phi,
    })
}

/// Denominator common to all CM elements.
fn cm_denom(rp: &ReducedParams) -> f64 {
    2.0 * (1.0 + rp.gamma_ratio) * (1.0 + rp.cooperativity)
}

/// Steady-state CM of the mechanical-mechanical bipartition.
pub fn mechanical_cm(rp: &ReducedParams) -> Result<TwoModeCM> {
    rp.validate()?;
    let (g, c, n) = (rp.gamma_ratio, rp.cooperativity, rp.n_th);
    let denom = cm_denom(rp);
    let nu1 = ((2.0 * n + 1.0) * (1.0 + g + g * c) + c * (2.0 * rp.r).cosh()) / denom;
    let nu3 = c * (2.0 * rp.r).sinh() / denom;
    TwoModeCM::new(nu1, nu1, nu3, -nu3)
}

/// Steady-state CM of the optical-optical bipartition.
pub fn optical_cm(rp: &ReducedParams) -> Result<TwoModeCM> {
    rp.validate()?;
    let (g, c, n) = (rp.gamma_ratio, rp.cooperativity, rp.n_th);
    let denom = cm_denom(rp);
    let nu1 = ((2.0 * n + 1.0) * g * c + (1.0 + g + c) * (2.0 * rp.r).cosh()) / denom;
    let nu3 = (1.0 + g + c) * (2.0 * rp.r).sinh() / denom;
    TwoModeCM::new(nu1, nu1, nu3, -nu3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{is_physical, symplectic_eigenvalues};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    #[test]
    fn thermal_occupation_zero_temperature() {
        assert_eq!(thermal_occupation(TAU * 947e3, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_occupation(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_occupation_unit_occupation_point() {
        // invert the Bose formula at n_th = 1: T = hbar omega / (kB ln 2)
        let omega = TAU * 947e3;
        let t = HBAR * omega / (KB * std::f64::consts::LN_2);
        assert_relative_eq!(t, 6.56e-5, max_relative = 2e-3);
        assert_relative_eq!(thermal_occupation(omega, t).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn thermal_occupation_high_temperature_expansion() {
        let omega = TAU * 947e3;
        let n = thermal_occupation(omega, 0.1).unwrap();
        let expansion = KB * 0.1 / (HBAR * omega) - 0.5;
        assert_relative_eq!(n, expansion, max_relative = 1e-3);
    }

    #[test]
    fn temperature_for_occupation_round_trips() {
        let omega = TAU * 947e3;
        for n in [1e-6, 0.1, 1.0, 50.0, 2000.0] {
            let t = temperature_for_occupation(omega, n).unwrap();
            assert_relative_eq!(thermal_occupation(omega, t).unwrap(), n, max_relative = 1e-10);
        }
        assert_eq!(temperature_for_occupation(omega, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn validate_warns_on_marginal_regimes() {
        let p = PhysicalParams::typical();
        assert!(p.validate().unwrap().is_empty());
        let mut low_q = p;
        low_q.gamma = p.omega_mu / 100.0;
        let warnings = low_q.validate().unwrap();
        assert!(warnings.iter().any(|w| w.contains("quality factor")));
        let mut unresolved = p;
        unresolved.kappa = 2.0 * p.omega_mu;
        let warnings = unresolved.validate().unwrap();
        assert!(warnings.iter().any(|w| w.contains("resolved-sideband")));
    }

    #[test]
    fn cooperativity_vanishes_without_drive() {
        let mut p = PhysicalParams::typical();
        p.power = 0.0;
        assert_eq!(cooperativity(&p).unwrap(), 0.0);
    }

    #[test]
    fn cooperativity_linear_in_power() {
        let mut p = PhysicalParams::typical();
        let c1 = cooperativity(&p).unwrap();
        p.power *= 2.0;
        assert_relative_eq!(cooperativity(&p).unwrap(), 2.0 * c1, max_relative = 1e-14);
    }

    #[test]
    fn cooperativity_two_routes_agree() {
        let p = PhysicalParams::typical();
        let closed = cooperativity(&p).unwrap();
        let ss = steady_state(&p, true).unwrap();
        let via_steady = 4.0 * ss.coupling * ss.coupling / (p.gamma * p.kappa);
        assert_relative_eq!(closed, via_steady, max_relative = 1e-9);
        // the experimental numbers do NOT give the modest cooperativity the
        // sweep presets use; they land in the thousands.
        assert!(closed > 1e3, "C = {closed}");
    }

    #[test]
    fn reduce_typical_parameters() {
        let p = PhysicalParams::typical();
        let rp = reduce(&p).unwrap();
        assert_relative_eq!(rp.gamma_ratio, 140.0 / 172e3, max_relative = 1e-12);
        assert_relative_eq!(rp.gamma_ratio, 8.14e-4, max_relative = 1e-2);
        assert_eq!(rp.n_th, 0.0);
        assert_eq!(rp.r, 0.0);
    }

    #[test]
    fn reduce_gamma_equals_kappa() {
        let mut p = PhysicalParams::typical();
        p.gamma = p.kappa;
        assert_relative_eq!(reduce(&p).unwrap().gamma_ratio, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn steady_state_without_drive() {
        let mut p = PhysicalParams::typical();
        p.power = 0.0;
        let ss = steady_state(&p, true).unwrap();
        assert_eq!(ss.c_s.norm(), 0.0);
        assert_eq!(ss.b_s.norm(), 0.0);
        assert_eq!(ss.coupling, 0.0);
    }

    #[test]
    fn steady_state_phase_makes_field_purely_imaginary() {
        let p = PhysicalParams::typical();
        let ss = steady_state(&p, true).unwrap();
        assert!(ss.c_s.re.abs() < 1e-12 * ss.c_s.norm());
        assert!(ss.c_s.im < 0.0);
        assert_eq!(ss.delta_prime, -p.omega_mu);
    }

    #[test]
    fn steady_state_golden_numbers() {
        // Pinned after the first verified run of the closed formulas with the
        // typical parameter set.
        let ss = steady_state(&PhysicalParams::typical(), true).unwrap();
        assert_relative_eq!(ss.n_cav, 4.860_688_517_9e8, max_relative = 1e-9);
        assert_relative_eq!(ss.coupling, 1.018_975_296_3e6, max_relative = 1e-9);
        assert_relative_eq!(ss.g0, 46.218_384_309, max_relative = 1e-9);
    }

    #[test]
    fn mechanical_cm_decoupled_limit() {
        for n in [0.0, 1.0, 10.0] {
            let rp = ReducedParams::new(0.01, 0.0, n, 1.3).unwrap();
            let cm = mechanical_cm(&rp).unwrap();
            assert_relative_eq!(cm.nu1, n + 0.5, max_relative = 1e-14);
            assert_eq!(cm.nu3, 0.0);
        }
    }

    #[test]
    fn mechanical_cm_reference_point() {
        let rp = ReducedParams::new(0.01, 34.0, 0.0, 2.0).unwrap();
        let cm = mechanical_cm(&rp).unwrap();
        assert_relative_eq!(cm.nu1, 13.15, max_relative = 1e-3);
        assert_relative_eq!(cm.nu3, 13.12, max_relative = 1e-3);
        assert_eq!(cm.nu3p, -cm.nu3);
    }

    #[test]
    fn mechanical_cm_no_squeezing_means_no_cross_block() {
        let rp = ReducedParams::new(0.3, 12.0, 2.0, 0.0).unwrap();
        assert_eq!(mechanical_cm(&rp).unwrap().nu3, 0.0);
    }

    #[test]
    fn optical_cm_vacuum_limit() {
        let rp = ReducedParams::new(0.01, 0.0, 0.0, 0.0).unwrap();
        let cm = optical_cm(&rp).unwrap();
        assert_relative_eq!(cm.nu1, 0.5, max_relative = 1e-14);
        assert_eq!(cm.nu3, 0.0);
    }

    #[test]
    fn optical_cm_imprints_input_squeezing_when_decoupled() {
        let rp = ReducedParams::new(0.01, 0.0, 0.7, 1.2).unwrap();
        let cm = optical_cm(&rp).unwrap();
        assert_relative_eq!(cm.nu1, 0.5 * 2.4f64.cosh(), max_relative = 1e-14);
        assert_relative_eq!(cm.nu3, 0.5 * 2.4f64.sinh(), max_relative = 1e-14);
    }

    #[test]
    fn cm_grid_is_physical() {
        for gamma_ratio in [1e-3, 0.01, 0.1] {
            for coop in [0.0, 1.0, 34.0, 100.0] {
                for n_th in [0.0, 1.0, 10.0] {
                    for r in [0.0, 1.0, 2.0, 3.0] {
                        let rp = ReducedParams::new(gamma_ratio, coop, n_th, r).unwrap();
                        for cm in [mechanical_cm(&rp).unwrap(), optical_cm(&rp).unwrap()] {
                            assert!(
                                is_physical(&cm, 1e-10).unwrap(),
                                "non-physical CM at {rp:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn large_cooperativity_limits() {
        let rp = ReducedParams::new(0.05, 1e6, 3.0, 1.5).unwrap();
        let limit = 3.0f64.sinh() / (2.0 * 1.05);
        assert_relative_eq!(mechanical_cm(&rp).unwrap().nu3, limit, max_relative = 1e-4);
        assert_relative_eq!(optical_cm(&rp).unwrap().nu3, limit, max_relative = 1e-4);
    }

    proptest! {
        #[test]
        fn model_cms_symmetric_and_physical(
            log_gamma in -4.0..0.0f64,
            coop in 0.0..200.0f64,
            n_th in 0.0..100.0f64,
            r in 0.0..3.0f64,
        ) {
            let rp = ReducedParams::new(10f64.powf(log_gamma), coop, n_th, r).unwrap();
            for cm in [mechanical_cm(&rp).unwrap(), optical_cm(&rp).unwrap()] {
                prop_assert_eq!(cm.nu1, cm.nu2);
                prop_assert_eq!(cm.nu3p, -cm.nu3);
                prop_assert!(is_physical(&cm, 1e-10).unwrap());
                let s = symplectic_eigenvalues(&cm).unwrap();
                prop_assert!(s.nu_minus <= s.nu_plus);
            }
        }

        #[test]
        fn mechanical_variance_increases_with_bath_occupation(
            coop in 0.0..100.0f64,
            r in 0.0..3.0f64,
            n_th in 0.0..50.0f64,
        ) {
            let rp_lo = ReducedParams::new(0.01, coop, n_th, r).unwrap();
            let rp_hi = ReducedParams::new(0.01, coop, n_th + 0.5, r).unwrap();
            let lo = mechanical_cm(&rp_lo).unwrap();
            let hi = mechanical_cm(&rp_hi).unwrap();
            prop_assert!(hi.nu1 > lo.nu1);
            // cross covariance does not depend on the bath occupation
            prop_assert_eq!(lo.nu3, hi.nu3);
        }
    }
}
