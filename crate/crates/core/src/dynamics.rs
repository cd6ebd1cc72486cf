//! Independent reconstruction of the steady-state covariance matrix from the
//! linearised rotating-wave dynamics, used to validate the closed forms in
//! [`crate::model`].
//!
//! Two routes are provided:
//!
//! * [`lyapunov_cm`]: solve `A V + V A^T + D = 0` directly;
//! * [`spectral_cm`]: integrate the symmetrised spectral densities built from
//!   the frequency-domain transfer functions, the route the Langevin
//!   treatment itself suggests.
//!
//! Everything is phrased in units of the cavity decay (`kappa = 1`) in the
//! interaction picture, where all noise correlators are stationary: the
//! two-mode-squeezing cross correlator of the input light, which oscillates at
//! the sum of the mechanical frequencies in the lab frame, becomes
//! `delta(omega + omega')` here. Only in this frame is the Lyapunov equation
//! meaningful.
//!
//! Quadrature ordering is frozen to `(q1m, p1m, q2m, p2m, q1op, p1op, q2op,
//! p2op)`; see [`crate::gaussian::FullCM`].

use nalgebra::{Complex, DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};
use crate::gaussian::{FullCM, TwoModeCM};
use crate::model::ReducedParams;
use crate::quad::{adaptive_simpson_matrix, SpectralMatrix};

/// Dimensionless model rates and bath statistics behind a [`LinearDynamics`].
#[derive(Debug, Clone, Copy)]
pub struct ModelRates {
    /// Mirror damping (= damping ratio, since `kappa = 1`).
    pub gamma: f64,
    /// Cavity decay, fixed to 1.
    pub kappa: f64,
    /// Beam-splitter coupling `G`, with `4 G^2 / (gamma kappa) = C`.
    pub coupling: f64,
    /// Mirror bath occupation.
    pub n_th: f64,
    /// Squeezed-input occupation `N = sinh^2 r`.
    pub n_input: f64,
    /// Squeezed-input cross correlation `M = sinh r cosh r`.
    pub m_input: f64,
}

impl ModelRates {
    pub fn from_reduced(rp: &ReducedParams) -> Result<Self> {
        rp.validate()?;
        Ok(ModelRates {
            gamma: rp.gamma_ratio,
            kappa: 1.0,
            coupling: 0.5 * (rp.cooperativity * rp.gamma_ratio).sqrt(),
            n_th: rp.n_th,
            n_input: rp.r.sinh() * rp.r.sinh(),
            m_input: rp.r.sinh() * rp.r.cosh(),
        })
    }
}

/// Drift and diffusion of the linearised quadrature dynamics
/// `du = A u dt + noise`, with `A V + V A^T + D = 0` at stationarity.
#[derive(Debug, Clone)]
pub struct LinearDynamics {
    pub drift: SMatrix<f64, 8, 8>,
    pub diffusion: SMatrix<f64, 8, 8>,
    pub rates: ModelRates,
}

/// Assembles drift and diffusion from the reduced parameters.
///
/// Per cavity the rotating-wave equations are the beam-splitter pair
/// `db = -gamma/2 b + G c + sqrt(gamma) zeta`,
/// `dc = -kappa/2 c - G b + sqrt(kappa) F`,
/// identical for both quadratures. The diffusion encodes mirror baths at
/// occupation `n_th` and the squeezed input with local variance `(2N+1)/2`
/// and `+M` / `-M` cross correlations on the q-q / p-p quadrature pairs (the
/// sign pairing is fixed by requiring the decoupled optical limit to
/// reproduce `nu3 = +sinh(2r)/2`).
pub fn build_dynamics(rp: &ReducedParams) -> Result<LinearDynamics> {
    let rates = ModelRates::from_reduced(rp)?;
    let (gamma, kappa, g) = (rates.gamma, rates.kappa, rates.coupling);

    let mut drift = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        drift[(i, i)] = -0.5 * gamma;
        drift[(i + 4, i + 4)] = -0.5 * kappa;
        // mechanical quadrature i couples to the matching optical quadrature
        drift[(i, i + 4)] = g;
        drift[(i + 4, i)] = -g;
    }

    let mut diffusion = SMatrix::<f64, 8, 8>::zeros();
    let mirror = gamma * (rates.n_th + 0.5);
    let input = kappa * (rates.n_input + 0.5);
    let cross = kappa * rates.m_input;
    for i in 0..4 {
        diffusion[(i, i)] = mirror;
        diffusion[(i + 4, i + 4)] = input;
    }
    diffusion[(4, 6)] = cross;
    diffusion[(6, 4)] = cross;
    diffusion[(5, 7)] = -cross;
    diffusion[(7, 5)] = -cross;

    Ok(LinearDynamics { drift, diffusion, rates })
}

fn max_real_eigenvalue(m: &SMatrix<f64, 8, 8>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn lyapunov_residual(dyn_: &LinearDynamics, v: &SMatrix<f64, 8, 8>) -> SMatrix<f64, 8, 8> {
    dyn_.drift * v + v * dyn_.drift.transpose() + dyn_.diffusion
}

/// Unique steady-state covariance solving `A V + V A^T + D = 0`, via a dense
/// linear solve over the 36 independent entries of the symmetric `V`, plus one
/// step of iterative refinement. Fails if the drift is not Hurwitz or the
/// residual does not reach `1e-10 * ||D||`.
pub fn lyapunov_cm(dyn_: &LinearDynamics) -> Result<FullCM> {
    let max_re = max_real_eigenvalue(&dyn_.drift);
    if max_re >= 0.0 {
        return Err(Error::NoSteadyState { max_re });
    }

    // canonical index of the (i, j) unknown, i <= j
    let idx = |i: usize, j: usize| -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * 8 + j - i * (i + 1) / 2
    };
    let n = 36;
    let a = &dyn_.drift;

    let mut system = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for i in 0..8 {
        for j in i..8 {
            let row = idx(i, j);
            for l in 0..8 {
                system[(row, idx(l, j))] += a[(i, l)];
                system[(row, idx(i, l))] += a[(j, l)];
            }
            rhs[row] = -dyn_.diffusion[(i, j)];
        }
    }

    let lu = system.clone().lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("singular Lyapunov system".into()))?;

    let unpack = |x: &DVector<f64>| {
        let mut v = SMatrix::<f64, 8, 8>::zeros();
        for i in 0..8 {
            for j in i..8 {
                v[(i, j)] = x[idx(i, j)];
                v[(j, i)] = x[idx(i, j)];
            }
        }
        v
    };
    let mut v = unpack(&sol);

    // one refinement pass squeezes the residual to round-off
    let res = lyapunov_residual(dyn_, &v);
    let mut res_vec = DVector::<f64>::zeros(n);
    for i in 0..8 {
        for j in i..8 {
            res_vec[idx(i, j)] = -res[(i, j)];
        }
    }
    if let Some(corr) = lu.solve(&res_vec) {
        v += unpack(&corr);
    }

    let tolerance = 1e-10 * dyn_.diffusion.norm();
    let residual = lyapunov_residual(dyn_, &v).norm();
    if residual > tolerance {
        return Err(Error::LyapunovResidual { residual, tolerance });
    }
    FullCM::from_matrix(v)
}

/// Frequency-domain solution of the rotating-wave equations: rational gains
/// from the two noise channels to the mechanical and optical fluctuations,
/// all sharing the denominator
/// `Xi(omega) = G^2 + (gamma/2 - i omega)(kappa/2 - i omega)`
/// (the `e^{-i omega t}` transform convention; the symmetrised spectra below
/// are even in `omega`, so the mirrored convention gives identical CMs).
#[derive(Debug, Clone, Copy)]
pub struct TransferSolution {
    pub gamma: f64,
    pub kappa: f64,
    pub coupling: f64,
}

/// Complex gains at one frequency; `b_*` feed the mechanical mode, `c_*` the
/// optical mode, from the mirror bath and squeezed-input channels.
#[derive(Debug, Clone, Copy)]
pub struct TransferGains {
    pub b_from_mirror: Complex<f64>,
    pub b_from_input: Complex<f64>,
    pub c_from_mirror: Complex<f64>,
    pub c_from_input: Complex<f64>,
}

impl TransferSolution {
    pub fn new(gamma: f64, kappa: f64, coupling: f64) -> Self {
        TransferSolution { gamma, kappa, coupling }
    }

    pub fn from_dynamics(dyn_: &LinearDynamics) -> Self {
        TransferSolution::new(dyn_.rates.gamma, dyn_.rates.kappa, dyn_.rates.coupling)
    }

    /// `Xi` has no real zeros for positive rates, so the gains are finite on
    /// the whole real axis and decay at least as `1/omega`.
    pub fn xi(&self, omega: f64) -> Complex<f64> {
        let half_gamma = Complex::new(0.5 * self.gamma, -omega);
        let half_kappa = Complex::new(0.5 * self.kappa, -omega);
        Complex::new(self.coupling * self.coupling, 0.0) + half_gamma * half_kappa
    }

    pub fn gains(&self, omega: f64) -> TransferGains {
        let xi = self.xi(omega);
        let sqrt_gamma = self.gamma.sqrt();
        let sqrt_kappa = self.kappa.sqrt();
        TransferGains {
            b_from_mirror: sqrt_gamma * Complex::new(0.5 * self.kappa, -omega) / xi,
            b_from_input: sqrt_kappa * Complex::new(self.coupling, 0.0) / xi,
            c_from_mirror: -sqrt_gamma * Complex::new(self.coupling, 0.0) / xi,
            c_from_input: sqrt_kappa * Complex::new(0.5 * self.gamma, -omega) / xi,
        }
    }
}

/// Symmetrised spectral density matrix at `omega` (real part; the imaginary
/// part is odd and integrates away). Because the rotating-wave equations do
/// not mix `b` with `b'`, the same scalar gains act on both quadratures and
/// every q-p cross spectrum vanishes identically.
fn spectral_density(ts: &TransferSolution, rates: &ModelRates, omega: f64) -> SpectralMatrix {
    let g = ts.gains(omega);
    let mirror = rates.n_th + 0.5;
    let input = rates.n_input + 0.5;
    let cross = rates.m_input;

    let d_mech = g.b_from_mirror.norm_sqr() * mirror + g.b_from_input.norm_sqr() * input;
    let d_opt = g.c_from_mirror.norm_sqr() * mirror + g.c_from_input.norm_sqr() * input;
    let x_mech = g.b_from_input.norm_sqr() * cross;
    let x_opt = g.c_from_input.norm_sqr() * cross;
    let mix_local = (g.b_from_mirror * g.c_from_mirror.conj()).re * mirror
        + (g.b_from_input * g.c_from_input.conj()).re * input;
    let mix_cross = (g.b_from_input * g.c_from_input.conj()).re * cross;

    let mut s = SpectralMatrix::zeros();
    for i in 0..4 {
        s[(i, i)] = d_mech;
        s[(i + 4, i + 4)] = d_opt;
        // same-cavity mechanical-optical correlations (both quadratures alike)
        s[(i, i + 4)] = mix_local;
        s[(i + 4, i)] = mix_local;
    }
    // cavity-1 x cavity-2 correlations, sign-flipped between q and p
    s[(0, 2)] = x_mech;
    s[(2, 0)] = x_mech;
    s[(1, 3)] = -x_mech;
    s[(3, 1)] = -x_mech;
    s[(4, 6)] = x_opt;
    s[(6, 4)] = x_opt;
    s[(5, 7)] = -x_opt;
    s[(7, 5)] = -x_opt;
    s[(0, 6)] = mix_cross;
    s[(6, 0)] = mix_cross;
    s[(2, 4)] = mix_cross;
    s[(4, 2)] = mix_cross;
    s[(1, 7)] = -mix_cross;
    s[(7, 1)] = -mix_cross;
    s[(3, 5)] = -mix_cross;
    s[(5, 3)] = -mix_cross;
    s
}

/// Exact `1/omega^2` asymptotics of the spectral density, used to close the
/// integral beyond the finite window: only the gains that stay `O(1/omega)`
/// contribute (mirror -> mechanical, input -> optical).
fn tail_coefficients(rates: &ModelRates) -> SpectralMatrix {
    let mut c = SpectralMatrix::zeros();
    for i in 0..4 {
        c[(i, i)] = rates.gamma * (rates.n_th + 0.5);
        c[(i + 4, i + 4)] = rates.kappa * (rates.n_input + 0.5);
    }
    let cross = rates.kappa * rates.m_input;
    c[(4, 6)] = cross;
    c[(6, 4)] = cross;
    c[(5, 7)] = -cross;
    c[(7, 5)] = -cross;
    c
}

const SPECTRAL_MAX_EVALS: usize = 4_000_000;

/// Steady-state covariance from spectral integration,
/// `V = (1/2 pi) Integral S(omega) d omega`, evaluated as twice the real part
/// over `[0, W]` plus the closed-form `1/omega^2` tail beyond `W`.
///
/// `tol` is the relative accuracy target (valid range `(1e-12, 1e-3)`);
/// entries come out within `max(1e-7, 10 tol)` of [`lyapunov_cm`].
pub fn spectral_cm(dyn_: &LinearDynamics, tol: f64) -> Result<FullCM> {
    if !(tol > 1e-12 && tol < 1e-3) {
        return Err(Error::InvalidInput(format!(
            "spectral tolerance must lie in (1e-12, 1e-3), got {tol}"
        )));
    }
    let max_re = max_real_eigenvalue(&dyn_.drift);
    if max_re >= 0.0 {
        return Err(Error::NoSteadyState { max_re });
    }

    let rates = dyn_.rates;
    let ts = TransferSolution::from_dynamics(dyn_);
    let (gamma, kappa, g) = (rates.gamma, rates.kappa, rates.coupling);
    let window = 1e3 * [1.0, g, gamma, kappa].into_iter().fold(1.0, f64::max);

    // bracket the Lorentzian features: linewidths at the origin and the
    // hybridised resonance near G
    let mut breakpoints = vec![
        0.0,
        0.25 * gamma,
        gamma,
        0.25 * kappa,
        kappa,
        0.5 * g,
        g,
        2.0 * g,
        10.0 * kappa.max(g),
        0.01 * window,
        0.1 * window,
        window,
    ];
    breakpoints.retain(|x| x.is_finite() && *x >= 0.0 && *x <= window);
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-300);

    let scale = [1.0, rates.n_th + 0.5, rates.n_input + 0.5]
        .into_iter()
        .fold(0.0, f64::max);
    let eps_abs = 0.05 * tol * scale;

    let integrand = |omega: f64| spectral_density(&ts, &rates, omega);
    let integral = adaptive_simpson_matrix(&integrand, &breakpoints, eps_abs, SPECTRAL_MAX_EVALS)?;

    let v = (integral.value + tail_coefficients(&rates) / window) / std::f64::consts::PI;
    FullCM::from_matrix(v)
}

/// Which two-mode bipartition of the four-mode state to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bipartition {
    Mechanical,
    Optical,
}

const FORM_TOL: f64 = 1e-9;

/// Traces out the other pair of modes and re-expresses the remaining 4x4
/// block in standard-form fields. The model guarantees diagonal 2x2
/// sub-blocks; any violation beyond `1e-9` signals an ordering or dynamics
/// bug and is reported as [`Error::FormViolation`].
pub fn extract_bipartition(full: &FullCM, which: Bipartition) -> Result<TwoModeCM> {
    let off = match which {
        Bipartition::Mechanical => 0,
        Bipartition::Optical => 4,
    };
    let m = full.matrix();
    let sub = m.fixed_view::<4, 4>(off, off).into_owned();

    // q-p entries that must vanish in standard form
    for (i, j) in [(0, 1), (2, 3), (0, 3), (1, 2)] {
        if sub[(i, j)].abs() > FORM_TOL {
            return Err(Error::FormViolation {
                residual: sub[(i, j)].abs(),
                row: off + i,
                col: off + j,
            });
        }
    }
    for (i, j) in [(0usize, 1usize), (2, 3)] {
        let imbalance = (sub[(i, i)] - sub[(j, j)]).abs();
        if imbalance > FORM_TOL {
            return Err(Error::FormViolation { residual: imbalance, row: off + i, col: off + j });
        }
    }

    TwoModeCM::new(
        0.5 * (sub[(0, 0)] + sub[(1, 1)]),
        0.5 * (sub[(2, 2)] + sub[(3, 3)]),
        0.5 * (sub[(0, 2)] + sub[(2, 0)]),
        0.5 * (sub[(1, 3)] + sub[(3, 1)]),
    )
}
