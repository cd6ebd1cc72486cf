//! Adaptive Simpson quadrature for matrix-valued spectral densities.
//!
//! The integrands are rational functions of the frequency with a handful of
//! Lorentzian-like features whose positions are known from the model rates, so
//! callers pass explicit breakpoints bracketing those features and the
//! bisection refines from there. Error control is per-entry absolute on the
//! max norm.

use nalgebra::SMatrix;

use crate::error::{Error, Result};

pub type SpectralMatrix = SMatrix<f64, 8, 8>;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: SpectralMatrix,
    pub evals: usize,
}

fn max_abs_entry(m: &SpectralMatrix) -> (f64, usize, usize) {
    let mut worst = (0.0f64, 0usize, 0usize);
    for i in 0..8 {
        for j in 0..8 {
            let a = m[(i, j)].abs();
            if a > worst.0 {
                worst = (a, i, j);
            }
        }
    }
    worst
}

fn simpson(fa: &SpectralMatrix, fm: &SpectralMatrix, fb: &SpectralMatrix, h: f64) -> SpectralMatrix {
    (h / 6.0) * (fa + 4.0 * fm + fb)
}

struct Panel {
    a: f64,
    b: f64,
    fa: SpectralMatrix,
    fm: SpectralMatrix,
    fb: SpectralMatrix,
    whole: SpectralMatrix,
    eps: f64,
}

/// Integrates `f` over the consecutive `breakpoints` intervals with a total
/// absolute error budget `eps_abs`, spending at most `max_evals` integrand
/// evaluations.
pub fn adaptive_simpson_matrix<F>(
    f: &F,
    breakpoints: &[f64],
    eps_abs: f64,
    max_evals: usize,
) -> Result<QuadResult>
where
    F: Fn(f64) -> SpectralMatrix,
{
    assert!(breakpoints.len() >= 2, "need at least one interval");
    assert!(eps_abs > 0.0);
    let total_width: f64 = breakpoints.windows(2).map(|w| w[1] - w[0]).sum();
    assert!(total_width > 0.0, "breakpoints must be increasing");
    let min_width = total_width * 1e-14;

    let mut evals = 0usize;
    let eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut stack: Vec<Panel> = Vec::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let fa = eval(a, &mut evals);
        let fm = eval(0.5 * (a + b), &mut evals);
        let fb = eval(b, &mut evals);
        let whole = simpson(&fa, &fm, &fb, b - a);
        stack.push(Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
            eps: eps_abs * (b - a) / total_width,
        });
    }

    let mut acc = SpectralMatrix::zeros();
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let flm = eval(0.5 * (p.a + m), &mut evals);
        let frm = eval(0.5 * (m + p.b), &mut evals);
        let left = simpson(&p.fa, &flm, &p.fm, m - p.a);
        let right = simpson(&p.fm, &frm, &p.fb, p.b - m);
        let diff = left + right - p.whole;
        let (err, row, col) = max_abs_entry(&diff);
        if err <= 15.0 * p.eps || p.b - p.a < min_width {
            // Richardson extrapolation of the accepted panel
            acc += left + right + diff / 15.0;
            continue;
        }
        if evals >= max_evals {
            return Err(Error::IntegrationFailure { row, col, error: err / 15.0 });
        }
        let half_eps = 0.5 * p.eps;
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, eps: half_eps });
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, eps: half_eps });
    }

    Ok(QuadResult { value: acc, evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> SpectralMatrix {
        move |x| {
            let mut m = SpectralMatrix::zeros();
            m[(0, 0)] = f(x);
            m
        }
    }

    #[test]
    fn integrates_polynomial_exactly() {
        let f = scalar(|x| x * x * x - 2.0 * x + 1.0);
        let r = adaptive_simpson_matrix(&f, &[0.0, 2.0], 1e-12, 10_000).unwrap();
        // x^4/4 - x^2 + x at 2 = 4 - 4 + 2
        assert_relative_eq!(r.value[(0, 0)], 2.0, epsilon = 1e-11);
    }

    #[test]
    fn integrates_narrow_lorentzian() {
        let gamma = 1e-4;
        let f = scalar(move |x| gamma / (gamma * gamma + x * x));
        // half Lorentzian from 0 to 1e3 ~ pi/2 - gamma/1e3
        let r = adaptive_simpson_matrix(&f, &[0.0, gamma, 10.0 * gamma, 1.0, 1e3], 1e-10, 500_000)
            .unwrap();
        let exact = (1e3 / gamma).atan();
        assert_relative_eq!(r.value[(0, 0)], exact, epsilon = 1e-9);
    }

    #[test]
    fn budget_exhaustion_reports_worst_entry() {
        let f = scalar(|x| 1e-6 / (1e-12 + x * x));
        let err = adaptive_simpson_matrix(&f, &[0.0, 1e3], 1e-12, 50).unwrap_err();
        match err {
            Error::IntegrationFailure { row, col, .. } => {
                assert_eq!((row, col), (0, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
