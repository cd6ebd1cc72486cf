//! Gaussian covariance matrices and their symplectic / entropic machinery.
//!
//! Conventions used throughout the crate:
//!
//! * quadratures `q = (b' + b)/sqrt(2)`, `p = i(b' - b)/sqrt(2)` with `hbar = 1`,
//!   so the vacuum variance is **1/2** and physicality reads `V + i Omega/2 >= 0`,
//!   i.e. every symplectic eigenvalue satisfies `nu >= 1/2`. Mind this when
//!   comparing against sources that normalise the vacuum to 1: every constant
//!   in the closed forms changes with the convention.
//! * natural logarithms everywhere; entropies are in nats.

use nalgebra::{Matrix2, Matrix4, SMatrix};

use crate::error::{Error, Result};

/// Physicality slack used by code that checks `nu_minus >= 1/2 - PHYSICALITY_TOL`.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Relative tolerance below which a negative symplectic discriminant is treated
/// as pure-state-boundary round-off and clamped to zero.
const DEGENERACY_TOL: f64 = 1e-12;

/// Two-mode covariance matrix in standard form with diagonal sub-blocks:
///
/// ```text
///     | nu1  0    nu3  0    |
/// V = | 0    nu1  0    nu3p |
///     | nu3  0    nu2  0    |
///     | 0    nu3p 0    nu2  |
/// ```
///
/// Mode A occupies the first pair of rows, mode B the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM {
    /// Quadrature variance of mode A.
    pub nu1: f64,
    /// Quadrature variance of mode B.
    pub nu2: f64,
    /// q-q cross covariance.
    pub nu3: f64,
    /// p-p cross covariance.
    pub nu3p: f64,
}

impl TwoModeCM {
    pub fn new(nu1: f64, nu2: f64, nu3: f64, nu3p: f64) -> Result<Self> {
        let cm = TwoModeCM { nu1, nu2, nu3, nu3p };
        cm.check_finite()?;
        if nu1 <= 0.0 || nu2 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "diagonal blocks must be positive (nu1 = {nu1}, nu2 = {nu2})"
            )));
        }
        Ok(cm)
    }

    /// Two-mode vacuum.
    pub fn vacuum() -> Self {
        TwoModeCM { nu1: 0.5, nu2: 0.5, nu3: 0.0, nu3p: 0.0 }
    }

    /// Product of two thermal states with mean occupations `n_a`, `n_b`.
    pub fn thermal(n_a: f64, n_b: f64) -> Self {
        TwoModeCM {
            nu1: n_a + 0.5,
            nu2: n_b + 0.5,
            nu3: 0.0,
            nu3p: 0.0,
        }
    }

    /// Pure two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Self {
        TwoModeCM {
            nu1: 0.5 * (2.0 * r).cosh(),
            nu2: 0.5 * (2.0 * r).cosh(),
            nu3: 0.5 * (2.0 * r).sinh(),
            nu3p: -0.5 * (2.0 * r).sinh(),
        }
    }

    /// Two-mode squeezing applied to a product of thermal states with
    /// occupations `n_a`, `n_b`: the generic squeezed thermal state.
    pub fn squeezed_thermal(n_a: f64, n_b: f64, r: f64) -> Self {
        let (alpha, beta) = (n_a + 0.5, n_b + 0.5);
        let (ch, sh) = (r.cosh(), r.sinh());
        TwoModeCM {
            nu1: alpha * ch * ch + beta * sh * sh,
            nu2: alpha * sh * sh + beta * ch * ch,
            nu3: (alpha + beta) * ch * sh,
            nu3p: -(alpha + beta) * ch * sh,
        }
    }

    fn check_finite(&self) -> Result<()> {
        for (name, v) in [
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("nu3", self.nu3),
            ("nu3p", self.nu3p),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} is not finite: {v}")));
            }
        }
        Ok(())
    }

    /// Determinant of the full 4x4 matrix.
    pub fn det(&self) -> f64 {
        (self.nu1 * self.nu2 - self.nu3 * self.nu3)
            * (self.nu1 * self.nu2 - self.nu3p * self.nu3p)
    }

    /// det of the off-diagonal correlation block, `nu3 * nu3p`. Strictly
    /// negative is a necessary condition for entanglement.
    pub fn det_offdiag(&self) -> f64 {
        self.nu3 * self.nu3p
    }

    /// The full 4x4 matrix, row ordering `(q_a, p_a, q_b, p_b)`.
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::new(
            self.nu1, 0.0, self.nu3, 0.0, //
            0.0, self.nu1, 0.0, self.nu3p, //
            self.nu3, 0.0, self.nu2, 0.0, //
            0.0, self.nu3p, 0.0, self.nu2,
        )
    }
}

/// Ordered symplectic eigenvalues of a two-mode covariance matrix.
#[derive(Debug, Clone, Copy)]
pub struct SymplecticSpectrum {
    pub nu_minus: f64,
    pub nu_plus: f64,
}

/// Symplectic eigenvalues from the two-mode invariants
/// `delta = det V1 + det V2 + 2 det V3` and `det V`:
/// `nu_pm^2 = (delta pm sqrt(delta^2 - 4 det V)) / 2`.
///
/// The model's symmetric states sit exactly on the degenerate point
/// `delta^2 = 4 det V`; small negative discriminants (relative to `delta^2`)
/// are round-off and clamped, anything larger is reported as an error.
pub fn symplectic_eigenvalues(cm: &TwoModeCM) -> Result<SymplecticSpectrum> {
    cm.check_finite()?;
    if cm.nu1 <= 0.0 || cm.nu2 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "diagonal blocks must be positive (nu1 = {}, nu2 = {})",
            cm.nu1, cm.nu2
        )));
    }
    let delta = cm.nu1 * cm.nu1 + cm.nu2 * cm.nu2 + 2.0 * (cm.nu3 * cm.nu3p);
    spectrum_from_invariants(delta, cm.det())
}

/// Symplectic eigenvalues of an arbitrary (not necessarily standard-form)
/// two-mode covariance matrix via its block determinants, which are invariant
/// under local symplectic transformations.
pub fn symplectic_eigenvalues_4x4(v: &Matrix4<f64>) -> Result<SymplecticSpectrum> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let block = |r: usize, c: usize| v.fixed_view::<2, 2>(r, c).into_owned();
    let det1 = block(0, 0).determinant();
    let det2 = block(2, 2).determinant();
    let det3 = block(0, 2).determinant();
    let delta = det1 + det2 + 2.0 * det3;
    spectrum_from_invariants(delta, v.determinant())
}

fn spectrum_from_invariants(delta: f64, det: f64) -> Result<SymplecticSpectrum> {
    let disc = delta * delta - 4.0 * det;
    let scale = f64::max(1.0, delta * delta);
    if disc < -DEGENERACY_TOL * scale {
        return Err(Error::NumericalDegeneracy { discriminant: disc });
    }
    let root = disc.max(0.0).sqrt();
    let nu_minus = (0.5 * (delta - root)).max(0.0).sqrt();
    let nu_plus = (0.5 * (delta + root)).max(0.0).sqrt();
    Ok(SymplecticSpectrum { nu_minus, nu_plus })
}

/// True iff the state satisfies the uncertainty principle,
/// `nu_minus >= 1/2 - tol`.
pub fn is_physical(cm: &TwoModeCM, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be >= 0, got {tol}")));
    }
    Ok(symplectic_eigenvalues(cm)?.nu_minus >= 0.5 - tol)
}

/// Renyi-2 entropy `-ln Tr rho^2` of an `n_modes`-mode Gaussian state from the
/// determinant of its covariance matrix: `n ln 2 + (1/2) ln det V`.
pub fn renyi2_from_det(det_v: f64, n_modes: u32) -> Result<f64> {
    if !det_v.is_finite() || det_v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "covariance determinant must be positive, got {det_v}"
        )));
    }
    Ok(f64::from(n_modes) * std::f64::consts::LN_2 + 0.5 * det_v.ln())
}

/// Renyi-2 entropy of a single mode with quadrature variance `nu`
/// (CM `diag(nu, nu)`), i.e. `ln(2 nu)`.
pub fn renyi2_single_mode(nu: f64) -> Result<f64> {
    renyi2_from_det(nu * nu, 1)
}

/// Renyi-2 entropy of a two-mode standard-form state.
pub fn renyi2_entropy(cm: &TwoModeCM) -> Result<f64> {
    renyi2_from_det(cm.det(), 2)
}

/// Renyi-2 mutual information `I2 = S2(A) + S2(B) - S2(AB)`, marginals read
/// off the diagonal blocks.
pub fn mutual_information_r2(cm: &TwoModeCM) -> Result<f64> {
    let s_a = renyi2_single_mode(cm.nu1)?;
    let s_b = renyi2_single_mode(cm.nu2)?;
    let s_ab = renyi2_entropy(cm)?;
    Ok(s_a + s_b - s_ab)
}

/// `nu3 * nu3p`, exposed as a free function mirroring the other operations.
pub fn det_offdiag(cm: &TwoModeCM) -> f64 {
    cm.det_offdiag()
}

/// Quadrature ordering of [`FullCM`]:
/// `(q1m, p1m, q2m, p2m, q1op, p1op, q2op, p2op)` - the two mechanical modes
/// first, then the two optical modes. The ordering is frozen; permutations
/// surface as standard-form violations when extracting bipartitions.
pub const FULL_DIM: usize = 8;

/// Symmetric 8x8 steady-state covariance matrix of the four-mode system.
#[derive(Debug, Clone, PartialEq)]
pub struct FullCM {
    m: SMatrix<f64, 8, 8>,
}

impl FullCM {
    /// Builds from a matrix, enforcing symmetry to within round-off and
    /// storing the exactly symmetrised version.
    pub fn from_matrix(m: SMatrix<f64, 8, 8>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("full CM has non-finite entries".into()));
        }
        let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
        let asym = (m - m.transpose()).norm();
        if asym > 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "full CM asymmetry {asym:.3e} exceeds tolerance"
            )));
        }
        Ok(FullCM { m: 0.5 * (m + m.transpose()) })
    }

    pub fn matrix(&self) -> &SMatrix<f64, 8, 8> {
        &self.m
    }

    /// All four symplectic eigenvalues, ascending, via the eigenvalues of
    /// `Omega V` (which come in pairs `+- i nu`).
    pub fn symplectic_eigenvalues(&self) -> Result<[f64; 4]> {
        let omega = symplectic_form();
        let prod = omega * self.m;
        let eigs = prod.complex_eigenvalues();
        let mut mags: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        // pair up the +-i nu partners
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
        }
        Ok(out)
    }

    /// Physicality: every symplectic eigenvalue at least `1/2 - tol`.
    pub fn is_physical(&self, tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidInput(format!("tolerance must be >= 0, got {tol}")));
        }
        Ok(self.symplectic_eigenvalues()?[0] >= 0.5 - tol)
    }

    /// Renyi-2 entropy of the four-mode state.
    pub fn renyi2_entropy(&self) -> Result<f64> {
        renyi2_from_det(self.m.determinant(), 4)
    }
}

/// The 8x8 symplectic form for the frozen quadrature ordering:
/// direct sum of `[[0, 1], [-1, 0]]` blocks.
pub fn symplectic_form() -> SMatrix<f64, 8, 8> {
    let mut omega = SMatrix::<f64, 8, 8>::zeros();
    for k in 0..4 {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// 2x2 rotation matrix, handy for building local-rotation tests and
/// measurement seeds.
pub fn rotation2(theta: f64) -> Matrix2<f64> {
    Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_is_minimum_uncertainty() {
        let s = symplectic_eigenvalues(&TwoModeCM::vacuum()).unwrap();
        assert_eq!(s.nu_minus, 0.5);
        assert_eq!(s.nu_plus, 0.5);
        assert!(is_physical(&TwoModeCM::vacuum(), 0.0).unwrap());
    }

    #[test]
    fn thermal_spectrum_is_diagonal_variance() {
        let s = symplectic_eigenvalues(&TwoModeCM::thermal(1.0, 1.0)).unwrap();
        assert_relative_eq!(s.nu_minus, 1.5, max_relative = 1e-14);
        assert_relative_eq!(s.nu_plus, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn tmsv_is_pure() {
        // det V = 1/16 and delta = 1/2 analytically for any r.
        let cm = TwoModeCM::two_mode_squeezed_vacuum(1.0);
        assert_relative_eq!(cm.det(), 1.0 / 16.0, max_relative = 1e-12);
        let delta = cm.nu1 * cm.nu1 + cm.nu2 * cm.nu2 + 2.0 * cm.nu3 * cm.nu3p;
        assert_relative_eq!(delta, 0.5, max_relative = 1e-12);
        let s = symplectic_eigenvalues(&cm).unwrap();
        assert_relative_eq!(s.nu_minus, 0.5, epsilon = 1e-12);
        assert_relative_eq!(s.nu_plus, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sub_vacuum_variance_is_unphysical() {
        let cm = TwoModeCM::new(0.4, 0.4, 0.0, 0.0).unwrap();
        assert!(!is_physical(&cm, 1e-10).unwrap());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let cm = TwoModeCM { nu1: f64::NAN, nu2: 0.5, nu3: 0.0, nu3p: 0.0 };
        assert!(matches!(
            symplectic_eigenvalues(&cm),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn strongly_negative_discriminant_errors() {
        // nu3 alone large makes det V negative: delta^2 - 4 det V > 0, so build
        // an artificial invariant pair instead.
        let err = super::spectrum_from_invariants(0.1, 1.0).unwrap_err();
        assert!(matches!(err, Error::NumericalDegeneracy { .. }));
    }

    #[test]
    fn renyi2_vacuum_and_thermal() {
        assert_eq!(renyi2_single_mode(0.5).unwrap(), 0.0);
        // thermal purity is 1/(2n+1)
        assert_relative_eq!(renyi2_single_mode(1.5).unwrap(), 3.0f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(renyi2_entropy(&TwoModeCM::vacuum()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn renyi2_pure_tmsv_is_zero() {
        for r in [0.3, 1.0, 2.0, 3.0] {
            let cm = TwoModeCM::two_mode_squeezed_vacuum(r);
            assert!(renyi2_entropy(&cm).unwrap().abs() < 1e-10, "r = {r}");
        }
    }

    #[test]
    fn renyi2_rejects_nonpositive_det() {
        assert!(matches!(renyi2_from_det(0.0, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(renyi2_from_det(-1.0, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mutual_information_of_product_state_vanishes() {
        let cm = TwoModeCM::thermal(0.7, 2.3);
        assert_eq!(mutual_information_r2(&cm).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_of_tmsv() {
        // S2(AB) = 0, marginals thermal with det = cosh^2(2r)/4.
        let cm = TwoModeCM::two_mode_squeezed_vacuum(1.0);
        let expected = 2.0 * 2.0f64.cosh().ln();
        assert_relative_eq!(mutual_information_r2(&cm).unwrap(), expected, epsilon = 1e-10);
    }

    #[test]
    fn det_offdiag_simple() {
        let cm = TwoModeCM::new(1.0, 1.0, 0.3, -0.3).unwrap();
        assert_relative_eq!(det_offdiag(&cm), -0.09, epsilon = 1e-15);
    }

    #[test]
    fn full_cm_vacuum() {
        let full = FullCM::from_matrix(SMatrix::<f64, 8, 8>::identity() * 0.5).unwrap();
        let nus = full.symplectic_eigenvalues().unwrap();
        for nu in nus {
            assert_relative_eq!(nu, 0.5, epsilon = 1e-12);
        }
        assert!(full.is_physical(1e-10).unwrap());
        assert_relative_eq!(full.renyi2_entropy().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn full_cm_rejects_asymmetry() {
        let mut m = SMatrix::<f64, 8, 8>::identity() * 0.5;
        m[(0, 1)] = 1e-3;
        assert!(FullCM::from_matrix(m).is_err());
    }

    /// Embeds a standard-form CM and applies independent local rotations to
    /// the two modes.
    fn locally_rotated(cm: &TwoModeCM, phi: f64, psi: f64) -> Matrix4<f64> {
        let mut rot = Matrix4::<f64>::zeros();
        rot.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation2(phi));
        rot.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation2(psi));
        rot * cm.matrix() * rot.transpose()
    }

    proptest! {
        #[test]
        fn symplectic_spectrum_invariant_under_local_rotations(
            n_a in 0.0..2.0f64,
            // keep the spectrum well separated: splitting a near-degenerate
            // pair is ill-conditioned (square root of a cancelling
            // discriminant), so the eigenvalues themselves only carry
            // ~sqrt(eps) accuracy there
            gap in 0.5..2.0f64,
            r in 0.0..1.5f64,
            phi in 0.0..std::f64::consts::PI,
            psi in 0.0..std::f64::consts::PI,
        ) {
            let cm = TwoModeCM::squeezed_thermal(n_a, n_a + gap, r);
            let reference = symplectic_eigenvalues(&cm).unwrap();
            let rotated = locally_rotated(&cm, phi, psi);
            let spectrum = symplectic_eigenvalues_4x4(&rotated).unwrap();
            prop_assert!((spectrum.nu_minus - reference.nu_minus).abs() < 1e-10);
            prop_assert!((spectrum.nu_plus - reference.nu_plus).abs() < 1e-10);
        }

        #[test]
        fn symplectic_invariants_rotation_invariant_even_when_degenerate(
            n in 0.0..3.0f64,
            r in 0.0..2.0f64,
            phi in 0.0..std::f64::consts::PI,
            psi in 0.0..std::f64::consts::PI,
        ) {
            let cm = TwoModeCM::squeezed_thermal(n, n, r);
            let reference = symplectic_eigenvalues(&cm).unwrap();
            let rotated = locally_rotated(&cm, phi, psi);
            let spectrum = symplectic_eigenvalues_4x4(&rotated).unwrap();
            let prod_ref = reference.nu_minus * reference.nu_plus;
            let prod_rot = spectrum.nu_minus * spectrum.nu_plus;
            prop_assert!((prod_rot - prod_ref).abs() < 1e-10 * prod_ref.max(1.0));
            let sum_ref = reference.nu_minus.powi(2) + reference.nu_plus.powi(2);
            let sum_rot = spectrum.nu_minus.powi(2) + spectrum.nu_plus.powi(2);
            prop_assert!((sum_rot - sum_ref).abs() < 1e-10 * sum_ref.max(1.0));
        }

        #[test]
        fn pure_states_have_zero_renyi2(r in 0.0..3.0f64) {
            let cm = TwoModeCM::two_mode_squeezed_vacuum(r);
            prop_assert!(renyi2_entropy(&cm).unwrap().abs() < 1e-10);
        }

        #[test]
        fn mutual_information_nonnegative(
            n_a in 0.0..5.0f64,
            n_b in 0.0..5.0f64,
            r in 0.0..1.5f64,
        ) {
            let cm = TwoModeCM::squeezed_thermal(n_a, n_b, r);
            prop_assert!(mutual_information_r2(&cm).unwrap() >= 0.0);
        }
    }
}
