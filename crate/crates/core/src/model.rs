//! Model parameters and the monodromy operators built from them.
//!
//! A chain is specified by the variant (rational or trigonometric), the
//! anisotropy `eta`, and one inhomogeneity `xi_k` per site. The two-site
//! exchange weights are `b(t) = phi(eta) / phi(t + eta)` and
//! `c(t) = phi(t) / phi(t + eta)` with `phi(t) = t` in the rational case and
//! `phi(t) = sinh t` in the trigonometric one, so at `t = 0` the exchange
//! matrix is the permutation and the aligned-sector amplitude is always 1.
//!
//! The monodromy operator with auxiliary space 0 is the ordered product
//! `S_{1,0}(xi_1, t) ... S_{N,0}(xi_N, t)` (site N acts first); its four
//! auxiliary-space entries A, B, C, D act on chain states with the auxiliary
//! site threaded through explicitly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{StateVector, TwoSiteSMatrix, MAX_SITES};

/// Weight denominators below this are treated as exact poles.
pub const POLE_GUARD: f64 = 1e-10;

/// Functional form of the exchange weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `phi(t) = t` (isotropic XXX).
    Rational,
    /// `phi(t) = sinh t` (anisotropic XXZ).
    Trigonometric,
}

impl Variant {
    pub fn phi(self, z: Complex64) -> Complex64 {
        match self {
            Variant::Rational => z,
            Variant::Trigonometric => z.sinh(),
        }
    }
}

/// A chain: variant, anisotropy, and one inhomogeneity per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    variant: Variant,
    eta: Complex64,
    xi: Vec<Complex64>,
}

impl ModelParams {
    pub fn new(variant: Variant, eta: Complex64, xi: Vec<Complex64>) -> Result<Self> {
        if xi.is_empty() || xi.len() > MAX_SITES {
            return Err(Error::ChainTooLarge(xi.len()));
        }
        let phi_eta = variant.phi(eta).norm();
        if phi_eta < POLE_GUARD {
            return Err(Error::DegenerateEta(phi_eta));
        }
        Ok(Self { variant, eta, xi })
    }

    /// All inhomogeneities equal to `xi0`.
    pub fn homogeneous(
        variant: Variant,
        eta: Complex64,
        n_sites: usize,
        xi0: Complex64,
    ) -> Result<Self> {
        Self::new(variant, eta, vec![xi0; n_sites])
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn n_sites(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        self.variant.phi(z)
    }

    /// Same chain with the inhomogeneities of sites `i` and `j` exchanged.
    pub fn with_xi_swapped(&self, i: usize, j: usize) -> Result<Self> {
        let n = self.n_sites();
        if i == 0 || i > n {
            return Err(Error::SiteOutOfRange {
                site: i,
                n_sites: n,
            });
        }
        if j == 0 || j > n {
            return Err(Error::SiteOutOfRange {
                site: j,
                n_sites: n,
            });
        }
        let mut xi = self.xi.clone();
        xi.swap(i - 1, j - 1);
        Self::new(self.variant, self.eta, xi)
    }

    /// Exchange amplitude `b(t) = phi(eta) / phi(t + eta)`.
    pub fn weight_b(&self, t: Complex64) -> Result<Complex64> {
        let den = self.phi(t + self.eta);
        if den.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(den.norm()));
        }
        Ok(self.phi(self.eta) / den)
    }

    /// Stay amplitude `c(t) = phi(t) / phi(t + eta)`.
    pub fn weight_c(&self, t: Complex64) -> Result<Complex64> {
        let den = self.phi(t + self.eta);
        if den.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(den.norm()));
        }
        Ok(self.phi(t) / den)
    }

    /// Exchange matrix `S(t1, t2)` with weights evaluated at `t1 - t2`.
    pub fn s_matrix(&self, t1: Complex64, t2: Complex64) -> Result<TwoSiteSMatrix> {
        let t = t1 - t2;
        Ok(TwoSiteSMatrix {
            b: self.weight_b(t)?,
            c: self.weight_c(t)?,
        })
    }

    /// Error unless the inhomogeneities are pairwise distinct under the guard.
    pub fn require_distinct_xi(&self, context: &'static str) -> Result<()> {
        for i in 0..self.xi.len() {
            for j in i + 1..self.xi.len() {
                if self.phi(self.xi[i] - self.xi[j]).norm() < POLE_GUARD {
                    return Err(Error::HomogeneousChain(context));
                }
            }
        }
        Ok(())
    }
}

/// Pseudovacuum eigenvalue of the diagonal entry A:
/// `a(t) = prod_k c(xi_k - t)`. The D entry has eigenvalue 1.
pub fn vacuum_eigenvalue(params: &ModelParams, t: Complex64) -> Result<Complex64> {
    let mut a = Complex64::ONE;
    for &xi in params.xi() {
        a *= params.weight_c(xi - t)?;
    }
    Ok(a)
}

/// Closure form of the vacuum eigenvalue, for use as the scalar-product
/// a-function.
pub fn model_a_fn(params: &ModelParams) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |t| {
        let mut a = Complex64::ONE;
        for &xi in params.xi() {
            a *= params.phi(xi - t) / params.phi(xi - t + params.eta());
        }
        a
    }
}

/// Derivative of the vacuum eigenvalue in `t`, via its logarithmic
/// derivative; requires `t` away from every inhomogeneity.
pub fn vacuum_eigenvalue_derivative(params: &ModelParams, t: Complex64) -> Result<Complex64> {
    let phi_log_slope = |z: Complex64| -> Result<Complex64> {
        let phi = params.phi(z);
        if phi.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(phi.norm()));
        }
        Ok(match params.variant() {
            Variant::Rational => Complex64::ONE / z,
            Variant::Trigonometric => z.cosh() / z.sinh(),
        })
    };
    let mut dlog = Complex64::ZERO;
    for &xi in params.xi() {
        dlog += phi_log_slope(xi - t + params.eta())? - phi_log_slope(xi - t)?;
    }
    Ok(vacuum_eigenvalue(params, t)? * dlog)
}

/// Which auxiliary-space entry of the monodromy matrix to take.
///
/// With the auxiliary spin threaded as an extra site, A keeps the auxiliary
/// spin up, D keeps it down, B turns up into down (adding one particle to the
/// chain), and C turns down into up (removing one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    A,
    B,
    C,
    D,
}

impl OperatorLabel {
    /// (auxiliary in is up, auxiliary out is up)
    fn aux_spins(self) -> (bool, bool) {
        match self {
            OperatorLabel::A => (true, true),
            OperatorLabel::B => (true, false),
            OperatorLabel::C => (false, true),
            OperatorLabel::D => (false, false),
        }
    }
}

/// One monodromy entry at a fixed spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyEntry {
    pub label: OperatorLabel,
    pub t: Complex64,
}

impl MonodromyEntry {
    pub fn new(label: OperatorLabel, t: Complex64) -> Self {
        Self { label, t }
    }
}

/// Apply one monodromy entry to a state without materializing any matrix.
///
/// The auxiliary spin is threaded as bit `n_sites` of an enlarged amplitude
/// vector; the site factors are applied in chain order N down to 1 (the
/// rightmost factor of `S_{1,0} ... S_{N,0}` acts first) and the requested
/// auxiliary component is projected out at the end.
pub fn monodromy_apply(
    params: &ModelParams,
    entry: MonodromyEntry,
    state: &StateVector,
) -> Result<StateVector> {
    let n = state.n_sites();
    if n != params.n_sites() {
        return Err(Error::DimensionMismatch {
            left: params.n_sites(),
            right: n,
        });
    }
    if n + 1 > MAX_SITES {
        return Err(Error::ChainTooLarge(n + 1));
    }
    let (aux_in_up, aux_out_up) = entry.label.aux_spins();
    let dim = state.dim();
    let aux_bit = dim;

    let mut ext = vec![Complex64::ZERO; dim << 1];
    let offset_in = if aux_in_up { aux_bit } else { 0 };
    for (mask, &a) in state.amplitudes().iter().enumerate() {
        ext[mask | offset_in] = a;
    }

    for k in (1..=n).rev() {
        let s = params.s_matrix(params.xi()[k - 1], entry.t)?;
        s.apply_inplace(&mut ext, 1 << (k - 1), aux_bit);
    }

    let offset_out = if aux_out_up { aux_bit } else { 0 };
    let mut out = StateVector::zero(n)?;
    for mask in 0..dim {
        out.amplitudes_mut()[mask] = ext[mask | offset_out];
    }
    Ok(out)
}

/// Convenience wrapper for a single labeled entry.
pub fn apply_entry(
    params: &ModelParams,
    label: OperatorLabel,
    t: Complex64,
    state: &StateVector,
) -> Result<StateVector> {
    monodromy_apply(params, MonodromyEntry::new(label, t), state)
}

/// Apply the transfer matrix A(t) + D(t).
pub fn transfer_apply(
    params: &ModelParams,
    t: Complex64,
    state: &StateVector,
) -> Result<StateVector> {
    let mut out = apply_entry(params, OperatorLabel::A, t, state)?;
    let d = apply_entry(params, OperatorLabel::D, t, state)?;
    out.add_scaled(Complex64::ONE, &d)?;
    Ok(out)
}

/// Transfer-matrix eigenvalue on the state built from the given roots:
/// `Lambda(t) = a(t) prod_k 1/c(t_k - t) + prod_k 1/c(t - t_k)`.
pub fn transfer_eigenvalue(
    params: &ModelParams,
    t: Complex64,
    roots: &[Complex64],
) -> Result<Complex64> {
    let mut first = vacuum_eigenvalue(params, t)?;
    let mut second = Complex64::ONE;
    for &tk in roots {
        first *= invert_weight_c(params, tk - t)?;
        second *= invert_weight_c(params, t - tk)?;
    }
    Ok(first + second)
}

fn invert_weight_c(params: &ModelParams, u: Complex64) -> Result<Complex64> {
    let num = params.phi(u);
    if num.norm() < POLE_GUARD {
        return Err(Error::PoleProximity(num.norm()));
    }
    Ok(params.phi(u + params.eta()) / num)
}

/// Apply `S_{ij}(t1, t2)` to a state: weights at `t1 - t2` on sites `(i, j)`.
pub fn apply_two_site_s(
    params: &ModelParams,
    state: &StateVector,
    site_i: usize,
    site_j: usize,
    t1: Complex64,
    t2: Complex64,
) -> Result<StateVector> {
    params.s_matrix(t1, t2)?.apply(state, site_i, site_j)
}
