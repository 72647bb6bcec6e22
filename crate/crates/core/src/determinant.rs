//! Closed forms for the scalar product: the packed-overlap determinant, the
//! subset sum over partitions of the parameter pool, its Bethe-substituted
//! rewriting, the single-determinant form, the norm limit, and the residue
//! recursion. Everything in this module is for the rational weights
//! `b(t) = eta / (t + eta)`, `c(t) = t / (t + eta)`.
//!
//! The a-function is always an explicit argument. Passing the model's vacuum
//! eigenvalue gives the physical scalar product; passing any other function
//! checks the formulas as identities in a.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{det_with_hint, matrix_from_fn, solve};
use crate::model::{vacuum_eigenvalue, vacuum_eigenvalue_derivative, Variant, POLE_GUARD};
use crate::oracle::BetheRoots;

/// Largest magnon number the subset sums accept by default; the partition
/// count grows as binomial(2M, M).
pub const SUBSET_CAP_DEFAULT: usize = 6;

/// Determinant value with bookkeeping for conditioning.
#[derive(Debug, Clone, Copy)]
pub struct DeterminantResult {
    pub value: Complex64,
    /// `max |entry| * dim / |det|`; large values flag heavy cancellation.
    pub condition_hint: f64,
    pub dim: usize,
}

/// Argument sets of one scalar product: the annihilation-side parameters
/// (`lambdas`) and the creation-side parameters (`ts`).
#[derive(Debug, Clone)]
pub struct ScalarProductSpec {
    lambdas: Vec<Complex64>,
    ts: Vec<Complex64>,
    subset_cap: usize,
}

impl ScalarProductSpec {
    pub fn new(lambdas: Vec<Complex64>, ts: Vec<Complex64>) -> Result<Self> {
        if lambdas.len() != ts.len() {
            return Err(Error::DimensionMismatch {
                left: lambdas.len(),
                right: ts.len(),
            });
        }
        Ok(Self {
            lambdas,
            ts,
            subset_cap: SUBSET_CAP_DEFAULT,
        })
    }

    /// Raise or lower the partition-count guard.
    pub fn with_subset_cap(mut self, cap: usize) -> Self {
        self.subset_cap = cap;
        self
    }

    pub fn magnons(&self) -> usize {
        self.ts.len()
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn ts(&self) -> &[Complex64] {
        &self.ts
    }
}

/// `prod_{i<j} (p_i - p_j)`.
fn diff_product_lower(points: &[Complex64]) -> Complex64 {
    let mut v = Complex64::ONE;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            v *= points[i] - points[j];
        }
    }
    v
}

/// `prod_{j<i} (p_i - p_j)`.
fn diff_product_upper(points: &[Complex64]) -> Complex64 {
    let mut v = Complex64::ONE;
    for i in 0..points.len() {
        for j in 0..i {
            v *= points[i] - points[j];
        }
    }
    v
}

/// The Cauchy-like kernel `eta / ((x - y)(x - y + eta))`.
fn kernel(x: Complex64, y: Complex64, eta: Complex64) -> Complex64 {
    let d = x - y;
    eta / (d * (d + eta))
}

fn require_separated(points: &[Complex64], eta: Complex64, context: &'static str) -> Result<()> {
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let d = points[i] - points[j];
            if d.norm() < POLE_GUARD {
                return Err(Error::CoincidentParameters {
                    context,
                    separation: d.norm(),
                });
            }
            if (d + eta).norm() < POLE_GUARD {
                return Err(Error::PoleProximity((d + eta).norm()));
            }
        }
    }
    Ok(())
}

/// Determinant pairing of two equal-size parameter sets:
/// `det E / (prod_{i<j}(y_i - y_j) prod_{j<i}(x_i - x_j))` with
/// `E_ij = eta prod_{k != j}(y_i - x_k) / (y_i - x_j + eta)`.
///
/// The rows come pre-multiplied by `prod_j (y_i - x_j)`, so coincidences
/// between the two sets stay finite (they are removable); only within-set
/// separation and the shifted denominators `y_i - x_j + eta` are required.
///
/// `phi_m(ts, xi)` is the overlap of the fully packed state with
/// `B(t_1)...B(t_M)` applied to the pseudovacuum of the chain with
/// inhomogeneities `xi`; the same pairing over partition halves of the
/// pooled parameters builds the scalar-product sum.
pub fn phi_m(xs: &[Complex64], ys: &[Complex64], eta: Complex64) -> Result<Complex64> {
    let m = ys.len();
    if xs.len() != m {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: m,
        });
    }
    if m == 0 {
        return Ok(Complex64::ONE);
    }
    for &y in ys {
        for &x in xs {
            if (y - x + eta).norm() < POLE_GUARD {
                return Err(Error::PoleProximity((y - x + eta).norm()));
            }
        }
    }
    let vy = diff_product_lower(ys);
    let vx = diff_product_upper(xs);
    if vy.norm() < POLE_GUARD || vx.norm() < POLE_GUARD {
        return Err(Error::CoincidentParameters {
            context: "packed overlap",
            separation: vy.norm().min(vx.norm()),
        });
    }
    let scaled = matrix_from_fn(m, m, |i, j| {
        let mut row = eta;
        for (jp, &x) in xs.iter().enumerate() {
            if jp != j {
                row *= ys[i] - x;
            }
        }
        row / (ys[i] - xs[j] + eta)
    });
    let (det, _) = det_with_hint(&scaled);
    Ok(det / (vy * vx))
}

/// Scalar product as a sum over partitions of the pooled parameters
/// `{lambda} U {t}` into a chosen half `mu` and a complement `nu`:
/// each partition contributes
/// `prod_j a(nu_j) * Phi_M(ts, mu) * Phi_M(lambdas, mu) *
///  prod_{i,j} 1 / c(mu_i - nu_j)`.
pub fn scalar_product_sum(
    spec: &ScalarProductSpec,
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let m = spec.magnons();
    if m > spec.subset_cap {
        return Err(Error::CapExceeded {
            what: "subset-sum magnon number",
            value: m,
            cap: spec.subset_cap,
        });
    }
    if m == 0 {
        return Ok(Complex64::ONE);
    }
    let mut pool = spec.lambdas.clone();
    pool.extend_from_slice(&spec.ts);
    require_separated(&pool, eta, "subset-sum parameter pool")?;

    let mut sum = Complex64::ZERO;
    for mask in 0..(1usize << (2 * m)) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut mu = Vec::with_capacity(m);
        let mut nu = Vec::with_capacity(m);
        for (idx, &z) in pool.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                mu.push(z);
            } else {
                nu.push(z);
            }
        }
        let mut term = phi_m(&spec.ts, &mu, eta)? * phi_m(&spec.lambdas, &mu, eta)?;
        for &n in &nu {
            term *= a(n);
        }
        for &x in &mu {
            for &n in &nu {
                let d = x - n;
                term *= (d + eta) / d;
            }
        }
        sum += term;
    }
    Ok(sum)
}

/// Signature of the shuffle that puts the chosen indices first: for a sorted
/// choice `k_1 < ... < k_m` out of `0..M`, the parity of `sum_i (k_i - i)`.
fn shuffle_sign(chosen: &[usize]) -> f64 {
    let swaps: usize = chosen.iter().enumerate().map(|(i, &k)| k - i).sum();
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn split_by_mask(m: usize, mask: usize) -> (Vec<usize>, Vec<usize>) {
    let mut chosen = Vec::new();
    let mut rest = Vec::new();
    for idx in 0..m {
        if mask & (1 << idx) != 0 {
            chosen.push(idx);
        } else {
            rest.push(idx);
        }
    }
    (chosen, rest)
}

/// One term of the Bethe-substituted partition sum, identified by the set of
/// `t` indices moved to the complement side (`k_mask`) and the set of
/// `lambda` indices kept there (`n_mask`). Exposed separately so the sum can
/// be checked term by term against `scalar_product_sum`.
fn bethe_sum_term(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: &impl Fn(Complex64) -> Complex64,
    k_mask: usize,
    n_mask: usize,
    with_exchange_ratios: bool,
) -> Complex64 {
    let m = ts.len();
    let (k_set, alpha_set) = split_by_mask(m, k_mask);
    let (n_set, beta_set) = split_by_mask(m, n_mask);

    let sign_mm = if (m * k_set.len()).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let mut term = Complex64::new(shuffle_sign(&k_set) * shuffle_sign(&n_set) * sign_mm, 0.0);

    for &n in &n_set {
        term *= a(lambdas[n]);
    }
    for &t in ts {
        for &n in &n_set {
            term *= t - lambdas[n] + eta;
        }
        for &beta in &beta_set {
            term *= t - lambdas[beta] - eta;
        }
    }
    let det_bk = det_with_hint(&matrix_from_fn(beta_set.len(), k_set.len(), |r, c| {
        kernel(lambdas[beta_set[r]], ts[k_set[c]], eta)
    }))
    .0;
    let det_an = det_with_hint(&matrix_from_fn(alpha_set.len(), n_set.len(), |r, c| {
        kernel(ts[alpha_set[r]], lambdas[n_set[c]], eta)
    }))
    .0;
    term *= det_bk * det_an;

    if with_exchange_ratios {
        for &k in &k_set {
            for &alpha in &alpha_set {
                term *= ts[k] - ts[alpha] + eta;
            }
            for &n in &n_set {
                term /= ts[k] - lambdas[n] + eta;
            }
        }
        for &beta in &beta_set {
            for &n in &n_set {
                term *= lambdas[beta] - lambdas[n] + eta;
            }
            for &alpha in &alpha_set {
                term /= lambdas[beta] - ts[alpha] + eta;
            }
        }
    }
    term
}

fn bethe_sum(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
    with_exchange_ratios: bool,
) -> Result<Complex64> {
    let m = ts.len();
    if lambdas.len() != m {
        return Err(Error::DimensionMismatch {
            left: lambdas.len(),
            right: m,
        });
    }
    if m > SUBSET_CAP_DEFAULT {
        return Err(Error::CapExceeded {
            what: "partition-sum magnon number",
            value: m,
            cap: SUBSET_CAP_DEFAULT,
        });
    }
    if m == 0 {
        return Ok(Complex64::ONE);
    }
    let mut pool = lambdas.to_vec();
    pool.extend_from_slice(ts);
    require_separated(&pool, eta, "partition-sum parameter pool")?;

    let mut sum = Complex64::ZERO;
    for k_mask in 0..(1usize << m) {
        let p = m - k_mask.count_ones() as usize;
        for n_mask in 0..(1usize << m) {
            if n_mask.count_ones() as usize != p {
                continue;
            }
            sum += bethe_sum_term(lambdas, ts, eta, &a, k_mask, n_mask, with_exchange_ratios);
        }
    }
    Ok(sum / (diff_product_lower(ts) * diff_product_upper(lambdas)))
}

/// The partition sum after the Bethe substitution (every `a(t_k)` replaced by
/// the magnon-interaction product), organized over index subsets with
/// explicit sign factors and exchange ratios.
pub fn scalar_product_bethe_sum(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    bethe_sum(lambdas, ts, eta, a, true)
}

/// Same sum with the exchange ratios dropped; term for term this is the
/// expansion of the single determinant below.
pub fn scalar_product_bethe_sum_reduced(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    bethe_sum(lambdas, ts, eta, a, false)
}

/// The matrix behind the single-determinant scalar product form:
/// `N_ij = eta/(t_i - lambda_j) * (a(lambda_j) prod_{k != i}(t_k - lambda_j + eta)
///                                 - prod_{k != i}(t_k - lambda_j - eta))`.
pub fn slavnov_matrix(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<nalgebra::DMatrix<Complex64>> {
    let m = ts.len();
    if lambdas.len() != m {
        return Err(Error::DimensionMismatch {
            left: lambdas.len(),
            right: m,
        });
    }
    let mut pool = lambdas.to_vec();
    pool.extend_from_slice(ts);
    require_separated(&pool, eta, "determinant parameter pool")?;

    let a_values: Vec<Complex64> = lambdas.iter().map(|&l| a(l)).collect();
    Ok(matrix_from_fn(m, m, |i, j| {
        let mut plus = Complex64::ONE;
        let mut minus = Complex64::ONE;
        for (k, &t) in ts.iter().enumerate() {
            if k != i {
                plus *= t - lambdas[j] + eta;
                minus *= t - lambdas[j] - eta;
            }
        }
        eta / (ts[i] - lambdas[j]) * (a_values[j] * plus - minus)
    }))
}

/// Single-determinant form of the Bethe-substituted scalar product:
/// `S_M = det N / (prod_{i<j}(t_i - t_j) prod_{j<i}(lambda_i - lambda_j))`
/// with the matrix `N` from [`slavnov_matrix`].
pub fn slavnov_determinant(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<DeterminantResult> {
    let m = ts.len();
    if m == 0 && lambdas.is_empty() {
        return Ok(DeterminantResult {
            value: Complex64::ONE,
            condition_hint: 1.0,
            dim: 0,
        });
    }
    let matrix = slavnov_matrix(lambdas, ts, eta, a)?;
    let (det, condition_hint) = det_with_hint(&matrix);
    Ok(DeterminantResult {
        value: det / (diff_product_lower(ts) * diff_product_upper(lambdas)),
        condition_hint,
        dim: m,
    })
}

/// Norm of a Bethe state in the bilinear pairing: the coinciding-argument
/// limit of the single-determinant form, with the diagonal taken by
/// l'Hopital. Uses the model's vacuum eigenvalue and its derivative;
/// rational variant only.
pub fn gaudin_norm(roots: &BetheRoots) -> Result<DeterminantResult> {
    let params = roots.params();
    if params.variant() != Variant::Rational {
        return Err(Error::InvalidArgument(
            "norm determinant requires the rational variant".into(),
        ));
    }
    let eta = params.eta();
    let t = roots.roots();
    let m = t.len();
    if m == 0 {
        return Ok(DeterminantResult {
            value: Complex64::ONE,
            condition_hint: 1.0,
            dim: 0,
        });
    }

    let a_values: Vec<Complex64> = t
        .iter()
        .map(|&tj| vacuum_eigenvalue(params, tj))
        .collect::<Result<_>>()?;
    let a_derivatives: Vec<Complex64> = t
        .iter()
        .map(|&tj| vacuum_eigenvalue_derivative(params, tj))
        .collect::<Result<_>>()?;

    let matrix = matrix_from_fn(m, m, |i, j| {
        if i != j {
            let mut plus = Complex64::ONE;
            let mut minus = Complex64::ONE;
            for (k, &tk) in t.iter().enumerate() {
                if k != i {
                    plus *= tk - t[j] + eta;
                    minus *= tk - t[j] - eta;
                }
            }
            eta / (t[i] - t[j]) * (a_values[j] * plus - minus)
        } else {
            // -eta * d/dl [ a(l) prod_{k != j}(t_k - l + eta)
            //               - prod_{k != j}(t_k - l - eta) ] at l = t_j.
            let mut plus = Complex64::ONE;
            let mut minus = Complex64::ONE;
            for (k, &tk) in t.iter().enumerate() {
                if k != j {
                    plus *= tk - t[j] + eta;
                    minus *= tk - t[j] - eta;
                }
            }
            let mut sum_plus = Complex64::ZERO;
            let mut sum_minus = Complex64::ZERO;
            for (k, &tk) in t.iter().enumerate() {
                if k != j {
                    sum_plus += plus / (tk - t[j] + eta);
                    sum_minus += minus / (tk - t[j] - eta);
                }
            }
            -eta * (a_derivatives[j] * plus - a_values[j] * sum_plus + sum_minus)
        }
    });
    let (det, condition_hint) = det_with_hint(&matrix);
    Ok(DeterminantResult {
        value: det / (diff_product_lower(t) * diff_product_upper(t)),
        condition_hint,
        dim: m,
    })
}

/// Magnon-interaction product over a root set with rational weights:
/// `f(t_i) = prod_{k != i} (t_k - t_i - eta) / (t_k - t_i + eta)`.
fn rational_magnon_interaction(ts: &[Complex64], i: usize, eta: Complex64) -> Complex64 {
    let mut f = Complex64::ONE;
    for (k, &tk) in ts.iter().enumerate() {
        if k != i {
            let d = tk - ts[i];
            f *= (d - eta) / (d + eta);
        }
    }
    f
}

/// Right-hand side of the pole recursion at `lambda_1 -> t_1`: the simple
/// pole times the reduced scalar product, whose a-function carries the extra
/// factor `c(z - t_1) / c(t_1 - z)`. Evaluate with `lambda_1` close to `t_1`
/// and compare pole coefficients against the single-determinant form.
pub fn residue_recursion_rhs(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let m = ts.len();
    if lambdas.len() != m {
        return Err(Error::DimensionMismatch {
            left: lambdas.len(),
            right: m,
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument(
            "pole recursion needs at least one magnon".into(),
        ));
    }
    let t1 = ts[0];
    let lambda1 = lambdas[0];
    let f1 = rational_magnon_interaction(ts, 0, eta);
    let mut value = eta * (a(lambda1) - f1) / (t1 - lambda1);
    for &tk in &ts[1..] {
        let d = tk - t1;
        value *= (d + eta) / d;
    }
    for &lk in &lambdas[1..] {
        let d = lk - t1;
        value *= (d + eta) / d;
    }
    let reduced_a = |z: Complex64| {
        // c(z - t_1) / c(t_1 - z) = (z - t_1 - eta) / (z - t_1 + eta)
        // after clearing the odd phi.
        a(z) * (z - t1) * (t1 - z + eta) / ((z - t1 + eta) * (t1 - z))
    };
    let inner = slavnov_determinant(&lambdas[1..], &ts[1..], eta, reduced_a)?;
    Ok(value * inner.value)
}

/// Fit `v(delta) = c_pole / delta + c_0 + c_1 delta` through three samples
/// and return `(c_pole, c_0, c_1)`.
pub fn fit_laurent_pole(
    offsets: &[Complex64; 3],
    values: &[Complex64; 3],
) -> Result<(Complex64, Complex64, Complex64)> {
    let a = matrix_from_fn(3, 3, |i, j| match j {
        0 => Complex64::ONE / offsets[i],
        1 => Complex64::ONE,
        _ => offsets[i],
    });
    let b = nalgebra::DVector::from_vec(values.to_vec());
    let c = solve(a, b, "pole fit")?;
    Ok((c[0], c[1], c[2]))
}

/// Largest relative difference between the partition sum and the
/// single-determinant form over the same inputs; convenience for the
/// verification harness.
pub fn bethe_forms_disagreement(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    a: impl Fn(Complex64) -> Complex64,
) -> Result<f64> {
    let sum = scalar_product_bethe_sum(lambdas, ts, eta, &a)?;
    let reduced = scalar_product_bethe_sum_reduced(lambdas, ts, eta, &a)?;
    let det = slavnov_determinant(lambdas, ts, eta, &a)?.value;
    let scale = sum.norm().max(det.norm()).max(1e-300);
    Ok(((sum - det).norm().max((reduced - det).norm())) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{model_a_fn, ModelParams};
    use crate::oracle::{
        bethe_state, brute_force_norm, brute_force_scalar_product, solve_bae_multistart,
    };
    use crate::sampling::ParameterSampler;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn packed_overlap_single_parameter() {
        // One site, one parameter: eta / (t - xi + eta); frozen at 1/2.
        let got = phi_m(&[Complex64::ZERO], &[Complex64::ONE], Complex64::ONE).unwrap();
        assert!((got - c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn packed_overlap_is_finite_at_coincident_cross_parameters() {
        let xi = [c64(0.1, 0.0), c64(-0.4, 0.2)];
        let ts = [c64(0.1, 0.0), c64(0.7, -0.3)];
        // t_1 = xi_1: a removable coincidence.
        let got = phi_m(&xi, &ts, Complex64::ONE).unwrap();
        assert!(got.is_finite());
        // Compare with a nearby separated evaluation.
        let mut ts2 = ts;
        ts2[0] += c64(1e-9, 1e-9);
        let near = phi_m(&xi, &ts2, Complex64::ONE).unwrap();
        assert!((got - near).norm() < 1e-6 * got.norm().max(1.0));
    }

    #[test]
    fn packed_overlap_matches_packed_matrix_element() {
        // Oracle: on an M-site chain with inhomogeneities xi, the overlap of
        // the fully packed state with B(t_1)...B(t_M)|0> is phi_m(ts, xi):
        // the string parameters take the first role, the sites the second.
        let eta = c64(0.85, 0.1);
        for m in 1..=4usize {
            let mut sampler = ParameterSampler::new(300 + m as u64);
            let p = sampler.random_model(Variant::Rational, eta, m).unwrap();
            let ts = sampler
                .separated_points(m, p.xi(), Variant::Rational, eta)
                .unwrap();
            let state = bethe_state(&p, &ts).unwrap();
            let packed = state.amp((1 << m) - 1);
            let closed = phi_m(&ts, p.xi(), eta).unwrap();
            assert!(
                (packed - closed).norm() < 1e-11 * packed.norm().max(1.0),
                "M = {m}: {packed} vs {closed}"
            );
        }
    }

    #[test]
    fn packed_overlap_is_symmetric_in_the_string_parameters() {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(12);
        let xi = sampler
            .separated_points(3, &[], Variant::Rational, eta)
            .unwrap();
        let ts = sampler
            .separated_points(3, &xi, Variant::Rational, eta)
            .unwrap();
        let base = phi_m(&xi, &ts, eta).unwrap();
        let swapped = phi_m(&xi, &[ts[1], ts[0], ts[2]], eta).unwrap();
        assert!((base - swapped).norm() < 1e-12 * base.norm().max(1.0));
    }

    fn random_spec(seed: u64, n: usize, m: usize) -> (ModelParams, ScalarProductSpec) {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(seed);
        let p = sampler.random_model(Variant::Rational, eta, n).unwrap();
        let pts = sampler
            .separated_points(2 * m, p.xi(), Variant::Rational, eta)
            .unwrap();
        let spec = ScalarProductSpec::new(pts[..m].to_vec(), pts[m..].to_vec()).unwrap();
        (p, spec)
    }

    #[test]
    fn partition_sum_matches_brute_force() {
        for (seed, n, m) in [(21u64, 3usize, 1usize), (22, 4, 2), (23, 5, 2)] {
            let (p, spec) = random_spec(seed, n, m);
            let brute = brute_force_scalar_product(&p, spec.lambdas(), spec.ts()).unwrap();
            let closed = scalar_product_sum(&spec, p.eta(), model_a_fn(&p)).unwrap();
            assert!(
                (brute - closed).norm() < 1e-11 * brute.norm().max(1.0),
                "N={n} M={m}: {brute} vs {closed}"
            );
        }
    }

    #[test]
    fn empty_scalar_product_is_one() {
        let spec = ScalarProductSpec::new(vec![], vec![]).unwrap();
        let s = scalar_product_sum(&spec, Complex64::ONE, |_| Complex64::ONE).unwrap();
        assert_eq!(s, Complex64::ONE);
    }

    #[test]
    fn bethe_terms_match_partition_terms_after_substitution() {
        // Term-for-term: the partition whose complement holds the t's in
        // `k_set` and the lambdas in `n_set` equals the corresponding signed
        // term, once every a(t_k) is replaced by the interaction product.
        let eta = c64(1.0, 0.0);
        for m in [2usize, 3] {
            let mut sampler = ParameterSampler::new(400 + m as u64);
            let pts = sampler
                .separated_points(2 * m, &[], Variant::Rational, eta)
                .unwrap();
            let (lambdas, ts) = (&pts[..m], &pts[m..]);
            let a = |z: Complex64| (z * z + c64(2.0, 0.0)) / (z * z + c64(3.0, 0.0));
            let substituted = |z: Complex64| {
                for i in 0..m {
                    if (z - ts[i]).norm() < 1e-12 {
                        return rational_magnon_interaction(ts, i, eta);
                    }
                }
                a(z)
            };
            let prefactor = diff_product_lower(ts) * diff_product_upper(lambdas);
            for k_mask in 0..(1usize << m) {
                let p_count = m - k_mask.count_ones() as usize;
                for n_mask in 0..(1usize << m) {
                    if n_mask.count_ones() as usize != p_count {
                        continue;
                    }
                    // Rebuild the matching mu/nu partition of the pool.
                    let mut nu = Vec::new();
                    let mut mu = Vec::new();
                    for (i, &l) in lambdas.iter().enumerate() {
                        if n_mask & (1 << i) != 0 {
                            nu.push(l);
                        } else {
                            mu.push(l);
                        }
                    }
                    for (i, &t) in ts.iter().enumerate() {
                        if k_mask & (1 << i) != 0 {
                            nu.push(t);
                        } else {
                            mu.push(t);
                        }
                    }
                    let mut partition_term =
                        phi_m(ts, &mu, eta).unwrap() * phi_m(lambdas, &mu, eta).unwrap();
                    for &z in &nu {
                        partition_term *= substituted(z);
                    }
                    for &x in &mu {
                        for &z in &nu {
                            partition_term *= (x - z + eta) / (x - z);
                        }
                    }
                    let signed_term =
                        bethe_sum_term(lambdas, ts, eta, &a, k_mask, n_mask, true) / prefactor;
                    assert!(
                        (partition_term - signed_term).norm()
                            < 1e-10 * partition_term.norm().max(1.0),
                        "m={m} k={k_mask:b} n={n_mask:b}: {partition_term} vs {signed_term}"
                    );
                }
            }
        }
    }

    #[test]
    fn all_bethe_forms_agree_for_an_arbitrary_a() {
        let eta = c64(1.0, 0.0);
        for m in 1..=4usize {
            let mut sampler = ParameterSampler::new(500 + m as u64);
            let pts = sampler
                .separated_points(2 * m, &[], Variant::Rational, eta)
                .unwrap();
            let a = |z: Complex64| (z * z + c64(2.0, 0.0)) / (z * z + c64(3.0, 0.0));
            let disagreement = bethe_forms_disagreement(&pts[..m], &pts[m..], eta, a).unwrap();
            assert!(disagreement < 1e-10, "m={m}: {disagreement}");
        }
    }

    #[test]
    fn leading_a_coefficient_is_the_single_extreme_term() {
        // Scale a(z) by kappa: the kappa^M coefficient of the determinant is
        // the single term with every lambda on the complement side.
        let eta = c64(1.0, 0.0);
        let m = 2usize;
        let mut sampler = ParameterSampler::new(77);
        let pts = sampler
            .separated_points(2 * m, &[], Variant::Rational, eta)
            .unwrap();
        let (lambdas, ts) = (&pts[..m], &pts[m..]);
        let a = |z: Complex64| (z + c64(0.3, 0.1)) / (z - c64(2.5, 1.0));
        let kappa = 1e8;
        let scaled = slavnov_determinant(lambdas, ts, eta, |z| a(z) * kappa)
            .unwrap()
            .value
            / kappa.powi(m as i32);
        let extreme = bethe_sum_term(lambdas, ts, eta, &a, 0, (1 << m) - 1, true)
            / (diff_product_lower(ts) * diff_product_upper(lambdas));
        assert!(
            (scaled - extreme).norm() < 1e-5 * extreme.norm(),
            "{scaled} vs {extreme}"
        );
    }

    #[test]
    fn determinant_form_matches_brute_force_at_bethe_roots() {
        let (p, _) = random_spec(31, 4, 2);
        let roots = solve_bae_multistart(&p, 2, 8, 40, 60, 1e-11).unwrap();
        let mut sampler = ParameterSampler::new(32);
        let mut guard = p.xi().to_vec();
        guard.extend_from_slice(roots.roots());
        let lambdas = sampler
            .separated_points(2, &guard, Variant::Rational, p.eta())
            .unwrap();
        let brute = brute_force_scalar_product(&p, &lambdas, roots.roots()).unwrap();
        let det = slavnov_determinant(&lambdas, roots.roots(), p.eta(), model_a_fn(&p))
            .unwrap()
            .value;
        assert!(
            (brute - det).norm() < 1e-9 * brute.norm().max(1.0),
            "{brute} vs {det}"
        );
    }

    #[test]
    fn norm_determinant_matches_brute_force() {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(41);
        let p = sampler.random_model(Variant::Rational, eta, 4).unwrap();
        for m in 1..=2usize {
            let roots = solve_bae_multistart(&p, m, 9 + m as u64, 40, 60, 1e-12).unwrap();
            let brute = brute_force_norm(&roots).unwrap();
            let closed = gaudin_norm(&roots).unwrap().value;
            assert!(
                (brute - closed).norm() < 1e-8 * brute.norm().max(1.0),
                "M={m}: {brute} vs {closed}"
            );
        }
    }

    #[test]
    fn norm_determinant_is_the_coinciding_limit_of_the_determinant_form() {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(43);
        let p = sampler.random_model(Variant::Rational, eta, 4).unwrap();
        let roots = solve_bae_multistart(&p, 2, 3, 40, 60, 1e-13).unwrap();
        let delta = 1e-5;
        let dirs = [c64(1.0, 0.4), c64(-0.6, 1.0)];
        let lambdas: Vec<Complex64> = roots
            .roots()
            .iter()
            .zip(dirs)
            .map(|(&t, d)| t + d * delta)
            .collect();
        let shifted = slavnov_determinant(&lambdas, roots.roots(), p.eta(), model_a_fn(&p))
            .unwrap()
            .value;
        let limit = gaudin_norm(&roots).unwrap().value;
        assert!(
            (shifted - limit).norm() < 1e-3 * limit.norm(),
            "{shifted} vs {limit}"
        );
    }

    #[test]
    fn pole_fit_recovers_synthetic_coefficients() {
        let c_pole = c64(2.0, -1.0);
        let c_0 = c64(0.3, 0.4);
        let c_1 = c64(-1.2, 0.05);
        let offsets = [c64(1e-3, 2e-4), c64(1e-4, -3e-5), c64(-2e-4, 1e-4)];
        let values = offsets.map(|d| c_pole / d + c_0 + c_1 * d);
        let (p0, p1, p2) = fit_laurent_pole(&offsets, &values).unwrap();
        assert!((p0 - c_pole).norm() < 1e-9);
        assert!((p1 - c_0).norm() < 1e-6);
        assert!((p2 - c_1).norm() < 1e-3);
    }

    #[test]
    fn determinant_form_has_a_simple_pole_only_at_the_roots() {
        // Probe lambda_1 near t_2 (pole: values grow like 1/delta) and near
        // lambda_2 (no pole: values stay bounded).
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(47);
        let pts = sampler
            .separated_points(4, &[], Variant::Rational, eta)
            .unwrap();
        let (lambdas, ts) = (&pts[..2], &pts[2..]);
        let a = |z: Complex64| (z * z + c64(2.0, 0.0)) / (z * z + c64(3.0, 0.0));
        let dir = c64(0.8, 0.6);

        let probe = |center: Complex64, delta: f64| {
            let l = [center + dir * delta, lambdas[1]];
            slavnov_determinant(&l, ts, eta, a).unwrap().value.norm()
        };
        let at_root_coarse = probe(ts[1], 1e-4);
        let at_root_fine = probe(ts[1], 1e-6);
        assert!(
            at_root_fine / at_root_coarse > 30.0,
            "expected 1/delta growth, got {at_root_coarse} -> {at_root_fine}"
        );
        let near_lambda_coarse = probe(lambdas[1], 1e-4);
        let near_lambda_fine = probe(lambdas[1], 1e-6);
        assert!(
            near_lambda_fine / near_lambda_coarse < 10.0,
            "unexpected growth at coinciding lambdas: {near_lambda_coarse} -> {near_lambda_fine}"
        );
    }

    #[test]
    fn determinant_form_decays_like_one_over_lambda() {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(53);
        let p = sampler.random_model(Variant::Rational, eta, 4).unwrap();
        let roots = solve_bae_multistart(&p, 2, 5, 40, 60, 1e-11).unwrap();
        let lambda2 = sampler
            .separated_points(1, roots.roots(), Variant::Rational, eta)
            .unwrap()[0];
        // Constant a with value != 1 keeps the leading 1/lambda_1 term alive.
        let a = |_z: Complex64| c64(3.0, 0.0);
        let dir = c64(0.6, 0.8);
        let value = |radius: f64| {
            let l = [dir * radius, lambda2];
            slavnov_determinant(&l, roots.roots(), eta, a)
                .unwrap()
                .value
                .norm()
        };
        let slope = (value(1e4) / value(1e3)).log10();
        assert!(
            (slope + 1.0).abs() < 0.05,
            "decay slope {slope} (expected -1)"
        );
    }

    #[test]
    fn pole_recursion_matches_the_determinant_pole() {
        let eta = c64(1.0, 0.0);
        let mut sampler = ParameterSampler::new(59);
        let p = sampler.random_model(Variant::Rational, eta, 4).unwrap();
        let roots = solve_bae_multistart(&p, 2, 6, 40, 60, 1e-12).unwrap();
        let ts = roots.roots();
        let lambda_rest = sampler
            .separated_points(1, ts, Variant::Rational, eta)
            .unwrap();
        let a = |z: Complex64| (z * z + c64(2.0, 0.0)) / (z * z + c64(3.0, 0.0));
        let dir = c64(0.28, 0.96);
        let sample = |delta: f64| -> (Complex64, Complex64) {
            let lambdas = [ts[0] + dir * delta, lambda_rest[0]];
            let lhs = slavnov_determinant(&lambdas, ts, eta, a).unwrap().value;
            let rhs = residue_recursion_rhs(&lambdas, ts, eta, a).unwrap();
            (lhs, rhs)
        };
        let deltas = [1e-3, 1e-4, 1e-5];
        let offsets = deltas.map(|d| dir * d);
        let samples = deltas.map(sample);
        let (lhs_pole, _, _) = fit_laurent_pole(&offsets, &samples.map(|s| s.0)).unwrap();
        let (rhs_pole, _, _) = fit_laurent_pole(&offsets, &samples.map(|s| s.1)).unwrap();
        assert!(
            (lhs_pole - rhs_pole).norm() < 1e-7 * lhs_pole.norm(),
            "{lhs_pole} vs {rhs_pole}"
        );
    }

    #[test]
    fn subset_cap_is_enforced() {
        let pts: Vec<Complex64> = (0..14).map(|k| c64(k as f64, 0.0)).collect();
        let spec = ScalarProductSpec::new(pts[..7].to_vec(), pts[7..].to_vec()).unwrap();
        assert!(matches!(
            scalar_product_sum(&spec, Complex64::ONE, |_| Complex64::ONE),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn sector_mismatch_is_structurally_zero_in_the_oracle() {
        // The closed forms only exist for equal string lengths; the oracle
        // pairing for unequal lengths vanishes identically, which is the
        // statement that makes the restriction harmless.
        let (p, spec) = random_spec(61, 4, 2);
        let state = bethe_state(&p, spec.ts()).unwrap();
        let reduced = crate::oracle::apply_c_string(&p, &spec.lambdas()[..1], &state).unwrap();
        assert_eq!(reduced.amp(0), Complex64::ZERO);
    }
}
