//! Brute-force reference computations: operator strings on the full state
//! space, the scalar product as an explicit pairing, and a Newton solver for
//! the Bethe equations.
//!
//! Everything here is exponential in the chain length on purpose. These
//! routines are the oracles the closed formulas are tested against, so they
//! stay as close to the defining expressions as possible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    apply_entry, transfer_apply, transfer_eigenvalue, vacuum_eigenvalue, ModelParams,
    OperatorLabel, Variant, POLE_GUARD,
};
use crate::tensor::StateVector;

/// Chains longer than this are rejected by the brute-force entry points.
pub const BRUTE_FORCE_MAX_SITES: usize = 14;

/// Minimal separation two Bethe roots may have before the solver reports a
/// collision.
pub const ROOT_SEPARATION: f64 = 1e-6;

fn check_brute_force_size(params: &ModelParams) -> Result<()> {
    if params.n_sites() > BRUTE_FORCE_MAX_SITES {
        return Err(Error::CapExceeded {
            what: "brute-force chain length",
            value: params.n_sites(),
            cap: BRUTE_FORCE_MAX_SITES,
        });
    }
    Ok(())
}

/// Apply `B(t_1) ... B(t_M)` to a state (the last entry acts first).
pub fn apply_b_string(
    params: &ModelParams,
    ts: &[Complex64],
    state: &StateVector,
) -> Result<StateVector> {
    apply_string(params, OperatorLabel::B, ts, state)
}

/// Apply `C(t_1) ... C(t_M)` to a state (the last entry acts first).
pub fn apply_c_string(
    params: &ModelParams,
    ts: &[Complex64],
    state: &StateVector,
) -> Result<StateVector> {
    apply_string(params, OperatorLabel::C, ts, state)
}

fn apply_string(
    params: &ModelParams,
    label: OperatorLabel,
    ts: &[Complex64],
    state: &StateVector,
) -> Result<StateVector> {
    check_brute_force_size(params)?;
    let mut out = state.clone();
    for &t in ts.iter().rev() {
        out = apply_entry(params, label, t, &out)?;
    }
    Ok(out)
}

/// The Bethe state `B(t_1) ... B(t_M) |0>`.
pub fn bethe_state(params: &ModelParams, ts: &[Complex64]) -> Result<StateVector> {
    let vac = StateVector::pseudovacuum(params.n_sites())?;
    apply_b_string(params, ts, &vac)
}

/// Brute-force scalar product
/// `S_M = <0| C(lambda_1) ... C(lambda_M) B(t_1) ... B(t_M) |0>`,
/// evaluated with the model's own vacuum eigenvalue throughout.
pub fn brute_force_scalar_product(
    params: &ModelParams,
    lambdas: &[Complex64],
    ts: &[Complex64],
) -> Result<Complex64> {
    check_brute_force_size(params)?;
    if lambdas.len() != ts.len() {
        return Err(Error::DimensionMismatch {
            left: lambdas.len(),
            right: ts.len(),
        });
    }
    let ket = bethe_state(params, ts)?;
    let reduced = apply_c_string(params, lambdas, &ket)?;
    Ok(reduced.amp(0))
}

fn entry_label(out_down: usize, in_down: usize) -> OperatorLabel {
    match (out_down, in_down) {
        (0, 0) => OperatorLabel::A,
        (1, 0) => OperatorLabel::B,
        (0, 1) => OperatorLabel::C,
        _ => OperatorLabel::D,
    }
}

/// Nonzero entries of one row of the exchange matrix acting on a pair of
/// auxiliary spins: aligned rows are the identity, mixed rows keep the pair
/// with weight c and swap it with weight b. The matrix is symmetric, so the
/// same table serves for columns.
fn exchange_pair_row(
    params: &ModelParams,
    d: Complex64,
    a: usize,
    b: usize,
) -> Result<Vec<((usize, usize), Complex64)>> {
    if a == b {
        Ok(vec![((a, b), Complex64::ONE)])
    } else {
        Ok(vec![
            ((a, b), params.weight_c(d)?),
            ((b, a), params.weight_b(d)?),
        ])
    }
}

/// Largest defect over the sixteen auxiliary components of the monodromy
/// exchange relation `R(q - t) T(t) (x) T(q) = T(q) (x) T(t) R(q - t)` on one
/// state, normalized by the state norm.
pub fn rtt_defect(
    params: &ModelParams,
    t: Complex64,
    q: Complex64,
    state: &StateVector,
) -> Result<f64> {
    let n = params.n_sites();
    let delta = q - t;
    let mut worst: f64 = 0.0;
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                for d in 0..2usize {
                    let mut lhs = StateVector::zero(n)?;
                    for ((e, f), w) in exchange_pair_row(params, delta, a, b)? {
                        let inner = apply_entry(params, entry_label(f, d), q, state)?;
                        let outer = apply_entry(params, entry_label(e, c), t, &inner)?;
                        lhs.add_scaled(w, &outer)?;
                    }
                    let mut rhs = StateVector::zero(n)?;
                    for ((g, f), w) in exchange_pair_row(params, delta, c, d)? {
                        let inner = apply_entry(params, entry_label(a, g), t, state)?;
                        let outer = apply_entry(params, entry_label(b, f), q, &inner)?;
                        rhs.add_scaled(w, &outer)?;
                    }
                    worst = worst.max(lhs.max_abs_diff(&rhs)? / state.norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Defect of the creation exchange rule
/// `A(t) B(q) = B(q) A(t) / c(q - t) - b(q - t) B(t) A(q) / c(q - t)`
/// on one state, normalized by the state norm.
pub fn exchange_commutation_defect(
    params: &ModelParams,
    t: Complex64,
    q: Complex64,
    state: &StateVector,
) -> Result<f64> {
    let c_qt = params.weight_c(q - t)?;
    if c_qt.norm() < crate::model::POLE_GUARD {
        return Err(Error::PoleProximity(c_qt.norm()));
    }
    let b_qt = params.weight_b(q - t)?;
    let bq = apply_entry(params, OperatorLabel::B, q, state)?;
    let atbq = apply_entry(params, OperatorLabel::A, t, &bq)?;
    let at = apply_entry(params, OperatorLabel::A, t, state)?;
    let bqat = apply_entry(params, OperatorLabel::B, q, &at)?;
    let aq = apply_entry(params, OperatorLabel::A, q, state)?;
    let btaq = apply_entry(params, OperatorLabel::B, t, &aq)?;
    let mut resid = atbq;
    resid.add_scaled(-Complex64::ONE / c_qt, &bqat)?;
    resid.add_scaled(b_qt / c_qt, &btaq)?;
    Ok(resid.norm() / state.norm())
}

/// A solved set of Bethe roots for one magnon sector.
#[derive(Debug, Clone)]
pub struct BetheRoots {
    params: ModelParams,
    roots: Vec<Complex64>,
    residual: f64,
}

impl BetheRoots {
    /// Wrap a candidate root set, recomputing its residual and enforcing the
    /// pairwise-separation invariant.
    pub fn new(params: ModelParams, roots: Vec<Complex64>) -> Result<Self> {
        if roots.len() > params.n_sites() {
            return Err(Error::DimensionMismatch {
                left: roots.len(),
                right: params.n_sites(),
            });
        }
        let sep = min_separation(&roots);
        if roots.len() > 1 && sep < ROOT_SEPARATION {
            return Err(Error::RootCollision(sep));
        }
        let residual = bae_residual(&params, &roots)?;
        Ok(Self {
            params,
            roots,
            residual,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn magnons(&self) -> usize {
        self.roots.len()
    }

    /// Largest Bethe-equation defect `|a(t_i) - f(t_i)|` over the roots.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The product `f(t_i) = prod_{k != i} c(t_k - t_i) / c(t_i - t_k)`
    /// that the vacuum eigenvalue must match at a true root.
    pub fn magnon_interaction(&self, i: usize) -> Result<Complex64> {
        magnon_interaction(&self.params, &self.roots, i)
    }

    /// a-function with the Bethe substitution: at a root `t_i` (within
    /// `1e-12`) it returns `f(t_i)`; elsewhere it falls back to `fallback`.
    pub fn substituted_a<'a>(
        &'a self,
        fallback: impl Fn(Complex64) -> Complex64 + 'a,
    ) -> impl Fn(Complex64) -> Complex64 + 'a {
        move |z| {
            for i in 0..self.roots.len() {
                if (z - self.roots[i]).norm() < 1e-12 {
                    return magnon_interaction(&self.params, &self.roots, i)
                        .expect("roots respect the pole guard");
                }
            }
            fallback(z)
        }
    }
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            sep = sep.min((roots[i] - roots[j]).norm());
        }
    }
    sep
}

/// `f(t_i)` for an arbitrary root set: `prod_{k != i} phi(t_k - t_i - eta) /
/// phi(t_k - t_i + eta)`.
pub fn magnon_interaction(
    params: &ModelParams,
    roots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    let eta = params.eta();
    let mut f = Complex64::ONE;
    for (k, &tk) in roots.iter().enumerate() {
        if k == i {
            continue;
        }
        let d = tk - roots[i];
        let den = params.phi(d + eta);
        if den.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(den.norm()));
        }
        f *= params.phi(d - eta) / den;
    }
    Ok(f)
}

/// Largest Bethe-equation defect `max_i |a(t_i) - f(t_i)|`.
pub fn bae_residual(params: &ModelParams, roots: &[Complex64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..roots.len() {
        let g = vacuum_eigenvalue(params, roots[i])? - magnon_interaction(params, roots, i)?;
        worst = worst.max(g.norm());
    }
    Ok(worst)
}

/// Newton iteration for the Bethe equations `a(t_i) = f(t_i)` from explicit
/// seeds. Converges quadratically near a solution; errors on stagnation,
/// root collision, or a pole crossing during the iteration.
pub fn solve_bae(
    params: &ModelParams,
    seeds: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> Result<BetheRoots> {
    let m = seeds.len();
    if m == 0 || m > params.n_sites() {
        return Err(Error::DimensionMismatch {
            left: m,
            right: params.n_sites(),
        });
    }
    let (centroid, bound) = root_region(params, m);
    let mut t: Vec<Complex64> = seeds.to_vec();
    for iteration in 0..max_iter {
        if t.iter().any(|z| (z - centroid).norm() > bound) {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: f64::INFINITY,
            });
        }
        let (g, jac) = bae_system(params, &t)?;
        let residual = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual < tol {
            return BetheRoots::new(params.clone(), t);
        }
        let delta = linalg::solve(jac, -g, "Bethe Newton step")?;
        for i in 0..m {
            t[i] += delta[i];
        }
        let sep = min_separation(&t);
        if m > 1 && sep < ROOT_SEPARATION {
            return Err(Error::RootCollision(sep));
        }
    }
    let residual = bae_residual(params, &t)?;
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Center and radius of the disk that can hold finite Bethe roots. Far
/// outside the inhomogeneity cloud both sides of the Bethe equations flatten
/// toward 1, so the raw residual passes any tolerance at spurious runaway
/// points; those points correspond to roots at infinity (descendant states)
/// and are rejected rather than returned.
fn root_region(params: &ModelParams, magnons: usize) -> (Complex64, f64) {
    let centroid = params.xi().iter().sum::<Complex64>() / params.n_sites() as f64;
    let xi_spread = params
        .xi()
        .iter()
        .map(|x| (x - centroid).norm())
        .fold(0.0, f64::max);
    let bound = 10.0 * (xi_spread + params.eta().norm() * (magnons as f64 + 2.0) + 1.0);
    (centroid, bound)
}

/// Residual vector `G_i = a(t_i) - f(t_i)` and its analytic Jacobian.
fn bae_system(
    params: &ModelParams,
    t: &[Complex64],
) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> {
    let m = t.len();
    let eta = params.eta();
    let mut g = DVector::from_element(m, Complex64::ZERO);
    let mut jac = DMatrix::from_element(m, m, Complex64::ZERO);
    for i in 0..m {
        let a = vacuum_eigenvalue(params, t[i])?;
        let f = magnon_interaction(params, t, i)?;
        g[i] = a - f;
        // d/dt log a(t) = sum_k [ -phi'(xi_k - t)/phi(xi_k - t)
        //                         + phi'(xi_k - t + eta)/phi(xi_k - t + eta) ]
        let mut dlog_a = Complex64::ZERO;
        for &xi in params.xi() {
            dlog_a +=
                -log_derivative(params, xi - t[i])? + log_derivative(params, xi - t[i] + eta)?;
        }
        jac[(i, i)] = a * dlog_a;
        // f_i depends on each difference d = t_k - t_i through
        // log f_i = sum_k [log phi(d - eta) - log phi(d + eta)].
        for k in 0..m {
            if k == i {
                continue;
            }
            let d = t[k] - t[i];
            let dlog_f = log_derivative(params, d - eta)? - log_derivative(params, d + eta)?;
            jac[(i, i)] += f * dlog_f;
            jac[(i, k)] = -f * dlog_f;
        }
    }
    Ok((g, jac))
}

/// phi'(z) / phi(z), guarding the zero of phi.
fn log_derivative(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    let val = params.phi(z);
    if val.norm() < POLE_GUARD {
        return Err(Error::PoleProximity(val.norm()));
    }
    let derivative = match params.variant() {
        Variant::Rational => Complex64::ONE,
        Variant::Trigonometric => z.cosh(),
    };
    Ok(derivative / val)
}

/// Multi-start wrapper: seeds at the inhomogeneity centroid, spread by eta,
/// with deterministic jitter drawn from the given seed. Retries with larger
/// jitter until a solution converges; on rational chains an exhausted budget
/// falls through to the spectral search, which does not depend on basins.
pub fn solve_bae_multistart(
    params: &ModelParams,
    magnons: usize,
    seed: u64,
    attempts: usize,
    max_iter: usize,
    tol: f64,
) -> Result<BetheRoots> {
    let mut last = Error::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    };
    let mut sampler = crate::sampling::ParameterSampler::substream(seed, 0xBAE);
    for attempt in 0..attempts.max(1) {
        let frac = attempt as f64 / attempts.max(1) as f64;
        let seeds = newton_seeds(params, magnons, &mut sampler, attempt, frac);
        match solve_bae(params, &seeds, max_iter, tol) {
            Ok(roots) => return Ok(roots),
            Err(e) => last = e,
        }
    }
    if params.variant() == Variant::Rational {
        if let Ok(mut all) = all_bethe_roots(params, magnons, seed, max_iter, tol) {
            if !all.is_empty() {
                return Ok(all.remove(0));
            }
        }
    }
    Err(last)
}

/// Seed layout for one Newton start: an eta-spaced ladder around a center,
/// plus jitter that widens with `frac`. The center alternates between the
/// inhomogeneity centroid and individual sites; single-magnon roots in
/// particular cluster near the sites rather than the centroid.
fn newton_seeds(
    params: &ModelParams,
    magnons: usize,
    sampler: &mut crate::sampling::ParameterSampler,
    attempt: usize,
    frac: f64,
) -> Vec<Complex64> {
    let centroid = params.xi().iter().sum::<Complex64>() / params.n_sites() as f64;
    let xi_spread = params
        .xi()
        .iter()
        .map(|x| (x - centroid).norm())
        .fold(0.0, f64::max);
    let scale = xi_spread + params.eta().norm() * (0.5 * magnons as f64 + 1.0);
    let spread = scale * (0.08 + 1.4 * frac);
    let center = if attempt % 3 == 2 {
        params.xi()[sampler.random_u64() as usize % params.n_sites()]
    } else {
        centroid
    };
    (0..magnons)
        .map(|k| {
            center
                + params.eta() * (k as f64 - (magnons as f64 - 1.0) / 2.0)
                + sampler.jitter(spread)
        })
        .collect()
}

/// Collect `count` pairwise-distinct root sets. Rational chains enumerate the
/// whole sector through [`all_bethe_roots`] and keep the first `count` sets
/// in their deterministic order; trigonometric chains fall back to seeded
/// Newton exploration, which may miss solutions whose basins are thin.
pub fn distinct_bae_solutions(
    params: &ModelParams,
    magnons: usize,
    count: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Vec<BetheRoots>> {
    let mut found = match params.variant() {
        Variant::Rational => all_bethe_roots(params, magnons, seed, max_iter, tol)?,
        Variant::Trigonometric => {
            searched_bae_solutions(params, magnons, count, seed, max_iter, tol)
        }
    };
    if found.len() < count {
        return Err(Error::NoConvergence {
            iterations: found.len(),
            residual: f64::NAN,
        });
    }
    found.truncate(count);
    Ok(found)
}

fn searched_bae_solutions(
    params: &ModelParams,
    magnons: usize,
    count: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Vec<BetheRoots> {
    let mut sampler = crate::sampling::ParameterSampler::substream(seed, 0xD157);
    let mut found: Vec<BetheRoots> = Vec::new();
    let budget = 200 * count;
    for attempt in 0..budget {
        let frac = (attempt % 41) as f64 / 40.0;
        let seeds = newton_seeds(params, magnons, &mut sampler, attempt, frac);
        if let Ok(roots) = solve_bae(params, &seeds, max_iter, tol) {
            let fresh = found
                .iter()
                .all(|r| root_set_distance(r.roots(), roots.roots()) > ROOT_SEPARATION);
            if fresh {
                found.push(roots);
                if found.len() == count {
                    break;
                }
            }
        }
    }
    found
}

/// Cap on the magnon-sector dimension `C(n_sites, magnons)` accepted by the
/// spectral root search.
pub const SECTOR_DIM_CAP: usize = 1024;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: usize = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Basis masks of the fixed-magnon sector, in ascending order.
pub fn sector_basis(n_sites: usize, magnons: usize) -> Vec<usize> {
    (0usize..1 << n_sites)
        .filter(|m| m.count_ones() as usize == magnons)
        .collect()
}

/// The transfer matrix `A(t) + D(t)` restricted to one magnon sector. The
/// transfer matrix conserves the magnon number, so the restriction is exact.
pub fn transfer_sector_matrix(
    params: &ModelParams,
    t: Complex64,
    magnons: usize,
) -> Result<DMatrix<Complex64>> {
    check_brute_force_size(params)?;
    let n = params.n_sites();
    if magnons > n {
        return Err(Error::DimensionMismatch {
            left: magnons,
            right: n,
        });
    }
    let basis = sector_basis(n, magnons);
    let dim = basis.len();
    let mut out = DMatrix::zeros(dim, dim);
    for (col, &mask) in basis.iter().enumerate() {
        let unit = StateVector::basis_state(n, mask)?;
        let image = transfer_apply(params, t, &unit)?;
        for (row, &row_mask) in basis.iter().enumerate() {
            out[(row, col)] = image.amp(row_mask);
        }
    }
    Ok(out)
}

/// Eigenvector of an upper-triangular matrix for the eigenvalue on diagonal
/// position `k`, by back substitution. Denominators from (numerically)
/// repeated eigenvalues are floored at a small multiple of the matrix scale,
/// the usual safeguard for triangular eigenvector extraction.
fn triangular_eigenvector(t: &DMatrix<Complex64>, k: usize) -> DVector<Complex64> {
    let dim = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let guard = f64::EPSILON * scale;
    let mut y = DVector::zeros(dim);
    y[k] = Complex64::ONE;
    for i in (0..k).rev() {
        let mut s = Complex64::ZERO;
        for j in i + 1..=k {
            s += t[(i, j)] * y[j];
        }
        let mut denom = t[(i, i)] - t[(k, k)];
        if denom.norm() < guard {
            denom = Complex64::new(guard, 0.0);
        }
        y[i] = -s / denom;
    }
    let norm = y.norm();
    if norm > 0.0 {
        y.unscale_mut(norm);
    }
    y
}

/// Roots of the monic polynomial `u^m + c[m-1] u^(m-1) + ... + c[0]` through
/// the companion matrix.
fn monic_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = coeffs.len();
    if m == 0 {
        return Some(Vec::new());
    }
    if m == 1 {
        return Some(vec![-coeffs[0]]);
    }
    let mut companion = DMatrix::zeros(m, m);
    for i in 1..m {
        companion[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..m {
        companion[(i, m - 1)] = -coeffs[i];
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)?;
    let values = schur.eigenvalues()?;
    Some(values.iter().copied().collect())
}

/// Bethe roots carried by one eigenvector of the sector transfer matrix.
///
/// The eigenvalue function is read off the eigenvector at the sample points,
/// then the Baxter relation
/// `Lambda(u) Q(u) = a(u) Q(u - eta) + Q(u + eta)`
/// with monic `Q(u) = prod (u - t_k)` becomes a square linear system for the
/// remaining coefficients of `Q` once each sample equation is divided by
/// `prod_b phi(xi_b - u + eta)`. Companion roots of `Q` seed a Newton polish.
/// `None` means the state carries no finite root set at this tolerance; spin
/// multiplet descendants, whose roots sit at infinity, always land here.
#[allow(clippy::too_many_arguments)]
fn eigenvector_roots(
    params: &ModelParams,
    magnons: usize,
    basis: &[usize],
    vec_sector: &DVector<Complex64>,
    samples: &[Complex64],
    a_values: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> Option<BetheRoots> {
    let eta = params.eta();
    let mut full = StateVector::zero(params.n_sites()).ok()?;
    for (i, &mask) in basis.iter().enumerate() {
        full.amplitudes_mut()[mask] = vec_sector[i];
    }
    let mut order: Vec<usize> = (0..vec_sector.len()).collect();
    order.sort_by(|&i, &j| {
        vec_sector[j]
            .norm()
            .partial_cmp(&vec_sector[i].norm())
            .unwrap()
    });
    let lead = order[0];
    let mut lambdas = Vec::with_capacity(samples.len());
    for &u in samples {
        let image = transfer_apply(params, u, &full).ok()?;
        let ratio = image.amp(basis[lead]) / vec_sector[lead];
        if let Some(&witness) = order.get(1).filter(|&&j| vec_sector[j].norm() > 1e-10) {
            let check = image.amp(basis[witness]) / vec_sector[witness];
            if (ratio - check).norm() > 1e-6 * (ratio.norm() + check.norm() + 1.0) {
                return None;
            }
        }
        lambdas.push(ratio);
    }
    let term = |s: usize, j: i32| {
        lambdas[s] * samples[s].powi(j)
            - a_values[s] * (samples[s] - eta).powi(j)
            - (samples[s] + eta).powi(j)
    };
    let system = linalg::matrix_from_fn(magnons, magnons, |s, j| term(s, j as i32));
    let rhs = DVector::from_fn(magnons, |s, _| -term(s, magnons as i32));
    let coeffs = linalg::solve(system, rhs, "Baxter polynomial").ok()?;
    let candidates = monic_roots(coeffs.as_slice())?;
    solve_bae(params, &candidates, max_iter, tol).ok()
}

/// Every finite Bethe root set of a magnon sector, via the transfer spectrum.
///
/// Transfer matrices at different spectral parameters commute, so the sector
/// matrix is diagonalized once at a generic point and each eigenvector is
/// converted to its root set with [`eigenvector_roots`]. The rational weights
/// leave the global spin rotations intact for any inhomogeneities, so the
/// sector splits into multiplets: only the `C(N, M) - C(N, M-1)` highest
/// states of sector `M` carry finite roots, and the descendants drop out
/// here. Root sets whose equations cannot be satisfied to `tol` in double
/// precision (roots pinned near a pole of the vacuum eigenvalue) drop out as
/// well. The result is sorted by the root multiset, so the order is
/// reproducible. Rational chains only.
pub fn all_bethe_roots(
    params: &ModelParams,
    magnons: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Vec<BetheRoots>> {
    if params.variant() != Variant::Rational {
        return Err(Error::InvalidArgument(
            "the spectral Bethe root search supports rational chains only".into(),
        ));
    }
    check_brute_force_size(params)?;
    let n = params.n_sites();
    if magnons > n {
        return Err(Error::DimensionMismatch {
            left: magnons,
            right: n,
        });
    }
    if magnons == 0 {
        return Ok(vec![BetheRoots::new(params.clone(), Vec::new())?]);
    }
    let dim = binomial(n, magnons);
    if dim > SECTOR_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "transfer sector dimension",
            value: dim,
            cap: SECTOR_DIM_CAP,
        });
    }
    let mut sampler = crate::sampling::ParameterSampler::substream(seed, 0x5BEC);
    let points =
        sampler.separated_points(magnons + 1, params.xi(), params.variant(), params.eta())?;
    let pivot = points[0];
    let samples = &points[1..];
    let a_values = samples
        .iter()
        .map(|&u| vacuum_eigenvalue(params, u))
        .collect::<Result<Vec<_>>>()?;
    let basis = sector_basis(n, magnons);
    let matrix = transfer_sector_matrix(params, pivot, magnons)?;
    let schur = nalgebra::linalg::Schur::try_new(matrix, f64::EPSILON, 10_000).ok_or(
        Error::NoConvergence {
            iterations: 10_000,
            residual: f64::NAN,
        },
    )?;
    let (q_unitary, t_upper) = schur.unpack();
    let mut found: Vec<BetheRoots> = Vec::new();
    for k in 0..dim {
        let vec_sector = &q_unitary * triangular_eigenvector(&t_upper, k);
        let Some(roots) = eigenvector_roots(
            params,
            magnons,
            &basis,
            &vec_sector,
            samples,
            &a_values,
            max_iter,
            tol,
        ) else {
            continue;
        };
        if found
            .iter()
            .all(|r| root_set_distance(r.roots(), roots.roots()) > ROOT_SEPARATION)
        {
            found.push(roots);
        }
    }
    found.sort_by(|x, y| {
        root_multiset_key(x.roots())
            .partial_cmp(&root_multiset_key(y.roots()))
            .unwrap()
    });
    Ok(found)
}

fn root_multiset_key(roots: &[Complex64]) -> Vec<(f64, f64)> {
    let mut key: Vec<(f64, f64)> = roots.iter().map(|z| (z.re, z.im)).collect();
    key.sort_by(|a, b| a.partial_cmp(b).unwrap());
    key
}

/// Distance between two root sets as sorted multisets.
pub fn root_set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let key = |z: &Complex64| (z.re, z.im);
    a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Relative defect of the Bethe state as a transfer-matrix eigenstate:
/// `|| (A + D)(t_probe) psi - Lambda(t_probe) psi || / || psi ||`.
pub fn check_eigenstate(roots: &BetheRoots, t_probe: Complex64) -> Result<f64> {
    let params = roots.params();
    check_brute_force_size(params)?;
    let psi = bethe_state(params, roots.roots())?;
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let lambda = transfer_eigenvalue(params, t_probe, roots.roots())?;
    let mut defect = transfer_apply(params, t_probe, &psi)?;
    defect.add_scaled(-lambda, &psi)?;
    Ok(defect.norm() / norm)
}

/// Bilinear norm `<0| C(t_1)...C(t_M) B(t_1)...B(t_M) |0>` by brute force.
pub fn brute_force_norm(roots: &BetheRoots) -> Result<Complex64> {
    brute_force_scalar_product(roots.params(), roots.roots(), roots.roots())
}
