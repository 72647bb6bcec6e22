//! The factorizing operator and the F-basis operators it conjugates into
//! existence.
//!
//! For a chain with pairwise exchange matrices, define per-site chains
//! `T_n = S_{n+1,n}(xi_{n+1}, xi_n) ... S_{N,n}(xi_N, xi_n)` (the factor with
//! the largest site index acts first; `T_N` is the identity). The factorizing
//! operator is the product `F_1 F_2 ... F_N` with
//! `F_i = (1 - n_i) + T_i n_i`, applied from site N down to site 1. On a
//! basis state it reproduces the chain product `T_{n_1} ... T_{n_M}` over the
//! occupied sites, which turns occupation states into transfer-matrix
//! eigenvector building blocks.
//!
//! The companion operator built from C-strings reads matrix elements off the
//! vacuum component; composed with the factorizing operator it is diagonal,
//! which gives the inverse as `(diagonal)^-1 (companion)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{apply_entry, ModelParams, OperatorLabel, POLE_GUARD};
use crate::tensor::{apply_number_projection, StateVector, TwoSiteSMatrix};

/// Ordered product of two-site exchange matrices anchored at one site.
#[derive(Debug, Clone)]
pub struct SiteOperatorChain {
    site: usize,
    /// Factors in written order; application walks them right to left.
    factors: Vec<(usize, TwoSiteSMatrix)>,
}

impl SiteOperatorChain {
    pub fn site(&self) -> usize {
        self.site
    }

    /// Partner sites of the factors, in written order.
    pub fn factor_sites(&self) -> Vec<usize> {
        self.factors.iter().map(|(j, _)| *j).collect()
    }

    /// The same chain with the factor touching site `j` removed.
    pub fn without_factor(&self, j: usize) -> Self {
        Self {
            site: self.site,
            factors: self
                .factors
                .iter()
                .filter(|(site, _)| *site != j)
                .cloned()
                .collect(),
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        for (j, s) in self.factors.iter().rev() {
            out = s.apply(&out, *j, self.site)?;
        }
        Ok(out)
    }
}

/// The chain `T_n` for the natural site order `1..=N`.
pub fn t_chain(params: &ModelParams, n: usize) -> Result<SiteOperatorChain> {
    let order: Vec<usize> = (1..=params.n_sites()).collect();
    t_chain_ordered(params, &order, n)
}

/// The chain for the site at position `pos` (1-based) of an arbitrary site
/// order: factors pair it with every later site in the order.
fn t_chain_ordered(params: &ModelParams, order: &[usize], pos: usize) -> Result<SiteOperatorChain> {
    let site = order[pos - 1];
    let xi = params.xi();
    let mut factors = Vec::with_capacity(order.len() - pos);
    for &other in &order[pos..] {
        factors.push((other, params.s_matrix(xi[other - 1], xi[site - 1])?));
    }
    Ok(SiteOperatorChain { site, factors })
}

fn check_site_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            left: order.len(),
            right: n,
        });
    }
    let mut seen = vec![false; n + 1];
    for &site in order {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n_sites: n });
        }
        if seen[site] {
            return Err(Error::InvalidArgument(format!(
                "site order visits site {site} twice"
            )));
        }
        seen[site] = true;
    }
    Ok(())
}

/// The factorizing operator for one chain, with its diagonal cached.
#[derive(Debug)]
pub struct FactorizingOperator {
    params: ModelParams,
    f_cache: OnceLock<Vec<Complex64>>,
}

impl FactorizingOperator {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            f_cache: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Apply the factorizing operator.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let order: Vec<usize> = (1..=self.params.n_sites()).collect();
        self.apply_with_order(&order, state)
    }

    /// Apply the factorizing operator built on an arbitrary site order: the
    /// chains pair each site with the sites after it in `order`, and the
    /// site factors are applied from the back of `order` to the front.
    ///
    /// For the natural order this is the plain operator; for the order with
    /// two adjacent sites swapped it is the right-hand factor of the
    /// exchange identity tested by `check_factorization`.
    pub fn apply_with_order(&self, order: &[usize], state: &StateVector) -> Result<StateVector> {
        let n = self.params.n_sites();
        check_site_order(order, n)?;
        if state.n_sites() != n {
            return Err(Error::DimensionMismatch {
                left: state.n_sites(),
                right: n,
            });
        }
        let mut out = state.clone();
        for pos in (1..=n).rev() {
            let site = order[pos - 1];
            let empty = apply_number_projection(&out, site, false)?;
            let occupied = apply_number_projection(&out, site, true)?;
            let chain = t_chain_ordered(&self.params, order, pos)?;
            out = chain.apply(&occupied)?;
            out.add_scaled(Complex64::ONE, &empty)?;
        }
        Ok(out)
    }

    /// Apply the companion operator: component `m` of the result is the
    /// vacuum component of `C(xi_{m_1}) ... C(xi_{m_k})` applied to the
    /// input, over all occupation patterns `m`.
    pub fn apply_companion(&self, state: &StateVector) -> Result<StateVector> {
        let n = self.params.n_sites();
        if state.n_sites() != n {
            return Err(Error::DimensionMismatch {
                left: state.n_sites(),
                right: n,
            });
        }
        let mut out = StateVector::zero(n)?;
        self.companion_walk(state, 1, 0, &mut out)?;
        Ok(out)
    }

    fn companion_walk(
        &self,
        current: &StateVector,
        next_site: usize,
        mask: usize,
        out: &mut StateVector,
    ) -> Result<()> {
        out.amplitudes_mut()[mask] = current.amp(0);
        if current.norm() == 0.0 {
            // C-strings only remove particles; a zero branch stays zero.
            return Ok(());
        }
        for site in next_site..=self.params.n_sites() {
            let xi = self.params.xi()[site - 1];
            let lowered = apply_entry(&self.params, OperatorLabel::C, xi, current)?;
            self.companion_walk(&lowered, site + 1, mask | (1 << (site - 1)), out)?;
        }
        Ok(())
    }

    /// Apply the inverse: the companion operator followed by division by the
    /// diagonal. Requires pairwise distinct inhomogeneities.
    pub fn apply_inverse(&self, state: &StateVector) -> Result<StateVector> {
        let diag = self.full_diagonal()?;
        let mut out = self.apply_companion(state)?;
        for (mask, amp) in out.amplitudes_mut().iter_mut().enumerate() {
            *amp /= diag[mask];
        }
        Ok(out)
    }

    /// Diagonal value on one occupation pattern:
    /// `f(m) = prod_{k in m} prod_{a not in m} c(xi_a - xi_k)`.
    pub fn diagonal_f(&self, mask: usize) -> Result<Complex64> {
        let n = self.params.n_sites();
        if mask >= 1 << n {
            return Err(Error::IndexOutOfRange {
                index: mask,
                n_sites: n,
            });
        }
        Ok(self.full_diagonal()?[mask])
    }

    fn full_diagonal(&self) -> Result<&[Complex64]> {
        let n = self.params.n_sites();
        let xi = self.params.xi();
        // Both the separation and the shifted denominators must clear the
        // guard before the infallible cache fill below.
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = xi[i] - xi[j];
                if self.params.phi(d).norm() < POLE_GUARD {
                    return Err(Error::HomogeneousChain("factorizing-operator diagonal"));
                }
                if self.params.phi(d + self.params.eta()).norm() < POLE_GUARD {
                    return Err(Error::PoleProximity(
                        self.params.phi(d + self.params.eta()).norm(),
                    ));
                }
            }
        }
        Ok(self.f_cache.get_or_init(|| {
            let eta = self.params.eta();
            let mut table = vec![Complex64::ONE; n * n];
            for a in 0..n {
                for k in 0..n {
                    if a != k {
                        let d = xi[a] - xi[k];
                        table[a * n + k] = self.params.phi(d) / self.params.phi(d + eta);
                    }
                }
            }
            (0..1usize << n)
                .map(|mask| {
                    let mut f = Complex64::ONE;
                    for k in 0..n {
                        if mask & (1 << k) != 0 {
                            for a in 0..n {
                                if mask & (1 << a) == 0 {
                                    f *= table[a * n + k];
                                }
                            }
                        }
                    }
                    f
                })
                .collect()
        }))
    }
}

/// Which F-basis operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FBasisKind {
    /// Creation: adds one particle.
    B,
    /// Annihilation: removes one particle.
    C,
}

/// Apply an F-basis operator at spectral parameter `t`.
///
/// Creation puts a particle at each empty site `x` with amplitude
/// `b(xi_x - t) * prod c(xi_a - t) / c(xi_a - xi_x)` over the other empty
/// sites `a` (occupied sites contribute 1). Annihilation removes the
/// particle at each occupied `x` with amplitude `b(xi_x - t)` times
/// `c(xi_a - t)` per empty site and `1 / c(xi_x - xi_a)` per other occupied
/// site. Requires pairwise distinct inhomogeneities.
pub fn f_basis_apply(
    params: &ModelParams,
    kind: FBasisKind,
    t: Complex64,
    state: &StateVector,
) -> Result<StateVector> {
    let n = params.n_sites();
    if state.n_sites() != n {
        return Err(Error::DimensionMismatch {
            left: state.n_sites(),
            right: n,
        });
    }
    params.require_distinct_xi("F-basis operators")?;
    let xi = params.xi();
    let mut out = StateVector::zero(n)?;
    for (mask, &amp) in state.amplitudes().iter().enumerate() {
        if amp == Complex64::ZERO {
            continue;
        }
        for x in 0..n {
            let x_bit = 1usize << x;
            let x_occupied = mask & x_bit != 0;
            match kind {
                FBasisKind::B if !x_occupied => {
                    let mut w = params.weight_b(xi[x] - t)?;
                    for a in 0..n {
                        if a != x && mask & (1 << a) == 0 {
                            w *= params.weight_c(xi[a] - t)?;
                            let den = params.weight_c(xi[a] - xi[x])?;
                            if den.norm() < POLE_GUARD {
                                return Err(Error::PoleProximity(den.norm()));
                            }
                            w /= den;
                        }
                    }
                    out.amplitudes_mut()[mask | x_bit] += amp * w;
                }
                FBasisKind::C if x_occupied => {
                    let mut w = params.weight_b(xi[x] - t)?;
                    for a in 0..n {
                        if a == x {
                            continue;
                        }
                        if mask & (1 << a) == 0 {
                            w *= params.weight_c(xi[a] - t)?;
                        } else {
                            let den = params.weight_c(xi[x] - xi[a])?;
                            if den.norm() < POLE_GUARD {
                                return Err(Error::PoleProximity(den.norm()));
                            }
                            w /= den;
                        }
                    }
                    out.amplitudes_mut()[mask & !x_bit] += amp * w;
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Defect of the adjacent-exchange identity: the factorizing operator equals
/// `S_{i+1,i}(xi_{i+1}, xi_i)` composed with the operator built on the order
/// with sites `i` and `i+1` swapped. Returns the largest relative defect over
/// `n_states` random states.
pub fn check_factorization(
    params: &ModelParams,
    i: usize,
    n_states: usize,
    seed: u64,
) -> Result<f64> {
    let n = params.n_sites();
    if i == 0 || i + 1 > n {
        return Err(Error::SiteOutOfRange {
            site: i + 1,
            n_sites: n,
        });
    }
    let op = FactorizingOperator::new(params.clone());
    let mut order: Vec<usize> = (1..=n).collect();
    order.swap(i - 1, i);
    let s = params.s_matrix(params.xi()[i], params.xi()[i - 1])?;
    let mut sampler = crate::sampling::ParameterSampler::substream(seed, 0xFAC);
    let mut worst: f64 = 0.0;
    for _ in 0..n_states.max(1) {
        let v = sampler.random_state(n)?;
        let direct = op.apply(&v)?;
        let swapped = op.apply_with_order(&order, &v)?;
        let dressed = s.apply(&swapped, i + 1, i)?;
        worst = worst.max(direct.max_abs_diff(&dressed)? / v.norm());
    }
    Ok(worst)
}
