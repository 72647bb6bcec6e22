//! Column identity for the Cauchy-like matrix behind the determinant form:
//! mixing the first column with multiples of the others collapses its entries
//! to a closed product form. The mixing coefficients do not depend on the row
//! index, so the operation leaves the determinant unchanged; this is the step
//! that peels one magnon off the determinant form.
//!
//! Everything here is rational-weight algebra on explicit parameter sets.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{det_with_hint, matrix_from_fn};
use crate::model::POLE_GUARD;

fn check_arguments(lambdas: &[Complex64], ts: &[Complex64], eta: Complex64) -> Result<()> {
    if lambdas.len() != ts.len() {
        return Err(Error::DimensionMismatch {
            left: lambdas.len(),
            right: ts.len(),
        });
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument(
            "column reduction needs at least one parameter pair".into(),
        ));
    }
    let mut pool = lambdas.to_vec();
    pool.extend_from_slice(ts);
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            if i == j {
                continue;
            }
            let d = pool[i] - pool[j];
            if d.norm() < POLE_GUARD {
                return Err(Error::CoincidentParameters {
                    context: "column reduction parameter pool",
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

/// `M_ij = 1 / ((t_i - lambda_j)(t_i - lambda_j + eta))`.
pub fn cauchy_like_matrix(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
) -> Result<DMatrix<Complex64>> {
    check_arguments(lambdas, ts, eta)?;
    let m = ts.len();
    Ok(matrix_from_fn(m, m, |i, j| {
        let d = ts[i] - lambdas[j];
        Complex64::ONE / (d * (d + eta))
    }))
}

/// Coefficient multiplying column `x` (0-based, `x >= 1`) when it is folded
/// into the first column. Independent of the row index.
pub fn column_mixing_coefficient(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    x: usize,
) -> Result<Complex64> {
    check_arguments(lambdas, ts, eta)?;
    if x == 0 || x >= lambdas.len() {
        return Err(Error::IndexOutOfRange {
            index: x,
            n_sites: lambdas.len(),
        });
    }
    let mut c = -Complex64::ONE;
    for (beta, &l) in lambdas.iter().enumerate() {
        if beta != 0 && beta != x {
            c *= (lambdas[0] - l) / (lambdas[x] - l);
        }
    }
    for &t in ts {
        c *= (lambdas[x] - t - eta) / (lambdas[0] - t - eta);
    }
    Ok(c)
}

/// First column after the mixing, computed literally:
/// `M_i1 + sum_{x >= 2} C_x M_ix`.
pub fn column_reduction_direct(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
) -> Result<Vec<Complex64>> {
    let matrix = cauchy_like_matrix(lambdas, ts, eta)?;
    let m = ts.len();
    let coefficients: Vec<Complex64> = (1..m)
        .map(|x| column_mixing_coefficient(lambdas, ts, eta, x))
        .collect::<Result<_>>()?;
    Ok((0..m)
        .map(|i| {
            let mut v = matrix[(i, 0)];
            for (x, &c) in coefficients.iter().enumerate() {
                v += c * matrix[(i, x + 1)];
            }
            v
        })
        .collect())
}

/// Closed form of the mixed first column:
/// `1 / ((t_i - lambda_1)(t_i - lambda_1 + eta))
///  * prod_{beta != 1} (lambda_1 - lambda_beta) / (t_i - lambda_beta)
///  * prod_{alpha != i} (t_alpha - t_i + eta) / (t_alpha - lambda_1 + eta)`.
pub fn column_reduction_entry(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    i: usize,
) -> Result<Complex64> {
    check_arguments(lambdas, ts, eta)?;
    if i >= ts.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n_sites: ts.len(),
        });
    }
    let d = ts[i] - lambdas[0];
    let mut v = Complex64::ONE / (d * (d + eta));
    for (beta, &l) in lambdas.iter().enumerate() {
        if beta != 0 {
            v *= (lambdas[0] - l) / (ts[i] - l);
        }
    }
    for (alpha, &t) in ts.iter().enumerate() {
        if alpha != i {
            v *= (t - ts[i] + eta) / (t - lambdas[0] + eta);
        }
    }
    Ok(v)
}

/// Residue bookkeeping for the rational function
/// `G(z) = prod_{alpha != i}(z - t_alpha - eta)
///         / ((z - t_i) prod_beta (z - lambda_beta))`
/// whose residues are, up to one shared normalization, the terms of the
/// column identity. `G` decays like `z^-2`, so the residues sum to zero; the
/// returned value is `|sum| / max |residue|`.
pub fn residue_sum_defect(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
    i: usize,
) -> Result<f64> {
    check_arguments(lambdas, ts, eta)?;
    if i >= ts.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n_sites: ts.len(),
        });
    }
    let numerator = |z: Complex64| {
        let mut n = Complex64::ONE;
        for (alpha, &t) in ts.iter().enumerate() {
            if alpha != i {
                n *= z - t - eta;
            }
        }
        n
    };
    let mut residues = Vec::with_capacity(lambdas.len() + 1);
    for (beta, &l) in lambdas.iter().enumerate() {
        let mut den = l - ts[i];
        for (gamma, &other) in lambdas.iter().enumerate() {
            if gamma != beta {
                den *= l - other;
            }
        }
        residues.push(numerator(l) / den);
    }
    let mut den = Complex64::ONE;
    for &l in lambdas {
        den *= ts[i] - l;
    }
    residues.push(numerator(ts[i]) / den);

    let sum: Complex64 = residues.iter().sum();
    let scale = residues
        .iter()
        .map(|r| r.norm())
        .fold(f64::MIN_POSITIVE, f64::max);
    Ok(sum.norm() / scale)
}

/// Determinant of the Cauchy-like matrix before and after replacing the
/// first column with its closed form, with the relative difference. Mixing
/// in multiples of other columns cannot change a determinant, so the two
/// must agree.
pub fn determinant_invariance(
    lambdas: &[Complex64],
    ts: &[Complex64],
    eta: Complex64,
) -> Result<(Complex64, Complex64, f64)> {
    let base = cauchy_like_matrix(lambdas, ts, eta)?;
    let mut replaced = base.clone();
    for i in 0..ts.len() {
        replaced[(i, 0)] = column_reduction_entry(lambdas, ts, eta, i)?;
    }
    let (det_base, _) = det_with_hint(&base);
    let (det_replaced, _) = det_with_hint(&replaced);
    let scale = det_base.norm().max(det_replaced.norm()).max(1e-300);
    Ok((
        det_base,
        det_replaced,
        (det_base - det_replaced).norm() / scale,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;
    use crate::sampling::ParameterSampler;

    fn sample_sets(seed: u64, m: usize) -> (Vec<Complex64>, Vec<Complex64>, Complex64) {
        let eta = Complex64::new(0.9, 0.15);
        let mut sampler = ParameterSampler::new(seed);
        let pts = sampler
            .separated_points(2 * m, &[], Variant::Rational, eta)
            .unwrap();
        (pts[..m].to_vec(), pts[m..].to_vec(), eta)
    }

    #[test]
    fn closed_form_matches_the_direct_combination() {
        for m in 1..=5usize {
            let (lambdas, ts, eta) = sample_sets(700 + m as u64, m);
            let direct = column_reduction_direct(&lambdas, &ts, eta).unwrap();
            for (i, d) in direct.iter().enumerate() {
                let closed = column_reduction_entry(&lambdas, &ts, eta, i).unwrap();
                assert!(
                    (d - closed).norm() < 1e-12 * closed.norm().max(1e-30),
                    "m={m} i={i}: {d} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn residue_sums_vanish() {
        for m in 1..=5usize {
            let (lambdas, ts, eta) = sample_sets(800 + m as u64, m);
            for i in 0..m {
                let defect = residue_sum_defect(&lambdas, &ts, eta, i).unwrap();
                assert!(defect < 1e-12, "m={m} i={i}: {defect}");
            }
        }
    }

    #[test]
    fn determinant_survives_the_column_replacement() {
        for m in 2..=5usize {
            let (lambdas, ts, eta) = sample_sets(900 + m as u64, m);
            let (_, _, rel) = determinant_invariance(&lambdas, &ts, eta).unwrap();
            assert!(rel < 1e-11, "m={m}: {rel}");
        }
    }

    #[test]
    fn single_pair_reduction_is_the_bare_entry() {
        let (lambdas, ts, eta) = sample_sets(11, 1);
        let direct = column_reduction_direct(&lambdas, &ts, eta).unwrap();
        let d = ts[0] - lambdas[0];
        let bare = Complex64::ONE / (d * (d + eta));
        assert!((direct[0] - bare).norm() < 1e-15 * bare.norm());
        let closed = column_reduction_entry(&lambdas, &ts, eta, 0).unwrap();
        assert!((closed - bare).norm() < 1e-15 * bare.norm());
    }

    #[test]
    fn mixing_coefficients_reject_the_first_column() {
        let (lambdas, ts, eta) = sample_sets(13, 3);
        assert!(column_mixing_coefficient(&lambdas, &ts, eta, 0).is_err());
        assert!(column_mixing_coefficient(&lambdas, &ts, eta, 3).is_err());
    }
}
