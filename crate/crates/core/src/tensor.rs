//! Dense state vectors over chains of two-state sites and the elementary
//! two-site exchange matrix.
//!
//! Site `k` (1-based) maps to bit `k - 1` of the basis index, so on a
//! three-site chain the index `0b101` carries particles at sites 1 and 3.
//! All pairings are bilinear: no complex conjugation anywhere.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest chain a dense `StateVector` will allocate (2^20 amplitudes).
pub const MAX_SITES: usize = 20;

/// Dense amplitude vector over the `2^n` occupation basis of an `n`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The zero vector on `n_sites` sites.
    pub fn zero(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::ChainTooLarge(n_sites));
        }
        Ok(Self {
            n_sites,
            amps: vec![Complex64::ZERO; 1 << n_sites],
        })
    }

    /// The pseudovacuum: every site empty, unit amplitude on index 0.
    pub fn pseudovacuum(n_sites: usize) -> Result<Self> {
        Self::basis_state(n_sites, 0)
    }

    /// Unit amplitude on one occupation pattern given as a bitmask.
    pub fn basis_state(n_sites: usize, mask: usize) -> Result<Self> {
        let mut v = Self::zero(n_sites)?;
        if mask >= v.amps.len() {
            return Err(Error::IndexOutOfRange {
                index: mask,
                n_sites,
            });
        }
        v.amps[mask] = Complex64::ONE;
        Ok(v)
    }

    /// Unit amplitude on the pattern with the given (1-based) sites occupied.
    pub fn occupation_state(n_sites: usize, sites: &[usize]) -> Result<Self> {
        let mut mask = 0usize;
        for &site in sites {
            mask |= site_bit(site, n_sites)?;
        }
        Self::basis_state(n_sites, mask)
    }

    /// Wrap a raw amplitude vector; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: 0,
            });
        }
        let n_sites = dim.trailing_zeros() as usize;
        if n_sites > MAX_SITES {
            return Err(Error::ChainTooLarge(n_sites));
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude on one occupation pattern.
    pub fn amp(&self, mask: usize) -> Complex64 {
        self.amps[mask]
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiply every amplitude by `z`.
    pub fn scale(&mut self, z: Complex64) {
        for a in &mut self.amps {
            *a *= z;
        }
    }

    /// Add `z * other` into `self`.
    pub fn add_scaled(&mut self, z: Complex64, other: &Self) -> Result<()> {
        check_same_chain(self, other)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += z * b;
        }
        Ok(())
    }

    /// Largest pointwise amplitude difference between two states.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_same_chain(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Number of particles is the same in every nonzero component, if any.
    pub fn particle_sector(&self) -> Option<usize> {
        let mut sector = None;
        for (mask, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                let count = mask.count_ones() as usize;
                match sector {
                    None => sector = Some(count),
                    Some(s) if s != count => return None,
                    _ => {}
                }
            }
        }
        sector
    }
}

fn check_same_chain(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.n_sites != b.n_sites {
        return Err(Error::DimensionMismatch {
            left: a.n_sites,
            right: b.n_sites,
        });
    }
    Ok(())
}

/// Bit for a 1-based site index, validated against the chain length.
pub(crate) fn site_bit(site: usize, n_sites: usize) -> Result<usize> {
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(1 << (site - 1))
}

/// Bilinear pairing `sum_k bra_k * ket_k` (no conjugation).
pub fn inner_product(bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
    check_same_chain(bra, ket)?;
    Ok(bra.amps.iter().zip(&ket.amps).map(|(a, b)| a * b).sum())
}

/// Raise (create a particle) or lower (remove one) at a single site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinFlip {
    Raise,
    Lower,
}

/// Apply a single-site flip; components the flip annihilates drop out.
pub fn apply_spin_flip(state: &StateVector, site: usize, flip: SpinFlip) -> Result<StateVector> {
    let bit = site_bit(site, state.n_sites)?;
    let mut out = StateVector::zero(state.n_sites)?;
    for (mask, &a) in state.amps.iter().enumerate() {
        let occupied = mask & bit != 0;
        match flip {
            SpinFlip::Raise if !occupied => out.amps[mask | bit] = a,
            SpinFlip::Lower if occupied => out.amps[mask & !bit] = a,
            _ => {}
        }
    }
    Ok(out)
}

/// Project onto the sector where `site` is occupied (`occupied = true`)
/// or empty (`occupied = false`); this is the number operator or its complement.
pub fn apply_number_projection(
    state: &StateVector,
    site: usize,
    occupied: bool,
) -> Result<StateVector> {
    let bit = site_bit(site, state.n_sites)?;
    let mut out = state.clone();
    for (mask, a) in out.amps.iter_mut().enumerate() {
        if (mask & bit != 0) != occupied {
            *a = Complex64::ZERO;
        }
    }
    Ok(out)
}

/// Two-site exchange matrix. On the aligned sectors (both sites empty or both
/// occupied) it is the identity; on the mixed pair it acts as
/// `[[c, b], [b, c]]` with `b` the exchange amplitude and `c` the stay
/// amplitude. Both orderings of the site pair give the same operator because
/// the mixed block is symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteSMatrix {
    pub b: Complex64,
    pub c: Complex64,
}

impl TwoSiteSMatrix {
    /// The permutation matrix: pure exchange, `b = 1`, `c = 0`.
    pub fn permutation() -> Self {
        Self {
            b: Complex64::ONE,
            c: Complex64::ZERO,
        }
    }

    /// Apply to sites `(i, j)` of a state.
    pub fn apply(&self, state: &StateVector, site_i: usize, site_j: usize) -> Result<StateVector> {
        if site_i == site_j {
            return Err(Error::CoincidentSites(site_i));
        }
        let bit_i = site_bit(site_i, state.n_sites)?;
        let bit_j = site_bit(site_j, state.n_sites)?;
        let mut out = state.clone();
        self.apply_inplace(&mut out.amps, bit_i, bit_j);
        Ok(out)
    }

    /// In-place application on a raw amplitude slice; `bit_i`, `bit_j` are the
    /// single-bit masks of the two sites.
    pub(crate) fn apply_inplace(&self, amps: &mut [Complex64], bit_i: usize, bit_j: usize) {
        for mask in 0..amps.len() {
            if mask & bit_i != 0 && mask & bit_j == 0 {
                let partner = mask ^ bit_i ^ bit_j;
                let hi = amps[mask];
                let lo = amps[partner];
                amps[mask] = self.c * hi + self.b * lo;
                amps[partner] = self.b * hi + self.c * lo;
            }
        }
    }
}
