//! Walk-count combinatorics behind the diffusion bias correction.

mod derive;
mod enumerate;
mod tables;

pub use derive::{
    derive_b, derive_g, BiasConvention, BiasPolynomial, Budget, GPolynomial, MixedProductSignature,
};
pub use enumerate::{count_even_path_walks, count_even_path_walks_bruteforce, WalkCountTable, WALK_LENGTH_CAP};

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Largest order covered by the embedded `g` table.
pub const REFERENCE_G_MAX: usize = 20;
/// Largest horizon covered by the embedded `b_T` tables.
pub const REFERENCE_B_MAX: usize = 10;

/// Embedded published `g(t)`, `1 ≤ t ≤ 20`.
pub fn reference_g(t: usize) -> Result<GPolynomial> {
    if !(1..=REFERENCE_G_MAX).contains(&t) {
        return Err(Error::Unsupported(t));
    }
    let coeffs = tables::G_TABLE[t - 1]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i + 1, BigInt::from(c)))
        .collect();
    Ok(GPolynomial { t, coeffs })
}

/// Embedded published `b_T`, `1 ≤ T ≤ 10`.
pub fn reference_b(horizon: usize) -> Result<BiasPolynomial> {
    if !(1..=REFERENCE_B_MAX).contains(&horizon) {
        return Err(Error::Unsupported(horizon));
    }
    let mut coeffs = BTreeMap::new();
    for (ti, row) in tables::B_TABLE[horizon - 1].iter().enumerate() {
        for (ki, &c) in row.iter().enumerate() {
            if c != 0 {
                coeffs.insert((ti + 1, ki + 2), BigInt::from(c));
            }
        }
    }
    Ok(BiasPolynomial { horizon, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_lookups() {
        assert_eq!(reference_b(5).unwrap().coeff(9, 10), BigInt::from(4));
        assert_eq!(reference_b(6).unwrap().coeff(1, 12), BigInt::from(15981));
        assert_eq!(reference_b(10).unwrap().coeff(19, 20), BigInt::from(9));
        assert_eq!(reference_g(13).unwrap().coeff(1), BigInt::from(186702));
        assert_eq!(reference_g(20).unwrap().coeff(20), BigInt::from(1));
        assert_eq!(reference_g(7).unwrap().coeff(3), BigInt::from(10));
        assert_eq!(reference_b(11), Err(Error::Unsupported(11)));
        assert_eq!(reference_b(0), Err(Error::Unsupported(0)));
        assert_eq!(reference_g(21), Err(Error::Unsupported(21)));
    }

    #[test]
    fn reference_shapes() {
        for t in 1..=REFERENCE_G_MAX {
            let g = reference_g(t).unwrap();
            assert_eq!(g.coeff(t), BigInt::from(1));
            assert!(g.coeffs.keys().all(|&r| r >= 1 && r <= t));
        }
        for h in 1..=REFERENCE_B_MAX {
            let b = reference_b(h).unwrap();
            assert!(b.coeffs.keys().all(|&(t, k)| t < 2 * h && (2..=2 * h).contains(&k) && k > t));
        }
    }
}
