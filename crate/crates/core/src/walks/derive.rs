//! Derivation of the de-biasing polynomials `g(t)` and the diffusion bias
//! coefficients `b_T(t, δ)` from walk counts.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::enumerate::{count_path_walks_unchecked, WALK_LENGTH_CAP};
use crate::error::{Error, Result};

/// Longest mixed product a derivation may expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_walk_length: usize,
}

impl Budget {
    /// Enough for `g(t)`, `t ≤ 10`, and `b_T`, `T ≤ 5`.
    pub const DEFAULT: Budget = Budget { max_walk_length: 10 };
    /// Enough for `g(t)`, `t ≤ 14`, and `b_T`, `T ≤ 7`.
    pub const EXTENDED: Budget = Budget { max_walk_length: WALK_LENGTH_CAP };

    pub fn max_horizon(&self) -> usize {
        self.max_walk_length / 2
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Which even mixed products enter `b_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasConvention {
    /// Reproduces the published coefficient tables: for `t ≥ 3`, products whose
    /// difference factor opens with a single ξ followed by A are left out.
    #[default]
    Tabulated,
    /// Every even product with at least one ξ in the difference factor.
    FullExpansion,
}

/// A word over `{A, ξ}` describing one term of an expanded matrix product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedProductSignature {
    /// `true` marks a ξ factor.
    pub pattern: Vec<bool>,
    /// Lengths of the maximal runs of ξ, left to right.
    pub blocks: Vec<usize>,
    pub tau: usize,
}

impl MixedProductSignature {
    /// Bit `i` of `mask` is slot `i`, counted from the left.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        let pattern: Vec<bool> = (0..len).map(|i| mask >> i & 1 == 1).collect();
        let mut blocks = Vec::new();
        let mut run = 0;
        for &x in &pattern {
            if x {
                run += 1;
            } else if run > 0 {
                blocks.push(run);
                run = 0;
            }
        }
        if run > 0 {
            blocks.push(run);
        }
        let tau = blocks.iter().sum();
        Self { pattern, blocks, tau }
    }

    pub fn order(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_even(&self) -> bool {
        self.blocks.iter().all(|p| p % 2 == 0)
    }
}

/// `g(t) = Σ_r g_r(t) ι′Âʳι`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPolynomial {
    pub t: usize,
    pub coeffs: BTreeMap<usize, BigInt>,
}

impl GPolynomial {
    pub fn coeff(&self, r: usize) -> BigInt {
        self.coeffs.get(&r).cloned().unwrap_or_default()
    }

    /// Evaluates with `walk_totals[r - 1] = ι′Âʳι`.
    pub fn evaluate(&self, walk_totals: &[f64]) -> f64 {
        self.coeffs.iter().map(|(&r, c)| c.to_f64().unwrap_or(f64::NAN) * walk_totals[r - 1]).sum()
    }
}

/// `b_T(t, δ) = Σ_k c(t, k) δᵏ`, keyed by `(t, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasPolynomial {
    pub horizon: usize,
    pub coeffs: BTreeMap<(usize, usize), BigInt>,
}

impl BiasPolynomial {
    pub fn coeff(&self, t: usize, k: usize) -> BigInt {
        self.coeffs.get(&(t, k)).cloned().unwrap_or_default()
    }

    /// `b_T(t, δ)` as a number.
    pub fn at(&self, t: usize, delta: f64) -> f64 {
        self.coeffs
            .iter()
            .filter(|((tt, _), _)| *tt == t)
            .map(|(&(_, k), c)| c.to_f64().unwrap_or(f64::NAN) * delta.powi(k as i32))
            .sum()
    }

    /// `Σ_t b_T(t, δ) ι′Âᵗι` with `walk_totals[t - 1] = ι′Âᵗι`.
    pub fn evaluate(&self, delta: f64, walk_totals: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(t, k), c)| c.to_f64().unwrap_or(f64::NAN) * delta.powi(k as i32) * walk_totals[t - 1])
            .sum()
    }
}

fn walk_counts(t: usize) -> BTreeMap<usize, u64> {
    static MEMO: OnceLock<Mutex<BTreeMap<usize, BTreeMap<usize, u64>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(c) = memo.lock().unwrap().get(&t) {
        return c.clone();
    }
    let c = count_path_walks_unchecked(t);
    memo.lock().unwrap().insert(t, c.clone());
    c
}

/// Adds the A-power expansion of an even signature into `acc`: the product
/// `A^(L−τ) · Π_j Σ_s γ̃_s(p_j) Aˢ`, exponents summed.
fn accumulate_signature(sig: &MixedProductSignature, acc: &mut BTreeMap<usize, BigInt>) {
    let mut poly: BTreeMap<usize, BigInt> = BTreeMap::from([(sig.order() - sig.tau, BigInt::from(1))]);
    for &p in &sig.blocks {
        let counts = walk_counts(p);
        let mut next = BTreeMap::new();
        for (e, c) in &poly {
            for (s, k) in &counts {
                *next.entry(e + s).or_insert_with(BigInt::zero) += c * BigInt::from(*k);
            }
        }
        poly = next;
    }
    for (e, c) in poly {
        *acc.entry(e).or_insert_with(BigInt::zero) += c;
    }
}

fn g_memo() -> &'static Mutex<BTreeMap<usize, GPolynomial>> {
    static MEMO: OnceLock<Mutex<BTreeMap<usize, GPolynomial>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `g(t)`: the polynomial in `ι′Âʳι` whose expectation matches `ι′Aᵗι` up to
/// lower-order terms, obtained by subtracting from `Âᵗ` every even mixed
/// product of order `t` and replacing each resulting `Aᵏ` by `g(k)`.
pub fn derive_g(t: usize, budget: Budget) -> Result<GPolynomial> {
    if t == 0 {
        return Err(Error::InvalidParameter("order must be positive".into()));
    }
    if t > budget.max_walk_length {
        return Err(Error::BudgetExceeded { requested: t, cap: budget.max_walk_length });
    }
    Ok(g_unchecked(t))
}

fn g_unchecked(t: usize) -> GPolynomial {
    if let Some(g) = g_memo().lock().unwrap().get(&t) {
        return g.clone();
    }
    let mut coeffs = BTreeMap::from([(t, BigInt::from(1))]);
    if t > 1 {
        let mut powers = BTreeMap::new();
        for mask in 1..(1u64 << t) {
            let sig = MixedProductSignature::from_mask(mask, t);
            if sig.is_even() {
                accumulate_signature(&sig, &mut powers);
            }
        }
        for (k, c) in powers {
            for (r, gr) in g_unchecked(k).coeffs {
                *coeffs.entry(r).or_insert_with(BigInt::zero) -= &c * gr;
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    let g = GPolynomial { t, coeffs };
    g_memo().lock().unwrap().insert(t, g.clone());
    g
}

/// `b_T`: for every `(s, t) ∈ [1, T]²`, the even mixed products of order
/// `s + t` with at least one ξ among the last `t` slots, expanded through walk
/// counts and `g`, attached to `δ^(s+t)`.
pub fn derive_b(horizon: usize, budget: Budget, convention: BiasConvention) -> Result<BiasPolynomial> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    if horizon > budget.max_horizon() {
        return Err(Error::BudgetExceeded { requested: horizon, cap: budget.max_horizon() });
    }
    let mut coeffs: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    for s in 1..=horizon {
        for t in 1..=horizon {
            let len = s + t;
            let mut powers = BTreeMap::new();
            for mask in 1..(1u64 << len) {
                if mask >> s == 0 {
                    continue;
                }
                if convention == BiasConvention::Tabulated && t >= 3 && mask >> s & 0b11 == 0b01 {
                    continue;
                }
                let sig = MixedProductSignature::from_mask(mask, len);
                if sig.is_even() {
                    accumulate_signature(&sig, &mut powers);
                }
            }
            for (k, c) in powers {
                for (r, gr) in g_unchecked(k).coeffs {
                    *coeffs.entry((r, len)).or_insert_with(BigInt::zero) += &c * gr;
                }
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(BiasPolynomial { horizon, coeffs })
}
