//! Scalar types used for probabilities.
//!
//! Risk math is written once against [`Probability`] and instantiated for
//! `f32`, `f64` and exact [`BigRational`] values. The exact instantiation is
//! what the enumeration oracles compare against.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, ToPrimitive, Zero};

/// A scalar that can hold a probability and evaluate binomial masses.
pub trait Probability: Clone + Debug + PartialOrd + Num + FromPrimitive {
    /// `P(X = x)` for `x = 0..=n` with success probability `p`.
    ///
    /// `p` has already been checked to lie in `[0, 1]`.
    fn binomial_pmf(n: u64, p: &Self) -> Vec<Self>;

    /// Lossy view used for display and JSON.
    fn approx_f64(&self) -> f64;

    /// `true` when `0 <= self <= 1`. NaN is rejected.
    fn is_unit_interval(&self) -> bool {
        *self >= Self::zero() && *self <= Self::one()
    }
}

// Degenerate endpoints shared by every scalar: all mass on one outcome.
fn point_mass<T: Probability>(n: u64, at: u64) -> Vec<T> {
    (0..=n)
        .map(|x| if x == at { T::one() } else { T::zero() })
        .collect()
}

/// Log-space recurrence. Each term is `exp(ln C(n,x) + x ln p + (n-x) ln q)`
/// with the log binomial coefficient accumulated incrementally; the `x = 0`
/// term is evaluated as `q^n` directly so that `1 - pmf[0]` equals the
/// closed-form risk.
fn float_pmf<F: Float + FromPrimitive>(n: u64, p: F) -> Vec<F> {
    if p.is_zero() {
        return (0..=n).map(|x| if x == 0 { F::one() } else { F::zero() }).collect();
    }
    if p.is_one() {
        return (0..=n).map(|x| if x == n { F::one() } else { F::zero() }).collect();
    }
    let q = F::one() - p;
    let (ln_p, ln_q) = (p.ln(), q.ln());
    let nf = F::from_u64(n).expect("n fits the float range");

    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(q.powf(nf));
    let mut ln_choose = F::zero();
    for x in 1..=n {
        let xf = F::from_u64(x).unwrap();
        let kf = F::from_u64(n - x + 1).unwrap();
        ln_choose = ln_choose + kf.ln() - xf.ln();
        let ln_mass = ln_choose + xf * ln_p + (nf - xf) * ln_q;
        out.push(ln_mass.exp());
    }
    out
}

macro_rules! impl_float_probability {
    ($f:ty) => {
        impl Probability for $f {
            fn binomial_pmf(n: u64, p: &Self) -> Vec<Self> {
                float_pmf(n, *p)
            }

            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_probability!(f32);
impl_float_probability!(f64);

impl Probability for BigRational {
    fn binomial_pmf(n: u64, p: &Self) -> Vec<Self> {
        if p.is_zero() {
            return point_mass(n, 0);
        }
        if p.is_one() {
            return point_mass(n, n);
        }
        let q = Self::one() - p;
        let mut choose = BigInt::one();
        let mut out = Vec::with_capacity(n as usize + 1);
        for x in 0..=n {
            if x > 0 {
                choose = choose * BigInt::from(n - x + 1) / BigInt::from(x);
            }
            let mass = Self::from_integer(choose.clone())
                * num_traits::pow(p.clone(), x as usize)
                * num_traits::pow(q.clone(), (n - x) as usize);
            out.push(mass);
        }
        out
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}
