//! Pochhammer symbols and terminating generalized hypergeometric series.
//!
//! The monic families are written as `prefactor * pFq(...)` with one numerator
//! parameter equal to `-n`, so every series evaluated here is a finite sum.
//! The sums alternate and cancel heavily for moderate `n` (a factor of 1e7 is
//! typical for Hahn at `n = 12`), so the term recurrence and the accumulation
//! both run in double-double arithmetic and are rounded once at the end.

use thiserror::Error;
use twofloat::TwoFloat;

use crate::extended::div;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergeometricError {
    #[error("series does not terminate: no numerator parameter is a nonpositive integer")]
    NotTerminating,
    #[error("denominator parameter {param} vanishes at index {index} before the series terminates at {cap}")]
    DivisionByZero {
        param: f64,
        index: usize,
        cap: usize,
    },
    #[error("non-finite parameter or argument")]
    NonFinite,
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + f64::from(i)))
}

/// Natural log of `|(a)_k|`; used where the product would overflow.
pub fn ln_abs_pochhammer(a: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (0..k).map(|i| (a + f64::from(i)).abs().ln()).sum()
}

fn nonpositive_integer(x: f64) -> Option<usize> {
    if x <= 0.0 && x.fract() == 0.0 && x.is_finite() {
        Some((-x) as usize)
    } else {
        None
    }
}

/// Parameters of a terminating `pFq(a_1..a_p; b_1..b_q; z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricCall {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    argument: f64,
    term_cap: usize,
}

impl HypergeometricCall {
    pub fn new(
        numerator: impl Into<Vec<f64>>,
        denominator: impl Into<Vec<f64>>,
        argument: f64,
    ) -> Result<Self, HypergeometricError> {
        let numerator = numerator.into();
        let denominator = denominator.into();
        if !argument.is_finite() || numerator.iter().chain(&denominator).any(|v| !v.is_finite()) {
            return Err(HypergeometricError::NonFinite);
        }
        let term_cap = numerator
            .iter()
            .filter_map(|&a| nonpositive_integer(a))
            .min()
            .ok_or(HypergeometricError::NotTerminating)?;
        // (b)_j contains the factor b + i for i < j; j runs up to term_cap.
        for &b in &denominator {
            if let Some(m) = nonpositive_integer(b) {
                if m < term_cap {
                    return Err(HypergeometricError::DivisionByZero {
                        param: b,
                        index: m + 1,
                        cap: term_cap,
                    });
                }
            }
        }
        Ok(Self {
            numerator,
            denominator,
            argument,
            term_cap,
        })
    }

    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    /// Index of the last possibly nonzero term.
    pub fn term_cap(&self) -> usize {
        self.term_cap
    }

    /// Sum of the series in double-double precision.
    pub(crate) fn sum_extended(&self, argument: TwoFloat) -> TwoFloat {
        let mut term = TwoFloat::from(1.0);
        let mut sum = term;
        for k in 0..self.term_cap {
            let kf = k as f64;
            let mut ratio = argument / (kf + 1.0);
            for &a in &self.numerator {
                ratio *= TwoFloat::new_add(a, kf);
            }
            for &b in &self.denominator {
                ratio = div(ratio, TwoFloat::new_add(b, kf));
            }
            term *= ratio;
            if term.hi() == 0.0 {
                break;
            }
            sum += term;
        }
        sum
    }
}

/// Evaluates the terminating series `sum_k prod(a_i)_k / prod(b_j)_k * z^k / k!`.
pub fn hypergeometric(call: &HypergeometricCall) -> f64 {
    call.sum_extended(TwoFloat::from(call.argument)).hi()
}

/// Convenience wrapper that validates and evaluates in one step.
pub fn hypergeometric_pfq(
    numerator: &[f64],
    denominator: &[f64],
    argument: f64,
) -> Result<f64, HypergeometricError> {
    HypergeometricCall::new(numerator, denominator, argument).map(|c| hypergeometric(&c))
}
