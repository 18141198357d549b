//! The four classical families on the uniform lattice `x(s) = s`.
//!
//! Each family is described by the pair `(sigma, tau)` of the difference
//! equation `sigma(x) D∇y + tau(x) Dy + lambda y = 0`, its weight `rho`,
//! squared norms `d_n^2`, and monic polynomials from terminating
//! hypergeometric sums.

use std::fmt;
use std::str::FromStr;

use libm::lgamma;
use thiserror::Error;
use twofloat::TwoFloat;

use crate::hypergeometric::{pochhammer, HypergeometricCall, HypergeometricError};

/// Highest degree accepted by default; cancellation in the sums grows with `n`.
pub const DEGREE_CAP: u32 = 30;

/// Degree bound used when sizing truncated windows.
pub const DEFAULT_TRUNCATION_DEGREE: u32 = 20;

/// Default tail tolerance for truncating infinite supports.
pub const DEFAULT_TAIL_TOL: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("{family}: {reason}")]
    Parameter {
        family: &'static str,
        reason: String,
    },
    #[error("degree {n} exceeds the maximum {max} for {family}")]
    Degree {
        family: &'static str,
        n: u32,
        max: u32,
    },
    #[error("point {s} lies outside the support of {family}")]
    OutsideSupport { family: &'static str, s: i64 },
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error(transparent)]
    Series(#[from] HypergeometricError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Hahn { alpha: f64, beta: f64, n: u32 },
    Meixner { gamma: f64, mu: f64 },
    Kravchuk { p: f64, n: u32 },
    Charlier { mu: f64 },
}

/// Integer orthogonality interval `[start, end)`; `end` is `None` for infinite supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub start: i64,
    pub end: Option<i64>,
}

impl Support {
    pub fn contains(&self, s: i64) -> bool {
        s >= self.start && self.end.is_none_or(|e| s < e)
    }

    pub fn is_finite(&self) -> bool {
        self.end.is_some()
    }
}

/// A classical family with admissible parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    kind: FamilyKind,
    sigma: [f64; 3],
    tau: [f64; 2],
}

fn param_err(family: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::Parameter {
        family,
        reason: reason.into(),
    }
}

impl FamilySpec {
    pub fn hahn(alpha: f64, beta: f64, n: u32) -> Result<Self, FamilyError> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(param_err("hahn", "alpha and beta must be finite"));
        }
        // Gamma(N + alpha - s) and Gamma(beta + s + 1) must stay positive on 0..N-1.
        if alpha <= -1.0 || beta <= -1.0 {
            return Err(param_err(
                "hahn",
                format!("alpha={alpha}, beta={beta}: need alpha > -1 and beta > -1 for a positive weight"),
            ));
        }
        if n < 1 {
            return Err(param_err("hahn", "N must be a positive integer"));
        }
        let nf = f64::from(n);
        Ok(Self {
            kind: FamilyKind::Hahn { alpha, beta, n },
            sigma: [0.0, nf + alpha, -1.0],
            tau: [(beta + 1.0) * (nf - 1.0), -(alpha + beta + 2.0)],
        })
    }

    pub fn meixner(gamma: f64, mu: f64) -> Result<Self, FamilyError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(param_err(
                "meixner",
                format!("gamma={gamma}: need gamma > 0"),
            ));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(param_err("meixner", format!("mu={mu}: need 0 < mu < 1")));
        }
        Ok(Self {
            kind: FamilyKind::Meixner { gamma, mu },
            sigma: [0.0, 1.0, 0.0],
            tau: [mu * gamma, mu - 1.0],
        })
    }

    pub fn kravchuk(p: f64, n: u32) -> Result<Self, FamilyError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(param_err("kravchuk", format!("p={p}: need 0 < p < 1")));
        }
        if n < 1 {
            return Err(param_err("kravchuk", "N must be a positive integer"));
        }
        let q = 1.0 - p;
        Ok(Self {
            kind: FamilyKind::Kravchuk { p, n },
            sigma: [0.0, 1.0, 0.0],
            tau: [f64::from(n) * p / q, -1.0 / q],
        })
    }

    pub fn charlier(mu: f64) -> Result<Self, FamilyError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(param_err("charlier", format!("mu={mu}: need mu > 0")));
        }
        Ok(Self {
            kind: FamilyKind::Charlier { mu },
            sigma: [0.0, 1.0, 0.0],
            tau: [mu, -1.0],
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Hahn { .. } => "hahn",
            FamilyKind::Meixner { .. } => "meixner",
            FamilyKind::Kravchuk { .. } => "kravchuk",
            FamilyKind::Charlier { .. } => "charlier",
        }
    }

    /// Parameters as `(key, value)` pairs in the order of the string form.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            FamilyKind::Hahn { alpha, beta, n } => {
                vec![("alpha", alpha), ("beta", beta), ("N", f64::from(n))]
            }
            FamilyKind::Meixner { gamma, mu } => vec![("gamma", gamma), ("mu", mu)],
            FamilyKind::Kravchuk { p, n } => vec![("p", p), ("N", f64::from(n))],
            FamilyKind::Charlier { mu } => vec![("mu", mu)],
        }
    }

    pub fn support(&self) -> Support {
        let end = match self.kind {
            FamilyKind::Hahn { n, .. } => Some(i64::from(n)),
            FamilyKind::Kravchuk { n, .. } => Some(i64::from(n) + 1),
            _ => None,
        };
        Support { start: 0, end }
    }

    /// Largest admissible degree: `N - 1` for Hahn, `N` for Kravchuk, the cap otherwise.
    pub fn max_degree(&self) -> u32 {
        match self.kind {
            FamilyKind::Hahn { n, .. } => (n - 1).min(DEGREE_CAP),
            FamilyKind::Kravchuk { n, .. } => n.min(DEGREE_CAP),
            _ => DEGREE_CAP,
        }
    }

    fn check_degree(&self, n: u32) -> Result<(), FamilyError> {
        let max = self.max_degree();
        if n > max {
            return Err(FamilyError::Degree {
                family: self.name(),
                n,
                max,
            });
        }
        Ok(())
    }

    /// Coefficients `(c0, c1, c2)` of `sigma(x) = c0 + c1 x + c2 x^2`.
    pub fn sigma_coeffs(&self) -> [f64; 3] {
        self.sigma
    }

    /// Coefficients `(t0, t1)` of `tau(x) = t0 + t1 x`.
    pub fn tau_coeffs(&self) -> [f64; 2] {
        self.tau
    }

    pub fn sigma(&self, x: f64) -> f64 {
        let [c0, c1, c2] = self.sigma;
        c0 + x * (c1 + x * c2)
    }

    pub fn tau(&self, x: f64) -> f64 {
        self.tau[0] + self.tau[1] * x
    }

    /// `sigma(x) + tau(x)`, which equals `sigma(x+1) rho(x+1) / rho(x)` on the support.
    ///
    /// Evaluated in factored form so that it vanishes exactly at the right end
    /// of a finite support.
    pub fn sigma_plus_tau(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Hahn { beta, n, .. } => (f64::from(n) - 1.0 - x) * (x + beta + 1.0),
            FamilyKind::Meixner { gamma, mu } => mu * (x + gamma),
            FamilyKind::Kravchuk { p, n } => p * (f64::from(n) - x) / (1.0 - p),
            FamilyKind::Charlier { mu } => mu,
        }
    }

    pub fn sigma_prime(&self, x: f64) -> f64 {
        self.sigma[1] + 2.0 * self.sigma[2] * x
    }

    pub fn sigma_dd(&self) -> f64 {
        2.0 * self.sigma[2]
    }

    pub fn tau_prime(&self) -> f64 {
        self.tau[1]
    }

    /// Closed-form eigenvalue for each family.
    pub fn lambda_n(&self, n: u32) -> f64 {
        let nf = f64::from(n);
        match self.kind {
            FamilyKind::Hahn { alpha, beta, .. } => nf * (nf + alpha + beta + 1.0),
            FamilyKind::Meixner { mu, .. } => (1.0 - mu) * nf,
            FamilyKind::Kravchuk { p, .. } => nf / (1.0 - p),
            FamilyKind::Charlier { .. } => nf,
        }
    }

    /// `-n (tau' + (n-1) sigma'' / 2)`, valid for every family.
    pub fn lambda_n_generic(&self, n: u32) -> f64 {
        let nf = f64::from(n);
        -nf * (self.tau_prime() + (nf - 1.0) * self.sigma_dd() / 2.0)
    }

    /// Monic polynomial `P_n(x)`.
    pub fn eval_monic(&self, n: u32, x: f64) -> Result<f64, FamilyError> {
        self.check_degree(n)?;
        if n == 0 {
            return Ok(1.0);
        }
        let nf = f64::from(n);
        let (prefactor, numerator, denominator, argument) = match self.kind {
            FamilyKind::Charlier { mu } => (
                (-mu).powi(n as i32),
                vec![-nf, -x],
                vec![],
                -(TwoFloat::from(1.0) / mu),
            ),
            FamilyKind::Meixner { gamma, mu } => (
                pochhammer(gamma, n) * (mu / (mu - 1.0)).powi(n as i32),
                vec![-nf, -x],
                vec![gamma],
                1.0 - TwoFloat::from(1.0) / mu,
            ),
            FamilyKind::Kravchuk { p, n: big_n } => {
                let falling = pochhammer(f64::from(big_n) - nf + 1.0, n);
                (
                    (-p).powi(n as i32) * falling,
                    vec![-nf, -x],
                    vec![-f64::from(big_n)],
                    TwoFloat::from(1.0) / p,
                )
            }
            FamilyKind::Hahn {
                alpha,
                beta,
                n: big_n,
            } => {
                let ab = alpha + beta + nf + 1.0;
                (
                    pochhammer(1.0 - f64::from(big_n), n) * pochhammer(beta + 1.0, n)
                        / pochhammer(ab, n),
                    vec![-nf, ab, -x],
                    vec![1.0 - f64::from(big_n), beta + 1.0],
                    TwoFloat::from(1.0),
                )
            }
        };
        let call = HypergeometricCall::new(numerator, denominator, argument.hi())?;
        Ok(prefactor * call.sum_extended(argument).hi())
    }

    /// `ln rho(s)` from log-Gamma sums.
    pub fn ln_weight(&self, s: i64) -> Result<f64, FamilyError> {
        if !self.support().contains(s) {
            return Err(FamilyError::OutsideSupport {
                family: self.name(),
                s,
            });
        }
        let x = s as f64;
        Ok(match self.kind {
            FamilyKind::Charlier { mu } => -mu + x * mu.ln() - lgamma(x + 1.0),
            FamilyKind::Meixner { gamma, mu } => {
                x * mu.ln() + lgamma(gamma + x) - lgamma(gamma) - lgamma(x + 1.0)
            }
            FamilyKind::Kravchuk { p, n } => {
                let nf = f64::from(n);
                lgamma(nf + 1.0) - lgamma(x + 1.0) - lgamma(nf - x + 1.0)
                    + x * p.ln()
                    + (nf - x) * (1.0 - p).ln()
            }
            FamilyKind::Hahn { alpha, beta, n } => {
                let nf = f64::from(n);
                lgamma(nf + alpha - x) + lgamma(beta + x + 1.0) - lgamma(nf - x) - lgamma(x + 1.0)
            }
        })
    }

    pub fn weight(&self, s: i64) -> Result<f64, FamilyError> {
        self.ln_weight(s).map(f64::exp)
    }

    /// `d_n^2 = sum_s P_n(s)^2 rho(s)` in closed form.
    pub fn squared_norm(&self, n: u32) -> Result<f64, FamilyError> {
        self.check_degree(n)?;
        let nf = f64::from(n);
        let ln_fact_n = lgamma(nf + 1.0);
        Ok(match self.kind {
            FamilyKind::Charlier { mu } => (ln_fact_n + nf * mu.ln()).exp(),
            FamilyKind::Meixner { gamma, mu } => {
                pochhammer(gamma, n)
                    * (ln_fact_n + nf * mu.ln() - (gamma + 2.0 * nf) * (1.0 - mu).ln()).exp()
            }
            FamilyKind::Kravchuk { p, n: big_n } => {
                let nb = f64::from(big_n);
                (ln_fact_n + lgamma(nb + 1.0) - lgamma(nb - nf + 1.0) + nf * (p * (1.0 - p)).ln())
                    .exp()
            }
            FamilyKind::Hahn {
                alpha,
                beta,
                n: big_n,
            } => {
                let nb = f64::from(big_n);
                let ln = lgamma(alpha + nf + 1.0)
                    + lgamma(beta + nf + 1.0)
                    + lgamma(alpha + beta + nb + nf + 1.0)
                    + ln_fact_n
                    - lgamma(nb - nf)
                    - lgamma(alpha + beta + 2.0 * nf + 2.0);
                ln.exp() / pochhammer(alpha + beta + nf + 1.0, n)
            }
        })
    }

    /// `sigma(s+1) rho(s+1) - [sigma(s) + tau(s)] rho(s)`.
    pub fn pearson_residual(&self, s: i64) -> Result<f64, FamilyError> {
        let x = s as f64;
        Ok(self.sigma(x + 1.0) * self.weight(s + 1)? - self.sigma_plus_tau(x) * self.weight(s)?)
    }

    /// Pearson residual divided by `|sigma(s+1) rho(s+1)|`, or the raw residual where that vanishes.
    pub fn pearson_relative(&self, s: i64) -> Result<f64, FamilyError> {
        let r = self.pearson_residual(s)?;
        let scale = (self.sigma(s as f64 + 1.0) * self.weight(s + 1)?).abs();
        Ok(if scale > 0.0 { r / scale } else { r })
    }

    /// Left side of the difference equation evaluated on `P_n`.
    pub fn difference_equation_residual(&self, n: u32, x: f64) -> Result<f64, FamilyError> {
        let [r, _] = self.difference_equation_terms(n, x)?;
        Ok(r)
    }

    /// Difference-equation residual relative to its largest term.
    pub fn difference_equation_relative(&self, n: u32, x: f64) -> Result<f64, FamilyError> {
        let [r, scale] = self.difference_equation_terms(n, x)?;
        Ok(if scale > 0.0 { r / scale } else { r })
    }

    fn difference_equation_terms(&self, n: u32, x: f64) -> Result<[f64; 2], FamilyError> {
        let (pm, p0, pp) = (
            self.eval_monic(n, x - 1.0)?,
            self.eval_monic(n, x)?,
            self.eval_monic(n, x + 1.0)?,
        );
        let terms = [
            self.sigma(x) * pp,
            -2.0 * self.sigma(x) * p0,
            self.sigma(x) * pm,
            self.tau(x) * pp,
            -self.tau(x) * p0,
            self.lambda_n(n) * p0,
        ];
        let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        Ok([terms.iter().sum(), scale])
    }

    /// Window length `S` such that the neglected tail of `rho(s) (1+s)^(2 n_max)` is below `tail_tol`.
    ///
    /// Finite families return the support length. For infinite ones the tail is
    /// bounded by a geometric series whose ratio dominates every later term ratio.
    pub fn truncation_bound(&self, tail_tol: f64, n_max: u32) -> usize {
        if let Some(end) = self.support().end {
            return end as usize;
        }
        let m2 = 2.0 * f64::from(n_max);
        let ln_tol = tail_tol.ln();
        for s in 0..1_000_000i64 {
            let x = s as f64;
            let growth = ((x + 2.0) / (x + 1.0)).powf(m2);
            let ratio_bound = match self.kind {
                FamilyKind::Charlier { mu } => mu / (x + 1.0) * growth,
                FamilyKind::Meixner { gamma, mu } => {
                    mu * ((gamma + x) / (x + 1.0)).max(1.0) * growth
                }
                _ => unreachable!("finite supports handled above"),
            };
            if ratio_bound >= 1.0 {
                continue;
            }
            let ln_term = self.ln_weight(s).expect("s in support") + m2 * (1.0 + x).ln();
            if ln_term - (1.0 - ratio_bound).ln() < ln_tol {
                return s as usize;
            }
        }
        unreachable!("weights of admissible families decay geometrically")
    }

    /// Number of lattice points used for sums: the support, truncated by [`Self::truncation_bound`].
    pub fn window_len(&self, tail_tol: f64) -> usize {
        self.truncation_bound(tail_tol, DEFAULT_TRUNCATION_DEGREE)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name())?;
        for (i, (k, v)) in self.params().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// A `name:key=value,...` string split into its parts, with byte offsets kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFamilyString {
    pub name: String,
    pub params: Vec<(String, f64, usize)>,
}

impl ParsedFamilyString {
    pub fn parse(input: &str) -> Result<Self, FamilyError> {
        let perr = |position: usize, message: String| FamilyError::Parse { position, message };
        let (name, rest, rest_start) = match input.find(':') {
            Some(i) => (&input[..i], &input[i + 1..], i + 1),
            None => (input, "", input.len()),
        };
        if name.trim().is_empty() {
            return Err(perr(0, "missing family name".into()));
        }
        let mut params = Vec::new();
        let mut offset = rest_start;
        if !rest.is_empty() {
            for piece in rest.split(',') {
                let eq = piece
                    .find('=')
                    .ok_or_else(|| perr(offset, format!("expected key=value, found {piece:?}")))?;
                let key = piece[..eq].trim();
                if key.is_empty() {
                    return Err(perr(offset, "empty key".into()));
                }
                let raw = piece[eq + 1..].trim();
                let value: f64 = raw.parse().map_err(|_| {
                    perr(offset + eq + 1, format!("invalid number {raw:?} for {key}"))
                })?;
                if params
                    .iter()
                    .any(|(k, _, _): &(String, f64, usize)| k == key)
                {
                    return Err(perr(offset, format!("duplicate key {key}")));
                }
                params.push((key.to_string(), value, offset));
                offset += piece.len() + 1;
            }
        }
        Ok(Self {
            name: name.trim().to_ascii_lowercase(),
            params,
        })
    }

    /// Takes the value of `key`, failing with the position of the name if it is missing.
    pub fn take(&mut self, key: &str) -> Result<f64, FamilyError> {
        let idx = self
            .params
            .iter()
            .position(|(k, _, _)| k == key)
            .ok_or_else(|| FamilyError::Parse {
                position: self.name.len(),
                message: format!("{} requires parameter {key}", self.name),
            })?;
        Ok(self.params.remove(idx).1)
    }

    pub fn take_count(&mut self, key: &str) -> Result<u32, FamilyError> {
        let pos = self
            .params
            .iter()
            .find(|(k, _, _)| k == key)
            .map_or(self.name.len(), |p| p.2);
        let v = self.take(key)?;
        if v.fract() != 0.0 || v < 0.0 || v > f64::from(u32::MAX) {
            return Err(FamilyError::Parse {
                position: pos,
                message: format!("{key} must be a nonnegative integer, got {v}"),
            });
        }
        Ok(v as u32)
    }

    /// Fails if any parameter was not consumed.
    pub fn finish(self) -> Result<(), FamilyError> {
        match self.params.first() {
            None => Ok(()),
            Some((k, _, pos)) => Err(FamilyError::Parse {
                position: *pos,
                message: format!("unknown parameter {k} for {}", self.name),
            }),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let mut parsed = ParsedFamilyString::parse(input)?;
        let spec = match parsed.name.as_str() {
            "hahn" => {
                let alpha = parsed.take("alpha")?;
                let beta = parsed.take("beta")?;
                let n = parsed.take_count("N")?;
                FamilySpec::hahn(alpha, beta, n)?
            }
            "meixner" => {
                let gamma = parsed.take("gamma")?;
                let mu = parsed.take("mu")?;
                FamilySpec::meixner(gamma, mu)?
            }
            "kravchuk" => {
                let p = parsed.take("p")?;
                let n = parsed.take_count("N")?;
                FamilySpec::kravchuk(p, n)?
            }
            "charlier" => FamilySpec::charlier(parsed.take("mu")?)?,
            other => {
                return Err(FamilyError::Parse {
                    position: 0,
                    message: format!(
                        "unknown family {other:?}; expected hahn, meixner, kravchuk or charlier"
                    ),
                })
            }
        };
        parsed.finish()?;
        Ok(spec)
    }
}
