//! Al-Salam & Carlitz I functions on the q-lattice `x = q^s` and `x = a q^s`.
//!
//! The Hamiltonian, its factorization `H_q = a_up a_down` and the deformed
//! commutator `[a_down, a_up]_{1/q} = 1/k_q` are checked on both branches of the
//! lattice, each tabulated on `s = 0..=S` with `S` chosen from a tail tolerance.
//! A shift `s -> s + 1` multiplies `x` by `q`.

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use twofloat::TwoFloat;

use crate::extended::div;
use crate::families::{FamilyError, ParsedFamilyString};
use crate::gridops::{inner_product, Grid, GridError, GridFunction, Margins, ShiftOperator};

#[derive(Debug, Error)]
pub enum QError {
    #[error("invalid q-family parameter: {0}")]
    Parameter(String),
    #[error("radicands of {name} change sign on the lattice; no common phase")]
    MixedPhase { name: &'static str },
    #[error("operators with different phases cannot be added")]
    PhaseMismatch,
    #[error("negative radicand {value} at x = {x}")]
    NegativeRadicand { x: f64, value: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Default bound on the discarded q-geometric tail `q^(S+1) / (1 - q)`.
pub const DEFAULT_Q_TAIL_TOL: f64 = 1e-12;

/// Lattice points used by the linear-lattice conditions, per branch.
pub const LINEAR_LATTICE_POINTS: usize = 24;

/// `(z; q)_n = prod_{k<n} (1 - z q^k)`.
pub fn q_pochhammer(z: f64, q: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (1.0 - z * q.powi(k as i32)))
}

/// `(z; q)_inf`, truncated once the factor is within 1e-17 of 1.
pub fn q_pochhammer_inf(z: f64, q: f64) -> f64 {
    let mut acc = 1.0;
    let mut zk = z;
    while zk.abs() >= 1e-17 {
        acc *= 1.0 - zk;
        zk *= q;
    }
    acc
}

/// The two halves of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `x = q^s`
    Upper,
    /// `x = a q^s`
    Lower,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Upper, Branch::Lower];
}

/// One function tabulated on both branches.
#[derive(Debug, Clone, PartialEq)]
pub struct QFunction {
    pub upper: GridFunction,
    pub lower: GridFunction,
}

impl QFunction {
    pub fn branch(&self, b: Branch) -> &GridFunction {
        match b {
            Branch::Upper => &self.upper,
            Branch::Lower => &self.lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    pub q: f64,
    pub a: f64,
    /// `q^(1/2) - q^(-1/2)`, negative for `q < 1`.
    pub k_q: f64,
    pub varsigma: f64,
    pub lambda: f64,
    /// Deepest lattice index kept on each branch.
    pub depth: usize,
}

impl QContext {
    pub fn new(q: f64, a: f64) -> Result<Self, QError> {
        Self::with_tail_tol(q, a, DEFAULT_Q_TAIL_TOL)
    }

    pub fn with_tail_tol(q: f64, a: f64, tail_tol: f64) -> Result<Self, QError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::Parameter(format!("q must lie in (0, 1), got {q}")));
        }
        if !(a < 0.0 && a.is_finite()) {
            return Err(QError::Parameter(format!("a must be negative, got {a}")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(QError::Parameter(format!(
                "tail tolerance must lie in (0, 1), got {tail_tol}"
            )));
        }
        let mut depth = 0;
        while q.powi(depth as i32 + 1) / (1.0 - q) >= tail_tol {
            depth += 1;
        }
        let k_q = q.sqrt() - 1.0 / q.sqrt();
        Ok(Self {
            q,
            a,
            k_q,
            varsigma: 1.0 / q,
            lambda: 1.0 / k_q,
            depth,
        })
    }

    /// Discrete q-Hermite I: `a = -1`.
    pub fn discrete_q_hermite(q: f64) -> Result<Self, QError> {
        Self::new(q, -1.0)
    }

    pub fn origin(&self, b: Branch) -> f64 {
        match b {
            Branch::Upper => 1.0,
            Branch::Lower => self.a,
        }
    }

    pub fn x(&self, b: Branch, s: f64) -> f64 {
        self.origin(b) * self.q.powf(s)
    }

    pub fn grid(&self) -> Grid {
        Grid::unit(0, self.depth + 1).expect("nonempty lattice")
    }

    /// Residuals are not measured at the two deepest points, where the truncation bites.
    pub fn margins(&self) -> Margins {
        Margins::new(0, 2)
    }

    pub fn sigma(&self, x: f64) -> f64 {
        (x - 1.0) * (x - self.a)
    }

    pub fn tau(&self, x: f64) -> f64 {
        (1.0 + self.a - x) / self.k_q
    }

    /// `nabla x_1(s) = x k_q` at the point `x = x(s)`.
    pub fn nabla_x1(&self, x: f64) -> f64 {
        x * self.k_q
    }

    /// `sigma + tau nabla x_1`, which equals `a` identically.
    pub fn sigma_tilde(&self, x: f64) -> f64 {
        self.sigma(x) + self.tau(x) * self.nabla_x1(x)
    }

    /// `q^{3/2} (1 - q^{-n}) / (1 - q)^2`.
    pub fn eigenvalue(&self, n: u32) -> f64 {
        let q = self.q;
        q.powf(1.5) * (1.0 - q.powi(-(n as i32))) / ((1.0 - q) * (1.0 - q))
    }

    fn coefficient(
        &self,
        b: Branch,
        f: impl Fn(&Self, f64) -> f64 + Send + Sync + 'static,
    ) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let ctx = *self;
        move |s| f(&ctx, ctx.x(b, s))
    }
}

impl FromStr for QContext {
    type Err = QError;

    /// Parses `alsalam-carlitz-1:q=<q>,a=<a>`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let mut parsed = ParsedFamilyString::parse(input)?;
        if parsed.name != "alsalam-carlitz-1" {
            return Err(FamilyError::Parse {
                position: 0,
                message: format!("expected alsalam-carlitz-1, got {:?}", parsed.name),
            }
            .into());
        }
        let q = parsed.take("q")?;
        let a = parsed.take("a")?;
        parsed.finish()?;
        Self::new(q, a)
    }
}

impl std::fmt::Display for QContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "alsalam-carlitz-1:q={},a={}", self.q, self.a)
    }
}

/// `2phi1(q^-n, 1/x; 0; q; q x / a)`, summed in double-double.
fn basic_hypergeometric(ctx: &QContext, n: u32, x: f64) -> f64 {
    let q = TwoFloat::from(ctx.q);
    let xt = TwoFloat::from(x);
    let z = q * xt / ctx.a;
    let inv_x = div(TwoFloat::from(1.0), xt);
    let mut qk = TwoFloat::from(1.0);
    let q_minus_n = div(TwoFloat::from(1.0), TwoFloat::from(ctx.q.powi(n as i32)));
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    for _ in 0..n {
        let num = (TwoFloat::from(1.0) - q_minus_n * qk) * (TwoFloat::from(1.0) - inv_x * qk);
        term = div(term * num, TwoFloat::from(1.0) - qk * q) * z;
        if term.hi() == 0.0 {
            break;
        }
        sum += term;
        qk *= q;
    }
    sum.hi()
}

/// Monic `U_n(x) = (-a)^n q^{n(n-1)/2} 2phi1(q^-n, 1/x; 0; q; q x / a)`.
pub fn al_salam_carlitz_monic(ctx: &QContext, n: u32, x: f64) -> f64 {
    let binom = f64::from(n) * (f64::from(n) - 1.0) / 2.0;
    (-ctx.a).powi(n as i32) * ctx.q.powf(binom) * basic_hypergeometric(ctx, n, x)
}

/// Normalized `Phi_n(x)` with the real convention `|x k_q|` for the lattice measure.
pub fn phi_q_at(ctx: &QContext, n: u32, x: f64) -> Result<f64, QError> {
    let q = ctx.q;
    let a = ctx.a;
    let weight = q_pochhammer_inf(q * x, q) * q_pochhammer_inf(q * x / a, q);
    let binom = f64::from(n) * (f64::from(n) - 1.0) / 2.0;
    let num = weight * (x * ctx.k_q).abs() * (-a).powi(n as i32) * q.powf(binom);
    let den = (1.0 - q)
        * q_pochhammer(q, q, n)
        * q_pochhammer_inf(q, q)
        * q_pochhammer_inf(a, q)
        * q_pochhammer_inf(q / a, q);
    let radicand = num / den;
    if radicand < 0.0 {
        return Err(QError::NegativeRadicand { x, value: radicand });
    }
    Ok(radicand.sqrt() * basic_hypergeometric(ctx, n, x))
}

pub fn phi_q(ctx: &QContext, n: u32, b: Branch, s: f64) -> Result<f64, QError> {
    phi_q_at(ctx, n, ctx.x(b, s))
}

pub fn phi_q_function(ctx: &QContext, n: u32) -> Result<QFunction, QError> {
    let tab = |b: Branch| -> Result<GridFunction, QError> {
        let values = ctx
            .grid()
            .points()
            .map(|s| phi_q(ctx, n, b, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridFunction::new(ctx.grid(), values)?)
    };
    Ok(QFunction {
        upper: tab(Branch::Upper)?,
        lower: tab(Branch::Lower)?,
    })
}

pub fn q_basis(ctx: &QContext, n_max: u32) -> Result<Vec<QFunction>, QError> {
    (0..=n_max).map(|n| phi_q_function(ctx, n)).collect()
}

/// `int_a^1 f d_q x = (1 - q) [sum q^k f(q^k) - a sum q^k f(a q^k)]`, `k = 0..=S`.
pub fn jackson_integral(ctx: &QContext, f: impl Fn(f64) -> f64) -> f64 {
    let (q, a) = (ctx.q, ctx.a);
    let mut sum = 0.0;
    for k in 0..=ctx.depth {
        let qk = q.powi(k as i32);
        sum += qk * f(qk) - a * qk * f(a * qk);
    }
    (1.0 - q) * sum
}

/// `int_a^1 f g d_q x / |k_q x|`, which is `(1 - q) / |k_q|` times the plain lattice sum.
pub fn q_inner_product(ctx: &QContext, f: &QFunction, g: &QFunction) -> Result<f64, QError> {
    let sum = inner_product(&f.upper, &g.upper)? + inner_product(&f.lower, &g.lower)?;
    Ok((1.0 - ctx.q) / ctx.k_q.abs() * sum)
}

pub fn q_gram(ctx: &QContext, basis: &[QFunction]) -> Result<Vec<Vec<f64>>, QError> {
    basis
        .iter()
        .map(|f| basis.iter().map(|g| q_inner_product(ctx, f, g)).collect())
        .collect()
}

/// Largest entry of `|G - I|`.
pub fn q_gram_deviation(ctx: &QContext, n_max: u32) -> Result<f64, QError> {
    let gram = q_gram(ctx, &q_basis(ctx, n_max)?)?;
    let mut worst = 0.0_f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}

fn root(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// The q-Hamiltonian on one branch:
///
/// ```text
/// H_q = q^2 sqrt(a (x-1)(x-a)) / ((1-q)^2 x^2) e^{-d}
///     + sqrt(a (1-qx)(a-qx)) / ((1-q)^2 x^2) e^{d}
///     + sqrt(q) (q (x-1) x + a (1 + q - q x)) / ((q-1)^2 x^2)
/// ```
pub fn hamiltonian_q(ctx: &QContext, b: Branch) -> ShiftOperator {
    let d = (1.0 - ctx.q) * (1.0 - ctx.q);
    ShiftOperator::term(
        -2,
        ctx.coefficient(b, move |c, x| {
            c.q * c.q * root(c.a * (x - 1.0) * (x - c.a)) / (d * x * x)
        }),
    )
    .add(&ShiftOperator::term(
        2,
        ctx.coefficient(b, move |c, x| {
            root(c.a * (1.0 - c.q * x) * (c.a - c.q * x)) / (d * x * x)
        }),
    ))
    .add(&ShiftOperator::multiplication(
        ctx.coefficient(b, move |c, x| {
            c.q.sqrt() * (c.q * (x - 1.0) * x + c.a * (1.0 + c.q - c.q * x)) / (d * x * x)
        }),
    ))
}

/// The Hamiltonian with the off-diagonal signs and the `e^{d}` scale as commonly transcribed:
/// `-q^2 sqrt(a (x-1)(x-a)) / ((q-1)^2 x^2) e^{-d} - sqrt(a (1-qx)(a-qx)) / x^2 e^{d} + diag`.
/// It does not have the `Phi_n` as eigenfunctions; kept to make that visible.
pub fn transcribed_hamiltonian_q(ctx: &QContext, b: Branch) -> ShiftOperator {
    let d = (1.0 - ctx.q) * (1.0 - ctx.q);
    ShiftOperator::term(
        -2,
        ctx.coefficient(b, move |c, x| {
            -c.q * c.q * root(c.a * (x - 1.0) * (x - c.a)) / (d * x * x)
        }),
    )
    .add(&ShiftOperator::term(
        2,
        ctx.coefficient(b, move |c, x| {
            -root(c.a * (1.0 - c.q * x) * (c.a - c.q * x)) / (x * x)
        }),
    ))
    .add(&ShiftOperator::multiplication(
        ctx.coefficient(b, move |c, x| {
            c.q.sqrt() * (c.q * (x - 1.0) * x + c.a * (1.0 + c.q - c.q * x)) / (d * x * x)
        }),
    ))
}

/// An operator `phase * op` with `phase` either 1 or `i`.
#[derive(Debug, Clone)]
pub struct PhasedOperator {
    pub op: ShiftOperator,
    pub imaginary: bool,
}

/// One term `prefactor(s) sqrt(radicand(s)) e^{half d / 2}` of an operator with formal square roots.
pub struct RadicalTerm {
    pub half: i32,
    pub radicand: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub prefactor: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PhasedOperator {
    pub fn real(op: ShiftOperator) -> Self {
        Self {
            op,
            imaginary: false,
        }
    }

    /// Builds the operator, pulling a common `i` out of the square roots when every
    /// radicand is nonpositive on `points`. Mixed signs are rejected.
    pub fn from_radicals(
        name: &'static str,
        terms: Vec<RadicalTerm>,
        points: &[f64],
    ) -> Result<Self, QError> {
        let (mut pos, mut neg) = (false, false);
        for t in &terms {
            for &s in points {
                let r = (t.radicand)(s);
                pos |= r > 0.0;
                neg |= r < 0.0;
            }
        }
        if pos && neg {
            return Err(QError::MixedPhase { name });
        }
        let sign = if neg { -1.0 } else { 1.0 };
        let op = terms.into_iter().fold(ShiftOperator::zero(), |acc, t| {
            let (r, p) = (t.radicand, t.prefactor);
            acc.add(&ShiftOperator::term(t.half, move |s| {
                p(s) * root(sign * r(s))
            }))
        });
        Ok(Self { op, imaginary: neg })
    }

    pub fn compose(&self, other: &PhasedOperator) -> PhasedOperator {
        let op = self.op.compose(&other.op);
        let both = self.imaginary && other.imaginary;
        PhasedOperator {
            op: if both { op.scale(-1.0) } else { op },
            imaginary: self.imaginary ^ other.imaginary,
        }
    }

    pub fn add(&self, other: &PhasedOperator) -> Result<PhasedOperator, QError> {
        if self.imaginary != other.imaginary {
            return Err(QError::PhaseMismatch);
        }
        Ok(PhasedOperator {
            op: self.op.add(&other.op),
            imaginary: self.imaginary,
        })
    }

    pub fn scale(&self, c: f64) -> PhasedOperator {
        PhasedOperator {
            op: self.op.scale(c),
            imaginary: self.imaginary,
        }
    }

    /// `self * other - varsigma * other * self`.
    pub fn varsigma_commutator(&self, other: &PhasedOperator, varsigma: f64) -> PhasedOperator {
        self.compose(other)
            .add(&other.compose(self).scale(-varsigma))
            .expect("products of two operators share a phase")
    }
}

fn ladder_ops_with(
    ctx: &QContext,
    b: Branch,
    down_constant: f64,
) -> Result<(PhasedOperator, PhasedOperator), QError> {
    let c = *ctx;
    let pre = move |s: f64| {
        let x = c.x(b, s);
        c.q.powf(0.25) / (c.k_q * x)
    };
    let points: Vec<f64> = ctx.grid().points().collect();
    let down = PhasedOperator::from_radicals(
        "a_down",
        vec![
            RadicalTerm {
                half: 2,
                radicand: Box::new(move |s| {
                    let x = c.x(b, s);
                    (x - 1.0 / c.q) * (x - c.a / c.q)
                }),
                prefactor: Box::new(pre),
            },
            RadicalTerm {
                half: 0,
                radicand: Box::new(move |_| down_constant),
                prefactor: Box::new(move |s| -pre(s)),
            },
        ],
        &points,
    )?;
    let up = PhasedOperator::from_radicals(
        "a_up",
        vec![
            RadicalTerm {
                half: -2,
                radicand: Box::new(move |s| {
                    let x = c.x(b, s);
                    (x - 1.0) * (x - c.a)
                }),
                prefactor: Box::new(pre),
            },
            RadicalTerm {
                half: 0,
                radicand: Box::new(move |_| c.a / c.q),
                prefactor: Box::new(move |s| -pre(s)),
            },
        ],
        &points,
    )?;
    Ok((down, up))
}

/// `a_down = q^{1/4} / (k_q x) (sqrt((x - 1/q)(x - a/q)) e^{d} - sqrt(a/q))` and
/// `a_up = q^{1/4} / (k_q x) (sqrt((x - 1)(x - a)) e^{-d} - sqrt(a/q))` on one branch.
/// All radicands are negative, so both carry the phase `i`.
pub fn q_ladder_ops(ctx: &QContext, b: Branch) -> Result<(PhasedOperator, PhasedOperator), QError> {
    ladder_ops_with(ctx, b, ctx.a / ctx.q)
}

/// As [`q_ladder_ops`] but with `sqrt(a)` in the constant term of `a_down`.
pub fn transcribed_q_ladder_ops(
    ctx: &QContext,
    b: Branch,
) -> Result<(PhasedOperator, PhasedOperator), QError> {
    ladder_ops_with(ctx, b, ctx.a)
}

/// Largest componentwise backward error of `sum_i parts_i f = 0` over the interior:
/// `|sum_i P_i f| / sum_i (|P_i| |f|)` at each point.
pub fn backward_error(
    parts: &[ShiftOperator],
    f: &GridFunction,
    margins: Margins,
) -> Result<f64, QError> {
    let mut value = GridFunction::zeros(*f.grid());
    let mut scale = GridFunction::zeros(*f.grid());
    for p in parts {
        value = value.axpy(1.0, &p.apply(f)?)?;
        scale = scale.axpy(1.0, &p.apply_magnitude(f)?)?;
    }
    let ratio: Vec<f64> = value
        .values()
        .iter()
        .zip(scale.values())
        .map(|(v, s)| if *s > 0.0 { (v / s).abs() } else { v.abs() })
        .collect();
    Ok(GridFunction::new(*f.grid(), ratio)?.max_abs_interior(margins))
}

/// Residuals of the q-example, all as componentwise backward errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QResiduals {
    pub eigen: f64,
    pub factorization: f64,
    pub varsigma_commutator: f64,
    pub adjoint: f64,
}

impl QContext {
    fn over_basis(
        &self,
        basis: &[QFunction],
        mut f: impl FnMut(Branch, usize, &GridFunction) -> Result<f64, QError>,
    ) -> Result<f64, QError> {
        let mut worst = 0.0_f64;
        for b in Branch::BOTH {
            for (n, g) in basis.iter().enumerate() {
                worst = worst.max(f(b, n, g.branch(b))?);
            }
        }
        Ok(worst)
    }

    /// `H_q Phi_n = lambda_n Phi_n`.
    pub fn eigen_residual(&self, basis: &[QFunction]) -> Result<f64, QError> {
        self.over_basis(basis, |b, n, f| {
            let lambda = self.eigenvalue(n as u32);
            backward_error(
                &[hamiltonian_q(self, b), ShiftOperator::constant(-lambda)],
                f,
                self.margins(),
            )
        })
    }

    /// Same as [`Self::eigen_residual`] for [`transcribed_hamiltonian_q`].
    pub fn transcribed_eigen_residual(&self, basis: &[QFunction]) -> Result<f64, QError> {
        self.over_basis(basis, |b, n, f| {
            let lambda = self.eigenvalue(n as u32);
            backward_error(
                &[
                    transcribed_hamiltonian_q(self, b),
                    ShiftOperator::constant(-lambda),
                ],
                f,
                self.margins(),
            )
        })
    }

    fn factorization_with(
        &self,
        basis: &[QFunction],
        ops: impl Fn(&QContext, Branch) -> Result<(PhasedOperator, PhasedOperator), QError>,
    ) -> Result<f64, QError> {
        self.over_basis(basis, |b, _, f| {
            let (down, up) = ops(self, b)?;
            let product = up.compose(&down);
            if product.imaginary {
                return Err(QError::PhaseMismatch);
            }
            backward_error(
                &[product.op, hamiltonian_q(self, b).scale(-1.0)],
                f,
                self.margins(),
            )
        })
    }

    /// `a_up a_down = H_q`.
    pub fn factorization_residual(&self, basis: &[QFunction]) -> Result<f64, QError> {
        self.factorization_with(basis, q_ladder_ops)
    }

    /// `a_up a_down = H_q` with the `sqrt(a)` constant in `a_down`.
    pub fn transcribed_factorization_residual(&self, basis: &[QFunction]) -> Result<f64, QError> {
        self.factorization_with(basis, transcribed_q_ladder_ops)
    }

    /// `[a_down, a_up]_{1/q} = 1/k_q`.
    pub fn varsigma_commutator_residual(&self, basis: &[QFunction]) -> Result<f64, QError> {
        self.over_basis(basis, |b, _, f| {
            let (down, up) = q_ladder_ops(self, b)?;
            let du = down.compose(&up);
            let ud = up.compose(&down).scale(-self.varsigma);
            if du.imaginary {
                return Err(QError::PhaseMismatch);
            }
            backward_error(
                &[du.op, ud.op, ShiftOperator::constant(-self.lambda)],
                f,
                self.margins(),
            )
        })
    }

    /// Largest `|<A f, g> - <f, B g>|` for the real parts of `a_down`, `a_up` under the q inner product.
    pub fn adjoint_defect(&self, basis: &[QFunction]) -> Result<f64, QError> {
        let apply = |use_down: bool| -> Result<Vec<QFunction>, QError> {
            let mut out = Vec::with_capacity(basis.len());
            for f in basis {
                let mut parts = Vec::with_capacity(2);
                for b in Branch::BOTH {
                    let (down, up) = q_ladder_ops(self, b)?;
                    let op = if use_down { down.op } else { up.op };
                    parts.push(op.apply(f.branch(b))?);
                }
                let lower = parts.pop().expect("two branches");
                let upper = parts.pop().expect("two branches");
                out.push(QFunction { upper, lower });
            }
            Ok(out)
        };
        let down_f = apply(true)?;
        let up_f = apply(false)?;
        let mut worst = 0.0_f64;
        for (f, df) in basis.iter().zip(&down_f) {
            for (g, ug) in basis.iter().zip(&up_f) {
                let d = q_inner_product(self, df, g)? - q_inner_product(self, f, ug)?;
                worst = worst.max(d.abs());
            }
        }
        Ok(worst)
    }

    pub fn residuals(&self, n_max: u32) -> Result<QResiduals, QError> {
        let basis = q_basis(self, n_max)?;
        Ok(QResiduals {
            eigen: self.eigen_residual(&basis)?,
            factorization: self.factorization_residual(&basis)?,
            varsigma_commutator: self.varsigma_commutator_residual(&basis)?,
            adjoint: self.adjoint_defect(&basis)?,
        })
    }

    /// Largest `|(lambda_{n+1} - lambda_n) / (lambda_n - lambda_{n-1}) - 1/q|` for `1 <= n < n_max`.
    pub fn q_linearity_residual(&self, n_max: u32) -> f64 {
        (1..n_max)
            .map(|n| {
                let ratio = (self.eigenvalue(n + 1) - self.eigenvalue(n))
                    / (self.eigenvalue(n) - self.eigenvalue(n - 1));
                (ratio - self.varsigma).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|sigma + tau nabla x_1 - a| / |a|` over both branches.
    pub fn sigma_tilde_constancy(&self) -> f64 {
        Branch::BOTH
            .iter()
            .flat_map(|&b| (0..=self.depth).map(move |s| (b, s)))
            .map(|(b, s)| (self.sigma_tilde(self.x(b, s as f64)) - self.a).abs() / self.a.abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of the two linear-lattice conditions for one `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearLatticeConditions {
    pub alpha: f64,
    pub varsigma: f64,
    /// Max deviation of the first condition from `varsigma`.
    pub varsigma_residual: f64,
    /// Max deviation of the second condition from `1/k_q`.
    pub lambda_residual: f64,
    /// Points where a condition is undefined, as `(branch, s)`.
    pub skipped: Vec<(Branch, usize)>,
}

impl LinearLatticeConditions {
    pub fn holds(&self, tol: f64) -> bool {
        self.varsigma_residual < tol && self.lambda_residual < tol
    }
}

/// Evaluates both conditions at `s = 1..=LINEAR_LATTICE_POINTS` on each branch.
///
/// The first condition is
/// `nabla x(s) / nabla x_1(s-alpha) sqrt(nabla x_1(s-1) nabla x_1(s) / (nabla x(s-alpha) Delta x(s-alpha)))
///  sqrt(sigma(s-alpha) sigma~(s-alpha) / (sigma(s) sigma~(s-1)))`, which must equal `varsigma`;
/// the second,
/// `(sigma(s-alpha+1)/nabla x_1(s-alpha+1) + sigma~(s-alpha)/nabla x_1(s-alpha)) / Delta x(s-alpha) -
///  varsigma (sigma(s)/nabla x(s) + sigma~(s)/Delta x(s)) / nabla x_1(s)`, must be constant.
/// The second condition cancels heavily deep in the lattice and runs in double-double.
pub fn linear_lattice_conditions(
    ctx: &QContext,
    alpha: f64,
    varsigma: f64,
) -> LinearLatticeConditions {
    let q = ctx.q;
    let nx = |y: f64| y * (1.0 - 1.0 / q);
    let dx = |y: f64| y * (q - 1.0);
    let nx1 = |y: f64| ctx.nabla_x1(y);
    let tf = TwoFloat::from;
    let one = tf(1.0);
    let kq = tf(ctx.k_q);
    let sigma_t = |y: TwoFloat| (y - 1.0) * (y - ctx.a);
    let tilde_t = |y: TwoFloat| sigma_t(y) + (one + ctx.a - y) * y;
    let nx_t = |y: TwoFloat| y * (one - one / q);
    let dx_t = |y: TwoFloat| y * (q - 1.0);
    let nx1_t = |y: TwoFloat| y * kq;

    let mut out = LinearLatticeConditions {
        alpha,
        varsigma,
        varsigma_residual: 0.0,
        lambda_residual: 0.0,
        skipped: Vec::new(),
    };
    for b in Branch::BOTH {
        for s in 1..=LINEAR_LATTICE_POINTS {
            let x = ctx.x(b, s as f64);
            let xa = ctx.x(b, s as f64 - alpha);
            let first = nx(x) / nx1(xa)
                * (nx1(x / q) * nx1(x) / (nx(xa) * dx(xa))).sqrt()
                * (ctx.sigma(xa) * ctx.sigma_tilde(xa) / (ctx.sigma(x) * ctx.sigma_tilde(x / q)))
                    .sqrt();
            let (xt, xat) = (tf(x), tf(xa));
            let left = div(
                div(sigma_t(xat * q), nx1_t(xat * q)) + div(tilde_t(xat), nx1_t(xat)),
                dx_t(xat),
            );
            let right = div(
                div(sigma_t(xt), nx_t(xt)) + div(tilde_t(xt), dx_t(xt)),
                nx1_t(xt),
            );
            let second = left - right * varsigma;
            let second = second.hi();
            if !first.is_finite() || !second.is_finite() {
                out.skipped.push((b, s));
                continue;
            }
            out.varsigma_residual = out.varsigma_residual.max((first - varsigma).abs());
            out.lambda_residual = out.lambda_residual.max((second - ctx.lambda).abs());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermite() -> QContext {
        QContext::discrete_q_hermite(0.5).unwrap()
    }

    #[test]
    fn pochhammer_products() {
        assert_eq!(q_pochhammer(0.3, 0.5, 0), 1.0);
        assert_eq!(q_pochhammer_inf(0.0, 0.5), 1.0);
        assert!((q_pochhammer(0.5, 0.5, 2) - 0.5 * 0.75).abs() < 1e-16);
        let direct: f64 = (1..200).map(|k| 1.0 - 0.5f64.powi(k)).product();
        assert!((q_pochhammer_inf(0.5, 0.5) - direct).abs() < 1e-15);
    }

    #[test]
    fn context_constants() {
        let c = hermite();
        assert!(c.k_q < 0.0);
        assert!((c.lambda * c.k_q - 1.0).abs() < 1e-15);
        assert_eq!(c.varsigma, 2.0);
        assert!(c.q.powi(c.depth as i32 + 1) / (1.0 - c.q) < DEFAULT_Q_TAIL_TOL);
        assert!(QContext::new(1.5, -1.0).is_err());
        assert!(QContext::new(0.5, 0.5).is_err());
        let parsed: QContext = "alsalam-carlitz-1:q=0.5,a=-1".parse().unwrap();
        assert_eq!(parsed, c);
        assert_eq!(parsed.to_string(), "alsalam-carlitz-1:q=0.5,a=-1");
        assert!("alsalam-carlitz-1:q=0.5".parse::<QContext>().is_err());
    }

    #[test]
    fn lattice_stays_in_range() {
        let c = hermite();
        for b in Branch::BOTH {
            for s in 0..=c.depth {
                let x = c.x(b, s as f64);
                assert!(x > c.a - 1e-15 && x <= 1.0);
            }
        }
    }

    #[test]
    fn orthonormal_under_jackson_measure() {
        let c = hermite();
        assert!(q_gram_deviation(&c, 6).unwrap() < 1e-7);
        // The Jackson sum and the lattice inner product agree.
        let (f2, f3) = (
            phi_q_function(&c, 2).unwrap(),
            phi_q_function(&c, 3).unwrap(),
        );
        let direct = jackson_integral(&c, |x| {
            phi_q_at(&c, 2, x).unwrap() * phi_q_at(&c, 3, x).unwrap() / (c.k_q * x).abs()
        });
        assert!((direct - q_inner_product(&c, &f2, &f3).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn ground_state_is_weight_root() {
        let c = hermite();
        let x = 0.25;
        let w = q_pochhammer_inf(c.q * x, c.q) * q_pochhammer_inf(c.q * x / c.a, c.q);
        let ratio = phi_q_at(&c, 0, x).unwrap() / (w * x).sqrt();
        let ratio2 = phi_q_at(&c, 0, 0.125).unwrap()
            / (q_pochhammer_inf(0.0625, 0.5) * q_pochhammer_inf(-0.0625, 0.5) * 0.125).sqrt();
        assert!((ratio - ratio2).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_and_ladders() {
        let c = hermite();
        let r = c.residuals(5).unwrap();
        assert!(r.eigen < 1e-7, "{r:?}");
        assert!(r.factorization < 1e-7, "{r:?}");
        assert!(r.varsigma_commutator < 1e-7, "{r:?}");
        assert!(r.adjoint < 1e-6, "{r:?}");
        let basis = q_basis(&c, 5).unwrap();
        assert!(c.transcribed_eigen_residual(&basis).unwrap() > 1e-3);
        assert!(c.transcribed_factorization_residual(&basis).unwrap() > 1e-3);
    }

    #[test]
    fn ladders_carry_phase_i() {
        let c = hermite();
        let (down, up) = q_ladder_ops(&c, Branch::Upper).unwrap();
        assert!(down.imaginary && up.imaginary);
        assert!(!up.compose(&down).imaginary);
        let mixed = PhasedOperator::from_radicals(
            "mixed",
            vec![RadicalTerm {
                half: 0,
                radicand: Box::new(|s| s - 1.0),
                prefactor: Box::new(|_| 1.0),
            }],
            &[0.0, 2.0],
        );
        assert!(matches!(mixed, Err(QError::MixedPhase { .. })));
    }

    #[test]
    fn monic_polynomials() {
        let c = QContext::new(0.5, -0.7).unwrap();
        for x in [0.3, -0.2, 1.0] {
            assert!((al_salam_carlitz_monic(&c, 0, x) - 1.0).abs() < 1e-15);
            assert!((al_salam_carlitz_monic(&c, 1, x) - (x - 1.0 - c.a)).abs() < 1e-15);
            // Three-term recurrence x U_1 = U_2 + (1 + a) q U_1 - a (1 - q) U_0.
            let (u0, u1, u2) = (
                al_salam_carlitz_monic(&c, 0, x),
                al_salam_carlitz_monic(&c, 1, x),
                al_salam_carlitz_monic(&c, 2, x),
            );
            let rec = u2 + (1.0 + c.a) * c.q * u1 - c.a * (1.0 - c.q) * u0;
            assert!((x * u1 - rec).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn eigenvalues() {
        let c = hermite();
        assert_eq!(c.eigenvalue(0), 0.0);
        assert!(c.q_linearity_residual(6) < 1e-12);
        assert!(c.sigma_tilde_constancy() < 1e-12);
    }

    #[test]
    fn linear_lattice_selects_alpha_zero() {
        let c = hermite();
        let ok = linear_lattice_conditions(&c, 0.0, c.varsigma);
        assert!(ok.holds(1e-9), "{ok:?}");
        assert!(ok.skipped.is_empty());
        let off = linear_lattice_conditions(&c, 0.0, c.varsigma * 1.01);
        assert!((off.varsigma_residual - 0.01 * c.varsigma).abs() < 1e-9);
        for alpha in [0.5, 1.0] {
            assert!(!linear_lattice_conditions(&c, alpha, c.varsigma).holds(1e-9));
        }
    }
}
