//! Hamiltonian `h1`, oscillator functions and the alpha-ladder factorization.
//!
//! For a family with data `(sigma, tau, rho, d_n)` the functions
//! `Phi_n = sqrt(rho) / d_n * P_n` are orthonormal eigenfunctions of
//!
//! ```text
//! h1 = -nu(s-1) e^{-d} - nu(s) e^{d} + (2 sigma + tau) I,   nu(s) = sqrt(sigma(s+1) (sigma(s) + tau(s)))
//! ```
//!
//! and `h1 = a_up(alpha) a_down(alpha)` for every real `alpha`. Only Charlier
//! at `alpha = 0` also has `[a_down, a_up] = 1`.

use thiserror::Error;

use crate::families::{FamilyError, FamilyKind, FamilySpec, DEFAULT_TAIL_TOL};
use crate::gridops::{
    adjoint_defect, eigen_defect, inner_product, operator_residual, Grid, GridError, GridFunction,
    Margins, ShiftOperator,
};

#[derive(Debug, Error)]
pub enum FactorizeError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("expected a Charlier family, got {0}")]
    NotCharlier(String),
}

/// Square root that absorbs rounding noise: tiny negative radicands give 0, real negatives give NaN.
pub fn clamped_sqrt(x: f64) -> f64 {
    if x >= 0.0 {
        x.sqrt()
    } else if x > -1e-14 {
        0.0
    } else {
        f64::NAN
    }
}

/// Points dropped at a truncated (infinite-support) edge when measuring residuals.
pub const TRUNCATED_EDGE_MARGIN: usize = 2;

/// `Phi_n` tabulated on `grid`; points outside the support get 0.
pub fn phi(family: &FamilySpec, n: u32, grid: &Grid) -> Result<GridFunction, FactorizeError> {
    let ln_d2 = family.squared_norm(n)?.ln();
    let support = family.support();
    let mut values = Vec::with_capacity(grid.count());
    for s in grid.points() {
        if s.fract() != 0.0 {
            return Err(FamilyError::OutsideSupport {
                family: family.name(),
                s: s.floor() as i64,
            }
            .into());
        }
        let si = s as i64;
        values.push(if support.contains(si) {
            (0.5 * (family.ln_weight(si)? - ln_d2)).exp() * family.eval_monic(n, s)?
        } else {
            0.0
        });
    }
    Ok(GridFunction::new(*grid, values)?)
}

/// A family, an alpha, and the lattice window on which everything is tabulated.
#[derive(Debug, Clone)]
pub struct FactorizationContext {
    family: FamilySpec,
    alpha: f64,
    grid: Grid,
}

impl FactorizationContext {
    pub fn new(family: FamilySpec, alpha: f64) -> Self {
        Self::with_tail_tol(family, alpha, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(family: FamilySpec, alpha: f64, tail_tol: f64) -> Self {
        let grid = Grid::unit(0, family.window_len(tail_tol)).expect("nonempty window");
        Self {
            family,
            alpha,
            grid,
        }
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Residual margins: exact support edges need none, truncated edges get a small one.
    pub fn margins(&self) -> Margins {
        if self.family.support().is_finite() {
            Margins::NONE
        } else {
            Margins::new(0, TRUNCATED_EDGE_MARGIN)
        }
    }

    pub fn nu(&self, s: f64) -> f64 {
        nu(&self.family, s)
    }

    pub fn phi(&self, n: u32) -> Result<GridFunction, FactorizeError> {
        phi(&self.family, n, &self.grid)
    }

    pub fn basis(&self, n_max: u32) -> Result<Vec<GridFunction>, FactorizeError> {
        (0..=n_max).map(|n| self.phi(n)).collect()
    }

    pub fn hamiltonian_h1(&self) -> ShiftOperator {
        hamiltonian_h1(&self.family)
    }

    /// `e^{-alpha d} (e^{d} sqrt(sigma) - sqrt(sigma + tau))`.
    pub fn alpha_down(&self) -> ShiftOperator {
        let (f, a) = (self.family, self.alpha);
        let half = half_steps(a);
        ShiftOperator::term(2 - half, move |s| clamped_sqrt(f.sigma(s - a + 1.0))).add(
            &ShiftOperator::term(-half, move |s| -clamped_sqrt(f.sigma_plus_tau(s - a))),
        )
    }

    /// `(sqrt(sigma) e^{-d} - sqrt(sigma + tau)) e^{alpha d}`.
    pub fn alpha_up(&self) -> ShiftOperator {
        let f = self.family;
        let half = half_steps(self.alpha);
        ShiftOperator::term(half - 2, move |s| clamped_sqrt(f.sigma(s)))
            .add(&ShiftOperator::term(half, move |s| {
                -clamped_sqrt(f.sigma_plus_tau(s))
            }))
    }

    /// `|| h1 Phi_n - lambda_n Phi_n ||_inf` on the interior.
    pub fn eigen_residual(&self, n: u32) -> Result<f64, FactorizeError> {
        let phi = self.phi(n)?;
        Ok(eigen_defect(
            &self.hamiltonian_h1(),
            &phi,
            self.family.lambda_n(n),
            self.margins(),
        )?)
    }

    /// `|| (a_up a_down - h1) Phi_n ||_inf`, taking the worse of two evaluations:
    /// the composed operator on the unit grid, and the two factors applied one
    /// after the other on the half-step grid (needed when alpha is a half integer).
    pub fn factorization_residual(&self, n: u32) -> Result<f64, FactorizeError> {
        let phi = self.phi(n)?;
        let h1 = self.hamiltonian_h1();
        let (down, up) = (self.alpha_down(), self.alpha_up());
        let composed = operator_residual(
            &up.compose(&down),
            &h1,
            std::slice::from_ref(&phi),
            self.margins(),
        )?;
        let stepped = up.apply(&down.apply(&phi.refine())?)?.coarsen();
        let sequential = stepped
            .axpy(-1.0, &h1.apply(&phi)?)?
            .max_abs_interior(self.margins());
        Ok(composed.max(sequential))
    }

    /// Numerical check of the two conditions under which `[a_down, a_up]` is a constant.
    pub fn commutator_conditions(&self) -> CommutatorConditions {
        commutator_conditions(&self.family, self.alpha, self.grid.count())
    }
}

fn half_steps(alpha: f64) -> i32 {
    let h = 2.0 * alpha;
    assert!(
        h.fract() == 0.0 && h.abs() < 1e6,
        "alpha must be a multiple of 1/2 to act on the lattice, got {alpha}"
    );
    h as i32
}

pub fn nu(family: &FamilySpec, s: f64) -> f64 {
    clamped_sqrt(family.sigma(s + 1.0) * family.sigma_plus_tau(s))
}

pub fn hamiltonian_h1(family: &FamilySpec) -> ShiftOperator {
    let f = *family;
    ShiftOperator::term(-2, move |s| -nu(&f, s - 1.0))
        .add(&ShiftOperator::term(2, move |s| -nu(&f, s)))
        .add(&ShiftOperator::multiplication(move |s| {
            2.0 * f.sigma(s) + f.tau(s)
        }))
}

/// Outcome of the constant-commutator conditions on a lattice window.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorConditions {
    /// Largest deviation of the ratio condition from 1.
    pub ratio_residual: f64,
    /// The constant commutator value, when the ratio condition holds and the second side is constant.
    pub lambda: Option<f64>,
    /// Max minus min of the second condition's left side, when it was evaluated.
    pub lambda_spread: Option<f64>,
    /// Points skipped because the ratio's denominator vanishes there.
    pub skipped: Vec<f64>,
}

impl CommutatorConditions {
    pub fn holds(&self) -> bool {
        self.lambda.is_some()
    }
}

pub const COMMUTATOR_CONDITION_TOL: f64 = 1e-10;

/// Evaluates both conditions at `s = 1..count`.
pub fn commutator_conditions(
    family: &FamilySpec,
    alpha: f64,
    count: usize,
) -> CommutatorConditions {
    let (sg, st) = (|x| family.sigma(x), |x| family.sigma_plus_tau(x));
    let mut ratio_residual = 0.0_f64;
    let mut skipped = Vec::new();
    let mut lhs2 = Vec::new();
    for k in 1..count {
        let s = k as f64;
        let den = sg(s) * st(s - 1.0);
        if den == 0.0 {
            skipped.push(s);
            continue;
        }
        let ratio = sg(s - alpha) * st(s - alpha) / den;
        ratio_residual = ratio_residual.max((ratio - 1.0).abs());
        lhs2.push(sg(s - alpha + 1.0) + st(s - alpha) - 2.0 * sg(s) - family.tau(s));
    }
    let (lambda, lambda_spread) = if ratio_residual < COMMUTATOR_CONDITION_TOL && !lhs2.is_empty() {
        let mean = lhs2.iter().sum::<f64>() / lhs2.len() as f64;
        let (lo, hi) = lhs2
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        let spread = hi - lo;
        let constant = spread < COMMUTATOR_CONDITION_TOL * (1.0 + mean.abs());
        (constant.then_some(mean), Some(spread))
    } else {
        (None, None)
    };
    CommutatorConditions {
        ratio_residual,
        lambda,
        lambda_spread,
        skipped,
    }
}

/// The Charlier oscillator: `a_down = sqrt(s+1) e^{d} - sqrt(mu)`, `a_up = sqrt(s) e^{-d} - sqrt(mu)`.
#[derive(Debug, Clone)]
pub struct CharlierOscillator {
    ctx: FactorizationContext,
    mu: f64,
}

/// Measured action of the Charlier ladder on `Phi_0..Phi_n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharlierLadderReport {
    /// `<a_up Phi_n, Phi_{n+1}>`.
    pub up_coefficients: Vec<f64>,
    /// `<a_down Phi_n, Phi_{n-1}>`, with 0 recorded for `n = 0`.
    pub down_coefficients: Vec<f64>,
    /// Max `|| a_up Phi_n - sqrt(n+1) Phi_{n+1} ||_inf`.
    pub up_residual: f64,
    /// Max `|| a_down Phi_n - sqrt(n) Phi_{n-1} ||_inf`.
    pub down_residual: f64,
    /// Max deviation of measured coefficients from `sqrt(lambda_{n+1})` and `sqrt(lambda_n)`.
    pub coefficient_error: f64,
}

impl CharlierOscillator {
    pub fn new(mu: f64) -> Result<Self, FactorizeError> {
        Self::from_family(FamilySpec::charlier(mu)?)
    }

    pub fn from_family(family: FamilySpec) -> Result<Self, FactorizeError> {
        match family.kind() {
            FamilyKind::Charlier { mu } => Ok(Self {
                ctx: FactorizationContext::new(family, 0.0),
                mu,
            }),
            _ => Err(FactorizeError::NotCharlier(family.to_string())),
        }
    }

    pub fn context(&self) -> &FactorizationContext {
        &self.ctx
    }

    pub fn lowering(&self) -> ShiftOperator {
        self.ctx.alpha_down()
    }

    pub fn raising(&self) -> ShiftOperator {
        self.ctx.alpha_up()
    }

    /// `e^{-mu/2} sqrt(mu^s / s!)`.
    pub fn ground_state(&self) -> Result<GridFunction, FactorizeError> {
        let mu = self.mu;
        Ok(GridFunction::from_fn(*self.ctx.grid(), |s| {
            (0.5 * (-mu + s * mu.ln() - libm::lgamma(s + 1.0))).exp()
        })?)
    }

    /// `a_up^n Phi_0 / sqrt(n!)`.
    pub fn build_phi_from_ground(&self, n: u32) -> Result<GridFunction, FactorizeError> {
        let up = self.raising();
        let mut f = self.ground_state()?;
        for k in 1..=n {
            f = up.apply(&f)?.scaled(1.0 / f64::from(k).sqrt());
        }
        Ok(f)
    }

    /// Max over `n <= n_max` of `|| ([a_down, a_up] - I) Phi_n ||_inf`.
    pub fn commutator_residual(&self, n_max: u32) -> Result<f64, FactorizeError> {
        let c = self.lowering().commutator(&self.raising());
        Ok(operator_residual(
            &c,
            &ShiftOperator::identity(),
            &self.ctx.basis(n_max)?,
            self.ctx.margins(),
        )?)
    }

    pub fn ladder_check(&self, n_max: u32) -> Result<CharlierLadderReport, FactorizeError> {
        let basis = self.ctx.basis(n_max + 1)?;
        let (up, down) = (self.raising(), self.lowering());
        let m = self.ctx.margins();
        let family = self.ctx.family();
        let mut report = CharlierLadderReport {
            up_coefficients: Vec::new(),
            down_coefficients: Vec::new(),
            up_residual: 0.0,
            down_residual: 0.0,
            coefficient_error: 0.0,
        };
        for n in 0..=n_max as usize {
            let raised = up.apply(&basis[n])?;
            let expected_up = family.lambda_n(n as u32 + 1).sqrt();
            let u = inner_product(&raised, &basis[n + 1])?;
            report.up_residual = report.up_residual.max(
                raised
                    .axpy(-expected_up, &basis[n + 1])?
                    .max_abs_interior(m),
            );
            report.coefficient_error = report.coefficient_error.max((u - expected_up).abs());
            report.up_coefficients.push(u);

            let lowered = down.apply(&basis[n])?;
            let expected_down = family.lambda_n(n as u32).sqrt();
            let (d, resid) = if n == 0 {
                (0.0, lowered.max_abs_interior(m))
            } else {
                (
                    inner_product(&lowered, &basis[n - 1])?,
                    lowered
                        .axpy(-expected_down, &basis[n - 1])?
                        .max_abs_interior(m),
                )
            };
            report.down_residual = report.down_residual.max(resid);
            report.coefficient_error = report.coefficient_error.max((d - expected_down).abs());
            report.down_coefficients.push(d);
        }
        // D_{n+1} = U_n follows from adjointness.
        for (u, d) in report
            .up_coefficients
            .iter()
            .zip(report.down_coefficients.iter().skip(1))
        {
            report.coefficient_error = report.coefficient_error.max((u - d).abs());
        }
        Ok(report)
    }

    /// Max over `n <= n_max` of `|| h1 (a_up Phi_n) - (lambda_n + 1) a_up Phi_n ||_inf`.
    pub fn spectrum_shift_residual(&self, n_max: u32) -> Result<f64, FactorizeError> {
        let h1 = self.ctx.hamiltonian_h1();
        let up = self.raising();
        let mut worst = 0.0_f64;
        for n in 0..=n_max {
            let raised = up.apply(&self.ctx.phi(n)?)?;
            let lambda = self.ctx.family().lambda_n(n) + 1.0;
            worst = worst.max(eigen_defect(&h1, &raised, lambda, self.ctx.margins())?);
        }
        Ok(worst)
    }

    /// Max over `n <= n_max` of `|| ([h1, a_up] - a_up) Phi_n ||_inf`.
    pub fn raising_commutator_residual(&self, n_max: u32) -> Result<f64, FactorizeError> {
        let up = self.raising();
        let lhs = self.ctx.hamiltonian_h1().commutator(&up);
        Ok(operator_residual(
            &lhs,
            &up,
            &self.ctx.basis(n_max)?,
            self.ctx.margins(),
        )?)
    }

    /// Same as [`Self::raising_commutator_residual`] but against the alternative
    /// right side `sqrt(mu) (mu - 1) + mu a_up`. That form is inconsistent with
    /// `h1 = a_up a_down` and `[a_down, a_up] = 1`, so this residual is large
    /// unless `mu = 1`.
    pub fn alternative_raising_residual(&self, n_max: u32) -> Result<f64, FactorizeError> {
        let up = self.raising();
        let mu = self.mu;
        let lhs = self.ctx.hamiltonian_h1().commutator(&up);
        let rhs = ShiftOperator::constant(mu.sqrt() * (mu - 1.0)).add(&up.scale(mu));
        Ok(operator_residual(
            &lhs,
            &rhs,
            &self.ctx.basis(n_max)?,
            self.ctx.margins(),
        )?)
    }

    pub fn adjoint_defect(&self, n_max: u32) -> Result<f64, FactorizeError> {
        Ok(adjoint_defect(
            &self.lowering(),
            &self.raising(),
            &self.ctx.basis(n_max)?,
        )?)
    }
}

/// Checks `a_up Phi_n = sqrt(n+1) Phi_{n+1}` and `a_down Phi_n = sqrt(n) Phi_{n-1}` for `n <= n_max`.
pub fn charlier_ladder_check(mu: f64, n_max: u32) -> Result<CharlierLadderReport, FactorizeError> {
    CharlierOscillator::new(mu)?.ladder_check(n_max)
}

/// Charlier `Phi_n` obtained by raising the ground state `n` times.
pub fn build_phi_from_ground(mu: f64, n: u32) -> Result<GridFunction, FactorizeError> {
    CharlierOscillator::new(mu)?.build_phi_from_ground(n)
}
