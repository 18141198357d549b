//! Dynamical algebras for the families with `sigma'' = 0`.
//!
//! Starting from the half-step operators `a`, `a+` (with `h1 = a a+ + tau' - sigma''`)
//! one builds `h2 = C_a^2 h1 + E`, the integer-shift operators `c`, `c+` and
//! the generators
//!
//! ```text
//! K0 = h2 / (-tau' C_a^2)
//! K- = -tau' C_a^2 c  - C_b C_a sigma'(0) (h2 - tau' C_a^2 - E)
//! K+ = -tau' C_a^2 c+ - C_b C_a sigma'(0) (h2 - tau' C_a^2 - E)
//! ```
//!
//! with `C_a^2 = -1/tau'`. The sign of `A0 = -2 tau' sigma'(0) C_b^2 (sigma'(0) + tau')`
//! decides between Sp(2,R) (Meixner), so(3) (Kravchuk) and the plain
//! oscillator (Charlier, `A0 = 0`).

use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::extended::div;
use crate::factorize::{clamped_sqrt, hamiltonian_h1, nu, FactorizationContext, FactorizeError};
use crate::families::{FamilyError, FamilyKind, FamilySpec};
use crate::gridops::{
    coefficient_difference, eigen_defect, inner_product, operator_residual, GridError,
    GridFunction, ShiftOperator,
};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("σ″ ≠ 0 for {family} (σ″ = {sigma_dd}); the dynamical algebra needs σ″ = 0")]
    CurvedSigma { family: String, sigma_dd: f64 },
    #[error("σ′(0)[τ′ + σ′(0)] = 0 with σ′(0) = 0 for {0}; C_b is undefined")]
    UndefinedCb(String),
    #[error("τ′ = {0} ≥ 0 gives no real C_a")]
    NonNegativeTauPrime(f64),
    #[error("{0} has no Lie-algebra generators (A0 = 0)")]
    NoGenerators(String),
    #[error("ladder coefficient kappa_{0} vanishes; the K+ cascade stops there")]
    KappaVanishes(u32),
    #[error("no explicit operator display for {0}")]
    NoDisplay(String),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraTag {
    Oscillator,
    Sp2R,
    SO3,
}

impl AlgebraTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraTag::Oscillator => "oscillator",
            AlgebraTag::Sp2R => "sp2r",
            AlgebraTag::SO3 => "so3",
        }
    }
}

/// `a = sqrt(sigma(s+1)) e^{d/2} - sqrt(sigma(s-1) + tau(s-1)) e^{-d/2}` and
/// `a+ = e^{-d/2} sqrt(sigma(s+1)) - e^{d/2} sqrt(sigma(s-1) + tau(s-1))`.
pub fn half_shift_ops(family: &FamilySpec) -> (ShiftOperator, ShiftOperator) {
    let f = *family;
    let up_root = move |s: f64| clamped_sqrt(f.sigma(s + 1.0));
    let down_root = move |s: f64| clamped_sqrt(f.sigma_plus_tau(s - 1.0));
    let a = ShiftOperator::term(1, up_root).add(&ShiftOperator::term(-1, move |s| -down_root(s)));
    let a_plus = ShiftOperator::shift(-1)
        .compose(&ShiftOperator::multiplication(up_root))
        .add(
            &ShiftOperator::shift(1)
                .compose(&ShiftOperator::multiplication(move |s| -down_root(s))),
        );
    (a, a_plus)
}

/// The right side of the `[a, a+]` expansion:
/// `sqrt(sigma(s+1/2) (sigma+tau)(s-3/2)) e^{-d} + sqrt(sigma(s+3/2) (sigma+tau)(s-1/2)) e^{d}
///  + h1 - (2 sigma + tau) + (3 sigma''/2 - tau')/2`.
pub fn half_shift_commutator_expansion(family: &FamilySpec) -> ShiftOperator {
    let f = *family;
    let shift_const = 0.5 * (1.5 * f.sigma_dd() - f.tau_prime());
    ShiftOperator::term(-2, move |s| {
        clamped_sqrt(f.sigma(s + 0.5) * f.sigma_plus_tau(s - 1.5))
    })
    .add(&ShiftOperator::term(2, move |s| {
        clamped_sqrt(f.sigma(s + 1.5) * f.sigma_plus_tau(s - 0.5))
    }))
    .add(&hamiltonian_h1(&f))
    .add(&ShiftOperator::multiplication(move |s| {
        shift_const - 2.0 * f.sigma(s) - f.tau(s)
    }))
}

/// Operators `h2, c, c+, K0, K+, K-` and the Casimir.
#[derive(Debug, Clone)]
pub struct Generators {
    pub h2: ShiftOperator,
    pub c: ShiftOperator,
    pub c_plus: ShiftOperator,
    pub k0: ShiftOperator,
    pub k_plus: ShiftOperator,
    pub k_minus: ShiftOperator,
    pub casimir: ShiftOperator,
}

/// Constants and generators of the algebra attached to a `sigma'' = 0` family.
#[derive(Debug, Clone)]
pub struct AlgebraContext {
    factorization: FactorizationContext,
    pub c_a: f64,
    pub c_b: Option<f64>,
    pub e: Option<f64>,
    pub a0: f64,
    pub a1: Option<f64>,
    /// Constant commutator value for the oscillator case.
    pub lambda: Option<f64>,
    pub tag: AlgebraTag,
    generators: Option<Generators>,
}

pub fn make_context(family: &FamilySpec) -> Result<AlgebraContext, AlgebraError> {
    if family.sigma_dd() != 0.0 {
        return Err(AlgebraError::CurvedSigma {
            family: family.to_string(),
            sigma_dd: family.sigma_dd(),
        });
    }
    let f = *family;
    let tp = f.tau_prime();
    if tp >= 0.0 {
        return Err(AlgebraError::NonNegativeTauPrime(tp));
    }
    let s1 = f.sigma_prime(0.0);
    let ca2 = -1.0 / tp;
    let c_a = ca2.sqrt();
    let factorization = FactorizationContext::new(f, 0.0);
    let a0_sign = -2.0 * tp * s1 * (s1 + tp);

    if a0_sign == 0.0 {
        if s1 == 0.0 {
            return Err(AlgebraError::UndefinedCb(family.to_string()));
        }
        let lambda = factorization.commutator_conditions().lambda;
        return Ok(AlgebraContext {
            factorization,
            c_a,
            c_b: None,
            e: None,
            a0: 0.0,
            a1: None,
            lambda,
            tag: AlgebraTag::Oscillator,
            generators: None,
        });
    }

    let bracket = s1 * f.tau(0.0) - f.sigma(0.0) * tp;
    let (tag, cb2, e) = if a0_sign > 0.0 {
        let cb2 = -tp / (s1 * (tp + s1));
        (AlgebraTag::Sp2R, cb2, -cb2 * bracket / (2.0 * tp))
    } else {
        let cb2 = tp / (s1 * (tp + s1));
        (AlgebraTag::SO3, cb2, cb2 * bracket / (2.0 * tp))
    };
    let c_b = cb2.sqrt();
    let unit = -tp * ca2; // equals 1 by the choice of C_a
    let a0 = -2.0 * tp * s1 * cb2 * ca2 * ca2 * unit * (s1 + tp);
    let a1 = -e * a0 / unit + cb2 * ca2.powi(3) * tp * tp * bracket;

    let h1 = hamiltonian_h1(&f);
    let h2 = h1.scale(ca2).add(&ShiftOperator::constant(e));
    let cbca = c_b * c_a;
    let c = ShiftOperator::multiplication(move |s| cbca * f.sigma(s + 1.0))
        .add(&ShiftOperator::term(-2, move |s| -cbca * nu(&f, s - 1.0)));
    let c_plus = ShiftOperator::multiplication(move |s| cbca * f.sigma(s + 1.0))
        .add(&ShiftOperator::term(2, move |s| -cbca * nu(&f, s)));
    let shifted_h2 = h2
        .add(&ShiftOperator::constant(-tp * ca2 - e))
        .scale(cbca * s1);
    let k0 = h2.scale(1.0 / unit);
    let k_minus = &c.scale(unit) - &shifted_h2;
    let k_plus = &c_plus.scale(unit) - &shifted_h2;
    let k0_sq = k0.compose(&k0);
    let casimir = match tag {
        AlgebraTag::Sp2R => &(&k0_sq - &k0) - &k_plus.compose(&k_minus),
        _ => &(&k0_sq + &k0) + &k_minus.compose(&k_plus),
    };

    Ok(AlgebraContext {
        factorization,
        c_a,
        c_b: Some(c_b),
        e: Some(e),
        a0,
        a1: Some(a1),
        lambda: None,
        tag,
        generators: Some(Generators {
            h2,
            c,
            c_plus,
            k0,
            k_plus,
            k_minus,
            casimir,
        }),
    })
}

/// Residuals of the three closed-algebra relations for `h2, c, c+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedAlgebraResiduals {
    pub h2_c: f64,
    pub h2_c_plus: f64,
    pub c_c_plus: f64,
}

impl ClosedAlgebraResiduals {
    pub fn max(&self) -> f64 {
        self.h2_c.max(self.h2_c_plus).max(self.c_c_plus)
    }
}

/// Residuals of `[K0, K+] = K+`, `[K0, K-] = -K-` and the `K+-` bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KRelationResiduals {
    pub k0_k_plus: f64,
    pub k0_k_minus: f64,
    pub k_bracket: f64,
}

impl KRelationResiduals {
    pub fn max(&self) -> f64 {
        self.k0_k_plus.max(self.k0_k_minus).max(self.k_bracket)
    }
}

/// Measured ladder action of `K+` and `K-` on one basis function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderAction {
    pub n: u32,
    /// `<K+ Phi_n, Phi_{n+1}>`; 0 when `Phi_{n+1}` does not exist.
    pub up_coeff: f64,
    /// `<K- Phi_n, Phi_{n-1}>`; 0 for `n = 0`.
    pub down_coeff: f64,
    /// `|| K+ Phi_n - kappa_{n+1} Phi_{n+1} ||_inf`.
    pub up_residual: f64,
    /// `|| K- Phi_n - kappa_n Phi_{n-1} ||_inf`.
    pub down_residual: f64,
}

/// `kappa_n = sqrt(n (n + 2E - 1))` for Sp(2,R) and `sqrt(-n (n + 2E - 1))` for so(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoefficients {
    pub tag: AlgebraTag,
    pub e: f64,
}

impl LadderCoefficients {
    /// `None` where the radicand is negative (outside the finite so(3) representation).
    pub fn kappa(&self, n: u32) -> Option<f64> {
        let nf = f64::from(n);
        let radicand = match self.tag {
            AlgebraTag::Sp2R => nf * (nf + 2.0 * self.e - 1.0),
            AlgebraTag::SO3 => -nf * (nf + 2.0 * self.e - 1.0),
            AlgebraTag::Oscillator => nf,
        };
        let r = clamped_sqrt(radicand);
        (!r.is_nan()).then_some(r)
    }
}

impl AlgebraContext {
    pub fn family(&self) -> &FamilySpec {
        self.factorization.family()
    }

    pub fn factorization(&self) -> &FactorizationContext {
        &self.factorization
    }

    pub fn generators(&self) -> Result<&Generators, AlgebraError> {
        self.generators
            .as_ref()
            .ok_or_else(|| AlgebraError::NoGenerators(self.family().to_string()))
    }

    pub fn ladder_coefficients(&self) -> LadderCoefficients {
        LadderCoefficients {
            tag: self.tag,
            e: self.e.unwrap_or(0.0),
        }
    }

    /// `E (E - 1)`, the Casimir eigenvalue.
    pub fn casimir_value(&self) -> Option<f64> {
        self.e.map(|e| e * (e - 1.0))
    }

    pub fn basis(&self, n_max: u32) -> Result<Vec<GridFunction>, AlgebraError> {
        Ok(self.factorization.basis(n_max)?)
    }

    fn residual(
        &self,
        lhs: &ShiftOperator,
        rhs: &ShiftOperator,
        basis: &[GridFunction],
    ) -> Result<f64, AlgebraError> {
        Ok(operator_residual(
            lhs,
            rhs,
            basis,
            self.factorization.margins(),
        )?)
    }

    /// The `c` operator built by composition through the half-step operators,
    /// `C_b C_a a e^{-d/2} sqrt(sigma(s+1))`, and its partner for `c+`.
    pub fn c_by_composition(&self) -> Result<(ShiftOperator, ShiftOperator), AlgebraError> {
        let cb = self
            .c_b
            .ok_or_else(|| AlgebraError::NoGenerators(self.family().to_string()))?;
        let f = *self.family();
        let (a, a_plus) = half_shift_ops(&f);
        let root = ShiftOperator::multiplication(move |s| clamped_sqrt(f.sigma(s + 1.0)));
        let c = a
            .compose(&ShiftOperator::shift(-1))
            .compose(&root)
            .scale(cb * self.c_a);
        let c_plus = root
            .compose(&ShiftOperator::shift(1))
            .compose(&a_plus)
            .scale(cb * self.c_a);
        Ok((c, c_plus))
    }

    /// Largest coefficient gap between the closed-form and composed `c`, `c+` at the given points.
    pub fn c_construction_gap(&self, points: &[f64]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        let (c, c_plus) = self.c_by_composition()?;
        Ok(coefficient_difference(&g.c, &c, points)
            .max(coefficient_difference(&g.c_plus, &c_plus, points)))
    }

    /// `max || (h1 - a a+ - (tau' - sigma'')) Phi_n ||`.
    pub fn half_shift_identity_residual(
        &self,
        basis: &[GridFunction],
    ) -> Result<f64, AlgebraError> {
        let f = self.family();
        let (a, a_plus) = half_shift_ops(f);
        let rhs = a
            .compose(&a_plus)
            .add(&ShiftOperator::constant(f.tau_prime() - f.sigma_dd()));
        self.residual(&hamiltonian_h1(f), &rhs, basis)
    }

    /// `max || ([a, a+] - expansion) Phi_n ||`.
    pub fn half_shift_commutator_residual(
        &self,
        basis: &[GridFunction],
    ) -> Result<f64, AlgebraError> {
        let f = self.family();
        let (a, a_plus) = half_shift_ops(f);
        self.residual(
            &a.commutator(&a_plus),
            &half_shift_commutator_expansion(f),
            basis,
        )
    }

    pub fn verify_closed_algebra(
        &self,
        basis: &[GridFunction],
    ) -> Result<ClosedAlgebraResiduals, AlgebraError> {
        let g = self.generators()?;
        let f = self.family();
        let (tp, ca2) = (f.tau_prime(), self.c_a * self.c_a);
        let (cb, e) = (self.c_b.unwrap_or(0.0), self.e.unwrap_or(0.0));
        let s1 = f.sigma_prime(0.0);
        let inhom =
            g.h2.add(&ShiftOperator::constant(-tp * ca2 - e))
                .scale(cb * self.c_a * s1);
        let rhs_c = &g.c.scale(tp * ca2) + &inhom;
        let rhs_cp = &g.c_plus.scale(-tp * ca2) - &inhom;
        let ff = *f;
        let rhs_cc = (&ShiftOperator::multiplication(move |s| ff.sigma(s))
            - &g.h2.add(&ShiftOperator::constant(-e)).scale(s1))
            .scale(cb * cb);
        Ok(ClosedAlgebraResiduals {
            h2_c: self.residual(&g.h2.commutator(&g.c), &rhs_c, basis)?,
            h2_c_plus: self.residual(&g.h2.commutator(&g.c_plus), &rhs_cp, basis)?,
            c_c_plus: self.residual(&g.c.commutator(&g.c_plus), &rhs_cc, basis)?,
        })
    }

    pub fn verify_k_relations(
        &self,
        basis: &[GridFunction],
    ) -> Result<KRelationResiduals, AlgebraError> {
        let g = self.generators()?;
        let bracket = match self.tag {
            AlgebraTag::Sp2R => g.k_minus.commutator(&g.k_plus),
            _ => g.k_plus.commutator(&g.k_minus),
        };
        Ok(KRelationResiduals {
            k0_k_plus: self.residual(&g.k0.commutator(&g.k_plus), &g.k_plus, basis)?,
            k0_k_minus: self.residual(&g.k0.commutator(&g.k_minus), &-&g.k_minus, basis)?,
            k_bracket: self.residual(&bracket, &g.k0.scale(2.0), basis)?,
        })
    }

    /// Largest `|| K^2 Phi_n - E(E-1) Phi_n ||_inf / |E(E-1)|` over `basis`.
    pub fn casimir_relative_residual(&self, basis: &[GridFunction]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        let value = self.casimir_value().unwrap_or(0.0);
        let scale = if value != 0.0 { value.abs() } else { 1.0 };
        let m = self.factorization.margins();
        basis.iter().try_fold(0.0_f64, |w, f| {
            Ok(w.max(eigen_defect(&g.casimir, f, value, m)? / scale))
        })
    }

    /// Largest `|| K0 Phi_n - (n + E) Phi_n ||_inf`, with `basis[n] = Phi_n`.
    pub fn k0_eigen_residual(&self, basis: &[GridFunction]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        let e = self.e.unwrap_or(0.0);
        let m = self.factorization.margins();
        basis.iter().enumerate().try_fold(0.0_f64, |w, (n, f)| {
            Ok(w.max(eigen_defect(&g.k0, f, n as f64 + e, m)?))
        })
    }

    /// Largest `|| h2 Phi_n - (C_a^2 lambda_n + E) Phi_n ||_inf`, with `basis[n] = Phi_n`.
    pub fn h2_eigen_residual(&self, basis: &[GridFunction]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        let (e, ca2) = (self.e.unwrap_or(0.0), self.c_a * self.c_a);
        let m = self.factorization.margins();
        basis.iter().enumerate().try_fold(0.0_f64, |w, (n, f)| {
            let lambda = ca2 * self.family().lambda_n(n as u32) + e;
            Ok(w.max(eigen_defect(&g.h2, f, lambda, m)?))
        })
    }

    pub fn ladder_action(&self, n: u32) -> Result<LadderAction, AlgebraError> {
        let g = self.generators()?;
        let kappa = self.ladder_coefficients();
        let m = self.factorization.margins();
        let phi_n = self.factorization.phi(n)?;
        let raised = g.k_plus.apply(&phi_n)?;
        let (up_coeff, up_residual) = if n < self.family().max_degree() {
            let next = self.factorization.phi(n + 1)?;
            let k = kappa.kappa(n + 1).unwrap_or(f64::NAN);
            (
                inner_product(&raised, &next)?,
                raised.axpy(-k, &next)?.max_abs_interior(m),
            )
        } else {
            (0.0, raised.max_abs_interior(m))
        };
        let lowered = g.k_minus.apply(&phi_n)?;
        let (down_coeff, down_residual) = if n == 0 {
            (0.0, lowered.max_abs_interior(m))
        } else {
            let prev = self.factorization.phi(n - 1)?;
            let k = kappa.kappa(n).unwrap_or(f64::NAN);
            (
                inner_product(&lowered, &prev)?,
                lowered.axpy(-k, &prev)?.max_abs_interior(m),
            )
        };
        Ok(LadderAction {
            n,
            up_coeff,
            down_coeff,
            up_residual,
            down_residual,
        })
    }

    /// `K+^n Phi_0 / (kappa_1 ... kappa_n)`.
    ///
    /// `K+` is unbounded, so rounding noise in high modes grows by roughly the
    /// window length per application. The cascade therefore runs in double-double,
    /// starting from a ground state built by the Pearson recurrence.
    pub fn build_phi_via_kplus(&self, n: u32) -> Result<GridFunction, AlgebraError> {
        self.generators()?;
        let f = self.family();
        let grid = *self.factorization.grid();
        let tf = TwoFloat::from;
        let zero = tf(0.0);
        let [c0, c1, c2] = f.sigma_coeffs();
        let [t0, t1] = f.tau_coeffs();
        let sigma = |s: f64| tf(c0) + tf(s) * (tf(c1) + tf(s) * c2);
        let tau = |s: f64| tf(t0) + tf(s) * t1;
        let nu = |s: f64| {
            let r = sigma(s + 1.0) * (sigma(s) + tau(s));
            if r.hi() > 0.0 {
                r.sqrt()
            } else {
                zero
            }
        };

        let (tp, s1) = (tf(f.tau_prime()), tf(f.sigma_prime(0.0)));
        let ca2 = div(tf(-1.0), tp);
        let bracket = s1 * t0 - tf(c0) * tp;
        let denom = s1 * (tp + s1);
        let (cb2, e) = match self.tag {
            AlgebraTag::Sp2R => {
                let cb2 = div(-tp, denom);
                (cb2, div(-cb2 * bracket, tp * 2.0))
            }
            _ => {
                let cb2 = div(tp, denom);
                (cb2, div(cb2 * bracket, tp * 2.0))
            }
        };
        let cbca = (cb2 * ca2).sqrt();
        let unit = -tp * ca2;
        let kappa = |k: u32| {
            let kf = tf(f64::from(k));
            let r = kf * (kf + e * 2.0 - 1.0);
            let r = if self.tag == AlgebraTag::SO3 { -r } else { r };
            if r.hi() > 0.0 {
                Some(r.sqrt())
            } else {
                None
            }
        };

        // Ground state sqrt(rho / sum rho) with rho(s+1) / rho(s) = (sigma + tau)(s) / sigma(s+1).
        let points: Vec<f64> = grid.points().collect();
        let mut rho = Vec::with_capacity(points.len());
        let mut r = tf(1.0);
        for &s in &points {
            rho.push(r);
            let next = sigma(s + 1.0);
            r = if next.hi() == 0.0 {
                zero
            } else {
                div(r * (sigma(s) + tau(s)), next)
            };
        }
        let total = rho.iter().fold(zero, |acc, &v| acc + v);
        let mut values: Vec<TwoFloat> = rho.iter().map(|&v| div(v, total).sqrt()).collect();

        let minus: Vec<TwoFloat> = points
            .iter()
            .map(|&s| cbca * ca2 * s1 * nu(s - 1.0))
            .collect();
        let plus: Vec<TwoFloat> = points
            .iter()
            .map(|&s| -cbca * nu(s) * (unit - s1 * ca2))
            .collect();
        let diag: Vec<TwoFloat> = points
            .iter()
            .map(|&s| cbca * (unit * sigma(s + 1.0) - s1 * ca2 * (sigma(s) * 2.0 + tau(s) - tp)))
            .collect();
        for k in 1..=n {
            let kk = kappa(k).ok_or(AlgebraError::KappaVanishes(k))?;
            let len = values.len();
            values = (0..len)
                .map(|i| {
                    let mut acc = diag[i] * values[i];
                    if i > 0 {
                        acc += minus[i] * values[i - 1];
                    }
                    if i + 1 < len {
                        acc += plus[i] * values[i + 1];
                    }
                    div(acc, kk)
                })
                .collect();
        }
        Ok(GridFunction::new(
            grid,
            values.iter().map(|v| v.hi()).collect(),
        )?)
    }

    /// Largest `|<K+ f, g> - <f, K- g>|` over `basis`.
    pub fn k_adjoint_defect(&self, basis: &[GridFunction]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        Ok(crate::gridops::adjoint_defect(
            &g.k_plus, &g.k_minus, basis,
        )?)
    }

    /// Largest `|<c f, g> - <f, c+ g>|` over `basis`.
    pub fn c_adjoint_defect(&self, basis: &[GridFunction]) -> Result<f64, AlgebraError> {
        let g = self.generators()?;
        Ok(crate::gridops::adjoint_defect(&g.c, &g.c_plus, basis)?)
    }
}

/// How a transcribed operator relates to the constructed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Equal,
    Negated,
    Different,
}

/// Coefficient gaps between a transcribed operator and a constructed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplayComparison {
    /// Max coefficient difference `display - constructed`.
    pub direct: f64,
    /// Max coefficient difference `display + constructed`.
    pub negated: f64,
}

impl DisplayComparison {
    pub fn compare(display: &ShiftOperator, constructed: &ShiftOperator, points: &[f64]) -> Self {
        Self {
            direct: coefficient_difference(display, constructed, points),
            negated: coefficient_difference(display, &-constructed, points),
        }
    }

    pub fn agreement(&self, tol: f64) -> Agreement {
        if self.direct < tol {
            Agreement::Equal
        } else if self.negated < tol {
            Agreement::Negated
        } else {
            Agreement::Different
        }
    }
}

/// Sample points used when comparing transcribed operators.
pub const DISPLAY_POINTS: [f64; 3] = [1.0, 2.0, 5.0];

/// `(K0, K+, K-)` as written out in closed form for Meixner and Kravchuk.
pub fn explicit_example_operators(
    family: &FamilySpec,
) -> Result<(ShiftOperator, ShiftOperator, ShiftOperator), AlgebraError> {
    let rt = |x: f64| clamped_sqrt(x);
    match family.kind() {
        FamilyKind::Meixner { gamma: g, mu } => {
            let (sm, d) = (mu.sqrt(), 1.0 - mu);
            let lo = move |s: f64| rt(s * (s - 1.0 + g));
            let hi = move |s: f64| rt((s + 1.0) * (s + g));
            let k0 = ShiftOperator::term(-2, move |s| -lo(s) * sm / d)
                .add(&ShiftOperator::term(2, move |s| -hi(s) * sm / d))
                .add(&ShiftOperator::multiplication(move |s| {
                    (s + g / 2.0) * (1.0 + mu) / d
                }));
            let k_plus = ShiftOperator::term(-2, move |s| -lo(s) / d)
                .add(&ShiftOperator::term(2, move |s| -mu * hi(s) / d))
                .add(&ShiftOperator::multiplication(move |s| {
                    sm / d * (2.0 * s + g)
                }));
            let k_minus = ShiftOperator::term(-2, move |s| -mu * lo(s) / d)
                .add(&ShiftOperator::term(2, move |s| -hi(s) / d))
                .add(&ShiftOperator::multiplication(move |s| {
                    sm / d * (2.0 * s + g)
                }));
            Ok((k0, k_plus, k_minus))
        }
        FamilyKind::Kravchuk { p, n } => {
            let nf = f64::from(n);
            let spq = (p * (1.0 - p)).sqrt();
            let lo = move |s: f64| rt(s * (nf - s + 1.0));
            let hi = move |s: f64| rt((s + 1.0) * (nf - s));
            let k0 = ShiftOperator::term(-2, move |s| -spq * lo(s))
                .add(&ShiftOperator::term(2, move |s| -spq * hi(s)))
                .add(&ShiftOperator::multiplication(move |s| {
                    nf * (p - 0.5) - s * (2.0 * p - 1.0)
                }));
            let k_plus = ShiftOperator::term(-2, move |s| (1.0 - p) * lo(s))
                .add(&ShiftOperator::term(2, move |s| p * hi(s)))
                .add(&ShiftOperator::multiplication(move |s| {
                    -spq * (2.0 * s - nf)
                }));
            let k_minus = ShiftOperator::term(-2, move |s| p * lo(s))
                .add(&ShiftOperator::term(2, move |s| (1.0 - p) * hi(s)))
                .add(&ShiftOperator::multiplication(move |s| {
                    -spq * (2.0 * s - nf)
                }));
            Ok((k0, k_plus, k_minus))
        }
        _ => Err(AlgebraError::NoDisplay(family.to_string())),
    }
}

/// Closed-form `(b, b+)` for Meixner and Kravchuk, as written out coefficient by coefficient.
pub fn explicit_b_operators(
    family: &FamilySpec,
) -> Result<(ShiftOperator, ShiftOperator), AlgebraError> {
    let rt = |x: f64| clamped_sqrt(x);
    match family.kind() {
        FamilyKind::Meixner { gamma: g, mu } => {
            let d = 1.0 - mu;
            let b = ShiftOperator::term(-1, move |s| -rt((s - 1.0 + g) * mu / d))
                .add(&ShiftOperator::term(1, move |s| rt((s + 1.0) / d)));
            let b_plus = ShiftOperator::term(1, move |s| -rt((s - 0.5 + g) * mu / d))
                .add(&ShiftOperator::term(-1, move |s| rt((s + 0.5) / d)));
            Ok((b, b_plus))
        }
        FamilyKind::Kravchuk { p, n } => {
            let nf = f64::from(n);
            let b = ShiftOperator::term(-1, move |s| -rt(p * (nf - s + 1.0)))
                .add(&ShiftOperator::term(1, move |s| rt((1.0 - p) * (s + 1.0))));
            // Both terms carry e^{+d/2} in this transcription.
            let b_plus = ShiftOperator::term(1, move |s| -rt(p * (nf - s + 0.5)))
                .add(&ShiftOperator::term(1, move |s| rt((1.0 - p) * (s + 0.5))));
            Ok((b, b_plus))
        }
        _ => Err(AlgebraError::NoDisplay(family.to_string())),
    }
}

/// Comparison of the transcribed generators with the constructed ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleComparison {
    pub k0: DisplayComparison,
    pub k_plus: DisplayComparison,
    pub k_minus: DisplayComparison,
    pub b: DisplayComparison,
    pub b_plus: DisplayComparison,
}

pub fn compare_explicit_example(ctx: &AlgebraContext) -> Result<ExampleComparison, AlgebraError> {
    let f = ctx.family();
    let g = ctx.generators()?;
    let (k0, kp, km) = explicit_example_operators(f)?;
    let (b, bp) = explicit_b_operators(f)?;
    let (a, a_plus) = half_shift_ops(f);
    let pts = &DISPLAY_POINTS;
    Ok(ExampleComparison {
        k0: DisplayComparison::compare(&k0, &g.k0, pts),
        k_plus: DisplayComparison::compare(&kp, &g.k_plus, pts),
        k_minus: DisplayComparison::compare(&km, &g.k_minus, pts),
        b: DisplayComparison::compare(&b, &a.scale(ctx.c_a), pts),
        b_plus: DisplayComparison::compare(&bp, &a_plus.scale(ctx.c_a), pts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meixner() -> AlgebraContext {
        make_context(&FamilySpec::meixner(3.0, 0.4).unwrap()).unwrap()
    }

    fn kravchuk() -> AlgebraContext {
        make_context(&FamilySpec::kravchuk(0.3, 20).unwrap()).unwrap()
    }

    #[test]
    fn constants() {
        let m = meixner();
        assert_eq!(m.tag, AlgebraTag::Sp2R);
        assert!((m.c_a - (1.0f64 / 0.6).sqrt()).abs() < 1e-12);
        assert!((m.c_b.unwrap() - (0.6f64 / 0.4).sqrt()).abs() < 1e-12);
        assert!((m.e.unwrap() - 1.5).abs() < 1e-12);
        assert!((m.a0 - 2.0).abs() < 1e-12 && m.a1.unwrap().abs() < 1e-10);

        let k = kravchuk();
        assert_eq!(k.tag, AlgebraTag::SO3);
        assert!((k.c_a - 0.7f64.sqrt()).abs() < 1e-12);
        assert!((k.c_b.unwrap() - (1.0f64 / 0.3).sqrt()).abs() < 1e-12);
        assert!((k.e.unwrap() + 10.0).abs() < 1e-12);
        assert!((k.a0 + 2.0).abs() < 1e-12 && k.a1.unwrap().abs() < 1e-10);

        let c = make_context(&FamilySpec::charlier(2.0).unwrap()).unwrap();
        assert_eq!(c.tag, AlgebraTag::Oscillator);
        assert_eq!(c.a0, 0.0);
        assert!(c.generators().is_err());
        assert!((c.lambda.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hahn_is_refused() {
        let err = make_context(&FamilySpec::hahn(1.0, 1.0, 12).unwrap()).unwrap_err();
        assert!(err.to_string().contains("σ″ ≠ 0"), "{err}");
    }

    #[test]
    fn closed_algebra_and_brackets() {
        for ctx in [meixner(), kravchuk()] {
            let basis = ctx.basis(8).unwrap();
            let r = ctx.verify_closed_algebra(&basis).unwrap();
            assert!(r.max() < 1e-8, "{:?} {r:?}", ctx.tag);
            let k = ctx.verify_k_relations(&basis).unwrap();
            assert!(k.max() < 1e-8, "{:?} {k:?}", ctx.tag);
            assert!(ctx.c_construction_gap(&DISPLAY_POINTS).unwrap() < 1e-12);
            assert!(ctx.half_shift_identity_residual(&basis).unwrap() < 1e-9);
            assert!(ctx.half_shift_commutator_residual(&basis).unwrap() < 1e-9);
        }
    }

    #[test]
    fn casimir_and_ladders() {
        for (ctx, value) in [(meixner(), 0.75), (kravchuk(), 110.0)] {
            assert!((ctx.casimir_value().unwrap() - value).abs() < 1e-12);
            let basis = ctx.basis(8).unwrap();
            assert!(ctx.casimir_relative_residual(&basis).unwrap() < 1e-7);
            assert!(ctx.k0_eigen_residual(&basis).unwrap() < 1e-8);
            assert!(ctx.h2_eigen_residual(&basis).unwrap() < 1e-8);
        }
        let m = meixner().ladder_action(2).unwrap();
        assert!((m.up_coeff - 15f64.sqrt()).abs() < 1e-8);
        let k = kravchuk().ladder_action(2).unwrap();
        assert!((k.up_coeff - 54f64.sqrt()).abs() < 1e-8);
        assert!(kravchuk().ladder_action(0).unwrap().down_residual < 1e-9);
    }

    #[test]
    fn kappa_rules() {
        let sp = LadderCoefficients {
            tag: AlgebraTag::Sp2R,
            e: 1.5,
        };
        assert_eq!(sp.kappa(0), Some(0.0));
        assert!((sp.kappa(3).unwrap() - 15f64.sqrt()).abs() < 1e-15);
        let so = LadderCoefficients {
            tag: AlgebraTag::SO3,
            e: -5.0,
        };
        assert_eq!(so.kappa(11), Some(0.0));
        assert!(so.kappa(12).is_none());
    }

    #[test]
    fn transcribed_operators() {
        let m = compare_explicit_example(&meixner()).unwrap();
        assert_eq!(m.k0.agreement(1e-10), Agreement::Equal);
        assert_eq!(m.k_plus.agreement(1e-10), Agreement::Negated);
        assert_eq!(m.k_minus.agreement(1e-10), Agreement::Negated);
        assert_eq!(m.b.agreement(1e-10), Agreement::Equal);
        assert_eq!(m.b_plus.agreement(1e-10), Agreement::Equal);
        let k = compare_explicit_example(&kravchuk()).unwrap();
        assert_eq!(k.k0.agreement(1e-10), Agreement::Equal);
        assert_eq!(k.b.agreement(1e-10), Agreement::Equal);
        assert_eq!(k.b_plus.agreement(1e-10), Agreement::Different);
        assert_eq!(k.k_plus.agreement(1e-10), Agreement::Different);
        assert_eq!(k.k_minus.agreement(1e-10), Agreement::Different);
    }
}
