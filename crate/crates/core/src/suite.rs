//! Verification suites: every check as a function from a family to report rows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{make_context, AlgebraContext, AlgebraError, AlgebraTag};
use crate::factorize::{CharlierOscillator, FactorizationContext, FactorizeError};
use crate::families::{FamilyError, FamilySpec, ParsedFamilyString, DEFAULT_TAIL_TOL};
use crate::gridops::{inner_product, GridError};
use crate::qext::{linear_lattice_conditions, q_basis, q_gram_deviation, QContext, QError};
use crate::report::{CheckReport, ConfigEcho, Report};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown check {given:?}; available: {}", Check::NAMES.join(", "))]
    UnknownCheck { given: String },
    #[error("check {check} does not apply to {family}: {reason}")]
    NotApplicable {
        check: Check,
        family: String,
        reason: String,
    },
    #[error("invalid tolerance override {0:?}; expected <check>=<value>")]
    BadOverride(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Q(#[from] QError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Orthogonality,
    Pearson,
    Difference,
    Eigen,
    Factorization,
    Commutator,
    Ladder,
    Algebra,
    Casimir,
    QExample,
    All,
}

impl Check {
    pub const NAMES: [&'static str; 11] = [
        "orthogonality",
        "pearson",
        "difference",
        "eigen",
        "factorization",
        "commutator",
        "ladder",
        "algebra",
        "casimir",
        "qexample",
        "all",
    ];

    /// Every concrete check in report order.
    pub const CONCRETE: [Check; 10] = [
        Check::Orthogonality,
        Check::Pearson,
        Check::Difference,
        Check::Eigen,
        Check::Factorization,
        Check::Commutator,
        Check::Ladder,
        Check::Algebra,
        Check::Casimir,
        Check::QExample,
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    /// Default tolerance of the check's main quantity.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Orthogonality | Check::Difference | Check::Eigen | Check::Factorization => 1e-9,
            Check::Pearson => 1e-12,
            Check::Commutator => 1e-10,
            Check::Ladder | Check::Algebra => 1e-8,
            Check::Casimir | Check::QExample => 1e-7,
            Check::All => 0.0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::NAMES
            .iter()
            .position(|n| *n == s.trim().to_ascii_lowercase())
            .map(|i| {
                if i == 10 {
                    Check::All
                } else {
                    Self::CONCRETE[i]
                }
            })
            .ok_or_else(|| SuiteError::UnknownCheck {
                given: s.to_string(),
            })
    }
}

/// A family on the uniform lattice or the q-lattice example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyFamily {
    Uniform(FamilySpec),
    QLattice(QContext),
}

impl FromStr for AnyFamily {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if ParsedFamilyString::parse(s)?.name == "alsalam-carlitz-1" {
            Ok(AnyFamily::QLattice(s.parse()?))
        } else {
            Ok(AnyFamily::Uniform(s.parse()?))
        }
    }
}

impl fmt::Display for AnyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyFamily::Uniform(s) => s.fmt(f),
            AnyFamily::QLattice(q) => q.fmt(f),
        }
    }
}

impl AnyFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AnyFamily::Uniform(s) => s.name(),
            AnyFamily::QLattice(_) => "alsalam-carlitz-1",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        match self {
            AnyFamily::Uniform(s) => s
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            AnyFamily::QLattice(q) => [("q".to_string(), q.q), ("a".to_string(), q.a)].into(),
        }
    }

    /// The checks that make sense for this family, in report order.
    pub fn applicable_checks(&self) -> Vec<Check> {
        match self {
            AnyFamily::QLattice(_) => vec![Check::QExample],
            AnyFamily::Uniform(spec) => {
                let mut v = vec![
                    Check::Orthogonality,
                    Check::Pearson,
                    Check::Difference,
                    Check::Eigen,
                    Check::Factorization,
                    Check::Commutator,
                ];
                if spec.sigma_dd() == 0.0 {
                    v.extend([Check::Ladder, Check::Algebra]);
                    if spec.sigma_prime(0.0) + spec.tau_prime() != 0.0 {
                        v.push(Check::Casimir);
                    }
                }
                v
            }
        }
    }
}

/// The default report line-up.
pub const DEFAULT_FAMILIES: [&str; 5] = [
    "charlier:mu=2",
    "meixner:gamma=3,mu=0.4",
    "kravchuk:p=0.3,N=20",
    "hahn:alpha=1,beta=1,N=20",
    "alsalam-carlitz-1:q=0.5,a=-1",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Overrides every per-check degree range when set.
    pub n_max: Option<u32>,
    pub alpha_set: Vec<f64>,
    pub tail_tol: f64,
    pub tol_overrides: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_max: None,
            alpha_set: vec![0.0, 0.5, 1.0],
            tail_tol: DEFAULT_TAIL_TOL,
            tol_overrides: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    /// Parses `check=value` and records it.
    pub fn add_override(&mut self, spec: &str) -> Result<(), SuiteError> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| SuiteError::BadOverride(spec.to_string()))?;
        let check: Check = k.parse()?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| SuiteError::BadOverride(spec.to_string()))?;
        if check == Check::All || value.is_nan() || value < 0.0 {
            return Err(SuiteError::BadOverride(spec.to_string()));
        }
        self.tol_overrides.insert(check.name().to_string(), value);
        Ok(())
    }

    fn tol(&self, check: Check, default: f64) -> f64 {
        self.tol_overrides
            .get(check.name())
            .copied()
            .unwrap_or(default)
    }

    fn n_max(&self, default: u32, family: &FamilySpec) -> u32 {
        self.n_max.unwrap_or(default).min(family.max_degree())
    }

    pub fn echo(&self, command: &str, families: &[AnyFamily], checks: &[Check]) -> ConfigEcho {
        ConfigEcho {
            command: command.to_string(),
            families: families.iter().map(|f| f.to_string()).collect(),
            checks: checks.iter().map(|c| c.name().to_string()).collect(),
            n_max: self.n_max,
            alpha_set: self.alpha_set.clone(),
            tail_tol: self.tail_tol,
            tol_overrides: self.tol_overrides.clone(),
        }
    }
}

struct Rows<'a> {
    family: &'a AnyFamily,
    cfg: &'a SuiteConfig,
    check: Check,
    out: Vec<CheckReport>,
}

impl<'a> Rows<'a> {
    fn new(family: &'a AnyFamily, cfg: &'a SuiteConfig, check: Check) -> Self {
        Self {
            family,
            cfg,
            check,
            out: Vec::new(),
        }
    }

    fn push(
        &mut self,
        quantity: &str,
        n_range: [u32; 2],
        residual: f64,
        default_tol: f64,
    ) -> &mut CheckReport {
        let tol = self.cfg.tol(self.check, default_tol);
        self.out.push(CheckReport::measured(
            self.check.name(),
            quantity,
            self.family.name(),
            self.family.params(),
            n_range,
            residual,
            tol,
        ));
        self.out.last_mut().expect("just pushed")
    }

    /// A yes/no row: residual 0 when `ok`, 1 otherwise, against tolerance 0.5.
    fn push_verdict(&mut self, quantity: &str, n_range: [u32; 2], ok: bool) -> &mut CheckReport {
        self.push(quantity, n_range, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

fn not_applicable(check: Check, family: &AnyFamily, reason: impl Into<String>) -> SuiteError {
    SuiteError::NotApplicable {
        check,
        family: family.to_string(),
        reason: reason.into(),
    }
}

fn max_of(values: impl IntoIterator<Item = Result<f64, SuiteError>>) -> Result<f64, SuiteError> {
    values.into_iter().try_fold(0.0_f64, |m, v| {
        let v = v?;
        Ok(if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        })
    })
}

fn uniform_context(spec: &FamilySpec, alpha: f64, cfg: &SuiteConfig) -> FactorizationContext {
    FactorizationContext::with_tail_tol(*spec, alpha, cfg.tail_tol)
}

fn algebra_constants(row: &mut CheckReport, ctx: &AlgebraContext) {
    row.algebra_tag = Some(ctx.tag);
    row.c_a = Some(ctx.c_a);
    row.c_b = ctx.c_b;
    row.e = ctx.e;
    row.a0 = Some(ctx.a0);
    row.a1 = ctx.a1;
}

/// Runs one check (or all applicable ones) on one family.
pub fn run_check(
    family: &AnyFamily,
    check: Check,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>, SuiteError> {
    if check == Check::All {
        let mut out = Vec::new();
        for c in family.applicable_checks() {
            out.extend(run_check(family, c, cfg)?);
        }
        return Ok(out);
    }
    let mut rows = Rows::new(family, cfg, check);
    match (family, check) {
        (AnyFamily::QLattice(q), Check::QExample) => q_example(q, &mut rows)?,
        (AnyFamily::QLattice(_), _) => {
            return Err(not_applicable(
                check,
                family,
                "only the qexample check runs on the q-lattice",
            ))
        }
        (AnyFamily::Uniform(_), Check::QExample) => {
            return Err(not_applicable(
                check,
                family,
                "qexample needs alsalam-carlitz-1",
            ))
        }
        (AnyFamily::Uniform(spec), _) => uniform_check(spec, check, &mut rows)?,
    }
    Ok(rows.out)
}

fn uniform_check(spec: &FamilySpec, check: Check, rows: &mut Rows<'_>) -> Result<(), SuiteError> {
    let cfg = rows.cfg;
    let tol = check.default_tolerance();
    let base = uniform_context(spec, 0.0, cfg);
    match check {
        Check::Orthogonality => {
            let n = cfg.n_max(12, spec);
            let basis = base.basis(n)?;
            let mut worst = 0.0_f64;
            for (i, f) in basis.iter().enumerate() {
                for (j, g) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((inner_product(f, g)? - target).abs());
                }
            }
            rows.push("gram", [0, n], worst, tol);
        }
        Check::Pearson => {
            let len = base.grid().count() as i64;
            let support = spec.support();
            let last = support.end.map_or(len - 1, |e| e - 1);
            // Interior points: both s and s + 1 inside the support.
            let worst = max_of((support.start..last).map(|s| Ok(spec.pearson_relative(s)?.abs())))?;
            rows.push("pearson_relative", [0, 0], worst, tol);
        }
        Check::Difference => {
            let n = cfg.n_max(12, spec);
            let len = base.grid().count();
            let worst = max_of((0..=n).flat_map(|k| {
                (0..len).map(move |s| Ok(spec.difference_equation_relative(k, s as f64)?.abs()))
            }))?;
            rows.push("difference_relative", [0, n], worst, tol);
        }
        Check::Eigen => {
            let n = cfg.n_max(12, spec);
            let worst = max_of((0..=n).map(|k| Ok(base.eigen_residual(k)?)))?;
            rows.push("h1", [0, n], worst, tol);
        }
        Check::Factorization => {
            let n = cfg.n_max(10, spec);
            for &alpha in &cfg.alpha_set {
                let ctx = uniform_context(spec, alpha, cfg);
                let worst = max_of((0..=n).map(|k| Ok(ctx.factorization_residual(k)?)))?;
                rows.push("a_up_a_down", [0, n], worst, tol).alpha = Some(alpha);
            }
        }
        Check::Commutator => commutator_check(spec, rows)?,
        Check::Ladder => ladder_check(spec, rows)?,
        Check::Algebra => algebra_check(spec, rows)?,
        Check::Casimir => {
            let ctx = make_context(spec)?;
            if ctx.tag == AlgebraTag::Oscillator {
                return Err(not_applicable(
                    check,
                    rows.family,
                    "the oscillator algebra has no Casimir of this form",
                ));
            }
            let n = cfg.n_max(8, spec);
            let basis = ctx.basis(n)?;
            let value = ctx.casimir_value().unwrap_or(f64::NAN);
            let r = rows.push(
                "casimir_relative",
                [0, n],
                ctx.casimir_relative_residual(&basis)?,
                1e-7,
            );
            r.value = Some(value);
            r.detail = Some(format!("eigenvalue {value}"));
            algebra_constants(r, &ctx);
            let k0 = ctx.k0_eigen_residual(&basis)?;
            let r = rows.push("k0_eigen", [0, n], k0, 1e-8);
            r.value = ctx.e;
            algebra_constants(r, &ctx);
        }
        Check::QExample | Check::All => unreachable!("dispatched earlier"),
    }
    Ok(())
}

fn commutator_check(spec: &FamilySpec, rows: &mut Rows<'_>) -> Result<(), SuiteError> {
    let cfg = rows.cfg;
    let is_charlier = spec.name() == "charlier";
    let mut selection_ok = true;
    let mut summary = Vec::new();
    for &alpha in &cfg.alpha_set {
        let outcome = uniform_context(spec, alpha, cfg).commutator_conditions();
        let expected = is_charlier && alpha == 0.0;
        selection_ok &= outcome.holds() == expected;
        summary.push(format!(
            "alpha={alpha}: {}",
            match outcome.lambda {
                Some(l) => format!("constant {l}"),
                None => "not constant".to_string(),
            }
        ));
        if let Some(l) = outcome.lambda {
            let r = rows.push("constant_commutator", [0, 0], (l - 1.0).abs(), 1e-10);
            r.alpha = Some(alpha);
            r.value = Some(l);
        }
    }
    rows.push_verdict("selection", [0, 0], selection_ok).detail = Some(summary.join("; "));
    if is_charlier {
        let n = cfg.n_max(12, spec);
        let osc = CharlierOscillator::from_family(*spec)?;
        rows.push("a_down_a_up", [0, n], osc.commutator_residual(n)?, 1e-10)
            .alpha = Some(0.0);
    }
    Ok(())
}

fn ladder_check(spec: &FamilySpec, rows: &mut Rows<'_>) -> Result<(), SuiteError> {
    let cfg = rows.cfg;
    if spec.name() == "charlier" {
        let osc = CharlierOscillator::from_family(*spec)?;
        let n = cfg.n_max(10, spec);
        let lad = osc.ladder_check(n)?;
        rows.push("coefficients", [0, n], lad.coefficient_error, 1e-9);
        rows.push(
            "action",
            [0, n],
            lad.up_residual.max(lad.down_residual),
            1e-9,
        );
        let nb = cfg.n_max(8, spec);
        let built = max_of((0..=nb).map(|k| {
            let b = osc.build_phi_from_ground(k)?;
            Ok(b.axpy(-1.0, &osc.context().phi(k)?)?
                .max_abs_interior(osc.context().margins()))
        }))?;
        rows.push("ground_state_build", [0, nb], built, 1e-8);
        return Ok(());
    }
    let ctx = make_context(spec)?;
    let n = cfg.n_max(10, spec);
    let kappa = ctx.ladder_coefficients();
    let mut coeff = 0.0_f64;
    let mut action = 0.0_f64;
    for k in 0..=n {
        let act = ctx.ladder_action(k)?;
        let up = if k < spec.max_degree() {
            kappa.kappa(k + 1).unwrap_or(f64::NAN)
        } else {
            0.0
        };
        let down = kappa.kappa(k).unwrap_or(f64::NAN);
        coeff = coeff.max((act.up_coeff - up).abs());
        if k > 0 {
            coeff = coeff.max((act.down_coeff - down).abs());
        }
        action = action.max(act.up_residual).max(act.down_residual);
    }
    algebra_constants(rows.push("coefficients", [0, n], coeff, 1e-8), &ctx);
    algebra_constants(rows.push("action", [0, n], action, 1e-8), &ctx);
    let cascade = max_of((0..=n).map(|k| {
        let built = ctx.build_phi_via_kplus(k)?;
        Ok(built
            .axpy(-1.0, &ctx.factorization().phi(k)?)?
            .max_abs_interior(ctx.factorization().margins()))
    }))?;
    algebra_constants(rows.push("k_plus_cascade", [0, n], cascade, 1e-7), &ctx);
    Ok(())
}

fn algebra_check(spec: &FamilySpec, rows: &mut Rows<'_>) -> Result<(), SuiteError> {
    let cfg = rows.cfg;
    let ctx = make_context(spec).map_err(|e| match e {
        AlgebraError::CurvedSigma { .. } => {
            not_applicable(Check::Algebra, rows.family, e.to_string())
        }
        other => other.into(),
    })?;
    let n = cfg.n_max(8, spec);
    let basis = ctx.basis(n)?;
    let ident = ctx.half_shift_identity_residual(&basis)?;
    algebra_constants(rows.push("half_shift_identity", [0, n], ident, 1e-8), &ctx);
    let comm = ctx.half_shift_commutator_residual(&basis)?;
    algebra_constants(rows.push("half_shift_commutator", [0, n], comm, 1e-8), &ctx);
    if ctx.tag == AlgebraTag::Oscillator {
        let r = rows.push(
            "oscillator_constant",
            [0, 0],
            (ctx.lambda.unwrap_or(f64::NAN) - 1.0).abs(),
            1e-10,
        );
        r.value = ctx.lambda;
        algebra_constants(r, &ctx);
        return Ok(());
    }
    let closed = ctx.verify_closed_algebra(&basis)?.max();
    algebra_constants(rows.push("closed_algebra", [0, n], closed, 1e-8), &ctx);
    let k = ctx.verify_k_relations(&basis)?.max();
    algebra_constants(rows.push("k_relations", [0, n], k, 1e-8), &ctx);
    let constants = (ctx.a0.abs() - 2.0)
        .abs()
        .max(ctx.a1.map_or(f64::NAN, f64::abs));
    algebra_constants(rows.push("a0_a1", [0, 0], constants, 1e-10), &ctx);
    let adj = ctx.k_adjoint_defect(&basis)?;
    algebra_constants(rows.push("k_adjoint", [0, n], adj, 1e-8), &ctx);
    Ok(())
}

fn q_example(q: &QContext, rows: &mut Rows<'_>) -> Result<(), SuiteError> {
    let cfg = rows.cfg;
    let n = cfg.n_max.unwrap_or(5);
    let basis = q_basis(q, n)?;
    rows.push("eigen", [0, n], q.eigen_residual(&basis)?, 1e-7);
    rows.push(
        "factorization",
        [0, n],
        q.factorization_residual(&basis)?,
        1e-7,
    );
    rows.push(
        "varsigma_commutator",
        [0, n],
        q.varsigma_commutator_residual(&basis)?,
        1e-7,
    )
    .value = Some(q.lambda);
    rows.push("adjoint", [0, n], q.adjoint_defect(&basis)?, 1e-6);
    let ng = cfg.n_max.unwrap_or(6);
    rows.push("gram", [0, ng], q_gram_deviation(q, ng)?, 1e-7);
    rows.push(
        "q_linearity",
        [0, n],
        q.q_linearity_residual(n.max(2)),
        1e-12,
    );
    rows.push(
        "sigma_tilde_constant",
        [0, 0],
        q.sigma_tilde_constancy(),
        1e-12,
    )
    .value = Some(q.a);
    let mut selection_ok = true;
    let mut summary = Vec::new();
    for &alpha in &cfg.alpha_set {
        let out = linear_lattice_conditions(q, alpha, q.varsigma);
        let holds = out.holds(1e-9);
        selection_ok &= holds == (alpha == 0.0);
        summary.push(format!(
            "alpha={alpha}: {}",
            if holds { "holds" } else { "fails" }
        ));
        if alpha == 0.0 {
            let r = rows.push(
                "linear_lattice_conditions",
                [0, 0],
                out.varsigma_residual.max(out.lambda_residual),
                1e-9,
            );
            r.alpha = Some(alpha);
            r.value = Some(q.varsigma);
        }
    }
    rows.push_verdict("linear_lattice_selection", [0, 0], selection_ok)
        .detail = Some(summary.join("; "));
    Ok(())
}

/// Runs `checks` on every family, in parallel, and assembles the rows in input order.
pub fn run_suite(
    families: &[AnyFamily],
    checks: &[Check],
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>, SuiteError> {
    let jobs: Vec<(AnyFamily, Check)> = families
        .iter()
        .flat_map(|f| checks.iter().map(move |c| (*f, *c)))
        .collect();
    let results: Vec<Result<Vec<CheckReport>, SuiteError>> = jobs
        .par_iter()
        .map(|(f, c)| run_check(f, *c, cfg))
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// The full report over the default families and all applicable checks.
pub fn default_report(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let families: Vec<AnyFamily> = DEFAULT_FAMILIES
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let rows = run_suite(&families, &[Check::All], cfg)?;
    Ok(Report::new(
        cfg.echo("report", &families, &[Check::All]),
        rows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in Check::CONCRETE {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert_eq!("all".parse::<Check>().unwrap(), Check::All);
        let err = "nope".parse::<Check>().unwrap_err().to_string();
        assert!(
            err.contains("orthogonality") && err.contains("qexample"),
            "{err}"
        );
    }

    #[test]
    fn family_dispatch() {
        let f: AnyFamily = "alsalam-carlitz-1:q=0.5,a=-1".parse().unwrap();
        assert!(matches!(f, AnyFamily::QLattice(_)));
        let h: AnyFamily = "hahn:alpha=1,beta=1,N=12".parse().unwrap();
        assert_eq!(h.applicable_checks().len(), 6);
        let c: AnyFamily = "charlier:mu=2".parse().unwrap();
        assert!(!c.applicable_checks().contains(&Check::Casimir));
    }

    #[test]
    fn hahn_algebra_is_refused() {
        let h: AnyFamily = "hahn:alpha=1,beta=1,N=12".parse().unwrap();
        let err = run_check(&h, Check::Algebra, &SuiteConfig::default()).unwrap_err();
        assert!(err.to_string().contains("σ″ ≠ 0"), "{err}");
    }

    #[test]
    fn charlier_commutator_passes() {
        let c: AnyFamily = "charlier:mu=2".parse().unwrap();
        let rows = run_check(&c, Check::Commutator, &SuiteConfig::default()).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn override_to_zero_fails() {
        let mut cfg = SuiteConfig::default();
        cfg.add_override("eigen=0").unwrap();
        assert!(cfg.add_override("eigen").is_err());
        assert!(cfg.add_override("bogus=1").is_err());
        let c: AnyFamily = "charlier:mu=2".parse().unwrap();
        let rows = run_check(&c, Check::Eigen, &cfg).unwrap();
        assert!(!rows[0].pass);
    }
}
