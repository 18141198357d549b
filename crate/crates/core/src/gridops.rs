//! Tabulated functions on evenly spaced lattices and finite shift operators.
//!
//! A [`ShiftOperator`] is a finite sum `sum_t c_t(s) e^{t d/ds}` whose shifts
//! are stored as integer counts of half steps, so `e^{d/ds / 2}` is exact.
//! Coefficients are closures evaluated at the output point; composition
//! shifts their arguments symbolically.
//!
//! Reads outside a function's window are zero. Operators are applied only to
//! functions whose grid step divides every shift.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("shift {shift} is not a multiple of the grid step {step}")]
    NonCommensurateShift { shift: f64, step: f64 },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("inner products need a unit-step grid")]
    NotUnitStep,
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value at s = {s}")]
    NonFinite { s: f64 },
    #[error("a grid needs at least one point and a finite start")]
    InvalidGrid,
    #[error("malformed table: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Unit,
    Half,
}

impl Step {
    /// Step length measured in half steps.
    pub fn half_steps(self) -> i32 {
        match self {
            Step::Unit => 2,
            Step::Half => 1,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Step::Unit => 1.0,
            Step::Half => 0.5,
        }
    }
}

/// Points `start + k * step` for `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    count: usize,
    step: Step,
}

impl Grid {
    pub fn new(start: f64, count: usize, step: Step) -> Result<Self, GridError> {
        if count == 0 || !start.is_finite() {
            return Err(GridError::InvalidGrid);
        }
        Ok(Self { start, count, step })
    }

    /// Unit-step grid `start, start+1, ..., start+count-1`.
    pub fn unit(start: i64, count: usize) -> Result<Self, GridError> {
        Self::new(start as f64, count, Step::Unit)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> Step {
        self.step
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step.value()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.point(k))
    }

    /// Half-step grid spanning the same interval.
    pub fn refined(&self) -> Grid {
        match self.step {
            Step::Half => *self,
            Step::Unit => Grid {
                start: self.start,
                count: 2 * self.count - 1,
                step: Step::Half,
            },
        }
    }
}

/// Number of points excluded at each end when measuring residuals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Margins {
    pub left: usize,
    pub right: usize,
}

impl Margins {
    pub const NONE: Margins = Margins { left: 0, right: 0 };

    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Sample {
    s: f64,
    value: f64,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.count {
            return Err(GridError::LengthMismatch {
                expected: grid.count,
                found: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { s: grid.point(k) });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.count],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at index `k`; zero outside the window.
    pub fn get(&self, k: i64) -> f64 {
        usize::try_from(k)
            .ok()
            .and_then(|k| self.values.get(k).copied())
            .unwrap_or(0.0)
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.points().zip(self.values.iter().copied())
    }

    fn same_grid(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(GridError::GridMismatch)
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        GridFunction::new(self.grid, values)
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Largest `|value|` at indices `margins.left .. count - margins.right`.
    pub fn max_abs_interior(&self, margins: Margins) -> f64 {
        let end = self.values.len().saturating_sub(margins.right);
        self.values
            .get(margins.left.min(end)..end)
            .unwrap_or(&[])
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Places a unit-step function on the half-step grid, with zeros in between.
    pub fn refine(&self) -> GridFunction {
        let grid = self.grid.refined();
        if grid == self.grid {
            return self.clone();
        }
        let mut values = vec![0.0; grid.count];
        for (k, v) in self.values.iter().enumerate() {
            values[2 * k] = *v;
        }
        GridFunction { grid, values }
    }

    /// Keeps the integer points of a half-step function produced by [`Self::refine`].
    pub fn coarsen(&self) -> GridFunction {
        match self.grid.step {
            Step::Unit => self.clone(),
            Step::Half => GridFunction {
                grid: Grid {
                    start: self.grid.start,
                    count: self.grid.count.div_ceil(2),
                    step: Step::Unit,
                },
                values: self.values.iter().step_by(2).copied().collect(),
            },
        }
    }

    /// CSV with header `s,value`; values carry 17 significant digits.
    pub fn to_csv(&self) -> Result<String, GridError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "value"])?;
        for (s, v) in self.samples() {
            w.write_record([format!("{s}"), format!("{v:.16e}")])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| GridError::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| GridError::Format(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self, GridError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut samples = Vec::new();
        for rec in r.deserialize::<Sample>() {
            samples.push(rec?);
        }
        Self::from_samples(samples)
    }

    /// JSON array of `{"s": .., "value": ..}` objects.
    pub fn to_json(&self) -> Result<String, GridError> {
        let samples: Vec<Sample> = self
            .samples()
            .map(|(s, value)| Sample { s, value })
            .collect();
        Ok(serde_json::to_string(&samples)?)
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        Self::from_samples(serde_json::from_str(text)?)
    }

    fn from_samples(samples: Vec<Sample>) -> Result<Self, GridError> {
        let first = samples
            .first()
            .ok_or_else(|| GridError::Format("no rows".into()))?;
        let step = match samples.get(1).map(|b| b.s - first.s) {
            None => Step::Unit,
            Some(1.0) => Step::Unit,
            Some(0.5) => Step::Half,
            Some(d) => return Err(GridError::Format(format!("unsupported spacing {d}"))),
        };
        let grid = Grid::new(first.s, samples.len(), step)?;
        for (k, smp) in samples.iter().enumerate() {
            if smp.s != grid.point(k) {
                return Err(GridError::Format(format!(
                    "row {k} is off the lattice: s = {}",
                    smp.s
                )));
            }
        }
        GridFunction::new(grid, samples.into_iter().map(|s| s.value).collect())
    }
}

/// `sum_s f(s) g(s)` over a shared unit-step window.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<f64, GridError> {
    f.same_grid(g)?;
    if f.grid.step != Step::Unit {
        return Err(GridError::NotUnitStep);
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum())
}

/// Coefficient of a shift term, as a function of the lattice point.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Finite sum of coefficient-times-shift terms.
#[derive(Clone, Default)]
pub struct ShiftOperator {
    terms: BTreeMap<i32, Coefficient>,
}

impl fmt::Debug for ShiftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shifts: Vec<f64> = self.terms.keys().map(|&k| f64::from(k) / 2.0).collect();
        f.debug_struct("ShiftOperator")
            .field("shifts", &shifts)
            .finish()
    }
}

impl ShiftOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::term(0, move |_| c)
    }

    /// Pure shift `e^{(half/2) d/ds}`.
    pub fn shift(half: i32) -> Self {
        Self::term(half, |_| 1.0)
    }

    /// Multiplication by `f(s)`.
    pub fn multiplication(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::term(0, f)
    }

    /// Single term `f(s) e^{(half/2) d/ds}`.
    pub fn term(half: i32, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(half, Arc::new(f) as Coefficient);
        Self { terms }
    }

    /// Shifts present, in half steps, ascending.
    pub fn shifts(&self) -> Vec<i32> {
        self.terms.keys().copied().collect()
    }

    /// Coefficient of the `half`-step term at `s`; zero if the term is absent.
    pub fn coefficient(&self, half: i32, s: f64) -> f64 {
        self.terms.get(&half).map_or(0.0, |c| c(s))
    }

    fn insert(&mut self, half: i32, c: Coefficient) {
        match self.terms.remove(&half) {
            None => {
                self.terms.insert(half, c);
            }
            Some(prev) => {
                self.terms.insert(half, Arc::new(move |s| prev(s) + c(s)));
            }
        }
    }

    pub fn add(&self, other: &ShiftOperator) -> ShiftOperator {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.insert(k, c.clone());
        }
        out
    }

    pub fn scale(&self, factor: f64) -> ShiftOperator {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| {
                let c = c.clone();
                (k, Arc::new(move |s| factor * c(s)) as Coefficient)
            })
            .collect();
        ShiftOperator { terms }
    }

    /// Product `self * other`: apply `other` first.
    pub fn compose(&self, other: &ShiftOperator) -> ShiftOperator {
        let mut out = ShiftOperator::zero();
        for (&k1, c1) in &self.terms {
            let offset = f64::from(k1) / 2.0;
            for (&k2, c2) in &other.terms {
                let (c1, c2) = (c1.clone(), c2.clone());
                out.insert(k1 + k2, Arc::new(move |s| c1(s) * c2(s + offset)));
            }
        }
        out
    }

    pub fn commutator(&self, other: &ShiftOperator) -> ShiftOperator {
        self.varsigma_commutator(other, 1.0)
    }

    /// `self * other - varsigma * other * self`.
    pub fn varsigma_commutator(&self, other: &ShiftOperator, varsigma: f64) -> ShiftOperator {
        self.compose(other)
            .add(&other.compose(self).scale(-varsigma))
    }

    pub fn pow(&self, k: u32) -> ShiftOperator {
        (0..k).fold(ShiftOperator::identity(), |acc, _| self.compose(&acc))
    }

    fn offsets(&self, step: Step) -> Result<Vec<(i64, &Coefficient)>, GridError> {
        let hs = step.half_steps();
        self.terms
            .iter()
            .map(|(&k, c)| {
                if k % hs != 0 {
                    Err(GridError::NonCommensurateShift {
                        shift: f64::from(k) / 2.0,
                        step: step.value(),
                    })
                } else {
                    Ok((i64::from(k / hs), c))
                }
            })
            .collect()
    }

    fn apply_with(
        &self,
        f: &GridFunction,
        combine: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction, GridError> {
        let offsets = self.offsets(f.grid.step)?;
        let mut values = vec![0.0; f.len()];
        for (k, out) in values.iter_mut().enumerate() {
            let s = f.grid.point(k);
            for (off, c) in &offsets {
                let v = f.get(k as i64 + off);
                // Zero reads (padding or genuine zeros) contribute nothing even
                // where the coefficient is undefined, e.g. outside the support.
                if v != 0.0 {
                    *out += combine(c(s), v);
                }
            }
            if !out.is_finite() {
                return Err(GridError::NonFinite { s });
            }
        }
        Ok(GridFunction {
            grid: f.grid,
            values,
        })
    }

    /// `(O f)(s) = sum_t c_t(s) f(s + t)`.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction, GridError> {
        self.apply_with(f, |c, v| c * v)
    }

    /// `sum_t |c_t(s)| |f(s + t)|`, the natural scale for rounding errors of [`Self::apply`].
    pub fn apply_magnitude(&self, f: &GridFunction) -> Result<GridFunction, GridError> {
        self.apply_with(f, |c, v| (c * v).abs())
    }
}

impl Add for &ShiftOperator {
    type Output = ShiftOperator;
    fn add(self, rhs: &ShiftOperator) -> ShiftOperator {
        ShiftOperator::add(self, rhs)
    }
}

impl Sub for &ShiftOperator {
    type Output = ShiftOperator;
    fn sub(self, rhs: &ShiftOperator) -> ShiftOperator {
        ShiftOperator::add(self, &rhs.scale(-1.0))
    }
}

impl Neg for &ShiftOperator {
    type Output = ShiftOperator;
    fn neg(self) -> ShiftOperator {
        self.scale(-1.0)
    }
}

impl Mul for &ShiftOperator {
    type Output = ShiftOperator;
    fn mul(self, rhs: &ShiftOperator) -> ShiftOperator {
        self.compose(rhs)
    }
}

impl Mul<&ShiftOperator> for f64 {
    type Output = ShiftOperator;
    fn mul(self, rhs: &ShiftOperator) -> ShiftOperator {
        rhs.scale(self)
    }
}

/// Largest `|<A f, g> - <f, B g>|` over all pairs drawn from `basis`.
pub fn adjoint_defect(
    a: &ShiftOperator,
    b: &ShiftOperator,
    basis: &[GridFunction],
) -> Result<f64, GridError> {
    let af: Vec<_> = basis.iter().map(|f| a.apply(f)).collect::<Result<_, _>>()?;
    let bg: Vec<_> = basis.iter().map(|g| b.apply(g)).collect::<Result<_, _>>()?;
    let mut worst = 0.0_f64;
    for (f, af) in basis.iter().zip(&af) {
        for (g, bg) in basis.iter().zip(&bg) {
            worst = worst.max((inner_product(af, g)? - inner_product(f, bg)?).abs());
        }
    }
    Ok(worst)
}

/// Largest interior value of `|(lhs - rhs) f|` over `basis`.
pub fn operator_residual(
    lhs: &ShiftOperator,
    rhs: &ShiftOperator,
    basis: &[GridFunction],
    margins: Margins,
) -> Result<f64, GridError> {
    let diff = lhs - rhs;
    basis.iter().try_fold(0.0_f64, |m, f| {
        Ok(m.max(diff.apply(f)?.max_abs_interior(margins)))
    })
}

/// Interior `|| O f - lambda f ||_inf`.
pub fn eigen_defect(
    op: &ShiftOperator,
    f: &GridFunction,
    lambda: f64,
    margins: Margins,
) -> Result<f64, GridError> {
    Ok(op.apply(f)?.axpy(-lambda, f)?.max_abs_interior(margins))
}

/// Largest coefficient difference between two operators over the listed points and all shifts.
pub fn coefficient_difference(a: &ShiftOperator, b: &ShiftOperator, points: &[f64]) -> f64 {
    let mut shifts = a.shifts();
    shifts.extend(b.shifts());
    shifts.sort_unstable();
    shifts.dedup();
    let mut worst = 0.0_f64;
    for &k in &shifts {
        for &s in points {
            worst = worst.max((a.coefficient(k, s) - b.coefficient(k, s)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(count: usize) -> GridFunction {
        GridFunction::from_fn(Grid::unit(0, count).unwrap(), |s| s).unwrap()
    }

    #[test]
    fn identity_and_shift() {
        let f = ramp(6);
        assert_eq!(ShiftOperator::identity().apply(&f).unwrap(), f);
        let g = ShiftOperator::shift(2).apply(&f).unwrap();
        assert_eq!(g.values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 0.0]);
    }

    #[test]
    fn half_shift_needs_half_grid() {
        let f = ramp(4);
        let err = ShiftOperator::shift(1).apply(&f).unwrap_err();
        assert!(
            matches!(err, GridError::NonCommensurateShift { shift, step } if shift == 0.5 && step == 1.0)
        );
        let fine = f.refine();
        let g = ShiftOperator::shift(1).apply(&fine).unwrap();
        assert_eq!(g.values()[1], 1.0);
        assert_eq!(g.values()[0], 0.0);
    }

    #[test]
    fn compose_shifts_arguments() {
        let back = ShiftOperator::shift(2).compose(&ShiftOperator::shift(-2));
        assert_eq!(back.shifts(), vec![0]);
        assert_eq!(back.coefficient(0, 3.0), 1.0);
        // sqrt(s) e^{-d} * e^{d} sqrt(s) = s
        let down = ShiftOperator::term(-2, |s: f64| s.sqrt());
        let up = ShiftOperator::shift(2).compose(&ShiftOperator::multiplication(|s: f64| s.sqrt()));
        let prod = down.compose(&up);
        for s in [1.0, 2.0, 7.0] {
            assert!((prod.coefficient(0, s) - s).abs() < 1e-14);
        }
    }

    #[test]
    fn algebraic_helpers() {
        let op = ShiftOperator::term(2, |s| s + 1.0).add(&ShiftOperator::constant(3.0));
        let z = &op - &op;
        for s in [0.0, 1.5, 4.0] {
            for k in z.shifts() {
                assert_eq!(z.coefficient(k, s), 0.0);
            }
        }
        let f = ramp(5);
        let g = ShiftOperator::constant(2.5).apply(&f).unwrap();
        assert_eq!(g, f.scaled(2.5));
        let c = op.commutator(&op);
        assert!(coefficient_difference(&c, &ShiftOperator::zero(), &[0.0, 1.0, 2.0]) == 0.0);
        let a = ShiftOperator::term(2, |s| s);
        let b = ShiftOperator::term(-2, |s| s * s);
        assert!(
            coefficient_difference(
                &a.varsigma_commutator(&b, 1.0),
                &a.commutator(&b),
                &[1.0, 2.0]
            ) == 0.0
        );
        assert!(
            coefficient_difference(&a.varsigma_commutator(&b, 0.0), &a.compose(&b), &[1.0, 2.0])
                == 0.0
        );
    }

    #[test]
    fn inner_products_and_adjoints() {
        let f = ramp(5);
        assert_eq!(inner_product(&f, &f).unwrap(), 30.0);
        let other = ramp(6);
        assert!(matches!(
            inner_product(&f, &other),
            Err(GridError::GridMismatch)
        ));
        assert!(matches!(
            inner_product(&f.refine(), &f.refine()),
            Err(GridError::NotUnitStep)
        ));
        let id = ShiftOperator::identity();
        assert_eq!(
            adjoint_defect(&id, &id, &[f.clone(), f.scaled(2.0)]).unwrap(),
            0.0
        );
        // e^{d} and e^{-d} are adjoint on functions vanishing at the edges
        let g =
            GridFunction::new(Grid::unit(0, 5).unwrap(), vec![0.0, 1.0, -2.0, 0.5, 0.0]).unwrap();
        let h =
            GridFunction::new(Grid::unit(0, 5).unwrap(), vec![0.0, 3.0, 1.0, 2.0, 0.0]).unwrap();
        let d =
            adjoint_defect(&ShiftOperator::shift(2), &ShiftOperator::shift(-2), &[g, h]).unwrap();
        assert!(d < 1e-15);
    }

    #[test]
    fn undefined_coefficients_skip_zero_reads() {
        let f = ramp(4);
        let op = ShiftOperator::term(-2, |s: f64| (s - 0.5).sqrt());
        // At s = 0 the read is out of window, so the NaN coefficient is never used.
        assert!(op.apply(&f).is_ok());
        let bad = ShiftOperator::term(0, |s: f64| (s - 2.5).sqrt());
        assert!(matches!(bad.apply(&f), Err(GridError::NonFinite { s }) if s == 1.0));
    }

    #[test]
    fn serialization_round_trips() {
        let f =
            GridFunction::from_fn(Grid::unit(-2, 7).unwrap(), |s| (s * 0.37).sin() / 3.0).unwrap();
        let csv = f.to_csv().unwrap();
        assert!(csv.starts_with("s,value\n"));
        assert_eq!(GridFunction::from_csv(&csv).unwrap(), f);
        let json = f.to_json().unwrap();
        assert_eq!(GridFunction::from_json(&json).unwrap(), f);
        let half = f.refine();
        assert_eq!(
            GridFunction::from_json(&half.to_json().unwrap()).unwrap(),
            half
        );
        assert!(GridFunction::from_json("[]").is_err());
        assert!(GridFunction::from_json(r#"[{"s":0,"value":1},{"s":0.3,"value":2}]"#).is_err());
    }

    #[test]
    fn refine_and_coarsen() {
        let f = ramp(4);
        let fine = f.refine();
        assert_eq!(fine.len(), 7);
        assert_eq!(fine.grid().point(1), 0.5);
        assert_eq!(fine.coarsen(), f);
    }

    #[test]
    fn margins_limit_the_window() {
        let f =
            GridFunction::new(Grid::unit(0, 5).unwrap(), vec![9.0, 1.0, 2.0, 1.0, 7.0]).unwrap();
        assert_eq!(f.max_abs_interior(Margins::NONE), 9.0);
        assert_eq!(f.max_abs_interior(Margins::new(1, 1)), 2.0);
        assert_eq!(f.max_abs_interior(Margins::new(3, 3)), 0.0);
    }
}
