//! Double-double helpers.
//!
//! `twofloat` 0.8 forms the reciprocal residual `1 - b * (1/b)` in plain
//! double precision when the divisor is itself a `TwoFloat`, which leaves the
//! quotient accurate to only about 1e-16. The long division below keeps the
//! full double-double precision.

use twofloat::TwoFloat;

/// `a / b` to double-double precision.
pub(crate) fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_is_double_double_accurate() {
        for (x, y) in [
            (7.3_f64, 12345.678_f64),
            (1.0, 3.7),
            (-2.5, 0.1),
            (1e-30, 7.0),
        ] {
            let (a, b) = (TwoFloat::from(x), TwoFloat::new_add(y, y * 1e-17));
            let q = div(a, b);
            let back = q * b - a;
            assert!(back.hi().abs() <= 1e-30 * x.abs(), "{x} {y} {back:?}");
        }
    }
}
