use discrete_oscillator::families::FamilySpec;
use discrete_oscillator::gridops::{Grid, GridFunction, Margins, ShiftOperator};
use proptest::prelude::*;

fn operator(c: [f64; 3]) -> ShiftOperator {
    ShiftOperator::term(-2, move |s| c[0] + 0.1 * s)
        .add(&ShiftOperator::multiplication(move |s| c[1] * s * s))
        .add(&ShiftOperator::term(1, move |_| c[2]))
}

fn family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (0.1..5.0_f64).prop_map(|mu| FamilySpec::charlier(mu).unwrap()),
        (0.2..5.0_f64, 0.05..0.9_f64).prop_map(|(g, mu)| FamilySpec::meixner(g, mu).unwrap()),
        (0.05..0.95_f64, 2..30_u32).prop_map(|(p, n)| FamilySpec::kravchuk(p, n).unwrap()),
        (-0.9..4.0_f64, -0.9..4.0_f64, 3..25_u32)
            .prop_map(|(a, b, n)| FamilySpec::hahn(a, b, n).unwrap()),
    ]
}

fn grid_fn(values: Vec<f64>) -> GridFunction {
    let grid = Grid::new(0.0, values.len(), discrete_oscillator::gridops::Step::Half).unwrap();
    GridFunction::new(grid, values).unwrap()
}

proptest! {
    #[test]
    fn composition_is_associative(a in prop::array::uniform3(-2.0..2.0_f64),
                                  b in prop::array::uniform3(-2.0..2.0_f64),
                                  c in prop::array::uniform3(-2.0..2.0_f64),
                                  values in prop::collection::vec(-1.0..1.0_f64, 40)) {
        let (a, b, c) = (operator(a), operator(b), operator(c));
        let f = grid_fn(values);
        let left = a.compose(&b).compose(&c).apply(&f).unwrap();
        let right = a.compose(&b.compose(&c)).apply(&f).unwrap();
        let m = Margins::new(8, 8);
        let gap = left.axpy(-1.0, &right).unwrap().max_abs_interior(m) / (1.0 + left.max_abs_interior(m));
        prop_assert!(gap < 1e-13, "{gap}");
    }

    #[test]
    fn applying_a_product_matches_applying_in_turn(a in prop::array::uniform3(-2.0..2.0_f64),
                                                   b in prop::array::uniform3(-2.0..2.0_f64),
                                                   values in prop::collection::vec(-1.0..1.0_f64, 40)) {
        let (a, b) = (operator(a), operator(b));
        let f = grid_fn(values);
        let once = a.compose(&b).apply(&f).unwrap();
        let twice = a.apply(&b.apply(&f).unwrap()).unwrap();
        let m = Margins::new(6, 6);
        let gap = once.axpy(-1.0, &twice).unwrap().max_abs_interior(m) / (1.0 + once.max_abs_interior(m));
        prop_assert!(gap < 1e-13, "{gap}");
    }

    #[test]
    fn family_string_round_trips(f in family()) {
        let text = f.to_string();
        let back: FamilySpec = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn polynomials_are_monic(f in family(), n in 0..8_u32, x in -5.0..5.0_f64) {
        prop_assume!(n <= f.max_degree());
        // The n-th forward difference of a monic degree-n polynomial is n!.
        let values: Vec<f64> = (0..=n).map(|k| f.eval_monic(n, x + f64::from(k)).unwrap()).collect();
        let mut diff = 0.0;
        let mut binom = 1.0;
        for (k, v) in (0..=n).zip(&values) {
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            diff += sign * binom * v;
            binom = binom * f64::from(n - k) / f64::from(k + 1);
        }
        let factorial: f64 = (1..=n).map(f64::from).product();
        let size = values.iter().fold(factorial, |m, v| m.max(v.abs()));
        let bound = 1e-12 * 2f64.powi(n as i32) * size;
        prop_assert!((diff - factorial).abs() < bound, "{diff} vs {factorial}");
    }

    #[test]
    fn difference_equation_holds(f in family(), n in 0..10_u32, s in 0..10_i64) {
        prop_assume!(n <= f.max_degree());
        let r = f.difference_equation_relative(n, s as f64).unwrap();
        prop_assert!(r.abs() < 1e-9, "{r}");
    }

    #[test]
    fn pearson_holds(f in family(), s in 0..15_i64) {
        let end = f.support().end.unwrap_or(i64::MAX);
        prop_assume!(s + 1 < end);
        let r = f.pearson_relative(s).unwrap();
        prop_assert!(r.abs() < 1e-12, "{r}");
    }

    #[test]
    fn refine_then_coarsen_is_identity(values in prop::collection::vec(-1e3..1e3_f64, 1..30)) {
        let f = GridFunction::new(Grid::unit(0, values.len()).unwrap(), values).unwrap();
        prop_assert_eq!(f.refine().coarsen(), f);
    }
}
