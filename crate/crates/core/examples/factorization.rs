//! `h1 = a_up(alpha) a_down(alpha)` for every alpha, and which alpha gives a constant commutator.

use discrete_oscillator::factorize::FactorizationContext;
use discrete_oscillator::families::FamilySpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in [
        "charlier:mu=2",
        "meixner:gamma=3,mu=0.4",
        "kravchuk:p=0.3,N=20",
        "hahn:alpha=1,beta=1,N=20",
    ] {
        let family: FamilySpec = text.parse()?;
        for alpha in [0.0, 0.5, 1.0] {
            let ctx = FactorizationContext::new(family, alpha);
            let worst = (0..=10)
                .map(|n| ctx.factorization_residual(n))
                .collect::<Result<Vec<_>, _>>()?;
            let worst = worst.into_iter().fold(0.0, f64::max);
            let t = ctx.commutator_conditions();
            println!(
                "{text:<26} alpha={alpha:<3}  |(a_up a_down - h1) Phi_n| <= {worst:.1e}   constant commutator: {}",
                t.lambda.map_or("no".to_string(), |l| format!("yes, {l}"))
            );
        }
    }
    Ok(())
}
