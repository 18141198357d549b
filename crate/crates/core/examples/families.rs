//! Polynomials, weights and the two oracle relations for each family.

use discrete_oscillator::families::FamilySpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in [
        "charlier:mu=2",
        "meixner:gamma=3,mu=0.4",
        "kravchuk:p=0.3,N=20",
        "hahn:alpha=1,beta=1,N=20",
    ] {
        let f: FamilySpec = text.parse()?;
        println!("{f}");
        println!(
            "  sigma(x) coefficients {:?}, tau(x) coefficients {:?}",
            f.sigma_coeffs(),
            f.tau_coeffs()
        );
        for n in 0..4 {
            println!(
                "  n={n}  lambda_n={:<8.4} P_n(3)={:<12.6} d_n^2={:.6e}  difference-equation residual {:.1e}",
                f.lambda_n(n),
                f.eval_monic(n, 3.0)?,
                f.squared_norm(n)?,
                f.difference_equation_relative(n, 3.0)?
            );
        }
        println!(
            "  weight rho(0..4) = {:?}",
            (0..4).map(|s| f.weight(s)).collect::<Result<Vec<_>, _>>()?
        );
        println!("  Pearson residual at s=2: {:.1e}", f.pearson_relative(2)?);
    }
    Ok(())
}
