//! Discrete q-Hermite I on the lattice `x = +-q^s`.

use discrete_oscillator::qext::{linear_lattice_conditions, q_gram_deviation, QContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx: QContext = "alsalam-carlitz-1:q=0.5,a=-1".parse()?;
    println!(
        "k_q = {:.12}, 1/k_q = {:.12}, lattice depth {}",
        ctx.k_q, ctx.lambda, ctx.depth
    );
    for n in 0..6 {
        println!("lambda_{n} = {:.10}", ctx.eigenvalue(n));
    }
    let r = ctx.residuals(5)?;
    println!(
        "eigen {:.1e}  factorization {:.1e}  q-commutator {:.1e}  adjoint {:.1e}",
        r.eigen, r.factorization, r.varsigma_commutator, r.adjoint
    );
    println!(
        "Jackson Gram deviation, n <= 6: {:.1e}",
        q_gram_deviation(&ctx, 6)?
    );
    for alpha in [0.0, 0.5, 1.0] {
        let t = linear_lattice_conditions(&ctx, alpha, ctx.varsigma);
        println!(
            "alpha={alpha}: conditions hold = {} ({:.1e}, {:.1e})",
            t.holds(1e-9),
            t.varsigma_residual,
            t.lambda_residual
        );
    }
    Ok(())
}
