//! The Charlier oscillator: `[a_down, a_up] = 1`, ladder action and the ground-state build.

use discrete_oscillator::factorize::CharlierOscillator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let osc = CharlierOscillator::new(2.0)?;
    println!(
        "commutator residual, n <= 12: {:.1e}",
        osc.commutator_residual(12)?
    );
    let ladder = osc.ladder_check(6)?;
    for (n, (u, d)) in ladder
        .up_coefficients
        .iter()
        .zip(&ladder.down_coefficients)
        .enumerate()
    {
        println!("n={n}  <a_up Phi_n, Phi_n+1> = {u:.12}  (sqrt(n+1) = {:.12})   <a_down Phi_n, Phi_n-1> = {d:.12}", ((n + 1) as f64).sqrt());
    }
    let m = osc.context().margins();
    for n in [0, 4, 8] {
        let built = osc.build_phi_from_ground(n)?;
        let gap = built
            .axpy(-1.0, &osc.context().phi(n)?)?
            .max_abs_interior(m);
        println!("a_up^{n} Phi_0 / sqrt({n}!) vs Phi_{n}: {gap:.1e}");
    }
    Ok(())
}
