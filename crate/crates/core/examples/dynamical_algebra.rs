//! Sp(2,R) for Meixner and so(3) for Kravchuk: constants, relations, Casimir and ladders.

use discrete_oscillator::algebra::{compare_explicit_example, make_context};
use discrete_oscillator::families::FamilySpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["meixner:gamma=3,mu=0.4", "kravchuk:p=0.3,N=20"] {
        let family: FamilySpec = text.parse()?;
        let ctx = make_context(&family)?;
        println!("{text}: {:?}", ctx.tag);
        println!(
            "  C_a={:.6} C_b={:.6} E={} A0={} A1={:.1e} Casimir={}",
            ctx.c_a,
            ctx.c_b.unwrap_or(f64::NAN),
            ctx.e.unwrap_or(f64::NAN),
            ctx.a0,
            ctx.a1.unwrap_or(f64::NAN),
            ctx.casimir_value().unwrap_or(f64::NAN)
        );
        let basis = ctx.basis(8)?;
        println!(
            "  closed algebra residual {:.1e}",
            ctx.verify_closed_algebra(&basis)?.max()
        );
        println!(
            "  K relations residual    {:.1e}",
            ctx.verify_k_relations(&basis)?.max()
        );
        println!(
            "  Casimir relative        {:.1e}",
            ctx.casimir_relative_residual(&basis)?
        );
        for n in 0..4 {
            let act = ctx.ladder_action(n)?;
            println!("  <K+ Phi_{n}, Phi_{}> = {:.10}", n + 1, act.up_coeff);
        }
        let cmp = compare_explicit_example(&ctx)?;
        println!(
            "  closed-form K0 {:?}, K+ {:?}, K- {:?}",
            cmp.k0.agreement(1e-10),
            cmp.k_plus.agreement(1e-10),
            cmp.k_minus.agreement(1e-10)
        );
    }
    if let Err(e) = make_context(&"hahn:alpha=1,beta=1,N=12".parse()?) {
        println!("hahn: {e}");
    }
    Ok(())
}
