//! Root-lattice theta functions, Kac-Weyl characters at finite tau and the
//! functional-equation residuals.
//!
//! ```text
//! cargo run --example theta_functions
//! ```

use num_complex::Complex64;

use fusionkit::theta::{
    check_heat_equation, check_t_transform, heat_convergence_ratio, kac_weyl_char, su2_character_closed, theta_sum,
    theta_weyl, ThetaContext,
};
use fusionkit::{AlgebraSpec, Weight};

fn main() -> fusionkit::Result<()> {
    let a1 = AlgebraSpec::parse("A1")?;
    let k = 2;
    let tau = Complex64::new(0.1, 0.8);
    let u = Complex64::new(0.13, 0.02);
    let ctx = ThetaContext::new(&a1, k + 2, tau, vec![u])?;
    println!("A1, K = {}, tau = {tau}, u = {u}, truncation radius {:.2}", k + 2, ctx.radius());
    for j in 0..=3 {
        let g = Weight::from([j]);
        println!("  Theta_{j} = {:.6}   Theta^-_{j} = {:.6}", theta_sum(&ctx, &g)?, theta_weyl(&ctx, &g, -1)?);
    }
    for j in 0..=(k as i64 + 1) {
        let kw = kac_weyl_char(&ctx, &Weight::from([j]))?;
        let closed = su2_character_closed(j, k, tau, u, 1e-14)?;
        println!("  chi_{j}(tau, u) = {kw:.6}  closed form {closed:.6}");
    }

    let a2 = AlgebraSpec::parse("A2")?;
    let ctx =
        ThetaContext::new(&a2, 6, Complex64::new(0.1, 1.0), vec![Complex64::new(0.1, 0.02), Complex64::new(0.3, 0.0)])?;
    let g = a2.rho().clone();
    println!("\nA2, K = 6, gamma = {g}");
    println!("  T-transform residual {:.2e}", check_t_transform(&ctx, &g)?);
    for h in [0.04, 0.02, 0.01] {
        println!("  heat residual at h = {h}: {:.3e}", check_heat_equation(&ctx, &g, h)?);
    }
    println!("  convergence ratio {:.3}", heat_convergence_ratio(&ctx, &g, 0.02)?);
    Ok(())
}
