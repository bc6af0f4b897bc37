//! The finite Gaussian model: clock and shift operators, primary states, the
//! Fourier operator, characters as inner products and fusion from Wilson
//! loops.
//!
//! ```text
//! cargo run --example gaussian_model -- A2 2
//! ```

use fusionkit::csmodel::build_model;
use fusionkit::fusion::{fuse_level_k, level_k_weights};
use fusionkit::AlgebraSpec;

fn main() -> fusionkit::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = AlgebraSpec::parse(args.first().map(String::as_str).unwrap_or("A1"))?;
    let k: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);

    let m = build_model(&spec, k)?;
    println!("{} level {k}: {} states (moduli {:?})", spec.name(), m.dimension(), m.quotient().moduli());
    println!("  clock commutator residual   {:.2e}", m.check_clock_commutator());
    println!("  S^-1 b S = a residual       {:.2e}", m.check_s_conjugation());
    println!("  primary orthonormality      {:.2e}", m.check_orthonormality()?);
    println!("  characters as inner products {:.2e}", m.check_character_inner_products()?);
    println!("  Wilson loops Weyl-even      {:.2e}", m.check_weyl_evenness()?);

    let ws = level_k_weights(&spec, k);
    println!("fusion from O_mu(b) psi_nu:");
    for mu in &ws {
        for nu in &ws {
            let ops = m.fusion_from_operators(mu, nu)?;
            let same = ops == fuse_level_k(&spec, mu, nu, k)?;
            println!("  {mu} x {nu} = {ops}{}", if same { "" } else { "  (differs from folding)" });
        }
    }
    Ok(())
}
