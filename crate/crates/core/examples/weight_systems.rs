//! Weight systems with multiplicities.
//!
//! ```text
//! cargo run --example weight_systems            # A2 adjoint
//! cargo run --example weight_systems -- G2 1,0
//! ```

use fusionkit::weights::{conjugate, weight_system, weyl_dimension};
use fusionkit::{AlgebraSpec, Weight};

fn main() -> fusionkit::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = AlgebraSpec::parse(args.first().map(String::as_str).unwrap_or("A2"))?;
    let mu: Weight = args.get(1).map(String::as_str).unwrap_or("1,1").parse()?;

    let ws = weight_system(&spec, &mu)?;
    println!("{} highest weight {mu}", spec.name());
    println!("  rho = {}, dual Coxeter number {}", spec.rho(), spec.dual_coxeter());
    for (w, m) in ws.iter() {
        let marker = if w.is_dominant() { "*" } else { " " };
        println!("  {marker} {w:<12} mult {m}");
    }
    println!("  dim {} (Weyl formula {})", ws.dimension(), weyl_dimension(&spec, &mu)?);
    println!("  sum of squared multiplicities {}", ws.mult_sum_squares());
    println!("  conjugate {}", conjugate(&spec, &mu)?);
    Ok(())
}
