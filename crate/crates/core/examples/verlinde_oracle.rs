//! The modular S matrix and the Verlinde formula, compared with fusion by
//! affine reflection.
//!
//! ```text
//! cargo run --example verlinde_oracle -- A2 2
//! ```

use fusionkit::fusion::{fuse_level_k, VerlindeOracle};
use fusionkit::AlgebraSpec;

fn main() -> fusionkit::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = AlgebraSpec::parse(args.first().map(String::as_str).unwrap_or("A2"))?;
    let k: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);

    let oracle = VerlindeOracle::new(&spec, k)?;
    let ws = oracle.weights();
    println!("{} level {k}: {} integrable weights", spec.name(), ws.len());
    println!("S matrix:");
    for (w, row) in ws.iter().zip(oracle.s_matrix()) {
        let cells: Vec<String> = row.iter().map(|z| format!("{:+.3}{:+.3}i", z.re, z.im)).collect();
        println!("  {w:<8} {}", cells.join(" "));
    }
    let mut mismatches = 0;
    for mu in ws {
        for nu in ws {
            if oracle.product(mu, nu)? != fuse_level_k(&spec, mu, nu, k)? {
                mismatches += 1;
            }
        }
    }
    println!("products checked against folding: {} pairs, {mismatches} mismatches", ws.len() * ws.len());
    Ok(())
}
