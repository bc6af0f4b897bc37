//! Tensor products and their level-k truncations.
//!
//! ```text
//! cargo run --example tensor_and_fusion
//! cargo run --example tensor_and_fusion -- A2 1,1 1,1
//! ```

use fusionkit::fusion::{fuse, Level};
use fusionkit::{AlgebraSpec, Weight};

fn main() -> fusionkit::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = AlgebraSpec::parse(args.first().map(String::as_str).unwrap_or("A1"))?;
    let mu: Weight = args.get(1).map(String::as_str).unwrap_or("2").parse()?;
    let nu: Weight = args.get(2).map(String::as_str).unwrap_or("2").parse()?;

    let tensor = fuse(&spec, &mu, &nu, Level::Infinite)?;
    println!("{} {mu} x {nu}", spec.name());
    println!("  tensor product  {tensor}  (dim {})", tensor.dimension_sum(&spec)?);
    let start = (spec.level_of(&mu).max(spec.level_of(&nu))) as u32;
    for k in start..=start + 3 {
        let f = fuse(&spec, &mu, &nu, Level::Finite(k))?;
        println!("  level {k:<2}        {f}");
    }
    Ok(())
}
