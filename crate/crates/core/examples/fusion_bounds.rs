//! Integer consequences of the identity: the squared-coefficient and
//! dimension bounds, and conjugation symmetry of the coefficient sums.
//!
//! ```text
//! cargo run --example fusion_bounds
//! ```

use fusionkit::fusion::level_k_weights;
use fusionkit::identity::{conjugacy_square_check, dim_bound, parseval_bound};
use fusionkit::{AlgebraSpec, Level, Weight};

fn main() -> fusionkit::Result<()> {
    let a2 = AlgebraSpec::parse("A2")?;
    for k in 1..=3 {
        let level = Level::Finite(k);
        let ws = level_k_weights(&a2, k);
        println!("A2 level {k}");
        for mu in [Weight::from([1, 0]), Weight::from([1, 1]), Weight::from([2, 0])] {
            if !a2.is_integrable(&mu, k) {
                continue;
            }
            let worst = ws
                .iter()
                .map(|s| parseval_bound(&a2, &mu, s, level).map(|b| b.lhs))
                .collect::<fusionkit::Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            let bound = parseval_bound(&a2, &mu, &mu, level)?.rhs;
            println!("  mu = {mu}: max sum N^2 over sigma = {worst} <= {bound}");
        }
        let mut dim_ok = 0;
        let mut conj_ok = 0;
        for a in &ws {
            for b in &ws {
                dim_ok += dim_bound(&a2, a, b, level)?.passed as usize;
                conj_ok += conjugacy_square_check(&a2, a, b, level)?.equal as usize;
            }
        }
        let n = ws.len() * ws.len();
        println!("  dimension bound {dim_ok}/{n}, conjugation symmetry {conj_ok}/{n}");
    }
    Ok(())
}
