//! su(2) characters at generic angles and on the level-k variety, including
//! the virtual characters of negative weights.
//!
//! ```text
//! cargo run --example su2_characters
//! ```

use fusionkit::characters::{char_su2_closed, eval_char, eval_virtual_char, virtual_normalize, EvalPoint};
use fusionkit::{AlgebraSpec, Weight};

fn main() -> fusionkit::Result<()> {
    let a1 = AlgebraSpec::parse("A1")?;
    let u = 0.7f64;
    let p = EvalPoint::angles(&a1, &[u]);
    println!("chi_n(u) at u = {u}");
    for n in 0..5 {
        let chi = eval_char(&a1, &Weight::from([n]), &p)?;
        println!("  chi_{n} = {:+.6}", chi.re);
    }
    println!("  2 cos u = {:+.6}", 2.0 * u.cos());

    println!("\nvirtual characters: chi_-m = sign * chi_dominant");
    for m in 1..=6 {
        let v = virtual_normalize(&a1, &Weight::from([-m]));
        let val = eval_virtual_char(&a1, &Weight::from([-m]), &p)?;
        let dom = v.dominant.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        println!("  chi_-{m}: sign {:+}, dominant {dom}, value {:+.6}", v.sign, val.re);
    }

    let k = 2;
    println!("\nlevel {k} variety, K = {}", k + 2);
    for gamma in 1..(2 * (k as i64 + 2)) {
        if gamma % (k as i64 + 2) == 0 {
            continue;
        }
        let p = EvalPoint::variety(&a1, Weight::from([gamma]), k);
        let row: Vec<String> = (0..=k as i64)
            .map(|n| {
                let v = eval_char(&a1, &Weight::from([n]), &p).unwrap().re;
                let c = char_su2_closed(n, k, gamma as f64).unwrap();
                format!("{v:+.4} ({c:+.4})")
            })
            .collect();
        println!("  gamma = {gamma}: {}", row.join("  "));
    }
    Ok(())
}
