//! The weight-shifted character identity
//! `sum_{mu' in Omega_mu} chi_{mu'+nu} = sum_l N_{mu nu}^l chi_l`
//! at random generic points and, with level-k coefficients, on every
//! variety residue. Corrupting one coefficient breaks it.
//!
//! ```text
//! cargo run --example character_identity
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fusionkit::characters::random_regular_point;
use fusionkit::csmodel::variety_points;
use fusionkit::fusion::fuse_level_k;
use fusionkit::identity::{verify_generic_identity, verify_numerator_identity, verify_numerator_identity_with};
use fusionkit::{AlgebraSpec, DecompMap, Weight};

fn main() -> fusionkit::Result<()> {
    let a2 = AlgebraSpec::parse("A2")?;
    let mu = Weight::from([1, 1]);
    let nu = Weight::from([2, 0]);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pts = (0..25).map(|_| random_regular_point(&a2, &mut rng, 0.1)).collect::<fusionkit::Result<Vec<_>>>()?;
    let r = verify_generic_identity(&a2, &mu, &nu, &pts, 1e-9)?;
    println!("{}: {} points, max residual {:.2e}", r.case_id, r.points_checked, r.max_abs_residual);

    let k = 3;
    let gammas = variety_points(&a2, k)?;
    let r = verify_numerator_identity(&a2, &mu, &nu, k, &gammas)?;
    println!("{}: {} residues, max residual {:.2e}", r.case_id, r.points_checked, r.max_abs_residual);

    let good = fuse_level_k(&a2, &mu, &nu, k)?;
    let mut entries: Vec<(Weight, u64)> = good.iter().map(|(w, n)| (w.clone(), n)).collect();
    entries[0].1 += 1;
    let bad = DecompMap::from_entries(entries);
    let r = verify_numerator_identity_with(&a2, &mu, &nu, k, &bad, &gammas, 1e-9)?;
    println!("corrupted {bad}: passed = {}, worst witness {:?}", r.passed, r.witnesses.first().map(|w| &w.point));
    Ok(())
}
