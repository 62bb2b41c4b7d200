//! Induction from Γ^m to Γ on a torsion fiber: the Shapiro maps identify
//! invariants and coinvariants, and every tuple is rebuilt from its values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robba::induction::{verify_shapiro, InducedModule};
use robba::operators::GammaGenerator;
use robba::padic::PadicScalar;
use robba::rankone::{exact_precision, Character};
use robba::torsion::TorsionFiber;

fn main() -> robba::Result<()> {
    let p = 5;
    let ex = exact_precision(p);
    let g = GammaGenerator::default_for(p);
    for m in 1..=3usize {
        let base = TorsionFiber::twisted(1, 2, &[Character::x_pow(p, ex, -1)], &g, 12)?.restrict(m as u32);
        let r = verify_shapiro(&base, m, 3)?;
        println!(
            "m = {m}: base (fix, coinv) = ({}, {}), induced = ({}, {}), maps bijective: {}",
            r.base_dims.0, r.base_dims.1, r.induced_dims.0, r.induced_dims.1, r.holds()
        );
        let ind = InducedModule::new(base, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
        let f: Vec<_> = (0..ind.dim()).map(|_| PadicScalar::from_i64(p, rng.gen_range(-999..999), 12)).collect();
        let back = ind.reconstruct(&f);
        println!("    reconstruction exact: {}", back.iter().zip(&f).all(|(x, y)| x.eq_at_prec(y)));
    }
    Ok(())
}
