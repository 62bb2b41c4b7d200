//! The residue pairing H^0(R(x^-k)) × H^2(R(ω x^k)) → Q_p, evaluated on t^k
//! against ∂^k(1/T), together with the cup product it is built from.

use robba::herr::{cup, h2_pairing, HerrCochain, ModulePresentation};
use robba::operators::GammaGenerator;
use robba::padic::PadicScalar;
use robba::rankone::{exact_precision, h0_generator, partial_transfer, Character};
use robba::series::{t_power, t_series};
use robba::TruncatedLaurent;

fn main() -> robba::Result<()> {
    let (p, n, hi) = (5, 12, 80);
    let ex = exact_precision(p);
    let g = GammaGenerator::default_for(p);

    let one = PadicScalar::one(p, n);
    let f = TruncatedLaurent::from_terms(p, n, &[(-2, one), (-1, one)], hi)?;
    let left = Character::x_pow(p, ex, -1);
    let right = Character::omega_x_pow(p, ex, 1);
    let prod = ModulePresentation::rank_one(&left.mul(&right), g)?;
    let c = cup(&prod, &HerrCochain::scalar0(t_series(p, n, hi)), &HerrCochain::scalar2(f.clone()))?;
    println!("t ∪ (1+T)/T² has residue {}", c.scalar()?.res()?);
    println!("⟨t, (1+T)/T²⟩ = {}", h2_pairing(&left, &HerrCochain::scalar0(t_series(p, n, hi)), &right, &HerrCochain::scalar2(f), g)?);

    let mut d = t_power(p, n, -1, hi);
    for k in 0..=3u32 {
        if k > 0 {
            d = partial_transfer(&d);
        }
        let tk = HerrCochain::scalar0(h0_generator(p, n, hi, k)?);
        let v = h2_pairing(&Character::x_pow(p, ex, -(k as i64)), &tk, &Character::omega_x_pow(p, ex, k as i64), &HerrCochain::scalar2(d.clone()), g)?;
        println!("k = {k}: ⟨t^{k}, ∂^{k}(1/T)⟩ = {}", v.to_i128().map_or(v.to_string(), |x| x.to_string()));
    }
    Ok(())
}
