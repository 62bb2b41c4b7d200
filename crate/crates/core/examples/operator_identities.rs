//! φ, ψ, γ and ∂ on a random Laurent series, with the commutation rules
//! checked coefficientwise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robba::operators::{gamma_act, phi, psi, GammaGenerator};
use robba::TruncatedLaurent;

fn main() -> robba::Result<()> {
    let (p, n) = (5, 12);
    let g = GammaGenerator::default_for(p);
    let f = TruncatedLaurent::random(&mut ChaCha8Rng::seed_from_u64(7), p, n, -4, 40);
    let pf = phi(&f)?;
    let gf = gamma_act(&f, &g, 1)?;

    println!("f window [{}, {}], Res f = {}", f.lo(), f.hi(), f.res()?);
    println!("φf window [{}, {}] (the pole order grows by p)", pf.lo(), pf.hi());
    println!("∂φ = pφ∂:       {}", pf.partial().agrees(&phi(&f.partial())?.scale_int(p as i64)));
    println!("∂γ = χ(γ)γ∂:    {}", gf.partial().agrees(&gamma_act(&f.partial(), &g, 1)?.scale(&g.chi())));
    println!("ψφ = id:        {}", psi(&pf)?.agrees(&f));
    println!("φγ = γφ:        {}", phi(&gf)?.agrees(&gamma_act(&pf, &g, 1)?));
    println!("Res φf = Res f: {}", pf.res()?.eq_at_prec(&f.res()?));
    println!("Res γf = χ⁻¹Res f: {}", gf.res()?.eq_at_prec(&(f.res()? * g.chi_pow(-1))));
    Ok(())
}
