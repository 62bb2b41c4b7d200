//! Gauss sums diagonalize Γ on K_n[t]/t^k: each G(η)·t^i is an eigenvector
//! with eigenvalue η(a)^{-1}χ(γ)^i.

use robba::cyclotomic::{CyclotomicLevel, DifRing};
use robba::operators::GammaGenerator;
use robba::padic::PadicScalar;
use robba::torsion::gauss_basis;

fn main() -> robba::Result<()> {
    let (p, prec, k) = (5, 12, 2);
    let g = GammaGenerator::default_for(p);
    let chi = g.chi();
    let a = chi.reduce(1).integer_rep().expect("unit") as i64;
    let ring = DifRing::new(CyclotomicLevel::new(p, 1, prec)?, k)?;
    let level = ring.level;
    println!("K_1 has degree {}, the ring K_1[t]/t^{k} dimension {}", level.degree(), ring.dim());
    for (j, i, v) in gauss_basis(&ring)? {
        let mut image = ring.zero();
        image[i] = level.scale(&level.sigma(a, &v[i])?, &chi.pow(i as i64)?);
        let eig = PadicScalar::teichmuller(p, a, prec)?.pow(-j)? * chi.pow(i as i64)?;
        let ok = ring.sub(&image, &ring.scale(&v, &eig)).iter().flatten().all(|c| c.is_zero());
        println!("G(ω^{j})·t^{i}: eigenvalue {eig}, relation holds: {ok}");
    }
    Ok(())
}
