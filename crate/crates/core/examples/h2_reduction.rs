//! Reduce a degree-two cochain of R(δ) to a canonical form: either a
//! trivialization f = (δ(χ(γ))γ - 1)a - (δ(p)φ - 1)b, or a multiple of
//! ∂^k(1/T) plus a coboundary.

use robba::herr::{h2_reduce, H2Reduction, ReduceOptions};
use robba::operators::GammaGenerator;
use robba::padic::PadicScalar;
use robba::rankone::{exact_precision, Character};
use robba::series::t_power;
use robba::TruncatedLaurent;

fn show(label: &str, d: &Character, f: &TruncatedLaurent) -> robba::Result<()> {
    let g = GammaGenerator::default_for(d.p());
    let (red, report) = h2_reduce(d, g, f, ReduceOptions::default())?;
    match red {
        H2Reduction::Trivialization { a, b } => {
            println!("{label}: trivial, witnesses on [{}, {}] and [{}, {}]", a.lo(), a.hi(), b.lo(), b.hi())
        }
        H2Reduction::CanonicalClass { c, k, .. } => println!("{label}: {c} · ∂^{k}(1/T) modulo coboundaries"),
    }
    println!("    re-substitution residual valuation {} of {}", report.residual_val, report.prec);
    Ok(())
}

fn main() -> robba::Result<()> {
    let (p, n, hi) = (5, 12, 60);
    let ex = exact_precision(p);
    let one = PadicScalar::one(p, n);
    let inv_t = t_power(p, n, -1, hi);
    show("ω, f = 1/T", &Character::omega(p, ex), &inv_t)?;
    show("ω·x, f = 3/T² + 2", &Character::omega_x_pow(p, ex, 1), &TruncatedLaurent::from_terms(p, n, &[(-2, one.mul_int(3)), (0, one.mul_int(2))], hi)?)?;
    show("|x|, f = 1/T + 1 + T", &Character::abs_x(p, ex), &TruncatedLaurent::from_terms(p, n, &[(-1, one), (0, one), (1, one)], hi)?)?;
    Ok(())
}
