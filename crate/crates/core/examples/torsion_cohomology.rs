//! Cohomology of t^k-torsion modules through their fibers over Q_p(μ_{p^n}),
//! level by level until the dimensions stabilize.

use robba::operators::GammaGenerator;
use robba::rankone::{exact_precision, Character};
use robba::torsion::{torsion_cohomology, twisted_family};

fn main() -> robba::Result<()> {
    let p = 3;
    let ex = exact_precision(p);
    let g = GammaGenerator::default_for(p);
    for (name, d) in [("1", Character::trivial(p, ex)), ("ω", Character::omega(p, ex)), ("x^-1", Character::x_pow(p, ex, -1))] {
        for k in 1..=2 {
            let fam = twisted_family(3, k, &[d], &g, 12)?;
            let c = torsion_cohomology(&fam, 3)?;
            let per_level: Vec<String> =
                c.levels.iter().map(|l| format!("n={}: dim {} fix {} coinv {}", l.n, l.dim, l.dims.dim_fix, l.dims.dim_coinv)).collect();
            println!("R/t^{k}({name}): h0 = {}, h1 = {}, χ = {}, stable from n = {}", c.h0, c.h1, c.euler_characteristic, c.stabilized_at);
            println!("    {}", per_level.join("; "));
        }
    }
    Ok(())
}
