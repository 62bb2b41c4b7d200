//! Classify rank-one modules R(δ) and print their cohomology dimensions.
//! The Euler characteristic is -1 on every row.

use robba::padic::PadicScalar;
use robba::rankone::{cohomology_dims, euler_characteristic, exact_precision, Character};

fn main() -> robba::Result<()> {
    let p = 5;
    let ex = exact_precision(p);
    let mut rows: Vec<(String, Character)> = Vec::new();
    for i in 0..=3 {
        rows.push((format!("x^-{i}"), Character::x_pow(p, ex, -i)));
        rows.push((format!("ω·x^{i}"), Character::omega_x_pow(p, ex, i)));
    }
    rows.push(("x".into(), Character::x(p, ex)));
    rows.push(("|x|".into(), Character::abs_x(p, ex)));
    rows.push(("unramified(2)".into(), Character::unramified(PadicScalar::from_i64(p, 2, ex))?));

    println!("{:<14} {:<12} {:>3} {:>3} {:>3} {:>4} {:>6}", "δ", "class", "h0", "h1", "h2", "χ", "slope");
    for (name, d) in rows {
        let c = d.classify(10, 3)?;
        let dims = cohomology_dims(c.class);
        let m = d.module();
        println!(
            "{:<14} {:<12} {:>3} {:>3} {:>3} {:>4} {:>6}",
            name,
            c.class.to_string(),
            dims.0,
            dims.1,
            dims.2,
            euler_characteristic(dims),
            m.slope().to_string()
        );
    }
    Ok(())
}
