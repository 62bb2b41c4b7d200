//! The operators φ, γ, ψ, ∂ and ∇ on truncated Laurent series.

use crate::error::{Error, Result};
use crate::padic::{max_relative_precision, PadicScalar};
use crate::series::{frobenius_rows, t_series, TruncatedLaurent, PREC_CEILING};

/// A topological generator γ of Γ = Z_p^×, recorded through χ(γ).
#[derive(Clone, Copy, Debug)]
pub struct GammaGenerator {
    chi: PadicScalar,
}

impl GammaGenerator {
    /// `χ(γ) = a` for an integer `a` generating `(Z/p^2)^×`.
    pub fn new(p: u32, a: i64) -> Result<Self> {
        if !generates_mod_p2(p, a) {
            return Err(Error::Config(format!("{a} does not generate (Z/{p}^2)^x")));
        }
        Ok(GammaGenerator { chi: PadicScalar::from_i64(p, a, max_relative_precision(p)) })
    }

    /// The smallest positive integer generating `(Z/p^2)^×`.
    pub fn default_for(p: u32) -> Self {
        let a = (2..p as i64 * p as i64).find(|&a| generates_mod_p2(p, a)).expect("odd prime has a primitive root");
        Self::new(p, a).unwrap()
    }

    pub fn p(&self) -> u32 {
        self.chi.p()
    }

    pub fn chi(&self) -> PadicScalar {
        self.chi
    }

    /// `χ(γ)^e`.
    pub fn chi_pow(&self, e: i64) -> PadicScalar {
        self.chi.pow(e).expect("χ(γ) is a unit")
    }
}

fn generates_mod_p2(p: u32, a: i64) -> bool {
    let p = p as i64;
    let m = p * p;
    let a = a.rem_euclid(m);
    if a % p == 0 {
        return false;
    }
    let pow = |mut b: i64, mut e: i64, m: i64| {
        let mut r = 1i64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    };
    // order of a mod p is p - 1, and a^(p-1) ≠ 1 mod p^2
    let phi = p - 1;
    let mut q = phi;
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            if pow(a, phi / d, p) == 1 {
                return false;
            }
            while q % d == 0 {
                q /= d;
            }
        }
        d += 1;
    }
    if q > 1 && pow(a, phi / q, p) == 1 {
        return false;
    }
    pow(a, phi, m) != 1
}

/// `φ(f) = f((1+T)^p - 1)`.
pub fn phi(f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
    let p = f.p();
    f.substitute(&PadicScalar::from_i64(p, p as i64, f.prec().min(PREC_CEILING) + 2))
}

/// `γ^e(f) = f((1+T)^{χ(γ)^e} - 1)`.
pub fn gamma_act(f: &TruncatedLaurent, g: &GammaGenerator, e: i64) -> Result<TruncatedLaurent> {
    if g.p() != f.p() {
        return Err(Error::PrimeMismatch(f.p(), g.p()));
    }
    if e == 0 {
        return Ok(f.clone());
    }
    f.substitute(&g.chi_pow(e))
}

/// `∂ = (1+T) d/dT`.
pub fn partial(f: &TruncatedLaurent) -> TruncatedLaurent {
    f.partial()
}

/// `∇ = t ∂`.
pub fn nabla(f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
    let t = t_series(f.p(), f.prec().min(PREC_CEILING), f.hi().max(0));
    t.try_mul(&f.partial())
}

/// `(γ^{(p-1)p^k} f - f) / (χ(γ)^{(p-1)p^k} - 1)`, which tends to `∇f` as `k` grows.
pub fn nabla_difference_quotient(f: &TruncatedLaurent, g: &GammaGenerator, k: u32) -> Result<TruncatedLaurent> {
    let p = f.p() as i64;
    let e = (p - 1) * p.pow(k);
    let a = g.chi_pow(e);
    let num = f.substitute(&a)?.try_sub(f)?;
    let den = (a - PadicScalar::one(f.p(), a.prec())).inv()?;
    Ok(num.scale(&den))
}

/// `ψ(f)`: the component `f_0` of `f = Σ_{i<p} (1+T)^i φ(f_i)`.
///
/// The polar part is peeled off top-down against `(1+T)^i φ(T^j)`. The
/// power-series part uses `ψ(T^k) = Σ_l (-1)^{k-pl} C(k, pl) (1+T)^l`. The
/// unknown tail `T^k`, `k > hi`, contributes to degree `m` with valuation at
/// least `v + ceil((k - pm)/(p-1)) - 1`, where `v` bounds the tail valuations;
/// `v` is taken to be the least valuation of the known power-series
/// coefficients, and output precision is capped accordingly.
pub fn psi(f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
    let p = f.p();
    let pi = p as i32;
    let n = f.prec().min(PREC_CEILING);
    let (lo, hi) = (f.lo(), f.hi());
    if hi < 0 {
        return Err(Error::WindowUnderflow(format!("window [{lo}, {hi}] ends below degree 0")));
    }
    let coeff = |d: i32| f.coeff(d).unwrap();
    let vmin = (lo..0).map(coeff).filter(|c| !c.is_zero()).map(|c| c.val()).min().unwrap_or(n).min(n);
    let lo_out = if lo < 0 { lo.div_euclid(pi) - (n - vmin).max(0) } else { 0 };
    let hi_out = (hi + 1 - pi).div_euclid(pi);
    if hi_out < lo_out {
        return Err(Error::WindowUnderflow(format!("window [{lo}, {hi}] too short for ψ")));
    }
    let zero = PadicScalar::zero(p, n);
    let mut out = vec![zero; (hi_out - lo_out + 1) as usize];
    let oidx = |d: i32| (d - lo_out) as usize;

    if lo < 0 {
        let dmin = lo_out * pi;
        let mut r: Vec<PadicScalar> = (dmin..0).map(coeff).collect();
        let ridx = |d: i32| (d - dmin) as usize;
        let rows = frobenius_rows(p, lo_out, -1, dmin, (n - vmin).max(1) + 2);
        for top in (dmin..0).rev() {
            let c = r[ridx(top)];
            if c.is_zero() {
                continue;
            }
            let j = top.div_euclid(pi);
            let i = top - j * pi;
            if i == 0 {
                let k = oidx(j);
                out[k] = out[k] + c;
            }
            let row = &rows.rows[(j - lo_out) as usize];
            // (1+T)^i φ(T^j), coefficient at degree d is Σ_l C(i,l) row[d - l]
            for (jj, rc) in row.coeffs.iter().enumerate() {
                let base = row.start + jj as i32;
                let mut binom = 1i64;
                for l in 0..=i {
                    let d = base + l;
                    if d <= top && d >= dmin {
                        let idx = ridx(d);
                        r[idx] = r[idx] - c * rc.mul_int(binom);
                    }
                    binom = binom * (i - l) as i64 / (l + 1) as i64;
                }
            }
        }
    }

    if hi >= 0 && hi_out >= 0 {
        let vtail = (0..=hi).map(coeff).filter(|c| !c.is_zero()).map(|c| c.val()).min().unwrap_or(n).min(n);
        let pascal = Pascal::new(p, hi as usize + 1);
        let lmax = (hi / pi) as usize;
        let mut a = vec![zero; lmax + 1];
        for (l, al) in a.iter_mut().enumerate() {
            let pl = pi as usize * l;
            for k in pl..=hi as usize {
                let term = coeff(k as i32) * pascal.get(k, pl);
                *al = if (k - pl).is_multiple_of(2) { *al + term } else { *al - term };
            }
        }
        for m in 0..=hi_out as usize {
            let mut acc = zero;
            for (l, al) in a.iter().enumerate().skip(m) {
                acc = acc + *al * pascal.get(l, m);
            }
            let gap = hi + 1 - pi * m as i32;
            let cap = vtail + (gap + pi - 2).div_euclid(pi - 1) - 1;
            let k = oidx(m as i32);
            out[k] = (out[k] + acc).reduce(cap);
        }
    }
    TruncatedLaurent::new(p, lo_out, out)
}

/// Binomial coefficients modulo `p^R` with `R` the relative-precision cap.
struct Pascal {
    p: u32,
    prec: i32,
    rows: Vec<Vec<u128>>,
}

impl Pascal {
    fn new(p: u32, n: usize) -> Self {
        let prec = max_relative_precision(p);
        let m = crate::padic::ppow(p, prec as u32);
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = vec![1u128; i + 1];
            for j in 1..i {
                row[j] = (rows[i - 1][j - 1] + rows[i - 1][j]) % m;
            }
            rows.push(row);
        }
        Pascal { p, prec, rows }
    }

    fn get(&self, n: usize, k: usize) -> PadicScalar {
        PadicScalar::from_i64(self.p, self.rows[n][k] as i64, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{one_plus_t_over_t, q_series, t_power};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: i32 = 12;

    fn sc(p: u32, n: i64) -> PadicScalar {
        PadicScalar::from_i64(p, n, N)
    }

    #[test]
    fn default_generators() {
        assert_eq!(GammaGenerator::default_for(3).chi().to_i128(), Some(2));
        assert_eq!(GammaGenerator::default_for(5).chi().to_i128(), Some(2));
        assert_eq!(GammaGenerator::default_for(7).chi().to_i128(), Some(3));
        // 7 is not a primitive root mod 29 (order 7)
        assert!(GammaGenerator::new(29, 7).is_err());
        // 7 is a primitive root mod 5 but 7^4 = 2401 ≡ 1 mod 25
        assert!(GammaGenerator::new(5, 7).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = 5;
        let t = t_series(p, N, 60);
        assert!(phi(&t).unwrap().agrees(&t.scale_int(p as i64)));
        let r = phi(&one_plus_t_over_t(p, N, 60)).unwrap().res().unwrap();
        assert_eq!(r.to_i128(), Some(1));
        let q = phi(&t_power(p, N, 1, 40)).unwrap().shift(-1).truncate(39).unwrap();
        assert!(q.agrees(&q_series(p, N, 39)));
    }

    #[test]
    fn gamma_examples() {
        let p = 3;
        let g = GammaGenerator::default_for(p);
        let t = t_series(p, N, 50);
        assert!(gamma_act(&t, &g, 1).unwrap().agrees(&t.scale(&g.chi())));
        let r = gamma_act(&one_plus_t_over_t(p, N, 50), &g, 1).unwrap().res().unwrap();
        assert!(r.eq_at_prec(&g.chi().inv().unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = TruncatedLaurent::random(&mut rng, p, N, -4, 20);
        assert!(gamma_act(&f, &g, 0).unwrap().agrees(&f));
    }

    #[test]
    fn psi_examples() {
        let p = 5;
        let one = t_power(p, N, 0, 40);
        assert!(psi(&one).unwrap().agrees(&t_power(p, N, 0, 7)));
        let one_plus_t = TruncatedLaurent::from_terms(p, N, &[(0, sc(p, 1)), (1, sc(p, 1))], 40).unwrap();
        assert!(psi(&one_plus_t).unwrap().is_zero());
    }

    #[test]
    fn psi_left_inverse_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in [3u32, 5] {
            let f = TruncatedLaurent::random(&mut rng, p, N, -6, 60);
            let pf = phi(&f).unwrap();
            let back = psi(&pf).unwrap();
            assert!(back.agrees(&f), "p = {p}");
            for i in 1..p as i32 {
                let one_plus_t_i = TruncatedLaurent::from_terms(
                    p,
                    N,
                    &(0..=i).map(|l| (l, crate::padic::binomial_int(p, i as u128, l as u64, N))).collect::<Vec<_>>(),
                    80,
                )
                .unwrap();
                let g = one_plus_t_i.try_mul(&pf).unwrap();
                assert!(psi(&g).unwrap().is_zero(), "p = {p}, i = {i}");
            }
        }
    }

    #[test]
    fn psi_tail_bound() {
        // valuation of [T^m] ψ(T^k) is at least ceil((k - pm)/(p-1)) - 1
        for p in [3u32, 5] {
            for k in 1..60 {
                let f = t_power(p, 30, k, 120);
                let g = psi(&f).unwrap();
                for m in 0..=g.hi().min(k / p as i32) {
                    let c = g.coeff(m).unwrap();
                    let bound = (k - p as i32 * m + p as i32 - 2).div_euclid(p as i32 - 1) - 1;
                    assert!(c.val() >= bound, "p={p} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn operator_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [3u32, 5] {
            let g = GammaGenerator::default_for(p);
            let f = TruncatedLaurent::random(&mut rng, p, N, -10, 80);
            let lhs = phi(&f).unwrap().partial();
            let rhs = phi(&f.partial()).unwrap().scale_int(p as i64);
            assert!(lhs.agrees(&rhs));
            let lhs = gamma_act(&f, &g, 1).unwrap().partial();
            let rhs = gamma_act(&f.partial(), &g, 1).unwrap().scale(&g.chi());
            assert!(lhs.agrees(&rhs));
            let a = phi(&gamma_act(&f, &g, 1).unwrap()).unwrap();
            let b = gamma_act(&phi(&f).unwrap(), &g, 1).unwrap();
            assert!(a.agrees(&b));
        }
    }

    #[test]
    fn nabla_examples() {
        let p = 5;
        assert!(nabla(&t_power(p, N, 0, 30)).unwrap().is_zero());
        let one_plus_t = TruncatedLaurent::from_terms(p, N, &[(0, sc(p, 1)), (1, sc(p, 1))], 40).unwrap();
        let expect = t_series(p, N, 40).try_mul(&one_plus_t).unwrap();
        assert!(nabla(&t_power(p, N, 1, 40)).unwrap().agrees(&expect));
    }

    #[test]
    fn nabla_difference_quotient_converges() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = TruncatedLaurent::random(&mut rng, p, 20, -3, 30);
        let target = nabla(&f).unwrap();
        let res: Vec<i32> = (0..4)
            .map(|k| nabla_difference_quotient(&f, &g, k).unwrap().residual(&target).unwrap())
            .collect();
        assert!(res.windows(2).all(|w| w[1] > w[0]), "{res:?}");
    }

    #[test]
    fn substitutions_keep_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for p in [3u32, 5, 7] {
            let g = GammaGenerator::default_for(p);
            let f = TruncatedLaurent::random(&mut rng, p, N, -10, 80);
            assert!(phi(&f).unwrap().prec() >= N - 1, "φ, p={p}");
            assert!(gamma_act(&f, &g, 1).unwrap().prec() >= N - 1, "γ, p={p}");
            let pos = TruncatedLaurent::random(&mut rng, p, N, 0, 80);
            assert_eq!(phi(&pos).unwrap().prec(), N, "φ on R^+, p={p}");
        }
    }
}
