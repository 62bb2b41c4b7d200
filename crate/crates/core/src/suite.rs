//! Seeded batteries of identities, each reported with the valuation of its
//! worst residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::cyclotomic::{CyclotomicLevel, DifRing};
use crate::error::Result;
use crate::herr::{coboundary2, d1, d2, h2_pairing, h2_reduce, psi_chain_defect, H2Reduction, HerrCochain, ModulePresentation, ReduceOptions};
use crate::induction::{verify_shapiro, InducedModule};
use crate::operators::{gamma_act, phi, psi};
use crate::padic::{binomial_int, PadicScalar};
use crate::rankone::{cohomology_dims, euler_characteristic, h0_generator, h2_generator, partial_transfer, Character, Class};
use crate::series::{t_power, t_series, TruncatedLaurent};
use crate::torsion::{gauss_basis, phi_shift_preimage, torsion_cohomology, twisted_family, TorsionFiber};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Least valuation of the residual over all samples; `None` when the
    /// check is not a residual.
    pub residual_val: Option<i32>,
    /// Valuation the residual must reach, when weaker than "zero at
    /// precision".
    pub required_val: Option<i32>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: &str, pass: bool, detail: Option<String>) -> Self {
        Check { name: name.into(), pass, residual_val: None, required_val: None, samples: 1, detail }
    }

    fn from_error(name: &str, e: crate::Error) -> Self {
        Check::flag(name, false, Some(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Operators,
    Residues,
    Herr,
    Torsion,
    Shapiro,
    All,
}

impl Suite {
    pub fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Operators, Suite::Residues, Suite::Herr, Suite::Torsion, Suite::Shapiro],
            s => vec![s],
        }
    }
}

/// Runs the batteries in declaration order.
pub fn run(suite: Suite, cfg: &Config) -> Vec<Check> {
    suite
        .parts()
        .into_iter()
        .flat_map(|s| match s {
            Suite::Operators => operators(cfg),
            Suite::Residues => residues(cfg),
            Suite::Herr => herr(cfg),
            Suite::Torsion => torsion(cfg),
            Suite::Shapiro => shapiro(cfg),
            Suite::All => unreachable!(),
        })
        .collect()
}

/// Accumulates one identity over samples.
struct Acc {
    name: &'static str,
    required: Option<i32>,
    worst: Option<i32>,
    pass: bool,
    samples: usize,
    detail: Option<String>,
}

impl Acc {
    fn new(name: &'static str, required: Option<i32>) -> Self {
        Acc { name, required, worst: None, pass: true, samples: 0, detail: None }
    }

    /// Series identity `lhs = rhs`, exact at propagated precision unless a
    /// required valuation is set.
    fn series(&mut self, r: Result<(TruncatedLaurent, TruncatedLaurent)>) {
        self.samples += 1;
        match r.and_then(|(a, b)| Ok((a.residual(&b)?, a.agrees(&b)))) {
            Ok((v, ok)) => {
                self.worst = Some(self.worst.map_or(v, |w| w.min(v)));
                self.pass &= match self.required {
                    Some(req) => v >= req,
                    None => ok,
                };
            }
            Err(e) => self.fail(e.to_string()),
        }
    }

    fn scalar(&mut self, r: Result<(PadicScalar, PadicScalar)>) {
        self.samples += 1;
        match r {
            Ok((a, b)) => {
                let v = a.residual(&b);
                self.worst = Some(self.worst.map_or(v, |w| w.min(v)));
                self.pass &= match self.required {
                    Some(req) => v >= req,
                    None => a.eq_at_prec(&b),
                };
            }
            Err(e) => self.fail(e.to_string()),
        }
    }

    fn fail(&mut self, why: String) {
        self.pass = false;
        self.detail.get_or_insert(why);
    }

    fn done(self) -> Check {
        Check { name: self.name.into(), pass: self.pass, residual_val: self.worst, required_val: self.required, samples: self.samples, detail: self.detail }
    }
}

fn rng(cfg: &Config, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `(1+T)^i g`, as a sum of shifts so that no window is lost.
fn times_one_plus_t_pow(g: &TruncatedLaurent, i: u32) -> Result<TruncatedLaurent> {
    let p = g.p();
    let mut acc = g.clone();
    for l in 1..=i {
        acc = acc.try_add(&g.shift(l as i32).scale(&binomial_int(p, i as u128, l as u64, g.prec())))?;
    }
    Ok(acc)
}

/// The derivation and commutation identities of φ, γ, ψ.
pub fn operators(cfg: &Config) -> Vec<Check> {
    let (p, n) = (cfg.p, cfg.prec);
    let Ok(g) = cfg.gamma() else { return vec![Check::flag("config", false, Some("bad χ(γ)".into()))] };
    let chi = g.chi();
    let mut r = rng(cfg, 1);
    let mut dphi = Acc::new("∂φ=pφ∂", None);
    let mut dgam = Acc::new("∂γ=χ(γ)γ∂", None);
    let mut psiphi = Acc::new("ψφ=id", None);
    let mut psikill = Acc::new("ψ((1+T)^iφf)=0", None);
    let mut comm = Acc::new("φγ=γφ", None);
    for _ in 0..cfg.samples {
        let f = TruncatedLaurent::random(&mut r, p, n, cfg.lo, cfg.hi);
        dphi.series((|| Ok((phi(&f)?.partial(), phi(&f.partial())?.scale_int(p as i64))))());
        dgam.series((|| Ok((gamma_act(&f, &g, 1)?.partial(), gamma_act(&f.partial(), &g, 1)?.scale(&chi))))());
        psiphi.series((|| Ok((psi(&phi(&f)?)?, f.clone())))());
        comm.series((|| Ok((phi(&gamma_act(&f, &g, 1)?)?, gamma_act(&phi(&f)?, &g, 1)?)))());
        let i = r.gen_range(1..p);
        psikill.series((|| {
            let y = psi(&times_one_plus_t_pow(&phi(&f)?, i)?)?;
            let z = TruncatedLaurent::zero(p, n, y.lo(), y.hi());
            Ok((y, z))
        })());
    }
    vec![dphi.done(), dgam.done(), psiphi.done(), psikill.done(), comm.done()]
}

/// The residue functional and its transformation rules.
pub fn residues(cfg: &Config) -> Vec<Check> {
    let (p, n) = (cfg.p, cfg.prec);
    let Ok(g) = cfg.gamma() else { return vec![Check::flag("config", false, Some("bad χ(γ)".into()))] };
    let one = PadicScalar::one(p, n);
    let mut r = rng(cfg, 2);
    let mut inv_t = Acc::new("Res(1/T)=1", None);
    inv_t.scalar(t_power(p, n, -1, cfg.hi).res().map(|v| (v, one)));
    let mut double_pole = Acc::new("Res(t(1+T)/T²)=1", None);
    double_pole.scalar((|| {
        let f = t_series(p, n, cfg.hi).try_mul(&TruncatedLaurent::from_terms(p, n, &[(-2, one), (-1, one)], cfg.hi)?)?;
        Ok((f.res()?, one))
    })());
    let mut rphi = Acc::new("Res(φf)=Res(f)", Some(n - 2));
    let mut rgam = Acc::new("Res(γf)=χ(γ)⁻¹Res(f)", Some(n - 2));
    let mut rder = Acc::new("Res(∂f)=0", None);
    let chi_inv = g.chi_pow(-1);
    for _ in 0..cfg.samples {
        let f = TruncatedLaurent::random(&mut r, p, n, cfg.lo, cfg.hi);
        rphi.scalar((|| Ok((phi(&f)?.res()?, f.res()?)))());
        rgam.scalar((|| Ok((gamma_act(&f, &g, 1)?.res()?, f.res()? * chi_inv)))());
        rder.scalar(f.partial().res().map(|v| (v, PadicScalar::zero(p, n))));
    }
    vec![inv_t.done(), double_pole.done(), rphi.done(), rgam.done(), rder.done()]
}

/// The rank-one table used by the battery: `(literal, expected class)`.
pub fn rank_one_table(p: u32, prec: i32) -> Vec<(String, Character, Class)> {
    let mut rows = Vec::new();
    for i in 0..=3u32 {
        rows.push((format!("x^-{i}"), Character::x_pow(p, prec, -(i as i64)), Class::XMinusI(i)));
        rows.push((format!("w*x^{i}"), Character::omega_x_pow(p, prec, i as i64), Class::OmegaXI(i)));
    }
    rows.push(("x".into(), Character::x(p, prec), Class::Generic));
    rows.push(("x^2".into(), Character::x_pow(p, prec, 2), Class::Generic));
    rows.push(("|x|".into(), Character::abs_x(p, prec), Class::Generic));
    rows.push(("|x|^2".into(), Character::abs_x(p, prec).pow(2), Class::Generic));
    rows.push(("ur(2)".into(), Character::unramified(PadicScalar::from_i64(p, 2, prec)).unwrap(), Class::Generic));
    rows
}

/// Complex, pairing and reduction identities over rank-one modules.
pub fn herr(cfg: &Config) -> Vec<Check> {
    let (p, n, hi) = (cfg.p, cfg.prec, cfg.hi);
    let Ok(g) = cfg.gamma() else { return vec![Check::flag("config", false, Some("bad χ(γ)".into()))] };
    let ex = crate::rankone::exact_precision(p);
    let mut out = Vec::new();

    let mut table_ok = true;
    let mut detail = Vec::new();
    for (name, d, want) in rank_one_table(p, ex) {
        match d.classify(cfg.search_limit, cfg.margin) {
            Ok(c) => {
                let dims = cohomology_dims(c.class);
                if c.class != want || euler_characteristic(dims) != -1 {
                    table_ok = false;
                    detail.push(format!("{name}: {}", c.class));
                }
            }
            Err(e) => {
                table_ok = false;
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    out.push(Check::flag("rank-one dimension table, χ=-1", table_ok, (!detail.is_empty()).then(|| detail.join("; "))));

    let mut r = rng(cfg, 3);
    let mut dd = Acc::new("d2∘d1=0", None);
    let mut resd2 = Acc::new("Res(d2(a,b))=0 over ω", Some(n - 2));
    let mut psimap = Acc::new("ψ-complex map is a chain map", None);
    let omega = ModulePresentation::rank_one(&Character::omega(p, ex), g);
    let twists = [Character::x_pow(p, ex, -1), Character::abs_x(p, ex), Character::omega_x_pow(p, ex, 1)];
    for s in 0..cfg.samples {
        let d = &twists[s % twists.len()];
        let x = TruncatedLaurent::random(&mut r, p, n, cfg.lo, hi);
        dd.series((|| {
            let m = ModulePresentation::rank_one(d, g)?;
            let z = d2(&m, &d1(&m, &HerrCochain::scalar0(x.clone()))?)?;
            let z = z.scalar()?.clone();
            let zero = TruncatedLaurent::zero(p, n, z.lo(), z.hi());
            Ok((z, zero))
        })());
        let (a, b) = (TruncatedLaurent::random(&mut r, p, n, cfg.lo, hi), TruncatedLaurent::random(&mut r, p, n, cfg.lo, hi));
        resd2.scalar((|| {
            let m = omega.clone()?;
            Ok((d2(&m, &HerrCochain::scalar1(a.clone(), b.clone()))?.scalar()?.res()?, PadicScalar::zero(p, n)))
        })());
        psimap.samples += 1;
        match ModulePresentation::rank_one(d, g).and_then(|m| psi_chain_defect(&m, &HerrCochain::scalar1(a.clone(), b.clone()))) {
            Ok(None) => {}
            Ok(Some(v)) => psimap.fail(format!("defect valuation {v}")),
            Err(e) => psimap.fail(e.to_string()),
        }
    }
    out.extend([dd.done(), resd2.done(), psimap.done()]);

    let opts = ReduceOptions { margin: cfg.margin, search_limit: cfg.search_limit, ..ReduceOptions::default() };
    out.push(match h2_reduce(&Character::omega(p, ex), g, &t_power(p, n, -1, hi), opts) {
        Ok((H2Reduction::CanonicalClass { c, k: 0, .. }, rep)) => Check {
            name: "h2_reduce(ω, 1/T) = 1·[1/T]".into(),
            pass: c.eq_at_prec(&PadicScalar::one(p, n)) && rep.residual_val >= rep.prec - cfg.margin,
            residual_val: Some(rep.residual_val),
            required_val: Some(rep.prec - cfg.margin),
            samples: 1,
            detail: Some(format!("c = {c}")),
        },
        Ok((other, _)) => Check::flag("h2_reduce(ω, 1/T) = 1·[1/T]", false, Some(format!("{other:?}"))),
        Err(e) => Check::from_error("h2_reduce(ω, 1/T) = 1·[1/T]", e),
    });

    let mut triv = Acc::new("h2_reduce(|x|, f) trivializes", Some(n - 3));
    let heavy = (cfg.samples / 10).max(1);
    let absx = Character::abs_x(p, ex);
    for _ in 0..heavy {
        let f = TruncatedLaurent::random(&mut r, p, n, cfg.lo.max(-4), hi);
        triv.series((|| match h2_reduce(&absx, g, &f, opts)? {
            (H2Reduction::Trivialization { a, b }, _) => {
                let m = ModulePresentation::rank_one(&absx, g)?;
                Ok((coboundary2(&m, &a, &b)?, f.clone()))
            }
            (other, _) => Err(crate::Error::Unsupported(format!("expected a trivialization, got {other:?}"))),
        })());
    }
    out.push(triv.done());

    let mut pair = Acc::new("⟨t, (1+T)/T²⟩ = 1", None);
    pair.scalar((|| {
        let one = PadicScalar::one(p, n);
        let c1 = HerrCochain::scalar0(t_series(p, n, hi));
        let c2 = HerrCochain::scalar2(TruncatedLaurent::from_terms(p, n, &[(-2, one), (-1, one)], hi)?);
        Ok((h2_pairing(&Character::x_pow(p, ex, -1), &c1, &Character::omega_x_pow(p, ex, 1), &c2, g)?, one))
    })());
    out.push(pair.done());

    let mut chain_ok = true;
    let mut vals = Vec::new();
    let mut f = t_power(p, n, -1, hi + 3);
    for k in 0..=2u32 {
        if k > 0 {
            f = partial_transfer(&f);
        }
        let same = f.agrees(&h2_generator(p, n, hi, k));
        let v = h0_generator(p, n, hi + 3, k).and_then(|tk| {
            h2_pairing(&Character::x_pow(p, ex, -(k as i64)), &HerrCochain::scalar0(tk), &Character::omega_x_pow(p, ex, k as i64), &HerrCochain::scalar2(f.clone()), g)
        });
        match v {
            Ok(v) if same && !v.is_zero() => vals.push(v.to_string()),
            Ok(v) => {
                chain_ok = false;
                vals.push(format!("{v} (generator match: {same})"));
            }
            Err(e) => {
                chain_ok = false;
                vals.push(e.to_string());
            }
        }
    }
    out.push(Check::flag("∂-transfer chain pairs nontrivially", chain_ok, Some(vals.join(", "))));
    out
}

/// Fiber cohomology, stabilization, the shift model and Gauss sums.
pub fn torsion(cfg: &Config) -> Vec<Check> {
    let (p, n) = (cfg.p, cfg.prec);
    let Ok(g) = cfg.gamma() else { return vec![Check::flag("config", false, Some("bad χ(γ)".into()))] };
    let ex = crate::rankone::exact_precision(p);
    let mut out = Vec::new();
    let nmax = 3;
    let cases = [(1usize, "1", Character::trivial(p, ex)), (2, "1", Character::trivial(p, ex)), (1, "w", Character::omega(p, ex)), (2, "w", Character::omega(p, ex))];
    for (k, name, d) in &cases {
        let label = format!("R/t^{k}@{name}: h0=h1, χ=0, stabilized");
        out.push(match twisted_family(nmax, *k, std::slice::from_ref(d), &g, n).and_then(|fam| torsion_cohomology(&fam, cfg.margin)) {
            Ok(c) => {
                let ok = c.levels.iter().all(|l| l.dims.dim_fix == l.dims.dim_coinv && l.equivariance_defect_val.is_none())
                    && c.euler_characteristic == 0;
                Check::flag(&label, ok, Some(format!("h0={} h1={} stabilized_at={}", c.h0, c.h1, c.stabilized_at)))
            }
            Err(e) => Check::from_error(&label, e),
        });
    }

    let mut r = rng(cfg, 4);
    let mut shift = Acc::new("(φ-1)x=y in the shift model", None);
    match twisted_family(nmax, 1, &[Character::x(p, ex)], &g, n) {
        Ok(fam) => {
            for _ in 0..cfg.samples {
                let m = crate::padic::ppow(p, n as u32) as i64;
                let y: Vec<Vec<PadicScalar>> =
                    fam.iter().map(|s| (0..s.dim()).map(|_| PadicScalar::from_i64(p, r.gen_range(0..m), n)).collect()).collect();
                shift.samples += 1;
                match phi_shift_preimage(&fam, &y) {
                    Ok(s) if s.residual_val.is_none() => {}
                    Ok(s) => shift.fail(format!("residual valuation {:?}", s.residual_val)),
                    Err(e) => shift.fail(e.to_string()),
                }
            }
        }
        Err(e) => shift.fail(e.to_string()),
    }
    out.push(shift.done());
    out.push(gauss_check(p, n, &g, 3));
    out
}

/// `σ_g(G(η)t^i) = η^{-1}(g)χ(g)^i G(η)t^i` and spanning, at level 1.
pub fn gauss_check(p: u32, n: i32, g: &crate::operators::GammaGenerator, k: usize) -> Check {
    let name = "Gauss sums: eigenrelation and span";
    let run = || -> Result<(bool, String)> {
        let ring = DifRing::new(CyclotomicLevel::new(p, 1, n)?, k)?;
        let chi = g.chi();
        let m = ring.gamma_matrix(&chi, &PadicScalar::one(p, n))?;
        let w = PadicScalar::teichmuller(p, chi.reduce(1).integer_rep().unwrap() as i64, n)?;
        let basis = gauss_basis(&ring)?;
        let mut ok = true;
        for (j, i, v) in &basis {
            let eig = w.pow(-*j)? * chi.pow(*i as i64)?;
            let x = ring.flatten(v);
            ok &= m.mul_vec(&x).iter().zip(&x).all(|(a, b)| (*a - eig * *b).is_zero());
        }
        let cols: Vec<_> = basis.iter().map(|b| ring.flatten(&b.2)).collect();
        let rank = crate::linalg::rank(&crate::linalg::Matrix::from_columns(&cols), 3)?;
        Ok((ok && rank == ring.dim(), format!("{} vectors, rank {rank} of {}", cols.len(), ring.dim())))
    };
    match run() {
        Ok((ok, d)) => Check::flag(name, ok, Some(d)),
        Err(e) => Check::from_error(name, e),
    }
}

/// Shapiro's lemma on fibers and the reconstruction formula.
pub fn shapiro(cfg: &Config) -> Vec<Check> {
    let (p, n) = (cfg.p, cfg.prec);
    let Ok(g) = cfg.gamma() else { return vec![Check::flag("config", false, Some("bad χ(γ)".into()))] };
    let ex = crate::rankone::exact_precision(p);
    let mut out = Vec::new();
    let mut r = rng(cfg, 5);
    let mut recon = Acc::new("f = Σ γ_K^i Q(γ_L^{-1} f_{m-i})", None);
    for m in [2usize, 3] {
        let base = TorsionFiber::twisted(1, 2, &[Character::x(p, ex)], &g, n).map(|s| s.restrict(m as u32));
        let ind = base.and_then(|b| InducedModule::new(b, m));
        for _ in 0..cfg.samples {
            recon.samples += 1;
            match &ind {
                Ok(ind) => {
                    let f: Vec<_> = (0..ind.dim()).map(|_| PadicScalar::from_i64(p, r.gen_range(-1000..1000), n)).collect();
                    if !ind.reconstruct(&f).iter().zip(&f).all(|(a, b)| a.eq_at_prec(b)) {
                        recon.fail(format!("m = {m}"));
                    }
                }
                Err(e) => recon.fail(e.to_string()),
            }
        }
    }
    out.push(recon.done());
    for (k, name, d) in [(1usize, "1", Character::trivial(p, ex)), (2, "x^-1", Character::x_pow(p, ex, -1)), (1, "w", Character::omega(p, ex))] {
        for m in [1usize, 2, 3] {
            let label = format!("Shapiro on R/t^{k}@{name}, m={m}");
            let rep = TorsionFiber::twisted(1, k, &[d], &g, n).and_then(|s| verify_shapiro(&s.restrict(m as u32), m, cfg.margin));
            out.push(match rep {
                Ok(rep) => Check::flag(&label, rep.holds(), Some(format!("base {:?}, induced {:?}", rep.base_dims, rep.induced_dims))),
                Err(e) => Check::from_error(&label, e),
            });
        }
    }
    out
}
