//! The Herr complex `D → D ⊕ D → D`, its cup products, the residue pairing
//! into `H^2(ω)`, and reduction of degree-2 classes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::operators::{gamma_act, phi, psi, GammaGenerator};
use crate::padic::PadicScalar;
use crate::rankone::{cohomology_dims, h2_generator, Character, Class};
use crate::series::{substitute_monomials, t_power, t_series, TruncatedLaurent};

/// A matrix entry: either a constant of the base field or a series.
#[derive(Clone, Debug)]
pub enum Entry {
    Const(PadicScalar),
    Series(TruncatedLaurent),
}

impl Entry {
    fn apply(&self, f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
        match self {
            Entry::Const(c) => Ok(f.scale(c)),
            Entry::Series(s) => s.try_mul(f),
        }
    }

    fn mul(&self, o: &Entry) -> Result<Entry> {
        Ok(match (self, o) {
            (Entry::Const(a), Entry::Const(b)) => Entry::Const(*a * *b),
            (Entry::Const(a), Entry::Series(s)) | (Entry::Series(s), Entry::Const(a)) => Entry::Series(s.scale(a)),
            (Entry::Series(a), Entry::Series(b)) => Entry::Series(a.try_mul(b)?),
        })
    }

    fn map(&self, op: impl Fn(&TruncatedLaurent) -> Result<TruncatedLaurent>) -> Result<Entry> {
        Ok(match self {
            Entry::Const(c) => Entry::Const(*c),
            Entry::Series(s) => Entry::Series(op(s)?),
        })
    }

    fn to_series(&self, hi: i32) -> TruncatedLaurent {
        match self {
            Entry::Const(c) => TruncatedLaurent::constant(c.reduce(c.prec().min(crate::series::PREC_CEILING)), hi),
            Entry::Series(s) => s.clone(),
        }
    }

    fn p(&self) -> u32 {
        match self {
            Entry::Const(c) => c.p(),
            Entry::Series(s) => s.p(),
        }
    }
}

/// `D` given by `φ(e) = e A_φ`, `γ(e) = e A_γ` on a basis `e` of rank `d`:
/// on coordinates, `φ_D(x) = A_φ φ(x)` and `γ_D(x) = A_γ γ(x)`.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    p: u32,
    rank: usize,
    a_phi: Vec<Entry>,
    a_gamma: Vec<Entry>,
    gamma: GammaGenerator,
    character: Option<Character>,
}

impl ModulePresentation {
    /// Matrices are row-major `d × d`.
    pub fn new(rank: usize, a_phi: Vec<Entry>, a_gamma: Vec<Entry>, gamma: GammaGenerator) -> Result<Self> {
        let p = gamma.p();
        if a_phi.len() != rank * rank || a_gamma.len() != rank * rank {
            return Err(Error::Unsupported(format!("matrices must be {rank}x{rank}")));
        }
        if let Some(e) = a_phi.iter().chain(&a_gamma).find(|e| e.p() != p) {
            return Err(Error::PrimeMismatch(p, e.p()));
        }
        let m = ModulePresentation { p, rank, a_phi, a_gamma, gamma, character: None };
        if m.a_phi.iter().all(|e| matches!(e, Entry::Const(_))) {
            let c = Matrix::from_fn(rank, rank, |i, j| match &m.a_phi[i * rank + j] {
                Entry::Const(c) => *c,
                Entry::Series(_) => unreachable!(),
            });
            linalg::inverse(&c)?;
        }
        Ok(m)
    }

    /// `R(δ)`.
    pub fn rank_one(delta: &Character, gamma: GammaGenerator) -> Result<Self> {
        if delta.p() != gamma.p() {
            return Err(Error::PrimeMismatch(delta.p(), gamma.p()));
        }
        let dg = delta.eval_gamma(&gamma)?;
        Ok(ModulePresentation {
            p: delta.p(),
            rank: 1,
            a_phi: vec![Entry::Const(delta.delta_p())],
            a_gamma: vec![Entry::Const(dg)],
            gamma,
            character: Some(*delta),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gamma(&self) -> &GammaGenerator {
        &self.gamma
    }

    pub fn character(&self) -> Option<&Character> {
        self.character.as_ref()
    }

    fn mat_vec(&self, m: &[Entry], v: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
        let d = self.rank;
        (0..d)
            .map(|i| {
                let mut acc = m[i * d].apply(&v[0])?;
                for j in 1..d {
                    acc = acc.try_add(&m[i * d + j].apply(&v[j])?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    fn check_len(&self, v: &[TruncatedLaurent]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::Unsupported(format!("vector of length {} in a rank {} module", v.len(), self.rank)));
        }
        if let Some(f) = v.iter().find(|f| f.p() != self.p) {
            return Err(Error::PrimeMismatch(self.p, f.p()));
        }
        Ok(())
    }

    pub fn act_phi(&self, x: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
        self.check_len(x)?;
        let fx: Vec<_> = x.iter().map(phi).collect::<Result<_>>()?;
        self.mat_vec(&self.a_phi, &fx)
    }

    pub fn act_gamma(&self, x: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
        self.check_len(x)?;
        let gx: Vec<_> = x.iter().map(|f| gamma_act(f, &self.gamma, 1)).collect::<Result<_>>()?;
        self.mat_vec(&self.a_gamma, &gx)
    }

    /// `ψ_D(y) = ψ(A_φ^{-1} y)`; needs a constant `A_φ`.
    pub fn act_psi(&self, y: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
        self.check_len(y)?;
        let d = self.rank;
        let mut consts = Vec::with_capacity(d * d);
        for e in &self.a_phi {
            match e {
                Entry::Const(c) => consts.push(*c),
                Entry::Series(_) => return Err(Error::Unsupported("ψ with a non-constant Frobenius matrix".into())),
            }
        }
        let inv = linalg::inverse(&Matrix::from_fn(d, d, |i, j| consts[i * d + j]))?;
        let inv: Vec<Entry> = (0..d * d).map(|k| Entry::Const(inv.get(k / d, k % d))).collect();
        self.mat_vec(&inv, y)?.iter().map(psi).collect()
    }

    /// Least valuation of `A_φ φ(A_γ) - A_γ γ(A_φ)`, or `None` when it
    /// vanishes at precision. `hi` is the window given to constant entries.
    pub fn commutation_defect(&self, hi: i32) -> Result<Option<i32>> {
        let d = self.rank;
        let phi_g: Vec<Entry> = self.a_gamma.iter().map(|e| e.map(phi)).collect::<Result<_>>()?;
        let gam_f: Vec<Entry> =
            self.a_phi.iter().map(|e| e.map(|s| gamma_act(s, &self.gamma, 1))).collect::<Result<_>>()?;
        let mut worst: Option<i32> = None;
        for i in 0..d {
            for j in 0..d {
                let mut l = TruncatedLaurent::zero(self.p, crate::series::PREC_CEILING, 0, hi);
                let mut r = l.clone();
                for k in 0..d {
                    l = l.try_add(&self.a_phi[i * d + k].mul(&phi_g[k * d + j])?.to_series(hi))?;
                    r = r.try_add(&self.a_gamma[i * d + k].mul(&gam_f[k * d + j])?.to_series(hi))?;
                }
                let diff = l.try_sub(&r)?;
                if !diff.is_zero() {
                    let v = diff.min_val().unwrap();
                    worst = Some(worst.map_or(v, |w| w.min(v)));
                }
            }
        }
        Ok(worst)
    }

    /// `M ⊗ N` on the Kronecker basis `e_i ⊗ f_j`.
    pub fn tensor(&self, o: &Self) -> Result<Self> {
        if self.p != o.p {
            return Err(Error::PrimeMismatch(self.p, o.p));
        }
        let kron = |a: &[Entry], b: &[Entry]| -> Result<Vec<Entry>> {
            let (m, n) = (self.rank, o.rank);
            let dn = m * n;
            let mut out = Vec::with_capacity(dn * dn);
            for r in 0..dn {
                for c in 0..dn {
                    out.push(a[(r / n) * m + c / n].mul(&b[(r % n) * n + c % n])?);
                }
            }
            Ok(out)
        };
        Ok(ModulePresentation {
            p: self.p,
            rank: self.rank * o.rank,
            a_phi: kron(&self.a_phi, &o.a_phi)?,
            a_gamma: kron(&self.a_gamma, &o.a_gamma)?,
            gamma: self.gamma,
            character: match (&self.character, &o.character) {
                (Some(a), Some(b)) => Some(a.mul(b)),
                _ => None,
            },
        })
    }
}

/// A cochain of the Herr complex; degree 1 carries the pair `(x, y)` with
/// `x` on the `γ` side and `y` on the `φ` side.
#[derive(Clone, Debug)]
pub struct HerrCochain {
    pub degree: u8,
    pub parts: Vec<Vec<TruncatedLaurent>>,
}

impl HerrCochain {
    pub fn zero_form(x: Vec<TruncatedLaurent>) -> Self {
        HerrCochain { degree: 0, parts: vec![x] }
    }

    pub fn one_form(x: Vec<TruncatedLaurent>, y: Vec<TruncatedLaurent>) -> Self {
        HerrCochain { degree: 1, parts: vec![x, y] }
    }

    pub fn two_form(x: Vec<TruncatedLaurent>) -> Self {
        HerrCochain { degree: 2, parts: vec![x] }
    }

    /// Rank-one shorthands.
    pub fn scalar0(f: TruncatedLaurent) -> Self {
        Self::zero_form(vec![f])
    }

    pub fn scalar1(x: TruncatedLaurent, y: TruncatedLaurent) -> Self {
        Self::one_form(vec![x], vec![y])
    }

    pub fn scalar2(f: TruncatedLaurent) -> Self {
        Self::two_form(vec![f])
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.try_add(b))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.try_sub(b))
    }

    fn zip(&self, o: &Self, f: impl Fn(&TruncatedLaurent, &TruncatedLaurent) -> Result<TruncatedLaurent>) -> Result<Self> {
        if self.degree != o.degree {
            return Err(Error::Unsupported(format!("degree {} against degree {}", self.degree, o.degree)));
        }
        let parts = self
            .parts
            .iter()
            .zip(&o.parts)
            .map(|(u, v)| u.iter().zip(v).map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(HerrCochain { degree: self.degree, parts })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().flatten().all(|f| f.is_zero())
    }

    /// Least valuation over all components; `None` for a zero cochain.
    pub fn min_val(&self) -> Option<i32> {
        self.parts.iter().flatten().filter(|f| !f.is_zero()).filter_map(|f| f.min_val()).min()
    }

    pub fn prec(&self) -> i32 {
        self.parts.iter().flatten().map(|f| f.prec()).min().unwrap_or(crate::padic::EXACT_PREC)
    }

    /// The rank-one payload of a degree 0 or 2 cochain.
    pub fn scalar(&self) -> Result<&TruncatedLaurent> {
        match (self.degree, self.parts.as_slice()) {
            (0 | 2, [v]) if v.len() == 1 => Ok(&v[0]),
            _ => Err(Error::Unsupported("not a rank-one cochain of degree 0 or 2".into())),
        }
    }
}

fn vsub(a: &[TruncatedLaurent], b: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
    a.iter().zip(b).map(|(x, y)| x.try_sub(y)).collect()
}

fn vneg(a: &[TruncatedLaurent]) -> Vec<TruncatedLaurent> {
    a.iter().map(|x| x.scale_int(-1)).collect()
}

fn expect_degree(c: &HerrCochain, d: u8) -> Result<()> {
    if c.degree != d {
        return Err(Error::Unsupported(format!("expected a degree {d} cochain, got degree {}", c.degree)));
    }
    Ok(())
}

/// `d1(x) = ((γ-1)x, (φ-1)x)`.
pub fn d1(m: &ModulePresentation, c: &HerrCochain) -> Result<HerrCochain> {
    expect_degree(c, 0)?;
    let x = &c.parts[0];
    Ok(HerrCochain::one_form(vsub(&m.act_gamma(x)?, x)?, vsub(&m.act_phi(x)?, x)?))
}

/// `d2(x, y) = (φ-1)x - (γ-1)y`.
pub fn d2(m: &ModulePresentation, c: &HerrCochain) -> Result<HerrCochain> {
    expect_degree(c, 1)?;
    let (x, y) = (&c.parts[0], &c.parts[1]);
    let a = vsub(&m.act_phi(x)?, x)?;
    let b = vsub(&m.act_gamma(y)?, y)?;
    Ok(HerrCochain::two_form(vsub(&a, &b)?))
}

/// The ψ-complex `D → D ⊕ D → D` with `d1(x) = ((γ-1)x, (ψ-1)x)` and
/// `d2(x, y) = (ψ-1)x - (γ-1)y`.
pub fn d1_psi(m: &ModulePresentation, c: &HerrCochain) -> Result<HerrCochain> {
    expect_degree(c, 0)?;
    let x = &c.parts[0];
    Ok(HerrCochain::one_form(vsub(&m.act_gamma(x)?, x)?, vsub(&m.act_psi(x)?, x)?))
}

pub fn d2_psi(m: &ModulePresentation, c: &HerrCochain) -> Result<HerrCochain> {
    expect_degree(c, 1)?;
    let (x, y) = (&c.parts[0], &c.parts[1]);
    let a = vsub(&m.act_psi(x)?, x)?;
    let b = vsub(&m.act_gamma(y)?, y)?;
    Ok(HerrCochain::two_form(vsub(&a, &b)?))
}

/// The comparison map to the ψ-complex: identity in degree 0, `(x, y) ↦ (x, -ψy)`
/// in degree 1, `-ψ` in degree 2.
pub fn psi_complex_map(m: &ModulePresentation, c: &HerrCochain) -> Result<HerrCochain> {
    match c.degree {
        0 => Ok(c.clone()),
        1 => Ok(HerrCochain::one_form(c.parts[0].clone(), vneg(&m.act_psi(&c.parts[1])?))),
        2 => Ok(HerrCochain::two_form(vneg(&m.act_psi(&c.parts[0])?))),
        d => Err(Error::DegreeOverflow(d, 0)),
    }
}

/// Compares `d_ψ ∘ map` with `map ∘ d` on a cochain of degree 0 or 1.
/// Returns the least valuation of the difference, `None` when it vanishes.
pub fn psi_chain_defect(m: &ModulePresentation, c: &HerrCochain) -> Result<Option<i32>> {
    let (lhs, rhs) = match c.degree {
        0 => (d1_psi(m, &psi_complex_map(m, c)?)?, psi_complex_map(m, &d1(m, c)?)?),
        1 => (d2_psi(m, &psi_complex_map(m, c)?)?, psi_complex_map(m, &d2(m, c)?)?),
        d => return Err(Error::DegreeOverflow(d, 1)),
    };
    let diff = lhs.try_sub(&rhs)?;
    Ok(if diff.is_zero() { None } else { diff.min_val() })
}

fn kron(x: &[TruncatedLaurent], y: &[TruncatedLaurent]) -> Result<Vec<TruncatedLaurent>> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a.try_mul(b)?);
        }
    }
    Ok(out)
}

/// Cup product `C^i(M) × C^j(N) → C^{i+j}(M ⊗ N)`:
/// `(0,0)`: `x⊗y`; `(0,1)`: `(x⊗y, x⊗z)`; `(0,2)`: `x⊗y`;
/// `(1,1)`: `((x,y),(z,w)) ↦ y⊗γ(z) - x⊗φ(w)`.
pub fn cup(n: &ModulePresentation, c1: &HerrCochain, c2: &HerrCochain) -> Result<HerrCochain> {
    match (c1.degree, c2.degree) {
        (0, 0) => Ok(HerrCochain::zero_form(kron(&c1.parts[0], &c2.parts[0])?)),
        (0, 1) => Ok(HerrCochain::one_form(kron(&c1.parts[0], &c2.parts[0])?, kron(&c1.parts[0], &c2.parts[1])?)),
        (0, 2) => Ok(HerrCochain::two_form(kron(&c1.parts[0], &c2.parts[0])?)),
        (1, 1) => {
            let (x, y) = (&c1.parts[0], &c1.parts[1]);
            let (z, w) = (&c2.parts[0], &c2.parts[1]);
            let a = kron(y, &n.act_gamma(z)?)?;
            let b = kron(x, &n.act_phi(w)?)?;
            Ok(HerrCochain::two_form(vsub(&a, &b)?))
        }
        (i, j) if i + j > 2 => Err(Error::DegreeOverflow(i, j)),
        (i, j) => Err(Error::Unsupported(format!("cup product in degrees ({i}, {j}); put the lower degree first"))),
    }
}

/// `Res` of the cup product of classes over `R(δ1)` and `R(δ2)` with
/// `δ1 δ2 = ω`. Degrees `(2, 0)` are reordered, the product being commutative
/// in rank one.
pub fn h2_pairing(
    delta1: &Character,
    c1: &HerrCochain,
    delta2: &Character,
    c2: &HerrCochain,
    gamma: GammaGenerator,
) -> Result<PadicScalar> {
    let p = delta1.p();
    let prod = delta1.mul(delta2);
    if !prod.eq_at_prec(&Character::omega(p, prod.prec())) {
        return Err(Error::CharacterMismatch(format!("{delta1} · {delta2} is not ω")));
    }
    if c1.degree + c2.degree != 2 {
        return Err(Error::Unsupported(format!("degrees {} + {} do not sum to 2", c1.degree, c2.degree)));
    }
    let (c1, c2, d2) = if c1.degree > c2.degree && c1.degree != 1 { (c2, c1, delta1) } else { (c1, c2, delta2) };
    let n = ModulePresentation::rank_one(d2, gamma)?;
    let c = cup(&n, c1, c2)?;
    if c.parts[0].len() != 1 {
        return Err(Error::Unsupported("pairing needs rank-one cochains".into()));
    }
    c.parts[0][0].res()
}

/// The 2×2 matrix of the cup pairing `H^1(x^{-1}) × H^1(ωx) → Q_p` on the
/// bases `{(t,0), (0,t)}` and `{(∂a, -(1+T)/T²), (-(1+T)/T², ∂b)}`. The
/// `(1,2)` entry depends on `b` with `ψ(b) = 0`, which is not explicit, and is
/// left as `None`. The `(2,1)` entry is evaluated on the given `a ∈ T R^+`.
pub fn duality_matrix(
    p: u32,
    prec: i32,
    hi: i32,
    a: &TruncatedLaurent,
    gamma: GammaGenerator,
) -> Result<[[Option<PadicScalar>; 2]; 2]> {
    if a.lo() < 0 || a.coeff(0).is_some_and(|c| !c.is_zero()) {
        return Err(Error::Unsupported("a must lie in T·R^+".into()));
    }
    let left = Character::x_pow(p, prec, -1);
    let right = Character::omega_x_pow(p, prec, 1);
    let t = t_series(p, prec, hi);
    let zero = TruncatedLaurent::zero(p, prec, 0, hi);
    let one = PadicScalar::one(p, prec);
    let g = TruncatedLaurent::from_terms(p, prec, &[(-2, -one), (-1, -one)], hi)?;
    let first = [HerrCochain::scalar1(t.clone(), zero.clone()), HerrCochain::scalar1(zero, t)];
    let col1 = HerrCochain::scalar1(a.partial(), g);
    let pair = |c1: &HerrCochain, c2: &HerrCochain| h2_pairing(&left, c1, &right, c2, gamma);
    Ok([[Some(pair(&first[0], &col1)?), None], [Some(pair(&first[1], &col1)?), {
        let col2_known = HerrCochain::scalar1(
            TruncatedLaurent::from_terms(p, prec, &[(-2, -one), (-1, -one)], hi)?,
            TruncatedLaurent::zero(p, prec, 0, hi),
        );
        Some(pair(&first[1], &col2_known)?)
    }]])
}

/// Outcome of `h2_reduce`.
#[derive(Clone, Debug)]
pub enum H2Reduction {
    /// `f = (δ(χ(γ))γ - 1)a - (δ(p)φ - 1)b`.
    Trivialization { a: TruncatedLaurent, b: TruncatedLaurent },
    /// `f - c ∂^k(1/T) = (δ(χ(γ))γ - 1)a - (δ(p)φ - 1)b`.
    CanonicalClass { c: PadicScalar, k: u32, a: TruncatedLaurent, b: TruncatedLaurent },
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    /// Least valuation of the re-substitution defect; equals `prec` when the
    /// defect vanishes.
    pub residual_val: i32,
    pub prec: i32,
    pub method: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    /// Digits of slack required before a pivot or an inconsistency is trusted.
    pub margin: i32,
    /// Extra polar degrees allowed in the witnesses below `f`'s window.
    pub extra: i32,
    pub search_limit: u32,
    /// Digits added to the working precision of the solve.
    pub guard: i32,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { margin: 3, extra: 0, search_limit: 10, guard: 12 }
    }
}

/// Reduces a 2-cochain of `R(δ)` to a coboundary or to a multiple of the
/// canonical generator `∂^k(1/T)` of `H^2(ωx^k)`.
///
/// Witnesses come from an exact linear solve over the truncation, run on the
/// stored representative of `f` with `guard` extra digits; the returned report
/// carries the defect of re-substituting them against `f` itself.
pub fn h2_reduce(
    delta: &Character,
    gamma: GammaGenerator,
    f: &TruncatedLaurent,
    opts: ReduceOptions,
) -> Result<(H2Reduction, ReductionReport)> {
    let p = delta.p();
    if f.p() != p {
        return Err(Error::PrimeMismatch(p, f.p()));
    }
    let class = delta.classify(opts.search_limit, opts.margin)?.class;
    let m = ModulePresentation::rank_one(delta, gamma)?;
    let prec = f.prec().min(crate::series::PREC_CEILING);
    let hi = f.hi();
    let work = (prec + opts.guard).min(crate::series::PREC_CEILING);
    let lifted = f.lift(work);
    match class {
        Class::OmegaXI(k) => {
            let tk = t_series(p, work, hi + 2).pow(k)?;
            let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
            let fact: i64 = (1..=k as i64).product();
            let c = tk.try_mul(&lifted)?.res()?.div_int(sign * fact);
            let gen = h2_generator(p, work, hi, k);
            let target = lifted.try_sub(&gen.scale(&c))?;
            let (a, b) = solve_coboundary(&m, &target, opts)?;
            let defect = f.try_sub(&gen.scale(&c))?;
            let rep = report(&m, &a, &b, &defect, "residue_projection+windowed_linear_solve")?;
            Ok((H2Reduction::CanonicalClass { c, k, a, b }, rep))
        }
        _ => {
            debug_assert_eq!(cohomology_dims(class).2, 0);
            let (a, b) = solve_coboundary(&m, &lifted, opts)?;
            let rep = report(&m, &a, &b, f, "windowed_linear_solve")?;
            Ok((H2Reduction::Trivialization { a, b }, rep))
        }
    }
}

/// `(δ(χ(γ))γ - 1)a - (δ(p)φ - 1)b`.
pub fn coboundary2(m: &ModulePresentation, a: &TruncatedLaurent, b: &TruncatedLaurent) -> Result<TruncatedLaurent> {
    let ga = m.act_gamma(std::slice::from_ref(a))?.remove(0).try_sub(a)?;
    let pb = m.act_phi(std::slice::from_ref(b))?.remove(0).try_sub(b)?;
    ga.try_sub(&pb)
}

fn report(
    m: &ModulePresentation,
    a: &TruncatedLaurent,
    b: &TruncatedLaurent,
    f: &TruncatedLaurent,
    method: &'static str,
) -> Result<ReductionReport> {
    let diff = coboundary2(m, a, b)?.try_sub(f)?;
    Ok(ReductionReport { residual_val: diff.min_val().unwrap_or(diff.prec()), prec: diff.prec(), method })
}

fn solve_coboundary(
    m: &ModulePresentation,
    f: &TruncatedLaurent,
    opts: ReduceOptions,
) -> Result<(TruncatedLaurent, TruncatedLaurent)> {
    let p = m.p();
    let prec = f.prec().min(crate::series::PREC_CEILING);
    let hi = f.hi();
    // b's polar part reaches one degree below f; φ pushes it down to
    // `b_cols[0].lo()`, and a must reach that far to absorb it.
    let lb = f.lo().min(0) - 1 - opts.extra;
    let (dp, dg) = match (&m.a_phi[..], &m.a_gamma[..]) {
        ([Entry::Const(dp)], [Entry::Const(dg)]) => (*dp, *dg),
        _ => return Err(Error::Unsupported("coboundary solve needs a rank-one module".into())),
    };
    let phis = substitute_monomials(p, &PadicScalar::from_i64(p, p as i64, prec + 2), lb, hi, prec)?;
    let mut b_cols = Vec::with_capacity(phis.len());
    for (img, j) in phis.iter().zip(lb..) {
        b_cols.push(t_power(p, prec, j, hi).try_sub(&img.scale(&dp))?);
    }
    let la = b_cols.iter().map(|c| c.lo()).min().unwrap().min(f.lo());
    let gams = substitute_monomials(p, &m.gamma.chi(), la, hi, prec)?;
    let mut cols = Vec::with_capacity(gams.len() + b_cols.len());
    for (img, j) in gams.iter().zip(la..) {
        cols.push(img.scale(&dg).try_sub(&t_power(p, prec, j, hi))?);
    }
    cols.extend(b_cols);
    let dmin = cols.iter().map(|c| c.lo()).min().unwrap().min(f.lo());
    let dmax = cols.iter().map(|c| c.hi()).min().unwrap().min(f.hi());
    let zero = PadicScalar::exact_zero(p);
    let at = |s: &TruncatedLaurent, d: i32| if d < s.lo() { zero } else { s.coeff(d).unwrap() };
    let rows = (dmax - dmin + 1) as usize;
    let a = Matrix::from_fn(rows, cols.len(), |i, j| at(&cols[j], dmin + i as i32));
    let rhs: Vec<PadicScalar> = (0..rows).map(|i| at(f, dmin + i as i32)).collect();
    let sol = linalg::solve(&a, &rhs, opts.margin)?;
    let n = (hi - la + 1) as usize;
    let wa = TruncatedLaurent::new(p, la, sol.x[..n].to_vec())?;
    let wb = TruncatedLaurent::new(p, lb, sol.x[n..].to_vec())?;
    Ok((wa, wb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: i32 = 12;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(2024)
    }

    #[test]
    fn complex_property_rank_one() {
        let mut r = rng();
        for p in [3u32, 5] {
            let g = GammaGenerator::default_for(p);
            for delta in [Character::omega(p, N), Character::x_pow(p, N, -1), Character::abs_x(p, N)] {
                let m = ModulePresentation::rank_one(&delta, g).unwrap();
                let x = HerrCochain::scalar0(TruncatedLaurent::random(&mut r, p, N, -6, 50));
                let dd = d2(&m, &d1(&m, &x).unwrap()).unwrap();
                assert!(dd.is_zero(), "p={p} {delta}");
            }
        }
    }

    #[test]
    fn t_is_a_zero_cocycle_in_x_inverse() {
        let p = 5;
        let m = ModulePresentation::rank_one(&Character::x_pow(p, N, -1), GammaGenerator::default_for(p)).unwrap();
        assert!(d1(&m, &HerrCochain::scalar0(t_series(p, N, 60))).unwrap().is_zero());
    }

    #[test]
    fn res_kills_d2_over_omega() {
        let mut r = rng();
        for p in [3u32, 5, 7] {
            let m = ModulePresentation::rank_one(&Character::omega(p, N), GammaGenerator::default_for(p)).unwrap();
            for _ in 0..5 {
                let a = TruncatedLaurent::random(&mut r, p, N, -8, 40);
                let b = TruncatedLaurent::random(&mut r, p, N, -8, 40);
                let f = d2(&m, &HerrCochain::scalar1(a, b)).unwrap();
                let res = f.scalar().unwrap().res().unwrap();
                assert!(res.is_zero() || res.val() >= N - 2, "p={p} res={res}");
            }
        }
    }

    #[test]
    fn cup_examples() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let triv = ModulePresentation::rank_one(&Character::trivial(p, N), g).unwrap();
        let one = PadicScalar::one(p, N);
        let c1 = HerrCochain::scalar1(TruncatedLaurent::zero(p, N, 0, 20), TruncatedLaurent::constant(one, 20));
        let c2 = HerrCochain::scalar1(TruncatedLaurent::constant(one, 20), TruncatedLaurent::zero(p, N, 0, 20));
        let c = cup(&triv, &c1, &c2).unwrap();
        assert!(c.scalar().unwrap().agrees(&TruncatedLaurent::constant(one, 20)));

        let t = t_series(p, N, 40);
        let g2 = TruncatedLaurent::from_terms(p, N, &[(-2, one), (-1, one)], 40).unwrap();
        let m = ModulePresentation::rank_one(&Character::omega_x_pow(p, N, 1), g).unwrap();
        let c = cup(&m, &HerrCochain::scalar0(t.clone()), &HerrCochain::scalar2(g2.clone())).unwrap();
        assert!(c.scalar().unwrap().agrees(&t.try_mul(&g2).unwrap()));
        assert_eq!(c.scalar().unwrap().res().unwrap().to_i128(), Some(1));
        assert!(matches!(cup(&m, &c1, &HerrCochain::scalar2(g2)), Err(Error::DegreeOverflow(1, 2))));
    }

    #[test]
    fn cup_is_bilinear() {
        let mut r = rng();
        let p = 3;
        let m = ModulePresentation::rank_one(&Character::omega(p, N), GammaGenerator::default_for(p)).unwrap();
        let rand1 = |r: &mut ChaCha8Rng| {
            HerrCochain::scalar1(TruncatedLaurent::random(r, p, N, -3, 30), TruncatedLaurent::random(r, p, N, -3, 30))
        };
        let (a, a2, b) = (rand1(&mut r), rand1(&mut r), rand1(&mut r));
        let lhs = cup(&m, &a.try_add(&a2).unwrap(), &b).unwrap();
        let rhs = cup(&m, &a, &b).unwrap().try_add(&cup(&m, &a2, &b).unwrap()).unwrap();
        assert!(lhs.try_sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn pairing_checks_characters() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let t = HerrCochain::scalar0(t_series(p, N, 40));
        let f = HerrCochain::scalar2(t_power(p, N, -1, 40));
        let bad = h2_pairing(&Character::trivial(p, N), &t, &Character::trivial(p, N), &f, g);
        assert!(matches!(bad, Err(Error::CharacterMismatch(_))));
        let v = h2_pairing(&Character::x_pow(p, N, -1), &t, &Character::omega_x_pow(p, N, 1), &f, g).unwrap();
        // Res(t/T) = Res(1 - T/2 + ...) = 0
        assert!(v.is_zero());
    }

    #[test]
    fn duality_matrix_shape() {
        let mut r = rng();
        for p in [3u32, 5] {
            let mut a = TruncatedLaurent::random(&mut r, p, N, 0, 40);
            a = a.try_sub(&TruncatedLaurent::constant(a.coeff(0).unwrap(), 40)).unwrap();
            let m = duality_matrix(p, N, 60, &a, GammaGenerator::default_for(p)).unwrap();
            assert_eq!(m[0][0].unwrap().to_i128(), Some(1));
            assert!(m[1][0].unwrap().is_zero());
            assert_eq!(m[1][1].unwrap().to_i128(), Some(-1));
            assert!(m[0][1].is_none());
        }
    }

    #[test]
    fn psi_map_is_a_chain_map() {
        let mut r = rng();
        for p in [3u32, 5] {
            let m = ModulePresentation::rank_one(&Character::omega_x_pow(p, N, 1), GammaGenerator::default_for(p)).unwrap();
            let c0 = HerrCochain::scalar0(TruncatedLaurent::random(&mut r, p, N, -4, 60));
            assert_eq!(psi_chain_defect(&m, &c0).unwrap(), None);
            let c1 = HerrCochain::scalar1(
                TruncatedLaurent::random(&mut r, p, N, -4, 60),
                TruncatedLaurent::random(&mut r, p, N, -4, 60),
            );
            assert_eq!(psi_chain_defect(&m, &c1).unwrap(), None);
        }
    }

    #[test]
    fn reduce_over_omega() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let w = Character::omega(p, crate::rankone::exact_precision(p));
        let (red, rep) = h2_reduce(&w, g, &t_power(p, N, -1, 30), ReduceOptions::default()).unwrap();
        match red {
            H2Reduction::CanonicalClass { c, k, .. } => {
                assert_eq!(k, 0);
                assert_eq!(c.to_i128(), Some(1));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(rep.residual_val, rep.prec);
        assert_eq!(rep.prec, N);
    }

    #[test]
    fn reduce_constructed_coboundary() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let w = Character::omega(p, crate::rankone::exact_precision(p));
        let m = ModulePresentation::rank_one(&w, g).unwrap();
        let f = coboundary2(&m, &t_power(p, N, 1, 30), &TruncatedLaurent::zero(p, N, 0, 30)).unwrap();
        let (red, rep) = h2_reduce(&w, g, &f, ReduceOptions::default()).unwrap();
        match red {
            H2Reduction::CanonicalClass { c, .. } => assert!(c.is_zero()),
            other => panic!("{other:?}"),
        }
        assert_eq!(rep.residual_val, rep.prec);
    }

    #[test]
    fn reduce_abs_x() {
        let mut r = rng();
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let d = Character::abs_x(p, crate::rankone::exact_precision(p));
        let f = TruncatedLaurent::random(&mut r, p, N, -4, 30);
        let (red, rep) = h2_reduce(&d, g, &f, ReduceOptions::default()).unwrap();
        assert!(matches!(red, H2Reduction::Trivialization { .. }));
        assert_eq!(rep.residual_val, rep.prec);
        assert!(rep.prec >= N - 3, "{rep:?}");
    }

    #[test]
    fn general_presentation_matches_rank_one() {
        let mut r = rng();
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let d = Character::omega_x_pow(p, N, 2);
        let m1 = ModulePresentation::rank_one(&d, g).unwrap();
        let m2 = ModulePresentation::new(
            1,
            vec![Entry::Const(d.delta_p())],
            vec![Entry::Const(d.eval_gamma(&g).unwrap())],
            g,
        )
        .unwrap();
        assert_eq!(m2.commutation_defect(30).unwrap(), None);
        let x = vec![TruncatedLaurent::random(&mut r, p, N, -3, 30)];
        assert!(vsub(&m1.act_phi(&x).unwrap(), &m2.act_phi(&x).unwrap()).unwrap()[0].is_zero());
        let tt = m1.tensor(&m1).unwrap();
        assert!(tt.character().unwrap().eq_at_prec(&d.pow(2)));
    }
}
