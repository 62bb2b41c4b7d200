//! Characters of Q_p^×, the rank-one modules R(δ), and their cohomology table.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{gamma_act, phi, psi, GammaGenerator};
use crate::padic::PadicScalar;
use crate::series::{t_power, t_series, TruncatedLaurent};

/// Precision at which exactly known characters (`x`, `|x|`, `ω`, their
/// products) are materialized: the largest relative precision the scalar
/// representation carries for `p`, less two digits of headroom.
pub fn exact_precision(p: u32) -> i32 {
    crate::padic::max_relative_precision(p) - 2
}

/// A continuous character δ: Q_p^× → Q_p^×, stored as `(δ(p), e, δ(u))` with
/// `δ(ω_T(a)) = ω_T(a)^e` on Teichmüller units and `u = 1 + p`.
#[derive(Clone, Copy, Debug)]
pub struct Character {
    delta_p: PadicScalar,
    teich_exp: i64,
    delta_u: PadicScalar,
}

impl Character {
    /// `δ(u)` must be `≡ 1 mod p`: a continuous character sends the pro-p
    /// group `1 + pZ_p` into `1 + pZ_p`.
    pub fn new(delta_p: PadicScalar, teich_exp: i64, delta_u: PadicScalar) -> Result<Self> {
        let p = delta_p.p();
        if delta_u.p() != p {
            return Err(Error::PrimeMismatch(p, delta_u.p()));
        }
        if delta_p.is_zero() {
            return Err(Error::DivisionByZero { prec: delta_p.prec() });
        }
        let one = PadicScalar::one(p, delta_u.prec());
        if delta_u.val() != 0 || (delta_u - one).val() < 1 {
            return Err(Error::NotPrincipalUnit(delta_u.to_string()));
        }
        Ok(Character { delta_p, teich_exp: teich_exp.rem_euclid(p as i64 - 1), delta_u })
    }

    pub fn p(&self) -> u32 {
        self.delta_p.p()
    }

    pub fn delta_p(&self) -> PadicScalar {
        self.delta_p
    }

    pub fn teich_exp(&self) -> i64 {
        self.teich_exp
    }

    pub fn delta_u(&self) -> PadicScalar {
        self.delta_u
    }

    pub fn prec(&self) -> i32 {
        self.delta_p.prec().min(self.delta_u.prec())
    }

    pub fn trivial(p: u32, prec: i32) -> Self {
        let one = PadicScalar::one(p, prec);
        Character { delta_p: one, teich_exp: 0, delta_u: one }
    }

    /// The identity character `x`.
    pub fn x(p: u32, prec: i32) -> Self {
        Character {
            delta_p: PadicScalar::from_i64(p, p as i64, prec),
            teich_exp: 1,
            delta_u: PadicScalar::from_i64(p, 1 + p as i64, prec),
        }
    }

    /// `|x|`, with `|p| = p^-1` and trivial on units.
    pub fn abs_x(p: u32, prec: i32) -> Self {
        let one = PadicScalar::one(p, prec);
        Character { delta_p: PadicScalar::from_parts(p, -1, 1, prec), teich_exp: 0, delta_u: one }
    }

    /// `ω = x |x|`.
    pub fn omega(p: u32, prec: i32) -> Self {
        Self::x(p, prec).mul(&Self::abs_x(p, prec))
    }

    /// `x^k`, with `δ(p) = p^k` carrying the relative precision of `x` at `prec`.
    pub fn x_pow(p: u32, prec: i32, k: i64) -> Self {
        let u = PadicScalar::from_i64(p, 1 + p as i64, prec);
        Character {
            delta_p: PadicScalar::from_parts(p, k as i32, 1, k as i32 + prec - 1),
            teich_exp: k.rem_euclid(p as i64 - 1),
            delta_u: u.pow(k).unwrap(),
        }
    }

    pub fn omega_x_pow(p: u32, prec: i32, k: i64) -> Self {
        Self::omega(p, prec).mul(&Self::x_pow(p, prec, k))
    }

    /// The unramified character with `δ(p) = c`.
    pub fn unramified(c: PadicScalar) -> Result<Self> {
        let p = c.p();
        Self::new(c, 0, PadicScalar::one(p, c.prec().max(1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p();
        Character {
            delta_p: self.delta_p * o.delta_p,
            teich_exp: (self.teich_exp + o.teich_exp).rem_euclid(p as i64 - 1),
            delta_u: self.delta_u * o.delta_u,
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let p = self.p();
        Character {
            delta_p: self.delta_p.pow(k).unwrap(),
            teich_exp: (self.teich_exp * k).rem_euclid(p as i64 - 1),
            delta_u: self.delta_u.pow(k).unwrap(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// `δ(a)` for a unit `a`: `ω_T(a)^e · δ(u)^s` with `s = log⟨a⟩ / log u`.
    pub fn eval_unit(&self, a: &PadicScalar) -> Result<PadicScalar> {
        let p = self.p();
        let w = a.teichmuller_of()?;
        let principal = a.try_div(&w)?;
        let u = PadicScalar::from_i64(p, 1 + p as i64, a.prec());
        let s = principal.plog()?.try_div(&u.plog()?)?;
        let tw = w.pow(self.teich_exp)?;
        let lu = self.delta_u.plog()?;
        Ok(tw * (s * lu).pexp()?)
    }

    /// `δ(χ(γ))`.
    pub fn eval_gamma(&self, g: &GammaGenerator) -> Result<PadicScalar> {
        self.eval_unit(&g.chi().reduce(self.prec() + 2))
    }

    pub fn eq_at_prec(&self, o: &Self) -> bool {
        self.p() == o.p()
            && self.teich_exp == o.teich_exp
            && self.delta_p.eq_at_prec(&o.delta_p)
            && self.delta_u.eq_at_prec(&o.delta_u)
    }

    /// `deg R(δ) = v_p(δ(p))`.
    pub fn degree(&self) -> i64 {
        self.delta_p.val() as i64
    }

    pub fn module(&self) -> FormalModule {
        FormalModule { rank: 1, degree: self.degree() }
    }

    /// Places δ in the dichotomy `x^{-i}` / `ωx^i` / neither, for
    /// `0 <= i <= limit`.
    pub fn classify(&self, limit: u32, margin: i32) -> Result<Classified> {
        let p = self.p();
        let prec = self.prec();
        let rel = self.delta_p.relative_precision().min(self.delta_u.relative_precision());
        if rel < margin {
            return Err(Error::Ambiguous(format!("character known to {rel} digits, margin {margin}")));
        }
        let cand = prec.max(1) + 2 * limit as i32 + 2;
        let mut hits = vec![];
        for i in 0..=limit as i64 {
            if self.eq_at_prec(&Self::x_pow(p, cand, -i)) {
                hits.push(Class::XMinusI(i as u32));
            }
            if self.eq_at_prec(&Self::omega_x_pow(p, cand, i)) {
                hits.push(Class::OmegaXI(i as u32));
            }
        }
        match hits.len() {
            0 => {
                let warning = self.beyond_limit(limit).then(|| {
                    format!("δ has the shape x^-i or ωx^i with i beyond the search limit {limit}; reported as Generic")
                });
                Ok(Classified { class: Class::Generic, warning })
            }
            1 => Ok(Classified { class: hits[0], warning: None }),
            _ => Err(Error::Ambiguous(format!("matches {hits:?} at precision {prec}"))),
        }
    }

    /// True when `δ = x^v` or `δ = ω x^(v-1)` up to the exponent search.
    fn beyond_limit(&self, limit: u32) -> bool {
        let p = self.p();
        let v = self.delta_p.val() as i64;
        let cand = self.prec().max(1) + 2 * v.unsigned_abs() as i32 + 2;
        let cand_x = Self::x_pow(p, cand, v);
        let cand_w = Self::omega_x_pow(p, cand, v);
        (self.eq_at_prec(&cand_x) && -v > limit as i64) || (self.eq_at_prec(&cand_w) && v > limit as i64)
    }
}

/// The `char(dp=..., te=..., du=...)` literal.
impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "char(dp={}, te={}, du={})", self.delta_p, self.teich_exp, self.delta_u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    XMinusI(u32),
    OmegaXI(u32),
    Generic,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::XMinusI(i) => write!(f, "XMinusI({i})"),
            Class::OmegaXI(i) => write!(f, "OmegaXI({i})"),
            Class::Generic => write!(f, "Generic"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classified {
    pub class: Class,
    pub warning: Option<String>,
}

/// `(h0, h1, h2)` of `R(δ)` by class.
pub fn cohomology_dims(class: Class) -> (u32, u32, u32) {
    match class {
        Class::XMinusI(_) => (1, 2, 0),
        Class::OmegaXI(_) => (0, 2, 1),
        Class::Generic => (0, 1, 0),
    }
}

pub fn euler_characteristic(dims: (u32, u32, u32)) -> i64 {
    dims.0 as i64 - dims.1 as i64 + dims.2 as i64
}

/// A module known only through its rank and degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormalModule {
    pub rank: u32,
    pub degree: i64,
}

impl FormalModule {
    pub fn tensor(&self, o: &Self) -> Self {
        FormalModule {
            rank: self.rank * o.rank,
            degree: self.rank as i64 * o.degree + o.rank as i64 * self.degree,
        }
    }

    pub fn dual(&self) -> Self {
        FormalModule { rank: self.rank, degree: -self.degree }
    }

    /// `μ = deg / rank`.
    pub fn slope(&self) -> Ratio<i64> {
        Ratio::new(self.degree, self.rank as i64)
    }
}

/// `R(δ)`: series in the basis `v`, with `φ(fv) = δ(p)φ(f)v` and
/// `γ(fv) = δ(χ(γ))γ(f)v`.
#[derive(Clone, Debug)]
pub struct RankOneModule {
    pub delta: Character,
    pub gamma: GammaGenerator,
    delta_gamma: PadicScalar,
}

impl RankOneModule {
    pub fn new(delta: Character, gamma: GammaGenerator) -> Result<Self> {
        if delta.p() != gamma.p() {
            return Err(Error::PrimeMismatch(delta.p(), gamma.p()));
        }
        let delta_gamma = delta.eval_gamma(&gamma)?;
        Ok(RankOneModule { delta, gamma, delta_gamma })
    }

    pub fn delta_gamma(&self) -> PadicScalar {
        self.delta_gamma
    }

    pub fn act_phi(&self, f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
        Ok(phi(f)?.scale(&self.delta.delta_p))
    }

    pub fn act_gamma(&self, f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
        Ok(gamma_act(f, &self.gamma, 1)?.scale(&self.delta_gamma))
    }

    pub fn act_psi(&self, f: &TruncatedLaurent) -> Result<TruncatedLaurent> {
        Ok(psi(f)?.scale(&self.delta.delta_p.inv()?))
    }
}

/// `t^i`, the generator of `H^0(x^{-i})`.
pub fn h0_generator(p: u32, prec: i32, hi: i32, i: u32) -> Result<TruncatedLaurent> {
    t_series(p, prec, hi).pow(i)
}

/// `∂^k(1/T)`, the generator of `H^2(ωx^k)`.
pub fn h2_generator(p: u32, prec: i32, hi: i32, k: u32) -> TruncatedLaurent {
    let mut f = t_power(p, prec, -1, hi + k as i32);
    for _ in 0..k {
        f = f.partial();
    }
    f
}

/// `∂: R(x^{-1}δ) → R(δ)`.
pub fn partial_transfer(f: &TruncatedLaurent) -> TruncatedLaurent {
    f.partial()
}
