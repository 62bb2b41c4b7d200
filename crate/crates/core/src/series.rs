//! Truncated Laurent series over Q_p, the finite model of the Robba ring.
//!
//! A [`TruncatedLaurent`] stores the coefficients of degrees `lo..=hi`.
//! Coefficients below `lo` are zero (to the coefficient precision) and
//! coefficients above `hi` are unknown. Every operation returns the largest
//! window on which the result is certified.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{floor_log, max_relative_precision, ppow, PadicScalar};

#[derive(Clone, Debug)]
pub struct TruncatedLaurent {
    p: u32,
    lo: i32,
    coeffs: Vec<PadicScalar>,
}

impl TruncatedLaurent {
    pub fn new(p: u32, lo: i32, coeffs: Vec<PadicScalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::WindowUnderflow("empty coefficient window".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.p() != p) {
            return Err(Error::PrimeMismatch(p, c.p()));
        }
        Ok(TruncatedLaurent { p, lo, coeffs })
    }

    pub fn zero(p: u32, prec: i32, lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        TruncatedLaurent { p, lo, coeffs: vec![PadicScalar::zero(p, prec); (hi - lo + 1) as usize] }
    }

    /// `c * T^k` on the window `[min(k, 0), hi]`.
    pub fn monomial(c: PadicScalar, k: i32, hi: i32) -> Self {
        let lo = k.min(0);
        let mut s = Self::zero(c.p(), c.prec(), lo, hi.max(lo));
        if k <= s.hi() {
            s.coeffs[(k - lo) as usize] = c;
        }
        s
    }

    pub fn constant(c: PadicScalar, hi: i32) -> Self {
        Self::monomial(c, 0, hi)
    }

    /// Builds a series from `(degree, coefficient)` pairs; the window spans
    /// `[min(degrees, 0), hi]`.
    pub fn from_terms(p: u32, prec: i32, terms: &[(i32, PadicScalar)], hi: i32) -> Result<Self> {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        if lo > hi {
            return Err(Error::WindowUnderflow(format!("lowest degree {lo} above hi {hi}")));
        }
        let mut s = Self::zero(p, prec, lo, hi);
        for &(d, c) in terms {
            if c.p() != p {
                return Err(Error::PrimeMismatch(p, c.p()));
            }
            if d <= hi {
                let i = (d - lo) as usize;
                s.coeffs[i] = s.coeffs[i] + c;
            }
        }
        Ok(s)
    }

    /// Series with integral coefficients drawn uniformly mod `p^prec`.
    pub fn random<R: Rng>(rng: &mut R, p: u32, prec: i32, lo: i32, hi: i32) -> Self {
        let m = ppow(p, prec as u32) as i64;
        let coeffs = (lo..=hi).map(|_| PadicScalar::from_i64(p, rng.gen_range(0..m), prec)).collect();
        TruncatedLaurent { p, lo, coeffs }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    /// Coefficient of `T^d`: zero below the window, `None` above it.
    pub fn coeff(&self, d: i32) -> Option<PadicScalar> {
        if d < self.lo {
            Some(PadicScalar::zero(self.p, self.prec()))
        } else if d > self.hi() {
            None
        } else {
            Some(self.coeffs[(d - self.lo) as usize])
        }
    }

    fn at(&self, d: i32) -> PadicScalar {
        self.coeffs[(d - self.lo) as usize]
    }

    /// Smallest coefficient precision.
    pub fn prec(&self) -> i32 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap()
    }

    /// Smallest valuation among coefficients that are nonzero at precision.
    pub fn min_val(&self) -> Option<i32> {
        self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.val()).min()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Restricts or extends the window. Extending downwards pads with zeros;
    /// extending upwards is not allowed.
    pub fn with_window(&self, lo: i32, hi: i32) -> Result<Self> {
        if hi > self.hi() {
            return Err(Error::WindowUnderflow(format!("cannot extend hi from {} to {hi}", self.hi())));
        }
        if lo > hi {
            return Err(Error::WindowUnderflow(format!("empty window [{lo}, {hi}]")));
        }
        let z = PadicScalar::zero(self.p, self.prec());
        let coeffs = (lo..=hi).map(|d| if d < self.lo { z } else { self.at(d) }).collect();
        Ok(TruncatedLaurent { p: self.p, lo, coeffs })
    }

    pub fn truncate(&self, hi: i32) -> Result<Self> {
        self.with_window(self.lo, hi)
    }

    /// Lowers every coefficient to absolute precision at most `prec`.
    pub fn reduce(&self, prec: i32) -> Self {
        self.map(|c| c.reduce(prec))
    }

    /// Coefficientwise `PadicScalar::lift`.
    pub fn lift(&self, prec: i32) -> Self {
        self.map(|c| c.lift(prec))
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> Self {
        TruncatedLaurent { p: self.p, lo: self.lo, coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check_prime(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            Err(Error::PrimeMismatch(self.p, o.p))
        } else {
            Ok(())
        }
    }

    fn combine(&self, o: &Self, sign: i64) -> Result<Self> {
        self.check_prime(o)?;
        let lo = self.lo.min(o.lo);
        let hi = self.hi().min(o.hi());
        if lo > hi {
            return Err(Error::WindowUnderflow(format!("sum window [{lo}, {hi}] is empty")));
        }
        let (za, zb) = (PadicScalar::zero(self.p, self.prec()), PadicScalar::zero(self.p, o.prec()));
        let coeffs = (lo..=hi)
            .map(|d| {
                let a = if d < self.lo { za } else { self.at(d) };
                let b = if d < o.lo { zb } else { o.at(d) };
                if sign > 0 {
                    a + b
                } else {
                    a - b
                }
            })
            .collect();
        Ok(TruncatedLaurent { p: self.p, lo, coeffs })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.combine(o, 1)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, -1)
    }

    /// Product on `[lo_f + lo_g, min(lo_f + hi_g, lo_g + hi_f)]`.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_prime(o)?;
        let lo = self.lo + o.lo;
        let hi = (self.lo + o.hi()).min(o.lo + self.hi());
        let (fp, gp) = (self.prec(), o.prec());
        let prec = (fp + o.min_val().unwrap_or(gp)).min(gp + self.min_val().unwrap_or(fp));
        let mut coeffs = vec![PadicScalar::zero(self.p, prec); (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let di = self.lo + i as i32;
            for (j, b) in o.coeffs.iter().enumerate() {
                let d = di + o.lo + j as i32;
                if d > hi {
                    break;
                }
                let k = (d - lo) as usize;
                coeffs[k] = coeffs[k] + *a * *b;
            }
        }
        Ok(TruncatedLaurent { p: self.p, lo, coeffs })
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        assert_eq!(c.p(), self.p, "mismatched primes");
        self.map(|a| *a * *c)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.map(|a| a.mul_int(k))
    }

    /// Multiplication by `T^k` (exact).
    pub fn shift(&self, k: i32) -> Self {
        TruncatedLaurent { p: self.p, lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::constant(PadicScalar::one(self.p, self.prec()), self.hi() - self.lo.min(0));
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// `f ↦ (1+T) f'`, on `[lo - 1, hi - 1]`.
    pub fn partial(&self) -> Self {
        let lo = self.lo - 1;
        let hi = self.hi() - 1;
        let zero = PadicScalar::zero(self.p, self.prec());
        let coeffs = (lo..=hi)
            .map(|d| {
                let up = self.at(d + 1).mul_int((d + 1) as i64);
                let here = if d >= self.lo { self.at(d).mul_int(d as i64) } else { zero };
                up + here
            })
            .collect();
        TruncatedLaurent { p: self.p, lo, coeffs }
    }

    /// `res(f dT)`, the coefficient of `T^-1`.
    pub fn residue(&self) -> Result<PadicScalar> {
        if self.hi() < -1 {
            return Err(Error::WindowUnderflow(format!("degree -1 above window hi {}", self.hi())));
        }
        Ok(self.coeff(-1).unwrap())
    }

    /// `Res(f) = res(f dT / (1+T)) = Σ_{k<0} (-1)^(-1-k) f_k`.
    pub fn res(&self) -> Result<PadicScalar> {
        if self.hi() < -1 {
            return Err(Error::WindowUnderflow(format!("degree -1 above window hi {}", self.hi())));
        }
        let mut acc = PadicScalar::zero(self.p, self.prec());
        for d in self.lo..0 {
            let c = self.at(d);
            acc = if (-1 - d) % 2 == 0 { acc + c } else { acc - c };
        }
        Ok(acc)
    }

    /// The antiderivative `g` with `∂g = f` and `g_0 = 0`, on `[lo + 1, hi + 1]`.
    pub fn partial_inverse(&self) -> Result<Self> {
        let r = self.res()?;
        if !r.is_zero() {
            return Err(Error::NoAntiderivative { residue_val: r.val(), prec: r.prec() });
        }
        let lo = (self.lo + 1).min(0);
        let hi = self.hi() + 1;
        let zero = PadicScalar::zero(self.p, self.prec());
        let f = |d: i32| if d < self.lo { zero } else { self.at(d) };
        let mut g = vec![zero; (hi - lo + 1) as usize];
        let idx = |d: i32| (d - lo) as usize;
        // (k+1) g_{k+1} + k g_k = f_k
        for k in 0..hi {
            let gk = if k == 0 { zero } else { g[idx(k)] };
            g[idx(k + 1)] = (f(k) - gk.mul_int(k as i64)).div_int((k + 1) as i64);
        }
        if lo <= -1 {
            g[idx(-1)] = -f(-1);
            let mut k = -2;
            while k >= lo {
                g[idx(k)] = (f(k) - g[idx(k + 1)].mul_int((k + 1) as i64)).div_int(k as i64);
                k -= 1;
            }
        }
        Ok(TruncatedLaurent { p: self.p, lo, coeffs: g })
    }

    /// `f((1+T)^a - 1)` for `a` a unit or `a = p`.
    pub fn substitute(&self, a: &PadicScalar) -> Result<Self> {
        if a.p() != self.p {
            return Err(Error::PrimeMismatch(self.p, a.p()));
        }
        let kind = sub_kind(self.p, a)?;
        let target = self.prec().min(PREC_CEILING);
        let vmin = self.coeffs[..(-self.lo).max(0).min(self.coeffs.len() as i32) as usize]
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.val())
            .min()
            .unwrap_or(target)
            .min(target);
        let vall = self.min_val().unwrap_or(target).min(target);
        let depth = (target - vmin).max(0);
        let hi = self.hi();
        let row_prec = target - vall.min(0) + 2;
        let lo_out = match kind {
            SubKind::Unit(_) => self.lo,
            SubKind::Frobenius if self.lo < 0 => self.lo * self.p as i32 - depth * (self.p as i32 - 1),
            SubKind::Frobenius => self.lo,
        };
        let table = sub_table(self.p, kind, self.lo, hi, lo_out, row_prec.max(1));
        let mut out = vec![PadicScalar::zero(self.p, target); (hi - lo_out + 1) as usize];
        for (i, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let row = &table.rows[i];
            for (j, c) in row.coeffs.iter().enumerate() {
                let d = row.start + j as i32;
                let k = (d - lo_out) as usize;
                out[k] = out[k] + *f * *c;
            }
        }
        let out = out.into_iter().map(|c| c.reduce(target)).collect();
        Ok(TruncatedLaurent { p: self.p, lo: lo_out, coeffs: out })
    }

    /// Valuation of `self - other` on the common window (the precision when
    /// they agree).
    pub fn residual(&self, other: &Self) -> Result<i32> {
        let d = self.try_sub(other)?;
        Ok(d.coeffs.iter().map(|c| c.val()).min().unwrap())
    }

    /// True when every coefficient of the difference vanishes at precision.
    pub fn agrees(&self, other: &Self) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

/// Upper bound on working precision, so that exact zeros do not request
/// absurd depths.
pub(crate) const PREC_CEILING: i32 = 48;

#[derive(Clone, Copy, Debug)]
enum SubKind {
    Unit(PadicScalar),
    Frobenius,
}

#[derive(Debug)]
pub(crate) struct SubRow {
    pub start: i32,
    pub coeffs: Vec<PadicScalar>,
}

fn sub_kind(p: u32, a: &PadicScalar) -> Result<SubKind> {
    if a.val() == 0 && !a.is_zero() {
        Ok(SubKind::Unit(*a))
    } else if a.val() == 1 && a.integer_rep() == Some(p as u128) && a.prec() >= 2 {
        Ok(SubKind::Frobenius)
    } else {
        Err(Error::Unsupported(format!("substitution by {a}: need a unit or p")))
    }
}

/// `((1+T)^a - 1)^k` for every `k` in `lo..=hi`, from a single table; each
/// image is what `substitute` returns for the monomial `T^k` at precision
/// `prec`, up to the depth of the polar expansion when `a = p`.
pub fn substitute_monomials(p: u32, a: &PadicScalar, lo: i32, hi: i32, prec: i32) -> Result<Vec<TruncatedLaurent>> {
    if a.p() != p {
        return Err(Error::PrimeMismatch(p, a.p()));
    }
    let kind = sub_kind(p, a)?;
    let target = prec.min(PREC_CEILING);
    let dmin = match kind {
        SubKind::Frobenius if lo < 0 => lo * p as i32 - target * (p as i32 - 1),
        _ => lo,
    };
    let table = sub_table(p, kind, lo, hi, dmin, target + 2);
    Ok(table
        .rows
        .iter()
        .zip(lo..=hi)
        .map(|(row, k)| {
            let wlo = row.start.min(0).min(k);
            let mut out = vec![PadicScalar::zero(p, target); (hi - wlo + 1) as usize];
            for (j, c) in row.coeffs.iter().enumerate() {
                out[(row.start + j as i32 - wlo) as usize] = c.reduce(target);
            }
            TruncatedLaurent { p, lo: wlo, coeffs: out }
        })
        .collect())
}

/// Rows `s^k` for `k` in `lo..=hi`, each known on `[start, hi]`.
#[derive(Debug)]
pub(crate) struct SubTable {
    pub rows: Vec<SubRow>,
}

type TableKey = (u32, i32, u128, i32, i32, i32, i32, i32);

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<SubTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<SubTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ps_mul(a: &[PadicScalar], b: &[PadicScalar], len: usize) -> Vec<PadicScalar> {
    let p = a[0].p();
    let prec = a.iter().chain(b.iter()).map(|c| c.prec()).min().unwrap();
    let mut out = vec![PadicScalar::zero(p, prec); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

/// Inverse of a power series with unit constant term, to `len` terms.
fn ps_inv(a: &[PadicScalar], len: usize) -> Vec<PadicScalar> {
    let inv0 = a[0].inv().expect("unit constant term");
    let mut v = Vec::with_capacity(len);
    v.push(inv0);
    for j in 1..len {
        let mut acc = PadicScalar::zero(a[0].p(), inv0.prec());
        for i in 1..=j.min(a.len() - 1) {
            acc = acc + a[i] * v[j - i];
        }
        v.push(-(acc * inv0));
    }
    v
}

/// Rows `φ(T^k)` for `k` in `lo..=hi`, negative rows expanded down to `dmin`.
pub(crate) fn frobenius_rows(p: u32, lo: i32, hi: i32, dmin: i32, prec: i32) -> Arc<SubTable> {
    sub_table(p, SubKind::Frobenius, lo, hi, dmin, prec)
}

fn sub_table(p: u32, kind: SubKind, lo: i32, hi: i32, dmin: i32, prec: i32) -> Arc<SubTable> {
    let prec = prec.min(max_relative_precision(p));
    let key: TableKey = match kind {
        SubKind::Unit(a) => {
            let a = a.reduce(prec + floor_log(p, (hi - lo + 2) as u64));
            (p, 0, a.unit(), a.prec(), lo, hi, dmin, prec)
        }
        SubKind::Frobenius => (p, 1, 0, 0, lo, hi, dmin, prec),
    };
    if let Some(t) = table_cache().lock().unwrap().get(&key) {
        return t.clone();
    }
    let table = Arc::new(build_table(p, kind, lo, hi, dmin, prec));
    table_cache().lock().unwrap().insert(key, table.clone());
    table
}

fn build_table(p: u32, kind: SubKind, lo: i32, hi: i32, dmin: i32, prec: i32) -> SubTable {
    let len = (hi - lo + 1) as usize;
    // s = T * u(T), u_j = C(a, j + 1)
    let u: Vec<PadicScalar> = match kind {
        SubKind::Unit(a) => {
            // C(a, k) loses floor(log_p k) digits of a
            let a = a.reduce(prec + floor_log(p, len as u64 + 1));
            (0..len).map(|j| a.binomial(j as u32 + 1).unwrap().reduce(prec)).collect()
        }
        SubKind::Frobenius => {
            let a = PadicScalar::from_i64(p, p as i64, prec + 2);
            (0..len.max(p as usize))
                .map(|j| {
                    if j < p as usize {
                        a.binomial(j as u32 + 1).unwrap().reduce(prec)
                    } else {
                        PadicScalar::exact_zero(p)
                    }
                })
                .collect()
        }
    };
    let one = PadicScalar::one(p, prec);
    let mut rows: Vec<SubRow> = (lo..=hi).map(|k| SubRow { start: k, coeffs: vec![] }).collect();
    // k >= 0: T^k u^k
    let mut pw = vec![one];
    for k in 0..=hi {
        let need = (hi - k + 1) as usize;
        if k > 0 {
            pw = ps_mul(&pw, &u, need);
        }
        if k >= lo {
            let mut c = pw.clone();
            c.resize(need, PadicScalar::zero(p, prec));
            c.truncate(need);
            rows[(k - lo) as usize] = SubRow { start: k, coeffs: c };
        }
    }
    if lo < 0 {
        match kind {
            SubKind::Unit(_) => {
                let v = ps_inv(&u, len);
                let mut pw = vec![one];
                for m in 1..=(-lo) {
                    let k = -m;
                    let need = (hi - k + 1) as usize;
                    pw = ps_mul(&pw, &v, len);
                    rows[(k - lo) as usize] = SubRow { start: k, coeffs: pw[..need].to_vec() };
                }
            }
            SubKind::Frobenius => {
                // s = T^p (1 + z), z = Σ_{i=1}^{p-1} C(p, p-i) T^{-i}; expand in T^{-1}.
                let pi = p as i32;
                let depth = (-pi - dmin).max(0) as usize;
                let mut z = vec![PadicScalar::zero(p, prec); pi as usize];
                z[0] = one;
                for i in 1..pi {
                    z[i as usize] = u[(pi - i - 1) as usize];
                }
                let v = ps_inv(&z, depth + 1);
                let mut pw = vec![one];
                for m in 1..=(-lo) {
                    let k = -m;
                    let top = k * pi;
                    let terms = (top - dmin + 1).max(0) as usize;
                    pw = ps_mul(&pw, &v, terms.max(1));
                    // degree top - j has coefficient pw[j]
                    let mut c: Vec<PadicScalar> = (0..terms).rev().map(|j| pw[j]).collect();
                    let start = top - terms as i32 + 1;
                    let top_needed = hi.min(top);
                    c.truncate((top_needed - start + 1).max(0) as usize);
                    rows[(k - lo) as usize] = SubRow { start, coeffs: c };
                }
            }
        }
    }
    SubTable { rows }
}

impl Add for &TruncatedLaurent {
    type Output = TruncatedLaurent;
    fn add(self, o: Self) -> TruncatedLaurent {
        self.try_add(o).expect("series addition")
    }
}

impl Sub for &TruncatedLaurent {
    type Output = TruncatedLaurent;
    fn sub(self, o: Self) -> TruncatedLaurent {
        self.try_sub(o).expect("series subtraction")
    }
}

impl Mul for &TruncatedLaurent {
    type Output = TruncatedLaurent;
    fn mul(self, o: Self) -> TruncatedLaurent {
        self.try_mul(o).expect("series multiplication")
    }
}

impl Neg for &TruncatedLaurent {
    type Output = TruncatedLaurent;
    fn neg(self) -> TruncatedLaurent {
        self.map(|c| -*c)
    }
}

/// The `deg:coeff` literal form, listing nonzero coefficients only.
impl fmt::Display for TruncatedLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}:{}", self.lo + i as i32, c)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `t = log(1+T)`, `q = ((1+T)^p - 1)/T` and `(1+T)/T`.
#[derive(Clone, Debug)]
pub struct SeriesConstants {
    pub t_series: TruncatedLaurent,
    pub q_series: TruncatedLaurent,
    pub one_plus_t_over_t: TruncatedLaurent,
}

impl SeriesConstants {
    pub fn new(p: u32, prec: i32, hi: i32) -> Self {
        SeriesConstants {
            t_series: t_series(p, prec, hi),
            q_series: q_series(p, prec, hi),
            one_plus_t_over_t: one_plus_t_over_t(p, prec, hi),
        }
    }
}

pub fn t_series(p: u32, prec: i32, hi: i32) -> TruncatedLaurent {
    let extra = floor_log(p, hi.max(1) as u64);
    let mut s = TruncatedLaurent::zero(p, prec, 0, hi.max(0));
    for k in 1..=hi {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        s.coeffs[k as usize] = PadicScalar::from_i64(p, sign, prec + extra).div_int(k as i64).reduce(prec);
    }
    s
}

pub fn q_series(p: u32, prec: i32, hi: i32) -> TruncatedLaurent {
    let a = PadicScalar::from_i64(p, p as i64, prec + 2);
    let mut s = TruncatedLaurent::zero(p, prec, 0, hi.max(0));
    for j in 0..(p as i32).min(hi + 1) {
        s.coeffs[j as usize] = a.binomial(j as u32 + 1).unwrap().reduce(prec);
    }
    s
}

pub fn one_plus_t_over_t(p: u32, prec: i32, hi: i32) -> TruncatedLaurent {
    let one = PadicScalar::one(p, prec);
    TruncatedLaurent::from_terms(p, prec, &[(-1, one), (0, one)], hi).unwrap()
}

/// `T^k` on `[min(k, 0), hi]`.
pub fn t_power(p: u32, prec: i32, k: i32, hi: i32) -> TruncatedLaurent {
    TruncatedLaurent::monomial(PadicScalar::one(p, prec), k, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: i32 = 12;

    fn sc(p: u32, n: i64) -> PadicScalar {
        PadicScalar::from_i64(p, n, N)
    }

    #[test]
    fn t_times_inverse() {
        let p = 5;
        let prod = &t_power(p, N, 1, 20) * &t_power(p, N, -1, 20);
        assert!(prod.agrees(&t_power(p, N, 0, 19)));
        assert_eq!(prod.coeff(0).unwrap().to_i128(), Some(1));
    }

    #[test]
    fn one_plus_t_times_inverse_t() {
        let p = 5;
        let a = TruncatedLaurent::from_terms(p, N, &[(0, sc(p, 1)), (1, sc(p, 1))], 20).unwrap();
        let prod = &a * &t_power(p, N, -1, 20);
        assert!(prod.agrees(&one_plus_t_over_t(p, N, 20)));
    }

    #[test]
    fn residues() {
        let p = 5;
        assert_eq!(t_power(p, N, -1, 10).residue().unwrap().to_i128(), Some(1));
        assert!(t_power(p, N, 0, 10).residue().unwrap().is_zero());
        assert_eq!(t_power(p, N, -1, 10).res().unwrap().to_i128(), Some(1));
        assert_eq!(one_plus_t_over_t(p, N, 10).res().unwrap().to_i128(), Some(1));
        let t = t_series(p, N, 40);
        let g = TruncatedLaurent::from_terms(p, N, &[(-2, sc(p, 1)), (-1, sc(p, 1))], 40).unwrap();
        // t (1+T)/T^2 = t/T^2 + t/T: its T^-1 coefficient is t_1 = 1
        let prod = &t * &g;
        assert_eq!(prod.residue().unwrap().to_i128(), Some(1));
        assert_eq!(prod.res().unwrap().to_i128(), Some(1));
        assert!(t_power(p, N, 3, 10).with_window(0, -2).is_err());
    }

    #[test]
    fn partial_examples() {
        let p = 3;
        let d = t_power(p, N, 1, 10).partial();
        let one_plus_t = TruncatedLaurent::from_terms(p, N, &[(0, sc(p, 1)), (1, sc(p, 1))], 9).unwrap();
        assert!(d.agrees(&one_plus_t));
        let dt = t_series(p, N, 40).partial();
        assert!(dt.agrees(&t_power(p, N, 0, 39)));
        let h = t_power(p, N, -1, 10).partial();
        let expect =
            TruncatedLaurent::from_terms(p, N, &[(-2, sc(p, -1)), (-1, sc(p, -1))], 9).unwrap();
        assert!(h.agrees(&expect));
    }

    #[test]
    fn residue_of_derivative_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3, 5] {
            for _ in 0..10 {
                // res(g' dT) = 0, i.e. Res(∂g) = 0; the plain residue of ∂g is -g_{-1}
                let g = TruncatedLaurent::random(&mut rng, p, N, -8, 30);
                assert!(g.partial().res().unwrap().is_zero());
                assert!(g.partial().residue().unwrap().eq_at_prec(&-g.coeff(-1).unwrap()));
            }
        }
    }

    #[test]
    fn antiderivative_round_trip() {
        let p = 5;
        let one_plus_t = TruncatedLaurent::from_terms(p, N, &[(0, sc(p, 1)), (1, sc(p, 1))], 20).unwrap();
        let g = one_plus_t.partial_inverse().unwrap();
        assert!(g.agrees(&t_power(p, N, 1, 21)));
        let h = t_power(p, N, -1, 20);
        assert!(h.partial().partial_inverse().unwrap().agrees(&h));
        assert!(matches!(h.partial_inverse(), Err(Error::NoAntiderivative { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut f = TruncatedLaurent::random(&mut rng, p, N, -6, 30);
            // zero the residue by adjusting the T^-1 coefficient
            let r = f.res().unwrap();
            f.coeffs[(-1 - f.lo) as usize] = f.coeffs[(-1 - f.lo) as usize] - r;
            let g = f.partial_inverse().unwrap();
            assert!(g.partial().agrees(&f));
        }
    }

    #[test]
    fn substitute_identity_and_frobenius() {
        let p = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = TruncatedLaurent::random(&mut rng, p, N, -4, 30);
        assert!(f.substitute(&sc(p, 1)).unwrap().agrees(&f));
        let phi_t = t_power(p, N, 1, 30).substitute(&sc(p, p as i64)).unwrap();
        let mut terms = vec![];
        for j in 1..=p as i64 {
            let c = (1..=j).fold(1i64, |acc, i| acc * (p as i64 - i + 1) / i);
            terms.push((j as i32, sc(p, c)));
        }
        let expect = TruncatedLaurent::from_terms(p, N, &terms, 30).unwrap();
        assert!(phi_t.agrees(&expect));
        let t = t_series(p, N, 40);
        assert!(t.substitute(&sc(p, p as i64)).unwrap().agrees(&t.scale_int(p as i64)));
        assert!(t.substitute(&sc(p, 2)).unwrap().agrees(&t.scale_int(2)));
    }

    #[test]
    fn substitution_is_an_action() {
        let p = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = TruncatedLaurent::random(&mut rng, p, N, -5, 25);
        let (a, b) = (sc(p, 2), sc(p, 7));
        let lhs = f.substitute(&a).unwrap().substitute(&b).unwrap();
        let rhs = f.substitute(&(a * b)).unwrap();
        assert!(lhs.agrees(&rhs));
    }

    #[test]
    fn frobenius_preserves_res() {
        let p = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let f = TruncatedLaurent::random(&mut rng, p, N, -5, 25);
            let g = f.substitute(&sc(p, p as i64)).unwrap();
            assert!(g.res().unwrap().eq_at_prec(&f.res().unwrap()));
        }
    }

    #[test]
    fn q_matches_phi_t_over_t() {
        let p = 5;
        let phi_t = t_power(p, N, 1, 30).substitute(&sc(p, p as i64)).unwrap();
        let q = phi_t.shift(-1).truncate(29).unwrap();
        assert!(q.agrees(&q_series(p, N, 29)));
    }

    #[test]
    fn literal_form() {
        let p = 5;
        let s = TruncatedLaurent::from_terms(p, N, &[(-1, sc(p, 1)), (1, PadicScalar::from_parts(p, 1, 1, N))], 3)
            .unwrap();
        assert_eq!(s.to_string(), "-1:5^0*1 1:5^1*1");
    }
}
