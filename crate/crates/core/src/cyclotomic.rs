//! The cyclotomic fields `K_n = Q_p(ε^{(n)})`, the rings `K_n[t]/t^k`, and
//! the localization `ι_n: T ↦ ε^{(n)} e^{t/p^n} - 1`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::padic::{ppow, PadicScalar};
use crate::series::TruncatedLaurent;

/// `K_n = Q_p[X]/Φ_{p^n}(X)` with `X = ε^{(n)}`, elements stored on the
/// basis `1, X, ..., X^{e-1}`, `e = (p-1)p^{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclotomicLevel {
    pub p: u32,
    pub n: u32,
    pub prec: i32,
}

impl CyclotomicLevel {
    pub fn new(p: u32, n: u32, prec: i32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Unsupported("cyclotomic level must be at least 1".into()));
        }
        Ok(CyclotomicLevel { p, n, prec })
    }

    /// `[K_n : Q_p] = (p-1)p^{n-1}`.
    pub fn degree(&self) -> usize {
        (self.p as usize - 1) * self.order() / self.p as usize
    }

    /// `p^n`, the order of `ε^{(n)}`.
    pub fn order(&self) -> usize {
        ppow(self.p, self.n) as usize
    }

    pub fn zero(&self) -> Vec<PadicScalar> {
        vec![PadicScalar::exact_zero(self.p); self.degree()]
    }

    pub fn one(&self) -> Vec<PadicScalar> {
        self.scalar(PadicScalar::one(self.p, self.prec))
    }

    pub fn scalar(&self, c: PadicScalar) -> Vec<PadicScalar> {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// `ε^m`.
    pub fn root_power(&self, m: i64) -> Vec<PadicScalar> {
        let mut v = self.zero();
        self.add_monomial(&mut v, m, PadicScalar::one(self.p, self.prec));
        v
    }

    /// `v += c X^m`, using `X^{p^n} = 1` and
    /// `X^{(p-1)p^{n-1} + r} = -Σ_{j<p-1} X^{j p^{n-1} + r}`.
    fn add_monomial(&self, v: &mut [PadicScalar], m: i64, c: PadicScalar) {
        let m = m.rem_euclid(self.order() as i64) as usize;
        let e = self.degree();
        if m < e {
            v[m] = v[m] + c;
            return;
        }
        let step = self.order() / self.p as usize;
        let r = m - e;
        for j in 0..(self.p as usize - 1) {
            let i = j * step + r;
            v[i] = v[i] - c;
        }
    }

    pub fn add(&self, a: &[PadicScalar], b: &[PadicScalar]) -> Vec<PadicScalar> {
        a.iter().zip(b).map(|(x, y)| *x + *y).collect()
    }

    pub fn sub(&self, a: &[PadicScalar], b: &[PadicScalar]) -> Vec<PadicScalar> {
        a.iter().zip(b).map(|(x, y)| *x - *y).collect()
    }

    pub fn scale(&self, a: &[PadicScalar], c: &PadicScalar) -> Vec<PadicScalar> {
        a.iter().map(|x| *x * *c).collect()
    }

    pub fn mul(&self, a: &[PadicScalar], b: &[PadicScalar]) -> Vec<PadicScalar> {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() && x.prec() >= crate::padic::EXACT_PREC {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                self.add_monomial(&mut out, (i + j) as i64, *x * *y);
            }
        }
        out
    }

    /// `σ_a: X ↦ X^a` for `a` prime to `p`.
    pub fn sigma(&self, a: i64, x: &[PadicScalar]) -> Result<Vec<PadicScalar>> {
        if a.rem_euclid(self.p as i64) == 0 {
            return Err(Error::NotAUnit(a.to_string()));
        }
        let mut out = self.zero();
        for (i, c) in x.iter().enumerate() {
            self.add_monomial(&mut out, a * i as i64, *c);
        }
        Ok(out)
    }

    /// Matrix of `σ_a` on the basis `X^i`.
    pub fn sigma_matrix(&self, a: i64) -> Result<Matrix> {
        let e = self.degree();
        let mut cols = Vec::with_capacity(e);
        for i in 0..e {
            let mut v = self.zero();
            v[i] = PadicScalar::one(self.p, self.prec);
            cols.push(self.sigma(a, &v)?);
        }
        Ok(Matrix::from_columns(&cols))
    }

    /// `K_n → K_{n+1}`, `ε^{(n)} ↦ (ε^{(n+1)})^p`.
    pub fn embed(&self, x: &[PadicScalar]) -> Vec<PadicScalar> {
        let up = CyclotomicLevel { n: self.n + 1, ..*self };
        let mut out = up.zero();
        for (i, c) in x.iter().enumerate() {
            up.add_monomial(&mut out, (self.p as usize * i) as i64, *c);
        }
        out
    }

    pub fn up(&self) -> CyclotomicLevel {
        CyclotomicLevel { n: self.n + 1, ..*self }
    }

    /// Gauss sum of `ω^j` at level 1: `G = Σ_{x=1}^{p-1} ω(x)^j ε^x`, and
    /// `G = 1` for the trivial character; embedded at this level.
    pub fn gauss_sum(&self, j: i64) -> Result<Vec<PadicScalar>> {
        let p = self.p;
        let j = j.rem_euclid(p as i64 - 1);
        if j == 0 {
            return Ok(self.one());
        }
        let base = CyclotomicLevel { n: 1, ..*self };
        let mut g = base.zero();
        for x in 1..p as i64 {
            let w = PadicScalar::teichmuller(p, x, self.prec)?.pow(j)?;
            base.add_monomial(&mut g, x, w);
        }
        let mut lvl = base;
        while lvl.n < self.n {
            g = lvl.embed(&g);
            lvl = lvl.up();
        }
        Ok(g)
    }
}

/// `K_n[t]/t^k`, stored as `k` coordinates in `K_n`; flattened on the
/// `Q_p`-basis `X^j t^i` at index `i e + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DifRing {
    pub level: CyclotomicLevel,
    pub k: usize,
}

pub type DifElem = Vec<Vec<PadicScalar>>;

impl DifRing {
    pub fn new(level: CyclotomicLevel, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Unsupported("t-length must be at least 1".into()));
        }
        Ok(DifRing { level, k })
    }

    /// `dim_{Q_p} = k (p-1) p^{n-1}`.
    pub fn dim(&self) -> usize {
        self.k * self.level.degree()
    }

    pub fn zero(&self) -> DifElem {
        vec![self.level.zero(); self.k]
    }

    pub fn one(&self) -> DifElem {
        let mut z = self.zero();
        z[0] = self.level.one();
        z
    }

    /// `c t^i`.
    pub fn t_monomial(&self, c: Vec<PadicScalar>, i: usize) -> DifElem {
        let mut z = self.zero();
        if i < self.k {
            z[i] = c;
        }
        z
    }

    pub fn add(&self, a: &DifElem, b: &DifElem) -> DifElem {
        a.iter().zip(b).map(|(x, y)| self.level.add(x, y)).collect()
    }

    pub fn sub(&self, a: &DifElem, b: &DifElem) -> DifElem {
        a.iter().zip(b).map(|(x, y)| self.level.sub(x, y)).collect()
    }

    pub fn scale(&self, a: &DifElem, c: &PadicScalar) -> DifElem {
        a.iter().map(|x| self.level.scale(x, c)).collect()
    }

    pub fn mul(&self, a: &DifElem, b: &DifElem) -> DifElem {
        let mut out = self.zero();
        for i in 0..self.k {
            for j in 0..(self.k - i) {
                let prod = self.level.mul(&a[i], &b[j]);
                out[i + j] = self.level.add(&out[i + j], &prod);
            }
        }
        out
    }

    pub fn flatten(&self, a: &DifElem) -> Vec<PadicScalar> {
        a.iter().flatten().copied().collect()
    }

    pub fn unflatten(&self, v: &[PadicScalar]) -> DifElem {
        v.chunks(self.level.degree()).map(|c| c.to_vec()).collect()
    }

    /// `Q_p`-matrix of multiplication by `a`.
    pub fn mul_matrix(&self, a: &DifElem) -> Matrix {
        let d = self.dim();
        let p = self.level.p;
        let mut cols = Vec::with_capacity(d);
        for idx in 0..d {
            let mut v = vec![PadicScalar::exact_zero(p); d];
            v[idx] = PadicScalar::one(p, self.level.prec);
            cols.push(self.flatten(&self.mul(a, &self.unflatten(&v))));
        }
        Matrix::from_columns(&cols)
    }

    pub fn inverse(&self, a: &DifElem) -> Result<DifElem> {
        let m = self.mul_matrix(a);
        let sol = linalg::solve(&m, &self.flatten(&self.one()), 1)?;
        if sol.rank < self.dim() {
            return Err(Error::DivisionByZero { prec: self.level.prec });
        }
        Ok(self.unflatten(&sol.x))
    }

    pub fn pow(&self, a: &DifElem, e: u32) -> DifElem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `g`: `σ_g` on `K_n` and `t ↦ g t`, scaled by `c`.
    pub fn gamma_matrix(&self, g: &PadicScalar, c: &PadicScalar) -> Result<Matrix> {
        let lvl = &self.level;
        let m = lvl.order() as u128;
        let a = g.reduce(lvl.n as i32).integer_rep().ok_or_else(|| Error::NotAUnit(g.to_string()))? % m;
        let sig = lvl.sigma_matrix(a as i64)?;
        let e = lvl.degree();
        let d = self.dim();
        let p = lvl.p;
        let mut out = Matrix::zeros(p, crate::padic::EXACT_PREC, d, d);
        let mut scal = *c;
        for i in 0..self.k {
            for r in 0..e {
                for s in 0..e {
                    let v = sig.get(r, s);
                    if !v.is_zero() {
                        out.set(i * e + r, i * e + s, v * scal);
                    }
                }
            }
            scal = scal * *g;
        }
        Ok(out)
    }

    /// `K_n[t]/t^k → K_{n+1}[t]/t^k`, coefficientwise `embed`, scaled by `c`.
    pub fn connecting_matrix(&self, c: &PadicScalar) -> Matrix {
        let up = DifRing { level: self.level.up(), k: self.k };
        let p = self.level.p;
        let mut cols = Vec::with_capacity(self.dim());
        for idx in 0..self.dim() {
            let mut v = vec![PadicScalar::exact_zero(p); self.dim()];
            v[idx] = *c;
            let x = self.unflatten(&v);
            let y: DifElem = x.iter().map(|xi| self.level.embed(xi)).collect();
            cols.push(up.flatten(&y));
        }
        Matrix::from_columns(&cols)
    }

    /// `ι_n(T) = ε e^{t/p^n} - 1` mod `t^k`.
    pub fn iota_t(&self) -> DifElem {
        let lvl = &self.level;
        let p = lvl.p;
        let eps = lvl.root_power(1);
        let mut out = self.zero();
        // ε t^j / (j! p^{nj})
        let mut coef = PadicScalar::one(p, lvl.prec);
        for j in 0..self.k {
            if j > 0 {
                coef = coef.div_int(j as i64).shift(-(lvl.n as i32));
            }
            out[j] = lvl.scale(&eps, &coef);
        }
        out[0] = lvl.sub(&out[0], &lvl.one());
        out
    }

    /// `ι_n(f)`: substitutes `T ↦ ε e^{t/p^n} - 1` and reduces mod `t^k`.
    ///
    /// The unknown coefficients above `hi` contribute `ι_n(T)^m`, whose
    /// `t^j`-coordinate is divisible by `p^{⌊(m-j)/e⌋ - nj - v_p(j!)}`;
    /// each coordinate is capped accordingly.
    pub fn localize(&self, f: &TruncatedLaurent) -> Result<DifElem> {
        let lvl = &self.level;
        if f.p() != lvl.p {
            return Err(Error::PrimeMismatch(lvl.p, f.p()));
        }
        let u = self.iota_t();
        let mut acc = self.zero();
        let mut pw = self.one();
        for m in 0..=f.hi() {
            if m > 0 {
                pw = self.mul(&pw, &u);
            }
            if m >= f.lo() {
                acc = self.add(&acc, &self.scale(&pw, &f.coeff(m).unwrap()));
            }
        }
        if f.lo() < 0 {
            let inv = self.inverse(&u)?;
            let mut pw = self.one();
            for m in 1..=(-f.lo()) {
                pw = self.mul(&pw, &inv);
                acc = self.add(&acc, &self.scale(&pw, &f.coeff(-m).unwrap()));
            }
        }
        let e = lvl.degree() as i32;
        let v_tail = f.min_val().unwrap_or(f.prec()).min(f.prec());
        let mut vfact = 0;
        for (j, comp) in acc.iter_mut().enumerate() {
            let j = j as i32;
            if j > 0 {
                vfact += crate::padic::vp_i128(lvl.p, j as i128);
            }
            let cap = v_tail + (f.hi() + 1 - j).div_euclid(e) - lvl.n as i32 * j - vfact;
            for c in comp.iter_mut() {
                *c = c.reduce(cap);
            }
        }
        Ok(acc)
    }
}
