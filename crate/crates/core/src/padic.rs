//! Elements of Q_p at fixed absolute precision.
//!
//! A [`PadicScalar`] stands for `p^val * unit + O(p^prec)`. The unit is kept
//! as a residue modulo `p^(prec - val)`. Precision follows the usual interval
//! rules:
//!
//! * `a + b` is known to `min(prec_a, prec_b)`;
//! * `a * b` is known to `min(val_a + prec_b, val_b + prec_a)`;
//! * `1 / b` is known to `prec_b - 2 val_b`;
//! * scaling by an exact integer `k` shifts precision by `v_p(k)`.
//!
//! Relative precision is capped so that `p^rel` stays below `2^62` and unit
//! products fit in a `u128`. The cap only ever lowers precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Precision used for exact zeros (e.g. `0 * x`).
pub const EXACT_PREC: i32 = 1 << 20;

pub fn ppow(p: u32, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// Largest `r` with `p^r <= 2^62`.
pub fn max_relative_precision(p: u32) -> i32 {
    let mut r = 0;
    let mut acc: u128 = 1;
    while acc * p as u128 <= 1u128 << 62 {
        acc *= p as u128;
        r += 1;
    }
    r
}

/// `floor(log_p(k))` for `k >= 1`.
pub fn floor_log(p: u32, k: u64) -> i32 {
    let mut r = 0;
    let mut acc = p as u64;
    while acc <= k {
        acc = acc.saturating_mul(p as u64);
        r += 1;
    }
    r
}

/// `v_p(n)` for `n != 0`.
pub fn vp_i128(p: u32, n: i128) -> i32 {
    split(p, n).0
}

fn split(p: u32, mut n: i128) -> (i32, i128) {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p as i128 == 0 {
        n /= p as i128;
        v += 1;
    }
    (v, n)
}

fn inv_mod(a: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "not invertible");
    old_s.rem_euclid(m as i128) as u128
}

fn signed_mod(n: i128, m: u128) -> u128 {
    n.rem_euclid(m as i128) as u128
}

#[derive(Clone, Copy, Debug, Hash)]
pub struct PadicScalar {
    p: u32,
    val: i32,
    unit: u128,
    prec: i32,
}

impl PadicScalar {
    pub fn zero(p: u32, prec: i32) -> Self {
        PadicScalar { p, val: prec, unit: 0, prec }
    }

    pub fn exact_zero(p: u32) -> Self {
        Self::zero(p, EXACT_PREC)
    }

    pub fn one(p: u32, prec: i32) -> Self {
        Self::from_i64(p, 1, prec)
    }

    /// Builds `p^val * n + O(p^prec)` from a signed integer, absorbing any
    /// factors of `p` in `n` into the valuation.
    fn from_signed(p: u32, val: i32, n: i128, prec: i32) -> Self {
        if n == 0 {
            return Self::zero(p, prec);
        }
        let (v, u) = split(p, n);
        let val = val + v;
        if val >= prec {
            return Self::zero(p, prec);
        }
        let r = (prec - val).min(max_relative_precision(p));
        let m = ppow(p, r as u32);
        PadicScalar { p, val, unit: signed_mod(u, m), prec: val + r }
    }

    fn from_unit_raw(p: u32, val: i32, raw: u128, prec: i32) -> Self {
        if raw == 0 {
            return Self::zero(p, prec);
        }
        let mut raw = raw;
        let mut val = val;
        while raw.is_multiple_of(p as u128) {
            raw /= p as u128;
            val += 1;
        }
        if val >= prec {
            return Self::zero(p, prec);
        }
        let r = (prec - val).min(max_relative_precision(p));
        PadicScalar { p, val, unit: raw % ppow(p, r as u32), prec: val + r }
    }

    pub fn from_i64(p: u32, n: i64, prec: i32) -> Self {
        Self::from_signed(p, 0, n as i128, prec)
    }

    /// The literal `p^v * u`.
    pub fn from_parts(p: u32, v: i32, u: i64, prec: i32) -> Self {
        Self::from_signed(p, v, u as i128, prec)
    }

    pub fn from_rational(p: u32, num: i64, den: i64, prec: i32) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero { prec });
        }
        let (vd, ud) = split(p, den as i128);
        // num/den = p^-vd * num/ud, and num/ud has precision prec + vd.
        let n = Self::from_signed(p, 0, num as i128, prec + vd);
        let d = Self::from_signed(p, 0, ud, EXACT_PREC.min(prec + vd + max_relative_precision(p)));
        Ok(n.div_unit_exact(&d).shift(-vd))
    }

    fn div_unit_exact(&self, d: &Self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let r = (self.prec - self.val) as u32;
        let m = ppow(self.p, r);
        let u = (self.unit % m) * inv_mod(d.unit % m, m) % m;
        PadicScalar { unit: u, ..*self }
    }

    /// Multiplication by `p^k` (exact).
    pub fn shift(&self, k: i32) -> Self {
        PadicScalar { val: self.val + k, prec: self.prec + k, ..*self }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Valuation; for a zero-at-precision scalar this is its precision.
    pub fn val(&self) -> i32 {
        self.val
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn unit(&self) -> u128 {
        self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    pub fn relative_precision(&self) -> i32 {
        self.prec - self.val
    }

    /// Lowers the absolute precision to `prec` (never raises it).
    pub fn reduce(&self, prec: i32) -> Self {
        if prec >= self.prec {
            return *self;
        }
        if self.is_zero() || self.val >= prec {
            return Self::zero(self.p, prec);
        }
        let m = ppow(self.p, (prec - self.val) as u32);
        PadicScalar { unit: self.unit % m, prec, ..*self }
    }

    /// Treats the stored representative as exact to absolute precision
    /// `prec`, which may exceed the current one.
    pub fn lift(&self, prec: i32) -> Self {
        if prec <= self.prec {
            return self.reduce(prec);
        }
        if self.is_zero() {
            return Self::zero(self.p, prec);
        }
        PadicScalar { prec, ..*self }.capped()
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::PrimeMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    fn add_impl(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        if self.is_zero() {
            return o.reduce(prec);
        }
        if o.is_zero() {
            return self.reduce(prec);
        }
        let v = self.val.min(o.val);
        if v >= prec {
            return Self::zero(self.p, prec);
        }
        let r = (prec - v) as u32;
        let m = ppow(self.p, r);
        let lift = |x: &Self| -> u128 {
            let s = (x.val - v) as u32;
            if s >= r {
                0
            } else {
                (x.unit % m) * ppow(x.p, s) % m
            }
        };
        let sum = (lift(self) + lift(o)) % m;
        Self::from_unit_raw(self.p, v, sum, prec)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        let prec = (self.val + o.prec).min(o.val + self.prec);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p, prec);
        }
        let val = self.val + o.val;
        let r = (prec - val).min(max_relative_precision(self.p));
        let m = ppow(self.p, r as u32);
        let unit = (self.unit % m) * (o.unit % m) % m;
        PadicScalar { p: self.p, val, unit, prec: val + r }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_prime(o)?;
        Ok(self.add_impl(o))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_prime(o)?;
        Ok(self.add_impl(&o.neg()))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_prime(o)?;
        Ok(self.mul_impl(o))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.check_prime(o)?;
        Ok(self.mul_impl(&o.inv()?))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { prec: self.prec });
        }
        let r = self.prec - self.val;
        let m = ppow(self.p, r as u32);
        Ok(PadicScalar { p: self.p, val: -self.val, unit: inv_mod(self.unit, m), prec: r - self.val })
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut base = *self;
        let mut acc = Self::from_i64(self.p, 1, EXACT_PREC);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        Ok(acc)
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, k: i64) -> Self {
        if k == 0 {
            return Self::exact_zero(self.p);
        }
        if self.is_zero() {
            return Self::zero(self.p, self.prec + vp_i128(self.p, k as i128));
        }
        let (v, u) = split(self.p, k as i128);
        let r = (self.prec - self.val) as u32;
        let m = ppow(self.p, r);
        let unit = (self.unit % m) * signed_mod(u, m) % m;
        PadicScalar { p: self.p, val: self.val + v, unit, prec: self.prec + v }
    }

    /// Division by a nonzero exact integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by the integer 0");
        let (v, u) = split(self.p, k as i128);
        if self.is_zero() {
            return Self::zero(self.p, self.prec - v);
        }
        let r = (self.prec - self.val) as u32;
        let m = ppow(self.p, r);
        let unit = self.unit * inv_mod(signed_mod(u, m), m) % m;
        PadicScalar { p: self.p, val: self.val - v, unit, prec: self.prec - v }
    }

    /// True when `self` and `other` agree modulo `p^min(prec)`.
    pub fn eq_at_prec(&self, other: &Self) -> bool {
        self.p == other.p && (*self - *other).is_zero()
    }

    /// Valuation of `self - other` (its precision when the difference vanishes).
    pub fn residual(&self, other: &Self) -> i32 {
        (*self - *other).val()
    }

    /// Nonnegative integer representative modulo `p^prec`, for `val >= 0`.
    pub fn integer_rep(&self) -> Option<u128> {
        if self.val < 0 && !self.is_zero() {
            return None;
        }
        if self.is_zero() || self.prec <= 0 {
            return Some(0);
        }
        let m = ppow(self.p, self.prec as u32);
        Some((self.unit % m) * ppow(self.p, self.val as u32) % m)
    }

    /// Balanced representative of the unit, in `(-m/2, m/2]`.
    pub fn balanced_unit(&self) -> i128 {
        if self.is_zero() {
            return 0;
        }
        let m = ppow(self.p, (self.prec - self.val) as u32);
        if self.unit > m / 2 {
            self.unit as i128 - m as i128
        } else {
            self.unit as i128
        }
    }

    /// Value as an integer when it is one of small absolute value at this precision.
    pub fn to_i128(&self) -> Option<i128> {
        if self.is_zero() {
            return Some(0);
        }
        if self.val < 0 {
            return None;
        }
        Some(self.balanced_unit() * ppow(self.p, self.val as u32) as i128)
    }

    /// Teichmüller representative of `a mod p`: the unique `(p-1)`-th root
    /// of unity congruent to `a`.
    pub fn teichmuller(p: u32, a: i64, prec: i32) -> Result<Self> {
        if a.rem_euclid(p as i64) == 0 {
            return Err(Error::NotAUnit(a.to_string()));
        }
        let prec = prec.min(max_relative_precision(p));
        let m = ppow(p, prec as u32);
        let mut x = signed_mod(a as i128, m);
        for _ in 0..prec {
            let mut acc = 1u128;
            for _ in 0..p {
                acc = acc * x % m;
            }
            x = acc;
        }
        Ok(Self::from_unit_raw(p, 0, x, prec))
    }

    /// Teichmüller representative of this unit.
    pub fn teichmuller_of(&self) -> Result<Self> {
        if self.val != 0 || self.is_zero() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        Self::teichmuller(self.p, (self.unit % self.p as u128) as i64, self.prec)
    }

    /// p-adic logarithm of `u ≡ 1 mod p`.
    pub fn plog(&self) -> Result<Self> {
        let one = Self::from_i64(self.p, 1, EXACT_PREC);
        let x = *self - one;
        if self.val != 0 || x.val() < 1 {
            return Err(Error::NotPrincipalUnit(self.to_string()));
        }
        if x.is_zero() {
            return Ok(x);
        }
        let vx = x.val();
        let target = x.prec();
        let mut sum = Self::exact_zero(self.p);
        let mut pw = x;
        let mut k: i64 = 1;
        loop {
            let term = pw.div_int(k);
            sum = if k % 2 == 1 { sum + term } else { sum - term };
            k += 1;
            let bound = k as i32 * vx - floor_log(self.p, k as u64);
            if bound >= target {
                return Ok(sum.reduce(bound));
            }
            pw = pw * x;
        }
    }

    /// p-adic exponential of `x` with `v_p(x) >= 1`.
    pub fn pexp(&self) -> Result<Self> {
        if self.val < 1 && !self.is_zero() {
            return Err(Error::Unsupported(format!("exp needs v_p(x) >= 1, got {}", self.val)));
        }
        let p = self.p;
        let mut sum = Self::from_i64(p, 1, EXACT_PREC);
        if self.is_zero() {
            return Ok(sum.reduce(self.prec));
        }
        let target = self.prec;
        let mut term = Self::from_i64(p, 1, EXACT_PREC);
        let mut k: i64 = 1;
        loop {
            term = (term * *self).div_int(k);
            sum = sum + term;
            k += 1;
            // v(x^j / j!) >= j v - (j - 1)/(p - 1), increasing in j
            if k as i32 * self.val - (k as i32 - 1) / (p as i32 - 1) >= target {
                return Ok(sum.reduce(target));
            }
        }
    }

    /// Generalized binomial coefficient `a(a-1)...(a-k+1)/k!` for a p-adic
    /// integer `a`. The result is exact modulo `p^(prec(a) - floor(log_p k))`,
    /// since `C(a + p^P h, k) - C(a, k)` is divisible by that power.
    pub fn binomial(&self, k: u32) -> Result<Self> {
        if self.val < 0 && !self.is_zero() {
            return Err(Error::NotIntegral(self.val));
        }
        let p = self.p;
        let prec_in = self.prec.min(max_relative_precision(p));
        if k == 0 {
            return Ok(Self::one(p, prec_in.max(1)));
        }
        let prec_out = prec_in - floor_log(p, k as u64);
        if prec_in <= 0 {
            return Ok(Self::zero(p, prec_out));
        }
        let a = self.reduce(prec_in).integer_rep().unwrap_or(0);
        Ok(binomial_int(p, a, k as u64, prec_in).reduce(prec_out))
    }

    /// Bounds the relative precision as the `p^r < 2^62` cap requires.
    pub fn capped(self) -> Self {
        let cap = max_relative_precision(self.p);
        if !self.is_zero() && self.prec - self.val > cap {
            self.reduce(self.val + cap)
        } else {
            self
        }
    }
}

/// `C(a, k) mod p^prec` for a nonnegative integer `a < 2^62`.
pub fn binomial_int(p: u32, a: u128, k: u64, prec: i32) -> PadicScalar {
    if (k as u128) > a {
        return PadicScalar::zero(p, prec);
    }
    let m = ppow(p, prec.max(0) as u32);
    let mut v = 0i32;
    let mut u = 1u128 % m.max(1);
    for i in 0..k {
        let (vn, un) = split(p, (a - i as u128) as i128);
        let (vd, ud) = split(p, (i + 1) as i128);
        v += vn - vd;
        u = u * (un as u128 % m) % m;
        u = u * inv_mod(ud as u128 % m, m) % m;
    }
    PadicScalar::from_unit_raw(p, v, u, prec)
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, o: Self) -> Self {
        assert_eq!(self.p, o.p, "mismatched primes");
        self.add_impl(&o)
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, o: Self) -> Self {
        assert_eq!(self.p, o.p, "mismatched primes");
        self.add_impl(&o.neg())
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let m = ppow(self.p, (self.prec - self.val) as u32);
        PadicScalar { unit: (m - self.unit % m) % m, ..self }
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, o: Self) -> Self {
        assert_eq!(self.p, o.p, "mismatched primes");
        self.mul_impl(&o)
    }
}

/// Prints the `p^v*u` literal form, with `u` balanced around zero.
impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}^{}*{}", self.p, self.val, self.balanced_unit())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u32, n: i64) -> PadicScalar {
        PadicScalar::from_i64(p, n, 12)
    }

    #[test]
    fn two_plus_three_is_p() {
        let x = s(5, 2) + s(5, 3);
        assert_eq!(x.val(), 1);
        assert!(x.eq_at_prec(&PadicScalar::from_parts(5, 1, 1, 12)));
    }

    #[test]
    fn third_times_three() {
        let third = PadicScalar::from_rational(3, 1, 3, 12).unwrap();
        assert_eq!(third.val(), -1);
        let one = third * s(3, 3);
        assert_eq!(one.val(), 0);
        assert!(one.eq_at_prec(&s(3, 1)));
    }

    #[test]
    fn division_by_self() {
        let x = PadicScalar::from_parts(5, -2, 7, 12);
        let q = x.try_div(&x).unwrap();
        assert!(q.eq_at_prec(&s(5, 1)));
        assert!(s(5, 1).try_div(&PadicScalar::zero(5, 4)).is_err());
        assert_eq!(s(5, 1).try_add(&s(3, 1)).unwrap_err(), Error::PrimeMismatch(5, 3));
    }

    #[test]
    fn precision_rules() {
        // division by an exact p^k lowers absolute precision by k
        let x = s(5, 7);
        assert_eq!(x.div_int(25).prec(), 10);
        // an inexact divisor costs its relative precision too
        let y = x.try_div(&PadicScalar::from_parts(5, 2, 1, 12)).unwrap();
        assert_eq!(y.prec(), 8);
        // sum precision is the min
        let a = PadicScalar::from_i64(5, 1, 4);
        assert_eq!((a + s(5, 3)).prec(), 4);
        // product precision
        let b = PadicScalar::from_parts(5, 3, 1, 6);
        assert_eq!((b * PadicScalar::from_parts(5, 1, 2, 8)).prec(), 7);
        // exact integer scaling shifts precision
        assert_eq!(s(5, 1).mul_int(25).prec(), 14);
        assert_eq!(s(5, 1).div_int(5).prec(), 11);
    }

    #[test]
    fn teichmuller_values() {
        let t = PadicScalar::teichmuller(5, 2, 3).unwrap();
        assert_eq!(t.integer_rep(), Some(57));
        let t = PadicScalar::teichmuller(3, 2, 4).unwrap();
        assert_eq!(t.integer_rep(), Some(80));
        assert_eq!(PadicScalar::teichmuller(5, 1, 3).unwrap().integer_rep(), Some(1));
        assert!(PadicScalar::teichmuller(5, 10, 3).is_err());
    }

    #[test]
    fn plog_of_one_is_zero() {
        assert!(s(5, 1).plog().unwrap().is_zero());
        assert!(s(5, 2).plog().is_err());
    }

    #[test]
    fn plog_series_matches_direct_sum() {
        // direct summation of the log series with rationals, reduced mod 5^6
        let p = 5;
        let u = PadicScalar::from_i64(p, 6, 6);
        let l = u.plog().unwrap();
        let mut expect = PadicScalar::exact_zero(p);
        for k in 1..=12i64 {
            let term = PadicScalar::from_i64(p, 5i64.pow(k as u32), 30).div_int(k);
            expect = if k % 2 == 1 { expect + term } else { expect - term };
        }
        assert!(l.eq_at_prec(&expect));
        assert!(l.prec() >= 5);
        // exp(log(u)) = u
        assert!(l.pexp().unwrap().eq_at_prec(&u));
    }

    #[test]
    fn binomial_integer_cases() {
        assert!(s(5, 5).binomial(2).unwrap().eq_at_prec(&s(5, 10)));
        assert!(s(5, 9).binomial(0).unwrap().eq_at_prec(&s(5, 1)));
        // (1+T)^4 coefficients for a = 1 + 3
        let a = s(3, 4);
        for (k, c) in [1i64, 4, 6, 4, 1].iter().enumerate() {
            assert!(a.binomial(k as u32).unwrap().eq_at_prec(&s(3, *c)));
        }
        assert!(a.binomial(5).unwrap().is_zero());
        // negative integer: C(-1, k) = (-1)^k
        let m1 = s(3, -1);
        assert!(m1.binomial(7).unwrap().eq_at_prec(&s(3, -1)));
    }

    #[test]
    fn display_literal() {
        assert_eq!(PadicScalar::from_parts(5, -1, 3, 12).to_string(), "5^-1*3");
        assert_eq!(s(5, -1).to_string(), "5^0*-1");
    }

    #[test]
    fn exp_precision_is_honest() {
        // the value at a low precision must agree with a high-precision evaluation
        for p in [3u32, 5, 7] {
            for n in 1..60i64 {
                let x = PadicScalar::from_i64(p, n * p as i64, 30);
                let hi = x.pexp().unwrap();
                for prec in [4, 8, 12] {
                    let lo = x.reduce(prec).pexp().unwrap();
                    assert!(lo.eq_at_prec(&hi), "p={p} n={n} prec={prec}: {lo} vs {hi}");
                    assert!(lo.prec() >= prec - 1);
                }
            }
        }
    }
}
