//! Dense linear algebra over Q_p at finite precision.
//!
//! Elimination pivots on the entry of least valuation in the remaining block,
//! so every multiplier is integral and no precision is lost to division.

use crate::error::{Error, Result};
use crate::padic::PadicScalar;

#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<PadicScalar>,
}

impl Matrix {
    pub fn zeros(p: u32, prec: i32, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![PadicScalar::zero(p, prec); rows * cols] }
    }

    pub fn identity(p: u32, prec: i32, n: usize) -> Self {
        let mut m = Self::zeros(p, prec, n, n);
        for i in 0..n {
            m.set(i, i, PadicScalar::one(p, prec));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> PadicScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<PadicScalar>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> PadicScalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<PadicScalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let p = self.data.first().or(o.data.first()).map_or(3, |c| c.p());
        let mut out = Matrix::zeros(p, crate::padic::EXACT_PREC, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() && a.prec() >= crate::padic::EXACT_PREC {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx] + a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[PadicScalar]) -> Vec<PadicScalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        let p = v.first().map_or(3, |c| c.p());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(PadicScalar::exact_zero(p), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }

    /// `[self | o]`.
    pub fn hcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows, "shape mismatch");
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| if j < self.cols { self.get(i, j) } else { o.get(i, j - self.cols) })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }
}

/// Row echelon form of `[A | B]`, pivoting only inside `A`.
struct Echelon {
    m: Matrix,
    a_cols: usize,
    pivots: Vec<(usize, usize)>,
}

#[derive(Clone, Copy)]
enum PivotPolicy {
    /// A pivot with fewer than `margin` relative digits is an error.
    Strict(i32),
    /// Elimination stops at the first pivot with fewer than `margin` relative
    /// digits; the remaining block is treated as zero at precision.
    Stop(i32),
}

fn eliminate(mut m: Matrix, a_cols: usize, policy: PivotPolicy) -> Result<Echelon> {
    let mut pivots = Vec::new();
    let mut used_cols = vec![false; a_cols];
    let mut r = 0;
    while r < m.rows {
        let mut best: Option<(usize, usize, i32)> = None;
        for i in r..m.rows {
            for (j, used) in used_cols.iter().enumerate() {
                if *used {
                    continue;
                }
                let c = m.get(i, j);
                if !c.is_zero() && best.is_none_or(|b| c.val() < b.2) {
                    best = Some((i, j, c.val()));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        let pv = m.get(pi, pj);
        match policy {
            PivotPolicy::Strict(margin) if pv.relative_precision() < margin => {
                return Err(Error::RankAmbiguous { pivot_val: pv.val(), prec: pv.prec() });
            }
            PivotPolicy::Stop(margin) if pv.relative_precision() < margin => break,
            _ => {}
        }
        if pi != r {
            for j in 0..m.cols {
                let (a, b) = (m.get(r, j), m.get(pi, j));
                m.set(r, j, b);
                m.set(pi, j, a);
            }
        }
        let inv = pv.inv()?;
        for i in (r + 1)..m.rows {
            let c = m.get(i, pj);
            if c.is_zero() {
                m.set(i, pj, PadicScalar::zero(c.p(), c.prec()));
                continue;
            }
            let f = c * inv;
            for j in 0..m.cols {
                let v = m.get(i, j) - f * m.get(r, j);
                m.set(i, j, v);
            }
            let z = m.get(i, pj);
            m.set(i, pj, PadicScalar::zero(z.p(), z.prec()));
        }
        used_cols[pj] = true;
        pivots.push((r, pj));
        r += 1;
    }
    Ok(Echelon { m, a_cols, pivots })
}

/// Rank, declared only when every pivot keeps at least `margin` digits of
/// relative precision.
pub fn rank(a: &Matrix, margin: i32) -> Result<usize> {
    Ok(eliminate(a.clone(), a.cols, PivotPolicy::Strict(margin))?.pivots.len())
}

/// `dim ker A` for the linear map `A: Q_p^cols -> Q_p^rows`.
pub fn kernel_dim(a: &Matrix, margin: i32) -> Result<usize> {
    Ok(a.cols - rank(a, margin)?)
}

/// `dim coker A`.
pub fn cokernel_dim(a: &Matrix, margin: i32) -> Result<usize> {
    Ok(a.rows - rank(a, margin)?)
}

/// Outcome of a linear solve, with the worst residual of the unpivoted rows.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<PadicScalar>,
    pub rank: usize,
}

/// A particular solution of `A x = b` (free variables set to zero).
///
/// Only pivots with at least `margin` relative digits are used. An unpivoted
/// row with a nonzero right-hand side makes the system inconsistent: reported
/// as `NotCoboundary` when the residual sits at least `margin` digits above
/// its precision floor, `PrecisionExhausted` otherwise.
pub fn solve(a: &Matrix, b: &[PadicScalar], margin: i32) -> Result<Solution> {
    assert_eq!(a.rows, b.len(), "shape mismatch");
    let aug = a.hcat(&Matrix::from_columns(&[b.to_vec()]));
    let e = eliminate(aug, a.cols, PivotPolicy::Stop(margin))?;
    let bcol = e.a_cols;
    let r = e.pivots.len();
    for i in r..e.m.rows {
        let c = e.m.get(i, bcol);
        if !c.is_zero() {
            if c.prec() - c.val() >= margin {
                return Err(Error::NotCoboundary { residual_val: c.val(), prec: c.prec() });
            }
            return Err(Error::PrecisionExhausted { residual_val: c.val(), prec: c.prec() });
        }
    }
    let p = b.first().map_or(3, |c| c.p());
    let mut x = vec![PadicScalar::exact_zero(p); a.cols];
    for idx in (0..r).rev() {
        let (row, col) = e.pivots[idx];
        let mut acc = e.m.get(row, bcol);
        for &(_, c2) in &e.pivots[idx + 1..] {
            acc = acc - e.m.get(row, c2) * x[c2];
        }
        x[col] = acc.try_div(&e.m.get(row, col))?;
    }
    Ok(Solution { x, rank: r })
}

/// A basis of `ker A`: one vector per non-pivot column, with that column's
/// coordinate set to 1.
pub fn kernel_basis(a: &Matrix, margin: i32) -> Result<Vec<Vec<PadicScalar>>> {
    let e = eliminate(a.clone(), a.cols, PivotPolicy::Strict(margin))?;
    let pivot_cols: Vec<usize> = e.pivots.iter().map(|&(_, c)| c).collect();
    let p = a.data.first().map_or(3, |c| c.p());
    let mut out = Vec::new();
    for j in (0..a.cols).filter(|j| !pivot_cols.contains(j)) {
        let rhs: Vec<PadicScalar> = a.column(j).iter().map(|c| -*c).collect();
        let mut x = solve(a, &rhs, margin)?.x;
        x[j] = PadicScalar::one(p, crate::padic::EXACT_PREC);
        out.push(x);
    }
    Ok(out)
}

/// Inverse of a square matrix.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    assert_eq!(a.rows, a.cols, "square matrix required");
    let n = a.rows;
    let p = a.data.first().map_or(3, |c| c.p());
    let prec = a.data.iter().map(|c| c.prec()).min().unwrap_or(crate::padic::EXACT_PREC);
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<PadicScalar> =
            (0..n).map(|i| if i == j { PadicScalar::one(p, prec) } else { PadicScalar::zero(p, prec) }).collect();
        let s = solve(a, &e, 1)?;
        if s.rank < n {
            return Err(Error::DivisionByZero { prec });
        }
        cols.push(s.x);
    }
    Ok(Matrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, rows: &[&[i64]]) -> Matrix {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| PadicScalar::from_i64(p, rows[i][j], 12))
    }

    #[test]
    fn rank_of_small_matrices() {
        let a = m(5, &[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&a, 3).unwrap(), 1);
        let b = m(5, &[&[5, 0], &[0, 25]]);
        assert_eq!(rank(&b, 3).unwrap(), 2);
        assert_eq!(kernel_dim(&a, 3).unwrap(), 1);
        assert_eq!(cokernel_dim(&m(5, &[&[1, 0, 0]]), 3).unwrap(), 0);
    }

    #[test]
    fn ambiguous_rank() {
        // p^10 with precision 12 leaves 2 digits
        let a = Matrix::from_fn(1, 1, |_, _| PadicScalar::from_parts(5, 10, 1, 12));
        assert!(matches!(rank(&a, 3), Err(Error::RankAmbiguous { .. })));
        assert_eq!(rank(&a, 2).unwrap(), 1);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(3, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let b: Vec<_> = [1i64, 2, 3].iter().map(|&v| PadicScalar::from_i64(3, v, 12)).collect();
        let s = solve(&a, &b, 3).unwrap();
        let back = a.mul_vec(&s.x);
        assert!(back.iter().zip(&b).all(|(x, y)| x.eq_at_prec(y)));
        let inv = inverse(&a).unwrap();
        assert!(a.mul(&inv).sub(&Matrix::identity(3, 12, 3)).is_zero());
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let a = m(5, &[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel_basis(&a, 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|c| c.is_zero()));
        }
        assert_eq!(rank(&Matrix::from_columns(&k), 3).unwrap(), 2);
    }

    #[test]
    fn inconsistent_system() {
        let a = m(5, &[&[1, 1], &[1, 1]]);
        let b = vec![PadicScalar::from_i64(5, 1, 12), PadicScalar::from_i64(5, 2, 12)];
        assert!(matches!(solve(&a, &b, 3), Err(Error::NotCoboundary { .. })));
        let b = vec![PadicScalar::from_i64(5, 1, 12), PadicScalar::from_parts(5, 11, 1, 12) + PadicScalar::from_i64(5, 1, 12)];
        assert!(matches!(solve(&a, &b, 3), Err(Error::PrecisionExhausted { .. })));
    }
}
