//! Level-n fibers of pure `t^k`-torsion modules, their Γ-cohomology, and the
//! shift model on which `φ - 1` is surjective.
//!
//! A fiber `S^n` is a finite-dimensional `Q_p`-space with a γ-matrix and a
//! connecting map `S^n → S^{n+1}`. For `R(δ)/t^k`, `S^n = K_n[t]/t^k · e`
//! with `γ(x t^i e) = δ(χ(γ)) χ(γ)^i σ_{χ(γ)}(x) t^i e`, and the connecting map
//! is `φ`: `x ↦ δ(p)·x` with `ε^{(n)} ↦ (ε^{(n+1)})^p`.

use serde::Serialize;

use crate::cyclotomic::{CyclotomicLevel, DifElem, DifRing};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::operators::GammaGenerator;
use crate::padic::PadicScalar;
use crate::rankone::Character;
use crate::series::TruncatedLaurent;

/// `ι_n(f) ∈ K_n[t]/t^k`.
pub fn localize_at_n(f: &TruncatedLaurent, n: u32, k: usize) -> Result<DifElem> {
    DifRing::new(CyclotomicLevel::new(f.p(), n, f.prec().min(crate::padic::max_relative_precision(f.p())))?, k)?
        .localize(f)
}

#[derive(Clone, Debug)]
pub struct TorsionFiber {
    ring: DifRing,
    rank: usize,
    gamma: Matrix,
    connecting: Option<Matrix>,
}

impl TorsionFiber {
    /// A fiber from raw data: `gamma` acts on `Q_p^{rank·k·e}`, ordered by
    /// rank index first.
    pub fn from_parts(ring: DifRing, rank: usize, gamma: Matrix, connecting: Option<Matrix>) -> Result<Self> {
        let dim = rank * ring.dim();
        if gamma.rows() != dim || gamma.cols() != dim {
            return Err(Error::IncompatibleFamily(format!("γ-matrix is {}x{}, fiber has dimension {dim}", gamma.rows(), gamma.cols())));
        }
        if let Some(c) = &connecting {
            let up = rank * DifRing { level: ring.level.up(), k: ring.k }.dim();
            if c.cols() != dim || c.rows() != up {
                return Err(Error::IncompatibleFamily("connecting map has the wrong shape".into()));
            }
        }
        Ok(TorsionFiber { ring, rank, gamma, connecting })
    }

    /// The level-`n` fiber of `⊕_j R(δ_j)/t^k`.
    pub fn twisted(n: u32, k: usize, twists: &[Character], g: &GammaGenerator, prec: i32) -> Result<Self> {
        let first = twists.first().ok_or_else(|| Error::Unsupported("empty twist list".into()))?;
        let p = first.p();
        let ring = DifRing::new(CyclotomicLevel::new(p, n, prec)?, k)?;
        let chi = g.chi();
        let blocks: Vec<(Matrix, Matrix)> = twists
            .iter()
            .map(|d| Ok((ring.gamma_matrix(&chi, &d.eval_gamma(g)?)?, ring.connecting_matrix(&d.delta_p()))))
            .collect::<Result<_>>()?;
        let gamma = block_diag(p, blocks.iter().map(|b| &b.0));
        let conn = block_diag(p, blocks.iter().map(|b| &b.1));
        Self::from_parts(ring, twists.len(), gamma, Some(conn))
    }

    pub fn ring(&self) -> DifRing {
        self.ring
    }

    pub fn level(&self) -> u32 {
        self.ring.level.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `dim_{Q_p} = d·k·(p-1)p^{n-1}`.
    pub fn dim(&self) -> usize {
        self.rank * self.ring.dim()
    }

    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    pub fn connecting(&self) -> Option<&Matrix> {
        self.connecting.as_ref()
    }

    /// The same fiber with `γ` replaced by `γ^m`: the restriction to the
    /// index-`m` subgroup. The connecting map is dropped.
    pub fn restrict(&self, m: u32) -> TorsionFiber {
        let p = self.ring.level.p;
        let mut g = Matrix::identity(p, crate::padic::EXACT_PREC, self.dim());
        for _ in 0..m {
            g = g.mul(&self.gamma);
        }
        TorsionFiber { ring: self.ring, rank: self.rank, gamma: g, connecting: None }
    }

    pub(crate) fn gamma_minus_one(&self) -> Matrix {
        let p = self.ring.level.p;
        self.gamma.sub(&Matrix::identity(p, crate::padic::EXACT_PREC, self.dim()))
    }
}

fn block_diag<'a>(p: u32, blocks: impl Iterator<Item = &'a Matrix> + Clone) -> Matrix {
    let rows: usize = blocks.clone().map(|b| b.rows()).sum();
    let cols: usize = blocks.clone().map(|b| b.cols()).sum();
    let mut out = Matrix::zeros(p, crate::padic::EXACT_PREC, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberDims {
    pub dim_fix: usize,
    pub dim_coinv: usize,
}

/// `dim ker(γ - 1)` and `dim coker(γ - 1)` on the fiber.
pub fn fiber_cohomology(s: &TorsionFiber, margin: i32) -> Result<FiberDims> {
    let m = s.gamma_minus_one();
    Ok(FiberDims { dim_fix: linalg::kernel_dim(&m, margin)?, dim_coinv: linalg::cokernel_dim(&m, margin)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub n: u32,
    pub dim: usize,
    pub dims: FiberDims,
    /// `S^n/(γ-1) → S^{n+1}/(γ-1)` is injective; `None` at the top level.
    pub coinvariants_inject: Option<bool>,
    /// Valuation of `γ∘c - c∘γ` for the connecting map `c`, `None` if zero.
    pub equivariance_defect_val: Option<i32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionCohomology {
    pub levels: Vec<LevelReport>,
    pub h0: usize,
    pub h1: usize,
    pub stabilized_at: u32,
    pub euler_characteristic: i64,
}

/// Dimensions of `H^0` and `H^1` as the colimit over levels `1..=nmax`.
///
/// The colimit is declared once the dimensions agree from some level to
/// `nmax` and the transition maps inject; otherwise `NoStabilization`. A single
/// level is not enough evidence, so `nmax ≥ 2` is required.
pub fn torsion_cohomology(family: &[TorsionFiber], margin: i32) -> Result<TorsionCohomology> {
    if family.len() < 2 {
        return Err(Error::IncompatibleFamily("at least two levels are needed".into()));
    }
    let mut levels = Vec::with_capacity(family.len());
    for (idx, s) in family.iter().enumerate() {
        let dims = fiber_cohomology(s, margin)?;
        let (inject, defect) = match family.get(idx + 1) {
            Some(next) => {
                if next.level() != s.level() + 1 || next.rank != s.rank || next.ring.k != s.ring.k {
                    return Err(Error::IncompatibleFamily(format!("level {} does not follow level {}", next.level(), s.level())));
                }
                let c = s.connecting.as_ref().ok_or_else(|| Error::IncompatibleFamily("missing connecting map".into()))?;
                let defect = next.gamma.mul(c).sub(&c.mul(&s.gamma));
                let dval = defect_val(&defect);
                let a = next.gamma_minus_one();
                let gain = linalg::rank(&a.hcat(c), margin)? - linalg::rank(&a, margin)?;
                (Some(gain == dims.dim_coinv), dval)
            }
            None => (None, None),
        };
        levels.push(LevelReport { n: s.level(), dim: s.dim(), dims, coinvariants_inject: inject, equivariance_defect_val: defect });
    }
    let top = levels.last().unwrap().dims;
    let mut stab = levels.len() - 1;
    while stab > 0 && levels[stab - 1].dims == top && levels[stab - 1].coinvariants_inject == Some(true) {
        stab -= 1;
    }
    if stab == levels.len() - 1 {
        return Err(Error::NoStabilization(levels[stab].n));
    }
    Ok(TorsionCohomology {
        h0: top.dim_fix,
        h1: top.dim_coinv,
        stabilized_at: levels[stab].n,
        euler_characteristic: top.dim_fix as i64 - top.dim_coinv as i64,
        levels,
    })
}

fn defect_val(m: &Matrix) -> Option<i32> {
    let mut v: Option<i32> = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let c = m.get(i, j);
            if !c.is_zero() {
                v = Some(v.map_or(c.val(), |x| x.min(c.val())));
            }
        }
    }
    v
}

/// The fibers of `⊕_j R(δ_j)/t^k` at levels `1..=nmax`.
pub fn twisted_family(nmax: u32, k: usize, twists: &[Character], g: &GammaGenerator, prec: i32) -> Result<Vec<TorsionFiber>> {
    (1..=nmax).map(|n| TorsionFiber::twisted(n, k, twists, g, prec)).collect()
}

#[derive(Clone, Debug)]
pub struct ShiftPreimage {
    pub x: Vec<Vec<PadicScalar>>,
    /// Worst valuation of `(φ-1)x - y` over all levels, `None` if exact.
    pub residual_val: Option<i32>,
}

/// Solves `(φ-1)x = y` in the product model over the given levels, where
/// `(φx)_{n+1} = c(x_n)` and `φx` vanishes at the lowest level:
/// `x_n = -Σ_{i≤n} c^{n-i}(y_i)`.
pub fn phi_shift_preimage(family: &[TorsionFiber], y: &[Vec<PadicScalar>]) -> Result<ShiftPreimage> {
    if family.len() != y.len() {
        return Err(Error::IncompatibleFamily(format!("{} fibers, {} targets", family.len(), y.len())));
    }
    for (s, v) in family.iter().zip(y) {
        if v.len() != s.dim() {
            return Err(Error::IncompatibleFamily(format!("target at level {} has length {}", s.level(), v.len())));
        }
    }
    let conn = |i: usize| -> Result<&Matrix> {
        family[i].connecting.as_ref().ok_or_else(|| Error::IncompatibleFamily("missing connecting map".into()))
    };
    let mut x: Vec<Vec<PadicScalar>> = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        let carried = if i == 0 { vec![PadicScalar::exact_zero(family[0].ring.level.p); y[0].len()] } else { conn(i - 1)?.mul_vec(&x[i - 1]) };
        x.push(carried.iter().zip(&y[i]).map(|(a, b)| *a - *b).collect());
    }
    // re-substitute
    let mut worst: Option<i32> = None;
    for i in 0..y.len() {
        let phix = if i == 0 { vec![PadicScalar::exact_zero(family[0].ring.level.p); y[0].len()] } else { conn(i - 1)?.mul_vec(&x[i - 1]) };
        for ((a, b), c) in phix.iter().zip(&x[i]).zip(&y[i]) {
            let r = *a - *b - *c;
            if !r.is_zero() {
                worst = Some(worst.map_or(r.val(), |w| w.min(r.val())));
            }
        }
    }
    Ok(ShiftPreimage { x, residual_val: worst })
}

/// Gauss-sum vectors `G(ω^j) t^i` at level 1, for `j < p-1`, `i < k`.
pub fn gauss_basis(ring: &DifRing) -> Result<Vec<(i64, usize, DifElem)>> {
    let p = ring.level.p as i64;
    let mut out = Vec::new();
    for j in 0..p - 1 {
        let g = ring.level.gauss_sum(j)?;
        for i in 0..ring.k {
            out.push((j, i, ring.t_monomial(g.clone(), i)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::max_relative_precision;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const N: i32 = 12;

    fn teich(p: u32, j: i64) -> Character {
        let one = PadicScalar::one(p, max_relative_precision(p));
        Character::new(one, j, one).unwrap()
    }

    fn dims(p: u32, n: u32, k: usize, d: &Character) -> FiberDims {
        let g = GammaGenerator::default_for(p);
        fiber_cohomology(&TorsionFiber::twisted(n, k, &[*d], &g, N).unwrap(), 3).unwrap()
    }

    #[test]
    fn fiber_examples() {
        for p in [3u32, 5, 7] {
            let triv = Character::trivial(p, N);
            assert_eq!(dims(p, 1, 1, &triv), FiberDims { dim_fix: 1, dim_coinv: 1 });
            assert_eq!(dims(p, 1, 2, &triv), FiberDims { dim_fix: 1, dim_coinv: 1 });
            // x twists t into the fixed part: R(x^{-1})/t^2 ∋ t e
            let xinv = Character::x_pow(p, N, -1);
            assert_eq!(dims(p, 1, 2, &xinv).dim_fix, 1);
            assert_eq!(dims(p, 1, 1, &Character::omega(p, N)).dim_fix, 0);
            // a Teichmüller twist is met by one Gauss sum
            assert_eq!(dims(p, 1, 1, &teich(p, 1)).dim_fix, 1);
        }
    }

    #[test]
    fn fiber_dimension() {
        let g = GammaGenerator::default_for(5);
        let twists = [Character::trivial(5, N), Character::x(5, N)];
        let s = TorsionFiber::twisted(2, 3, &twists, &g, N).unwrap();
        assert_eq!(s.dim(), 2 * 3 * 4 * 5);
        assert_eq!(s.gamma().rows(), s.dim());
    }

    #[test]
    fn gauss_vectors_are_eigenvectors_and_span() {
        for p in [3u32, 5, 7] {
            let g = GammaGenerator::default_for(p);
            let ring = DifRing::new(CyclotomicLevel::new(p, 1, N).unwrap(), 3).unwrap();
            let chi = g.chi();
            let m = ring.gamma_matrix(&chi, &PadicScalar::one(p, N)).unwrap();
            let basis = gauss_basis(&ring).unwrap();
            for (j, i, v) in &basis {
                let w = ring.flatten(v);
                let eig = PadicScalar::teichmuller(p, chi.reduce(1).integer_rep().unwrap() as i64, N)
                    .unwrap()
                    .pow(-*j)
                    .unwrap()
                    * chi.pow(*i as i64).unwrap();
                let lhs = m.mul_vec(&w);
                assert!(lhs.iter().zip(&w).all(|(a, b)| (*a - eig * *b).is_zero()), "p={p} j={j} i={i}");
            }
            let cols: Vec<_> = basis.iter().map(|b| ring.flatten(&b.2)).collect();
            assert_eq!(linalg::rank(&Matrix::from_columns(&cols), 3).unwrap(), ring.dim());
        }
    }

    #[test]
    fn cohomology_stabilizes() {
        let p = 3;
        let g = GammaGenerator::default_for(p);
        for (k, d, h) in [(1, Character::trivial(p, N), 1), (2, Character::trivial(p, N), 1), (1, Character::omega(p, N), 0), (2, teich(p, 1), 1)] {
            let fam = twisted_family(3, k, &[d], &g, N).unwrap();
            let c = torsion_cohomology(&fam, 3).unwrap();
            assert_eq!((c.h0, c.h1, c.stabilized_at), (h, h, 1), "{d} k={k}");
            assert_eq!(c.euler_characteristic, 0);
            assert!(c.levels.iter().all(|l| l.equivariance_defect_val.is_none()));
        }
    }

    #[test]
    fn shift_preimage() {
        let p = 5;
        let g = GammaGenerator::default_for(p);
        let fam = twisted_family(3, 1, &[Character::x(p, N)], &g, N).unwrap();
        let zeros: Vec<_> = fam.iter().map(|s| vec![PadicScalar::zero(p, N); s.dim()]).collect();
        let sol = phi_shift_preimage(&fam, &zeros).unwrap();
        assert!(sol.x.iter().flatten().all(|c| c.is_zero()));
        // single target at level 2
        let mut y = zeros.clone();
        y[1][1] = PadicScalar::from_i64(p, 3, N);
        let sol = phi_shift_preimage(&fam, &y).unwrap();
        assert!(sol.residual_val.is_none());
        assert!(sol.x[0].iter().all(|c| c.is_zero()));
        assert!((sol.x[1][1] + y[1][1]).is_zero());
        let carried = fam[1].connecting().unwrap().mul_vec(&y[1]);
        assert!(sol.x[2].iter().zip(&carried).all(|(a, b)| (*a + *b).is_zero()));
        // random targets up to level 4
        let fam = twisted_family(4, 1, &[Character::trivial(3, N)], &GammaGenerator::default_for(3), N).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y: Vec<_> = fam.iter().map(|s| (0..s.dim()).map(|_| PadicScalar::from_i64(3, rng.gen_range(-50..50), N)).collect()).collect();
        assert!(phi_shift_preimage(&fam, &y).unwrap().residual_val.is_none());
    }
}
