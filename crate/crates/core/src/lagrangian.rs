//! Admissibility of `(A, B)` frames for hyperplane families `AX·x + BX·p = X` in `n` dimensions,
//! and the block form of the symplectic conditions.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metaplectic::{column_conditions, from_blocks, row_conditions, standard_j, SymplecticReport};

/// A pair of real `n x n` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePair {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl FramePair {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.shape() != (n, n) || b.shape() != (n, n) {
            return Err(Error::Domain(format!(
                "frame needs two square matrices of one size, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(Self { a, b })
    }

    /// The top block row `(A, B)` of a `2n x 2n` matrix.
    pub fn from_top_rows(s: &DMatrix<f64>) -> Result<Self> {
        let (a, b, _, _) = crate::metaplectic::blocks(s)?;
        Self::new(a, b)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// `(MA, MB)`.
    pub fn left_multiply(&self, m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m * &self.a, m * &self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangianReport {
    pub lagrangian: bool,
    /// `max |ABᵀ − BAᵀ|` relative to `max(|A|, |B|)²`.
    pub symmetry_residual: f64,
    /// Singular values of `[A B]`, largest first.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `max |AᵀB − BAᵀ|` relative to the same scale: the literal transposition of the condition,
    /// reported but not used for the verdict.
    pub alternative_residual: f64,
    pub notes: Vec<String>,
}

/// `ABᵀ` symmetric within `tol` (relative) and `rank [A B] = n` (smallest singular value above
/// `tol` times the largest).
pub fn is_lagrangian_frame(f: &FramePair, tol: f64) -> LagrangianReport {
    let n = f.n();
    let scale = f.a.amax().max(f.b.amax()).max(f64::MIN_POSITIVE).powi(2);
    let abt = &f.a * f.b.transpose();
    let symmetry_residual = (&abt - abt.transpose()).amax() / scale;
    let alternative_residual = (f.a.transpose() * &f.b - &f.b * f.a.transpose()).amax() / scale;

    let mut stacked = DMatrix::zeros(n, 2 * n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&f.a);
    stacked.view_mut((0, n), (n, n)).copy_from(&f.b);
    let mut singular_values: Vec<f64> = stacked.singular_values().iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let top = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|s| **s > tol * top && **s > 0.0).count();

    let mut notes = Vec::new();
    let symmetric = symmetry_residual <= tol;
    if !symmetric {
        notes.push(format!("A B^T is not symmetric (relative residual {symmetry_residual:.3e})"));
    }
    if rank < n {
        notes.push(format!("[A B] has rank {rank} < {n}"));
    }
    if symmetric != (alternative_residual <= tol) {
        notes.push(format!(
            "the reading A^T B = B A^T gives the opposite verdict (relative residual {alternative_residual:.3e})"
        ));
    }
    LagrangianReport {
        lagrangian: symmetric && rank == n,
        symmetry_residual,
        singular_values,
        rank,
        alternative_residual,
        notes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticNdReport {
    pub symplectic: bool,
    /// `AᵀC`, `BᵀD` symmetric and `AᵀD − CᵀB = I`.
    pub columns: SymplecticReport,
    /// `ABᵀ`, `CDᵀ` symmetric and `ADᵀ − BCᵀ = I`.
    pub rows: SymplecticReport,
    /// Whether the two condition sets reached the same verdict.
    pub consistent: bool,
}

/// Both block-condition sets, with `tol` scaled by `max(1, max|S_ij|²)`.
pub fn is_symplectic_nd(s: &DMatrix<f64>, tol: f64) -> Result<SymplecticNdReport> {
    let scaled = tol * s.amax().powi(2).max(1.0);
    let columns = column_conditions(s, scaled)?;
    let rows = row_conditions(s, scaled)?;
    let consistent = columns.symplectic == rows.symplectic;
    Ok(SymplecticNdReport {
        symplectic: columns.symplectic && rows.symplectic,
        columns,
        rows,
        consistent,
    })
}

fn random_symmetric<R: Rng>(n: usize, rng: &mut R, amp: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-amp..amp));
    (&m + m.transpose()) * 0.5
}

/// Product of `factors` random generators of `Sp(n)`: lower and upper shears by symmetric
/// matrices, `diag(M, M⁻ᵀ)` with `M` near the identity, and `J`.
pub fn random_symplectic<R: Rng>(n: usize, factors: usize, rng: &mut R) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(n, n);
    let zero = DMatrix::<f64>::zeros(n, n);
    let mut s = DMatrix::<f64>::identity(2 * n, 2 * n);
    for _ in 0..factors {
        let g = match rng.random_range(0..4) {
            0 => from_blocks(&id, &zero, &random_symmetric(n, rng, 1.0), &id),
            1 => from_blocks(&id, &random_symmetric(n, rng, 1.0), &zero, &id),
            2 => {
                let m = &id + DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.4..0.4));
                let Some(inv) = m.clone().try_inverse() else {
                    continue;
                };
                from_blocks(&m, &zero, &zero, &inv.transpose())
            }
            _ => standard_j(n),
        };
        s = g * s;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(n: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, n, v)
    }

    #[test]
    fn coordinate_frames() {
        let id = DMatrix::identity(2, 2);
        let zero = DMatrix::zeros(2, 2);
        assert!(is_lagrangian_frame(&FramePair::new(id.clone(), zero.clone()).unwrap(), 1e-12).lagrangian);
        assert!(is_lagrangian_frame(&FramePair::new(zero.clone(), id.clone()).unwrap(), 1e-12).lagrangian);
        let r = is_lagrangian_frame(&FramePair::new(zero.clone(), zero).unwrap(), 1e-12);
        assert!(!r.lagrangian && r.rank == 0);
    }

    #[test]
    fn non_symmetric_product_is_rejected() {
        let f = FramePair::new(DMatrix::identity(2, 2), m(2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        let r = is_lagrangian_frame(&f, 1e-12);
        assert!(!r.lagrangian);
        assert_eq!(r.rank, 2);
        assert!((r.symmetry_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alternative_reading_is_surfaced() {
        // A = Σ B^{-T} with Σ symmetric makes A B^T = Σ, while A^T B = [[3,1],[0,1]] differs from B A^T.
        let a = m(2, &[2.0, -1.0, 1.0, 1.0]);
        let b = m(2, &[1.0, 0.0, 1.0, 1.0]);
        let r = is_lagrangian_frame(&FramePair::new(a, b).unwrap(), 1e-12);
        assert!(r.lagrangian);
        assert!(r.alternative_residual > 1e-3);
        assert!(r.notes.iter().any(|n| n.contains("opposite verdict")));
    }

    #[test]
    fn shape_mismatch() {
        assert!(FramePair::new(DMatrix::identity(2, 2), DMatrix::identity(3, 3)).is_err());
        assert!(is_symplectic_nd(&DMatrix::identity(3, 3), 1e-12).is_err());
    }

    #[test]
    fn symplectic_examples() {
        assert!(is_symplectic_nd(&standard_j(2), 1e-12).unwrap().symplectic);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let (c2, s2) = (1.1f64.cos(), 1.1f64.sin());
        // Rotation in the (x1, p1) plane and in the (x2, p2) plane, in (x1, x2, p1, p2) order.
        let rot = DMatrix::from_row_slice(
            4,
            4,
            &[c, 0.0, s, 0.0, 0.0, c2, 0.0, s2, -s, 0.0, c, 0.0, 0.0, -s2, 0.0, c2],
        );
        let r = is_symplectic_nd(&rot, 1e-12).unwrap();
        assert!(r.symplectic && r.consistent);
        let j = standard_j(2);
        assert!((&rot * &j * rot.transpose() - &j).amax() < 1e-15);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0, 1.0, 1.0]));
        let r = is_symplectic_nd(&d, 1e-12).unwrap();
        assert!(!r.symplectic);
        assert!(r.rows.violations.iter().any(|v| v.contains("A D^T - B C^T")));
    }

    #[test]
    fn random_products_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            for _ in 0..20 {
                let s = random_symplectic(n, 5, &mut rng);
                let j = standard_j(n);
                let residual = (&s * &j * s.transpose() - &j).amax() / s.amax().powi(2).max(1.0);
                assert!(residual < 1e-12);
                assert!(is_symplectic_nd(&s, 1e-10).unwrap().symplectic);
            }
        }
    }
}
