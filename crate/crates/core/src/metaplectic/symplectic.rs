use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The standard symplectic matrix `[[0, I], [-I, 0]]` of size `2n`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Splits a `2n x 2n` matrix into its `n x n` blocks `(A, B, C, D)`.
pub fn blocks(s: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let (r, c) = s.shape();
    if r != c || r % 2 != 0 || r == 0 {
        return Err(Error::Domain(format!(
            "expected a square matrix of even dimension, got {r}x{c}"
        )));
    }
    let n = r / 2;
    Ok((
        s.view((0, 0), (n, n)).into_owned(),
        s.view((0, n), (n, n)).into_owned(),
        s.view((n, 0), (n, n)).into_owned(),
        s.view((n, n), (n, n)).into_owned(),
    ))
}

pub fn from_blocks(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(a);
    s.view_mut((0, n), (n, n)).copy_from(b);
    s.view_mut((n, 0), (n, n)).copy_from(c);
    s.view_mut((n, n), (n, n)).copy_from(d);
    s
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Outcome of a symplecticity test: each entry names a violated block condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticReport {
    pub symplectic: bool,
    pub violations: Vec<String>,
    /// Largest residual among the checked conditions.
    pub max_residual: f64,
}

/// Checks `AᵀC` and `BᵀD` symmetric and `AᵀD − CᵀB = I`.
pub fn column_conditions(s: &DMatrix<f64>, tol: f64) -> Result<SymplecticReport> {
    let (a, b, c, d) = blocks(s)?;
    let n = a.nrows();
    let checks = [
        ("A^T C symmetric", asymmetry(&(a.transpose() * &c))),
        ("B^T D symmetric", asymmetry(&(b.transpose() * &d))),
        (
            "A^T D - C^T B = I",
            (a.transpose() * &d - c.transpose() * &b - DMatrix::identity(n, n)).amax(),
        ),
    ];
    Ok(report(&checks, tol))
}

/// Checks `ABᵀ` and `CDᵀ` symmetric and `ADᵀ − BCᵀ = I`.
pub fn row_conditions(s: &DMatrix<f64>, tol: f64) -> Result<SymplecticReport> {
    let (a, b, c, d) = blocks(s)?;
    let n = a.nrows();
    let checks = [
        ("A B^T symmetric", asymmetry(&(&a * b.transpose()))),
        ("C D^T symmetric", asymmetry(&(&c * d.transpose()))),
        (
            "A D^T - B C^T = I",
            (&a * d.transpose() - &b * c.transpose() - DMatrix::identity(n, n)).amax(),
        ),
    ];
    Ok(report(&checks, tol))
}

fn report(checks: &[(&str, f64)], tol: f64) -> SymplecticReport {
    let violations: Vec<String> = checks
        .iter()
        .filter(|(_, r)| !(*r <= tol))
        .map(|(name, r)| format!("{name} violated (residual {r:.3e})"))
        .collect();
    SymplecticReport {
        symplectic: violations.is_empty(),
        violations,
        max_residual: checks.iter().map(|(_, r)| *r).fold(0.0, f64::max),
    }
}

/// Symplecticity test through the column block conditions; odd dimensions are a domain error.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<SymplecticReport> {
    column_conditions(s, tol)
}

/// A validated element of `Sp(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    s: DMatrix<f64>,
}

pub const SYMPLECTIC_TOL: f64 = 1e-12;

impl SymplecticMatrix {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(s, SYMPLECTIC_TOL)
    }

    pub fn with_tolerance(s: DMatrix<f64>, tol: f64) -> Result<Self> {
        let scale = s.amax().max(1.0);
        let rep = is_symplectic(&s, tol * scale * scale)?;
        if !rep.symplectic {
            return Err(Error::Domain(format!(
                "matrix is not symplectic: {}",
                rep.violations.join("; ")
            )));
        }
        Ok(Self { s })
    }

    /// 2x2 matrix `[[a, b], [c, d]]`.
    pub fn from_2x2(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(2, 2, &[a, b, c, d]))
    }

    pub fn n(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn blocks(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        blocks(&self.s).expect("validated on construction")
    }

    /// `S⁻¹ = −J Sᵀ J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = standard_j(self.n());
        SymplecticMatrix {
            s: -(&j * self.s.transpose() * &j),
        }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n() != other.n() {
            return Err(Error::Shape("symplectic matrices of different dimension".into()));
        }
        Ok(SymplecticMatrix {
            s: &self.s * &other.s,
        })
    }

    /// Applies the matrix to a phase-space point of the `n = 1` plane.
    pub fn apply2(&self, x: f64, p: f64) -> (f64, f64) {
        debug_assert_eq!(self.n(), 1);
        (
            self.s[(0, 0)] * x + self.s[(0, 1)] * p,
            self.s[(1, 0)] * x + self.s[(1, 1)] * p,
        )
    }

    /// Row-major entries, the JSON form of the matrix.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.s.transpose().iter().copied().collect()
    }
}

/// Direction `(μ, ν) ≠ (0, 0)` of a tomographic measurement, with `λ = √(μ² + ν²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    mu: f64,
    nu: f64,
    lambda: f64,
}

impl RotationParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && nu.is_finite()) {
            return Err(Error::Domain(format!("(mu, nu) must be finite, got ({mu}, {nu})")));
        }
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::Domain("(mu, nu) = (0, 0) defines no direction".into()));
        }
        Ok(Self {
            mu,
            nu,
            lambda: mu.hypot(nu),
        })
    }

    /// Unit direction at angle `θ`: `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            mu: c,
            nu: s,
            lambda: 1.0,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `atan2(ν, μ)` in `(-π, π]`.
    pub fn theta(&self) -> f64 {
        self.nu.atan2(self.mu)
    }

    /// The rotation `[[μ/λ, ν/λ], [−ν/λ, μ/λ]]`.
    pub fn rotation(&self) -> SymplecticMatrix {
        let (c, s) = (self.mu / self.lambda, self.nu / self.lambda);
        SymplecticMatrix {
            s: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        }
    }
}

pub fn rotation_from_mu_nu(mu: f64, nu: f64) -> Result<SymplecticMatrix> {
    Ok(RotationParams::new(mu, nu)?.rotation())
}

/// Coefficients of the generating form `𝒜(x,x′) = ½ Px·x − Lx·x′ + ½ Qx′·x′`
/// with `P = DB⁻¹`, `L = B⁻¹`, `Q = B⁻¹A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingForm {
    pub p: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl GeneratingForm {
    pub fn eval(&self, x: &[f64], xp: &[f64]) -> f64 {
        let x = nalgebra::DVector::from_column_slice(x);
        let xp = nalgebra::DVector::from_column_slice(xp);
        0.5 * (&self.p * &x).dot(&x) - (&self.l * &x).dot(&xp) + 0.5 * (&self.q * &xp).dot(&xp)
    }

    /// `(∇ₓ𝒜, ∇ₓ′𝒜)` at `(x, x′)`.
    pub fn gradients(&self, x: &[f64], xp: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x = nalgebra::DVector::from_column_slice(x);
        let xp = nalgebra::DVector::from_column_slice(xp);
        let gx = &self.p * &x - self.l.transpose() * &xp;
        let gxp = -(&self.l * &x) + &self.q * &xp;
        (gx.iter().copied().collect(), gxp.iter().copied().collect())
    }

    /// Rebuilds the free symplectic matrix: `B = L⁻¹`, `A = L⁻¹Q`, `D = PL⁻¹`, `C = PL⁻¹Q − Lᵀ`.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        let b = self
            .l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("L is singular".into()))?;
        let a = &b * &self.q;
        let d = &self.p * &b;
        let c = &self.p * &b * &self.q - self.l.transpose();
        Ok(from_blocks(&a, &b, &c, &d))
    }
}

/// A symplectic matrix whose `B` block is invertible, with its generating form and a Maslov
/// index choice `m` (mod 4) whose parity follows the sign of `det B⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSymplectic {
    base: SymplecticMatrix,
    form: GeneratingForm,
    maslov: u8,
}

impl FreeSymplectic {
    pub fn new(base: SymplecticMatrix) -> Result<Self> {
        let (a, b, _c, d) = base.blocks();
        let n = b.nrows();
        let scale = base.matrix().amax().max(1.0);
        let det_b = b.determinant();
        if !(det_b.abs() > 1e-12 * scale.powi(n as i32)) {
            return Err(Error::NotFree);
        }
        let l = b.try_inverse().ok_or(Error::NotFree)?;
        let p = &d * &l;
        let q = &l * &a;
        let sym_tol = 1e-10 * p.amax().max(q.amax()).max(1.0);
        if asymmetry(&p) > sym_tol || asymmetry(&q) > sym_tol {
            return Err(Error::Consistency(
                "generating-form coefficients P, Q are not symmetric".into(),
            ));
        }
        let maslov = if det_b > 0.0 { 0 } else { 1 };
        Ok(Self {
            base,
            form: GeneratingForm { p, l, q },
            maslov,
        })
    }

    /// Selects the other sheet of the cover (`m` and `m + 2` differ by a sign).
    pub fn with_maslov(mut self, m: u8) -> Result<Self> {
        let m = m % 4;
        if m % 2 != self.maslov % 2 {
            return Err(Error::Domain(format!(
                "Maslov index {m} has the wrong parity for det B^-1 of this sign"
            )));
        }
        self.maslov = m;
        Ok(self)
    }

    pub fn base(&self) -> &SymplecticMatrix {
        &self.base
    }

    pub fn maslov(&self) -> u8 {
        self.maslov
    }

    pub fn form(&self) -> &GeneratingForm {
        &self.form
    }
}

pub fn generating_form(s: &FreeSymplectic) -> GeneratingForm {
    s.form.clone()
}
