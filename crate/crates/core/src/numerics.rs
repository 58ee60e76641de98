//! Dense complex kernels: SVD, eigenvalues, QR least squares, LU, and
//! companion-matrix polynomial roots.
//!
//! Factorizations are delegated to `faer`; everything else in the crate goes
//! through the functions here.

use faer::linalg::solvers::{PartialPivLu, Qr, Svd};
use faer::Mat;
use num_complex::Complex64;

use crate::error::{PadeError, Result};

pub type CMat = Mat<Complex64>;

/// Relative threshold on `|R_ii|` below which [`qr_solve`] reports rank deficiency.
pub const QR_RANK_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Full singular value decomposition `A = U Σ Vᴴ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMat,
    /// Nonincreasing, nonnegative; length `min(rows, cols)`.
    pub sigma: Vec<f64>,
    /// Conjugate transpose of `V`; row `i` pairs with `sigma[i]` while `i < sigma.len()`.
    pub v_h: CMat,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMat {
        let (m, n) = (self.u.nrows(), self.v_h.ncols());
        let mut out = CMat::zeros(m, n);
        for (r, &s) in self.sigma.iter().enumerate() {
            for j in 0..n {
                let vj = self.v_h[(r, j)] * s;
                for i in 0..m {
                    out[(i, j)] += self.u[(i, r)] * vj;
                }
            }
        }
        out
    }

    /// Column `j` of `V`: the conjugate of row `j` of `Vᴴ`.
    pub fn v_column(&self, j: usize) -> Vec<Complex64> {
        (0..self.v_h.ncols()).map(|i| self.v_h[(j, i)].conj()).collect()
    }
}

fn check_finite(a: &CMat) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(PadeError::InvalidInput("empty matrix".into()));
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(PadeError::NonFinite);
            }
        }
    }
    Ok(())
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn svd(a: &CMat) -> Result<SvdResult> {
    check_finite(a)?;
    let dec = Svd::new(a.as_ref())
        .map_err(|e| PadeError::ConvergenceFailure(format!("svd: {e:?}")))?;
    let sigma: Vec<f64> = dec.S().column_vector().iter().map(|s| s.re).collect();
    let v = dec.V();
    let v_h = CMat::from_fn(v.ncols(), v.nrows(), |i, j| v[(j, i)].conj());
    Ok(SvdResult {
        u: dec.U().to_owned(),
        sigma,
        v_h,
    })
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    check_finite(a)?;
    a.singular_values()
        .map_err(|e| PadeError::ConvergenceFailure(format!("singular values: {e:?}")))
}

/// All eigenvalues of a square matrix, with multiplicity.
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(PadeError::InvalidInput(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite(a)?;
    a.eigenvalues()
        .map_err(|e| PadeError::ConvergenceFailure(format!("eigenvalues: {e:?}")))
}

/// Least-squares solution of `A X = B` via `X = R⁻¹ Qᴴ B`.
pub fn qr_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    qr_solve_with_tol(a, b, QR_RANK_TOL)
}

/// [`qr_solve`] with an explicit rank threshold on `|R_ii| / max_j |R_jj|`.
pub fn qr_solve_with_tol(a: &CMat, b: &CMat, rank_tol: f64) -> Result<CMat> {
    let (rows, cols) = (a.nrows(), a.ncols());
    if rows < cols {
        return Err(PadeError::InvalidInput(format!(
            "least squares needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if b.nrows() != rows {
        return Err(PadeError::InvalidInput(format!(
            "right-hand side has {} rows, matrix has {rows}",
            b.nrows()
        )));
    }
    check_finite(a)?;
    check_finite(b)?;

    let qr = Qr::new(a.as_ref());
    let r = qr.thin_R();
    let q = qr.compute_thin_Q();

    let diag: Vec<f64> = (0..cols).map(|i| r[(i, i)].norm()).collect();
    let rmax = diag.iter().cloned().fold(0.0, f64::max);
    for (i, &d) in diag.iter().enumerate() {
        let ratio = if rmax > 0.0 { d / rmax } else { 0.0 };
        if !(ratio >= rank_tol) || d == 0.0 {
            return Err(PadeError::RankDeficient { index: i, ratio });
        }
    }

    // Qᴴ B, then back-substitute each column through R
    let mut x = CMat::zeros(cols, b.ncols());
    for c in 0..b.ncols() {
        let mut y: Vec<Complex64> = (0..cols)
            .map(|i| (0..rows).map(|k| q[(k, i)].conj() * b[(k, c)]).sum())
            .collect();
        for i in (0..cols).rev() {
            let mut acc = y[i];
            for j in i + 1..cols {
                acc -= r[(i, j)] * y[j];
            }
            y[i] = acc / r[(i, i)];
        }
        for i in 0..cols {
            x[(i, c)] = y[i];
        }
    }
    Ok(x)
}

/// Outcome of a square solve by LU with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuSolve {
    pub x: CMat,
    /// `min |U_ii| / max |A_ij|`.
    pub min_pivot_ratio: f64,
}

pub fn lu_solve(a: &CMat, b: &CMat) -> Result<LuSolve> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(PadeError::InvalidInput("lu_solve needs a square system".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    let amax = max_abs(a);
    let lu = PartialPivLu::new(a.as_ref());
    let u = lu.U();
    let min_pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let min_pivot_ratio = if amax > 0.0 { min_pivot / amax } else { 0.0 };
    if min_pivot == 0.0 {
        return Ok(LuSolve {
            x: CMat::from_fn(n, b.ncols(), |_, _| Complex64::new(f64::NAN, f64::NAN)),
            min_pivot_ratio,
        });
    }
    use faer::linalg::solvers::Solve;
    let x = lu.solve(b.as_ref());
    Ok(LuSolve { x, min_pivot_ratio })
}

/// Roots of `Σ coeffs[i] z^i` (low order first) from the companion matrix.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some(top) = coeffs.iter().rposition(|c| *c != ZERO) else {
        return Err(PadeError::AllZero);
    };
    if coeffs[..=top].iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(PadeError::NonFinite);
    }
    if top == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[top];
    let companion = CMat::from_fn(top, top, |i, j| {
        if j == top - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    let mut roots = eigenvalues(&companion)?;
    sort_by_magnitude(&mut roots);
    Ok(roots)
}

/// Ascending magnitude, ties broken by argument.
pub fn sort_by_magnitude(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then_with(|| a.arg().total_cmp(&b.arg()))
    });
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}
