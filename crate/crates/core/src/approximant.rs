//! Evaluation, roots, meshes and error sweeps shared by both representations.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baseline::RationalApproximant;
use crate::error::{PadeError, Result};
use crate::numerics;
use crate::pencil::PoleResidueForm;

/// Denominator magnitudes at or below this count as a pole hit.
pub const POLE_HIT_TOL: f64 = 1e-300;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub trait Evaluate {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

impl Evaluate for RationalApproximant {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_rational(self, z)
    }
}

impl Evaluate for PoleResidueForm {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_pole_residue(self, z)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

pub fn eval_rational(ra: &RationalApproximant, z: Complex64) -> Result<Complex64> {
    let den = horner(&ra.denom, z);
    if den.norm() <= POLE_HIT_TOL {
        return Err(PadeError::PoleHit(z));
    }
    Ok(horner(&ra.numer, z) / den)
}

/// `head(z) + z^shift Σ e_j p_j / (p_j − z)`; terms with `p_j = 0` vanish.
pub fn eval_pole_residue(prf: &PoleResidueForm, z: Complex64) -> Result<Complex64> {
    let mut tail = ZERO;
    for &(p, e) in &prf.terms {
        if p.norm() == 0.0 {
            continue;
        }
        let gap = p - z;
        if gap.norm() <= POLE_HIT_TOL {
            return Err(PadeError::PoleHit(z));
        }
        tail += e * p / gap;
    }
    Ok(horner(&prf.head, z) + z.powu(prf.shift as u32) * tail)
}

/// `(poles, zeros)` as denominator and numerator roots.
pub fn poles_and_zeros(ra: &RationalApproximant) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let zeros = numerics::polynomial_roots(&ra.numer)?;
    let poles = numerics::polynomial_roots(&ra.denom)?;
    Ok((poles, zeros))
}

/// Lattice points `(i h, j h)` in the closed unit disk, `i` outer and `j` inner.
pub fn unit_disk_mesh(spacing: f64) -> Vec<Complex64> {
    assert!(spacing > 0.0 && spacing <= 1.0, "mesh spacing must lie in (0, 1]");
    let n = (1.0 / spacing + 1e-9).floor() as i64;
    let mut points = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let z = Complex64::new(i as f64 * spacing, j as f64 * spacing);
            if z.norm_sqr() <= 1.0 + 1e-12 {
                points.push(z);
            }
        }
    }
    points
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points geometrically spaced from `a` to `b` (both positive).
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

pub fn real_points(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSweep {
    pub points: Vec<Complex64>,
    /// `+∞` where the approximant could not be evaluated.
    pub errors: Vec<f64>,
    pub flagged: Vec<bool>,
    pub max_error: f64,
    pub argmax_point: Complex64,
}

impl ErrorSweep {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// Largest error over points that evaluated cleanly.
    pub fn max_unflagged(&self) -> f64 {
        self.errors
            .iter()
            .zip(&self.flagged)
            .filter(|(_, &f)| !f)
            .map(|(&e, _)| e)
            .fold(0.0, f64::max)
    }

    pub fn median_unflagged(&self) -> f64 {
        let mut v: Vec<f64> = self
            .errors
            .iter()
            .zip(&self.flagged)
            .filter(|(_, &f)| !f)
            .map(|(&e, _)| e)
            .collect();
        if v.is_empty() {
            return f64::NAN;
        }
        v.sort_by(f64::total_cmp);
        let mid = v.len() / 2;
        if v.len() % 2 == 0 {
            0.5 * (v[mid - 1] + v[mid])
        } else {
            v[mid]
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,error,flagged\n");
        for ((z, e), f) in self.points.iter().zip(&self.errors).zip(&self.flagged) {
            let _ = writeln!(out, "{:e},{:e},{:e},{}", z.re, z.im, e, f);
        }
        out
    }
}

/// `|approx(z) − exact(z)|` at every point; evaluation failures are recorded
/// as `+∞` and flagged rather than aborting the sweep.
pub fn error_sweep<A, F>(approx: &A, exact: F, points: &[Complex64]) -> ErrorSweep
where
    A: Evaluate + ?Sized,
    F: Fn(Complex64) -> Complex64,
{
    let mut errors = Vec::with_capacity(points.len());
    let mut flagged = Vec::with_capacity(points.len());
    for &z in points {
        let err = approx.eval(z).map(|v| (v - exact(z)).norm());
        match err {
            Ok(e) if e.is_finite() => {
                errors.push(e);
                flagged.push(false);
            }
            _ => {
                errors.push(f64::INFINITY);
                flagged.push(true);
            }
        }
    }
    let (mut max_error, mut argmax_point) = (0.0, points.first().copied().unwrap_or_default());
    for (&z, &e) in points.iter().zip(&errors) {
        if e > max_error {
            max_error = e;
            argmax_point = z;
        }
    }
    ErrorSweep {
        points: points.to_vec(),
        errors,
        flagged,
        max_error,
        argmax_point,
    }
}
