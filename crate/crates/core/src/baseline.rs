//! The two classical constructions: the direct method, which pins `b_0 = 1`
//! and solves a square Toeplitz system, and the SVD method, which takes the
//! null vector of the `m × (m+1)` coefficient matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};
use crate::numerics::{self, CMat};
use crate::series::PowerSeries;

/// `U_ii` below this fraction of `max |A|` counts as an exact zero pivot.
/// Ill-conditioned but nonsingular systems are still solved — that is the
/// behaviour the direct method is supposed to exhibit.
pub const DM_PIVOT_TOL: f64 = f64::EPSILON * f64::EPSILON;

/// Shape of an `[m+k / m]` approximant, plus the working pole count `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conformation {
    pub m: usize,
    pub k: i64,
    pub l: usize,
}

impl Conformation {
    pub fn new(m: usize, k: i64) -> Result<Self> {
        if (m as i64) + k < 0 {
            return Err(PadeError::InvalidConformation(format!(
                "numerator degree m + k = {} is negative",
                m as i64 + k
            )));
        }
        Ok(Self { m, k, l: m })
    }

    /// Diagonal-family shorthand: `[L/M]` with numerator degree `L`.
    pub fn from_degrees(numer: usize, denom: usize) -> Result<Self> {
        Self::new(denom, numer as i64 - denom as i64)
    }

    pub fn with_l(self, l: usize) -> Result<Self> {
        if self.m == 0 && l != 0 || self.m > 0 && !(1..=self.m).contains(&l) {
            return Err(PadeError::InvalidConformation(format!(
                "l = {l} outside 1..={}",
                self.m
            )));
        }
        Ok(Self { l, ..self })
    }

    /// Coefficients consumed: `n = 2m + k + 1`.
    pub fn required_len(&self) -> usize {
        (2 * self.m as i64 + self.k + 1) as usize
    }

    pub fn numer_degree(&self) -> usize {
        (self.m as i64 + self.k) as usize
    }

    pub fn check_series(&self, s: &PowerSeries) -> Result<()> {
        let needed = self.required_len();
        if s.len() < needed {
            return Err(PadeError::InsufficientCoefficients {
                needed,
                available: s.len(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Conformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}/{}]", self.numer_degree(), self.m)
    }
}

/// `Σ a_i z^i / Σ b_i z^i`, coefficients low order first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximant {
    pub numer: Vec<Complex64>,
    pub denom: Vec<Complex64>,
}

impl RationalApproximant {
    pub fn new(numer: Vec<Complex64>, denom: Vec<Complex64>) -> Result<Self> {
        if denom.iter().all(|b| b.norm() == 0.0) {
            return Err(PadeError::AllZero);
        }
        if numer.iter().chain(&denom).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PadeError::NonFinite);
        }
        Ok(Self { numer, denom })
    }

    /// Rescaled so the lowest-order nonzero denominator coefficient is 1
    /// (`b_0 = 1` whenever `b_0 ≠ 0`).
    pub fn normalized(&self) -> Self {
        let pivot = self
            .denom
            .iter()
            .copied()
            .find(|b| b.norm() != 0.0)
            .unwrap_or(Complex64::new(1.0, 0.0));
        Self {
            numer: self.numer.iter().map(|a| a / pivot).collect(),
            denom: self.denom.iter().map(|b| b / pivot).collect(),
        }
    }

    /// First `n` Maclaurin coefficients of `numer / denom`. Requires `b_0 ≠ 0`.
    pub fn maclaurin(&self, n: usize) -> Result<Vec<Complex64>> {
        let b0 = self.denom[0];
        if b0.norm() == 0.0 {
            return Err(PadeError::PoleHit(Complex64::new(0.0, 0.0)));
        }
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = self.numer.get(j).copied().unwrap_or_default();
            for i in 1..self.denom.len().min(j + 1) {
                acc -= self.denom[i] * out[j - i];
            }
            out.push(acc / b0);
        }
        Ok(out)
    }
}

pub fn dm_denominator(s: &PowerSeries, conf: &Conformation) -> Result<Vec<Complex64>> {
    conf.check_series(s)?;
    let (m, k) = (conf.m as i64, conf.k);
    if m == 0 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let a = CMat::from_fn(m as usize, m as usize, |i, j| {
        s.coeff(m + k + (i as i64 + 1) - (j as i64 + 1))
    });
    let rhs = CMat::from_fn(m as usize, 1, |i, _| -s.coeff(m + k + i as i64 + 1));
    let sol = numerics::lu_solve(&a, &rhs)?;
    if sol.min_pivot_ratio <= DM_PIVOT_TOL {
        return Err(PadeError::Degenerate(format!(
            "direct-method matrix is singular (pivot ratio {:e})",
            sol.min_pivot_ratio
        )));
    }
    let mut b = Vec::with_capacity(m as usize + 1);
    b.push(Complex64::new(1.0, 0.0));
    for i in 0..m as usize {
        let v = sol.x[(i, 0)];
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(PadeError::Degenerate("direct-method solution overflowed".into()));
        }
        b.push(v);
    }
    Ok(b)
}

pub fn svd_denominator(s: &PowerSeries, conf: &Conformation) -> Result<Vec<Complex64>> {
    conf.check_series(s)?;
    let (m, k) = (conf.m as i64, conf.k);
    if m == 0 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let c = CMat::from_fn(m as usize, m as usize + 1, |i, j| {
        s.coeff(m + k + (i as i64 + 1) - j as i64)
    });
    let dec = numerics::svd(&c)?;
    let b = dec.v_column(m as usize);
    let pivot = b
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("m + 1 entries");
    Ok(b.into_iter().map(|x| x / pivot).collect())
}

/// `a_j = Σ_i c_{j-i} b_i` for `j = 0..=m+k`.
pub fn numerator_from_denominator(
    s: &PowerSeries,
    denom: &[Complex64],
    conf: &Conformation,
) -> Vec<Complex64> {
    (0..=conf.numer_degree())
        .map(|j| {
            (0..=j.min(denom.len() - 1))
                .map(|i| s.coeff((j - i) as i64) * denom[i])
                .sum()
        })
        .collect()
}

pub fn dm(s: &PowerSeries, conf: &Conformation) -> Result<RationalApproximant> {
    let denom = dm_denominator(s, conf)?;
    let numer = numerator_from_denominator(s, &denom, conf);
    RationalApproximant::new(numer, denom)
}

pub fn svd_pade(s: &PowerSeries, conf: &Conformation) -> Result<RationalApproximant> {
    let denom = svd_denominator(s, conf)?;
    let numer = numerator_from_denominator(s, &denom, conf);
    RationalApproximant::new(numer, denom)
}
