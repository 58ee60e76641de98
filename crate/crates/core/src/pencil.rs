//! Matrix-pencil construction of a Padé approximant.
//!
//! The tail of the series is written as a sum of simple poles,
//! `c_{k+1+r} = Σ_j e_j d_j^r` with `d_j = 1/p_j`. Two shifted Hankel blocks
//! of that tail factor as `C1 = D1 E D2` and `C2 = D1 E D0 D2`, so the
//! eigenvalues of `C2⁺ C1` are the poles themselves. Solving for `p` rather
//! than `d` keeps a pole at the origin representable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baseline::{Conformation, RationalApproximant};
use crate::error::{PadeError, Result};
use crate::numerics::{self, CMat};
use crate::series::PowerSeries;

/// Poles closer than this (relative to their magnitude) are treated as coincident.
pub const DUPLICATE_POLE_TOL: f64 = 1e-12;

/// Rank threshold for the pole Vandermonde system: singular to working precision.
pub const VANDERMONDE_RANK_TOL: f64 = f64::EPSILON;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct HankelBlocks {
    /// First `l` columns of the combined `(2m − l) × (l + 1)` Hankel matrix.
    pub c1: CMat,
    /// Last `l` columns.
    pub c2: CMat,
    pub conf: Conformation,
}

impl HankelBlocks {
    pub fn rows(&self) -> usize {
        self.c1.nrows()
    }

    pub fn cols(&self) -> usize {
        self.c1.ncols()
    }
}

/// `C_{ij} = c_{k+1+i+j}` with `2m − l` rows and `l + 1` columns.
pub fn combined_hankel(s: &PowerSeries, conf: &Conformation) -> Result<CMat> {
    conf.check_series(s)?;
    if conf.m == 0 || conf.l == 0 {
        return Err(PadeError::InvalidConformation(
            "a pencil needs at least one pole".into(),
        ));
    }
    let rows = 2 * conf.m - conf.l;
    let base = conf.k + 1;
    Ok(CMat::from_fn(rows, conf.l + 1, |i, j| {
        s.coeff(base + (i + j) as i64)
    }))
}

pub fn build_blocks(s: &PowerSeries, conf: &Conformation) -> Result<HankelBlocks> {
    let c = combined_hankel(s, conf)?;
    let (rows, l) = (c.nrows(), conf.l);
    Ok(HankelBlocks {
        c1: CMat::from_fn(rows, l, |i, j| c[(i, j)]),
        c2: CMat::from_fn(rows, l, |i, j| c[(i, j + 1)]),
        conf: *conf,
    })
}

/// Eigenvalues of `C2⁺ C1`, ascending by magnitude.
pub fn pm1_poles(blocks: &HankelBlocks) -> Result<Vec<Complex64>> {
    let x = numerics::qr_solve(&blocks.c2, &blocks.c1)?;
    let mut poles = numerics::eigenvalues(&x)?;
    numerics::sort_by_magnitude(&mut poles);
    Ok(poles)
}

/// Square blocks only: `C2⁻¹ C1` by pivoted LU with no rank guard, so an
/// ill-conditioned pencil still yields all `m` eigenvalues, as the direct
/// method would. Only an exactly zero pivot is rejected.
pub fn pm1_poles_unguarded(blocks: &HankelBlocks) -> Result<Vec<Complex64>> {
    if blocks.rows() != blocks.cols() {
        return Err(PadeError::InvalidConformation("unguarded pencil needs square blocks".into()));
    }
    let sol = numerics::lu_solve(&blocks.c2, &blocks.c1)?;
    if sol.min_pivot_ratio == 0.0 {
        return Err(PadeError::RankDeficient { index: 0, ratio: 0.0 });
    }
    let mut poles = numerics::eigenvalues(&sol.x)?;
    numerics::sort_by_magnitude(&mut poles);
    Ok(poles)
}

pub(crate) fn check_distinct(poles: &[Complex64]) -> Result<()> {
    for (i, &p) in poles.iter().enumerate() {
        for &q in &poles[i + 1..] {
            let scale = p.norm().max(q.norm());
            if (p - q).norm() <= DUPLICATE_POLE_TOL * scale {
                return Err(PadeError::DuplicatePole(p, q));
            }
        }
    }
    Ok(())
}

/// Row indices and series values for the weight system: `c_0..` when `k < 0`,
/// `c_{k+1}..` otherwise, up to `c_{n−1}`.
pub(crate) fn weight_rhs(s: &PowerSeries, conf: &Conformation) -> Vec<Complex64> {
    let n = conf.required_len() as i64;
    let first = conf.k.max(-1) + 1;
    (first..n).map(|j| s.coeff(j)).collect()
}

/// `D_{rj} = d_j^r` for the given number of rows.
pub fn vandermonde(poles: &[Complex64], rows: usize) -> Result<CMat> {
    let d: Vec<Complex64> = poles.iter().map(|p| ONE / p).collect();
    let mut out = CMat::zeros(rows, d.len());
    for (j, &dj) in d.iter().enumerate() {
        let mut pow = ONE;
        for r in 0..rows {
            if !pow.re.is_finite() || !pow.im.is_finite() {
                return Err(PadeError::SingularVandermonde);
            }
            out[(r, j)] = pow;
            pow *= dj;
        }
    }
    Ok(out)
}

/// Weights `e_j` for the given poles. With `use_all_rows` the whole
/// overdetermined system is solved by least squares; otherwise only the first
/// `poles.len()` equations are used.
pub fn pm1_residues(
    s: &PowerSeries,
    poles: &[Complex64],
    conf: &Conformation,
    use_all_rows: bool,
) -> Result<Vec<Complex64>> {
    conf.check_series(s)?;
    if poles.is_empty() {
        return Ok(Vec::new());
    }
    if poles.iter().any(|p| p.norm() == 0.0) {
        return Err(PadeError::SingularVandermonde);
    }
    check_distinct(poles)?;
    let rhs_all = weight_rhs(s, conf);
    let rows = if use_all_rows { rhs_all.len() } else { poles.len() };
    if rows < poles.len() {
        return Err(PadeError::InsufficientCoefficients {
            needed: poles.len(),
            available: rows,
        });
    }
    let d = vandermonde(poles, rows)?;
    let rhs = CMat::from_fn(rows, 1, |r, _| rhs_all[r]);
    let e = numerics::qr_solve_with_tol(&d, &rhs, VANDERMONDE_RANK_TOL).map_err(|err| match err {
        PadeError::RankDeficient { .. } | PadeError::NonFinite => PadeError::SingularVandermonde,
        other => other,
    })?;
    Ok((0..poles.len()).map(|j| e[(j, 0)]).collect())
}

/// `Σ_{i≤k} c_i z^i + z^{k+1} Σ_j e_j / (1 − z/p_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleResidueForm {
    /// `c_0..c_k`; empty when `k < 0`.
    pub head: Vec<Complex64>,
    /// `k + 1` for `k ≥ 0`, else 0.
    pub shift: usize,
    /// `(p_j, e_j)` pairs.
    pub terms: Vec<(Complex64, Complex64)>,
}

impl PoleResidueForm {
    pub fn from_parts(s: &PowerSeries, conf: &Conformation, terms: Vec<(Complex64, Complex64)>) -> Self {
        let (head, shift) = if conf.k >= 0 {
            let shift = conf.k as usize + 1;
            ((0..shift).map(|j| s.coeff(j as i64)).collect(), shift)
        } else {
            (Vec::new(), 0)
        };
        Self { head, shift, terms }
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn weights(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.1).collect()
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut Vec<Complex64>, p: &[Complex64], scale: Complex64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), ZERO);
    }
    for (a, x) in acc.iter_mut().zip(p) {
        *a += x * scale;
    }
}

/// `1 − z/p`, or `−z` for a pole at the origin.
fn pole_factor(p: Complex64) -> [Complex64; 2] {
    if p.norm() == 0.0 {
        [ZERO, -ONE]
    } else {
        [ONE, -ONE / p]
    }
}

/// Expands the pole-residue form over the common denominator `Π (1 − z/p_j)`.
///
/// The numerator is assembled from the weights rather than re-derived from
/// the series, so the two representations describe the same function even
/// when the weights came from a least-squares fit. For `k < −1` the
/// numerator is cut back to degree `m + k`.
pub fn to_rational(prf: &PoleResidueForm, conf: &Conformation) -> RationalApproximant {
    let factors: Vec<[Complex64; 2]> = prf.terms.iter().map(|t| pole_factor(t.0)).collect();
    let denom = factors.iter().fold(vec![ONE], |acc, f| poly_mul(&acc, f));

    let mut numer = if prf.head.is_empty() {
        vec![ZERO]
    } else {
        poly_mul(&prf.head, &denom)
    };
    let mut tail = Vec::new();
    for (j, &(p, e)) in prf.terms.iter().enumerate() {
        if p.norm() == 0.0 || e == ZERO {
            continue;
        }
        let others = factors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .fold(vec![ONE], |acc, (_, f)| poly_mul(&acc, f));
        poly_add_into(&mut tail, &others, e);
    }
    if !tail.is_empty() {
        let mut shifted = vec![ZERO; prf.shift];
        shifted.extend(tail);
        poly_add_into(&mut numer, &shifted, ONE);
    }

    let max_len = conf.numer_degree() + 1;
    if conf.k < -1 && numer.len() > max_len {
        numer.truncate(max_len);
    }
    let approximant = RationalApproximant { numer, denom };
    approximant.normalized()
}

/// Poles, square-system weights, and the rational form at `conf.l` poles.
///
/// Poles exactly at the origin carry no weight: their basis function
/// `e/(1 − z/p)` vanishes identically, so they contribute only a common
/// factor `z` to numerator and denominator.
pub fn pm1(s: &PowerSeries, conf: &Conformation) -> Result<(PoleResidueForm, RationalApproximant)> {
    conf.check_series(s)?;
    if conf.m == 0 {
        let prf = PoleResidueForm::from_parts(s, conf, Vec::new());
        let ra = to_rational(&prf, conf);
        return Ok((prf, ra));
    }
    let blocks = build_blocks(s, conf)?;
    let poles = pm1_poles(&blocks)?;
    let nonzero: Vec<Complex64> = poles.iter().copied().filter(|p| p.norm() != 0.0).collect();
    let weights = pm1_residues(s, &nonzero, conf, false)?;
    let mut it = weights.into_iter();
    let terms = poles
        .iter()
        .map(|&p| (p, if p.norm() == 0.0 { ZERO } else { it.next().expect("one weight per pole") }))
        .collect();
    let prf = PoleResidueForm::from_parts(s, conf, terms);
    let ra = to_rational(&prf, conf);
    Ok((prf, ra))
}
