//! Spurious-pole filtering on top of the pencil method.
//!
//! Starting from `l = m`, the combined Hankel matrix is reshaped to
//! `(2m − l) × (l + 1)` and `l` is lowered until every retained singular
//! value clears `10^{−t} σ_max`, no eigenvalue sits at the development point,
//! and the pole Vandermonde matrix is numerically nonsingular. The weights are
//! then fitted to *all* available coefficients, so the information carried by
//! the discarded directions still shapes the result.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baseline::{Conformation, RationalApproximant};
use crate::error::{PadeError, Result};
use crate::numerics::{self, CMat, SvdResult};
use crate::pencil::{self, PoleResidueForm};
use crate::series::PowerSeries;

pub const DEFAULT_T: f64 = 14.0;
pub const DEFAULT_ORIGIN_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    /// Accurate digits in the coefficients.
    pub t: f64,
    /// Eigenvalues with `|λ| ≤ origin_radius` are treated as poles at the origin.
    pub origin_radius: f64,
    /// Loop passes allowed; `None` means `m + 1`.
    pub max_iterations: Option<usize>,
    /// Remove one origin pole per pass instead of all at once.
    pub strict_origin: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            t: DEFAULT_T,
            origin_radius: DEFAULT_ORIGIN_RADIUS,
            max_iterations: None,
            strict_origin: false,
        }
    }
}

impl FilterParams {
    /// Defaults, with `t` taken from the series' declared accuracy if it has one.
    pub fn for_series(s: &PowerSeries) -> Self {
        Self {
            t: s.declared_digits().unwrap_or(DEFAULT_T),
            ..Self::default()
        }
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(PadeError::InvalidInput(format!("t must be positive, got {}", self.t)));
        }
        if !(self.origin_radius > 0.0 && self.origin_radius < 1.0) {
            return Err(PadeError::InvalidInput(format!(
                "origin radius must lie in (0, 1), got {}",
                self.origin_radius
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(PadeError::InvalidInput("max_iterations must be positive".into()));
        }
        Ok(())
    }

    fn threshold(&self) -> f64 {
        10f64.powf(-self.t)
    }
}

/// What a pass of the loop decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PassAction {
    /// Small singular values: `l` lowered by their count.
    Filtered { n_s: usize },
    /// The reduced pencil `V2ᴴ` was rank deficient.
    PencilRankDeficient,
    /// Eigenvalues inside the origin radius were dropped.
    OriginPoles { removed: usize },
    /// The pole Vandermonde matrix was numerically singular.
    SingularVandermonde,
    /// The Hankel matrix was identically zero.
    ZeroSeries,
    Accepted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassRecord {
    pub l_before: usize,
    pub singular_values: Vec<f64>,
    pub n_s_removed: usize,
    pub action: PassAction,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpuriousPoleReport {
    pub iterations: Vec<PassRecord>,
    pub origin_poles_removed: Vec<Complex64>,
    pub d_matrix_reductions: usize,
    pub final_l: usize,
    /// `2 (m − final_l)`.
    pub defect_estimate: usize,
    /// Every pole was filtered out and only the polynomial head remains.
    pub collapsed: bool,
}

#[derive(Debug, Clone)]
pub struct Pm2Output {
    pub prf: PoleResidueForm,
    pub rational: RationalApproximant,
    pub report: SpuriousPoleReport,
}

/// `|{i : σ_i < 10^{−t} σ_0}|`; all but one when `σ_0 = 0`.
pub fn count_filtered(sigma: &[f64], t: f64) -> usize {
    let Some(&s0) = sigma.first() else {
        return 0;
    };
    if s0 == 0.0 {
        return sigma.len() - 1;
    }
    let cut = 10f64.powf(-t) * s0;
    sigma.iter().filter(|&&s| s < cut).count()
}

/// Poles of the rank-`l` pencil carried by the leading `l` right singular
/// vectors of the combined Hankel matrix: eigenvalues of `V2ᴴ⁺ V1ᴴ`, where
/// `V1ᴴ` (`V2ᴴ`) is the first (last) `l` columns of those rows of `Vᴴ`.
pub fn reduced_poles(c: &CMat, svd: &SvdResult) -> Result<Vec<Complex64>> {
    let l = c.ncols() - 1;
    if l == 0 {
        return Err(PadeError::InvalidConformation("pencil needs l ≥ 1".into()));
    }
    if svd.v_h.nrows() != l + 1 || c.nrows() < l {
        return Err(PadeError::InvalidInput(
            "singular value decomposition does not match the Hankel matrix".into(),
        ));
    }
    let v1 = CMat::from_fn(l, l, |i, j| svd.v_h[(i, j)]);
    let v2 = CMat::from_fn(l, l, |i, j| svd.v_h[(i, j + 1)]);
    let x = numerics::qr_solve(&v2, &v1)?;
    let mut poles = numerics::eigenvalues(&x)?;
    numerics::sort_by_magnitude(&mut poles);
    Ok(poles)
}

fn head_only(s: &PowerSeries, conf: &Conformation, mut report: SpuriousPoleReport) -> Result<Pm2Output> {
    report.final_l = 0;
    report.defect_estimate = 2 * conf.m;
    report.collapsed = conf.m > 0;
    let prf = PoleResidueForm::from_parts(s, conf, Vec::new());
    let rational = pencil::to_rational(&prf, conf);
    Ok(Pm2Output { prf, rational, report })
}

fn vandermonde_is_singular(poles: &[Complex64], rows: usize, threshold: f64) -> Result<bool> {
    if pencil::check_distinct(poles).is_err() {
        return Ok(true);
    }
    let d = match pencil::vandermonde(poles, rows) {
        Ok(d) => d,
        Err(PadeError::SingularVandermonde) => return Ok(true),
        Err(e) => return Err(e),
    };
    let sv = numerics::singular_values(&d)?;
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    Ok(!(min >= threshold * max) || max == 0.0)
}

pub fn pm2(s: &PowerSeries, conf: &Conformation, params: &FilterParams) -> Result<Pm2Output> {
    params.validate()?;
    conf.check_series(s)?;
    let mut report = SpuriousPoleReport::default();
    if conf.m == 0 {
        return head_only(s, conf, report);
    }

    let max_passes = params.max_iterations.unwrap_or(conf.m + 1);
    let rhs = pencil::weight_rhs(s, conf);
    let mut l = conf.m;

    loop {
        if l == 0 {
            if conf.k < 0 {
                return Err(PadeError::Collapse { k: conf.k });
            }
            return head_only(s, conf, report);
        }
        if report.iterations.len() >= max_passes {
            return Err(PadeError::NonTerminating(report.iterations.len()));
        }

        let working = Conformation { l, ..*conf };
        let c = pencil::combined_hankel(s, &working)?;
        let svd = numerics::svd(&c)?;
        let leading = svd.sigma[..l.min(svd.sigma.len())].to_vec();
        let mut record = PassRecord {
            l_before: l,
            singular_values: svd.sigma.clone(),
            n_s_removed: 0,
            action: PassAction::Accepted,
        };

        if svd.sigma[0] == 0.0 {
            record.action = PassAction::ZeroSeries;
            report.iterations.push(record);
            return head_only(s, conf, report);
        }

        if l > 1 {
            let n_s = count_filtered(&leading, params.t);
            if n_s > 0 {
                let next = l.saturating_sub(n_s).max(1);
                record.n_s_removed = l - next;
                record.action = PassAction::Filtered { n_s };
                report.iterations.push(record);
                l = next;
                continue;
            }
        }

        let poles = match reduced_poles(&c, &svd) {
            Ok(p) => p,
            Err(PadeError::RankDeficient { .. }) => {
                record.action = PassAction::PencilRankDeficient;
                report.iterations.push(record);
                l -= 1;
                continue;
            }
            Err(e) => return Err(e),
        };

        let (origin, kept): (Vec<Complex64>, Vec<Complex64>) =
            poles.iter().partition(|p| p.norm() <= params.origin_radius);
        if !origin.is_empty() {
            let removed = if params.strict_origin { 1 } else { origin.len() };
            report.origin_poles_removed.extend(&origin[..removed]);
            record.action = PassAction::OriginPoles { removed };
            report.iterations.push(record);
            l -= removed;
            continue;
        }

        if vandermonde_is_singular(&kept, rhs.len(), params.threshold())? {
            record.action = PassAction::SingularVandermonde;
            report.iterations.push(record);
            report.d_matrix_reductions += 1;
            l -= 1;
            continue;
        }

        let weights = pencil::pm1_residues(s, &kept, conf, true)?;
        report.iterations.push(record);
        report.final_l = l;
        report.defect_estimate = 2 * (conf.m - l);
        let terms = kept.into_iter().zip(weights).collect();
        let prf = PoleResidueForm::from_parts(s, conf, terms);
        let rational = pencil::to_rational(&prf, conf);
        return Ok(Pm2Output { prf, rational, report });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{build_blocks, pm1_poles};
    use crate::series::{gen_from_poles, gen_geometric_noisy, gen_log_series, seeded_rng};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn matched(found: &[Complex64], expected: &[Complex64], tol: f64) -> bool {
        found.len() == expected.len() && {
            let mut pool = found.to_vec();
            expected.iter().all(|x| {
                let (i, d) = pool
                    .iter()
                    .enumerate()
                    .map(|(i, y)| (i, (y - x).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                pool.remove(i);
                d <= tol * x.norm().max(1.0)
            })
        }
    }

    #[test]
    fn count_filtered_examples() {
        assert_eq!(count_filtered(&[1.0, 1e-5], 4.0), 1);
        assert_eq!(count_filtered(&[1.0, 0.5, 0.3], 14.0), 0);
        assert_eq!(count_filtered(&[0.0, 0.0, 0.0], 14.0), 2);

        let geo = PowerSeries::from_real(&[1.0; 10]).unwrap();
        let conf = Conformation::new(5, -1).unwrap();
        let sv = numerics::svd(&pencil::combined_hankel(&geo, &conf).unwrap()).unwrap().sigma;
        assert_eq!(count_filtered(&sv, 12.0), 4);
    }

    #[test]
    fn reduced_pole_examples() {
        let s = PowerSeries::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let c1 = pencil::combined_hankel(&s, &Conformation::new(1, 0).unwrap()).unwrap();
        let p = reduced_poles(&c1, &numerics::svd(&c1).unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].norm() < 1e-15);

        let geo = PowerSeries::from_real(&[1.0, 1.0]).unwrap();
        let cg = pencil::combined_hankel(&geo, &Conformation::new(1, -1).unwrap()).unwrap();
        let p = reduced_poles(&cg, &numerics::svd(&cg).unwrap()).unwrap();
        assert!((p[0] - c(1.0)).norm() < 1e-14);

        let s = gen_from_poles(&[c(2.0), c(-1.0)], &[c(1.0), c(3.0)], 4).unwrap();
        let conf = Conformation::new(2, -1).unwrap();
        let cc = pencil::combined_hankel(&s, &conf).unwrap();
        let p = reduced_poles(&cc, &numerics::svd(&cc).unwrap()).unwrap();
        let q = pm1_poles(&build_blocks(&s, &conf).unwrap()).unwrap();
        assert!(matched(&p, &q, 1e-9));
    }

    #[test]
    fn z_over_z_reduces_to_constant() {
        let s = PowerSeries::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let out = pm2(&s, &Conformation::new(1, 0).unwrap(), &FilterParams::default()).unwrap();
        assert!(out.prf.terms.is_empty());
        assert_eq!(out.rational.numer, vec![c(1.0)]);
        assert_eq!(out.rational.denom, vec![c(1.0)]);
        assert_eq!(out.report.origin_poles_removed.len(), 1);
        assert!(out.report.collapsed);
        assert_eq!(out.report.defect_estimate, 2);
        // |PA − f| = O(z²)
        for z in [1e-2, 1e-3] {
            let pa = crate::approximant::eval_rational(&out.rational, c(z)).unwrap();
            assert!((pa - c(1.0 + z * z)).norm() <= 2.0 * z * z);
        }
    }

    #[test]
    fn noisy_geometric_keeps_one_pole() {
        let eps = 1e-6;
        let s = gen_geometric_noisy(20, eps, &mut seeded_rng(11)).unwrap();
        let conf = Conformation::new(10, -1).unwrap();
        let out = pm2(&s, &conf, &FilterParams::default().with_t(6.0)).unwrap();
        assert_eq!(out.prf.terms.len(), 1);
        assert!((out.prf.terms[0].0 - c(1.0)).norm() <= 100.0 * eps);
        assert_eq!(out.report.final_l, 1);
        assert_eq!(out.report.defect_estimate, 18);
    }

    #[test]
    fn log_series_poles_stay_on_the_cut() {
        let s = gen_log_series(41).unwrap();
        let out = pm2(&s, &Conformation::new(20, 0).unwrap(), &FilterParams::default()).unwrap();
        assert!(out.report.final_l <= 14);
        for p in out.prf.poles() {
            assert!(p.re >= 1.1 && p.im.abs() <= 0.05, "pole {p} off the cut");
        }
    }

    #[test]
    fn zero_series_gives_zero_approximant() {
        let s = PowerSeries::from_real(&[0.0; 9]).unwrap();
        let out = pm2(&s, &Conformation::new(4, 0).unwrap(), &FilterParams::default()).unwrap();
        assert!(out.prf.terms.is_empty());
        assert!(out.rational.numer.iter().all(|a| a.norm() == 0.0));
        let out = pm2(&s, &Conformation::new(4, -1).unwrap(), &FilterParams::default()).unwrap();
        assert!(out.rational.numer.iter().all(|a| a.norm() == 0.0));
        assert_eq!(out.report.iterations.last().unwrap().action, PassAction::ZeroSeries);
    }

    #[test]
    fn collapse_without_head_is_an_error() {
        // f = z: the only pole the pencil finds is at the origin
        let s = PowerSeries::from_real(&[0.0, 1.0]).unwrap();
        let conf = Conformation::new(1, -1).unwrap();
        assert_eq!(pm2(&s, &conf, &FilterParams::default()).unwrap_err(), PadeError::Collapse { k: -1 });
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let geo = PowerSeries::from_real(&[1.0; 20]).unwrap();
        let conf = Conformation::new(10, -1).unwrap();
        let capped = FilterParams { max_iterations: Some(1), ..FilterParams::default() };
        assert_eq!(pm2(&geo, &conf, &capped).unwrap_err(), PadeError::NonTerminating(1));
        assert!(FilterParams { t: 0.0, ..FilterParams::default() }.validate().is_err());
        assert!(FilterParams { origin_radius: 1.5, ..FilterParams::default() }.validate().is_err());
    }

    #[test]
    fn strict_and_batched_origin_removal_agree() {
        // two genuine poles plus a deliberately oversized conformation
        let poles = [c(2.0), Complex64::new(-0.5, 1.5)];
        let s = gen_from_poles(&poles, &[c(1.0), c(0.5)], 12).unwrap();
        let conf = Conformation::new(5, 1).unwrap();
        let a = pm2(&s, &conf, &FilterParams::default()).unwrap();
        let b = pm2(&s, &conf, &FilterParams { strict_origin: true, ..FilterParams::default() }).unwrap();
        assert!(matched(&a.prf.poles(), &poles, 1e-7));
        assert!(matched(&b.prf.poles(), &poles, 1e-7));
    }

    fn arb_oracle() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>, usize)> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(m_true, extra)| {
            (
                prop::collection::vec((1.2f64..3.0, 0.0..std::f64::consts::TAU), m_true),
                prop::collection::vec((0.5f64..2.0, -1.0f64..1.0), m_true),
                Just(m_true + extra),
            )
                .prop_map(|(p, w, m)| {
                    (
                        p.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect(),
                        w.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
                        m,
                    )
                })
        })
    }

    fn separated(p: &[Complex64]) -> bool {
        p.iter().enumerate().all(|(i, a)| p[i + 1..].iter().all(|b| (a - b).norm() > 0.3))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn noiseless_oracles_recover_true_poles((poles, weights, m) in arb_oracle()) {
            prop_assume!(separated(&poles));
            let conf = Conformation::new(m, -1).unwrap();
            let s = gen_from_poles(&poles, &weights, conf.required_len()).unwrap();
            let out = pm2(&s, &conf, &FilterParams::default().with_t(12.0)).unwrap();
            prop_assert!(matched(&out.prf.poles(), &poles, 1e-7), "{:?} vs {:?}", out.prf.poles(), poles);

            // l only ever decreases, and no retained pole sits at the origin
            let ls: Vec<usize> = out.report.iterations.iter().map(|r| r.l_before).collect();
            prop_assert!(ls.windows(2).all(|w| w[1] < w[0]));
            prop_assert!(out.prf.poles().iter().all(|p| p.norm() > 1e-3));
            prop_assert_eq!(out.report.defect_estimate, 2 * (m - out.report.final_l));

            // weight residual over the full overdetermined system
            let rhs = pencil::weight_rhs(&s, &conf);
            let d = pencil::vandermonde(&out.prf.poles(), rhs.len()).unwrap();
            let norm_c = rhs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let res = (0..rhs.len())
                .map(|r| {
                    let fit: Complex64 = out.prf.weights().iter().enumerate().map(|(j, e)| d[(r, j)] * e).sum();
                    (fit - rhs[r]).norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            prop_assert!(res <= 1e-10 * norm_c);
        }

        #[test]
        fn unfiltered_pencil_matches_pm1((poles, weights, _m) in arb_oracle()) {
            prop_assume!(separated(&poles));
            let conf = Conformation::new(poles.len(), -1).unwrap();
            let s = gen_from_poles(&poles, &weights, conf.required_len()).unwrap();
            let c = pencil::combined_hankel(&s, &conf).unwrap();
            let a = reduced_poles(&c, &numerics::svd(&c).unwrap()).unwrap();
            let b = pm1_poles(&build_blocks(&s, &conf).unwrap()).unwrap();
            prop_assert!(matched(&a, &b, 1e-9));
        }
    }
}
