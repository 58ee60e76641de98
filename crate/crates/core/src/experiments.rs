//! Method dispatch and the two experiment runners behind the `pade` binary:
//! noisy geometric series swept over noise levels, and the logarithmic
//! branch-point series.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approximant::{
    error_sweep, linspace, logspace, real_points, unit_disk_mesh, ErrorSweep, Evaluate,
};
use crate::baseline::{self, Conformation, RationalApproximant};
use crate::classify::{classify_roots, RootCounts};
use crate::error::{PadeError, Result};
use crate::pencil::{self, PoleResidueForm};
use crate::pm2::{self, FilterParams, SpuriousPoleReport};
use crate::series::{gen_geometric_noisy, gen_log_series, sample_rng, PowerSeries};

/// Points per error-sweep range.
pub const SWEEP_POINTS: usize = 500;
/// A sweep point is a spike when its error exceeds this multiple of the median.
pub const SPIKE_FACTOR: f64 = 100.0;
/// Spikes are not counted here: the system pole of `1/(1 − z)` sits at 1.
pub const SPIKE_EXCLUSION: (f64, f64) = (1.0, 1.2);
/// Ray `{x ≥ 1.1, |Im| ≤ 0.05}` carrying the branch cut of `ln(1.2 − z)`.
pub const RAY_START: f64 = 1.1;
pub const RAY_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dm,
    Svd,
    Pm1,
    Pm2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dm => "dm",
            Method::Svd => "svd",
            Method::Pm1 => "pm1",
            Method::Pm2 => "pm2",
        })
    }
}

impl FromStr for Method {
    type Err = PadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dm" => Ok(Method::Dm),
            "svd" => Ok(Method::Svd),
            "pm1" => Ok(Method::Pm1),
            "pm2" => Ok(Method::Pm2),
            other => Err(PadeError::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// One approximant together with everything the experiments inspect.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub method: Method,
    pub conf: Conformation,
    pub final_l: usize,
    pub rational: RationalApproximant,
    pub prf: Option<PoleResidueForm>,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub report: Option<SpuriousPoleReport>,
}

impl Evaluate for Approximation {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match &self.prf {
            Some(prf) => prf.eval(z),
            None => self.rational.eval(z),
        }
    }
}

fn numerator_zeros(ra: &RationalApproximant) -> Result<Vec<Complex64>> {
    match crate::numerics::polynomial_roots(&ra.numer) {
        Err(PadeError::AllZero) => Ok(Vec::new()),
        other => other,
    }
}

pub fn approximate(
    s: &PowerSeries,
    conf: &Conformation,
    method: Method,
    params: &FilterParams,
) -> Result<Approximation> {
    let (rational, prf, report, final_l) = match method {
        Method::Dm => (baseline::dm(s, conf)?, None, None, conf.m),
        Method::Svd => (baseline::svd_pade(s, conf)?, None, None, conf.m),
        Method::Pm1 => {
            let (prf, ra) = pencil::pm1(s, conf)?;
            (ra, Some(prf), None, conf.m)
        }
        Method::Pm2 => {
            let out = pm2::pm2(s, conf, params)?;
            let l = out.report.final_l;
            (out.rational, Some(out.prf), Some(out.report), l)
        }
    };
    let poles = match &prf {
        Some(p) => p.poles(),
        None => crate::numerics::polynomial_roots(&rational.denom)?,
    };
    let zeros = numerator_zeros(&rational)?;
    Ok(Approximation {
        method,
        conf: *conf,
        final_l,
        rational,
        prf,
        poles,
        zeros,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformationJson {
    pub m: usize,
    pub k: i64,
    pub final_l: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueJson {
    pub pole: Complex64,
    pub weight: Complex64,
}

/// Serialized form; complex numbers are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationJson {
    pub method: Method,
    pub conformation: ConformationJson,
    pub numer: Vec<Complex64>,
    pub denom: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub residues: Vec<ResidueJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SpuriousPoleReport>,
}

impl From<&Approximation> for ApproximationJson {
    fn from(a: &Approximation) -> Self {
        Self {
            method: a.method,
            conformation: ConformationJson {
                m: a.conf.m,
                k: a.conf.k,
                final_l: a.final_l,
            },
            numer: a.rational.numer.clone(),
            denom: a.rational.denom.clone(),
            poles: a.poles.clone(),
            zeros: a.zeros.clone(),
            residues: a
                .prf
                .iter()
                .flat_map(|p| &p.terms)
                .map(|&(pole, weight)| ResidueJson { pole, weight })
                .collect(),
            report: a.report.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub k: i64,
    pub eps_list: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Accurate digits for PM²; `None` uses the series' declared value.
    pub t: Option<f64>,
    pub method: Method,
    pub origin_radius: f64,
    pub mesh_spacing: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 20,
            m: 10,
            k: -1,
            eps_list: vec![1e-3, 1e-6, 1e-10],
            samples: 10,
            seed: 0,
            t: None,
            method: Method::Pm2,
            origin_radius: pm2::DEFAULT_ORIGIN_RADIUS,
            mesh_spacing: 0.02,
        }
    }
}

impl ExperimentConfig {
    pub fn log_branch() -> Self {
        Self {
            n: 41,
            m: 20,
            k: 0,
            eps_list: Vec::new(),
            t: Some(pm2::DEFAULT_T),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(PadeError::InvalidInput("samples must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(PadeError::InvalidInput("n must be at least 1".into()));
        }
        if !(self.mesh_spacing > 0.0 && self.mesh_spacing <= 1.0) {
            return Err(PadeError::InvalidInput("mesh spacing must lie in (0, 1]".into()));
        }
        self.filter_params(None).validate()
    }

    pub fn conformation(&self) -> Result<Conformation> {
        let conf = Conformation::new(self.m, self.k)?;
        if conf.required_len() > self.n {
            return Err(PadeError::InsufficientCoefficients {
                needed: conf.required_len(),
                available: self.n,
            });
        }
        Ok(conf)
    }

    pub fn filter_params(&self, s: Option<&PowerSeries>) -> FilterParams {
        let base = s.map(FilterParams::for_series).unwrap_or_default();
        FilterParams {
            t: self.t.unwrap_or(base.t),
            origin_radius: self.origin_radius,
            ..base
        }
    }
}

/// Points outside `exclude` whose error is flagged or exceeds
/// `factor ×` the sweep's median error.
pub fn count_spikes(sweep: &ErrorSweep, factor: f64, exclude: (f64, f64)) -> usize {
    let cut = factor * sweep.median_unflagged();
    sweep
        .points
        .iter()
        .zip(sweep.errors.iter().zip(&sweep.flagged))
        .filter(|(z, _)| !(z.re >= exclude.0 && z.re <= exclude.1))
        .filter(|(_, (&e, &f))| f || e > cut)
        .count()
}

pub fn geometric_exact(z: Complex64) -> Complex64 {
    1.0 / (1.0 - z)
}

pub fn log_exact(z: Complex64) -> Complex64 {
    (Complex64::new(1.2, 0.0) - z).ln()
}

/// The three real ranges of the noisy-geometric study.
pub fn geometric_sweep_ranges() -> [Vec<Complex64>; 3] {
    [
        real_points(&linspace(-0.9, 0.9, SWEEP_POINTS)),
        real_points(&linspace(0.9, 0.99, SWEEP_POINTS)),
        real_points(&logspace(1.1, 100.0, SWEEP_POINTS)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub eps: f64,
    pub sample: u32,
    pub error: Option<String>,
    pub n_poles: Option<usize>,
    pub system_pole_error: Option<f64>,
    pub counts: Option<RootCounts>,
    pub inner_max_error: Option<f64>,
    pub edge_max_error: Option<f64>,
    pub outer_max_error: Option<f64>,
    pub outer_flagged: Option<usize>,
    pub outer_spikes: Option<usize>,
}

impl SampleRow {
    fn failed(eps: f64, sample: u32, err: &PadeError) -> Self {
        Self {
            eps,
            sample,
            error: Some(err.to_string()),
            n_poles: None,
            system_pole_error: None,
            counts: None,
            inner_max_error: None,
            edge_max_error: None,
            outer_max_error: None,
            outer_flagged: None,
            outer_spikes: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSummary {
    pub eps: f64,
    pub samples: usize,
    pub failures: usize,
    pub mean_poles: f64,
    /// Mean over samples of `min_j |p_j − 1|`.
    pub mean_system_pole_error: f64,
    pub mean_doublets: f64,
    pub mean_far_poles: f64,
    pub mean_far_zeros: f64,
    pub max_inner_error: f64,
    pub samples_with_spikes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricNoiseReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SampleRow>,
    pub summary: Vec<EpsSummary>,
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl GeometricNoiseReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "eps,sample,ok,n_poles,system_pole_error,system_poles,doublets,far_poles,far_zeros,unclassified,\
             inner_max_error,edge_max_error,outer_max_error,outer_flagged,outer_spikes,error\n",
        );
        for r in &self.rows {
            let c = r.counts;
            let _ = writeln!(
                out,
                "{:e},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.eps,
                r.sample,
                r.ok(),
                opt(&r.n_poles),
                opt(&r.system_pole_error),
                opt(&c.map(|c| c.system_poles)),
                opt(&c.map(|c| c.doublets)),
                opt(&c.map(|c| c.far_poles)),
                opt(&c.map(|c| c.far_zeros)),
                opt(&c.map(|c| c.unclassified())),
                opt(&r.inner_max_error),
                opt(&r.edge_max_error),
                opt(&r.outer_max_error),
                opt(&r.outer_flagged),
                opt(&r.outer_spikes),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            );
        }
        out
    }
}

/// Everything measured on one noisy-geometric sample.
#[derive(Debug, Clone)]
pub struct GeometricSample {
    pub approximation: Approximation,
    pub row: SampleRow,
    pub sweeps: [ErrorSweep; 3],
}

pub fn geometric_sample(cfg: &ExperimentConfig, eps_index: usize, sample: u32) -> Result<GeometricSample> {
    let eps = cfg.eps_list[eps_index];
    let conf = cfg.conformation()?;
    let mut rng = sample_rng(cfg.seed, eps_index as u32, sample);
    let s = gen_geometric_noisy(cfg.n, eps, &mut rng)?;
    let approximation = approximate(&s, &conf, cfg.method, &cfg.filter_params(Some(&s)))?;

    let one = Complex64::new(1.0, 0.0);
    let system_pole_error = approximation
        .poles
        .iter()
        .map(|p| (p - one).norm())
        .min_by(f64::total_cmp);
    let counts = classify_roots(&approximation.poles, &approximation.zeros, &[one], eps).counts();
    let sweeps = geometric_sweep_ranges().map(|pts| error_sweep(&approximation, geometric_exact, &pts));
    let row = SampleRow {
        eps,
        sample,
        error: None,
        n_poles: Some(approximation.poles.len()),
        system_pole_error,
        counts: Some(counts),
        inner_max_error: Some(sweeps[0].max_unflagged()),
        edge_max_error: Some(sweeps[1].max_unflagged()),
        outer_max_error: Some(sweeps[2].max_unflagged()),
        outer_flagged: Some(sweeps[2].flagged_count()),
        outer_spikes: Some(count_spikes(&sweeps[2], SPIKE_FACTOR, SPIKE_EXCLUSION)),
    };
    Ok(GeometricSample {
        approximation,
        row,
        sweeps,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn summarize(eps: f64, rows: &[SampleRow]) -> EpsSummary {
    let ok: Vec<&SampleRow> = rows.iter().filter(|r| r.ok()).collect();
    let counts = || ok.iter().filter_map(|r| r.counts);
    EpsSummary {
        eps,
        samples: rows.len(),
        failures: rows.len() - ok.len(),
        mean_poles: mean(ok.iter().filter_map(|r| r.n_poles).map(|n| n as f64)),
        mean_system_pole_error: mean(ok.iter().filter_map(|r| r.system_pole_error)),
        mean_doublets: mean(counts().map(|c| c.doublets as f64)),
        mean_far_poles: mean(counts().map(|c| c.far_poles as f64)),
        mean_far_zeros: mean(counts().map(|c| c.far_zeros as f64)),
        max_inner_error: ok.iter().filter_map(|r| r.inner_max_error).fold(0.0, f64::max),
        samples_with_spikes: ok.iter().filter(|r| r.outer_spikes.unwrap_or(0) > 0).count(),
    }
}

pub fn run_geometric_noise(cfg: &ExperimentConfig) -> Result<GeometricNoiseReport> {
    cfg.validate()?;
    if cfg.eps_list.is_empty() {
        return Err(PadeError::InvalidInput("at least one noise level is required".into()));
    }
    if let Some(&bad) = cfg.eps_list.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(PadeError::InvalidInput(format!("invalid noise level {bad}")));
    }
    cfg.conformation()?;

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (i, &eps) in cfg.eps_list.iter().enumerate() {
        let batch: Vec<SampleRow> = (0..cfg.samples as u32)
            .map(|j| match geometric_sample(cfg, i, j) {
                Ok(s) => s.row,
                Err(e) => SampleRow::failed(eps, j, &e),
            })
            .collect();
        summary.push(summarize(eps, &batch));
        rows.extend(batch);
    }
    Ok(GeometricNoiseReport {
        config: cfg.clone(),
        rows,
        summary,
    })
}

pub fn on_ray(p: Complex64) -> bool {
    p.re >= RAY_START && p.im.abs() <= RAY_WIDTH
}

/// PM¹ poles filtered by `keep`, with weights re-solved from the square
/// system only — naive deletion, without the reconformation PM² performs.
/// The pencil is solved without a rank guard.
pub fn pm1_pruned(
    s: &PowerSeries,
    conf: &Conformation,
    keep: impl Fn(Complex64) -> bool,
) -> Result<PoleResidueForm> {
    let blocks = pencil::build_blocks(s, conf)?;
    let poles: Vec<Complex64> = pencil::pm1_poles_unguarded(&blocks)?
        .into_iter()
        .filter(|&p| p.norm() != 0.0 && keep(p))
        .collect();
    let weights = pencil::pm1_residues(s, &poles, conf, false)?;
    Ok(PoleResidueForm::from_parts(s, conf, poles.into_iter().zip(weights).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchResult {
    pub method: String,
    pub error: Option<String>,
    pub conformation: Option<ConformationJson>,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub off_ray_poles: usize,
    pub mesh_max_error: Option<f64>,
    /// Max error over 500 points of `[0, 1]`.
    pub interval_max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SpuriousPoleReport>,
}

impl BranchResult {
    fn failed(method: &str, err: &PadeError) -> Self {
        Self {
            method: method.into(),
            error: Some(err.to_string()),
            conformation: None,
            poles: Vec::new(),
            zeros: Vec::new(),
            off_ray_poles: 0,
            mesh_max_error: None,
            interval_max_error: None,
            report: None,
        }
    }

    fn measure<A: Evaluate + ?Sized>(
        method: &str,
        approx: &A,
        conformation: ConformationJson,
        poles: Vec<Complex64>,
        zeros: Vec<Complex64>,
        mesh: &[Complex64],
    ) -> Self {
        let interval = real_points(&linspace(0.0, 1.0, SWEEP_POINTS));
        Self {
            method: method.into(),
            error: None,
            conformation: Some(conformation),
            off_ray_poles: poles.iter().filter(|p| !on_ray(**p)).count(),
            poles,
            zeros,
            mesh_max_error: (!mesh.is_empty()).then(|| error_sweep(approx, log_exact, mesh).max_error),
            interval_max_error: Some(error_sweep(approx, log_exact, &interval).max_error),
            report: None,
        }
    }
}

/// Errors over `[0, 1]` for three ways of treating the pencil's spurious
/// poles: keep them all, delete them and re-solve the square weight system,
/// or let PM² fold them back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssimilationReport {
    pub n: usize,
    pub conformation: ConformationJson,
    pub pm1_all: BranchResult,
    pub pm1_pruned: BranchResult,
    pub pm2: BranchResult,
}

/// Uses the first `2m` coefficients of `s` at `[m − 1/m]`.
pub fn compare_assimilation(s: &PowerSeries, m: usize, params: &FilterParams) -> Result<AssimilationReport> {
    let conf = Conformation::new(m, -1)?;
    let n = conf.required_len();
    conf.check_series(s)?;
    let s = PowerSeries::new(s.coeffs()[..n].to_vec())?;
    let cj = |final_l| ConformationJson { m, k: -1, final_l };
    let pencil_run = |name: &str, keep: &dyn Fn(Complex64) -> bool| match pm1_pruned(&s, &conf, keep) {
        Ok(prf) => {
            let zeros = numerator_zeros(&pencil::to_rational(&prf, &conf)).unwrap_or_default();
            BranchResult::measure(name, &prf, cj(prf.terms.len()), prf.poles(), zeros, &[])
        }
        Err(e) => BranchResult::failed(name, &e),
    };
    let pm1_all = pencil_run("pm1", &|_| true);
    let pm1_pruned = pencil_run("pm1_pruned", &on_ray);
    let pm2 = match approximate(&s, &conf, Method::Pm2, params) {
        Ok(a) => BranchResult::measure("pm2", &a, cj(a.final_l), a.poles.clone(), a.zeros.clone(), &[]),
        Err(e) => BranchResult::failed("pm2", &e),
    };
    Ok(AssimilationReport {
        n,
        conformation: cj(m),
        pm1_all,
        pm1_pruned,
        pm2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBranchReport {
    pub n: usize,
    pub t: f64,
    pub mesh_spacing: f64,
    pub mesh_points: usize,
    pub dm: BranchResult,
    pub pm2: BranchResult,
    /// `[m − 1/m]` on the first `2m` coefficients, `m = ⌊(n − 1)/2⌋`.
    pub assimilation: AssimilationReport,
}

impl LogBranchReport {
    /// One row per pole or zero: `method,kind,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,kind,re,im\n");
        for r in [&self.dm, &self.pm2] {
            for (kind, list) in [("pole", &r.poles), ("zero", &r.zeros)] {
                for z in list.iter() {
                    let _ = writeln!(out, "{},{},{:e},{:e}", r.method, kind, z.re, z.im);
                }
            }
        }
        out
    }
}

pub fn run_log_branch(cfg: &ExperimentConfig) -> Result<LogBranchReport> {
    cfg.validate()?;
    if cfg.n < 3 {
        return Err(PadeError::InvalidInput("the log experiment needs n ≥ 3".into()));
    }
    let s = gen_log_series(cfg.n)?;
    let half = (cfg.n - 1) / 2;
    let conf = Conformation::new(half, 0)?;
    let params = cfg.filter_params(None);
    let mesh = unit_disk_mesh(cfg.mesh_spacing);
    let cj = |final_l| ConformationJson { m: conf.m, k: conf.k, final_l };

    let dm = match approximate(&s, &conf, Method::Dm, &params) {
        Ok(a) => BranchResult::measure("dm", &a, cj(a.final_l), a.poles.clone(), a.zeros.clone(), &mesh),
        Err(e) => BranchResult::failed("dm", &e),
    };
    let pm2 = match approximate(&s, &conf, Method::Pm2, &params) {
        Ok(a) => {
            let mut r = BranchResult::measure("pm2", &a, cj(a.final_l), a.poles.clone(), a.zeros.clone(), &mesh);
            r.report = a.report.clone();
            r
        }
        Err(e) => BranchResult::failed("pm2", &e),
    };
    let assimilation = compare_assimilation(&s, half, &params)?;
    Ok(LogBranchReport {
        n: cfg.n,
        t: params.t,
        mesh_spacing: cfg.mesh_spacing,
        mesh_points: mesh.len(),
        dm,
        pm2,
        assimilation,
    })
}

/// Poles and zeros of an approximation as `kind,re,im` rows.
pub fn roots_csv(a: &Approximation) -> String {
    let mut out = String::from("kind,re,im\n");
    for (kind, list) in [("pole", &a.poles), ("zero", &a.zeros)] {
        for z in list {
            let _ = writeln!(out, "{},{:e},{:e}", kind, z.re, z.im);
        }
    }
    out
}
