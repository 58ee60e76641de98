//! Truncated Maclaurin series and the generators used by the experiments.
//!
//! Coefficient files are either a JSON array of `[re, im]` pairs or plain
//! text with one `re im` (or bare `re`) pair per line; index order is power
//! order in both cases.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PadeError, Result};

/// Accurate decimal digits assumed for a series that does not declare its own.
pub const MACHINE_DIGITS: f64 = 15.0;

/// Random stream used by the noisy generators: ChaCha with 8 rounds.
pub type SeriesRng = ChaCha8Rng;

/// Seeded stream for a single generator call.
pub fn seeded_rng(seed: u64) -> SeriesRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for one experiment sample.
///
/// The master seed fixes the key and `(eps_index, sample)` selects the ChaCha
/// stream, so appending noise levels or samples leaves existing draws intact.
pub fn sample_rng(master_seed: u64, eps_index: u32, sample: u32) -> SeriesRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((eps_index as u64) << 32) | sample as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    digits: Option<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(PadeError::InvalidInput("series has no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PadeError::NonFinite);
        }
        Ok(Self { coeffs, digits: None })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Declares the number of accurate decimal digits carried by the coefficients.
    pub fn with_digits(mut self, digits: f64) -> Result<Self> {
        if !(digits > 0.0) || !digits.is_finite() {
            return Err(PadeError::InvalidInput(format!(
                "accurate digits must be positive, got {digits}"
            )));
        }
        self.digits = Some(digits);
        Ok(self)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Accurate digits `t`; [`MACHINE_DIGITS`] unless declared.
    pub fn digits(&self) -> f64 {
        self.digits.unwrap_or(MACHINE_DIGITS)
    }

    pub fn declared_digits(&self) -> Option<f64> {
        self.digits
    }

    /// `c_j`, with `c_j = 0` for negative `j` and past the end.
    pub fn coeff(&self, j: i64) -> Complex64 {
        if j < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs
            .get(j as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Multiplies every coefficient by `factor`, keeping the declared accuracy.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        let mut out = Self::new(self.coeffs.iter().map(|c| c * factor).collect())?;
        out.digits = self.digits;
        Ok(out)
    }

    pub fn eval_truncated(&self, z: Complex64) -> Complex64 {
        eval_truncated(self, z)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_coefficients(text)?)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PadeError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// JSON array of `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        serde_json::to_string(&pairs).expect("finite floats always serialize")
    }
}

/// Horner evaluation of `Σ c_i z^i`.
pub fn eval_truncated(s: &PowerSeries, z: Complex64) -> Complex64 {
    s.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Parses either coefficient-file layout.
pub fn parse_coefficients(text: &str) -> Result<Vec<Complex64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Real(f64),
            Pair(Vec<f64>),
        }
        let entries: Vec<Entry> =
            serde_json::from_str(trimmed).map_err(|e| PadeError::Parse(e.to_string()))?;
        return entries
            .into_iter()
            .enumerate()
            .map(|(i, entry)| match entry {
                Entry::Real(re) => Ok(Complex64::new(re, 0.0)),
                Entry::Pair(p) => match p.as_slice() {
                    [re, im] => Ok(Complex64::new(*re, *im)),
                    [re] => Ok(Complex64::new(*re, 0.0)),
                    _ => Err(PadeError::Parse(format!(
                        "entry {i}: expected [re, im], got {} numbers",
                        p.len()
                    ))),
                },
            })
            .collect();
    }

    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        let num = |f: &str| {
            f.parse::<f64>()
                .map_err(|e| PadeError::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let value = match fields.as_slice() {
            [re] => Complex64::new(num(re)?, 0.0),
            [re, im] => Complex64::new(num(re)?, num(im)?),
            _ => {
                return Err(PadeError::Parse(format!(
                    "line {}: expected `re im`",
                    lineno + 1
                )))
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Geometric series with multiplicative uniform noise, `c_i = 1 + eps * r_i`.
///
/// Declares `t = -log10(eps)` accurate digits when `eps > 0`.
pub fn gen_geometric_noisy<R: Rng + ?Sized>(n: usize, eps: f64, rng: &mut R) -> Result<PowerSeries> {
    if n == 0 {
        return Err(PadeError::InvalidInput("n must be at least 1".into()));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(PadeError::InvalidInput(format!("noise level must be nonnegative, got {eps}")));
    }
    let coeffs = (0..n)
        .map(|_| {
            let r: f64 = rng.random_range(-1.0..=1.0);
            Complex64::new(1.0 + eps * r, 0.0)
        })
        .collect();
    let s = PowerSeries::new(coeffs)?;
    if eps > 0.0 {
        s.with_digits(-eps.log10())
    } else {
        Ok(s)
    }
}

/// Maclaurin coefficients of `ln(1.2 - z)`.
pub fn gen_log_series(n: usize) -> Result<PowerSeries> {
    if n == 0 {
        return Err(PadeError::InvalidInput("n must be at least 1".into()));
    }
    let coeffs = (0..n)
        .map(|i| {
            if i == 0 {
                Complex64::new(1.2f64.ln(), 0.0)
            } else {
                Complex64::new(-1.0 / (i as f64 * 1.2f64.powi(i as i32)), 0.0)
            }
        })
        .collect();
    PowerSeries::new(coeffs)
}

/// Exact series of `Σ_j e_j / (1 - z / p_j)`: `c_i = Σ_j e_j p_j^{-i}`.
pub fn gen_from_poles(poles: &[Complex64], weights: &[Complex64], n: usize) -> Result<PowerSeries> {
    if poles.is_empty() || poles.len() != weights.len() {
        return Err(PadeError::InvalidInput(format!(
            "need matching nonempty pole and weight lists, got {} and {}",
            poles.len(),
            weights.len()
        )));
    }
    if n == 0 {
        return Err(PadeError::InvalidInput("n must be at least 1".into()));
    }
    if poles.iter().any(|p| p.norm() == 0.0) {
        return Err(PadeError::ZeroPole);
    }
    if poles.iter().chain(weights).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(PadeError::NonFinite);
    }
    for (i, a) in poles.iter().enumerate() {
        if let Some(b) = poles[i + 1..].iter().find(|b| *b == a) {
            return Err(PadeError::DuplicatePole(*a, *b));
        }
    }
    let inv: Vec<Complex64> = poles.iter().map(|p| p.inv()).collect();
    let mut powers: Vec<Complex64> = weights.to_vec();
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        coeffs.push(powers.iter().sum());
        for (w, d) in powers.iter_mut().zip(&inv) {
            *w *= d;
        }
    }
    PowerSeries::new(coeffs)
}

/// `1 + eps z + z^2`, the perturbed degenerate example.
pub fn gen_quadratic_eps(eps: f64) -> Result<PowerSeries> {
    PowerSeries::from_real(&[1.0, eps, 1.0])
}
