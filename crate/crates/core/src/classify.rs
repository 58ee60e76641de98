//! Sorting approximant roots into system poles, Froissart doublets, and
//! far-out poles or zeros.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Radius around an expected pole location.
    pub system_tol: f64,
    /// Largest pole–zero separation still counted as a doublet.
    pub doublet_tol: f64,
    /// Magnitude beyond which unpaired roots are "far".
    pub far_tol: f64,
}

impl ClassifyThresholds {
    pub fn for_eps(eps: f64) -> Self {
        Self {
            system_tol: (1e3 * eps).max(1e-2),
            doublet_tol: 0.3,
            far_tol: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RootCounts {
    pub system_poles: usize,
    pub doublets: usize,
    pub far_poles: usize,
    pub far_zeros: usize,
    pub unclassified_poles: usize,
    pub unclassified_zeros: usize,
}

impl RootCounts {
    pub fn unclassified(&self) -> usize {
        self.unclassified_poles + self.unclassified_zeros
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootTaxonomy {
    pub system_poles: Vec<Complex64>,
    /// `(pole, zero)` pairs.
    pub doublets: Vec<(Complex64, Complex64)>,
    pub far_poles: Vec<Complex64>,
    pub far_zeros: Vec<Complex64>,
    pub unclassified_poles: Vec<Complex64>,
    pub unclassified_zeros: Vec<Complex64>,
}

impl RootTaxonomy {
    pub fn counts(&self) -> RootCounts {
        RootCounts {
            system_poles: self.system_poles.len(),
            doublets: self.doublets.len(),
            far_poles: self.far_poles.len(),
            far_zeros: self.far_zeros.len(),
            unclassified_poles: self.unclassified_poles.len(),
            unclassified_zeros: self.unclassified_zeros.len(),
        }
    }
}

/// [`classify_roots_with`] at the default thresholds for noise level `eps`.
pub fn classify_roots(
    poles: &[Complex64],
    zeros: &[Complex64],
    expected_system: &[Complex64],
    eps: f64,
) -> RootTaxonomy {
    classify_roots_with(poles, zeros, expected_system, &ClassifyThresholds::for_eps(eps))
}

pub fn classify_roots_with(
    poles: &[Complex64],
    zeros: &[Complex64],
    expected_system: &[Complex64],
    th: &ClassifyThresholds,
) -> RootTaxonomy {
    let mut pole_used = vec![false; poles.len()];
    let mut zero_used = vec![false; zeros.len()];
    let mut out = RootTaxonomy::default();

    for &target in expected_system {
        let nearest = poles
            .iter()
            .enumerate()
            .filter(|&(i, _)| !pole_used[i])
            .map(|(i, p)| (i, (p - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, d)) = nearest {
            if d <= th.system_tol {
                pole_used[i] = true;
                out.system_poles.push(poles[i]);
            }
        }
    }

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in poles.iter().enumerate().filter(|&(i, _)| !pole_used[i]) {
        for (j, z) in zeros.iter().enumerate() {
            let d = (p - z).norm();
            if d <= th.doublet_tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, i, j) in pairs {
        if !pole_used[i] && !zero_used[j] {
            pole_used[i] = true;
            zero_used[j] = true;
            out.doublets.push((poles[i], zeros[j]));
        }
    }

    for (&p, _) in poles.iter().zip(&pole_used).filter(|(_, &used)| !used) {
        if p.norm() >= th.far_tol {
            out.far_poles.push(p);
        } else {
            out.unclassified_poles.push(p);
        }
    }
    for (&z, _) in zeros.iter().zip(&zero_used).filter(|(_, &used)| !used) {
        if z.norm() >= th.far_tol {
            out.far_zeros.push(z);
        } else {
            out.unclassified_zeros.push(z);
        }
    }
    out
}
