//! Spectral statistics: two-sided counting functions, Weyl fits, and
//! localization of eigenfunctions by `L²` mass.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fem::{partial_mass, TriangleMesh};
use crate::geometry::TwoPhaseDiskConfig;
use crate::numerics::fmt17;
use crate::radial::{mode_profile, RadialProfile, SpectrumRecord};

/// Minimum number of eigenvalues of each sign in a fit window.
pub const MIN_FIT_EIGENVALUES: usize = 30;

/// Sorted eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingFunction {
    /// Ascending positive-or-zero eigenvalues and multiplicities.
    nonneg: Vec<(f64, u32)>,
    /// Negative eigenvalues by ascending `|λ|`.
    neg: Vec<(f64, u32)>,
}

impl CountingFunction {
    pub fn new(values: impl IntoIterator<Item = (f64, u32)>) -> Self {
        let mut nonneg = Vec::new();
        let mut neg = Vec::new();
        for (l, m) in values {
            if l >= 0.0 {
                nonneg.push((l, m));
            } else {
                neg.push((-l, m));
            }
        }
        nonneg.sort_by(|a, b| a.0.total_cmp(&b.0));
        neg.sort_by(|a, b| a.0.total_cmp(&b.0));
        CountingFunction { nonneg, neg }
    }

    pub fn from_records(records: &[SpectrumRecord]) -> Self {
        Self::new(records.iter().map(|r| (r.lambda, r.multiplicity)))
    }

    fn cumulative(list: &[(f64, u32)], lambda: f64) -> u64 {
        let k = list.partition_point(|&(l, _)| l <= lambda);
        list[..k].iter().map(|&(_, m)| u64::from(m)).sum()
    }

    /// `(N₊(λ), N₋(λ))`: `N₊ = #{0 ≤ λⱼ ≤ λ}`, `N₋ = #{−λ ≤ λⱼ < 0}`.
    pub fn count(&self, lambda: f64) -> (u64, u64) {
        (Self::cumulative(&self.nonneg, lambda), Self::cumulative(&self.neg, lambda))
    }

    /// Multiplicity-weighted counts of each sign with `lo ≤ |λ| ≤ hi`.
    pub fn in_window(&self, lo: f64, hi: f64) -> (u64, u64) {
        let (p_hi, m_hi) = self.count(hi);
        let (p_lo, m_lo) = self.count(lo.next_down());
        (p_hi - p_lo, m_hi - m_lo)
    }
}

/// `N₊(λ)` and `N₋(λ)`; zero eigenvalues count in `N₊`.
pub fn count(counting: &CountingFunction, lambda: f64) -> (u64, u64) {
    counting.count(lambda)
}

/// Through-origin fit of one counting function against `λ^{d/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginFit {
    pub slope: f64,
    pub r2: f64,
}

pub fn origin_fit(xs: &[f64], ys: &[f64]) -> OriginFit {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let slope = sxy / sxx;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x).powi(2)).sum();
    OriginFit {
        slope,
        r2: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
    }
}

/// Evaluation grid of a fit window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        FitWindow { lo, hi, samples: 151 }
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn check(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::InputInvalid(format!(
                "fit window [{}, {}] must satisfy 0 ≤ lo < hi",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylFit {
    pub plus: OriginFit,
    pub minus: OriginFit,
}

/// Least-squares fits `N±(λ) ≈ s± λ^{d/2}` through the origin.
pub fn weyl_fit(counting: &CountingFunction, d: u32, window: FitWindow) -> Result<WeylFit> {
    window.check()?;
    let (have_p, have_m) = counting.in_window(window.lo, window.hi);
    for (sign, have) in [("positive", have_p), ("negative", have_m)] {
        if (have as usize) < MIN_FIT_EIGENVALUES {
            return Err(Error::NotEnoughEigenvalues {
                sign,
                have: have as usize,
                need: MIN_FIT_EIGENVALUES,
            });
        }
    }
    let grid = window.grid();
    let xs: Vec<f64> = grid.iter().map(|l| l.powf(d as f64 / 2.0)).collect();
    let (np, nm): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .map(|&l| {
            let (p, m) = counting.count(l);
            (p as f64, m as f64)
        })
        .unzip();
    Ok(WeylFit {
        plus: origin_fit(&xs, &np),
        minus: origin_fit(&xs, &nm),
    })
}

/// Fit of the symmetric count `#{|λⱼ| ≤ λ}` against `λ^{d/2}`.
pub fn combined_weyl(counting: &CountingFunction, d: u32, window: FitWindow) -> Result<OriginFit> {
    window.check()?;
    let (have_p, have_m) = counting.in_window(window.lo, window.hi);
    let have = (have_p + have_m) as usize;
    if have < MIN_FIT_EIGENVALUES {
        return Err(Error::NotEnoughEigenvalues {
            sign: "total",
            have,
            need: MIN_FIT_EIGENVALUES,
        });
    }
    let grid = window.grid();
    let xs: Vec<f64> = grid.iter().map(|l| l.powf(d as f64 / 2.0)).collect();
    let ys: Vec<f64> = grid
        .iter()
        .map(|&l| {
            let (p, m) = counting.count(l);
            (p + m) as f64
        })
        .collect();
    Ok(origin_fit(&xs, &ys))
}

/// CSV with columns `lambda,n_plus,n_minus` on a uniform grid of `[0, Λ]`.
pub fn write_counting_csv<W: Write>(
    mut w: W,
    counting: &CountingFunction,
    lambda_max: f64,
    samples: usize,
) -> std::io::Result<()> {
    writeln!(w, "lambda,n_plus,n_minus")?;
    let n = samples.max(2);
    for i in 0..n {
        let l = lambda_max * i as f64 / (n - 1) as f64;
        let (p, m) = counting.count(l);
        writeln!(w, "{},{p},{m}", fmt17(l))?;
    }
    Ok(())
}

/// Where an eigenfunction lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    BulkPlus,
    BulkMinus,
    Interface,
}

/// `L²` mass fractions in `{r < rz − δ}`, `{r > rz + δ}` and the tube
/// `{|r − rz| ≤ δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeClassification {
    pub m_plus: f64,
    pub m_minus: f64,
    pub m_tube: f64,
    pub class: ModeClass,
    pub delta: f64,
}

const NORMALIZATION_TOL: f64 = 1e-6;

fn classify_masses(m_plus: f64, m_minus: f64, m_tube: f64, delta: f64, threshold: f64) -> Result<ModeClassification> {
    let total = m_plus + m_minus + m_tube;
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InputInvalid(format!(
            "eigenfunction is not normalized (squared norm {total})"
        )));
    }
    let (m_plus, m_minus, m_tube) = (m_plus / total, m_minus / total, m_tube / total);
    let class = if m_tube >= threshold {
        ModeClass::Interface
    } else if m_plus >= m_minus {
        ModeClass::BulkPlus
    } else {
        ModeClass::BulkMinus
    };
    Ok(ModeClassification {
        m_plus,
        m_minus,
        m_tube,
        class,
        delta,
    })
}

/// Classify an oracle profile normalized to `2π∫f²r dr = 1`.
pub fn classify_profile(config: &TwoPhaseDiskConfig, profile: &RadialProfile, delta: f64) -> Result<ModeClassification> {
    let (rz, ry) = (config.rz, config.ry);
    classify_masses(
        profile.mass_between(0.0, rz - delta),
        profile.mass_between(rz + delta, ry),
        profile.mass_between(rz - delta, rz + delta),
        delta,
        config.tolerances.interface_threshold,
    )
}

/// Classify an `M`-normalized finite-element vector given on mesh vertices.
pub fn classify_vertex_field(
    config: &TwoPhaseDiskConfig,
    mesh: &TriangleMesh,
    values: &[f64],
    delta: f64,
) -> Result<ModeClassification> {
    if values.len() != mesh.vertices.len() {
        return Err(Error::InputInvalid(format!(
            "field has {} values for {} vertices",
            values.len(),
            mesh.vertices.len()
        )));
    }
    let rz = config.rz;
    classify_masses(
        partial_mass(mesh, values, |r| r < rz - delta),
        partial_mass(mesh, values, |r| r > rz + delta),
        partial_mass(mesh, values, |r| (r - rz).abs() <= delta),
        delta,
        config.tolerances.interface_threshold,
    )
}

/// Classification with the configured default tube width.
pub fn classify(config: &TwoPhaseDiskConfig, profile: &RadialProfile) -> Result<ModeClassification> {
    classify_profile(config, profile, config.tube_width())
}

/// Sample count per phase used for oracle profiles.
pub const PROFILE_POINTS: usize = 800;

/// One member of a localization family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationPoint {
    pub lambda: f64,
    pub n: u32,
    /// Mass in the band `[band.0, band.1]`.
    pub band_mass: f64,
    pub class: ModeClass,
}

/// Band mass of each non-interface mode in `family`, ordered by `|λ|`.
pub fn localization_trend(
    config: &TwoPhaseDiskConfig,
    family: &[SpectrumRecord],
    band: (f64, f64),
    exec: Exec,
) -> Result<Vec<LocalizationPoint>> {
    let mut recs = family.to_vec();
    recs.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
    let out = exec.map(&recs, |r| -> Result<Option<LocalizationPoint>> {
        let p = mode_profile(config, r.n, r.lambda, PROFILE_POINTS)?;
        let c = classify(config, &p)?;
        Ok((c.class != ModeClass::Interface).then(|| LocalizationPoint {
            lambda: r.lambda,
            n: r.n,
            band_mass: p.mass_between(band.0, band.1),
            class: c.class,
        }))
    });
    let mut pts = Vec::with_capacity(out.len());
    for p in out {
        if let Some(p) = p? {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Classification of every record (in input order).
pub fn classify_records(
    config: &TwoPhaseDiskConfig,
    records: &[SpectrumRecord],
    exec: Exec,
) -> Result<Vec<ModeClassification>> {
    exec.map(records, |r| {
        let p = mode_profile(config, r.n, r.lambda, PROFILE_POINTS)?;
        classify(config, &p)
    })
    .into_iter()
    .collect()
}

/// Multiplicity-weighted number of interface-class modes with `0 < λ ≤ Λ`.
pub fn interface_mode_count(
    config: &TwoPhaseDiskConfig,
    records: &[SpectrumRecord],
    lambda_max: f64,
    exec: Exec,
) -> Result<u64> {
    let window: Vec<SpectrumRecord> = records
        .iter()
        .filter(|r| r.lambda > 0.0 && r.lambda <= lambda_max)
        .cloned()
        .collect();
    let classes = classify_records(config, &window, exec)?;
    Ok(window
        .iter()
        .zip(&classes)
        .filter(|(_, c)| c.class == ModeClass::Interface)
        .map(|(r, _)| u64::from(r.multiplicity))
        .sum())
}
