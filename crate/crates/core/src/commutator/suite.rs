//! Operator-norm ratio measurements over random ensembles.
//!
//! Each suite draws an ensemble once at the largest resolution and truncates
//! it for the smaller ones, so ratios at different `K` come from the same
//! functions. The suites check the conclusions of the estimates; the symbol
//! class hypotheses behind them have no lattice counterpart and are not
//! tested.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::commutators::{commutator_l_f, commutator_l_f_split, commutator_pl_dx, commutator_pl_f};
use crate::error::{Error, Result};
use crate::generate::{gaussian_profile, normalized, real_profile, rng};
use crate::model::{dx, CutoffChi, CutoffGeometry, Damper};
use crate::spectral::{multiply_truncated, sobolev_norm, SpectralField};

/// Allowed growth of the ensemble maximum per resolution doubling.
pub const GROWTH_TOLERANCE: f64 = 0.10;

/// Low-pass thresholds used for the `[L, f]` split diagnostics.
pub const SPLIT_LAMBDAS: [f64; 3] = [1.0, 4.0, 16.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaId {
    /// `‖[P_L^k, ∂ₓ]u‖_s ≲ ‖u‖_{s+kα−α}`
    #[serde(rename = "L3.1")]
    PlDx,
    /// `‖[P_L^k, f]u‖_s ≲ ‖f‖_r ‖u‖_{s+kα−1}`
    #[serde(rename = "L3.2")]
    PlF,
    /// `‖[L, f]u‖_s ≲ ‖f‖_r ‖u‖_{s+α−1}`
    #[serde(rename = "L3.4")]
    LF,
    /// `‖uv‖_s ≲ ‖u‖_s ‖v‖_s`, `s > 1/2`
    #[serde(rename = "A.2")]
    Algebra,
    /// Bernstein bounds for ∂ₓ on dyadic annuli and balls.
    #[serde(rename = "A.4")]
    Bernstein,
}

impl LemmaId {
    pub const ALL: [LemmaId; 5] = [LemmaId::PlDx, LemmaId::PlF, LemmaId::LF, LemmaId::Algebra, LemmaId::Bernstein];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::PlDx => "L3.1",
            LemmaId::PlF => "L3.2",
            LemmaId::LF => "L3.4",
            LemmaId::Algebra => "A.2",
            LemmaId::Bernstein => "A.4",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown lemma {s:?} (L3.1, L3.2, L3.4, A.2, A.4)")))
    }
}

/// `(k, α, s, r)`; entries a lemma does not use are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub k: usize,
    pub alpha: f64,
    pub s: f64,
    pub r: f64,
}

impl SuiteParams {
    pub fn new(k: usize, alpha: f64, s: f64, r: f64) -> Self {
        Self { k, alpha, s, r }
    }
}

fn refuse(lemma: LemmaId, constraint: String) -> Error {
    Error::Inadmissible {
        lemma: lemma.name().to_owned(),
        constraint,
    }
}

/// Parameter admissibility, naming the violated inequality.
pub fn check_admissible(lemma: LemmaId, p: &SuiteParams) -> Result<()> {
    let SuiteParams { k, alpha, s, r } = *p;
    let uses_alpha = matches!(lemma, LemmaId::PlDx | LemmaId::PlF | LemmaId::LF);
    if uses_alpha && !(alpha > 0.0 && alpha <= 2.0) {
        return Err(refuse(lemma, format!("α ∈ (0, 2] violated by α = {alpha}")));
    }
    if matches!(lemma, LemmaId::PlDx | LemmaId::PlF) && !(1..=4).contains(&k) {
        return Err(refuse(lemma, format!("1 ≤ k ≤ 4 violated by k = {k}")));
    }
    if uses_alpha && !(s >= 0.0) {
        return Err(refuse(lemma, format!("s ≥ 0 violated by s = {s}")));
    }
    match lemma {
        LemmaId::PlF | LemmaId::LF if !(r > 1.5) => Err(refuse(lemma, format!("r > 3/2 violated by r = {r}"))),
        LemmaId::PlF if s + k as f64 * alpha > r => {
            Err(refuse(lemma, format!("s + kα ≤ r violated: {} > {r}", s + k as f64 * alpha)))
        }
        LemmaId::LF if s + alpha > r => Err(refuse(lemma, format!("s + α ≤ r violated: {} > {r}", s + alpha))),
        LemmaId::Algebra if !(s > 0.5) => Err(refuse(lemma, format!("s > 1/2 violated by s = {s}"))),
        _ => Ok(()),
    }
}

/// One ratio suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub lemma: LemmaId,
    pub params: SuiteParams,
    pub ensemble: usize,
    pub seed: u64,
    pub resolutions: Vec<usize>,
    pub cutoff: CutoffGeometry,
}

impl SuiteSpec {
    pub fn new(lemma: LemmaId, params: SuiteParams, ensemble: usize, seed: u64) -> Self {
        Self {
            lemma,
            params,
            ensemble,
            seed,
            resolutions: vec![32, 64, 128, 256],
            cutoff: CutoffGeometry::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    /// `K=<n>` for ratio suites, `p=<n>/annulus` or `p=<n>/ball` for Bernstein.
    pub group: String,
    pub resolution: usize,
    pub member: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionRow {
    pub resolution: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio` over the previous row's, when there is one.
    pub growth: Option<f64>,
}

/// Ensemble maxima of the low- and high-frequency parts of `[L, f]u`,
/// normalised like the full ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRow {
    pub resolution: usize,
    pub lambda: f64,
    pub max_low: f64,
    pub max_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRow {
    pub p: u32,
    pub support: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub lemma: LemmaId,
    pub params: Option<SuiteParams>,
    pub ensemble: usize,
    pub seed: u64,
    pub rows: Vec<ResolutionRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub split: Vec<SplitRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bernstein: Vec<BernsteinRow>,
    pub verdict: bool,
    #[serde(skip)]
    pub samples: Vec<RatioSample>,
}

impl CommutatorReport {
    /// Largest ratio at each resolution, in resolution order.
    pub fn max_ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.max_ratio).collect()
    }

    pub fn overall_max(&self) -> f64 {
        self.samples.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// Every sample as `lemma,group,resolution,member,ratio`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "lemma,group,resolution,member,ratio")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{},{:e}", self.lemma, s.group, s.resolution, s.member, s.ratio)?;
        }
        Ok(())
    }
}

/// `true` when no ensemble maximum exceeds the previous one by more than
/// [`GROWTH_TOLERANCE`].
pub fn bounded_growth(maxima: &[f64]) -> bool {
    maxima.iter().all(|m| m.is_finite() && *m >= 0.0)
        && maxima
            .windows(2)
            .all(|w| w[1] <= (1.0 + GROWTH_TOLERANCE) * w[0])
}

struct MemberResult {
    ratios: Vec<f64>,
    split: Vec<(f64, f64)>,
}

/// Runs a ratio suite for L3.1, L3.2, L3.4 or A.2.
pub fn ratio_suite(spec: &SuiteSpec) -> Result<CommutatorReport> {
    let lemma = spec.lemma;
    if lemma == LemmaId::Bernstein {
        return Err(Error::param("use bernstein_suite for A.4"));
    }
    check_admissible(lemma, &spec.params)?;
    if spec.ensemble == 0 {
        return Err(Error::param("ensemble must be non-empty"));
    }
    let mut resolutions = spec.resolutions.clone();
    resolutions.sort_unstable();
    resolutions.dedup();
    let k_top = *resolutions
        .last()
        .ok_or_else(|| Error::param("at least one resolution is required"))?;
    if resolutions[0] == 0 {
        return Err(Error::param("resolutions must be positive"));
    }
    let damper = Damper::Cutoff(CutoffChi::from_geometry(spec.cutoff, k_top)?);
    let p = spec.params;

    let members: Vec<MemberResult> = (0..spec.ensemble)
        .into_par_iter()
        .map(|m| member(lemma, &p, &damper, spec.seed, m, k_top, &resolutions))
        .collect();

    let mut samples = Vec::with_capacity(spec.ensemble * resolutions.len());
    let mut rows = Vec::with_capacity(resolutions.len());
    let mut split = Vec::new();
    for (i, &k) in resolutions.iter().enumerate() {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (m, res) in members.iter().enumerate() {
            let ratio = res.ratios[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            samples.push(RatioSample {
                group: format!("K={k}"),
                resolution: k,
                member: m,
                ratio,
            });
        }
        let growth = rows.last().map(|prev: &ResolutionRow| hi / prev.max_ratio);
        rows.push(ResolutionRow {
            resolution: k,
            max_ratio: hi,
            min_ratio: lo,
            growth,
        });
        if lemma == LemmaId::LF {
            for (j, &lambda) in SPLIT_LAMBDAS.iter().enumerate() {
                let idx = i * SPLIT_LAMBDAS.len() + j;
                let max_low = members.iter().map(|r| r.split[idx].0).fold(0.0, f64::max);
                let max_high = members.iter().map(|r| r.split[idx].1).fold(0.0, f64::max);
                split.push(SplitRow {
                    resolution: k,
                    lambda,
                    max_low,
                    max_high,
                });
            }
        }
    }
    let verdict = bounded_growth(&rows.iter().map(|r| r.max_ratio).collect::<Vec<_>>());
    Ok(CommutatorReport {
        lemma,
        params: Some(p),
        ensemble: spec.ensemble,
        seed: spec.seed,
        rows,
        split,
        bernstein: Vec::new(),
        verdict,
        samples,
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn member(
    lemma: LemmaId,
    p: &SuiteParams,
    damper: &Damper,
    seed: u64,
    m: usize,
    k_top: usize,
    resolutions: &[usize],
) -> MemberResult {
    let SuiteParams { k, alpha, s, r } = *p;
    let kf = k as f64;
    let u_decay = match lemma {
        LemmaId::PlDx | LemmaId::PlF => s + kf * alpha + 0.55,
        LemmaId::LF => s + alpha + 0.55,
        _ => s + 0.55,
    };
    let u_top = gaussian_profile(k_top, u_decay, &mut rng(seed, 2 * m as u64));
    let second = match lemma {
        LemmaId::Algebra => gaussian_profile(k_top, s + 0.55, &mut rng(seed, 2 * m as u64 + 1)),
        _ => normalized(real_profile(k_top, r + 0.55, &mut rng(seed, 2 * m as u64 + 1)), r, 1.0),
    };
    let mut ratios = Vec::with_capacity(resolutions.len());
    let mut split = Vec::new();
    for &kr in resolutions {
        let u = u_top.resized(kr);
        let g = second.resized(kr);
        let value = match lemma {
            LemmaId::PlDx => ratio(
                sobolev_norm(&commutator_pl_dx(&u, damper, alpha, k), s),
                sobolev_norm(&u, s + kf * alpha - alpha),
            ),
            LemmaId::PlF => ratio(
                sobolev_norm(&commutator_pl_f(&u, &g, damper, alpha, k), s),
                sobolev_norm(&g, r) * sobolev_norm(&u, s + kf * alpha - 1.0),
            ),
            LemmaId::LF => {
                let den = sobolev_norm(&g, r) * sobolev_norm(&u, s + alpha - 1.0);
                for &lambda in &SPLIT_LAMBDAS {
                    let n = commutator_l_f_split(&u, &g, alpha, lambda).norms(s);
                    split.push((ratio(n.low, den), ratio(n.high, den)));
                }
                ratio(sobolev_norm(&commutator_l_f(&u, &g, alpha), s), den)
            }
            LemmaId::Algebra => {
                let uv = multiply_truncated(&u, &g, 2 * kr, true);
                ratio(sobolev_norm(&uv, s), sobolev_norm(&u, s) * sobolev_norm(&g, s))
            }
            LemmaId::Bernstein => unreachable!(),
        };
        ratios.push(value);
    }
    MemberResult { ratios, split }
}

/// Slack allowed on the Bernstein bounds for rounding in the norm ratio.
const BERNSTEIN_SLACK: f64 = 1e-14;

/// Bernstein checks for `p ∈ p_range` at band `k_max`: annulus-supported
/// fields (`2^{p−1} ≤ |k| ≤ 2^{p+1}`) must give `‖∂ₓu‖_0 / (2^p ‖u‖_0) ∈ [1/2, 2]`,
/// ball-supported fields (`|k| ≤ 2^p`) a ratio at most 1.
pub fn bernstein_suite(p_range: std::ops::RangeInclusive<u32>, ensemble: usize, seed: u64, k_max: usize) -> Result<CommutatorReport> {
    if ensemble == 0 {
        return Err(Error::param("ensemble must be non-empty"));
    }
    for p in p_range.clone() {
        if (1usize << (p + 1)) > k_max {
            return Err(refuse(LemmaId::Bernstein, format!("2^(p+1) ≤ K violated: p = {p}, K = {k_max}")));
        }
    }
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for p in p_range {
        let scale = (1u64 << p) as f64;
        for (support, lo_k, hi_k, lower, upper) in [
            ("annulus", 1i64 << p.saturating_sub(1), 1i64 << (p + 1), 0.5, 2.0),
            ("ball", 0, 1i64 << p, 0.0, 1.0),
        ] {
            // p = 0 has annulus 1/2 ≤ |k| ≤ 2, i.e. 1 ≤ |k| ≤ 2
            let lo_k = if support == "annulus" && p == 0 { 1 } else { lo_k };
            let ratios: Vec<f64> = (0..ensemble)
                .into_par_iter()
                .map(|m| {
                    let stream = ((p as u64) << 32) | ((support == "ball") as u64) << 31 | m as u64;
                    let mut g = rng(seed, stream);
                    let full = gaussian_profile(k_max, 0.0, &mut g);
                    let u = full.map_modes(|k, c| {
                        if (lo_k..=hi_k).contains(&k.abs()) {
                            c
                        } else {
                            Default::default()
                        }
                    });
                    ratio(sobolev_norm(&dx(&u), 0.0), scale * sobolev_norm(&u, 0.0))
                })
                .collect();
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let max = ratios.iter().copied().fold(0.0, f64::max);
            let within = min >= lower * (1.0 - BERNSTEIN_SLACK) && max <= upper * (1.0 + BERNSTEIN_SLACK);
            for (m, ratio) in ratios.into_iter().enumerate() {
                samples.push(RatioSample {
                    group: format!("p={p}/{support}"),
                    resolution: k_max,
                    member: m,
                    ratio,
                });
            }
            rows.push(BernsteinRow {
                p,
                support: support.to_owned(),
                min_ratio: min,
                max_ratio: max,
                lower,
                upper,
                within,
            });
        }
    }
    let verdict = rows.iter().all(|r| r.within);
    Ok(CommutatorReport {
        lemma: LemmaId::Bernstein,
        params: None,
        ensemble,
        seed,
        rows: Vec::new(),
        split: Vec::new(),
        bernstein: rows,
        verdict,
        samples,
    })
}

/// Bernstein ratio of a single field.
pub fn bernstein_ratio(u: &SpectralField, p: u32) -> f64 {
    ratio(sobolev_norm(&dx(u), 0.0), (1u64 << p) as f64 * sobolev_norm(u, 0.0))
}

/// The suites run by the `commutator-suite` experiment: L3.1 for
/// `k = 1..4`, `α ∈ {1/2, 3/2}`, `s = 0`; L3.2 at `s = 0` with the smallest
/// admissible `r ≥ 2`; L3.4 at `s = 0`, `r = 2`.
pub fn standard_suites() -> Vec<(LemmaId, SuiteParams)> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.5] {
        for k in 1..=4 {
            out.push((LemmaId::PlDx, SuiteParams::new(k, alpha, 0.0, 0.0)));
        }
    }
    for alpha in [0.5, 1.5] {
        for k in 1..=4 {
            let r = (k as f64 * alpha).max(2.0);
            out.push((LemmaId::PlF, SuiteParams::new(k, alpha, 0.0, r)));
        }
    }
    for alpha in [0.5, 1.5] {
        out.push((LemmaId::LF, SuiteParams::new(1, alpha, 0.0, 2.0)));
    }
    out
}
