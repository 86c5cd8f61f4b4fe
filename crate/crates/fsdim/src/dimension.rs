//! Finite-prefix estimators for block entropy rates, block mutual
//! information rates, and the finite-state (mutual) dimensions, plus
//! the alpha-normality measurements.
//!
//! The limits in the definitions are asymptotic; every report here is a
//! documented finite surrogate. liminf/limsup become min/max over the
//! tail window of the n grid, and the limit over block lengths becomes
//! the value at the largest block length the prefix can support with
//! adequate coverage. All surrogate parameters appear in the reports.

use serde::Serialize;

use crate::alphabet::{prefix_truncate, ProbMeasure, SymbolString};
use crate::blockstats::{
    block_freq_table, decode_block, joint_block_freq_table, kl_divergence, mutual_information,
};
use crate::error::{Error, Result};
use crate::ratios::catalog_rho;

/// Minimum expected occurrences per joint-table cell for a block length
/// to count as covered.
pub const COVERAGE_MIN_OCCURRENCES: u64 = 25;

/// Default fraction of trailing n-grid points used as the
/// liminf/limsup window.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

/// Default largest block length examined.
pub const DEFAULT_L_MAX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    Entropy,
    JointEntropy,
    MutualInformation,
}

/// Normalized rates on an (l, n) grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateGrid {
    pub kind: RateKind,
    pub l_values: Vec<usize>,
    pub n_values: Vec<usize>,
    /// values[i][j] is the rate at l_values[i], n_values[j]
    pub values: Vec<Vec<f64>>,
}

impl RateGrid {
    pub fn value(&self, l: usize, n: usize) -> Option<f64> {
        let i = self.l_values.iter().position(|&x| x == l)?;
        let j = self.n_values.iter().position(|&x| x == n)?;
        Some(self.values[i][j])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,n,value\n");
        for (i, &l) in self.l_values.iter().enumerate() {
            for (j, &n) in self.n_values.iter().enumerate() {
                out.push_str(&format!("{l},{n},{}\n", self.values[i][j]));
            }
        }
        out
    }
}

fn validate_grid(l_values: &[usize], n_values: &[usize], len: usize) -> Result<()> {
    if l_values.is_empty() || n_values.is_empty() {
        return Err(Error::InvalidArgument("grid must be nonempty".into()));
    }
    if let Some(&l) = l_values.iter().find(|&&l| l == 0) {
        return Err(Error::InvalidArgument(format!("block length {l} invalid")));
    }
    if let Some(&n) = n_values.iter().find(|&&n| n > len) {
        return Err(Error::GridExceedsPrefix { n, len });
    }
    Ok(())
}

/// Per-point H(pi^(l)) / (l log k) over prefixes of `u`.
pub fn entropy_rate_curve(
    u: &SymbolString,
    l_values: &[usize],
    n_values: &[usize],
) -> Result<RateGrid> {
    validate_grid(l_values, n_values, u.len())?;
    let k = u.alphabet_size() as f64;
    let mut values = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let mut row = Vec::with_capacity(n_values.len());
        for &n in n_values {
            let trimmed = prefix_truncate(&u.prefix(n), l)?;
            let h = block_freq_table(&trimmed, l)?.entropy();
            row.push(h / (l as f64 * k.log2()));
        }
        values.push(row);
    }
    Ok(RateGrid { kind: RateKind::Entropy, l_values: l_values.to_vec(), n_values: n_values.to_vec(), values })
}

/// Per-point H(pi_{u,w}^(l)) / (l log k); values lie in [0, 2].
pub fn joint_entropy_rate_curve(
    u: &SymbolString,
    w: &SymbolString,
    l_values: &[usize],
    n_values: &[usize],
) -> Result<RateGrid> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch(u.len(), w.len()));
    }
    validate_grid(l_values, n_values, u.len())?;
    let k = u.alphabet_size() as f64;
    let mut values = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let mut row = Vec::with_capacity(n_values.len());
        for &n in n_values {
            let ul = prefix_truncate(&u.prefix(n), l)?;
            let wl = prefix_truncate(&w.prefix(n), l)?;
            let h = joint_block_freq_table(&ul, &wl, l)?.entropy();
            row.push(h / (l as f64 * k.log2()));
        }
        values.push(row);
    }
    Ok(RateGrid {
        kind: RateKind::JointEntropy,
        l_values: l_values.to_vec(),
        n_values: n_values.to_vec(),
        values,
    })
}

/// Per-point I(pi_u^(l); pi_w^(l)) / (l log k), computed from one joint
/// table per point with derived marginals. Raw values are kept (they
/// may dip a hair below zero in floating point).
pub fn mutual_info_rate_curve(
    u: &SymbolString,
    w: &SymbolString,
    l_values: &[usize],
    n_values: &[usize],
) -> Result<RateGrid> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch(u.len(), w.len()));
    }
    validate_grid(l_values, n_values, u.len())?;
    let k = u.alphabet_size() as f64;
    let mut values = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let mut row = Vec::with_capacity(n_values.len());
        for &n in n_values {
            let ul = prefix_truncate(&u.prefix(n), l)?;
            let wl = prefix_truncate(&w.prefix(n), l)?;
            let j = joint_block_freq_table(&ul, &wl, l)?;
            row.push(mutual_information(&j) / (l as f64 * k.log2()));
        }
        values.push(row);
    }
    Ok(RateGrid {
        kind: RateKind::MutualInformation,
        l_values: l_values.to_vec(),
        n_values: n_values.to_vec(),
        values,
    })
}

/// Estimator parameters, all surfaced in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimParams {
    pub l_max: usize,
    pub n_grid: Vec<usize>,
    pub tail_fraction: f64,
}

impl DimParams {
    /// Defaults for a prefix of length `n`: l up to 6, geometric n grid
    /// from 1024 (or the full prefix when shorter) doubling up to n,
    /// tail window 25%.
    pub fn for_length(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(DimParams {
            l_max: DEFAULT_L_MAX.min(n),
            n_grid: default_n_grid(n),
            tail_fraction: DEFAULT_TAIL_FRACTION,
        })
    }

    pub fn with_l_max(mut self, l_max: usize) -> Self {
        self.l_max = l_max;
        self
    }

    fn tail_window(&self) -> usize {
        ((self.n_grid.len() as f64 * self.tail_fraction).ceil() as usize)
            .clamp(1, self.n_grid.len())
    }
}

/// Geometric grid 1024, 2048, ... doubling up to and including `n`.
pub fn default_n_grid(n: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut v = 1024.min(n);
    while v < n {
        grid.push(v);
        v *= 2;
    }
    grid.push(n);
    grid
}

/// Tail min/max of one block length's curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerBlockSummary {
    pub l: usize,
    pub tail_lower: f64,
    pub tail_upper: f64,
}

/// A desk-scale approximation of the finite-state (mutual) dimension
/// pair: the tail window stands in for liminf/limsup and the value at
/// the covered block length l_star stands in for the limit over block
/// lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub grid: RateGrid,
    pub per_l: Vec<PerBlockSummary>,
    /// largest block length with floor(n_max / l) >= 25 * (k^2)^l
    pub l_star: usize,
    pub lower: f64,
    pub upper: f64,
    pub params: DimParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Largest covered block length for a prefix of length `n_max`:
/// floor(n_max / l) >= COVERAGE_MIN_OCCURRENCES * (k*k)^l. The squared
/// alphabet keeps single-string and joint estimates on the same grid.
pub fn coverage_l_star(k: usize, n_max: usize) -> usize {
    let mut best = 1;
    for l in 1..=64usize {
        let cells = match ((k * k) as u64).checked_pow(l as u32) {
            Some(c) => c,
            None => break,
        };
        if (n_max / l) as u64 >= COVERAGE_MIN_OCCURRENCES.saturating_mul(cells) {
            best = l;
        } else {
            break;
        }
    }
    best
}

fn summarize(grid: RateGrid, params: DimParams, k: usize) -> DimensionEstimate {
    let window = params.tail_window();
    let start = grid.n_values.len() - window;
    let per_l: Vec<PerBlockSummary> = grid
        .l_values
        .iter()
        .zip(grid.values.iter())
        .map(|(&l, row)| {
            let tail = &row[start..];
            PerBlockSummary {
                l,
                tail_lower: tail.iter().copied().fold(f64::INFINITY, f64::min),
                tail_upper: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    let n_max = *grid.n_values.iter().max().unwrap();
    let covered = coverage_l_star(k, n_max);
    let l_star = covered.min(params.l_max).max(1);
    let warning = (params.l_max > covered).then(|| {
        format!(
            "block lengths above {covered} lack coverage at n = {n_max} \
             (fewer than {COVERAGE_MIN_OCCURRENCES} expected occurrences per cell); \
             the final estimate uses l = {l_star}"
        )
    });
    let chosen = per_l
        .iter()
        .find(|p| p.l == l_star)
        .expect("l_star is on the grid");
    let (lower, upper) = (chosen.tail_lower, chosen.tail_upper);
    DimensionEstimate { grid, per_l, l_star, lower, upper, params, warning }
}

/// Block-entropy-rate estimate of the finite-state dimension pair of
/// `u`.
pub fn estimate_dim(u: &SymbolString, params: &DimParams) -> Result<DimensionEstimate> {
    let l_values: Vec<usize> = (1..=params.l_max).collect();
    let grid = entropy_rate_curve(u, &l_values, &params.n_grid)?;
    Ok(summarize(grid, params.clone(), u.alphabet_size()))
}

/// Block-mutual-information-rate estimate of the finite-state mutual
/// dimension pair of (`u`, `w`). On w = u this equals `estimate_dim(u)`
/// at every grid point, exactly.
pub fn estimate_mdim(
    u: &SymbolString,
    w: &SymbolString,
    params: &DimParams,
) -> Result<DimensionEstimate> {
    let l_values: Vec<usize> = (1..=params.l_max).collect();
    let grid = mutual_info_rate_curve(u, w, &l_values, &params.n_grid)?;
    Ok(summarize(grid, params.clone(), u.alphabet_size()))
}

/// Beta-compression-ratio estimate of the finite-state beta-dimension
/// pair: rho^beta over the catalog at each grid prefix, tail
/// summarized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaDimEstimate {
    pub budget: usize,
    pub n_values: Vec<usize>,
    pub values: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub tail_fraction: f64,
}

pub fn estimate_beta_dim(
    u: &SymbolString,
    beta: &ProbMeasure,
    r: usize,
    params: &DimParams,
) -> Result<BetaDimEstimate> {
    if let Some(&n) = params.n_grid.iter().find(|&&n| n > u.len()) {
        return Err(Error::GridExceedsPrefix { n, len: u.len() });
    }
    let mut values = Vec::with_capacity(params.n_grid.len());
    for &n in &params.n_grid {
        let prefix = u.prefix(n);
        let report = catalog_rho(&prefix, r)?;
        let bits = report
            .members
            .iter()
            .map(|m| m.output_bits)
            .min()
            .expect("catalog is nonempty");
        let denom = crate::blockstats::self_information(&prefix, beta)?;
        if denom == 0.0 {
            return Err(Error::ZeroSelfInformation);
        }
        values.push(bits as f64 / denom);
    }
    let window = params.tail_window();
    let tail = &values[values.len() - window..];
    Ok(BetaDimEstimate {
        budget: r,
        n_values: params.n_grid.clone(),
        values: values.clone(),
        lower: tail.iter().copied().fold(f64::INFINITY, f64::min),
        upper: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        tail_fraction: params.tail_fraction,
    })
}

/// Consistency check between the block-mutual-information rate and the
/// catalog mutual compression ratio, with the finite-n slack bounds in
/// both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdimCrossCheck {
    pub r: usize,
    pub t: usize,
    pub r_log: usize,
    /// I(pi_u^(r'); pi_w^(r')) / (r' log k) on the truncated prefixes
    pub i_rate: f64,
    /// catalog rho_{r,t}(u:w)
    pub rho_rt: f64,
    /// catalog rho_{t,r}(u:w)
    pub rho_tr: f64,
    /// bound on i_rate - rho_rt: 2 floor(n/r')^-1 + q_t^k(r')
    pub mi_minus_mc_bound: f64,
    pub mi_minus_mc_holds: bool,
    /// bound on rho_tr - i_rate: floor(n/r')^-1 + p_t^k(r')
    pub mc_minus_mi_bound: f64,
    pub mc_minus_mi_holds: bool,
}

/// Cross-checks the two routes to mutual dimension at budgets (r, t).
pub fn mdim_cross_check(
    u: &SymbolString,
    w: &SymbolString,
    r: usize,
    t: usize,
) -> Result<MdimCrossCheck> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch(u.len(), w.len()));
    }
    let k = u.alphabet_size();
    let n = u.len();
    let rp = crate::ratios::log_floor(k, r).max(1);
    let ur = prefix_truncate(&u.prefix(n), rp)?;
    let wr = prefix_truncate(&w.prefix(n), rp)?;
    let i_rate = mutual_information(&joint_block_freq_table(&ur, &wr, rp)?)
        / (rp as f64 * (k as f64).log2());
    let rho_rt = crate::ratios::mutual_ratio(u, w, r, t)?.value;
    let rho_tr = crate::ratios::mutual_ratio(u, w, t, r)?.value;
    let inv_n_r = 1.0 / (n / rp) as f64;
    let mi_minus_mc_bound = 2.0 * inv_n_r + crate::ratios::slack_q(t, k, rp)?;
    let mc_minus_mi_bound = inv_n_r + crate::ratios::slack_p(t, k, rp)?;
    let tol = 1e-12;
    Ok(MdimCrossCheck {
        r,
        t,
        r_log: rp,
        i_rate,
        rho_rt,
        rho_tr,
        mi_minus_mc_bound,
        mi_minus_mc_holds: i_rate - rho_rt <= mi_minus_mc_bound + tol,
        mc_minus_mi_bound,
        mc_minus_mi_holds: rho_tr - i_rate <= mc_minus_mi_bound + tol,
    })
}

/// Per-block-length deviation measurements against the l-fold product
/// of a symbol measure. No verdict: normality is asymptotic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityRow {
    pub l: usize,
    pub max_abs_deviation: f64,
    pub kl_divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityReport {
    pub n: usize,
    pub rows: Vec<NormalityRow>,
}

pub fn normality_test(
    u: &SymbolString,
    alpha: &ProbMeasure,
    l_max: usize,
    n: usize,
) -> Result<NormalityReport> {
    if n > u.len() {
        return Err(Error::GridExceedsPrefix { n, len: u.len() });
    }
    let k = u.alphabet_size();
    if alpha.len() != k {
        return Err(Error::LengthMismatch(alpha.len(), k));
    }
    let prefix = u.prefix(n);
    let mut rows = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let cells = (k as u64).checked_pow(l as u32).filter(|&c| c <= 1 << 20);
        let cells = cells.ok_or_else(|| {
            Error::InvalidArgument(format!("k^l too large for normality table at l={l}"))
        })?;
        let trimmed = prefix_truncate(&prefix, l)?;
        let table = block_freq_table(&trimmed, l)?;
        let mut max_dev = 0.0f64;
        let mut empirical = Vec::with_capacity(cells as usize);
        let mut product = Vec::with_capacity(cells as usize);
        for b in 0..cells {
            let block = decode_block(b, k, l);
            let expect: f64 = block.iter().map(|&s| alpha.weight(s as usize)).product();
            let freq = table.frequency(b);
            max_dev = max_dev.max((freq - expect).abs());
            empirical.push(freq);
            product.push(expect);
        }
        // exact-count frequencies sum to 1; the product measure does by
        // construction
        let emp = ProbMeasure::new(empirical)?;
        let prod = ProbMeasure::new(product)?;
        rows.push(NormalityRow {
            l,
            max_abs_deviation: max_dev,
            kl_divergence: kl_divergence(&emp, &prod)?,
        });
    }
    Ok(NormalityReport { n, rows })
}
