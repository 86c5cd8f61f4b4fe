//! Compression ratios: per-compressor and joint ratios, catalog-based
//! surrogates for the r-state (joint) compression ratio, the r,t-state
//! mutual compression ratio, beta-compression ratios, and the slack
//! function family.
//!
//! The true r-state ratio rho_r minimizes over all r-state ILFSCs and
//! is not computable directly. The surrogate reported here is a pair of
//! bounds: the minimum ratio over a fixed catalog (identity plus
//! block-Huffman machines trained on the input) from above, and the
//! entropy bound rearranged from the Kraft inequality from below. The
//! catalog contains exactly the machines the ratio inequalities use, so
//! every inequality stated for rho_r is provable for the surrogate.

use serde::Serialize;

use crate::alphabet::{pair, PairPolicy, prefix_truncate, ProbMeasure, SymbolString};
use crate::blockstats::{block_freq_table, joint_block_freq_table, self_information};
use crate::error::{Error, Result};
use crate::fsc::Fsc;
use crate::huffman::build_for_string;

/// floor(log_base(x)): the largest e with base^e <= x.
pub fn log_floor(base: usize, x: usize) -> usize {
    let mut e = 0;
    let mut p = 1usize;
    while p <= x / base {
        p *= base;
        e += 1;
    }
    e
}

/// f_s^k(r) = log2(s^2 * (1 + log2((s^2 + k^r) / s^2))) / (r log2 k).
pub fn slack_f(s: usize, k: usize, r: usize) -> Result<f64> {
    if s < 1 || k < 2 || r < 1 {
        return Err(Error::InvalidArgument(format!(
            "slack arguments must satisfy s >= 1, k >= 2, r >= 1 (got s={s}, k={k}, r={r})"
        )));
    }
    let s2 = (s as f64) * (s as f64);
    let kr = (k as f64).powi(r as i32);
    Ok((s2 * (1.0 + ((s2 + kr) / s2).log2())).log2() / (r as f64 * (k as f64).log2()))
}

/// g_r^k(t') = f_r^{k^2}(t') + 1/t'
pub fn slack_g(r: usize, k: usize, tp: usize) -> Result<f64> {
    Ok(slack_f(r, k * k, tp)? + 1.0 / tp as f64)
}

/// h_t^k(r') = 2 f_t^k(r') + 2/r'
pub fn slack_h(t: usize, k: usize, rp: usize) -> Result<f64> {
    Ok(2.0 * slack_f(t, k, rp)? + 2.0 / rp as f64)
}

/// i_t^k(r') = f_t^k(r') + 2/r'
pub fn slack_i(t: usize, k: usize, rp: usize) -> Result<f64> {
    Ok(slack_f(t, k, rp)? + 2.0 / rp as f64)
}

/// j_r^k(t') = f_r^{k^2}(t') + 1/t'
pub fn slack_j(r: usize, k: usize, tp: usize) -> Result<f64> {
    Ok(slack_f(r, k * k, tp)? + 1.0 / tp as f64)
}

/// q_t^k(r') = 2/r' + 2 f_t^k(r')
pub fn slack_q(t: usize, k: usize, rp: usize) -> Result<f64> {
    Ok(2.0 / rp as f64 + 2.0 * slack_f(t, k, rp)?)
}

/// p_t^k(r') = 2/r' + f_t^{k^2}(r')
pub fn slack_p(t: usize, k: usize, rp: usize) -> Result<f64> {
    Ok(2.0 / rp as f64 + slack_f(t, k * k, rp)?)
}

/// e_r^k(t') = 4/t' + 2 f_r^k(t') + f_r^{k^2}(t')
pub fn slack_e(r: usize, k: usize, tp: usize) -> Result<f64> {
    Ok(4.0 / tp as f64 + 2.0 * slack_f(r, k, tp)? + slack_f(r, k * k, tp)?)
}

/// Named access to the slack family for the CLI and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlackName {
    F,
    G,
    H,
    I,
    J,
    Q,
    P,
    E,
}

impl std::str::FromStr for SlackName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(SlackName::F),
            "g" => Ok(SlackName::G),
            "h" => Ok(SlackName::H),
            "i" => Ok(SlackName::I),
            "j" => Ok(SlackName::J),
            "q" => Ok(SlackName::Q),
            "p" => Ok(SlackName::P),
            "e" => Ok(SlackName::E),
            other => Err(Error::InvalidArgument(format!("unknown slack function: {other}"))),
        }
    }
}

/// Evaluates a slack function: `index` is the state budget (s for f, r
/// or t for the composites), `m` the block-length argument.
pub fn slack(name: SlackName, index: usize, k: usize, m: usize) -> Result<f64> {
    match name {
        SlackName::F => slack_f(index, k, m),
        SlackName::G => slack_g(index, k, m),
        SlackName::H => slack_h(index, k, m),
        SlackName::I => slack_i(index, k, m),
        SlackName::J => slack_j(index, k, m),
        SlackName::Q => slack_q(index, k, m),
        SlackName::P => slack_p(index, k, m),
        SlackName::E => slack_e(index, k, m),
    }
}

/// rho_C(u) = |C(u)| / (n log2 k).
pub fn rho_c(c: &Fsc, u: &SymbolString) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bits = c.run_len(u)?;
    Ok(bits as f64 / (u.len() as f64 * (u.alphabet_size() as f64).log2()))
}

/// Joint ratio rho_C(u, w) = |C((u,w))| / (n log2 k) for a machine over
/// the product alphabet. Note the denominator uses log k, not log k^2,
/// so rho_C(u,w) = 2 rho_C((u,w)).
pub fn rho_c_joint(c: &Fsc, u: &SymbolString, w: &SymbolString) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = u.alphabet_size();
    if c.alphabet_size() != k * k {
        return Err(Error::NotProductAlphabet(c.alphabet_size()));
    }
    let p = pair(u, w, PairPolicy::Strict)?;
    let bits = c.run_len(p.as_symbol_string())?;
    Ok(bits as f64 / (u.len() as f64 * (k as f64).log2()))
}

/// Beta-compression ratio rho^beta_C(u) = |C(u)| / l_beta(u).
pub fn rho_beta(c: &Fsc, u: &SymbolString, beta: &ProbMeasure) -> Result<f64> {
    let denom = self_information(u, beta)?;
    if denom == 0.0 {
        return Err(Error::ZeroSelfInformation);
    }
    Ok(c.run_len(u)? as f64 / denom)
}

/// A catalog member with its provenance label.
#[derive(Debug, Clone)]
pub struct CatalogMember {
    pub fsc: Fsc,
    pub provenance: String,
}

/// The fixed family of machines standing in for "all ILFSCs with at
/// most r states".
#[derive(Debug, Clone)]
pub struct CompressorCatalog {
    pub budget: usize,
    pub members: Vec<CatalogMember>,
}

impl CompressorCatalog {
    /// Catalog on Sigma for a single string: the identity compressor
    /// plus the block-Huffman machine of `u` at every block length
    /// l <= floor(log_k r) (whose tree machines stay within the
    /// budget, since (k^l - 1)/(k - 1) <= k^l <= r).
    pub fn for_string(u: &SymbolString, r: usize) -> Result<Self> {
        let k = u.alphabet_size();
        if r < k {
            return Err(Error::BudgetTooSmall { budget: r, alphabet: k });
        }
        if u.is_empty() {
            return Err(Error::EmptyInput);
        }
        let rp = log_floor(k, r);
        let mut members = vec![CatalogMember {
            fsc: Fsc::identity(k)?,
            provenance: "identity".to_string(),
        }];
        for l in 1..=rp.min(u.len()) {
            members.push(CatalogMember {
                fsc: build_for_string(u, l)?,
                provenance: format!("huffman-l{l}"),
            });
        }
        Ok(CompressorCatalog { budget: r, members })
    }

    /// Catalog on Sigma x Sigma for a string pair: the pair identity,
    /// pair-block Huffman machines trained on (u,w), and the relabeled
    /// pair machines trained on (w,u). Closure under relabeling makes
    /// the joint catalog minimum exactly symmetric in (u, w).
    pub fn for_pair(u: &SymbolString, w: &SymbolString, r: usize) -> Result<Self> {
        let k = u.alphabet_size();
        if r < k * k {
            return Err(Error::BudgetTooSmall { budget: r, alphabet: k * k });
        }
        if u.is_empty() {
            return Err(Error::EmptyInput);
        }
        let p_uw = pair(u, w, PairPolicy::Strict)?;
        let p_wu = pair(w, u, PairPolicy::Strict)?;
        let lp = log_floor(k * k, r);
        let mut members = vec![CatalogMember {
            fsc: Fsc::identity(k * k)?,
            provenance: "pair-identity".to_string(),
        }];
        for l in 1..=lp.min(u.len()) {
            members.push(CatalogMember {
                fsc: build_for_string(p_uw.as_symbol_string(), l)?,
                provenance: format!("pair-huffman-l{l}"),
            });
            members.push(CatalogMember {
                fsc: build_for_string(p_wu.as_symbol_string(), l)?.relabel_swap()?,
                provenance: format!("pair-huffman-swap-l{l}"),
            });
        }
        Ok(CompressorCatalog { budget: r, members })
    }
}

/// One catalog member's evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct MemberRatio {
    pub provenance: String,
    pub states: usize,
    pub output_bits: u64,
    pub rho: f64,
}

/// Catalog upper bound and entropy lower bound on an r-state
/// compression ratio.
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub n: usize,
    pub alphabet_size: usize,
    pub budget: usize,
    /// floor(log_k budget), the block-length index the slack functions
    /// use
    pub budget_log: usize,
    pub members: Vec<MemberRatio>,
    /// catalog minimum: an upper bound on the true rho_r
    pub rho_tilde: f64,
    pub best_member: String,
    /// entropy lower bound max over l of
    /// H(pi^(l)) / (l log k) - 1/floor(n/l) - f_budget(l)
    pub lower_bound: f64,
    /// the block length attaining the lower bound
    pub lower_bound_l: usize,
}

/// Evaluates the single-string catalog surrogate for rho_r(u).
pub fn catalog_rho(u: &SymbolString, r: usize) -> Result<RatioReport> {
    let catalog = CompressorCatalog::for_string(u, r)?;
    let k = u.alphabet_size();
    let n = u.len();
    let denom = n as f64 * (k as f64).log2();
    let mut members = Vec::with_capacity(catalog.members.len());
    for m in &catalog.members {
        let bits = m.fsc.run_len(u)?;
        members.push(MemberRatio {
            provenance: m.provenance.clone(),
            states: m.fsc.state_count(),
            output_bits: bits,
            rho: bits as f64 / denom,
        });
    }
    let best = members
        .iter()
        .min_by(|a, b| a.rho.total_cmp(&b.rho))
        .expect("catalog is nonempty");
    let (rho_tilde, best_member) = (best.rho, best.provenance.clone());

    // rearranged Kraft/entropy bound, valid for every machine with at
    // most r states
    let rp = log_floor(k, r);
    let mut lower_bound = f64::NEG_INFINITY;
    let mut lower_bound_l = 1;
    for l in 1..=rp.min(n) {
        let trimmed = prefix_truncate(u, l)?;
        let h = block_freq_table(&trimmed, l)?.entropy();
        let bound =
            h / (l as f64 * (k as f64).log2()) - 1.0 / (n / l) as f64 - slack_f(r, k, l)?;
        if bound > lower_bound {
            lower_bound = bound;
            lower_bound_l = l;
        }
    }
    Ok(RatioReport {
        n,
        alphabet_size: k,
        budget: r,
        budget_log: rp,
        members,
        rho_tilde,
        best_member,
        lower_bound,
        lower_bound_l,
    })
}

/// Evaluates the joint catalog surrogate for rho_r(u, w).
pub fn catalog_rho_joint(u: &SymbolString, w: &SymbolString, r: usize) -> Result<RatioReport> {
    let catalog = CompressorCatalog::for_pair(u, w, r)?;
    let k = u.alphabet_size();
    let n = u.len();
    let denom = n as f64 * (k as f64).log2();
    let p_uw = pair(u, w, PairPolicy::Strict)?;
    let mut members = Vec::with_capacity(catalog.members.len());
    for m in &catalog.members {
        let bits = m.fsc.run_len(p_uw.as_symbol_string())?;
        members.push(MemberRatio {
            provenance: m.provenance.clone(),
            states: m.fsc.state_count(),
            output_bits: bits,
            rho: bits as f64 / denom,
        });
    }
    let best = members
        .iter()
        .min_by(|a, b| a.rho.total_cmp(&b.rho))
        .expect("catalog is nonempty");
    let (rho_tilde, best_member) = (best.rho, best.provenance.clone());

    // joint entropy bound from the pair-alphabet Kraft inequality
    let lp = log_floor(k * k, r);
    let mut lower_bound = f64::NEG_INFINITY;
    let mut lower_bound_l = 1;
    for l in 1..=lp.max(1).min(n) {
        let ul = prefix_truncate(u, l)?;
        let wl = prefix_truncate(w, l)?;
        let h = joint_block_freq_table(&ul, &wl, l)?.entropy();
        let bound = h / (l as f64 * (k as f64).log2())
            - 1.0 / (n / l) as f64
            - slack_f(r, k * k, l)?;
        if bound > lower_bound {
            lower_bound = bound;
            lower_bound_l = l;
        }
    }
    Ok(RatioReport {
        n,
        alphabet_size: k,
        budget: r,
        budget_log: log_floor(k, r),
        members,
        rho_tilde,
        best_member,
        lower_bound,
        lower_bound_l,
    })
}

/// Slack terms of the mutual compression ratio theorem, evaluated at
/// the report's (n, r', t').
#[derive(Debug, Clone, Serialize)]
pub struct MutualSlack {
    pub r_log: usize,
    pub t_log: usize,
    pub g: f64,
    pub h: f64,
    pub i: f64,
    pub j: f64,
    pub e: f64,
    /// floor(n/t')^-1 and floor(n/r')^-1
    pub inv_n_t: f64,
    pub inv_n_r: f64,
}

/// The r,t-state mutual compression ratio surrogate
/// rho_{r,t}(u:w) = rho_t(u) + rho_t(w) - rho_r(u,w), with the slack
/// annotations needed to assert the ratio inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct MutualRatioReport {
    pub n: usize,
    pub alphabet_size: usize,
    pub r: usize,
    pub t: usize,
    pub rho_t_u: RatioReport,
    pub rho_t_w: RatioReport,
    pub rho_r_joint: RatioReport,
    pub value: f64,
    pub slack: MutualSlack,
}

pub fn mutual_ratio(
    u: &SymbolString,
    w: &SymbolString,
    r: usize,
    t: usize,
) -> Result<MutualRatioReport> {
    let k = u.alphabet_size();
    let n = u.len();
    let rho_t_u = catalog_rho(u, t)?;
    let rho_t_w = catalog_rho(w, t)?;
    let rho_r_joint = catalog_rho_joint(u, w, r)?;
    let value = rho_t_u.rho_tilde + rho_t_w.rho_tilde - rho_r_joint.rho_tilde;
    let rp = log_floor(k, r).max(1);
    let tp = log_floor(k, t).max(1);
    let slack = MutualSlack {
        r_log: rp,
        t_log: tp,
        g: slack_g(r, k, tp)?,
        h: slack_h(t, k, rp)?,
        i: slack_i(t, k, rp)?,
        j: slack_j(r, k, tp)?,
        e: slack_e(r, k, tp)?,
        inv_n_t: 1.0 / (n / tp) as f64,
        inv_n_r: 1.0 / (n / rp) as f64,
    };
    Ok(MutualRatioReport {
        n,
        alphabet_size: k,
        r,
        t,
        rho_t_u,
        rho_t_w,
        rho_r_joint,
        value,
        slack,
    })
}
