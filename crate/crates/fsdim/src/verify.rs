//! The inequality and property harness: every lemma- and theorem-level
//! statement runs as a named, seeded, reportable check over randomized
//! and structured inputs, and small instances can be cross-checked
//! against brute-force oracles.
//!
//! Exact identities are asserted to 1e-12; inequalities are asserted
//! with their exact slack terms and no extra tolerance beyond the same
//! float allowance. Margins are reported as rhs - lhs, so a passing
//! check has all margins >= -1e-12 and `worst_margin` shows how much
//! room was left.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::alphabet::{
    gen_iid, pair, prefix_truncate, PairPolicy, ProbMeasure, SymbolString,
};
use crate::blockstats::{
    block_freq_table, joint_block_freq_table, marginals, mutual_information, self_information,
};
use crate::error::{Error, Result};
use crate::fsc::Fsc;
use crate::huffman::{build_codebook, build_for_string};
use crate::ratios::{
    log_floor, mutual_ratio, rho_c, rho_c_joint, slack_f, slack_p, slack_q,
    CompressorCatalog,
};

/// Float allowance on exact identities and on inequalities that
/// already carry their own slack terms.
pub const EXACT_TOL: f64 = 1e-12;

/// Every runnable check, in report order.
pub const ALL_CHECKS: &[&str] = &[
    "shac",
    "pmi",
    "pmi.diagonal",
    "kraft",
    "huff",
    "huffman.optimal",
    "low",
    "low2",
    "hc",
    "hc2",
    "obs1",
    "mcr.1",
    "mcr.2",
    "mcr.3",
    "mcr.4",
    "mcr.5",
    "mcr.6",
    "mitomc",
    "mctomi",
    "product-lemma",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: u64,
    pub failures: u64,
    /// minimum of rhs - lhs over all asserted comparisons
    pub worst_margin: f64,
    /// minimal reproduction of the first failure, when any
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: u64,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }
}

/// Collects margins and the first failing witness for one check.
struct Margins {
    count: u64,
    failures: u64,
    worst: f64,
    witness: Option<String>,
}

impl Margins {
    fn new() -> Self {
        Margins { count: 0, failures: 0, worst: f64::INFINITY, witness: None }
    }

    fn push(&mut self, margin: f64, context: &dyn Fn() -> String) {
        self.count += 1;
        if margin < self.worst {
            self.worst = margin;
        }
        if margin < -EXACT_TOL {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(format!("margin {margin}: {}", context()));
            }
        }
    }

    fn exact(&mut self, ok: bool, context: &dyn Fn() -> String) {
        self.count += 1;
        if self.worst > 0.0 {
            self.worst = 0.0;
        }
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(context());
            }
        }
    }

    fn into_report(self, check: &str, trials: u64) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            trials,
            failures: self.failures,
            worst_margin: if self.count == 0 { f64::NAN } else { self.worst },
            witness: self.witness,
        }
    }
}

fn check_rng(seed: u64, name: &str) -> ChaCha8Rng {
    // stable per-check stream: FNV-1a of the name folded into the seed
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Biased random strings exercise low-entropy regions too.
fn rand_biased_string(rng: &mut ChaCha8Rng, k: usize, n: usize) -> SymbolString {
    let bias = rng.next_u32() % 3;
    let data = (0..n)
        .map(|_| match bias {
            0 => rng.next_u32() % k as u32,
            1 => {
                // favor symbol 0 three to one
                if rng.next_u32() % 4 > 0 { 0 } else { rng.next_u32() % k as u32 }
            }
            _ => {
                // runs of geometric length
                0
            }
        })
        .collect::<Vec<u32>>();
    let mut data = data;
    if bias == 2 {
        // alternate runs deterministically from the rng
        let mut i = 0;
        let mut sym = 0u32;
        while i < n {
            let run = 1 + (rng.next_u32() % 8) as usize;
            for d in data.iter_mut().skip(i).take(run) {
                *d = sym;
            }
            sym = (sym + 1) % k as u32;
            i += run;
        }
    }
    SymbolString::new(k, data).expect("symbols are reduced mod k")
}

/// Expands a selection into the canonical check list. `all` expands to
/// everything; `mcr.all` expands to the six theorem items.
pub fn expand_selection(selection: &[String]) -> Result<Vec<&'static str>> {
    let mut out: Vec<&'static str> = Vec::new();
    let push = |name: &'static str, out: &mut Vec<&'static str>| {
        if !out.contains(&name) {
            out.push(name);
        }
    };
    for sel in selection {
        match sel.as_str() {
            "all" => {
                for &c in ALL_CHECKS {
                    push(c, &mut out);
                }
            }
            "mcr.all" => {
                for &c in ALL_CHECKS.iter().filter(|c| c.starts_with("mcr.")) {
                    push(c, &mut out);
                }
            }
            other => match ALL_CHECKS.iter().find(|&&c| c == other) {
                Some(&c) => push(c, &mut out),
                None => return Err(Error::UnknownCheck(other.to_string())),
            },
        }
    }
    Ok(out)
}

/// Runs the selected checks with `trials` seeded trials each and
/// assembles a deterministic report. Exit-worthy failure is signaled by
/// `passed == false`, never by an error.
pub fn run_suite(selection: &[String], trials: u64, seed: u64) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let names = expand_selection(selection)?;
    let mut checks = Vec::with_capacity(names.len());
    for name in names {
        let mut rng = check_rng(seed, name);
        let report = match name {
            "shac" => check_shac(trials, &mut rng)?,
            "pmi" => check_pmi(trials, &mut rng)?,
            "pmi.diagonal" => check_pmi_diagonal(trials, &mut rng)?,
            "kraft" => check_kraft(trials, &mut rng)?,
            "huff" => check_huff(trials, &mut rng)?,
            "huffman.optimal" => check_huffman_optimal(trials, &mut rng)?,
            "low" => check_low(trials, &mut rng)?,
            "low2" => check_low2(trials, &mut rng)?,
            "hc" => check_hc(trials, &mut rng)?,
            "hc2" => check_hc2(trials, &mut rng)?,
            "obs1" => check_obs1(trials, &mut rng)?,
            item if item.starts_with("mcr.") => check_mcr(item, trials, &mut rng)?,
            "mitomc" => check_mi_mc(true, trials, &mut rng)?,
            "mctomi" => check_mi_mc(false, trials, &mut rng)?,
            "product-lemma" => check_product_lemma(trials, &mut rng)?,
            _ => unreachable!("expand_selection validated the name"),
        };
        checks.push(report);
    }
    let passed = checks.iter().all(|c| c.failures == 0);
    Ok(SuiteReport { schema_version: crate::SCHEMA_VERSION, seed, trials, checks, passed })
}

/// Entropy comparisons of joint block frequencies: subadditivity,
/// monotonicity over marginals, the diagonal identity, symmetry, and
/// exact marginal consistency.
fn check_shac(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let n = 240;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        for l in [1usize, 2, 4] {
            let ul = prefix_truncate(&u, l)?;
            let wl = prefix_truncate(&w, l)?;
            let hu = block_freq_table(&ul, l)?.entropy();
            let hw = block_freq_table(&wl, l)?.entropy();
            let j = joint_block_freq_table(&ul, &wl, l)?;
            let hj = j.entropy();
            let ctx = || format!("k={k} n={n} l={l} trial={trial}");
            // item 1: H(joint) <= H(u) + H(w)
            m.push(hu + hw - hj, &ctx);
            // item 2: max marginal <= H(joint)
            m.push(hj - hu.max(hw), &ctx);
            // item 3: diagonal collapse, exact
            let hd = joint_block_freq_table(&ul, &ul, l)?.entropy();
            m.exact(hd == hu, &|| format!("diagonal H mismatch: {}", ctx()));
            // item 4: symmetry; summation order differs, so allow
            // the float slack
            let hs = joint_block_freq_table(&wl, &ul, l)?.entropy();
            m.push(-(hj - hs).abs(), &|| format!("swap H mismatch: {}", ctx()));
            // marginal consistency, exact integer counts
            let (ma, mb) = marginals(&j);
            m.exact(
                ma == block_freq_table(&ul, l)? && mb == block_freq_table(&wl, l)?,
                &|| format!("marginal mismatch: {}", ctx()),
            );
        }
    }
    Ok(m.into_report("shac", trials))
}

/// Mutual information comparisons: nonnegativity, the min-entropy
/// bound, the diagonal identity, and symmetry.
fn check_pmi(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let n = 240;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        for l in [1usize, 2, 4] {
            let ul = prefix_truncate(&u, l)?;
            let wl = prefix_truncate(&w, l)?;
            let j = joint_block_freq_table(&ul, &wl, l)?;
            let i = mutual_information(&j);
            let hu = block_freq_table(&ul, l)?.entropy();
            let hw = block_freq_table(&wl, l)?.entropy();
            let ctx = || format!("k={k} n={n} l={l} trial={trial}");
            // item 1: I >= 0
            m.push(i, &ctx);
            // item 2: I <= min entropy
            m.push(hu.min(hw) - i, &ctx);
            // item 3: diagonal, exact
            let idiag = mutual_information(&joint_block_freq_table(&ul, &ul, l)?);
            m.exact(idiag == hu, &|| format!("diagonal I mismatch: {}", ctx()));
            // item 4: symmetry within float slack (summation order)
            let iswap = mutual_information(&joint_block_freq_table(&wl, &ul, l)?);
            m.push(-(i - iswap).abs(), &|| format!("swap I mismatch: {}", ctx()));
        }
    }
    Ok(m.into_report("pmi", trials))
}

/// The diagonal identity alone: I(pi_u; pi_u) = H(pi_u), exact.
fn check_pmi_diagonal(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = 2 + (trial % 3) as usize;
        let u = rand_biased_string(rng, k, 360);
        for l in [1usize, 2, 3] {
            let ul = prefix_truncate(&u, l)?;
            let h = block_freq_table(&ul, l)?.entropy();
            let i = mutual_information(&joint_block_freq_table(&ul, &ul, l)?);
            m.exact(i == h, &|| format!("k={k} l={l} trial={trial}: I={i} H={h}"));
        }
    }
    Ok(m.into_report("pmi.diagonal", trials))
}

/// Builds the full machine catalog for one training string: identity,
/// block-Huffman at l in {1,2,3}, and pair machines at l in {1,2}.
fn catalog_machines(k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(String, Fsc)>> {
    let u = rand_biased_string(rng, k, 3000);
    let w = rand_biased_string(rng, k, 3000);
    let p = pair(&u, &w, PairPolicy::Strict)?;
    let mut out = vec![("identity".to_string(), Fsc::identity(k)?)];
    for l in 1..=3usize {
        out.push((format!("huffman-l{l}"), build_for_string(&u, l)?));
    }
    for l in 1..=2usize {
        out.push((format!("pair-huffman-l{l}"), build_for_string(p.as_symbol_string(), l)?));
    }
    Ok(out)
}

/// Generalized Kraft inequality: exact dyadic lhs against the
/// closed-form rhs for every catalog machine at word lengths 1..=10
/// over k in {2, 3}.
fn check_kraft(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        for k in [2usize, 3] {
            for (name, fsc) in catalog_machines(k, rng)? {
                for r in 1..=10usize {
                    let rep = fsc.kraft_audit(r, u64::MAX)?;
                    m.push(rep.rhs - rep.lhs, &|| {
                        format!("k={k} machine={name} r={r} trial={trial} lhs={}", rep.lhs)
                    });
                    m.exact(rep.holds, &|| format!("k={k} machine={name} r={r} audit failed"));
                }
            }
        }
    }
    Ok(m.into_report("kraft", trials))
}

/// Block-Huffman upper bound: rho_{C_F(l,u)}(u) <= H(pi_u^(l))/(l log k) + 1/l.
fn check_huff(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        for k in [2usize, 3] {
            for l in [1usize, 2, 3] {
                let u = prefix_truncate(&rand_biased_string(rng, k, 1 << 12), l)?;
                let c = build_for_string(&u, l)?;
                let rho = rho_c(&c, &u)?;
                let h = block_freq_table(&u, l)?.entropy();
                let rhs = h / (l as f64 * (k as f64).log2()) + 1.0 / l as f64;
                m.push(rhs - rho, &|| format!("k={k} l={l} trial={trial} rho={rho} rhs={rhs}"));
            }
        }
    }
    Ok(m.into_report("huff", trials))
}

/// The built codebook's total cost matches the brute-force optimal
/// prefix code on random small supports.
fn check_huffman_optimal(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let support = 2 + (rng.next_u32() % 8) as usize;
        let weights: Vec<u64> = (0..support).map(|_| 1 + (rng.next_u64() % 100)).collect();
        let counts: std::collections::BTreeMap<u64, u64> =
            weights.iter().enumerate().map(|(i, &w)| (i as u64, w)).collect();
        // a one-symbol-per-block table over an alphabet the size of the
        // support carries exactly these weights
        let table = crate::blockstats::FrequencyTable::from_counts(1, support, counts)?;
        let book = build_codebook(&table)?;
        let built: u64 = (0..support as u64)
            .map(|b| book.codeword(b).len() as u64 * weights[b as usize])
            .sum();
        let optimal = oracle_huffman_optimal(&weights)?;
        m.exact(built == optimal, &|| {
            format!("trial={trial} weights={weights:?} built={built} optimal={optimal}")
        });
    }
    Ok(m.into_report("huffman.optimal", trials))
}

/// Lower bound via minimum per-block output: rho_C(u) >=
/// sum_x pi(x) L_C(x) / (l log k) for u a multiple of l.
fn check_low(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let u = rand_biased_string(rng, k, 1 << 10);
        let catalog = CompressorCatalog::for_string(&u, 8.max(k))?;
        for member in &catalog.members {
            for l in [1usize, 2, 3] {
                let ul = prefix_truncate(&u, l)?;
                let t = block_freq_table(&ul, l)?;
                let mut expected = 0.0;
                for (block, count) in t.iter() {
                    let blk = SymbolString::new(k, crate::blockstats::decode_block(block, k, l))?;
                    expected +=
                        (count as f64 / t.total() as f64) * member.fsc.min_output_len(&blk)? as f64;
                }
                let lhs = expected / (l as f64 * (k as f64).log2());
                let rho = rho_c(&member.fsc, &ul)?;
                m.push(rho - lhs, &|| {
                    format!("k={k} l={l} machine={} trial={trial}", member.provenance)
                });
            }
        }
    }
    Ok(m.into_report("low", trials))
}

/// Joint analogue of `low` for pair machines.
fn check_low2(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let u = rand_biased_string(rng, k, 1 << 10);
        let w = rand_biased_string(rng, k, 1 << 10);
        let catalog = CompressorCatalog::for_pair(&u, &w, 16.max(k * k))?;
        for member in &catalog.members {
            for l in [1usize, 2] {
                let ul = prefix_truncate(&u, l)?;
                let wl = prefix_truncate(&w, l)?;
                let p = pair(&ul, &wl, PairPolicy::Strict)?;
                let t = block_freq_table(p.as_symbol_string(), l)?;
                let mut expected = 0.0;
                for (block, count) in t.iter() {
                    let blk =
                        SymbolString::new(k * k, crate::blockstats::decode_block(block, k * k, l))?;
                    expected +=
                        (count as f64 / t.total() as f64) * member.fsc.min_output_len(&blk)? as f64;
                }
                let lhs = expected / (l as f64 * (k as f64).log2());
                let rho = rho_c_joint(&member.fsc, &ul, &wl)?;
                m.push(rho - lhs, &|| {
                    format!("k={k} l={l} machine={} trial={trial}", member.provenance)
                });
            }
        }
    }
    Ok(m.into_report("low2", trials))
}

/// Entropy-versus-ratio bound for IL machines:
/// H(pi_{u_l}^(l))/(l log k) - rho_C(u) <= floor(n/l)^-1 + f_s^k(l).
fn check_hc(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let n = 1 << 10;
        let u = rand_biased_string(rng, k, n);
        let catalog = CompressorCatalog::for_string(&u, 8.max(k))?;
        for member in &catalog.members {
            let s = member.fsc.state_count();
            for l in [1usize, 2, 3] {
                let ul = prefix_truncate(&u, l)?;
                let h = block_freq_table(&ul, l)?.entropy();
                let lhs = h / (l as f64 * (k as f64).log2()) - rho_c(&member.fsc, &u)?;
                let rhs = 1.0 / (n / l) as f64 + slack_f(s, k, l)?;
                m.push(rhs - lhs, &|| {
                    format!("k={k} l={l} s={s} machine={} trial={trial}", member.provenance)
                });
            }
        }
    }
    Ok(m.into_report("hc", trials))
}

/// Joint analogue with the pair-alphabet slack f_s^{k^2}(l).
fn check_hc2(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let n = 1 << 10;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        let catalog = CompressorCatalog::for_pair(&u, &w, 16.max(k * k))?;
        for member in &catalog.members {
            let s = member.fsc.state_count();
            for l in [1usize, 2] {
                let ul = prefix_truncate(&u, l)?;
                let wl = prefix_truncate(&w, l)?;
                let h = joint_block_freq_table(&ul, &wl, l)?.entropy();
                let lhs =
                    h / (l as f64 * (k as f64).log2()) - rho_c_joint(&member.fsc, &u, &w)?;
                let rhs = 1.0 / (n / l) as f64 + slack_f(s, k * k, l)?;
                m.push(rhs - lhs, &|| {
                    format!("k={k} l={l} s={s} machine={} trial={trial}", member.provenance)
                });
            }
        }
    }
    Ok(m.into_report("hc2", trials))
}

/// Truncation overhead: rho_C(u_r) <= rho_C(u) + floor(n/r)^-1, in
/// both single and pair form.
fn check_obs1(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let n = 1 << 10;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        let single = CompressorCatalog::for_string(&u, 8.max(k))?;
        for member in &single.members {
            for r in [2usize, 3, 5] {
                let ur = prefix_truncate(&u, r)?;
                let lhs = rho_c(&member.fsc, &ur)?;
                let rhs = rho_c(&member.fsc, &u)? + 1.0 / (n / r) as f64;
                m.push(rhs - lhs, &|| {
                    format!("k={k} r={r} machine={} trial={trial}", member.provenance)
                });
            }
        }
        let paired = CompressorCatalog::for_pair(&u, &w, 16.max(k * k))?;
        for member in &paired.members {
            for r in [2usize, 3] {
                let ur = prefix_truncate(&u, r)?;
                let wr = prefix_truncate(&w, r)?;
                let lhs = rho_c_joint(&member.fsc, &ur, &wr)?;
                let rhs = rho_c_joint(&member.fsc, &u, &w)? + 1.0 / (n / r) as f64;
                m.push(rhs - lhs, &|| {
                    format!("k={k} r={r} machine={} pair trial={trial}", member.provenance)
                });
            }
        }
    }
    Ok(m.into_report("obs1", trials))
}

const MCR_GRID: &[(usize, usize)] = &[(4, 4), (16, 4), (4, 16), (16, 16)];

/// One item of the mutual compression ratio theorem, with the catalog
/// surrogate standing in for the true infimum (an asymptotic-surrogate
/// check: the surrogate satisfies the same Huffman upper and Kraft
/// lower bounds the proof uses).
fn check_mcr(item: &str, trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = 2usize;
        let n = 1 << 10;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        let (r, t) = MCR_GRID[(trial % MCR_GRID.len() as u64) as usize];
        let ctx = |lhs: f64, rhs: f64| format!("r={r} t={t} n={n} trial={trial} lhs={lhs} rhs={rhs}");
        match item {
            "mcr.1" => {
                let rep = mutual_ratio(&u, &w, r, t)?;
                let bound = rep.rho_t_u.rho_tilde.min(rep.rho_t_w.rho_tilde)
                    + rep.slack.inv_n_t
                    + rep.slack.g;
                m.push(bound - rep.value, &|| ctx(rep.value, bound));
            }
            "mcr.2" => {
                let rep = mutual_ratio(&u, &w, r, t)?;
                let lhs = -(rep.value + 2.0 * rep.slack.inv_n_r + rep.slack.h);
                m.push(-lhs, &|| ctx(lhs, 0.0));
            }
            "mcr.3" => {
                let rep = mutual_ratio(&u, &u, r, t)?;
                let lhs = rep.rho_t_u.rho_tilde;
                let rhs = rep.value + rep.slack.inv_n_r + rep.slack.i;
                m.push(rhs - lhs, &|| ctx(lhs, rhs));
            }
            "mcr.4" => {
                let rep = mutual_ratio(&u, &u, r, t)?;
                let rhs = rep.rho_t_u.rho_tilde + rep.slack.inv_n_t + rep.slack.j;
                m.push(rhs - rep.value, &|| ctx(rep.value, rhs));
            }
            "mcr.5" => {
                let fwd = mutual_ratio(&u, &w, r, t)?;
                let rev = mutual_ratio(&w, &u, r, t)?;
                m.exact(fwd.value == rev.value, &|| ctx(fwd.value, rev.value));
            }
            "mcr.6" => {
                let fwd = mutual_ratio(&u, &w, r, t)?;
                let rev = mutual_ratio(&u, &w, t, r)?;
                let rhs = rev.value + 3.0 * fwd.slack.inv_n_t + fwd.slack.e;
                m.push(rhs - fwd.value, &|| ctx(fwd.value, rhs));
            }
            other => return Err(Error::UnknownCheck(other.to_string())),
        }
    }
    Ok(m.into_report(item, trials))
}

/// Block mutual information against the mutual compression ratio:
/// `mitomc` bounds I/(r' log k) - rho_{r,t} by 2 floor(n/r')^-1 + q,
/// `mctomi` bounds rho_{t,r} - I/(r' log k) by floor(n/r')^-1 + p.
fn check_mi_mc(mi_to_mc: bool, trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    for trial in 0..trials {
        let k = 2usize;
        let n = 1 << 12;
        let u = rand_biased_string(rng, k, n);
        let w = rand_biased_string(rng, k, n);
        let (r, t) = MCR_GRID[(trial % MCR_GRID.len() as u64) as usize];
        let rp = log_floor(k, r).max(1);
        let ur = prefix_truncate(&u, rp)?;
        let wr = prefix_truncate(&w, rp)?;
        let i_rate = mutual_information(&joint_block_freq_table(&ur, &wr, rp)?)
            / (rp as f64 * (k as f64).log2());
        let inv_n_r = 1.0 / (n / rp) as f64;
        if mi_to_mc {
            let rep = mutual_ratio(&u, &w, r, t)?;
            let lhs = i_rate - rep.value;
            let rhs = 2.0 * inv_n_r + slack_q(t, k, rp)?;
            m.push(rhs - lhs, &|| format!("r={r} t={t} trial={trial} lhs={lhs} rhs={rhs}"));
        } else {
            // rho_{t,r} swaps the budget roles: joint machines use t,
            // single machines use r
            let rep = mutual_ratio(&u, &w, t, r)?;
            let lhs = rep.value - i_rate;
            let rhs = inv_n_r + slack_p(t, k, rp)?;
            m.push(rhs - lhs, &|| format!("r={r} t={t} trial={trial} lhs={lhs} rhs={rhs}"));
        }
    }
    Ok(m.into_report(if mi_to_mc { "mitomc" } else { "mctomi" }, trials))
}

/// Product self-information on i.i.d. pairs:
/// l_{a1 x a2}((S,T) restricted to n)/n is close to H(a1) + H(a2).
fn check_product_lemma(trials: u64, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut m = Margins::new();
    let tol = 0.02;
    let n = 1 << 14;
    let pairs = [
        (vec![0.5, 0.5], vec![0.5, 0.5]),
        (vec![0.75, 0.25], vec![0.5, 0.5]),
    ];
    for trial in 0..trials {
        for (wa, wb) in &pairs {
            let a1 = ProbMeasure::new(wa.clone())?;
            let a2 = ProbMeasure::new(wb.clone())?;
            let s = gen_iid(&a1, n, rng.next_u64());
            let t = gen_iid(&a2, n, rng.next_u64());
            let p = pair(&s, &t, PairPolicy::Strict)?;
            let product = a1.product(&a2);
            let rate = self_information(p.as_symbol_string(), &product)? / n as f64;
            let target = oracle_entropy(&a1)? + oracle_entropy(&a2)?;
            m.push(tol - (rate - target).abs(), &|| {
                format!("trial={trial} measures={wa:?}x{wb:?} rate={rate} target={target}")
            });
        }
    }
    Ok(m.into_report("product-lemma", trials))
}

// ---------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Entropy,
    Mutual,
    HuffmanOptimal,
    IlCollision,
}

#[derive(Debug, Clone)]
pub enum OracleInstance {
    Measure(ProbMeasure),
    /// joint weights, rows by first coordinate
    Joint(Vec<Vec<f64>>),
    /// integer weights of a code's support
    Weights(Vec<u64>),
    /// machine plus the exhaustive input length bound
    Machine { fsc: Fsc, max_len: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleValue {
    Scalar(f64),
    Collision(Option<(SymbolString, SymbolString)>),
}

/// Independent small-instance evaluations used to cross-check the main
/// code paths: direct-summation entropy and mutual information,
/// exhaustive optimal prefix codes, and exhaustive collision search.
pub fn brute_force_oracle(kind: OracleKind, instance: &OracleInstance) -> Result<OracleValue> {
    match (kind, instance) {
        (OracleKind::Entropy, OracleInstance::Measure(m)) => {
            Ok(OracleValue::Scalar(oracle_entropy(m)?))
        }
        (OracleKind::Mutual, OracleInstance::Joint(j)) => {
            Ok(OracleValue::Scalar(oracle_mutual(j)?))
        }
        (OracleKind::HuffmanOptimal, OracleInstance::Weights(w)) => {
            Ok(OracleValue::Scalar(oracle_huffman_optimal(w)? as f64))
        }
        (OracleKind::IlCollision, OracleInstance::Machine { fsc, max_len }) => {
            Ok(OracleValue::Collision(oracle_il_collision(fsc, *max_len)?))
        }
        _ => Err(Error::InvalidArgument("oracle kind does not match instance".into())),
    }
}

/// Plain -sum p log2 p, a different algebraic arrangement than the
/// count-based entropy in the main path.
pub fn oracle_entropy(m: &ProbMeasure) -> Result<f64> {
    if m.len() > 1 << 16 {
        return Err(Error::InstanceTooLarge(format!("support {}", m.len())));
    }
    Ok(m.weights()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}

/// Mutual information of an explicit joint matrix by direct summation
/// over rows, columns, and cells.
pub fn oracle_mutual(joint: &[Vec<f64>]) -> Result<f64> {
    if joint.is_empty() || joint.iter().any(|row| row.len() != joint[0].len()) {
        return Err(Error::InvalidArgument("joint matrix must be rectangular".into()));
    }
    let total: f64 = joint.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> =
        (0..joint[0].len()).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let mut i = 0.0;
    for (a, row) in joint.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if p > 0.0 {
                i += p * (p / (rows[a] * cols[b])).log2();
            }
        }
    }
    Ok(i.max(0.0))
}

/// Minimal total cost sum w_i * l_i over all binary prefix codes, by
/// exhaustive search over nondecreasing length profiles (valid by the
/// exchange argument for weights sorted in decreasing order).
pub fn oracle_huffman_optimal(weights: &[u64]) -> Result<u64> {
    let m = weights.len();
    if m > 16 {
        return Err(Error::InstanceTooLarge(format!("support {m}")));
    }
    if m == 0 {
        return Err(Error::EmptySupport);
    }
    let mut sorted: Vec<u64> = weights.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if m == 1 {
        // a lone codeword still needs one bit
        return Ok(sorted[0]);
    }
    const MAX_LEN: u64 = 16;
    // capacity in units of 2^-MAX_LEN
    fn rec(sorted: &[u64], i: usize, min_len: u64, capacity: u64, cost: u64, best: &mut u64) {
        if cost >= *best {
            return;
        }
        if i == sorted.len() {
            *best = cost;
            return;
        }
        let remaining = (sorted.len() - i) as u64;
        for l in min_len..=MAX_LEN {
            let unit = 1u64 << (MAX_LEN - l);
            // every remaining word needs at least one unit of capacity
            if capacity < unit + (remaining - 1) {
                continue;
            }
            rec(sorted, i + 1, l, capacity - unit, cost + sorted[i] * l, best);
        }
    }
    let mut best = u64::MAX;
    rec(&sorted, 0, 1, 1 << MAX_LEN, 0, &mut best);
    Ok(best)
}

/// Exhaustive IL check: runs every input string up to `max_len` in
/// shortlex order from the start state and reports the first two with
/// identical (output, end state), if any.
pub fn oracle_il_collision(
    fsc: &Fsc,
    max_len: usize,
) -> Result<Option<(SymbolString, SymbolString)>> {
    if max_len > 12 {
        return Err(Error::InstanceTooLarge(format!("input length {max_len}")));
    }
    let k = fsc.alphabet_size();
    let mut total: u64 = 0;
    let mut layer_size: u64 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(layer_size);
        layer_size = layer_size.saturating_mul(k as u64);
    }
    if total > 2_000_000 {
        return Err(Error::InstanceTooLarge(format!("{total} inputs at length {max_len}")));
    }
    let mut seen: HashMap<(usize, String), SymbolString> = HashMap::new();
    // shortlex frontier over nonempty inputs: (string, state, output)
    let empty = SymbolString::new(k, Vec::new())?;
    let mut frontier = vec![(empty, fsc.start_state(), String::new())];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * k);
        for (s, q, out) in &frontier {
            for a in 0..k as u32 {
                let mut data = s.symbols().to_vec();
                data.push(a);
                let ns = SymbolString::new(k, data)?;
                let nq = fsc.transition(*q, a);
                let nout = format!("{out}{}", fsc.output(*q, a));
                if let Some(prev) = seen.get(&(nq, nout.clone())) {
                    return Ok(Some((prev.clone(), ns)));
                }
                seen.insert((nq, nout.clone()), ns.clone());
                next.push((ns, nq, nout));
            }
        }
        frontier = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsc::IlVerdict;

    #[test]
    fn selection_expansion() {
        let all = expand_selection(&["all".to_string()]).unwrap();
        assert_eq!(all.len(), ALL_CHECKS.len());
        let mcr = expand_selection(&["mcr.all".to_string()]).unwrap();
        assert_eq!(mcr, vec!["mcr.1", "mcr.2", "mcr.3", "mcr.4", "mcr.5", "mcr.6"]);
        assert_eq!(
            expand_selection(&["nosuch".to_string()]),
            Err(Error::UnknownCheck("nosuch".to_string()))
        );
    }

    #[test]
    fn suite_small_run_passes() {
        let rep = run_suite(&["shac".into(), "pmi".into(), "pmi.diagonal".into()], 6, 11).unwrap();
        assert!(rep.passed, "{}", rep.to_json_string());
        assert_eq!(rep.checks.len(), 3);
        for c in &rep.checks {
            assert_eq!(c.failures, 0);
        }
    }

    #[test]
    fn suite_deterministic() {
        let a = run_suite(&["mcr.all".into()], 4, 7).unwrap();
        let b = run_suite(&["mcr.all".into()], 4, 7).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
    }

    #[test]
    fn inequality_checks_pass() {
        for name in ["huff", "low", "low2", "hc", "hc2", "obs1", "mitomc", "mctomi"] {
            let rep = run_suite(&[name.to_string()], 3, 5).unwrap();
            assert!(rep.passed, "{name}: {}", rep.to_json_string());
        }
    }

    #[test]
    fn kraft_and_product_pass() {
        for name in ["kraft", "huffman.optimal", "product-lemma"] {
            let rep = run_suite(&[name.to_string()], 2, 3).unwrap();
            assert!(rep.passed, "{name}: {}", rep.to_json_string());
        }
    }

    #[test]
    fn oracle_entropy_values() {
        let m = ProbMeasure::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((oracle_entropy(&m).unwrap() - 1.5).abs() < 1e-12);
        let m = ProbMeasure::new(vec![0.75, 0.25]).unwrap();
        assert!((oracle_entropy(&m).unwrap() - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn oracle_mutual_values() {
        // independent uniform joint: zero
        let j = vec![vec![0.25, 0.25], vec![0.25, 0.25]];
        assert!(oracle_mutual(&j).unwrap().abs() < 1e-12);
        // perfectly correlated: one bit
        let j = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
        assert!((oracle_mutual(&j).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_huffman_values() {
        // {1/2, 1/4, 1/4} scaled to integers: optimal expected length
        // 1.5 means total cost 6 on weights {2,1,1}
        assert_eq!(oracle_huffman_optimal(&[2, 1, 1]).unwrap(), 6);
        assert_eq!(oracle_huffman_optimal(&[1, 1]).unwrap(), 2);
        // dyadic weights: cost equals sum w * ideal length
        assert_eq!(oracle_huffman_optimal(&[4, 2, 1, 1]).unwrap(), 14);
        assert!(matches!(
            oracle_huffman_optimal(&vec![1; 17]),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn oracle_collision_on_epsilon_machine() {
        let eps = Fsc::epsilon(2).unwrap();
        // the first collision in shortlex order: both length-1 inputs
        // land on the single state with empty output
        let got = oracle_il_collision(&eps, 3).unwrap().unwrap();
        assert_eq!(got.0.to_digit_string(), "0");
        assert_eq!(got.1.to_digit_string(), "1");
        // and the witness is replayable: same output, same end state
        assert_eq!(eps.run(&got.0).unwrap(), eps.run(&got.1).unwrap());
        let q0 = eps.start_state();
        assert_eq!(eps.end_state(q0, &got.0).unwrap(), eps.end_state(q0, &got.1).unwrap());
    }

    #[test]
    fn oracle_agrees_with_collision_search() {
        let id = Fsc::identity(2).unwrap();
        assert!(oracle_il_collision(&id, 6).unwrap().is_none());
        let eps = Fsc::epsilon(2).unwrap();
        assert!(matches!(eps.collision_search(1 << 16), IlVerdict::Collision(_)));
    }

    #[test]
    fn oracle_dispatch() {
        let v = brute_force_oracle(
            OracleKind::Entropy,
            &OracleInstance::Measure(ProbMeasure::uniform(4)),
        )
        .unwrap();
        assert_eq!(v, OracleValue::Scalar(2.0));
        assert!(matches!(
            brute_force_oracle(
                OracleKind::Mutual,
                &OracleInstance::Weights(vec![1]),
            ),
            Err(Error::InvalidArgument(_))
        ));
    }
}
