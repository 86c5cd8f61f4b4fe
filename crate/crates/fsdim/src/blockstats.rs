//! Exact aligned-block frequency tables and the information measures
//! built on them: Shannon entropy, mutual information, KL divergence,
//! and self-information.
//!
//! Counts are kept as exact integers; only the final logarithms are
//! evaluated in double precision, so marginal and diagonal identities
//! hold exactly.

use std::collections::BTreeMap;

use crate::alphabet::{pair, PairPolicy, ProbMeasure, SymbolString};
use crate::error::{Error, Result};

/// Encodes an aligned block (first symbol most significant) as an index
/// in `0..k^l`.
pub fn encode_block(block: &[u32], k: usize) -> u64 {
    let mut idx = 0u64;
    for &s in block {
        idx = idx * k as u64 + s as u64;
    }
    idx
}

/// Inverse of [`encode_block`] for a block of length `l`.
pub fn decode_block(mut idx: u64, k: usize, l: usize) -> Vec<u32> {
    let mut out = vec![0u32; l];
    for i in (0..l).rev() {
        out[i] = (idx % k as u64) as u32;
        idx /= k as u64;
    }
    out
}

/// Renders a block as a digit string (digits 0-9, then a-z for larger
/// alphabets; dash-separated numbers beyond base 36).
pub fn render_block(block: &[u32], k: usize) -> String {
    if k <= 36 {
        block
            .iter()
            .map(|&s| char::from_digit(s, 36).unwrap())
            .collect()
    } else {
        block
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Exact distribution of aligned, non-overlapping length-`l` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    l: usize,
    k: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl FrequencyTable {
    /// Builds a table directly from block counts (used for synthetic
    /// distributions in tests and oracles).
    pub fn from_counts(l: usize, k: usize, counts: BTreeMap<u64, u64>) -> Result<Self> {
        if l == 0 || k < 2 {
            return Err(Error::InvalidArgument(
                "block length must be >= 1 and alphabet size >= 2".into(),
            ));
        }
        let cap = (k as u64).checked_pow(l as u32).ok_or_else(|| {
            Error::InvalidArgument(format!("k^l overflows for k={k}, l={l}"))
        })?;
        if counts.keys().any(|&b| b >= cap) {
            return Err(Error::InvalidArgument("block index out of range".into()));
        }
        let total: u64 = counts.values().sum();
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok(FrequencyTable { l, k, counts, total })
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    /// Number of aligned blocks counted, i.e. floor(n / l).
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, block: u64) -> u64 {
        self.counts.get(&block).copied().unwrap_or(0)
    }

    pub fn frequency(&self, block: u64) -> f64 {
        self.count(block) as f64 / self.total as f64
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// Iterates over (block, count) pairs with positive count, in block
    /// order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&b, &c)| (b, c))
    }

    /// Shannon entropy in bits, computed from exact counts as
    /// log2(total) - (1/total) * sum(c * log2 c).
    pub fn entropy(&self) -> f64 {
        entropy_from_counts(self.counts.values().copied(), self.total)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("block,count,frequency\n");
        for (&b, &c) in &self.counts {
            let block = render_block(&decode_block(b, self.k, self.l), self.k);
            out.push_str(&format!(
                "{block},{c},{}\n",
                c as f64 / self.total as f64
            ));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .counts
            .iter()
            .map(|(&b, &c)| {
                serde_json::json!({
                    "block": render_block(&decode_block(b, self.k, self.l), self.k),
                    "count": c,
                    "frequency": c as f64 / self.total as f64,
                })
            })
            .collect();
        serde_json::json!({
            "block_len": self.l,
            "alphabet_size": self.k,
            "total": self.total,
            "blocks": blocks,
        })
    }
}

/// Exact distribution of aligned block pairs of the symbol-wise pairing
/// (u, w).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointFrequencyTable {
    l: usize,
    k: usize,
    counts: BTreeMap<(u64, u64), u64>,
    total: u64,
}

impl JointFrequencyTable {
    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, x: u64, y: u64) -> u64 {
        self.counts.get(&(x, y)).copied().unwrap_or(0)
    }

    pub fn frequency(&self, x: u64, y: u64) -> f64 {
        self.count(x, y) as f64 / self.total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), u64)> + '_ {
        self.counts.iter().map(|(&p, &c)| (p, c))
    }

    /// Joint Shannon entropy in bits, from exact counts.
    pub fn entropy(&self) -> f64 {
        entropy_from_counts(self.counts.values().copied(), self.total)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_u,block_w,count,frequency\n");
        for (&(x, y), &c) in &self.counts {
            out.push_str(&format!(
                "{},{},{c},{}\n",
                render_block(&decode_block(x, self.k, self.l), self.k),
                render_block(&decode_block(y, self.k, self.l), self.k),
                c as f64 / self.total as f64
            ));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .counts
            .iter()
            .map(|(&(x, y), &c)| {
                serde_json::json!({
                    "block_u": render_block(&decode_block(x, self.k, self.l), self.k),
                    "block_w": render_block(&decode_block(y, self.k, self.l), self.k),
                    "count": c,
                    "frequency": c as f64 / self.total as f64,
                })
            })
            .collect();
        serde_json::json!({
            "block_len": self.l,
            "alphabet_size": self.k,
            "total": self.total,
            "blocks": blocks,
        })
    }
}

fn entropy_from_counts(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for c in counts {
        if c > 0 {
            acc += c as f64 * (c as f64).log2();
        }
    }
    (total as f64).log2() - acc / total as f64
}

/// Number of aligned occurrences of `x` among the `|u| / l` blocks of
/// `u`.
pub fn block_count(x: &[u32], u: &SymbolString, l: usize) -> Result<u64> {
    if x.len() != l {
        return Err(Error::InvalidArgument(format!(
            "query block has length {}, expected {l}",
            x.len()
        )));
    }
    if l == 0 || u.len() % l != 0 {
        return Err(Error::NotMultiple { len: u.len(), block: l });
    }
    let k = u.alphabet_size();
    let target = encode_block(x, k);
    let mut count = 0;
    for chunk in u.symbols().chunks_exact(l) {
        if encode_block(chunk, k) == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact block frequency table of `u` at block length `l`. The length of
/// `u` must be a positive multiple of `l`; apply
/// [`crate::alphabet::prefix_truncate`] first otherwise.
pub fn block_freq_table(u: &SymbolString, l: usize) -> Result<FrequencyTable> {
    if l == 0 || u.len() % l != 0 {
        return Err(Error::NotMultiple { len: u.len(), block: l });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = u.alphabet_size();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for chunk in u.symbols().chunks_exact(l) {
        *counts.entry(encode_block(chunk, k)).or_insert(0) += 1;
    }
    let total = (u.len() / l) as u64;
    Ok(FrequencyTable { l, k, counts, total })
}

/// Exact joint block frequency table of `(u, w)` at block length `l`.
pub fn joint_block_freq_table(
    u: &SymbolString,
    w: &SymbolString,
    l: usize,
) -> Result<JointFrequencyTable> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch(u.len(), w.len()));
    }
    if l == 0 || u.len() % l != 0 {
        return Err(Error::NotMultiple { len: u.len(), block: l });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = u.alphabet_size();
    if w.alphabet_size() != k {
        return Err(Error::InvalidArgument(format!(
            "alphabet sizes differ: {} vs {}",
            k,
            w.alphabet_size()
        )));
    }
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for (cu, cw) in u
        .symbols()
        .chunks_exact(l)
        .zip(w.symbols().chunks_exact(l))
    {
        let key = (encode_block(cu, k), encode_block(cw, k));
        *counts.entry(key).or_insert(0) += 1;
    }
    let total = (u.len() / l) as u64;
    Ok(JointFrequencyTable { l, k, counts, total })
}

/// First and second marginal tables of a joint table, with exact integer
/// counts.
pub fn marginals(j: &JointFrequencyTable) -> (FrequencyTable, FrequencyTable) {
    let mut first: BTreeMap<u64, u64> = BTreeMap::new();
    let mut second: BTreeMap<u64, u64> = BTreeMap::new();
    for (&(x, y), &c) in &j.counts {
        *first.entry(x).or_insert(0) += c;
        *second.entry(y).or_insert(0) += c;
    }
    (
        FrequencyTable { l: j.l, k: j.k, counts: first, total: j.total },
        FrequencyTable { l: j.l, k: j.k, counts: second, total: j.total },
    )
}

/// Shannon entropy of a probability measure, in bits.
pub fn shannon_entropy(m: &ProbMeasure) -> f64 {
    let mut acc = 0.0;
    for &p in m.weights() {
        if p > 0.0 {
            acc -= p * p.log2();
        }
    }
    acc
}

/// Mutual information I = H(first marginal) + H(second marginal) - H(joint)
/// of a joint frequency table, in bits.
pub fn mutual_information(j: &JointFrequencyTable) -> f64 {
    let (a, b) = marginals(j);
    a.entropy() + b.entropy() - j.entropy()
}

/// Mutual information of a joint probability measure on pair codes
/// `x * n2 + y`, where `n2` is the size of the second coordinate's
/// domain.
pub fn mutual_information_measure(joint: &ProbMeasure, n2: usize) -> Result<f64> {
    if n2 == 0 || joint.len() % n2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "joint measure of size {} is not a table with {n2} columns",
            joint.len()
        )));
    }
    let n1 = joint.len() / n2;
    let mut a = vec![0.0; n1];
    let mut b = vec![0.0; n2];
    let mut h = 0.0;
    for (i, &p) in joint.weights().iter().enumerate() {
        a[i / n2] += p;
        b[i % n2] += p;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    let ha: f64 = a.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    let hb: f64 = b.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    Ok(ha + hb - h)
}

/// Kullback-Leibler divergence D(alpha || beta) = sum alpha log(alpha/beta)
/// in bits.
pub fn kl_divergence(alpha: &ProbMeasure, beta: &ProbMeasure) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch(alpha.len(), beta.len()));
    }
    let mut d = 0.0;
    for (i, (&a, &b)) in alpha
        .weights()
        .iter()
        .zip(beta.weights().iter())
        .enumerate()
    {
        if a > 0.0 {
            if b == 0.0 {
                return Err(Error::AbsoluteContinuityViolation(i));
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Shannon self-information of `w` under `beta`:
/// sum over positions of log2(1 / beta(w[i])).
pub fn self_information(w: &SymbolString, beta: &ProbMeasure) -> Result<f64> {
    let mut acc = 0.0;
    for &s in w.symbols() {
        let i = s as usize;
        if i >= beta.len() || beta.weight(i) == 0.0 {
            return Err(Error::AbsoluteContinuityViolation(i));
        }
        acc -= beta.weight(i).log2();
    }
    Ok(acc)
}

/// Pairing consistency: the block table of the paired string over the
/// product alphabet, for cross-checks against the joint table.
pub fn paired_block_freq_table(
    u: &SymbolString,
    w: &SymbolString,
    l: usize,
) -> Result<FrequencyTable> {
    let p = pair(u, w, PairPolicy::Strict)?;
    block_freq_table(p.as_symbol_string(), l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::SymbolString;

    fn s(digits: &str) -> SymbolString {
        SymbolString::from_digits(2, digits).unwrap()
    }

    #[test]
    fn counting() {
        assert_eq!(block_count(&[0, 1], &s("010101"), 2).unwrap(), 3);
        assert_eq!(block_count(&[1, 0], &s("010101"), 2).unwrap(), 0);
        assert_eq!(block_count(&[0], &s("0010"), 1).unwrap(), 3);
        assert_eq!(
            block_count(&[0], &s("010"), 2),
            Err(Error::InvalidArgument(
                "query block has length 1, expected 2".into()
            ))
        );
        assert_eq!(
            block_count(&[0, 1], &s("010"), 2),
            Err(Error::NotMultiple { len: 3, block: 2 })
        );
    }

    #[test]
    fn tables() {
        let t = block_freq_table(&s("0101"), 2).unwrap();
        assert_eq!(t.total(), 2);
        assert_eq!(t.count(0b01), 2);
        assert_eq!(t.support_size(), 1);

        let t = block_freq_table(&s("001011"), 2).unwrap();
        assert_eq!(t.count(0b00), 1);
        assert_eq!(t.count(0b10), 1);
        assert_eq!(t.count(0b11), 1);
        assert_eq!(t.total(), 3);

        let t = block_freq_table(&s("0011"), 1).unwrap();
        assert_eq!(t.frequency(0), 0.5);
        assert_eq!(t.frequency(1), 0.5);
    }

    #[test]
    fn joint_tables_and_marginals() {
        let j = joint_block_freq_table(&s("0101"), &s("0011"), 1).unwrap();
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            assert_eq!(j.count(x, y), 1);
        }
        let (a, b) = marginals(&j);
        assert_eq!(a, block_freq_table(&s("0101"), 1).unwrap());
        assert_eq!(b, block_freq_table(&s("0011"), 1).unwrap());

        let j = joint_block_freq_table(&s("01"), &s("01"), 1).unwrap();
        assert_eq!(j.count(0, 0), 1);
        assert_eq!(j.count(1, 1), 1);
        assert_eq!(j.count(0, 1), 0);

        let j = joint_block_freq_table(&s("00"), &s("01"), 2).unwrap();
        assert_eq!(j.count(0b00, 0b01), 1);
        assert_eq!(j.total(), 1);

        assert_eq!(
            joint_block_freq_table(&s("0"), &s("01"), 1),
            Err(Error::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn entropies() {
        assert_eq!(shannon_entropy(&ProbMeasure::uniform(2)), 1.0);
        assert_eq!(shannon_entropy(&ProbMeasure::point_mass(4, 1)), 0.0);
        let m = ProbMeasure::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((shannon_entropy(&m) - 1.5).abs() < 1e-15);

        let t = block_freq_table(&s("0011"), 1).unwrap();
        assert_eq!(t.entropy(), 1.0);
        let t = block_freq_table(&s("0000"), 1).unwrap();
        assert_eq!(t.entropy(), 0.0);
    }

    #[test]
    fn mutual_info() {
        // independent pairing: (u, w) hits all four pairs once
        let j = joint_block_freq_table(&s("0101"), &s("0011"), 1).unwrap();
        assert!(mutual_information(&j).abs() < 1e-15);
        // diagonal uniform
        let j = joint_block_freq_table(&s("01"), &s("01"), 1).unwrap();
        assert!((mutual_information(&j) - 1.0).abs() < 1e-15);
        // joint {(0,0):1/2, (0,1):1/4, (1,1):1/4}:
        // H1 = H(3/4,1/4), H2 = 1, H = 1.5
        let j = joint_block_freq_table(&s("0001"), &s("0101"), 1).unwrap();
        let expect = 0.75f64.log2().mul_add(-0.75, -(0.25f64.log2()) * 0.25) + 1.0 - 1.5;
        assert!((mutual_information(&j) - expect).abs() < 1e-12);
        assert!((mutual_information(&j) - 0.3112781244591328).abs() < 1e-12);

        let jm = ProbMeasure::new(vec![0.5, 0.25, 0.0, 0.25]).unwrap();
        assert!(
            (mutual_information_measure(&jm, 2).unwrap() - mutual_information(&j)).abs()
                < 1e-12
        );
    }

    #[test]
    fn kl() {
        let u = ProbMeasure::uniform(2);
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);
        let point = ProbMeasure::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&point, &u).unwrap(), 1.0);
        let a = ProbMeasure::new(vec![0.75, 0.25]).unwrap();
        let d = kl_divergence(&a, &u).unwrap();
        assert!((d - 0.18872187554086717).abs() < 1e-12);
        assert_eq!(
            kl_divergence(&u, &point),
            Err(Error::AbsoluteContinuityViolation(1))
        );
    }

    #[test]
    fn self_info() {
        let u = ProbMeasure::uniform(2);
        assert_eq!(self_information(&s("010011"), &u).unwrap(), 6.0);
        assert_eq!(self_information(&SymbolString::empty(2), &u).unwrap(), 0.0);
        let b = ProbMeasure::new(vec![0.75, 0.25]).unwrap();
        let v = self_information(&s("001"), &b).unwrap();
        let expect = 2.0 * (4.0f64 / 3.0).log2() + 2.0;
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 2.830074998557688).abs() < 1e-12);
        let point = ProbMeasure::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            self_information(&s("01"), &point),
            Err(Error::AbsoluteContinuityViolation(1))
        );
        // additivity under concatenation
        let uv = self_information(&s("001101"), &b).unwrap();
        let a1 = self_information(&s("001"), &b).unwrap();
        let a2 = self_information(&s("101"), &b).unwrap();
        assert!((uv - (a1 + a2)).abs() < 1e-12);
    }

    #[test]
    fn pairing_consistency() {
        // entropy of the joint table equals the entropy of the paired
        // string's table over the product alphabet, bitwise
        let u = s("01001110");
        let w = s("11010010");
        for l in [1, 2, 4] {
            let j = joint_block_freq_table(&u, &w, l).unwrap();
            let p = paired_block_freq_table(&u, &w, l).unwrap();
            assert_eq!(j.entropy(), p.entropy());
            assert_eq!(j.total(), p.total());
        }
    }

    #[test]
    fn diagonal_identity_bitwise() {
        let u = s("0110100110010110");
        for l in [1, 2, 4] {
            let j = joint_block_freq_table(&u, &u, l).unwrap();
            let t = block_freq_table(&u, l).unwrap();
            assert_eq!(j.entropy(), t.entropy());
            assert_eq!(mutual_information(&j), t.entropy());
        }
    }

    #[test]
    fn serialization_shapes() {
        let t = block_freq_table(&s("001011"), 2).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("block,count,frequency\n"));
        assert!(csv.contains("00,1,"));
        let v = t.to_json_value();
        assert_eq!(v["total"], 3);
        let j = joint_block_freq_table(&s("0101"), &s("0011"), 1).unwrap();
        assert!(j.to_csv().contains("0,1,1,"));
        assert_eq!(j.to_json_value()["blocks"].as_array().unwrap().len(), 4);
    }
}
