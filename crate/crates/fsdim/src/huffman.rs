//! Block-Huffman compressors: canonical Huffman codebooks over the full
//! block alphabet and the k-ary tree machines that realize them as
//! certified information-lossless compressors.
//!
//! The codebook assigns a codeword to every block in Sigma^l, including
//! blocks with zero empirical count (they receive the longest
//! codewords). A complete prefix-free code keeps the tree machine
//! information-lossless without any escape path, and the zero-weight
//! leaves do not contribute to the expected length, so the classical
//! bound E[len] <= H + 1 behind the ratio inequalities is preserved.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::alphabet::{prefix_truncate, SymbolString};
use crate::blockstats::{block_freq_table, decode_block, render_block, FrequencyTable};
use crate::error::{Error, Result};
use crate::fsc::{Fsc, CERT_PREFIX_CODE};

/// A complete prefix-free code on Sigma^l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCodebook {
    l: usize,
    k: usize,
    entries: BTreeMap<u64, String>,
}

impl HuffmanCodebook {
    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn codeword(&self, block: u64) -> &str {
        &self.entries[&block]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &str)> + '_ {
        self.entries.iter().map(|(&b, c)| (b, c.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expected codeword length under a frequency table (bits per
    /// block).
    pub fn expected_len(&self, t: &FrequencyTable) -> f64 {
        let mut bits = 0u64;
        for (block, count) in t.iter() {
            bits += count * self.entries[&block].len() as u64;
        }
        bits as f64 / t.total() as f64
    }

    /// Decodes a bit string into the unique block sequence it encodes.
    pub fn decode(&self, bits: &str) -> Result<Vec<u64>> {
        let mut by_code: BTreeMap<&str, u64> = BTreeMap::new();
        for (&b, c) in &self.entries {
            by_code.insert(c.as_str(), b);
        }
        let mut out = Vec::new();
        let mut rest = bits;
        while !rest.is_empty() {
            let mut matched = None;
            for (code, &b) in &by_code {
                if let Some(r) = rest.strip_prefix(code) {
                    matched = Some((b, r));
                    break;
                }
            }
            match matched {
                Some((b, r)) => {
                    out.push(b);
                    rest = r;
                }
                None => {
                    return Err(Error::InvalidArgument(
                        "bit string is not a concatenation of codewords".into(),
                    ))
                }
            }
        }
        Ok(out)
    }

    pub fn to_csv(&self, t: &FrequencyTable) -> String {
        let mut out = String::from("block,codeword,count\n");
        for (&b, c) in &self.entries {
            out.push_str(&format!(
                "{},{c},{}\n",
                render_block(&decode_block(b, self.k, self.l), self.k),
                t.count(b)
            ));
        }
        out
    }
}

/// Builds the canonical Huffman codebook for a frequency table.
///
/// Determinism: nodes are merged lowest weight first, ties broken by the
/// lexicographically smallest block contained in the subtree; codewords
/// are then assigned canonically in (length, block) order.
pub fn build_codebook(t: &FrequencyTable) -> Result<HuffmanCodebook> {
    if t.support_size() == 0 {
        return Err(Error::EmptySupport);
    }
    let l = t.block_len();
    let k = t.alphabet_size();
    let m = (k as u64)
        .checked_pow(l as u32)
        .filter(|&m| m <= 1 << 20)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "block alphabet k^l too large for codebook construction (k={k}, l={l})"
            ))
        })?;

    // arena of tree nodes; leaves are 0..m
    let mut children: Vec<Option<(usize, usize)>> = vec![None; m as usize];
    let mut heap: BinaryHeap<Reverse<(u64, u64, usize)>> = (0..m)
        .map(|b| Reverse((t.count(b), b, b as usize)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w1, b1, n1)) = heap.pop().unwrap();
        let Reverse((w2, _b2, n2)) = heap.pop().unwrap();
        let id = children.len();
        children.push(Some((n1, n2)));
        heap.push(Reverse((w1 + w2, b1.min(_b2), id)));
    }
    let root = heap.pop().unwrap().0 .2;

    // codeword lengths = leaf depths
    let mut lengths: BTreeMap<u64, usize> = BTreeMap::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((node, depth)) = stack.pop() {
        match children[node] {
            Some((a, b)) => {
                stack.push((a, depth + 1));
                stack.push((b, depth + 1));
            }
            None => {
                lengths.insert(node as u64, depth.max(1));
            }
        }
    }

    // canonical assignment in (length, block) order
    let mut order: Vec<(usize, u64)> = lengths.iter().map(|(&b, &d)| (d, b)).collect();
    order.sort();
    let mut entries = BTreeMap::new();
    let mut code = 0u64;
    let mut prev_len = order[0].0;
    for &(len, block) in &order {
        code <<= len - prev_len;
        prev_len = len;
        let word: String = (0..len)
            .rev()
            .map(|b| if code >> b & 1 == 1 { '1' } else { '0' })
            .collect();
        entries.insert(block, word);
        code += 1;
    }
    Ok(HuffmanCodebook { l, k, entries })
}

/// Builds the tree machine realizing a block codebook: it reads l input
/// symbols down a k-ary tree, emits the block's codeword on the last
/// symbol, and returns to the root. A trailing partial block parks
/// mid-tree and emits nothing.
///
/// State count is (k^l - 1)/(k - 1): one state per proper block prefix.
pub fn huffman_ilfsc(book: &HuffmanCodebook) -> Result<Fsc> {
    if book.is_empty() {
        return Err(Error::EmptySupport);
    }
    let k = book.alphabet_size();
    let l = book.block_len();
    // state id of the depth-d prefix p: (k^d - 1)/(k - 1) + encode(p)
    let level_base: Vec<usize> = (0..l)
        .map(|d| ((k as u64).pow(d as u32) as usize - 1) / (k - 1))
        .collect();
    let states = (((k as u64).pow(l as u32) - 1) / (k as u64 - 1)) as usize;
    let mut transitions: Vec<(usize, usize, usize, &str)> = Vec::with_capacity(states * k);
    for d in 0..l {
        for p in 0..(k as u64).pow(d as u32) {
            let from = level_base[d] + p as usize;
            for a in 0..k {
                let child = p * k as u64 + a as u64;
                if d + 1 < l {
                    transitions.push((from, a, level_base[d + 1] + child as usize, ""));
                } else {
                    transitions.push((from, a, 0, book.codeword(child)));
                }
            }
        }
    }
    Ok(Fsc::from_transitions(states, k, 0, &transitions)?.with_certificate(CERT_PREFIX_CODE))
}

/// Builds the block-Huffman compressor trained on `u` at block length
/// `l`: truncate to a block multiple, count block frequencies, build the
/// canonical codebook, realize the tree machine.
pub fn build_for_string(u: &SymbolString, l: usize) -> Result<Fsc> {
    let trimmed = prefix_truncate(u, l)?;
    let table = block_freq_table(&trimmed, l)?;
    huffman_ilfsc(&build_codebook(&table)?)
}

/// Codebook counterpart of [`build_for_string`], for reports.
pub fn codebook_for_string(u: &SymbolString, l: usize) -> Result<(FrequencyTable, HuffmanCodebook)> {
    let trimmed = prefix_truncate(u, l)?;
    let table = block_freq_table(&trimmed, l)?;
    let book = build_codebook(&table)?;
    Ok((table, book))
}
