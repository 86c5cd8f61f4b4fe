//! Alphabets, symbol strings, paired strings, file ingestion, and
//! deterministic sequence generators.

use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `k`-symbol alphabet. Symbols are dense indices `0..k`; display glyphs
/// are presentation-only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    symbol_names: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be at least 2, got {k}"
            )));
        }
        Ok(Alphabet { k, symbol_names: None })
    }

    pub fn with_names(k: usize, names: Vec<String>) -> Result<Self> {
        let mut a = Alphabet::new(k)?;
        if names.len() != k {
            return Err(Error::InvalidArgument(format!(
                "expected {k} symbol names, got {}",
                names.len()
            )));
        }
        a.symbol_names = Some(names);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.k
    }

    /// The product alphabet over symbol pairs, of size `k*k`.
    pub fn product(&self) -> Alphabet {
        Alphabet { k: self.k * self.k, symbol_names: None }
    }

    pub fn glyph(&self, symbol: u32) -> String {
        match &self.symbol_names {
            Some(names) => names[symbol as usize].clone(),
            None => symbol.to_string(),
        }
    }
}

/// A finite string over a `k`-symbol alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolString {
    k: usize,
    data: Vec<u32>,
}

impl SymbolString {
    pub fn new(k: usize, data: Vec<u32>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be at least 2, got {k}"
            )));
        }
        if let Some(pos) = data.iter().position(|&s| s as usize >= k) {
            return Err(Error::OutOfAlphabet(pos));
        }
        Ok(SymbolString { k, data })
    }

    pub fn empty(k: usize) -> Self {
        SymbolString { k, data: Vec::new() }
    }

    /// Parses a digit string like "0101" for tests and the CLI.
    pub fn from_digits(k: usize, digits: &str) -> Result<Self> {
        parse_symbols(digits.as_bytes(), k, ParseMode::Digits)
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, i: usize) -> u32 {
        self.data[i]
    }

    pub fn prefix(&self, n: usize) -> SymbolString {
        SymbolString { k: self.k, data: self.data[..n].to_vec() }
    }

    /// Renders as a digit string (k <= 10 only; used by reports and tests).
    pub fn to_digit_string(&self) -> String {
        self.data
            .iter()
            .map(|&s| char::from_digit(s, 10).unwrap_or('?'))
            .collect()
    }
}

/// Symbol-wise pairing of two equal-length strings over the same alphabet.
/// Pair codes use the layout `a*k + b` (first coordinate major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedString {
    base_k: usize,
    inner: SymbolString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairPolicy {
    Strict,
    Truncate,
}

/// Pairs `u` and `w` position by position.
pub fn pair(u: &SymbolString, w: &SymbolString, policy: PairPolicy) -> Result<PairedString> {
    if u.k != w.k {
        return Err(Error::InvalidArgument(format!(
            "cannot pair strings over different alphabets ({} vs {})",
            u.k, w.k
        )));
    }
    let n = match policy {
        PairPolicy::Strict => {
            if u.len() != w.len() {
                return Err(Error::LengthMismatch(u.len(), w.len()));
            }
            u.len()
        }
        PairPolicy::Truncate => u.len().min(w.len()),
    };
    let k = u.k as u32;
    let data: Vec<u32> = (0..n).map(|i| u.data[i] * k + w.data[i]).collect();
    Ok(PairedString {
        base_k: u.k,
        inner: SymbolString { k: u.k * u.k, data },
    })
}

impl PairedString {
    pub fn base_alphabet_size(&self) -> usize {
        self.base_k
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    /// The underlying string over the product alphabet of size `k*k`.
    pub fn as_symbol_string(&self) -> &SymbolString {
        &self.inner
    }

    /// Splits back into the two coordinate strings.
    pub fn unzip(&self) -> (SymbolString, SymbolString) {
        let k = self.base_k as u32;
        let mut u = Vec::with_capacity(self.len());
        let mut w = Vec::with_capacity(self.len());
        for &p in self.inner.symbols() {
            u.push(p / k);
            w.push(p % k);
        }
        (
            SymbolString { k: self.base_k, data: u },
            SymbolString { k: self.base_k, data: w },
        )
    }
}

/// A discrete probability measure on `{0, .., m-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbMeasure {
    weights: Vec<f64>,
}

impl ProbMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be non-negative and finite".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(sum));
        }
        Ok(ProbMeasure { weights })
    }

    pub fn uniform(m: usize) -> Self {
        ProbMeasure { weights: vec![1.0 / m as f64; m] }
    }

    pub fn point_mass(m: usize, at: usize) -> Self {
        let mut weights = vec![0.0; m];
        weights[at] = 1.0;
        ProbMeasure { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Product measure on pair codes `a*m2 + b`.
    pub fn product(&self, other: &ProbMeasure) -> ProbMeasure {
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for &a in &self.weights {
            for &b in &other.weights {
                weights.push(a * b);
            }
        }
        ProbMeasure { weights }
    }

    /// The l-fold product on blocks of length `l`, indexed first-symbol-major.
    pub fn block_product(&self, l: usize) -> ProbMeasure {
        let mut out = ProbMeasure { weights: vec![1.0] };
        for _ in 0..l {
            out = out.product(self);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Digits,
    RawBytes,
    BitPacked,
}

/// Decodes raw file content into a symbol string. Trailing ASCII whitespace
/// is ignored in digit mode so ordinary text files round-trip.
pub fn parse_symbols(bytes: &[u8], k: usize, mode: ParseMode) -> Result<SymbolString> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "alphabet size must be at least 2, got {k}"
        )));
    }
    match mode {
        ParseMode::Digits => {
            if k > 10 {
                return Err(Error::InvalidArgument(
                    "digit mode requires an alphabet of size at most 10".into(),
                ));
            }
            let end = bytes
                .iter()
                .rposition(|b| !b.is_ascii_whitespace())
                .map_or(0, |p| p + 1);
            let mut data = Vec::with_capacity(end);
            for (i, &b) in bytes[..end].iter().enumerate() {
                if !b.is_ascii_digit() || (b - b'0') as usize >= k {
                    return Err(Error::OutOfAlphabet(i));
                }
                data.push((b - b'0') as u32);
            }
            Ok(SymbolString { k, data })
        }
        ParseMode::RawBytes => {
            if k > 256 {
                return Err(Error::InvalidArgument(
                    "raw-byte mode requires an alphabet of size at most 256".into(),
                ));
            }
            let mut data = Vec::with_capacity(bytes.len());
            for (i, &b) in bytes.iter().enumerate() {
                if (b as usize) >= k {
                    return Err(Error::OutOfAlphabet(i));
                }
                data.push(b as u32);
            }
            Ok(SymbolString { k, data })
        }
        ParseMode::BitPacked => {
            let bits = match k {
                2 => 1,
                4 => 2,
                16 => 4,
                _ => {
                    return Err(Error::InvalidArgument(
                        "bit-packed mode supports alphabet sizes 2, 4, and 16".into(),
                    ))
                }
            };
            let per_byte = 8 / bits;
            let mask = (k - 1) as u32;
            let mut data = Vec::with_capacity(bytes.len() * per_byte);
            for &b in bytes {
                for j in 0..per_byte {
                    let shift = 8 - bits * (j + 1);
                    data.push(((b as u32) >> shift) & mask);
                }
            }
            Ok(SymbolString { k, data })
        }
    }
}

/// The prefix of `u` whose length is the largest multiple of `r` not
/// exceeding `|u|`.
pub fn prefix_truncate(u: &SymbolString, r: usize) -> Result<SymbolString> {
    if r < 1 || r > u.len() {
        return Err(Error::BlockTooLarge { block: r, len: u.len() });
    }
    Ok(u.prefix((u.len() / r) * r))
}

/// First `n` symbols of the base-`k` Champernowne sequence: the
/// concatenation of the base-k numerals of 1, 2, 3, ...
pub fn gen_champernowne(k: usize, n: usize) -> Result<SymbolString> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "alphabet size must be at least 2, got {k}"
        )));
    }
    let mut data = Vec::with_capacity(n);
    let mut m: u64 = 1;
    let mut digits = Vec::new();
    while data.len() < n {
        digits.clear();
        let mut v = m;
        while v > 0 {
            digits.push((v % k as u64) as u32);
            v /= k as u64;
        }
        for &d in digits.iter().rev() {
            if data.len() == n {
                break;
            }
            data.push(d);
        }
        m += 1;
    }
    Ok(SymbolString { k, data })
}

/// `n` i.i.d. samples from `measure`, drawn with ChaCha8 seeded from
/// `seed`. The generator and the inverse-CDF sampling are pinned so that
/// identical `(measure, n, seed)` always produce identical strings.
pub fn gen_iid(measure: &ProbMeasure, n: usize, seed: u64) -> SymbolString {
    let k = measure.len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        // 53 uniform bits in [0, 1)
        let x = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let mut acc = 0.0;
        let mut sym = k as u32 - 1;
        for (i, &w) in measure.weights().iter().enumerate() {
            acc += w;
            if x < acc {
                sym = i as u32;
                break;
            }
        }
        data.push(sym);
    }
    SymbolString { k: k.max(2), data }
}

/// `pattern` repeated and truncated to length `n`.
pub fn gen_periodic(pattern: &SymbolString, n: usize) -> Result<SymbolString> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let data = (0..n).map(|i| pattern.data[i % pattern.len()]).collect();
    Ok(SymbolString { k: pattern.k, data })
}
