//! Finite-state compressors: execution, per-start-state minimum output
//! length, the generalized Kraft audit, information-losslessness
//! checking, and input-pair relabeling.
//!
//! A machine is a total deterministic transducer (Q, delta, nu, q0)
//! whose transitions emit finite (possibly empty) bit strings. It is
//! information-lossless (IL) when u -> (output, end state) is
//! injective.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::alphabet::SymbolString;
use crate::error::{Error, Result};

/// Machines built by this crate may carry a proof sketch of
/// information-losslessness that lets `check_il` skip the search.
pub const CERT_PREFIX_CODE: &str = "prefix-code-by-construction";

/// A deterministic finite-state compressor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsc {
    states: usize,
    alphabet_size: usize,
    start: usize,
    /// delta, row-major: `delta[q * alphabet_size + a]`
    delta: Vec<usize>,
    /// nu, same indexing; outputs are ASCII bit strings, possibly empty
    nu: Vec<String>,
    certificate: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransitionDoc {
    from: usize,
    symbol: usize,
    to: usize,
    output_bits: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MachineDoc {
    states: usize,
    alphabet_size: usize,
    start: usize,
    transitions: Vec<TransitionDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    certificate: Option<String>,
}

impl Fsc {
    /// Builds a machine from a complete transition list. Every
    /// (state, symbol) pair must appear exactly once.
    pub fn from_transitions(
        states: usize,
        alphabet_size: usize,
        start: usize,
        transitions: &[(usize, usize, usize, &str)],
    ) -> Result<Self> {
        if states == 0 {
            return Err(Error::MachineFormat("machine needs at least one state".into()));
        }
        if alphabet_size < 2 {
            return Err(Error::MachineFormat(
                "input alphabet must have at least two symbols".into(),
            ));
        }
        if start >= states {
            return Err(Error::StateOutOfRange { state: start, states });
        }
        let mut delta = vec![usize::MAX; states * alphabet_size];
        let mut nu = vec![String::new(); states * alphabet_size];
        for &(from, symbol, to, bits) in transitions {
            if from >= states || to >= states {
                return Err(Error::StateOutOfRange { state: from.max(to), states });
            }
            if symbol >= alphabet_size {
                return Err(Error::SymbolOutOfRange { symbol, alphabet: alphabet_size });
            }
            if !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::MachineFormat(format!(
                    "output for state {from}, symbol {symbol} is not a bit string"
                )));
            }
            let idx = from * alphabet_size + symbol;
            if delta[idx] != usize::MAX {
                return Err(Error::MachineFormat(format!(
                    "duplicate transition for state {from}, symbol {symbol}"
                )));
            }
            delta[idx] = to;
            nu[idx] = bits.to_string();
        }
        if let Some(idx) = delta.iter().position(|&t| t == usize::MAX) {
            return Err(Error::MachineFormat(format!(
                "missing transition for state {}, symbol {}",
                idx / alphabet_size,
                idx % alphabet_size
            )));
        }
        Ok(Fsc { states, alphabet_size, start, delta, nu, certificate: None })
    }

    pub fn with_certificate(mut self, certificate: &str) -> Self {
        self.certificate = Some(certificate.to_string());
        self
    }

    /// One-state machine emitting the fixed-width binary code of each
    /// symbol (ceil(log2 m) bits).
    pub fn identity(alphabet_size: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::MachineFormat(
                "input alphabet must have at least two symbols".into(),
            ));
        }
        let width = usize::BITS as usize - (alphabet_size - 1).leading_zeros() as usize;
        let nu = (0..alphabet_size)
            .map(|a| {
                (0..width)
                    .rev()
                    .map(|b| if a >> b & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        Ok(Fsc {
            states: 1,
            alphabet_size,
            start: 0,
            delta: vec![0; alphabet_size],
            nu,
            certificate: Some(CERT_PREFIX_CODE.to_string()),
        })
    }

    /// One-state machine emitting nothing. Deliberately lossy; used to
    /// exercise the Kraft audit and the collision search.
    pub fn epsilon(alphabet_size: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::MachineFormat(
                "input alphabet must have at least two symbols".into(),
            ));
        }
        Ok(Fsc {
            states: 1,
            alphabet_size,
            start: 0,
            delta: vec![0; alphabet_size],
            nu: vec![String::new(); alphabet_size],
            certificate: None,
        })
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn start_state(&self) -> usize {
        self.start
    }

    pub fn certificate(&self) -> Option<&str> {
        self.certificate.as_deref()
    }

    pub fn transition(&self, q: usize, a: u32) -> usize {
        self.delta[q * self.alphabet_size + a as usize]
    }

    pub fn output(&self, q: usize, a: u32) -> &str {
        &self.nu[q * self.alphabet_size + a as usize]
    }

    fn check_input(&self, u: &SymbolString) -> Result<()> {
        if let Some(&s) = u.symbols().iter().find(|&&s| s as usize >= self.alphabet_size) {
            return Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                alphabet: self.alphabet_size,
            });
        }
        Ok(())
    }

    /// Output of the run from the start state.
    pub fn run(&self, u: &SymbolString) -> Result<String> {
        self.run_from(self.start, u)
    }

    /// Output of the run started at state `q` (the machine C_q).
    pub fn run_from(&self, q: usize, u: &SymbolString) -> Result<String> {
        if q >= self.states {
            return Err(Error::StateOutOfRange { state: q, states: self.states });
        }
        self.check_input(u)?;
        let mut state = q;
        let mut out = String::new();
        for &a in u.symbols() {
            out.push_str(self.output(state, a));
            state = self.transition(state, a);
        }
        Ok(out)
    }

    /// Output length only, without materializing the bit string.
    pub fn run_len(&self, u: &SymbolString) -> Result<u64> {
        self.run_len_from(self.start, u)
    }

    pub fn run_len_from(&self, q: usize, u: &SymbolString) -> Result<u64> {
        if q >= self.states {
            return Err(Error::StateOutOfRange { state: q, states: self.states });
        }
        self.check_input(u)?;
        let mut state = q;
        let mut len = 0u64;
        for &a in u.symbols() {
            len += self.output(state, a).len() as u64;
            state = self.transition(state, a);
        }
        Ok(len)
    }

    /// End state delta*(q, u).
    pub fn end_state(&self, q: usize, u: &SymbolString) -> Result<usize> {
        if q >= self.states {
            return Err(Error::StateOutOfRange { state: q, states: self.states });
        }
        self.check_input(u)?;
        let mut state = q;
        for &a in u.symbols() {
            state = self.transition(state, a);
        }
        Ok(state)
    }

    /// L_C(w): minimum output length over all start states.
    pub fn min_output_len(&self, w: &SymbolString) -> Result<u64> {
        (0..self.states)
            .map(|q| self.run_len_from(q, w))
            .try_fold(u64::MAX, |m, r| r.map(|v| m.min(v)))
    }

    /// Relabels a pair-input machine so every (a,b) transition becomes a
    /// (b,a) transition: run(C, (u,w)) = run(relabel_swap(C), (w,u)).
    pub fn relabel_swap(&self) -> Result<Fsc> {
        let k = (self.alphabet_size as f64).sqrt().round() as usize;
        if k * k != self.alphabet_size || k < 2 {
            return Err(Error::NotProductAlphabet(self.alphabet_size));
        }
        let mut delta = vec![0usize; self.delta.len()];
        let mut nu = vec![String::new(); self.nu.len()];
        for q in 0..self.states {
            for a in 0..k {
                for b in 0..k {
                    let src = q * self.alphabet_size + a * k + b;
                    let dst = q * self.alphabet_size + b * k + a;
                    delta[dst] = self.delta[src];
                    nu[dst] = self.nu[src].clone();
                }
            }
        }
        Ok(Fsc {
            states: self.states,
            alphabet_size: self.alphabet_size,
            start: self.start,
            delta,
            nu,
            certificate: self.certificate.clone(),
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut transitions = Vec::with_capacity(self.delta.len());
        for q in 0..self.states {
            for a in 0..self.alphabet_size {
                transitions.push(TransitionDoc {
                    from: q,
                    symbol: a,
                    to: self.delta[q * self.alphabet_size + a],
                    output_bits: self.nu[q * self.alphabet_size + a].clone(),
                });
            }
        }
        serde_json::to_value(MachineDoc {
            states: self.states,
            alphabet_size: self.alphabet_size,
            start: self.start,
            transitions,
            certificate: self.certificate.clone(),
        })
        .expect("machine serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serialization")
    }

    pub fn from_json_str(text: &str) -> Result<Fsc> {
        let doc: MachineDoc = serde_json::from_str(text)
            .map_err(|e| Error::MachineFormat(e.to_string()))?;
        let transitions: Vec<(usize, usize, usize, &str)> = doc
            .transitions
            .iter()
            .map(|t| (t.from, t.symbol, t.to, t.output_bits.as_str()))
            .collect();
        let mut m = Fsc::from_transitions(doc.states, doc.alphabet_size, doc.start, &transitions)?;
        m.certificate = doc.certificate;
        Ok(m)
    }

    /// States reachable from the start state, each with a shortest input
    /// path.
    fn reachable_paths(&self) -> BTreeMap<usize, Vec<u32>> {
        let mut paths: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        paths.insert(self.start, Vec::new());
        let mut queue = VecDeque::from([self.start]);
        while let Some(q) = queue.pop_front() {
            let base = paths[&q].clone();
            for a in 0..self.alphabet_size as u32 {
                let t = self.transition(q, a);
                if !paths.contains_key(&t) {
                    let mut p = base.clone();
                    p.push(a);
                    paths.insert(t, p);
                    queue.push_back(t);
                }
            }
        }
        paths
    }

    /// Generalized Kraft audit at word length `r`: exact dyadic
    /// sum_{w in Sigma^r} 2^(-L_C(w)) against the closed-form bound
    /// s^2 * (1 + log2((s^2 + m^r) / s^2)). Every IL machine must pass;
    /// a failure certifies the machine is not IL.
    pub fn kraft_audit(&self, r: usize, budget: u64) -> Result<KraftReport> {
        if r == 0 {
            return Err(Error::InvalidArgument("word length must be at least 1".into()));
        }
        let words = (self.alphabet_size as u64)
            .checked_pow(r as u32)
            .ok_or(Error::BudgetExceeded(u64::MAX, budget))?;
        if words > budget {
            return Err(Error::BudgetExceeded(words, budget));
        }

        // Dynamic program over canonical run configurations instead of
        // the full word tree: a word's cost min_q |C_q(w)| depends only
        // on the set of (state, output length - running minimum) pairs,
        // so words sharing that set are advanced together. Counts per
        // accumulated minimum stay exact integers.
        type Config = Vec<(usize, u64)>;
        let init: Config = (0..self.states).map(|q| (q, 0)).collect();
        let mut configs: BTreeMap<Config, BTreeMap<u64, u64>> = BTreeMap::new();
        configs.insert(init, BTreeMap::from([(0u64, 1u64)]));
        for _ in 0..r {
            let mut next: BTreeMap<Config, BTreeMap<u64, u64>> = BTreeMap::new();
            for (cfg, bases) in &configs {
                for a in 0..self.alphabet_size as u32 {
                    let mut pairs: Config = cfg
                        .iter()
                        .map(|&(q, l)| {
                            (self.transition(q, a), l + self.output(q, a).len() as u64)
                        })
                        .collect();
                    let m = pairs.iter().map(|&(_, l)| l).min().unwrap();
                    for p in pairs.iter_mut() {
                        p.1 -= m;
                    }
                    pairs.sort_unstable();
                    pairs.dedup();
                    let slot = next.entry(pairs).or_default();
                    for (&base, &c) in bases {
                        *slot.entry(base + m).or_insert(0) += c;
                    }
                }
            }
            configs = next;
        }
        // after normalization each word's cost is exactly its base
        let mut len_counts: BTreeMap<u64, u64> = BTreeMap::new();
        for bases in configs.values() {
            for (&base, &c) in bases {
                *len_counts.entry(base).or_insert(0) += c;
            }
        }

        // lhs = sum over lengths L of count(L) * 2^(-L), exactly:
        // numerator / 2^max_len with numerator = sum count * 2^(max-L)
        let max_len = *len_counts.keys().max().unwrap();
        let mut numerator = BigUint::from(0u32);
        for (&l, &c) in &len_counts {
            numerator += BigUint::from(c) << (max_len - l);
        }
        let lhs = big_ratio_to_f64(&numerator, max_len);

        let s2 = (self.states as f64) * (self.states as f64);
        let m_r = (self.alphabet_size as f64).powi(r as i32);
        let rhs = s2 * (1.0 + ((s2 + m_r) / s2).log2());
        Ok(KraftReport {
            word_len: r,
            words,
            lhs,
            lhs_numerator: numerator.to_string(),
            lhs_shift: max_len,
            rhs,
            holds: lhs <= rhs,
        })
    }

    /// Information-losslessness check. A construction certificate
    /// short-circuits to Verified; otherwise runs the collision search.
    pub fn check_il(&self, budget: u64) -> IlVerdict {
        if self.certificate.is_some() {
            return IlVerdict::Verified;
        }
        self.collision_search(budget)
    }

    /// Searches for two distinct inputs with identical output and end
    /// state, ignoring any certificate.
    ///
    /// Phase A explores configurations (state, state, output overhang)
    /// seeded by diverging symbol pairs after a common prefix, extending
    /// only the output-deficit side; the overhang is capped at
    /// s^2 * (1 + max transition output length) bits. Phase B looks for
    /// empty-output cycles, which produce prefix collisions. `Verified`
    /// is returned only when both phases exhaust their finite spaces
    /// within `budget` explored configurations.
    pub fn collision_search(&self, budget: u64) -> IlVerdict {
        let reachable = self.reachable_paths();

        // Phase B: an empty-output cycle through a reachable state p
        // gives the collision (path + cycle, path + cycle + cycle).
        for (&p, path) in &reachable {
            if let Some(cycle) = self.epsilon_cycle_through(p) {
                let mut u: Vec<u32> = path.clone();
                u.extend_from_slice(&cycle);
                let mut w = u.clone();
                w.extend_from_slice(&cycle);
                return self.witness_verdict(u, w);
            }
        }

        // Phase A
        let max_out = self.nu.iter().map(|o| o.len()).max().unwrap_or(0);
        let lag_cap = self.states * self.states * (1 + max_out);
        // config: (state of left run, state of right run, true when the
        // left run's output is ahead, outstanding bits)
        type Config = (usize, usize, bool, String);
        let mut parents: HashMap<Config, Option<(Config, bool, u32)>> = HashMap::new();
        let mut seeds: HashMap<Config, (usize, u32, u32)> = HashMap::new();
        let mut queue: VecDeque<Config> = VecDeque::new();
        let mut explored = 0u64;
        let mut truncated = false;

        let normalize = |s1: usize, s2: usize, left_ahead: bool, diff: String| -> Config {
            if diff.is_empty() {
                (s1, s2, false, diff)
            } else {
                (s1, s2, left_ahead, diff)
            }
        };

        for (&p, _) in &reachable {
            for a in 0..self.alphabet_size as u32 {
                for b in (a + 1)..self.alphabet_size as u32 {
                    let oa = self.output(p, a);
                    let ob = self.output(p, b);
                    let (left_ahead, diff) = if let Some(rest) = oa.strip_prefix(ob) {
                        (true, rest.to_string())
                    } else if let Some(rest) = ob.strip_prefix(oa) {
                        (false, rest.to_string())
                    } else {
                        continue; // outputs diverge forever
                    };
                    let cfg = normalize(
                        self.transition(p, a),
                        self.transition(p, b),
                        left_ahead,
                        diff,
                    );
                    if parents.contains_key(&cfg) {
                        continue;
                    }
                    parents.insert(cfg.clone(), None);
                    seeds.insert(cfg.clone(), (p, a, b));
                    queue.push_back(cfg);
                }
            }
        }

        let rebuild = |cfg: &Config,
                       parents: &HashMap<Config, Option<(Config, bool, u32)>>,
                       seeds: &HashMap<Config, (usize, u32, u32)>|
         -> (Vec<u32>, Vec<u32>) {
            let mut left_rev = Vec::new();
            let mut right_rev = Vec::new();
            let mut cur = cfg.clone();
            loop {
                match &parents[&cur] {
                    Some((prev, extended_left, sym)) => {
                        if *extended_left {
                            left_rev.push(*sym);
                        } else {
                            right_rev.push(*sym);
                        }
                        cur = prev.clone();
                    }
                    None => break,
                }
            }
            let (p, a, b) = seeds[&cur];
            let prefix = &reachable[&p];
            let mut u: Vec<u32> = prefix.clone();
            u.push(a);
            u.extend(left_rev.iter().rev());
            let mut w: Vec<u32> = prefix.clone();
            w.push(b);
            w.extend(right_rev.iter().rev());
            (u, w)
        };

        // accepting seed?
        for cfg in queue.iter() {
            if cfg.0 == cfg.1 && cfg.3.is_empty() {
                let (u, w) = rebuild(cfg, &parents, &seeds);
                return self.witness_verdict(u, w);
            }
        }

        while let Some(cfg) = queue.pop_front() {
            explored += 1;
            if explored > budget {
                return IlVerdict::Inconclusive;
            }
            let (s1, s2, left_ahead, ref diff) = cfg;
            // extend the deficit side; both sides when balanced
            let extend_left = diff.is_empty() || !left_ahead;
            let extend_right = diff.is_empty() || left_ahead;
            let mut successors: Vec<(Config, bool, u32)> = Vec::new();
            for a in 0..self.alphabet_size as u32 {
                if extend_left {
                    // diff is the right run's overhang (empty when
                    // balanced); the left run consumes it first
                    let o = self.output(s1, a);
                    let next = if let Some(rest) = diff.strip_prefix(o) {
                        Some((self.transition(s1, a), s2, false, rest.to_string()))
                    } else if let Some(rest) = o.strip_prefix(diff.as_str()) {
                        Some((self.transition(s1, a), s2, true, rest.to_string()))
                    } else {
                        None // outputs diverge forever
                    };
                    if let Some((n1, n2, ahead, d)) = next {
                        successors.push((normalize(n1, n2, ahead, d), true, a));
                    }
                }
                if extend_right {
                    // diff is the left run's overhang; symmetric rule
                    let o = self.output(s2, a);
                    let next = if let Some(rest) = diff.strip_prefix(o) {
                        Some((s1, self.transition(s2, a), true, rest.to_string()))
                    } else if let Some(rest) = o.strip_prefix(diff.as_str()) {
                        Some((s1, self.transition(s2, a), false, rest.to_string()))
                    } else {
                        None // outputs diverge forever
                    };
                    if let Some((n1, n2, ahead, d)) = next {
                        successors.push((normalize(n1, n2, ahead, d), false, a));
                    }
                }
            }
            for (next, extended_left, sym) in successors {
                if next.3.len() > lag_cap {
                    truncated = true;
                    continue;
                }
                if parents.contains_key(&next) {
                    continue;
                }
                parents.insert(next.clone(), Some((cfg.clone(), extended_left, sym)));
                if next.0 == next.1 && next.3.is_empty() {
                    let (u, w) = rebuild(&next, &parents, &seeds);
                    return self.witness_verdict(u, w);
                }
                queue.push_back(next);
            }
        }

        if truncated {
            IlVerdict::Inconclusive
        } else {
            IlVerdict::Verified
        }
    }

    /// Shortest nonempty input cycle through `p` whose every transition
    /// emits the empty string, if one exists.
    fn epsilon_cycle_through(&self, p: usize) -> Option<Vec<u32>> {
        // BFS from p over empty-output edges, back to p in >= 1 step
        let mut parent: HashMap<usize, (usize, u32)> = HashMap::new();
        let mut queue = VecDeque::from([p]);
        let mut seen = HashSet::from([p]);
        while let Some(q) = queue.pop_front() {
            for a in 0..self.alphabet_size as u32 {
                if !self.output(q, a).is_empty() {
                    continue;
                }
                let t = self.transition(q, a);
                if t == p {
                    // rebuild path p -> q, then the closing edge
                    let mut rev = vec![a];
                    let mut cur = q;
                    while cur != p {
                        let (prev, sym) = parent[&cur];
                        rev.push(sym);
                        cur = prev;
                    }
                    rev.reverse();
                    return Some(rev);
                }
                if seen.insert(t) {
                    parent.insert(t, (q, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    fn witness_verdict(&self, u: Vec<u32>, w: Vec<u32>) -> IlVerdict {
        let us = SymbolString::new(self.alphabet_size, u).expect("witness symbols in range");
        let ws = SymbolString::new(self.alphabet_size, w).expect("witness symbols in range");
        let output = self.run(&us).expect("witness replay");
        let end_state = self.end_state(self.start, &us).expect("witness replay");
        debug_assert_eq!(output, self.run(&ws).unwrap());
        debug_assert_eq!(end_state, self.end_state(self.start, &ws).unwrap());
        IlVerdict::Collision(CollisionWitness { u: us, w: ws, output, end_state })
    }

    /// Replays a collision witness; true when it really demonstrates a
    /// violation of information-losslessness.
    pub fn witness_is_valid(&self, wit: &CollisionWitness) -> bool {
        wit.u != wit.w
            && self.run(&wit.u).as_deref() == Ok(wit.output.as_str())
            && self.run(&wit.w).as_deref() == Ok(wit.output.as_str())
            && self.end_state(self.start, &wit.u) == Ok(wit.end_state)
            && self.end_state(self.start, &wit.w) == Ok(wit.end_state)
    }
}

/// Outcome of the information-losslessness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IlVerdict {
    Verified,
    Collision(CollisionWitness),
    Inconclusive,
}

/// Two distinct inputs with identical compressor output and end state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionWitness {
    pub u: SymbolString,
    pub w: SymbolString,
    pub output: String,
    pub end_state: usize,
}

/// Result of the generalized Kraft audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KraftReport {
    pub word_len: usize,
    pub words: u64,
    /// lhs evaluated in double precision from the exact dyadic sum
    pub lhs: f64,
    /// exact lhs as numerator / 2^shift
    pub lhs_numerator: String,
    pub lhs_shift: u64,
    pub rhs: f64,
    pub holds: bool,
}

fn big_ratio_to_f64(numerator: &BigUint, shift: u64) -> f64 {
    // numerator / 2^shift with the numerator rounded to 64 leading bits
    let bits = numerator.bits();
    if bits == 0 {
        return 0.0;
    }
    let drop = bits.saturating_sub(53);
    let top: BigUint = numerator >> drop;
    let top_u64: u64 = top.iter_u64_digits().next().unwrap_or(0);
    top_u64 as f64 * 2f64.powi(drop as i32 - shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: usize, digits: &str) -> SymbolString {
        SymbolString::from_digits(k, digits).unwrap()
    }

    /// The two-state fixture: toggles states on any input and emits "1"
    /// only when leaving state 1.
    fn toggle_fixture() -> Fsc {
        Fsc::from_transitions(
            2,
            2,
            0,
            &[
                (0, 0, 1, ""),
                (0, 1, 1, ""),
                (1, 0, 0, "1"),
                (1, 1, 0, "1"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn run_basics() {
        let id = Fsc::identity(2).unwrap();
        assert_eq!(id.run(&s(2, "011")).unwrap(), "011");
        assert_eq!(id.run(&SymbolString::empty(2)).unwrap(), "");
        let toggle = toggle_fixture();
        assert_eq!(toggle.run(&s(2, "000")).unwrap(), "1");
        assert_eq!(toggle.run(&s(2, "0")).unwrap(), "");
        assert_eq!(
            id.run(&SymbolString::new(4, vec![3]).unwrap()),
            Err(Error::SymbolOutOfRange { symbol: 3, alphabet: 2 })
        );
    }

    #[test]
    fn run_prefix_additivity() {
        let toggle = toggle_fixture();
        let id4 = Fsc::identity(4).unwrap();
        for m in [&toggle, &id4] {
            let k = m.alphabet_size();
            // exhaustive over inputs up to length 8 (k=2) / 4 (k=4)
            let max_len = if k == 2 { 8 } else { 4 };
            for len in 0..=max_len {
                for code in 0..(k as u64).pow(len as u32) {
                    let u = SymbolString::new(
                        k,
                        crate::blockstats::decode_block(code, k, len),
                    )
                    .unwrap();
                    for split in 0..=len {
                        let a = u.prefix(split);
                        let b = SymbolString::new(k, u.symbols()[split..].to_vec()).unwrap();
                        let q = m.end_state(m.start_state(), &a).unwrap();
                        assert_eq!(
                            m.run(&u).unwrap(),
                            format!("{}{}", m.run(&a).unwrap(), m.run_from(q, &b).unwrap())
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn min_output() {
        let id = Fsc::identity(2).unwrap();
        assert_eq!(id.min_output_len(&s(2, "0110")).unwrap(), 4);
        let toggle = toggle_fixture();
        // from state 0: emits at transitions 2, 4, ...; from 1: 1, 3, ...
        assert_eq!(toggle.min_output_len(&s(2, "000")).unwrap(), 1);
        assert!(toggle.min_output_len(&s(2, "000")).unwrap() <= toggle.run_len(&s(2, "000")).unwrap());
    }

    #[test]
    fn kraft_identity() {
        let id = Fsc::identity(2).unwrap();
        let rep = id.kraft_audit(3, 1 << 20).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-12);
        assert!((rep.rhs - (1.0 + 9f64.log2())).abs() < 1e-12);
        assert!(rep.holds);
        let rep = id.kraft_audit(1, 1 << 20).unwrap();
        assert!((rep.rhs - (1.0 + 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn kraft_catches_lossy_machine() {
        let eps = Fsc::epsilon(2).unwrap();
        let rep = eps.kraft_audit(3, 1 << 20).unwrap();
        assert!((rep.lhs - 8.0).abs() < 1e-12);
        assert!(!rep.holds);
    }

    #[test]
    fn kraft_budget() {
        let id = Fsc::identity(2).unwrap();
        assert_eq!(
            id.kraft_audit(10, 512),
            Err(Error::BudgetExceeded(1024, 512))
        );
    }

    #[test]
    fn il_identity_verified() {
        let mut id = Fsc::identity(2).unwrap();
        id.certificate = None;
        assert_eq!(id.collision_search(100_000), IlVerdict::Verified);
        let toggle = toggle_fixture();
        // toggle is lossy: "0" and "1" give identical output and state
        match toggle.collision_search(100_000) {
            IlVerdict::Collision(wit) => assert!(toggle.witness_is_valid(&wit)),
            v => panic!("expected collision, got {v:?}"),
        }
    }

    #[test]
    fn il_epsilon_machine_witness() {
        let eps = Fsc::epsilon(2).unwrap();
        match eps.collision_search(100_000) {
            IlVerdict::Collision(wit) => {
                assert_eq!(wit.u.to_digit_string(), "0");
                assert_eq!(wit.w.to_digit_string(), "00");
                assert_eq!(wit.output, "");
                assert!(eps.witness_is_valid(&wit));
            }
            v => panic!("expected collision, got {v:?}"),
        }
    }

    #[test]
    fn relabel_swap_roundtrip() {
        // pair machine over (Sigma x Sigma), k=2, distinguishing (0,1)
        // from (1,0)
        let m = Fsc::from_transitions(
            1,
            4,
            0,
            &[
                (0, 0, 0, "00"),
                (0, 1, 0, "01"),
                (0, 2, 0, "10"),
                (0, 3, 0, "11"),
            ],
        )
        .unwrap();
        let sw = m.relabel_swap().unwrap();
        assert_eq!(sw.relabel_swap().unwrap(), m);
        let p = SymbolString::new(4, vec![1]).unwrap(); // (0,1)
        let q = SymbolString::new(4, vec![2]).unwrap(); // (1,0)
        assert_eq!(m.run(&p).unwrap(), sw.run(&q).unwrap());
        assert_eq!(m.run(&q).unwrap(), sw.run(&p).unwrap());
        assert_eq!(
            Fsc::identity(3).unwrap().relabel_swap(),
            Err(Error::NotProductAlphabet(3))
        );
    }

    #[test]
    fn json_round_trip() {
        let toggle = toggle_fixture();
        let text = toggle.to_json_string();
        let back = Fsc::from_json_str(&text).unwrap();
        assert_eq!(back, toggle);
        assert_eq!(back.to_json_string(), text);

        let with_cert = Fsc::identity(2).unwrap();
        let text = with_cert.to_json_string();
        assert_eq!(Fsc::from_json_str(&text).unwrap(), with_cert);
    }

    #[test]
    fn malformed_machines_rejected() {
        assert!(matches!(
            Fsc::from_transitions(1, 2, 0, &[(0, 0, 0, "0")]),
            Err(Error::MachineFormat(_))
        ));
        assert!(matches!(
            Fsc::from_transitions(1, 2, 0, &[(0, 0, 0, "0"), (0, 0, 0, "1"), (0, 1, 0, "1")]),
            Err(Error::MachineFormat(_))
        ));
        assert!(matches!(
            Fsc::from_transitions(1, 2, 0, &[(0, 0, 0, "0x"), (0, 1, 0, "1")]),
            Err(Error::MachineFormat(_))
        ));
        assert!(matches!(
            Fsc::from_json_str("{"),
            Err(Error::MachineFormat(_))
        ));
    }
}
