//! Sampling outcome records and estimating `Tr(ρσ)` from them.
//!
//! For outcome tuples `a ~ P_ρ` and `b ~ P_σ` the product
//! `Π_k τ̂[a_k, b_k]` is an unbiased estimate of the overlap. Two pairings of
//! the shots are offered: [`Pairing::Paired`] uses shot `i` of ρ with shot
//! `i` of σ, and [`Pairing::AllPairs`] averages over every `(i, j)`, which
//! amounts to contracting the two empirical histograms with `τ̂^{⊗n}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::distributions::Distribution;
use rand_distr::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::dense::{born_probabilities, DenseState};
use crate::error::{Error, Result};
use crate::linalg;
use crate::povm::{EstimatorTensor, OutcomeDistribution, ProductPovm};
use crate::rng::rng_from_seed;
use crate::tensornet::{sample_chain, Lpdo, Mps, TnState};

/// Outcome tuples measured on one state, stored flat with `n` entries per
/// shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    n: usize,
    m: usize,
    povm_id: String,
    seed: u64,
    source: String,
    outcomes: Vec<u8>,
}

const BINARY_MAGIC: &[u8; 4] = b"QOSR";
const TEXT_HEADER: &str = "# qoverlap sample record v1";

impl SampleRecord {
    pub fn new(n: usize, m: usize, povm_id: impl Into<String>, seed: u64, source: impl Into<String>, outcomes: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("records need at least one qubit"));
        }
        if m == 0 || m > 256 {
            return Err(Error::param(format!("outcome count {m} outside 1..=256")));
        }
        if !outcomes.len().is_multiple_of(n) {
            return Err(Error::DimensionMismatch { expected: n, got: outcomes.len() % n });
        }
        if let Some(&bad) = outcomes.iter().find(|&&a| a as usize >= m) {
            return Err(Error::param(format!("outcome index {bad} outside POVM range {m}")));
        }
        let povm_id = povm_id.into();
        let source = source.into();
        for field in [&povm_id, &source] {
            if field.is_empty() || field.chars().any(char::is_whitespace) {
                return Err(Error::param(format!("label {field:?} must be a non-empty word")));
            }
        }
        Ok(SampleRecord { n, m, povm_id, seed, source, outcomes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes_per_qubit(&self) -> usize {
        self.m
    }

    pub fn povm_id(&self) -> &str {
        &self.povm_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn shots(&self) -> usize {
        self.outcomes.len() / self.n
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    pub fn shot(&self, i: usize) -> &[u8] {
        &self.outcomes[i * self.n..(i + 1) * self.n]
    }

    /// The first `shots` shots.
    pub fn truncated(&self, shots: usize) -> SampleRecord {
        let mut r = self.clone();
        r.outcomes.truncate(shots.min(self.shots()) * self.n);
        r
    }

    /// Empirical frequencies over all `m^n` outcome tuples.
    pub fn histogram(&self) -> Result<OutcomeDistribution> {
        if self.outcomes.is_empty() {
            return Err(Error::EmptyRecord);
        }
        let counts = self.counts_dense()?;
        let total = self.shots() as f64;
        OutcomeDistribution::new(self.n, self.m, counts.into_iter().map(|c| c / total).collect())
    }

    fn counts_dense(&self) -> Result<Vec<f64>> {
        let size = self
            .m
            .checked_pow(self.n as u32)
            .filter(|&s| s <= crate::dense::MAX_OUTCOMES)
            .ok_or(Error::TooManyQubits { n: self.n, max: crate::dense::max_tabulated_qubits(self.m) })?;
        let mut counts = vec![0.0; size];
        for shot in self.outcomes.chunks_exact(self.n) {
            counts[tuple_index(shot, self.m)] += 1.0;
        }
        Ok(counts)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.outcomes.len() * 2 + 128);
        let _ = writeln!(s, "{TEXT_HEADER}");
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "m {}", self.m);
        let _ = writeln!(s, "povm {}", self.povm_id);
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "source {}", self.source);
        let _ = writeln!(s, "shots {}", self.shots());
        for shot in self.outcomes.chunks_exact(self.n) {
            let line: Vec<String> = shot.iter().map(|a| a.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_text(text.as_bytes())
    }

    fn read_text(reader: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, line)) => Ok((i + 1, line?)),
                None => Err(Error::Parse { line: 0, column: 0, message: format!("missing {what}") }),
            }
        };
        let (_, first) = next("header")?;
        if first.trim() != TEXT_HEADER {
            return Err(Error::Parse { line: 1, column: 1, message: "not a sample record".into() });
        }
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (line, text) = next(key)?;
            match text.trim().split_once(' ') {
                Some((k, v)) if k == key => Ok((line, v.trim().to_string())),
                _ => Err(Error::Parse { line, column: 1, message: format!("expected `{key} <value>`") }),
            }
        };
        let parse_num = |(line, v): (usize, String)| -> Result<u64> {
            v.parse::<u64>().map_err(|e| Error::Parse { line, column: 1, message: e.to_string() })
        };
        let n = parse_num(header("n")?)? as usize;
        let m = parse_num(header("m")?)? as usize;
        let povm = header("povm")?.1;
        let seed = parse_num(header("seed")?)?;
        let source = header("source")?.1;
        let shots = parse_num(header("shots")?)? as usize;
        let mut outcomes = Vec::with_capacity(shots * n);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let before = outcomes.len();
            for (col, tok) in line.split_whitespace().enumerate() {
                let a = tok.parse::<u8>().map_err(|e| Error::Parse { line: i + 1, column: col + 1, message: e.to_string() })?;
                outcomes.push(a);
            }
            if outcomes.len() - before != n {
                return Err(Error::Parse { line: i + 1, column: 1, message: format!("expected {n} outcomes per shot") });
            }
        }
        if outcomes.len() != shots * n {
            return Err(Error::Parse { line: 0, column: 0, message: format!("header declares {shots} shots, found {}", outcomes.len() / n.max(1)) });
        }
        SampleRecord::new(n, m, povm, seed, source, outcomes)
    }

    /// Little-endian binary layout: magic, `n: u32`, `m: u16`, `seed: u64`,
    /// `shots: u64`, two length-prefixed labels, then the outcome bytes.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.outcomes.len() + 64);
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.m as u16).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.shots() as u64).to_le_bytes());
        for label in [&self.povm_id, &self.source] {
            out.extend_from_slice(&(label.len() as u16).to_le_bytes());
            out.extend_from_slice(label.as_bytes());
        }
        out.extend_from_slice(&self.outcomes);
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let bad = |message: &str| Error::Parse { line: 0, column: 0, message: message.into() };
        let mut pos = 0usize;
        let mut take = |len: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + len).ok_or_else(|| bad("truncated binary record"))?;
            pos += len;
            Ok(s)
        };
        if take(4)? != BINARY_MAGIC {
            return Err(bad("not a binary sample record"));
        }
        let n = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        let m = u16::from_le_bytes(take(2)?.try_into().expect("2 bytes")) as usize;
        let seed = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let shots = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
        let mut labels = Vec::with_capacity(2);
        for _ in 0..2 {
            let len = u16::from_le_bytes(take(2)?.try_into().expect("2 bytes")) as usize;
            let s = std::str::from_utf8(take(len)?).map_err(|_| bad("label is not UTF-8"))?;
            labels.push(s.to_string());
        }
        let total = shots.checked_mul(n).ok_or_else(|| bad("shot count overflows"))?;
        let outcomes = take(total)?.to_vec();
        if pos != bytes.len() {
            return Err(bad("trailing bytes after outcomes"));
        }
        let source = labels.pop().expect("two labels");
        let povm = labels.pop().expect("two labels");
        SampleRecord::new(n, m, povm, seed, source, outcomes)
    }

    /// Writes the binary format for a `.bin` extension, text otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path)?;
        if is_binary_path(path) {
            f.write_all(&self.to_binary())?;
        } else {
            f.write_all(self.to_text().as_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if is_binary_path(path) {
            Self::from_binary(&std::fs::read(path)?)
        } else {
            Self::read_text(std::fs::File::open(path)?)
        }
    }
}

fn is_binary_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

/// Index `Σ_k a_k m^{n-1-k}` of an outcome tuple.
pub fn tuple_index(tuple: &[u8], m: usize) -> usize {
    tuple.iter().fold(0usize, |acc, &a| acc * m + a as usize)
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(mut index: usize, n: usize, m: usize, out: &mut [u8]) {
    for k in (0..n).rev() {
        out[k] = (index % m) as u8;
        index /= m;
    }
}

/// Any state the samplers accept.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Dense(&'a DenseState),
    Mps(&'a Mps),
    Lpdo(&'a Lpdo),
}

impl<'a> From<&'a DenseState> for StateRef<'a> {
    fn from(s: &'a DenseState) -> Self {
        StateRef::Dense(s)
    }
}

impl<'a> From<&'a Mps> for StateRef<'a> {
    fn from(s: &'a Mps) -> Self {
        StateRef::Mps(s)
    }
}

impl<'a> From<&'a Lpdo> for StateRef<'a> {
    fn from(s: &'a Lpdo) -> Self {
        StateRef::Lpdo(s)
    }
}

impl<'a> From<&'a TnState> for StateRef<'a> {
    fn from(s: &'a TnState) -> Self {
        match s {
            TnState::Mps(m) => StateRef::Mps(m),
            TnState::Lpdo(l) => StateRef::Lpdo(l),
        }
    }
}

impl StateRef<'_> {
    pub fn n(&self) -> usize {
        match self {
            StateRef::Dense(s) => s.n(),
            StateRef::Mps(s) => s.n(),
            StateRef::Lpdo(s) => s.n(),
        }
    }
}

/// Draws `shots` i.i.d. outcome tuples with probabilities `Tr(ρ M_a)`.
/// Dense states sample from the tabulated distribution; tensor-network
/// states sample qubit by qubit from conditional marginals.
pub fn sample_outcomes<'a>(state: impl Into<StateRef<'a>>, povm: &ProductPovm, shots: usize, seed: u64, source: &str) -> Result<SampleRecord> {
    let state = state.into();
    if shots == 0 {
        return Err(Error::param("shot count must be at least 1"));
    }
    if state.n() != povm.n() {
        return Err(Error::DimensionMismatch { expected: povm.n(), got: state.n() });
    }
    let outcomes = match state {
        StateRef::Dense(s) => {
            let trace = s.trace();
            if (trace - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidState(format!("trace {trace} is not 1")));
            }
            sample_distribution(&born_probabilities(s, povm)?, shots, seed)?
        }
        StateRef::Mps(s) => sample_chain(s.chain(), povm, shots, seed)?,
        StateRef::Lpdo(s) => sample_chain(s.chain(), povm, shots, seed)?,
    };
    SampleRecord::new(povm.n(), povm.outcomes_per_qubit(), povm.id(), seed, source, outcomes)
}

/// Draws flat outcome tuples from a tabulated distribution.
pub fn sample_distribution(dist: &OutcomeDistribution, shots: usize, seed: u64) -> Result<Vec<u8>> {
    let weights: Vec<f64> = dist.probs().iter().map(|&p| p.max(0.0)).collect();
    let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::InvalidState(format!("unusable outcome distribution: {e}")))?;
    let (n, m) = (dist.n(), dist.outcomes_per_qubit());
    let mut rng = rng_from_seed(seed);
    let mut out = vec![0u8; shots * n];
    for shot in out.chunks_exact_mut(n) {
        index_tuple(alias.sample(&mut rng), n, m, shot);
    }
    Ok(out)
}

/// How ρ-shots are combined with σ-shots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Shot `i` of ρ with shot `i` of σ.
    #[default]
    Paired,
    /// Every ρ-shot with every σ-shot.
    AllPairs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    /// Shots per state that entered the estimate.
    pub shots: usize,
}

/// Histograms are tabulated up to this many outcome tuples; beyond it the
/// all-pairs sum runs over distinct tuples.
const HISTOGRAM_LIMIT: usize = 1 << 22;

/// Paired estimate of `Tr(ρσ)`.
pub fn estimate_overlap(rec_rho: &SampleRecord, rec_sigma: &SampleRecord, tau_hat: &EstimatorTensor) -> Result<EstimateResult> {
    estimate_overlap_with(rec_rho, rec_sigma, tau_hat, Pairing::Paired)
}

pub fn estimate_overlap_with(rec_rho: &SampleRecord, rec_sigma: &SampleRecord, tau_hat: &EstimatorTensor, pairing: Pairing) -> Result<EstimateResult> {
    if rec_rho.n != rec_sigma.n || rec_rho.m != rec_sigma.m || rec_rho.povm_id != rec_sigma.povm_id {
        return Err(Error::RecordMismatch);
    }
    if rec_rho.outcomes.is_empty() || rec_sigma.outcomes.is_empty() {
        return Err(Error::EmptyRecord);
    }
    if tau_hat.dim() != rec_rho.m {
        return Err(Error::DimensionMismatch { expected: rec_rho.m, got: tau_hat.dim() });
    }
    match pairing {
        Pairing::Paired => Ok(paired(rec_rho, rec_sigma, &tau_hat.row_major())),
        Pairing::AllPairs => all_pairs(rec_rho, rec_sigma, tau_hat),
    }
}

fn product(a: &[u8], b: &[u8], tau: &[f64], m: usize) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| tau[x as usize * m + y as usize]).product()
}

fn paired(r: &SampleRecord, s: &SampleRecord, tau: &[f64]) -> EstimateResult {
    let shots = r.shots().min(s.shots());
    let values = (0..shots).map(|i| product(r.shot(i), s.shot(i), tau, r.m));
    let (mean, var) = mean_var(values);
    EstimateResult { mean, stderr: (var / shots as f64).sqrt(), shots }
}

/// Mean and unbiased variance (zero for a single value), by Welford.
pub fn mean_var(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for x in values {
        count += 1;
        let d = x - mean;
        mean += d / count as f64;
        m2 += d * (x - mean);
    }
    let var = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
    (mean, var)
}

/// Contraction `(1/N_ρ N_σ) h_ρᵀ τ̂^{⊗n} h_σ` of the two count histograms.
/// The standard error uses the first-order variance of the two-sample
/// V-statistic, `Var(h₁)/N_ρ + Var(h₂)/N_σ`, with `h₁(a) = E_b f(a, b)` and
/// `h₂(b) = E_a f(a, b)` replaced by their empirical versions.
fn all_pairs(r: &SampleRecord, s: &SampleRecord, tau_hat: &EstimatorTensor) -> Result<EstimateResult> {
    let fits = r.m.checked_pow(r.n as u32).is_some_and(|size| size <= HISTOGRAM_LIMIT);
    all_pairs_impl(r, s, tau_hat, fits)
}

fn all_pairs_impl(r: &SampleRecord, s: &SampleRecord, tau_hat: &EstimatorTensor, fits: bool) -> Result<EstimateResult> {
    let (n, m) = (r.n, r.m);
    let (nr, ns) = (r.shots(), s.shots());
    // h1 evaluated at each distinct ρ-tuple and h2 at each distinct σ-tuple,
    // paired with multiplicities
    let (h1, h2): (Vec<(f64, f64)>, Vec<(f64, f64)>) = if fits {
        let cr = r.counts_dense()?;
        let cs = s.counts_dense()?;
        let tau = tau_hat.row_major();
        let tau_t = linalg::row_major(&tau_hat.entries().transpose());
        let g1 = linalg::apply_tensor_power(&cs, n, m, &tau, m);
        let g2 = linalg::apply_tensor_power(&cr, n, m, &tau_t, m);
        let pick = |counts: &[f64], g: &[f64], norm: f64| -> Vec<(f64, f64)> {
            counts.iter().zip(g).filter(|(c, _)| **c > 0.0).map(|(&c, &v)| (c, v / norm)).collect()
        };
        (pick(&cr, &g1, ns as f64), pick(&cs, &g2, nr as f64))
    } else {
        let dr = distinct(r);
        let ds = distinct(s);
        let tau = tau_hat.row_major();
        let mut g1 = vec![0.0; dr.len()];
        let mut g2 = vec![0.0; ds.len()];
        for (i, (a, ca)) in dr.iter().enumerate() {
            for (j, (b, cb)) in ds.iter().enumerate() {
                let f = product(a, b, &tau, m);
                g1[i] += cb * f;
                g2[j] += ca * f;
            }
        }
        (
            dr.iter().zip(&g1).map(|((_, c), &g)| (*c, g / ns as f64)).collect(),
            ds.iter().zip(&g2).map(|((_, c), &g)| (*c, g / nr as f64)).collect(),
        )
    };
    let weighted = |h: &[(f64, f64)], total: usize| -> (f64, f64) {
        let mean = h.iter().map(|(c, v)| c * v).sum::<f64>() / total as f64;
        let ss = h.iter().map(|(c, v)| c * (v - mean).powi(2)).sum::<f64>();
        let var = if total > 1 { ss / (total - 1) as f64 } else { 0.0 };
        (mean, var)
    };
    let (mean, var1) = weighted(&h1, nr);
    let (_, var2) = weighted(&h2, ns);
    let stderr = (var1 / nr as f64 + var2 / ns as f64).sqrt();
    Ok(EstimateResult { mean, stderr, shots: nr.min(ns) })
}

fn distinct(r: &SampleRecord) -> Vec<(&[u8], f64)> {
    let mut map: HashMap<&[u8], f64> = HashMap::new();
    for shot in r.outcomes.chunks_exact(r.n) {
        *map.entry(shot).or_insert(0.0) += 1.0;
    }
    let mut v: Vec<_> = map.into_iter().collect();
    v.sort_by(|x, y| x.0.cmp(y.0));
    v
}

/// Largest `n` accepted by [`exact_expectation`].
pub const EXACT_MAX_QUBITS: usize = 4;

/// `Σ_{a,b} P_ρ(a) τ̂^{⊗n}_{ab} P_σ(b)` from exact Born distributions.
pub fn exact_expectation(rho: &DenseState, sigma: &DenseState, tau_hat: &EstimatorTensor, povm: &ProductPovm) -> Result<f64> {
    let n = povm.n();
    if n > EXACT_MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: EXACT_MAX_QUBITS });
    }
    if tau_hat.dim() != povm.outcomes_per_qubit() {
        return Err(Error::DimensionMismatch { expected: povm.outcomes_per_qubit(), got: tau_hat.dim() });
    }
    let pr = born_probabilities(rho, povm)?;
    let ps = born_probabilities(sigma, povm)?;
    Ok(contract_distributions(pr.probs(), ps.probs(), n, povm.outcomes_per_qubit(), &tau_hat.row_major()))
}

/// `xᵀ K^{⊗n} y` for vectors over `m^n` outcome tuples.
pub fn contract_distributions(x: &[f64], y: &[f64], n: usize, m: usize, kernel: &[f64]) -> f64 {
    let ky = linalg::apply_tensor_power(y, n, m, kernel, m);
    x.iter().zip(&ky).map(|(a, b)| a * b).sum()
}

/// Shot budget from Hoeffding's inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Single-qubit negativity.
    pub nu: f64,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Smallest `N` with `N > ν^n ln(2/δ) / (2ε²)`.
    pub shots: u64,
    /// `max − min` entry of `τ̂^{⊗n}`, when the tensor is known.
    pub range_n: Option<f64>,
    /// Smallest `N` with `N > R_n² ln(2/δ) / (2ε²)`.
    pub shots_full_range: Option<u64>,
}

fn smallest_above(x: f64) -> Result<u64> {
    if !x.is_finite() || x >= 9.0e18 {
        return Err(Error::param(format!("shot bound {x} is too large")));
    }
    Ok((x.floor() as u64 + 1).max(1))
}

pub fn hoeffding_plan(nu: f64, n: usize, epsilon: f64, delta: f64) -> Result<SamplePlan> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::param(format!("negativity {nu} must be positive")));
    }
    if n == 0 {
        return Err(Error::param("qubit count must be at least 1"));
    }
    for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::param(format!("{name} = {v} outside (0, 1)")));
        }
    }
    let shots = smallest_above(nu.powi(n as i32) * (2.0 / delta).ln() / (2.0 * epsilon * epsilon))?;
    Ok(SamplePlan { nu, n, epsilon, delta, shots, range_n: None, shots_full_range: None })
}

/// [`hoeffding_plan`] with `ν` taken from the tensor, plus the bound from
/// the true `n`-qubit entry range.
pub fn hoeffding_plan_for(tau_hat: &EstimatorTensor, n: usize, epsilon: f64, delta: f64) -> Result<SamplePlan> {
    let mut plan = hoeffding_plan(tau_hat.negativity(), n, epsilon, delta)?;
    let range = tensor_power_range(tau_hat, n);
    plan.range_n = Some(range);
    plan.shots_full_range = Some(smallest_above(range * range * (2.0 / delta).ln() / (2.0 * epsilon * epsilon))?);
    Ok(plan)
}

/// `max − min` over entries of `τ̂^{⊗n}`, tracking extreme products.
pub fn tensor_power_range(tau_hat: &EstimatorTensor, n: usize) -> f64 {
    let entries = tau_hat.row_major();
    let (mut hi, mut lo) = (1.0f64, 1.0f64);
    for _ in 0..n {
        let (mut h, mut l) = (f64::NEG_INFINITY, f64::INFINITY);
        for &e in &entries {
            for v in [e * hi, e * lo] {
                h = h.max(v);
                l = l.min(v);
            }
        }
        hi = h;
        lo = l;
    }
    hi - lo
}
