use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output::{ExperimentOutput, ResultRow, ScalingFit, ScalingPoint, Summary};
use super::{stream, StatePair, QUASIPROB};
use crate::error::Result;
use crate::estimator::{estimate_overlap_with, sample_outcomes, Pairing};
use crate::povm::{pauli6_estimator, ProductPovm};
use crate::rng::split_path;
use crate::{SampleRecord, StateFamily};

/// Least-squares slope and intercept of `y` against `x`; `None` unless at
/// least two distinct `x` values are present.
pub fn fit_exponent(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let k = x.len().min(y.len());
    if k < 2 {
        return None;
    }
    let (mx, my) = (x[..k].iter().sum::<f64>() / k as f64, y[..k].iter().sum::<f64>() / k as f64);
    let sxx: f64 = x[..k].iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x[..k].iter().zip(&y[..k]).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Outcome records that grow in doubling chunks, each chunk drawn from its
/// own seed so that any prefix is reproducible.
struct GrowingRecords<'a> {
    pair: &'a StatePair,
    povm: ProductPovm,
    rho: Vec<u8>,
    sigma: Vec<u8>,
    chunks: u64,
}

impl<'a> GrowingRecords<'a> {
    fn new(pair: &'a StatePair) -> Self {
        GrowingRecords { pair, povm: ProductPovm::pauli6(pair.n), rho: Vec::new(), sigma: Vec::new(), chunks: 0 }
    }

    fn ensure(&mut self, shots: usize) -> Result<()> {
        let n = self.pair.n;
        let (r, s) = self.pair.refs(self.povm.outcomes_per_qubit());
        while self.rho.len() < shots * n {
            let have = self.rho.len() / n;
            let more = (shots - have).max(have);
            let seeds = [split_path(self.pair.seed, &[20, self.chunks]), split_path(self.pair.seed, &[21, self.chunks])];
            self.rho.extend_from_slice(sample_outcomes(r, &self.povm, more, seeds[0], "rho")?.outcomes());
            self.sigma.extend_from_slice(sample_outcomes(s, &self.povm, more, seeds[1], "sigma")?.outcomes());
            self.chunks += 1;
        }
        Ok(())
    }

    fn estimate(&mut self, shots: usize, pairing: Pairing) -> Result<f64> {
        self.ensure(shots)?;
        let n = self.pair.n;
        let m = self.povm.outcomes_per_qubit();
        let rec = |v: &[u8], src| SampleRecord::new(n, m, self.povm.id(), self.pair.seed, src, v[..shots * n].to_vec());
        Ok(estimate_overlap_with(&rec(&self.rho, "rho")?, &rec(&self.sigma, "sigma")?, &pauli6_estimator(), pairing)?.mean)
    }
}

struct BatchOutcome {
    shots: usize,
    censored: bool,
    /// `(pair seed, truth, estimate)` at the crossing.
    pairs: Vec<(u64, f64, f64)>,
}

fn run_batch(cfg: &ExperimentConfig, family: StateFamily, n: usize, batch: usize) -> Result<BatchOutcome> {
    let s = &cfg.scaling;
    let fam = family as u64;
    let pairs = (0..s.pairs_per_batch)
        .map(|i| StatePair::draw(family, n, split_path(cfg.seed, &[stream::SCALING, fam, n as u64, batch as u64, i as u64])))
        .collect::<Result<Vec<_>>>()?;
    let truths = pairs.iter().map(|p| Ok(p.truth()?.expect("scaling sizes are dense"))).collect::<Result<Vec<f64>>>()?;
    let mut records: Vec<GrowingRecords> = pairs.iter().map(GrowingRecords::new).collect();
    let mut evaluate = |shots: usize| -> Result<(f64, Vec<f64>)> {
        let est = records.iter_mut().map(|r| r.estimate(shots, s.pairing)).collect::<Result<Vec<f64>>>()?;
        let err = est.iter().zip(&truths).map(|(e, t)| (e - t).abs()).sum::<f64>() / est.len() as f64;
        Ok((err, est))
    };
    let mut shots = s.start_shots;
    let (mut crossing, censored) = loop {
        let (err, est) = evaluate(shots)?;
        if err < s.threshold {
            break ((shots, est), false);
        }
        if shots >= s.max_shots {
            break ((shots, est), true);
        }
        shots = (shots * 2).min(s.max_shots);
    };
    // one bisection step between the last failure and the crossing
    if !censored && crossing.0 > s.start_shots {
        let mid = crossing.0 - crossing.0 / 4;
        let (err, est) = evaluate(mid)?;
        if err < s.threshold {
            crossing = (mid, est);
        }
    }
    let (shots, est) = crossing;
    Ok(BatchOutcome { shots, censored, pairs: pairs.iter().zip(truths).zip(est).map(|((p, t), e)| (p.seed, t, e)).collect() })
}

/// Shots needed for the batch-average error of random pairs to fall below
/// the threshold, by state size and family, with a log-linear fit.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let s = &cfg.scaling;
    let id = cfg.experiment_id();
    let work: Vec<(StateFamily, usize, usize)> =
        s.families.iter().flat_map(|&f| (s.n_min..=s.n_max).flat_map(move |n| (0..s.batches).map(move |b| (f, n, b)))).collect();
    let outcomes = work.par_iter().map(|&(f, n, b)| super::timed(cfg.record_wall_time, || run_batch(cfg, f, n, b))).collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &family in &s.families {
        let method = format!("{QUASIPROB}-{}", family.name());
        let mut points = Vec::new();
        for n in s.n_min..=s.n_max {
            let mut total = 0.0;
            let mut censored_batches = 0;
            for (&(f, wn, b), (out, wall)) in work.iter().zip(&outcomes) {
                if f != family || wn != n {
                    continue;
                }
                total += out.shots as f64;
                censored_batches += out.censored as usize;
                for (i, &(seed, truth, est)) in out.pairs.iter().enumerate() {
                    let mut row = ResultRow::new(&id, n, method.clone(), (b * s.pairs_per_batch + i) as u64, Some(truth), est, out.shots as u64, seed);
                    row.wall_ms = *wall;
                    rows.push(row);
                }
            }
            points.push(ScalingPoint { n, mean_shots: total / s.batches as f64, censored_batches });
        }
        let x: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
        let y: Vec<f64> = points.iter().map(|p| p.mean_shots.log2()).collect();
        let fit = fit_exponent(&x, &y);
        fits.push(ScalingFit { family, method, points, exponent: fit.map(|f| f.0), intercept: fit.map(|f| f.1) });
    }
    Ok(ExperimentOutput { rows, summary: Summary::Scaling { threshold: s.threshold, fits } })
}
