//! Searches for estimators with smaller negativity: a grid over qubit POVM
//! geometries and a Metropolis walk over the generalized inverses of a
//! fixed `T`.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::povm::{self, generalized_inverse_from, negativity, pseudoinverse, GeneralizedInverse, QubitPovm, TMatrix, IC_RANK_TOL};
use crate::rng::rng_from_seed;

/// Angle step of the refinement stage.
pub const REFINE_STEP_DEG: f64 = 5.0;

#[derive(Clone, Debug)]
pub struct GridResult {
    pub povm: QubitPovm,
    pub nu: f64,
    /// Free angles of the minimizer in degrees; see [`grid_search_povm`].
    pub angles_deg: Vec<f64>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Scans qubit POVM geometries and returns the one whose pseudoinverse
/// estimator `T⁺ T T⁺` has the smallest range.
///
/// The first Bloch vector is fixed along `z` and the second lies in the
/// `xz` plane; the remaining vectors take every polar/azimuthal angle on the
/// grid. Six- and eight-outcome candidates are three or four antipodal
/// pairs of equal weight. Four-outcome candidates have free directions and
/// the unique weights that complete them to a POVM; those with a
/// non-positive weight are skipped, as are candidates that are not
/// informationally complete. A second pass refines around the minimum in
/// [`REFINE_STEP_DEG`] steps. An empty scan falls back to Pauli-6.
pub fn grid_search_povm(outcomes: usize, resolution_deg: f64) -> Result<GridResult> {
    if !(resolution_deg > 0.0 && resolution_deg <= 180.0) {
        return Err(Error::param(format!("resolution {resolution_deg}° outside (0, 180]")));
    }
    let free = match outcomes {
        4 | 8 => 5,
        6 => 3,
        _ => return Err(Error::param(format!("grid search supports 4, 6 or 8 outcomes, got {outcomes}"))),
    };
    let mut scan = Scan { outcomes, best: None, evaluated: 0, skipped: 0 };
    let axes: Vec<Vec<f64>> = (0..free).map(|k| angle_values(k, resolution_deg)).collect();
    scan.product(&axes);
    if resolution_deg > REFINE_STEP_DEG {
        if let Some((_, centre)) = scan.best.clone() {
            let steps = (resolution_deg / REFINE_STEP_DEG).floor() as i64;
            let local: Vec<Vec<f64>> = centre
                .iter()
                .map(|&c| (-steps..=steps).map(|i| c + i as f64 * REFINE_STEP_DEG).collect())
                .collect();
            scan.product(&local);
        }
    }
    let Scan { best, evaluated, skipped, .. } = scan;
    match best {
        Some((nu, angles)) => {
            let (weights, vectors) = geometry(outcomes, &angles).expect("minimizer has a valid geometry");
            let povm = QubitPovm::from_bloch(format!("grid{outcomes}"), &weights, &vectors)?;
            Ok(GridResult { povm, nu, angles_deg: angles, evaluated, skipped })
        }
        None => {
            let p = povm::pauli6();
            let nu = pseudoinverse_negativity(&povm::compute_t_matrix(&p));
            Ok(GridResult { povm: p, nu, angles_deg: Vec::new(), evaluated, skipped })
        }
    }
}

/// Even free parameters are polar angles in `[0, 180]`, odd ones azimuths in
/// `[0, 360)`. Parameter 0 is the polar angle of the in-plane vector.
fn angle_values(k: usize, step: f64) -> Vec<f64> {
    let (hi, closed) = if k.is_multiple_of(2) { (180.0, true) } else { (360.0, false) };
    let count = (hi / step).floor() as usize;
    let mut v: Vec<f64> = (0..=count).map(|i| i as f64 * step).filter(|&a| a < hi || closed && a <= hi).collect();
    v.dedup();
    v
}

struct Scan {
    outcomes: usize,
    best: Option<(f64, Vec<f64>)>,
    evaluated: usize,
    skipped: usize,
}

impl Scan {
    fn product(&mut self, axes: &[Vec<f64>]) {
        let mut idx = vec![0usize; axes.len()];
        let mut angles = vec![0.0; axes.len()];
        loop {
            for (k, &i) in idx.iter().enumerate() {
                angles[k] = axes[k][i];
            }
            self.visit(&angles);
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn visit(&mut self, angles: &[f64]) {
        let Some((weights, vectors)) = geometry(self.outcomes, angles) else {
            self.skipped += 1;
            return;
        };
        let Some(nu) = candidate_negativity(&weights, &vectors) else {
            self.skipped += 1;
            return;
        };
        self.evaluated += 1;
        if self.best.as_ref().is_none_or(|(b, _)| nu < *b - 1e-12) {
            self.best = Some((nu, angles.to_vec()));
        }
    }
}

fn unit(theta_deg: f64, phi_deg: f64) -> [f64; 3] {
    let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

/// Weights and Bloch vectors for a parameter point, or `None` when the
/// point does not define a POVM.
fn geometry(outcomes: usize, a: &[f64]) -> Option<(Vec<f64>, Vec<[f64; 3]>)> {
    let mut dirs = vec![[0.0, 0.0, 1.0], unit(a[0], 0.0), unit(a[1], a[2])];
    if a.len() == 5 {
        dirs.push(unit(a[3], a[4]));
    }
    if outcomes == 4 {
        let weights = completing_weights(&dirs)?;
        return Some((weights, dirs));
    }
    let vectors: Vec<[f64; 3]> = dirs.iter().flat_map(|d| [*d, [-d[0], -d[1], -d[2]]]).collect();
    Some((vec![2.0 / outcomes as f64; outcomes], vectors))
}

/// Solves `Σ w_a r_a = 0`, `Σ w_a = 2` for four directions; requires all
/// weights positive.
fn completing_weights(dirs: &[[f64; 3]]) -> Option<Vec<f64>> {
    let a = RMatrix::from_fn(4, 4, |i, j| if i < 3 { dirs[j][i] } else { 1.0 });
    let b = nalgebra::DVector::from_vec(vec![0.0, 0.0, 0.0, 2.0]);
    let w = a.lu().solve(&b)?;
    if w.iter().all(|&x| x > 1e-9 && x.is_finite()) {
        Some(w.iter().copied().collect())
    } else {
        None
    }
}

/// Range of `T⁺ T T⁺` for `M_a = w_a (I + r_a·σ)/2`, using
/// `Tr(M_a M_b) = w_a w_b (1 + r_a·r_b) / 2`. `None` if not IC.
fn candidate_negativity(weights: &[f64], vectors: &[[f64; 3]]) -> Option<f64> {
    let m = weights.len();
    let t = RMatrix::from_fn(m, m, |a, b| {
        let dot: f64 = (0..3).map(|i| vectors[a][i] * vectors[b][i]).sum();
        0.5 * weights[a] * weights[b] * (1.0 + dot)
    });
    let eig = t.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |x, &l| x.max(l.abs()));
    let mut pinv = RMatrix::zeros(m, m);
    let mut rank = 0;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > IC_RANK_TOL * lmax {
            rank += 1;
            let v = eig.eigenvectors.column(k);
            pinv += (v * v.transpose()) / l;
        }
    }
    (rank == 4).then(|| negativity(&(&pinv * &t * &pinv)))
}

fn pseudoinverse_negativity(t: &TMatrix) -> f64 {
    let p = pseudoinverse(t);
    negativity(&(p.matrix() * t.matrix() * p.matrix().transpose()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    /// States visited, including the starting point `T⁺`.
    pub steps: usize,
    pub temperature: f64,
    /// Standard deviation of the Gaussian move on `W`.
    pub proposal_scale: f64,
    pub seed: u64,
}

impl McmcConfig {
    pub const DEFAULT_PROPOSAL_SCALE: f64 = 0.05;

    pub fn new(steps: usize, temperature: f64, seed: u64) -> Self {
        McmcConfig { steps, temperature, proposal_scale: Self::DEFAULT_PROPOSAL_SCALE, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::param("MCMC needs at least one step"));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::param(format!("temperature {} must be finite and non-negative", self.temperature)));
        }
        if !(self.proposal_scale >= 0.0 && self.proposal_scale.is_finite()) {
            return Err(Error::param(format!("proposal scale {} must be finite and non-negative", self.proposal_scale)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct McmcResult {
    pub best: GeneralizedInverse,
    pub nu_best: f64,
    /// `ν` of the state after each step.
    pub trace: Vec<f64>,
    pub accepted: usize,
}

/// Metropolis walk over `τ = T⁺ + W − T⁺TWTT⁺` minimizing the range of
/// `τ T τᵗ`. Moves add Gaussian noise to `W` and are accepted with
/// probability `min(1, exp(−Δν / temperature))`; at zero temperature only
/// non-increasing moves are accepted.
pub fn mcmc_tau_search(t: &TMatrix, config: &McmcConfig) -> Result<McmcResult> {
    config.validate()?;
    let m = t.dim();
    let pinv = pseudoinverse(t);
    let objective = |tau: &RMatrix| negativity(&(tau * t.matrix() * tau.transpose()));
    let mut rng = rng_from_seed(config.seed);
    let mut w = RMatrix::zeros(m, m);
    let mut tau = pinv.matrix().clone();
    let mut nu = objective(&tau);
    let (mut best, mut nu_best) = (tau.clone(), nu);
    let mut trace = Vec::with_capacity(config.steps);
    trace.push(nu);
    let mut accepted = 0;
    for _ in 1..config.steps {
        let w_new = &w + RMatrix::from_fn(m, m, |_, _| config.proposal_scale * rng.sample::<f64, _>(StandardNormal));
        let tau_new = generalized_inverse_from(t, pinv.matrix(), &w_new);
        let nu_new = objective(&tau_new);
        let delta = nu_new - nu;
        let accept = if delta <= 0.0 {
            true
        } else if config.temperature > 0.0 {
            rng.gen::<f64>() < (-delta / config.temperature).exp()
        } else {
            false
        };
        if accept {
            w = w_new;
            tau = tau_new;
            nu = nu_new;
            accepted += 1;
            if nu < nu_best {
                nu_best = nu;
                best = tau.clone();
            }
        }
        trace.push(nu);
    }
    Ok(McmcResult { best: GeneralizedInverse::new(t, best)?, nu_best, trace, accepted })
}
