//! The shared engine behind [`Mps`](super::Mps) and [`Lpdo`](super::Lpdo):
//! a chain of site tensors `A[l, p, κ, r]` (left bond, physical, Kraus,
//! right bond) representing the purification `X` of `ρ = X X†`, kept in
//! mixed canonical form around a movable orthogonality center.

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::C64;

use super::tensor::Tensor;
use super::{TruncationCaps, TruncationKind, TruncationLog};

/// Singular values below this fraction of the largest are exact zeros.
pub(crate) const RANK_RTOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub(crate) struct Chain {
    /// Site tensors with dims `[dl, 2, k, dr]`.
    pub sites: Vec<Tensor>,
    pub center: usize,
}

/// Result of an SVD-based truncation.
pub struct Truncated {
    pub left: CMatrix,
    pub singular_values: Vec<f64>,
    pub right: CMatrix,
    /// `(Σ_discarded s_i² / Σ_all s_i²)^{1/2}`.
    pub discarded_weight: f64,
    pub kept: usize,
    /// Number of numerically non-zero singular values.
    pub total: usize,
}

/// SVD of `m` keeping at most `max_dim` singular values (and dropping
/// numerically zero ones). The kept singular values are renormalized to
/// unit 2-norm.
pub fn truncate_svd(m: &CMatrix, max_dim: usize) -> Result<Truncated> {
    if max_dim < 1 {
        return Err(Error::param("truncation dimension must be at least 1"));
    }
    let (u, s, vt) = linalg::svd_sorted(m);
    let total_w: f64 = s.iter().map(|x| x * x).sum();
    if total_w == 0.0 {
        return Err(Error::InvalidState("cannot truncate a zero tensor".into()));
    }
    let smax = s[0];
    let nonzero = s.iter().take_while(|&&x| x > RANK_RTOL * smax).count().max(1);
    let keep = nonzero.min(max_dim);
    let kept_w: f64 = s[..keep].iter().map(|x| x * x).sum();
    let disc_w = (total_w - kept_w).max(0.0);
    let scale = kept_w.sqrt();
    let sv: Vec<f64> = s[..keep].iter().map(|x| x / scale).collect();
    Ok(Truncated {
        left: u.columns(0, keep).into_owned(),
        singular_values: sv,
        right: vt.rows(0, keep).into_owned(),
        discarded_weight: (disc_w / total_w).sqrt().min(1.0),
        kept: keep,
        total: nonzero,
    })
}

fn diag_times(s: &[f64], m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for (i, &x) in s.iter().enumerate() {
        for j in 0..out.ncols() {
            out[(i, j)] *= x;
        }
    }
    out
}

fn times_diag(m: &CMatrix, s: &[f64]) -> CMatrix {
    let mut out = m.clone();
    for (j, &x) in s.iter().enumerate() {
        for i in 0..out.nrows() {
            out[(i, j)] *= x;
        }
    }
    out
}

impl Chain {
    /// Builds a chain from `[dl, 2, k, dr]` tensors and brings it to
    /// canonical form with the center on site 0, normalized.
    pub fn new(sites: Vec<Tensor>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::param("a chain needs at least one site"));
        }
        for (i, s) in sites.iter().enumerate() {
            if s.dims.len() != 4 || s.dims[1] != 2 {
                return Err(Error::param(format!("site {i} must have dims [dl, 2, k, dr]")));
            }
            if i > 0 && sites[i - 1].dims[3] != s.dims[0] {
                return Err(Error::DimensionMismatch { expected: sites[i - 1].dims[3], got: s.dims[0] });
            }
        }
        if sites[0].dims[0] != 1 || sites[sites.len() - 1].dims[3] != 1 {
            return Err(Error::param("boundary bonds must have dimension 1"));
        }
        let last = sites.len() - 1;
        // an LQ sweep from the right end makes sites 1.. right-canonical
        let mut chain = Chain { sites, center: last };
        chain.move_center_to(0);
        chain.normalize()?;
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn kraus_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dims[2]).collect()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1].iter().map(|s| s.dims[3]).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sites[self.center].norm_sqr()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::InvalidState("state has zero norm".into()));
        }
        self.sites[self.center].scale(1.0 / n2.sqrt());
        Ok(())
    }

    /// QR on the center, moving it one site right.
    fn shift_right(&mut self) {
        let c = self.center;
        let a = &self.sites[c];
        let [dl, p, k] = [a.dims[0], a.dims[1], a.dims[2]];
        let qr = a.to_matrix(3).qr();
        let q = qr.q();
        let r = qr.r();
        let chi = q.ncols();
        self.sites[c] = Tensor::from_matrix(&q, &[dl, p, k, chi]);
        let b = &self.sites[c + 1];
        let bm = b.to_matrix(1);
        let nb = r * bm;
        let bd = [chi, b.dims[1], b.dims[2], b.dims[3]];
        self.sites[c + 1] = Tensor::from_matrix(&nb, &bd);
        self.center = c + 1;
    }

    /// LQ on the center, moving it one site left.
    fn shift_left(&mut self) {
        let c = self.center;
        let a = &self.sites[c];
        let [p, k, dr] = [a.dims[1], a.dims[2], a.dims[3]];
        // A = L Q with Q having orthonormal rows: A† = Q† L†
        let qr = a.to_matrix(1).adjoint().qr();
        let q = qr.q().adjoint();
        let l = qr.r().adjoint();
        let chi = q.nrows();
        self.sites[c] = Tensor::from_matrix(&q, &[chi, p, k, dr]);
        let b = &self.sites[c - 1];
        let bm = b.to_matrix(3);
        let nb = bm * l;
        let bd = [b.dims[0], b.dims[1], b.dims[2], chi];
        self.sites[c - 1] = Tensor::from_matrix(&nb, &bd);
        self.center = c - 1;
    }

    pub fn move_center_to(&mut self, target: usize) {
        while self.center < target {
            self.shift_right();
        }
        while self.center > target {
            self.shift_left();
        }
    }

    pub fn apply_single(&mut self, site: usize, u: &CMatrix) {
        let a = &mut self.sites[site];
        let [dl, _, k, dr] = [a.dims[0], a.dims[1], a.dims[2], a.dims[3]];
        let inner = k * dr;
        for l in 0..dl {
            let base = l * 2 * inner;
            for j in 0..inner {
                let x0 = a.data[base + j];
                let x1 = a.data[base + inner + j];
                a.data[base + j] = u[(0, 0)] * x0 + u[(0, 1)] * x1;
                a.data[base + inner + j] = u[(1, 0)] * x0 + u[(1, 1)] * x1;
            }
        }
    }

    /// Applies a two-site operator `u` (4×4, index `2 p_left + p_right`) on
    /// sites `(s, s+1)`, then the optional channels on each of the two
    /// qubits, then Kraus and bond truncations. Leaves the center on `s+1`.
    pub fn apply_two_site(
        &mut self,
        s: usize,
        u: &CMatrix,
        channels: [Option<&KrausSet>; 2],
        caps: TruncationCaps,
        log: &mut TruncationLog,
    ) -> Result<()> {
        if s + 1 >= self.len() {
            return Err(Error::NonAdjacent(s, s + 1));
        }
        self.move_center_to(s);
        let a = &self.sites[s];
        let b = &self.sites[s + 1];
        let (dl, k1, k2, dr) = (a.dims[0], a.dims[2], b.dims[2], b.dims[3]);
        // theta[l, p1, k1, p2, k2, r]
        let theta_m = a.to_matrix(3) * b.to_matrix(1);
        let mut theta = Tensor::from_matrix(&theta_m, &[dl, 2, k1, 2, k2, dr]);

        // gate on (p1, p2)
        let g = theta.permute(&[1, 3, 0, 2, 4, 5]).to_matrix(2);
        let g = u * g;
        theta = Tensor::from_matrix(&g, &[2, 2, dl, k1, k2, dr]).permute(&[2, 0, 3, 1, 4, 5]);

        // channels: Kraus index κ ↦ (κ, m)
        for (which, ch) in channels.iter().enumerate() {
            let Some(ch) = ch else { continue };
            theta = apply_channel_to_theta(&theta, which, ch);
        }

        // Kraus truncations (the two-site block holds the center)
        for which in 0..2 {
            let kax = if which == 0 { 2 } else { 4 };
            let rest: Vec<usize> = (0..6).filter(|&x| x != kax).collect();
            let mut perm = rest.clone();
            perm.push(kax);
            let mat = theta.permute(&perm).to_matrix(5);
            let tr = truncate_svd(&mat, caps.max_kraus)?;
            if tr.kept < tr.total {
                log.push(TruncationKind::Kraus, s + which, tr.discarded_weight)?;
            }
            let newm = times_diag(&tr.left, &tr.singular_values);
            let mut dims: Vec<usize> = rest.iter().map(|&x| theta.dims[x]).collect();
            dims.push(tr.kept);
            let t = Tensor::from_matrix(&newm, &dims);
            // inverse permutation
            let mut inv = vec![0; 6];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            theta = t.permute(&inv);
        }

        // bond split
        let [dl, _, k1, _, k2, dr] = [theta.dims[0], 2, theta.dims[2], 2, theta.dims[4], theta.dims[5]];
        let mat = theta.to_matrix(3);
        let tr = truncate_svd(&mat, caps.max_bond)?;
        if tr.kept < tr.total {
            log.push(TruncationKind::Bond, s, tr.discarded_weight)?;
        }
        let right = diag_times(&tr.singular_values, &tr.right);
        self.sites[s] = Tensor::from_matrix(&tr.left, &[dl, 2, k1, tr.kept]);
        self.sites[s + 1] = Tensor::from_matrix(&right, &[tr.kept, 2, k2, dr]);
        self.center = s + 1;
        Ok(())
    }

    /// Single-qubit channel on one site, followed by Kraus truncation.
    pub fn apply_channel(&mut self, site: usize, ch: &KrausSet, caps: TruncationCaps, log: &mut TruncationLog) -> Result<()> {
        self.move_center_to(site);
        let a = &self.sites[site];
        let [dl, _, k, dr] = [a.dims[0], a.dims[1], a.dims[2], a.dims[3]];
        let mm = ch.len();
        let mut out = Tensor::zeros(&[dl, 2, k * mm, dr]);
        for (m, op) in ch.operators().iter().enumerate() {
            for l in 0..dl {
                for p in 0..2 {
                    for q in 0..2 {
                        let c = op[(p, q)];
                        if c == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for kk in 0..k {
                            for r in 0..dr {
                                let src = ((l * 2 + q) * k + kk) * dr + r;
                                let dst = ((l * 2 + p) * (k * mm) + kk * mm + m) * dr + r;
                                out.data[dst] += c * a.data[src];
                            }
                        }
                    }
                }
            }
        }
        let mat = out.permute(&[0, 1, 3, 2]).to_matrix(3);
        let tr = truncate_svd(&mat, caps.max_kraus)?;
        if tr.kept < tr.total {
            log.push(TruncationKind::Kraus, site, tr.discarded_weight)?;
        }
        let newm = times_diag(&tr.left, &tr.singular_values);
        self.sites[site] = Tensor::from_matrix(&newm, &[dl, 2, dr, tr.kept]).permute(&[0, 1, 3, 2]);
        Ok(())
    }

    /// Full density matrix `X X†` (row index = physical basis index).
    pub fn density_matrix(&self) -> CMatrix {
        // acc[(pr, pc), (r, r')]
        let mut acc = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let mut prefix = 1usize;
        for a in &self.sites {
            let [dl, _, k, dr] = [a.dims[0], a.dims[1], a.dims[2], a.dims[3]];
            let new_prefix = prefix * 2;
            let mut next = CMatrix::zeros(new_prefix * new_prefix, dr * dr);
            for pr in 0..prefix {
                for pc in 0..prefix {
                    let row = pr * prefix + pc;
                    for l in 0..dl {
                        for lp in 0..dl {
                            let e = acc[(row, l * dl + lp)];
                            if e == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for p in 0..2 {
                                for pp in 0..2 {
                                    let nrow = (pr * 2 + p) * new_prefix + (pc * 2 + pp);
                                    for kk in 0..k {
                                        for r in 0..dr {
                                            let x = e * a.data[((l * 2 + p) * k + kk) * dr + r];
                                            for rp in 0..dr {
                                                let y = a.data[((lp * 2 + pp) * k + kk) * dr + rp].conj();
                                                next[(nrow, r * dr + rp)] += x * y;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            prefix = new_prefix;
        }
        let dim = prefix;
        CMatrix::from_fn(dim, dim, |i, j| acc[(i * dim + j, 0)])
    }

    /// State vector when every Kraus dimension is 1.
    pub fn amplitudes(&self) -> Option<Vec<C64>> {
        if self.sites.iter().any(|s| s.dims[2] != 1) {
            return None;
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        let mut bond = 1;
        for a in &self.sites {
            let dr = a.dims[3];
            let prefixes = amps.len() / bond;
            let mut next = vec![C64::new(0.0, 0.0); prefixes * 2 * dr];
            for pre in 0..prefixes {
                for l in 0..bond {
                    let x = amps[pre * bond + l];
                    for p in 0..2 {
                        for r in 0..dr {
                            next[(pre * 2 + p) * dr + r] += x * a.data[(l * 2 + p) * dr + r];
                        }
                    }
                }
            }
            amps = next;
            bond = dr;
        }
        Some(amps)
    }

    /// Concatenates chains; the result is re-canonicalized.
    pub fn concat(parts: &[&Chain]) -> Result<Chain> {
        let sites = parts.iter().flat_map(|c| c.sites.iter().cloned()).collect();
        Chain::new(sites)
    }
}

fn apply_channel_to_theta(theta: &Tensor, which: usize, ch: &KrausSet) -> Tensor {
    // bring [.., p_which, k_which, ..] to the front: [p, k, rest...]
    let (pax, kax) = if which == 0 { (1, 2) } else { (3, 4) };
    let rest: Vec<usize> = (0..6).filter(|&x| x != pax && x != kax).collect();
    let mut perm = vec![pax, kax];
    perm.extend(&rest);
    let t = theta.permute(&perm);
    let k = t.dims[1];
    let inner: usize = t.dims[2..].iter().product();
    let mm = ch.len();
    let mut out = vec![C64::new(0.0, 0.0); 2 * k * mm * inner];
    for (m, op) in ch.operators().iter().enumerate() {
        for p in 0..2 {
            for q in 0..2 {
                let c = op[(p, q)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for kk in 0..k {
                    let src = (q * k + kk) * inner;
                    let dst = (p * k * mm + kk * mm + m) * inner;
                    for x in 0..inner {
                        out[dst + x] += c * t.data[src + x];
                    }
                }
            }
        }
    }
    let mut dims = vec![2, k * mm];
    dims.extend(&t.dims[2..]);
    let out = Tensor::from_data(&dims, out);
    let mut inv = vec![0; 6];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    out.permute(&inv)
}
