//! Exact ancestral sampling of product-POVM outcomes from a chain.
//!
//! With the orthogonality center on site 0 every site to the right is
//! right-canonical, so the right environment of any prefix is the identity.
//! The conditional distribution of outcome `a_k` given `a_1 … a_{k−1}` then
//! only needs the left environment of the prefix, which is cached per prefix.

use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng as _;

use crate::linalg::CMatrix;
use crate::rng::Rng;
use crate::C64;

use super::chain::Chain;

/// Prefixes are cached until the table holds this many nodes.
const CACHE_LIMIT: usize = 1 << 18;

struct Node {
    cumulative: Vec<f64>,
    envs: Vec<CMatrix>,
}

pub(crate) struct ChainSampler {
    chain: Chain,
    elements: Vec<CMatrix>,
    cache: HashMap<(usize, u64), Rc<Node>>,
}

impl ChainSampler {
    pub fn new(chain: &Chain, elements: &[CMatrix]) -> Self {
        let mut chain = chain.clone();
        chain.move_center_to(0);
        ChainSampler { chain, elements: elements.to_vec(), cache: HashMap::new() }
    }

    fn expand(&self, site: usize, env: &CMatrix) -> Node {
        let a = &self.chain.sites[site];
        let [dl, _, k, dr] = [a.dims[0], a.dims[1], a.dims[2], a.dims[3]];
        let am = a.to_matrix(1); // dl × (2 k dr)
        let b = env.transpose() * &am; // B[l', (p, κ, r)]
        let inner = k * dr;
        let conj_a = CMatrix::from_fn(dl * 2 * k, dr, |row, r| a.data[row * dr + r].conj());
        let mut probs = Vec::with_capacity(self.elements.len());
        let mut envs = Vec::with_capacity(self.elements.len());
        for m in &self.elements {
            // G[(l', p', κ), r] = Σ_p M[p', p] B[l', p, κ, r]
            let mut g = CMatrix::zeros(dl * 2 * k, dr);
            for l in 0..dl {
                for pp in 0..2 {
                    for kk in 0..k {
                        for r in 0..dr {
                            let mut acc = C64::new(0.0, 0.0);
                            for p in 0..2 {
                                acc += m[(pp, p)] * b[(l, p * inner + kk * dr + r)];
                            }
                            g[((l * 2 + pp) * k + kk, r)] = acc;
                        }
                    }
                }
            }
            let e = g.transpose() * &conj_a;
            probs.push(e.trace().re.max(0.0));
            envs.push(e);
        }
        let total: f64 = probs.iter().sum();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut run = 0.0;
        for (p, e) in probs.iter().zip(envs.iter_mut()) {
            run += p / total;
            cumulative.push(run);
            if *p > 0.0 {
                *e /= C64::new(*p, 0.0);
            }
        }
        Node { cumulative, envs }
    }

    fn node(&mut self, site: usize, code: u64, env: &CMatrix) -> Rc<Node> {
        if let Some(n) = self.cache.get(&(site, code)) {
            return Rc::clone(n);
        }
        let node = Rc::new(self.expand(site, env));
        if self.cache.len() < CACHE_LIMIT {
            self.cache.insert((site, code), Rc::clone(&node));
        }
        node
    }

    /// Draws one outcome tuple, appending it to `out`.
    pub fn sample_into(&mut self, rng: &mut Rng, out: &mut Vec<u8>) {
        let m = self.elements.len() as u64;
        let mut env = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let mut code = 0u64;
        for site in 0..self.chain.len() {
            let node = self.node(site, code, &env);
            let u: f64 = rng.gen();
            let a = pick(&node.cumulative, u);
            out.push(a as u8);
            env = node.envs[a].clone();
            code = code.wrapping_mul(m).wrapping_add(a as u64 + 1);
        }
    }

    /// Exact probability of one outcome tuple (no caching).
    pub fn probability(&self, tuple: &[usize]) -> f64 {
        let mut env = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let mut p = 1.0;
        for (site, &a) in tuple.iter().enumerate() {
            let node = self.expand(site, &env);
            let prev = if a == 0 { 0.0 } else { node.cumulative[a - 1] };
            let pa = node.cumulative[a] - prev;
            p *= pa;
            if pa == 0.0 {
                return 0.0;
            }
            env = node.envs[a].clone();
        }
        p
    }
}

/// Index selected by a uniform draw against a cumulative table, skipping
/// zero-probability outcomes that rounding could otherwise select.
fn pick(cumulative: &[f64], u: f64) -> usize {
    if let Some(a) = cumulative.iter().position(|&c| u < c) {
        return a;
    }
    let mut prev = 0.0;
    let mut last = 0;
    for (a, &c) in cumulative.iter().enumerate() {
        if c > prev {
            last = a;
        }
        prev = c;
    }
    last
}
