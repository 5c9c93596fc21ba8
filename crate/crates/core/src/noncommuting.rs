//! Anticommutation graphs, the signed ordering sums behind `α` and `β`, and
//! the matrix-product pilot state for general Pauli Hamiltonians.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_big, binomial_u128};
use crate::error::{HdqiError, Result};
use crate::gf2::BitVec;
use crate::pauli::{PauliHamiltonian, PauliWord, Phase};

/// Default cap on component size for the pilot construction.
pub const DEFAULT_COMPONENT_CAP: usize = 20;
const ALPHA_TABLE_BUDGET: u128 = 1 << 24;
const BETA_COMPOSITION_BUDGET: u128 = 1 << 22;
const PILOT_TABLE_BUDGET: u128 = 1 << 23;

/// Graph on term indices with an edge for every anticommuting pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnticommGraph {
    /// Sorted neighbour lists.
    adj: Vec<Vec<usize>>,
    /// Connected components, each sorted, ordered by smallest vertex.
    components: Vec<Vec<usize>>,
}

impl AnticommGraph {
    /// Only terms sharing a qubit are compared.
    pub fn from_hamiltonian(h: &PauliHamiltonian) -> Self {
        let m = h.num_terms();
        let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); h.num_qubits()];
        for (i, w) in h.words().enumerate() {
            for q in w.support() {
                on_qubit[q].push(i);
            }
        }
        let mut adj = vec![Vec::new(); m];
        for terms in &on_qubit {
            for (a, &i) in terms.iter().enumerate() {
                for &j in &terms[a + 1..] {
                    if h.term(i).word.symplectic_product(&h.term(j).word) {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adj)
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); m];
        for &(i, j) in edges {
            if i >= m || j >= m || i == j {
                return Err(HdqiError::InvalidParameter(format!("bad edge ({i}, {j}) for {m} nodes")));
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_adjacency(adj))
    }

    fn from_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let m = adj.len();
        let mut seen = vec![false; m];
        let mut components = Vec::new();
        for s in 0..m {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        Self { adj, components }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn anticommutes(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn max_component(&self) -> usize {
        self.components.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(a, &v)| (v, a)).collect();
        let adj = nodes
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = self.adj[v].iter().filter_map(|u| pos.get(u).copied()).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Self::from_adjacency(adj)
    }

    /// Dense adjacency rows for DP kernels.
    fn dense_rows(&self) -> Vec<BitVec> {
        let m = self.num_nodes();
        self.adj.iter().map(|l| BitVec::from_indices(m, l)).collect()
    }
}

/// `(−1)^{inv}` where inversions count only anticommuting pairs.
pub fn sgn_eval(graph: &AnticommGraph, sequence: &[usize]) -> i8 {
    let mut parity = false;
    for (p, &a) in sequence.iter().enumerate() {
        for &b in &sequence[p + 1..] {
            if a > b && graph.anticommutes(a, b) {
                parity = !parity;
            }
        }
    }
    if parity {
        -1
    } else {
        1
    }
}

/// `(|μ| choose μ)`.
pub fn multinomial(mu: &[usize]) -> BigInt {
    let mut total = 0;
    let mut acc = BigInt::one();
    for &k in mu {
        total += k;
        acc *= BigInt::from(binomial_big(total, k));
    }
    acc
}

/// Signed sum over distinct orderings of the multiset `μ`:
/// `Σ_G(μ) = Σ_j (−1)^{Σ_{i>j} A_ij μ_i} Σ_G(μ − e_j)`, tabulated over the down-set of `μ`.
pub fn sigma_dp(graph: &AnticommGraph, mu: &[usize]) -> Result<BigInt> {
    let m = graph.num_nodes();
    if mu.len() != m {
        return Err(HdqiError::DimensionMismatch {
            expected: m,
            found: mu.len(),
        });
    }
    let size = mu.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128 + 1));
    if size > ALPHA_TABLE_BUDGET {
        return Err(HdqiError::BudgetExceeded {
            what: "ordering-sum table",
            needed: size,
            limit: ALPHA_TABLE_BUDGET,
        });
    }
    // Only nodes with μ_j > 0 matter; restrict to them to keep strides small.
    let active: Vec<usize> = (0..m).filter(|&j| mu[j] > 0).collect();
    let rows = graph.dense_rows();
    let dims: Vec<usize> = active.iter().map(|&j| mu[j] + 1).collect();
    let r = active.len();
    let mut strides = vec![1usize; r];
    for t in (0..r.saturating_sub(1)).rev() {
        strides[t] = strides[t + 1] * dims[t + 1];
    }
    let total = size as usize;
    let mut table: Vec<BigInt> = vec![BigInt::zero(); total];
    table[0] = BigInt::one();
    let mut cur = vec![0usize; r];
    for idx in 1..total {
        // advance the mixed-radix counter
        let mut t = r;
        while t > 0 {
            t -= 1;
            cur[t] += 1;
            if cur[t] < dims[t] {
                break;
            }
            cur[t] = 0;
        }
        let mut acc = BigInt::zero();
        for a in 0..r {
            if cur[a] == 0 {
                continue;
            }
            let j = active[a];
            let mut parity = 0usize;
            for b in a + 1..r {
                if rows[j].get(active[b]) {
                    parity += cur[b];
                }
            }
            let prev = &table[idx - strides[a]];
            if parity % 2 == 1 {
                acc -= prev;
            } else {
                acc += prev;
            }
        }
        table[idx] = acc;
    }
    Ok(table[total - 1].clone())
}

/// Average ordering sign `α_G(μ) = Σ_G(μ) / (|μ| choose μ)`.
pub fn alpha_dp(graph: &AnticommGraph, mu: &[usize]) -> Result<BigRational> {
    Ok(BigRational::new(sigma_dp(graph, mu)?, multinomial(mu)))
}

/// Visits every weak composition of `total` into `parts` parts.
fn for_each_composition(parts: usize, total: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(buf: &mut Vec<usize>, parts: usize, left: usize, f: &mut impl FnMut(&[usize])) {
        if buf.len() + 1 == parts {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for x in 0..=left {
            buf.push(x);
            rec(buf, parts, left - x, f);
            buf.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(parts), parts, total, f);
}

/// `β_G^{(k)}(y) = Σ_{ν ⊨ (k−|y|)/2} Σ_G(y + 2ν)`; zero when `|y| > k` or parities differ.
pub fn beta_eval(graph: &AnticommGraph, k: usize, y: &BitVec) -> Result<BigRational> {
    let m = graph.num_nodes();
    if y.len() != m {
        return Err(HdqiError::DimensionMismatch {
            expected: m,
            found: y.len(),
        });
    }
    let w = y.weight();
    if w > k || (k - w) % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let half = (k - w) / 2;
    let count = binomial_u128(half + m.max(1) - 1, m.max(1) - 1);
    if count > BETA_COMPOSITION_BUDGET {
        return Err(HdqiError::BudgetExceeded {
            what: "β composition count",
            needed: count,
            limit: BETA_COMPOSITION_BUDGET,
        });
    }
    let mut acc = BigInt::zero();
    let mut err = None;
    for_each_composition(m, half, &mut |nu| {
        if err.is_some() {
            return;
        }
        let mu: Vec<usize> = (0..m).map(|i| usize::from(y.get(i)) + 2 * nu[i]).collect();
        match sigma_dp(graph, &mu) {
            Ok(s) => acc += s,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(BigRational::from_integer(acc)),
    }
}

/// `Σ_C(μ)` for every `μ` on a component with `|μ| ≤ max_total`, folded into
/// `β_C^{(κ)}(y)` keyed by the local parity pattern `y` (bit `a` = node `a`).
fn component_betas(graph: &AnticommGraph, nodes: &[usize], max_total: usize) -> HashMap<u64, Vec<BigInt>> {
    let c = nodes.len();
    let local = graph.induced(nodes);
    let rows: Vec<u64> = (0..c)
        .map(|a| local.neighbours(a).iter().fold(0u64, |acc, &b| acc | 1 << b))
        .collect();
    let mut betas: HashMap<u64, Vec<BigInt>> = HashMap::new();
    betas.insert(0, {
        let mut v = vec![BigInt::zero(); max_total + 1];
        v[0] = BigInt::one();
        v
    });
    // level-by-level over |μ|
    let mut level: HashMap<Vec<u8>, BigInt> = HashMap::new();
    level.insert(vec![0u8; c], BigInt::one());
    for total in 1..=max_total {
        let mut next: HashMap<Vec<u8>, BigInt> = HashMap::new();
        // Σ(μ) = Σ_j sign_j(μ) Σ(μ − e_j): push each Σ(μ') to μ' + e_j.
        for (mu, val) in &level {
            for j in 0..c {
                let mut parity = 0u32;
                let mut nb = rows[j] >> (j + 1);
                let mut b = j + 1;
                while nb != 0 {
                    if nb & 1 == 1 {
                        parity += mu[b] as u32;
                    }
                    nb >>= 1;
                    b += 1;
                }
                let mut up = mu.clone();
                up[j] += 1;
                let entry = next.entry(up).or_insert_with(BigInt::zero);
                if parity % 2 == 1 {
                    *entry -= val;
                } else {
                    *entry += val;
                }
            }
        }
        for (mu, val) in &next {
            if val.is_zero() {
                continue;
            }
            let pat = mu.iter().enumerate().fold(0u64, |acc, (a, &k)| acc | ((k as u64 & 1) << a));
            let slot = betas.entry(pat).or_insert_with(|| vec![BigInt::zero(); max_total + 1]);
            slot[total] += val;
        }
        level = next;
    }
    betas.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    betas
}

/// Matrix-product description of the pilot amplitudes
/// `amp(y) = v_Lᵀ Π_t A^{(t)}[y^{(t)}] v_R` with bond dimension `ℓ+1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PilotMps {
    pub m: usize,
    pub ell: usize,
    /// Polynomial coefficients; also the right boundary vector.
    pub coeffs: Vec<f64>,
    /// Sites in canonical order (by smallest term index).
    pub components: Vec<Vec<usize>>,
    /// Per site: local pattern → `β^{(κ)}` for `κ = 0..=ℓ`.
    betas: Vec<HashMap<u64, Vec<BigInt>>>,
    pub norm: f64,
}

impl PilotMps {
    pub fn build(h: &PauliHamiltonian, coeffs: &[f64], component_cap: usize) -> Result<Self> {
        let g = AnticommGraph::from_hamiltonian(h);
        let order: Vec<usize> = (0..g.components().len()).collect();
        Self::build_from_graph(&g, coeffs, component_cap, &order)
    }

    /// Build with sites in the given order of `graph.components()`.
    pub fn build_from_graph(
        graph: &AnticommGraph,
        coeffs: &[f64],
        component_cap: usize,
        order: &[usize],
    ) -> Result<Self> {
        let ell = coeffs.len().saturating_sub(1);
        let biggest = graph.max_component();
        if biggest > component_cap.min(63) {
            return Err(HdqiError::ComponentTooLarge {
                size: biggest,
                cap: component_cap.min(63),
            });
        }
        let work: u128 = graph
            .components()
            .iter()
            .map(|c| binomial_u128(c.len() + ell, ell))
            .fold(0u128, u128::saturating_add);
        if work > PILOT_TABLE_BUDGET {
            return Err(HdqiError::BudgetExceeded {
                what: "pilot β tables",
                needed: work,
                limit: PILOT_TABLE_BUDGET,
            });
        }
        let components: Vec<Vec<usize>> = order.iter().map(|&i| graph.components()[i].clone()).collect();
        let betas = components.iter().map(|c| component_betas(graph, c, ell)).collect();
        let mut mps = Self {
            m: graph.num_nodes(),
            ell,
            coeffs: coeffs.to_vec(),
            components,
            betas,
            norm: 0.0,
        };
        mps.norm = mps.norm_squared().sqrt();
        Ok(mps)
    }

    pub fn bond_dimension(&self) -> usize {
        self.ell + 1
    }

    /// `A^{(t)}[pattern]`, `(K, K')` entry `C(K', K)·β^{(K'−K)}`.
    pub fn site_matrix(&self, t: usize, pattern: u64) -> DMatrix<f64> {
        let d = self.ell + 1;
        let mut a = DMatrix::zeros(d, d);
        if let Some(b) = self.betas[t].get(&pattern) {
            for k in 0..d {
                for kp in k..d {
                    let v = &b[kp - k];
                    if !v.is_zero() {
                        let c = binomial_u128(kp, k) as f64;
                        a[(k, kp)] = c * v.to_f64().unwrap_or(f64::NAN);
                    }
                }
            }
        }
        a
    }

    pub fn site_patterns(&self, t: usize) -> impl Iterator<Item = u64> + '_ {
        self.betas[t].keys().copied()
    }

    fn v_left(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.ell + 1);
        v[0] = 1.0;
        v
    }

    fn v_right(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coeffs)
    }

    pub fn local_pattern(&self, t: usize, y: &BitVec) -> u64 {
        self.components[t]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (a, &i)| acc | (u64::from(y.get(i)) << a))
    }

    /// Amplitude without the term signs `vᵢ`.
    pub fn amplitude(&self, y: &BitVec) -> f64 {
        let mut row = self.v_left().transpose();
        for t in 0..self.components.len() {
            let pat = self.local_pattern(t, y);
            if !self.betas[t].contains_key(&pat) {
                return 0.0;
            }
            row = row * self.site_matrix(t, pat);
        }
        (row * self.v_right())[(0, 0)]
    }

    /// `Σ_y amp(y)²` by left-to-right transfer contraction.
    pub fn norm_squared(&self) -> f64 {
        let v_l = self.v_left();
        let mut env = &v_l * v_l.transpose();
        for t in 0..self.components.len() {
            let mut next = DMatrix::zeros(self.ell + 1, self.ell + 1);
            for pat in self.site_patterns(t) {
                let a = self.site_matrix(t, pat);
                next += a.transpose() * &env * &a;
            }
            env = next;
        }
        let v_r = self.v_right();
        (v_r.transpose() * env * v_r)[(0, 0)]
    }

    /// Exact `β_{C_t}^{(κ)}` for a local pattern.
    pub fn component_beta(&self, t: usize, pattern: u64, kappa: usize) -> BigInt {
        self.betas[t]
            .get(&pattern)
            .and_then(|v| v.get(kappa).cloned())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sites: Vec<serde_json::Value> = (0..self.components.len())
            .map(|t| {
                let mut pats: Vec<u64> = self.site_patterns(t).collect();
                pats.sort_unstable();
                let mats: Vec<serde_json::Value> = pats
                    .iter()
                    .map(|&p| {
                        let a = self.site_matrix(t, p);
                        let rows: Vec<Vec<f64>> = (0..a.nrows()).map(|r| a.row(r).iter().copied().collect()).collect();
                        let terms: Vec<usize> = (0..self.components[t].len())
                            .filter(|a| p >> a & 1 == 1)
                            .map(|a| self.components[t][a])
                            .collect();
                        serde_json::json!({ "pattern": terms, "matrix": rows })
                    })
                    .collect();
                serde_json::json!({ "terms": self.components[t], "matrices": mats })
            })
            .collect();
        let mut v_l = vec![0.0; self.ell + 1];
        v_l[0] = 1.0;
        serde_json::json!({
            "m": self.m,
            "bond_dimension": self.ell + 1,
            "v_left": v_l,
            "v_right": self.coeffs,
            "norm": self.norm,
            "sites": sites,
        })
    }
}

/// Signed sequence counts per parity pattern and degree, from explicit word products.
#[derive(Clone, Debug, Default)]
pub struct BruteAmplitudes {
    /// pattern bits (term `i` = bit `i`) → count per `k`.
    pub counts: HashMap<u64, Vec<i64>>,
    pub ell: usize,
}

impl BruteAmplitudes {
    pub fn amplitude(&self, coeffs: &[f64], y: u64) -> f64 {
        self.counts
            .get(&y)
            .map(|c| c.iter().zip(coeffs).map(|(&n, &ck)| n as f64 * ck).sum())
            .unwrap_or(0.0)
    }

    pub fn count(&self, k: usize, y: u64) -> i64 {
        self.counts.get(&y).and_then(|c| c.get(k).copied()).unwrap_or(0)
    }
}

/// Expands `(Σ Pᵢ)^k` for `k ≤ ℓ` over all `m^k` index sequences with exact phases,
/// relative to the increasing-order product of each parity pattern.
pub fn pilot_amplitudes_bruteforce(h: &PauliHamiltonian, ell: usize) -> Result<BruteAmplitudes> {
    let m = h.num_terms();
    if m > 10 || ell > 6 {
        return Err(HdqiError::BudgetExceeded {
            what: "sequence enumeration (m ≤ 10, ℓ ≤ 6)",
            needed: (m as u128).saturating_pow(ell as u32),
            limit: 10u128.pow(6),
        });
    }
    let words: Vec<PauliWord> = h.words().cloned().collect();
    let n = h.num_qubits();
    let mut canon_cache: HashMap<u64, Phase> = HashMap::new();
    let mut canonical_phase = |pat: u64| -> Phase {
        *canon_cache.entry(pat).or_insert_with(|| {
            let mut ph = Phase::ONE;
            let mut w = PauliWord::identity(n);
            for (i, word) in words.iter().enumerate() {
                if pat >> i & 1 == 1 {
                    let (p, nw) = w.mul_unchecked(word);
                    ph = ph * p;
                    w = nw;
                }
            }
            ph
        })
    };
    let mut out = BruteAmplitudes {
        counts: HashMap::new(),
        ell,
    };
    // depth-first over sequences, carrying (pattern, phase, word)
    let mut stack: Vec<(usize, u64, Phase, PauliWord)> = vec![(0, 0, Phase::ONE, PauliWord::identity(n))];
    while let Some((k, pat, ph, w)) = stack.pop() {
        let rel = ph * canonical_phase(pat).conj();
        let s = rel
            .sign()
            .ok_or_else(|| HdqiError::Precondition("sequence product differs by an imaginary phase".into()))?;
        out.counts.entry(pat).or_insert_with(|| vec![0; ell + 1])[k] += s as i64;
        if k < ell {
            for (i, word) in words.iter().enumerate() {
                let (p, nw) = w.mul_unchecked(word);
                stack.push((k + 1, pat ^ (1 << i), ph * p, nw));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{add_scaled_pauli, max_abs_diff, poly_of_hamiltonian, CMatrix};
    use crate::poly::{symmetric_weights, UniPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2() -> PauliHamiltonian {
        PauliHamiltonian::from_strs(&[(1, "XZX"), (1, "ZXZ"), (1, "XII")]).unwrap()
    }

    fn path3() -> AnticommGraph {
        AnticommGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng, m: usize, p: f64) -> AnticommGraph {
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        AnticommGraph::from_edges(m, &edges).unwrap()
    }

    fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize, m: usize) -> PauliHamiltonian {
        let terms: Vec<_> = (0..m)
            .map(|_| {
                let w = loop {
                    let w = PauliWord::random(n, rng);
                    if !w.is_identity() {
                        break w;
                    }
                };
                crate::pauli::SignedTerm::new(if rng.gen_bool(0.5) { 1 } else { -1 }, w).unwrap()
            })
            .collect();
        PauliHamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn graph_examples() {
        let g = AnticommGraph::from_hamiltonian(&fig2());
        assert_eq!(g, path3());
        let commuting = PauliHamiltonian::from_strs(&[(1, "ZZI"), (1, "IZZ"), (-1, "ZIZ")]).unwrap();
        let g = AnticommGraph::from_hamiltonian(&commuting);
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.components().len(), 3);
    }

    #[test]
    fn graph_matches_pairwise_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let h = random_hamiltonian(&mut rng, 4, 9);
            let g = AnticommGraph::from_hamiltonian(&h);
            for i in 0..9 {
                for j in 0..9 {
                    let want = i != j && !h.term(i).word.commutes(&h.term(j).word).unwrap();
                    assert_eq!(g.anticommutes(i, j), want);
                }
            }
            let total: usize = g.components().iter().map(Vec::len).sum();
            assert_eq!(total, 9);
        }
    }

    #[test]
    fn sign_examples() {
        let g = path3();
        assert_eq!(sgn_eval(&g, &[0, 1, 2]), 1);
        assert_eq!(sgn_eval(&g, &[1, 0, 2]), -1);
        assert_eq!(sgn_eval(&g, &[2, 0, 1]), -1);
        assert_eq!(sgn_eval(&g, &[2, 0]), 1);
    }

    #[test]
    fn sign_matches_word_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = rng.gen_range(2..=6);
            let h = random_hamiltonian(&mut rng, 3, m);
            let g = AnticommGraph::from_hamiltonian(&h);
            let len = rng.gen_range(1..=6);
            let seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..m)).collect();
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            let prod = |s: &[usize]| {
                s.iter().fold((Phase::ONE, PauliWord::identity(3)), |(ph, w), &i| {
                    let (p, nw) = w.mul(&h.term(i).word).unwrap();
                    (ph * p, nw)
                })
            };
            let (a, wa) = prod(&seq);
            let (b, wb) = prod(&sorted);
            assert_eq!(wa, wb);
            let rel = (a * b.conj()).sign().unwrap();
            assert_eq!(rel, sgn_eval(&g, &seq));
        }
    }

    #[test]
    fn alpha_examples() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(alpha_dp(&path3(), &[1, 1, 1]).unwrap(), r(-1, 3));
        let edge = AnticommGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(alpha_dp(&edge, &[1, 1]).unwrap(), r(0, 1));
        let empty = AnticommGraph::from_edges(4, &[]).unwrap();
        assert_eq!(alpha_dp(&empty, &[2, 0, 3, 1]).unwrap(), r(1, 1));
        assert_eq!(alpha_dp(&edge, &[2, 2]).unwrap(), r(1, 3));
    }

    /// Distinct orderings of a multiset, by brute force.
    fn sigma_brute(g: &AnticommGraph, mu: &[usize]) -> BigInt {
        fn rec(g: &AnticommGraph, left: &mut Vec<usize>, seq: &mut Vec<usize>, acc: &mut i64) {
            if left.iter().all(|&k| k == 0) {
                *acc += sgn_eval(g, seq) as i64;
                return;
            }
            for j in 0..left.len() {
                if left[j] > 0 {
                    left[j] -= 1;
                    seq.push(j);
                    rec(g, left, seq, acc);
                    seq.pop();
                    left[j] += 1;
                }
            }
        }
        let mut acc = 0;
        rec(g, &mut mu.to_vec(), &mut Vec::new(), &mut acc);
        BigInt::from(acc)
    }

    #[test]
    fn sigma_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = rng.gen_range(1..=5);
            let g = random_graph(&mut rng, m, 0.5);
            let mu: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=2)).collect();
            if mu.iter().sum::<usize>() > 7 {
                continue;
            }
            assert_eq!(sigma_dp(&g, &mu).unwrap(), sigma_brute(&g, &mu));
        }
    }

    #[test]
    fn alpha_factorises_over_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let m = rng.gen_range(2..=8);
            let g = random_graph(&mut rng, m, 0.3);
            let mut mu = vec![0usize; m];
            for _ in 0..rng.gen_range(0..=6) {
                mu[rng.gen_range(0..m)] += 1;
            }
            let whole = alpha_dp(&g, &mu).unwrap();
            let mut prod = BigRational::one();
            for c in g.components() {
                let sub = g.induced(c);
                let local: Vec<usize> = c.iter().map(|&i| mu[i]).collect();
                prod *= alpha_dp(&sub, &local).unwrap();
            }
            assert_eq!(whole, prod);
        }
    }

    /// `Σ` over all `m^k` index sequences whose parity pattern is `y`.
    fn beta_brute(g: &AnticommGraph, k: usize, y: &BitVec) -> BigInt {
        let m = g.num_nodes();
        let mut acc = 0i64;
        let total = m.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let mut seq = Vec::with_capacity(k);
            let mut pat = BitVec::zeros(m);
            for _ in 0..k {
                seq.push(c % m);
                pat.flip(c % m);
                c /= m;
            }
            if &pat == y {
                acc += sgn_eval(g, &seq) as i64;
            }
        }
        BigInt::from(acc)
    }

    #[test]
    fn beta_examples_and_sequence_oracle() {
        let g = path3();
        assert!(beta_eval(&g, 1, &BitVec::from_indices(3, &[0, 1])).unwrap().is_zero());
        assert!(beta_eval(&g, 2, &BitVec::from_indices(3, &[0])).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let m = rng.gen_range(1..=6);
            let g = random_graph(&mut rng, m, 0.4);
            let k = rng.gen_range(0..=5);
            let y = BitVec::random(m, &mut rng);
            assert_eq!(beta_eval(&g, k, &y).unwrap(), BigRational::from_integer(beta_brute(&g, k, &y)));
        }
    }

    #[test]
    fn edgeless_beta_is_the_commuting_factor() {
        let m = 5;
        let g = AnticommGraph::from_edges(m, &[]).unwrap();
        for k in 0..=5 {
            let tab = crate::poly::a_table(m, k);
            for y in 0u64..32 {
                let y = BitVec::from_u64(m, y);
                let want = tab[k].get(y.weight()).cloned().unwrap_or_default();
                assert_eq!(beta_eval(&g, k, &y).unwrap(), BigRational::from_integer(want));
            }
        }
    }

    #[test]
    fn beta_reduced_form_over_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let m = rng.gen_range(2..=7);
            let g = random_graph(&mut rng, m, 0.25);
            let k = rng.gen_range(0..=5);
            let y = BitVec::random(m, &mut rng);
            let comps = g.components().to_vec();
            let r = comps.len();
            let mut total = BigRational::zero();
            for_each_composition(r, k, &mut |kappa| {
                let mut term = BigRational::from_integer(multinomial(kappa));
                for (t, c) in comps.iter().enumerate() {
                    let sub = g.induced(c);
                    let local = BitVec::from_bools(&c.iter().map(|&i| y.get(i)).collect::<Vec<_>>());
                    term *= beta_eval(&sub, kappa[t], &local).unwrap();
                }
                total += term;
            });
            assert_eq!(beta_eval(&g, k, &y).unwrap(), total);
        }
    }

    #[test]
    fn mps_matches_beta_and_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let m = rng.gen_range(2..=8);
            let n = rng.gen_range(2..=3);
            let h = random_hamiltonian(&mut rng, n, m);
            let ell = rng.gen_range(0..=4);
            let coeffs: Vec<f64> = (0..=ell).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mps = PilotMps::build(&h, &coeffs, DEFAULT_COMPONENT_CAP).unwrap();
            assert_eq!(mps.bond_dimension(), ell + 1);
            let brute = pilot_amplitudes_bruteforce(&h, ell).unwrap();
            let g = AnticommGraph::from_hamiltonian(&h);
            let mut norm2 = 0.0;
            for y in 0u64..(1 << m) {
                let yv = BitVec::from_u64(m, y);
                let amp = mps.amplitude(&yv);
                // bit i of a u64 pattern is term i; from_u64 puts bit i at index i
                let want_brute = brute.amplitude(&coeffs, y);
                assert!((amp - want_brute).abs() < 1e-9, "{amp} vs {want_brute}");
                if m <= 6 {
                    let via_beta: f64 = (0..=ell)
                        .map(|k| coeffs[k] * crate::poly::rational_to_f64(&beta_eval(&g, k, &yv).unwrap()))
                        .sum();
                    assert!((amp - via_beta).abs() < 1e-9);
                }
                norm2 += amp * amp;
            }
            assert!((mps.norm_squared() - norm2).abs() < 1e-9 * norm2.max(1.0));
            let zero = BitVec::zeros(m);
            let at_zero: f64 = (0..=ell)
                .map(|k| coeffs[k] * crate::poly::rational_to_f64(&beta_eval(&g, k, &zero).unwrap_or_default()))
                .sum();
            if m <= 6 {
                assert!((mps.amplitude(&zero) - at_zero).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bitvec_u64_layout_is_index_order() {
        let v = BitVec::from_u64(5, 0b00101);
        assert!(v.get(0) && v.get(2) && !v.get(1));
    }

    #[test]
    fn commuting_amplitudes_are_symmetric_weights() {
        let h = PauliHamiltonian::from_strs(&[(1, "ZZII"), (1, "IZZI"), (-1, "IIZZ"), (1, "XXXX"), (1, "ZIIZ")]).unwrap();
        let coeffs = vec![0.2, -0.5, 1.0, 0.25];
        let mps = PilotMps::build(&h, &coeffs, 20).unwrap();
        let w = symmetric_weights(&UniPoly::new(coeffs), 5).unwrap();
        for y in 0u64..32 {
            let yv = BitVec::from_u64(5, y);
            let want = w.w.get(yv.weight()).copied().unwrap_or(0.0);
            assert!((mps.amplitude(&yv) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_polynomial_gives_unit_singletons() {
        let h = fig2();
        let mps = PilotMps::build(&h, &[0.0, 1.0], 20).unwrap();
        for i in 0..3 {
            assert_eq!(mps.amplitude(&BitVec::from_indices(3, &[i])), 1.0);
        }
        let brute = pilot_amplitudes_bruteforce(&h, 2).unwrap();
        // X₁Z₂X₃·Z₁X₂Z₃ and its reverse cancel
        assert_eq!(brute.count(2, 0b011), 0);
        assert_eq!(brute.count(2, 0b101), 2);
    }

    #[test]
    fn operator_identity_holds_densely() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=3);
            let h = random_hamiltonian(&mut rng, n, m);
            let ell = rng.gen_range(0..=4);
            let coeffs: Vec<f64> = (0..=ell).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mps = PilotMps::build(&h, &coeffs, 20).unwrap();
            let dim = 1 << n;
            let mut got = CMatrix::zeros(dim, dim);
            for y in 0u64..(1 << m) {
                let yv = BitVec::from_u64(m, y);
                let amp = mps.amplitude(&yv);
                if amp == 0.0 {
                    continue;
                }
                let mut ph = Phase::ONE;
                let mut w = PauliWord::identity(n);
                let mut s = 1.0;
                for i in yv.iter_ones() {
                    let (p, nw) = w.mul(&h.term(i).word).unwrap();
                    ph = ph * p;
                    w = nw;
                    s *= h.term(i).sign as f64;
                }
                add_scaled_pauli(&mut got, &w, ph.to_complex() * (s * amp));
            }
            let want = poly_of_hamiltonian(&h, &coeffs).unwrap();
            assert!(max_abs_diff(&got, &want) < 1e-10 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn component_order_does_not_change_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hamiltonian(&mut rng, 4, 8);
        let g = AnticommGraph::from_hamiltonian(&h);
        let coeffs = vec![0.1, 0.7, -0.4, 0.3];
        let r = g.components().len();
        let fwd: Vec<usize> = (0..r).collect();
        let rev: Vec<usize> = (0..r).rev().collect();
        let a = PilotMps::build_from_graph(&g, &coeffs, 20, &fwd).unwrap();
        let b = PilotMps::build_from_graph(&g, &coeffs, 20, &rev).unwrap();
        for y in 0u64..256 {
            let yv = BitVec::from_u64(8, y);
            assert!((a.amplitude(&yv) - b.amplitude(&yv)).abs() < 1e-12);
        }
        assert!((a.norm - b.norm).abs() < 1e-12);
        assert!(a.to_json()["sites"].as_array().unwrap().len() == r);
    }

    #[test]
    fn oversized_components_are_refused() {
        let edges: Vec<(usize, usize)> = (0..24).map(|i| (i, i + 1)).collect();
        let g = AnticommGraph::from_edges(25, &edges).unwrap();
        assert!(matches!(
            PilotMps::build_from_graph(&g, &[1.0, 1.0], 20, &[0]),
            Err(HdqiError::ComponentTooLarge { size: 25, cap: 20 })
        ));
    }
}
