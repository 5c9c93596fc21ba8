//! Hamiltonian generators, defect processes and the component and semicircle experiments.

use std::collections::{BTreeMap, HashMap, HashSet};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SymplecticCode;
use crate::combinatorics::binomial_big;
use crate::decoders::derive_seed;
use crate::dequant::{apply_gates, Filter, Gate, SpectralSampler};
use crate::error::{HdqiError, Result};
use crate::gf2::BitVec;
use crate::noncommuting::AnticommGraph;
use crate::pauli::{Pauli1, PauliHamiltonian, PauliWord, SignedTerm};

/// Default total rejection budget of the greedy sampler.
pub const GREEDY_REJECTION_CAP: u64 = 1_000_000;

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> i8 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

fn random_nontrivial<R: Rng + ?Sized>(rng: &mut R) -> Pauli1 {
    [Pauli1::X, Pauli1::Y, Pauli1::Z][rng.gen_range(0..3)]
}

/// Rejection sampler for `m` distinct, pairwise commuting weight-`k` Paulis.
///
/// Commutation with the accepted set is tested through a per-qubit index, so each
/// candidate costs `O(k · load)` rather than `O(m)`.
pub fn greedy_commuting(n: usize, k: usize, m: usize, seed: u64, rejection_cap: u64) -> Result<PauliHamiltonian> {
    if k == 0 || k > n || m == 0 {
        return Err(HdqiError::InvalidParameter(format!("greedy sampler needs 0 < k ≤ n and m > 0 (n={n}, k={k}, m={m})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut on_qubit: Vec<Vec<(u32, Pauli1)>> = vec![Vec::new(); n];
    let mut seen: HashSet<Vec<(usize, Pauli1)>> = HashSet::new();
    let mut accepted: Vec<Vec<(usize, Pauli1)>> = Vec::with_capacity(m);
    let mut parity: Vec<u8> = Vec::new();
    let mut touched: Vec<u32> = Vec::new();
    let mut rejections = 0u64;
    while accepted.len() < m {
        let mut qs = sample_indices(&mut rng, n, k).into_vec();
        qs.sort_unstable();
        let cand: Vec<(usize, Pauli1)> = qs.into_iter().map(|q| (q, random_nontrivial(&mut rng))).collect();
        let ok = if seen.contains(&cand) {
            false
        } else {
            parity.resize(accepted.len(), 0);
            touched.clear();
            for &(q, p) in &cand {
                for &(t, pt) in &on_qubit[q] {
                    if pt != p {
                        if parity[t as usize] == 0 {
                            touched.push(t);
                        }
                        parity[t as usize] ^= 1;
                    }
                }
            }
            let commutes = touched.iter().all(|&t| parity[t as usize] == 0);
            for &t in &touched {
                parity[t as usize] = 0;
            }
            commutes
        };
        if ok {
            let idx = accepted.len() as u32;
            for &(q, p) in &cand {
                on_qubit[q].push((idx, p));
            }
            seen.insert(cand.clone());
            accepted.push(cand);
        } else {
            rejections += 1;
            if rejections > rejection_cap {
                return Err(HdqiError::RejectionCap(rejection_cap));
            }
        }
    }
    let terms = accepted
        .into_iter()
        .map(|f| {
            let mut w = PauliWord::identity(n);
            for (q, p) in f {
                w.set(q, p);
            }
            SignedTerm::new(random_sign(&mut rng), w)
        })
        .collect::<Result<Vec<_>>>()?;
    PauliHamiltonian::new(n, terms)
}

/// `m × n` incidence of an `(a, b)`-regular bipartite graph: each term touches `a`
/// qubits, each qubit `b` terms. Configuration model, multi-edges repaired by swaps.
pub fn regular_supports<R: Rng + ?Sized>(n: usize, m: usize, a: usize, b: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if m * a != n * b || a == 0 || b == 0 || a > n || b > m {
        return Err(HdqiError::InvalidParameter(format!("no ({a},{b})-regular incidence with {m} terms on {n} qubits")));
    }
    let mut qubit_stubs: Vec<usize> = (0..n).flat_map(|q| std::iter::repeat(q).take(b)).collect();
    qubit_stubs.shuffle(rng);
    // edge e joins term e / a and qubit qubit_stubs[e]
    let term_of = |e: usize| e / a;
    let mut count: HashMap<(usize, usize), u32> = HashMap::new();
    for (e, &q) in qubit_stubs.iter().enumerate() {
        *count.entry((term_of(e), q)).or_default() += 1;
    }
    let mut bad: Vec<usize> = (0..qubit_stubs.len()).filter(|&e| count[&(term_of(e), qubit_stubs[e])] > 1).collect();
    let cap = 100 * qubit_stubs.len() + 1000;
    let mut attempts = 0usize;
    while let Some(&e) = bad.last() {
        let (t, q) = (term_of(e), qubit_stubs[e]);
        if count[&(t, q)] <= 1 {
            bad.pop();
            continue;
        }
        attempts += 1;
        if attempts > cap {
            return Err(HdqiError::RejectionCap(cap as u64));
        }
        let f = rng.gen_range(0..qubit_stubs.len());
        let (t2, q2) = (term_of(f), qubit_stubs[f]);
        if t2 == t || q2 == q || count.contains_key(&(t, q2)) || count.contains_key(&(t2, q)) {
            continue;
        }
        for key in [(t, q), (t2, q2)] {
            let c = count.get_mut(&key).expect("present");
            *c -= 1;
            if *c == 0 {
                count.remove(&key);
            }
        }
        *count.entry((t, q2)).or_default() += 1;
        *count.entry((t2, q)).or_default() += 1;
        qubit_stubs.swap(e, f);
        bad.pop();
    }
    let mut supports = vec![Vec::with_capacity(a); m];
    for (e, &q) in qubit_stubs.iter().enumerate() {
        supports[term_of(e)].push(q);
    }
    for s in &mut supports {
        s.sort_unstable();
        debug_assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
    Ok(supports)
}

/// Spin glass kept in sparse form; `n` may be far beyond dense word sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSpinGlass {
    pub n: usize,
    pub supports: Vec<Vec<usize>>,
    /// `true` for `X^h`, `false` for `Z^h`.
    pub x_type: Vec<bool>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinGlassParams {
    /// Qubits per term.
    pub a: usize,
    /// Terms per qubit.
    pub b: usize,
    pub m: usize,
    pub p: f64,
}

impl SpinGlassParams {
    /// `n = m·a/b`.
    pub fn num_qubits(&self) -> Result<usize> {
        if self.b == 0 || (self.m * self.a) % self.b != 0 {
            return Err(HdqiError::InvalidParameter(format!("m·a = {}·{} is not divisible by b = {}", self.m, self.a, self.b)));
        }
        Ok(self.m * self.a / self.b)
    }

    /// Template degree bound `K = a(b − 1)`.
    pub fn template_degree(&self) -> usize {
        self.a * (self.b.saturating_sub(1))
    }
}

pub fn spin_glass_sparse(params: &SpinGlassParams, seed: u64) -> Result<SparseSpinGlass> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(HdqiError::InvalidParameter(format!("p = {} outside [0, 1]", params.p)));
    }
    let n = params.num_qubits()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let supports = regular_supports(n, params.m, params.a, params.b, &mut rng)?;
    let x_type = (0..params.m).map(|_| rng.gen_bool(params.p)).collect();
    let signs = (0..params.m).map(|_| random_sign(&mut rng)).collect();
    Ok(SparseSpinGlass { n, supports, x_type, signs })
}

impl SparseSpinGlass {
    pub fn num_terms(&self) -> usize {
        self.supports.len()
    }

    pub fn to_hamiltonian(&self) -> Result<PauliHamiltonian> {
        let terms = self
            .supports
            .iter()
            .zip(&self.x_type)
            .zip(&self.signs)
            .map(|((s, &x), &v)| {
                let h = BitVec::from_indices(self.n, s);
                let z = BitVec::zeros(self.n);
                let w = if x { PauliWord::new(h, z)? } else { PauliWord::new(z, h)? };
                SignedTerm::new(v, w)
            })
            .collect::<Result<Vec<_>>>()?;
        PauliHamiltonian::new(self.n, terms)
    }

    /// Terms anticommute iff they differ in type and overlap on an odd number of qubits.
    pub fn anticommutation_graph(&self) -> Result<AnticommGraph> {
        let mut on_qubit: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for (t, s) in self.supports.iter().enumerate() {
            for &q in s {
                on_qubit[q].push(t as u32);
            }
        }
        let mut overlap: HashMap<(u32, u32), u32> = HashMap::new();
        for list in &on_qubit {
            for (i, &s) in list.iter().enumerate() {
                for &t in &list[i + 1..] {
                    if self.x_type[s as usize] != self.x_type[t as usize] {
                        *overlap.entry((s.min(t), s.max(t))).or_default() += 1;
                    }
                }
            }
        }
        let mut edges: Vec<(usize, usize)> = overlap.into_iter().filter(|(_, c)| c % 2 == 1).map(|((s, t), _)| (s as usize, t as usize)).collect();
        edges.sort_unstable();
        AnticommGraph::from_edges(self.num_terms(), &edges)
    }
}

/// Dense spin glass Hamiltonian.
pub fn spin_glass(params: &SpinGlassParams, seed: u64) -> Result<PauliHamiltonian> {
    spin_glass_sparse(params, seed)?.to_hamiltonian()
}

/// `−Σ Z_i Z_{i+1}` around a ring of `l` qubits.
pub fn ising_ring(l: usize) -> Result<PauliHamiltonian> {
    if l < 2 {
        return Err(HdqiError::InvalidParameter("ring needs L ≥ 2".into()));
    }
    let terms = (0..l)
        .map(|i| {
            let z = BitVec::from_indices(l, &[i, (i + 1) % l]);
            SignedTerm::new(-1, PauliWord::new(BitVec::zeros(l), z)?)
        })
        .collect::<Result<Vec<_>>>()?;
    PauliHamiltonian::new(l, terms)
}

/// Toric code on an `l × l` torus, qubits on edges: horizontal edge `(r, c)` is
/// `2(rl + c)`, vertical edge `(r, c)` is `2(rl + c) + 1`. Stars first, then plaquettes;
/// all signs `−1`.
pub fn toric(l: usize) -> Result<PauliHamiltonian> {
    if l < 2 {
        return Err(HdqiError::InvalidParameter("toric code needs L ≥ 2".into()));
    }
    let n = 2 * l * l;
    let hz = |r: usize, c: usize| 2 * ((r % l) * l + c % l);
    let vt = |r: usize, c: usize| 2 * ((r % l) * l + c % l) + 1;
    let mut terms = Vec::with_capacity(n);
    for r in 0..l {
        for c in 0..l {
            let star = [hz(r, c), hz(r, c + l - 1), vt(r, c), vt(r + l - 1, c)];
            terms.push(SignedTerm::new(-1, PauliWord::new(BitVec::from_indices(n, &star), BitVec::zeros(n))?)?);
        }
    }
    for r in 0..l {
        for c in 0..l {
            let plaq = [hz(r, c), hz(r + 1, c), vt(r, c), vt(r, c + 1)];
            terms.push(SignedTerm::new(-1, PauliWord::new(BitVec::zeros(n), BitVec::from_indices(n, &plaq))?)?);
        }
    }
    PauliHamiltonian::new(n, terms)
}

/// Cluster-state stabilizers `−X_v Π_{u∼v} Z_u` on a simple graph.
pub fn cluster(n: usize, edges: &[(usize, usize)]) -> Result<PauliHamiltonian> {
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return Err(HdqiError::InvalidParameter(format!("bad edge ({u}, {v})")));
        }
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let terms = (0..n)
        .map(|v| {
            let x = BitVec::from_indices(n, &[v]);
            let mut z = BitVec::zeros(n);
            for &u in &nbrs[v] {
                z.flip(u);
            }
            SignedTerm::new(-1, PauliWord::new(x, z)?)
        })
        .collect::<Result<Vec<_>>>()?;
    PauliHamiltonian::new(n, terms)
}

pub fn ring_edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// `n` independent commuting generators: `Z₁, …, Z_n` conjugated by a random Clifford circuit.
pub fn independent_stabilizer(n: usize, seed: u64) -> Result<PauliHamiltonian> {
    if n == 0 {
        return Err(HdqiError::InvalidParameter("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::new();
    for _ in 0..4 {
        for q in 0..n {
            match rng.gen_range(0..3) {
                0 => gates.push(Gate::H(q)),
                1 => gates.push(Gate::S(q)),
                _ => {}
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for pair in order.chunks_exact(2) {
            gates.push(Gate::Cx(pair[0], pair[1]));
        }
    }
    let terms = (0..n)
        .map(|q| {
            let (_, w) = apply_gates(&gates, 1, &PauliWord::single(n, q, Pauli1::Z));
            SignedTerm::new(random_sign(&mut rng), w)
        })
        .collect::<Result<Vec<_>>>()?;
    PauliHamiltonian::new(n, terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    GreedyKlocal { n: usize, k: usize, m: usize },
    SpinGlass(SpinGlassParams),
    IsingRing { l: usize },
    Toric { l: usize },
    /// Cluster state on a ring of `n` vertices.
    Cluster { n: usize },
    IndependentStabilizer { n: usize },
}

impl EnsembleSpec {
    pub fn generate(&self, seed: u64) -> Result<PauliHamiltonian> {
        match self {
            EnsembleSpec::GreedyKlocal { n, k, m } => greedy_commuting(*n, *k, *m, seed, GREEDY_REJECTION_CAP),
            EnsembleSpec::SpinGlass(p) => spin_glass(p, seed),
            EnsembleSpec::IsingRing { l } => ising_ring(*l),
            EnsembleSpec::Toric { l } => toric(*l),
            EnsembleSpec::Cluster { n } => cluster(*n, &ring_edges(*n)),
            EnsembleSpec::IndependentStabilizer { n } => independent_stabilizer(*n, seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectRule {
    /// `Z^h → X^h`; every term must be Z-type.
    ZToX,
    /// Replace the factor on a random support qubit by a different nontrivial Pauli.
    RandomSinglePauli,
}

/// Applies `rule` to each term independently with probability `p`.
///
/// Refuses outputs whose symplectic code dimension exceeds the input's: new product
/// relations would change the spectrum structure the defect model assumes.
pub fn defect_apply(h: &PauliHamiltonian, p: f64, rule: DefectRule, seed: u64) -> Result<PauliHamiltonian> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HdqiError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = h.num_qubits();
    let mut terms = Vec::with_capacity(h.num_terms());
    for (i, t) in h.terms().iter().enumerate() {
        if !rng.gen_bool(p) {
            terms.push(t.clone());
            continue;
        }
        let w = match rule {
            DefectRule::ZToX => {
                if !t.word.is_z_type() {
                    return Err(HdqiError::Precondition(format!("term {i} is not Z-type")));
                }
                PauliWord::new(t.word.z_part().clone(), BitVec::zeros(n))?
            }
            DefectRule::RandomSinglePauli => {
                let supp = t.word.support();
                let q = supp[rng.gen_range(0..supp.len())];
                let old = t.word.get(q);
                let choices: Vec<Pauli1> = [Pauli1::X, Pauli1::Y, Pauli1::Z].into_iter().filter(|&p| p != old).collect();
                let mut w = t.word.clone();
                w.set(q, choices[rng.gen_range(0..2)]);
                w
            }
        };
        terms.push(SignedTerm::new(t.sign, w)?);
    }
    let out = PauliHamiltonian::new(n, terms)?;
    let before = SymplecticCode::from_hamiltonian(h).dimension();
    let after = SymplecticCode::from_hamiltonian(&out).dimension();
    if after > before {
        return Err(HdqiError::Precondition(format!("defects raised the code dimension from {before} to {after}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub nodes: usize,
    pub edges: usize,
    pub max_size: usize,
    /// Component size → number of components.
    pub histogram: BTreeMap<usize, usize>,
}

impl ComponentStats {
    pub fn of(g: &AnticommGraph) -> Self {
        let mut histogram = BTreeMap::new();
        for c in g.components() {
            *histogram.entry(c.len()).or_default() += 1;
        }
        Self {
            nodes: g.num_nodes(),
            edges: g.num_edges(),
            max_size: g.max_component(),
            histogram,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub p: f64,
    pub trials: Vec<ComponentStats>,
    pub max_over_trials: usize,
    pub mean_max: f64,
    /// `mean_max / ln m`.
    pub log_fit: f64,
}

/// Anticommutation component sizes over independent trials.
///
/// Spin glasses are built sparsely with defect probability `p` (overriding `params.p`);
/// other ensembles are generated densely and defected by single-qubit replacement.
pub fn component_experiment(spec: &EnsembleSpec, p: f64, trials: usize, seed: u64) -> Result<ComponentSummary> {
    let stats: Vec<ComponentStats> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t as u64, 0xc0);
            let g = match spec {
                EnsembleSpec::SpinGlass(params) => spin_glass_sparse(&SpinGlassParams { p, ..*params }, s)?.anticommutation_graph()?,
                other => {
                    let h = other.generate(s)?;
                    let d = defect_apply(&h, p, DefectRule::RandomSinglePauli, derive_seed(s, 1, 0))?;
                    AnticommGraph::from_hamiltonian(&d)
                }
            };
            Ok(ComponentStats::of(&g))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_over_trials = stats.iter().map(|s| s.max_size).max().unwrap_or(0);
    let mean_max = stats.iter().map(|s| s.max_size as f64).sum::<f64>() / stats.len().max(1) as f64;
    let m = stats.first().map_or(1, |s| s.nodes).max(2);
    Ok(ComponentSummary {
        p,
        trials: stats,
        max_over_trials,
        mean_max,
        log_fit: mean_max / (m as f64).ln(),
    })
}

pub fn component_csv(summary: &ComponentSummary) -> String {
    let mut s = String::from("trial,nodes,edges,max_component\n");
    for (i, t) in summary.trials.iter().enumerate() {
        s.push_str(&format!("{i},{},{},{}\n", t.nodes, t.edges, t.max_size));
    }
    s
}

/// Asymptotic satisfied fraction `(√(ℓ/2m) + √(1/2 − ℓ/2m))²`, and 1 once `ℓ/m ≥ 1/2`.
pub fn semicircle_predict(ell: usize, m: usize) -> f64 {
    if 2 * ell >= m {
        return 1.0;
    }
    let r = ell as f64 / m as f64;
    ((r / 2.0).sqrt() + (0.5 - r / 2.0).sqrt()).powi(2)
}

/// `(λ_max, v)` of the tridiagonal form with off-diagonals `√((j+1)(m−j))`, `j < ℓ`.
pub fn optimal_weights(ell: usize, m: usize) -> (f64, Vec<f64>) {
    let d = ell.min(m) + 1;
    let a = DMatrix::from_fn(d, d, |r, c| {
        if r + 1 == c || c + 1 == r {
            let j = r.min(c);
            (((j + 1) * (m - j)) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(a);
    let (i, &lmax) = eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty");
    let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().cloned().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (lmax, v)
}

/// `½ + λ_max / 2m`: exact satisfied fraction for `m` independent terms under optimal weights.
pub fn optimal_ratio(ell: usize, m: usize) -> f64 {
    0.5 + optimal_weights(ell, m).0 / (2.0 * m as f64)
}

/// `K_k(w; m) = Σ_j (−1)^j C(w, j) C(m − w, k − j)`: the degree-`k` elementary symmetric
/// polynomial of `m` signs with `w` of them negative.
pub fn krawtchouk(k: usize, w: usize, m: usize) -> BigInt {
    let mut s = BigInt::zero();
    for j in 0..=k.min(w) {
        if k - j > m - w {
            continue;
        }
        let t = BigInt::from(binomial_big(w, j)) * BigInt::from(binomial_big(m - w, k - j));
        if j % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

/// `λ ↦ 𝒫(λ)²` with `𝒫 = Σ_k c_k K_k / √C(m, k)`.
pub fn semicircle_filter(weights: &[f64], m: usize) -> Filter {
    let mut map = HashMap::new();
    for w in 0..=m {
        let val: f64 = weights
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let binom = binomial_big(m, k).to_f64().unwrap_or(f64::INFINITY);
                c * krawtchouk(k, w, m).to_f64().unwrap_or(f64::NAN) / binom.sqrt()
            })
            .sum();
        map.insert(m as i64 - 2 * w as i64, val * val);
    }
    Filter::Custom(map)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemicircleMeasurement {
    pub m: usize,
    pub ell: usize,
    pub predicted: f64,
    /// `(m + ⟨λ⟩)/2m` from the exact class distribution.
    pub exact: f64,
    /// Same quantity from `samples` draws.
    pub measured: f64,
    pub samples: usize,
}

/// Satisfied fraction under `𝒫(H)²` with optimal weights, by classical spectral sampling.
pub fn semicircle_experiment(h: &PauliHamiltonian, ell: usize, samples: usize, seed: u64) -> Result<SemicircleMeasurement> {
    let m = h.num_terms();
    let (_, c) = optimal_weights(ell, m);
    let sampler = SpectralSampler::new(h, &semicircle_filter(&c, m))?;
    let ratio = |lambda: f64| (m as f64 + lambda) / (2.0 * m as f64);
    let exact_lambda: f64 = sampler.class_probs.iter().enumerate().map(|(w, p)| p * (m as f64 - 2.0 * w as f64)).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let (e, _) = sampler.sample(&mut rng)?;
        total += m as f64 - 2.0 * e.weight() as f64;
    }
    Ok(SemicircleMeasurement {
        m,
        ell,
        predicted: semicircle_predict(ell, m),
        exact: ratio(exact_lambda),
        measured: ratio(total / samples.max(1) as f64),
        samples,
    })
}
