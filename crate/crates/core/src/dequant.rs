//! Classical samplers for commuting Pauli Hamiltonians.
//!
//! A commuting `H` is conjugated by a Clifford into `Σ vᵢ' Z^{a⁽ⁱ⁾}`. Its eigenstates
//! are labelled by `e ∈ F₂^m` (`eᵢ = 1` iff term `i` contributes `−1`), subject to one
//! parity constraint per product relation, and have energy `m − 2|e|`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SymplecticCode;
use crate::decoders::derive_seed;
use crate::dense::{add_scaled_pauli, CMatrix};
use crate::error::{HdqiError, Result};
use crate::gf2::{BitMatrix, BitVec, IncrementalBasis};
use crate::pauli::{Pauli1, PauliHamiltonian, PauliWord, Phase};
use crate::poly::relation_of;

/// Single- and two-qubit Clifford generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Cx(usize, usize),
}

/// `(sign, x, z)` with `sign = true` meaning `−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SignedSymp {
    neg: bool,
    x: BitVec,
    z: BitVec,
}

impl SignedSymp {
    fn of(sign: i8, w: &PauliWord) -> Self {
        Self {
            neg: sign < 0,
            x: w.x_part().clone(),
            z: w.z_part().clone(),
        }
    }

    fn into_term(self) -> (i8, PauliWord) {
        let w = PauliWord::new(self.x, self.z).expect("lengths agree");
        (if self.neg { -1 } else { 1 }, w)
    }

    /// `U P U†` for `U = gate`.
    fn conjugate(&mut self, g: Gate) {
        match g {
            Gate::H(q) => {
                let (x, z) = (self.x.get(q), self.z.get(q));
                self.neg ^= x & z;
                self.x.set(q, z);
                self.z.set(q, x);
            }
            Gate::S(q) => {
                let (x, z) = (self.x.get(q), self.z.get(q));
                self.neg ^= x & z;
                self.z.set(q, z ^ x);
            }
            Gate::Cx(a, b) => {
                let (xa, za, xb, zb) = (self.x.get(a), self.z.get(a), self.x.get(b), self.z.get(b));
                self.neg ^= xa & zb & !(xb ^ za);
                self.x.set(b, xb ^ xa);
                self.z.set(a, za ^ zb);
            }
        }
    }

    /// `U† P U` for `U = gate`.
    fn conjugate_inverse(&mut self, g: Gate) {
        match g {
            Gate::S(q) => {
                let (x, z) = (self.x.get(q), self.z.get(q));
                self.neg ^= x & !z;
                self.z.set(q, z ^ x);
            }
            other => self.conjugate(other),
        }
    }
}

/// `U (s·P) U†` for `U` the gate sequence, first gate applied first.
pub fn apply_gates(gates: &[Gate], sign: i8, w: &PauliWord) -> (i8, PauliWord) {
    let mut p = SignedSymp::of(sign, w);
    for &g in gates {
        p.conjugate(g);
    }
    p.into_term()
}

/// Clifford diagonalising a commuting set, with per-term images `vᵢ' Z^{a⁽ⁱ⁾}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalizationResult {
    pub n: usize,
    /// `U` as a gate sequence, first gate applied first.
    pub gates: Vec<Gate>,
    pub a_vectors: Vec<BitVec>,
    /// `vᵢ` times the conjugation sign of term `i`.
    pub folded_signs: Vec<i8>,
}

impl DiagonalizationResult {
    /// `U (s·P) U†`.
    pub fn conjugate(&self, sign: i8, w: &PauliWord) -> (i8, PauliWord) {
        apply_gates(&self.gates, sign, w)
    }

    /// `U† (s·P) U`.
    pub fn conjugate_inverse(&self, sign: i8, w: &PauliWord) -> (i8, PauliWord) {
        let mut p = SignedSymp::of(sign, w);
        for &g in self.gates.iter().rev() {
            p.conjugate_inverse(g);
        }
        p.into_term()
    }

    /// Symplectic part of `U`; column `j` is the image of basis vector `j` (X-first).
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let n = self.n;
        let cols: Vec<BitVec> = (0..2 * n)
            .map(|j| {
                let e = BitVec::from_indices(2 * n, &[j]);
                let w = PauliWord::from_symp(&e).expect("even length");
                self.conjugate(1, &w).1.symp()
            })
            .collect();
        BitMatrix::from_columns(2 * n, &cols)
    }

    /// Dense `U` for `n ≤ 10`.
    pub fn unitary(&self) -> Result<CMatrix> {
        if self.n > 10 {
            return Err(HdqiError::BudgetExceeded {
                what: "dense Clifford qubits",
                needed: self.n as u128,
                limit: 10,
            });
        }
        let dim = 1usize << self.n;
        let mut u = CMatrix::zeros(dim, dim);
        for c in 0..dim {
            let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
            amps[c] = num_complex::Complex64::new(1.0, 0.0);
            let mut st = crate::sim::DenseState::from_amplitudes(self.n, amps)?;
            for &g in &self.gates {
                match g {
                    Gate::H(q) => st.h(q),
                    Gate::S(q) => st.s(q),
                    Gate::Cx(a, b) => st.cx(a, b),
                }
            }
            for (r, a) in st.amplitudes().iter().enumerate() {
                u[(r, c)] = *a;
            }
        }
        Ok(u)
    }
}

/// Simultaneous diagonalisation by pivoting on X support: clear the pivot row to a
/// single `X_q`, rotate it to `Z_q`, then strip `Z_q` from the remaining rows.
pub fn diagonalize_commuting(h: &PauliHamiltonian) -> Result<DiagonalizationResult> {
    if let Some((i, j)) = h.first_anticommuting_pair() {
        return Err(HdqiError::NonCommuting(i, j));
    }
    let n = h.num_qubits();
    let mut basis = IncrementalBasis::new(2 * n);
    let mut rows: Vec<SignedSymp> = Vec::new();
    for t in h.terms() {
        if basis.insert(&t.word.symp()) {
            rows.push(SignedSymp::of(1, &t.word));
        }
    }
    let mut gates = Vec::new();
    let apply = |g: Gate, rows: &mut Vec<SignedSymp>, gates: &mut Vec<Gate>| {
        for r in rows.iter_mut() {
            r.conjugate(g);
        }
        gates.push(g);
    };
    while let Some(p) = rows.iter().position(|r| !r.x.is_zero()) {
        let q = rows[p].x.first_one().expect("nonzero");
        let xs: Vec<usize> = rows[p].x.iter_ones().filter(|&j| j != q).collect();
        for j in xs {
            apply(Gate::Cx(q, j), &mut rows, &mut gates);
        }
        if rows[p].z.get(q) {
            apply(Gate::S(q), &mut rows, &mut gates);
        }
        let zs: Vec<usize> = rows[p].z.iter_ones().filter(|&j| j != q).collect();
        for j in zs {
            // CZ(q, j)
            apply(Gate::H(j), &mut rows, &mut gates);
            apply(Gate::Cx(q, j), &mut rows, &mut gates);
            apply(Gate::H(j), &mut rows, &mut gates);
        }
        apply(Gate::H(q), &mut rows, &mut gates);
        let pivot = rows.remove(p);
        debug_assert!(pivot.x.is_zero() && pivot.z.weight() == 1);
        for r in rows.iter_mut() {
            debug_assert!(!r.x.get(q));
            if r.z.get(q) {
                r.z.xor_assign(&pivot.z);
            }
        }
    }
    let mut res = DiagonalizationResult {
        n,
        gates,
        a_vectors: Vec::new(),
        folded_signs: Vec::new(),
    };
    for t in h.terms() {
        let (s, w) = res.conjugate(t.sign, &t.word);
        debug_assert!(w.x_part().is_zero());
        res.a_vectors.push(w.z_part().clone());
        res.folded_signs.push(s);
    }
    Ok(res)
}

/// Generators and signs of a stabilizer state (or group).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerTableau {
    pub n: usize,
    pub generators: Vec<PauliWord>,
    pub signs: Vec<i8>,
}

impl StabilizerTableau {
    pub fn new(n: usize, generators: Vec<PauliWord>, signs: Vec<i8>) -> Result<Self> {
        if generators.len() != signs.len() {
            return Err(HdqiError::DimensionMismatch {
                expected: generators.len(),
                found: signs.len(),
            });
        }
        let mut basis = IncrementalBasis::new(2 * n);
        for (i, g) in generators.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(HdqiError::DimensionMismatch {
                    expected: n,
                    found: g.num_qubits(),
                });
            }
            if !basis.insert(&g.symp()) {
                return Err(HdqiError::Precondition(format!("generator {i} is dependent")));
            }
            for (j, o) in generators[..i].iter().enumerate() {
                if g.symplectic_product(o) {
                    return Err(HdqiError::NonCommuting(j, i));
                }
            }
        }
        Ok(Self { n, generators, signs })
    }

    pub fn zero_state(n: usize) -> Self {
        let gens = (0..n).map(|q| PauliWord::single(n, q, Pauli1::Z)).collect();
        Self {
            n,
            generators: gens,
            signs: vec![1; n],
        }
    }

    pub fn is_pure(&self) -> bool {
        self.generators.len() == self.n
    }

    /// `⟨P⟩ ∈ {−1, 0, 1}`.
    pub fn expectation(&self, p: &PauliWord) -> i8 {
        if p.is_identity() {
            return 1;
        }
        if self.generators.iter().any(|g| g.symplectic_product(p)) {
            return 0;
        }
        let g = BitMatrix::from_columns(2 * self.n, &self.generators.iter().map(|g| g.symp()).collect::<Vec<_>>());
        let Some(c) = g.solve(&p.symp()) else {
            return 0;
        };
        let mut phase = Phase::ONE;
        let mut word = PauliWord::identity(self.n);
        for i in c.iter_ones() {
            let (ph, w) = word.mul(&self.generators[i]).expect("sizes agree");
            phase = phase * ph;
            if self.signs[i] < 0 {
                phase = phase * Phase::MINUS_ONE;
            }
            word = w;
        }
        debug_assert_eq!(&word, p);
        phase.sign().expect("commuting Hermitian product")
    }

    /// `Π (I + sᵢPᵢ)/2`, normalised to unit trace.
    pub fn density(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n;
        let mut rho = CMatrix::identity(dim, dim);
        for (g, &s) in self.generators.iter().zip(&self.signs) {
            let mut f = CMatrix::identity(dim, dim);
            add_scaled_pauli(&mut f, g, num_complex::Complex64::new(s as f64, 0.0));
            rho = rho * f * num_complex::Complex64::new(0.5, 0.0);
        }
        let tr = rho.trace();
        Ok(rho / tr)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "generators": self.generators.iter().map(|g| g.symp().to_hex()).collect::<Vec<_>>(),
            "sign_bits": self.signs.iter().map(|&s| u8::from(s < 0)).collect::<Vec<_>>(),
        })
    }
}

/// `Σ vᵢ⟨Pᵢ⟩` on a stabilizer state.
pub fn stabilizer_energy(t: &StabilizerTableau, h: &PauliHamiltonian) -> Result<f64> {
    if t.n != h.num_qubits() {
        return Err(HdqiError::DimensionMismatch {
            expected: h.num_qubits(),
            found: t.n,
        });
    }
    Ok(h.terms().iter().map(|term| (term.sign * t.expectation(&term.word)) as f64).sum())
}

/// Largest coset table, in cells.
pub const COSET_TABLE_MAX_CELLS: u128 = 1 << 26;

/// `N(w, i, x)`: number of `y` with weight `w`, `y₁ = … = yᵢ = 0`, and `By = x`.
#[derive(Clone, Debug)]
pub struct CosetTable {
    m: usize,
    k: usize,
    cap: usize,
    /// Column `i` of `B` as a syndrome index; bit `j` is check `j`.
    h: Vec<u64>,
    cells: Vec<BigUint>,
}

impl CosetTable {
    pub fn build(b: &BitMatrix, cap: usize) -> Result<Self> {
        let (k, m) = (b.nrows(), b.ncols());
        let cap = cap.min(m);
        let needed = ((cap + 1) as u128) * ((m + 1) as u128) << k.min(100);
        if k >= 64 || needed > COSET_TABLE_MAX_CELLS {
            return Err(HdqiError::BudgetExceeded {
                what: "coset table cells",
                needed,
                limit: COSET_TABLE_MAX_CELLS,
            });
        }
        let h: Vec<u64> = (0..m)
            .map(|i| (0..k).filter(|&j| b.get(j, i)).fold(0u64, |acc, j| acc | 1 << j))
            .collect();
        let mut t = Self {
            m,
            k,
            cap,
            h,
            cells: vec![BigUint::zero(); needed as usize],
        };
        let last = t.idx(0, m, 0);
        t.cells[last] = BigUint::one();
        for i in (1..=m).rev() {
            let hi = t.h[i - 1];
            for r in 0..=cap {
                for x in 0..1u64 << k {
                    let mut v = t.cells[t.idx(r, i, x)].clone();
                    if r > 0 {
                        v += &t.cells[t.idx(r - 1, i, x ^ hi)];
                    }
                    let dst = t.idx(r, i - 1, x);
                    t.cells[dst] = v;
                }
            }
        }
        Ok(t)
    }

    #[inline]
    fn idx(&self, w: usize, i: usize, x: u64) -> usize {
        ((w * (self.m + 1) + i) << self.k) | x as usize
    }

    pub fn num_bits(&self) -> usize {
        self.m
    }

    pub fn num_checks(&self) -> usize {
        self.k
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn get(&self, w: usize, i: usize, x: u64) -> &BigUint {
        &self.cells[self.idx(w, i, x)]
    }

    pub fn count(&self, w: usize, z: u64) -> BigUint {
        if w > self.cap {
            return BigUint::zero();
        }
        self.get(w, 0, z).clone()
    }

    /// Column `i` of the check matrix as a syndrome index.
    pub fn column(&self, i: usize) -> u64 {
        self.h[i]
    }

    /// Uniform draw from `{y : |y| = w, By = z}` by biased coins along the table.
    pub fn sample<R: Rng + ?Sized>(&self, w: usize, z: u64, rng: &mut R) -> Result<BitVec> {
        if self.count(w, z).is_zero() {
            return Err(HdqiError::EmptyCoset { weight: w });
        }
        let mut y = BitVec::zeros(self.m);
        let (mut r, mut x) = (w, z);
        for i in 1..=self.m {
            if r == 0 {
                break;
            }
            let n0 = self.get(r, i, x);
            let n1 = self.get(r - 1, i, x ^ self.h[i - 1]);
            let total = n0 + n1;
            if rng.gen_biguint_below(&total) >= *n0 {
                y.set(i - 1, true);
                r -= 1;
                x ^= self.h[i - 1];
            }
        }
        debug_assert_eq!(r, 0);
        debug_assert_eq!(x, 0);
        Ok(y)
    }
}

fn syndrome_index(b: &BitMatrix, z: &BitVec) -> Result<u64> {
    if z.len() != b.nrows() {
        return Err(HdqiError::DimensionMismatch {
            expected: b.nrows(),
            found: z.len(),
        });
    }
    Ok(z.iter_ones().fold(0u64, |acc, j| acc | 1 << j))
}

/// Number of weight-`w` vectors with `By = z`.
pub fn coset_count(b: &BitMatrix, w: usize, z: &BitVec) -> Result<BigUint> {
    let t = CosetTable::build(b, w)?;
    Ok(t.count(w, syndrome_index(b, z)?))
}

pub fn coset_sample(b: &BitMatrix, w: usize, z: &BitVec, seed: u64) -> Result<BitVec> {
    let t = CosetTable::build(b, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    t.sample(w, syndrome_index(b, z)?, &mut rng)
}

/// `ln x` for arbitrarily large `x > 0`.
fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Spectral filter applied to eigenvalues `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Filter {
    /// `e^{−βλ}`.
    Gibbs(f64),
    /// Indicator of `λ = E`.
    Micro(i64),
    /// Explicit `λ ↦ f(λ)`; absent energies weigh 0.
    Custom(HashMap<i64, f64>),
}

impl Filter {
    /// `ln f(λ)`, or `None` where `f = 0`.
    pub fn ln_weight(&self, lambda: i64) -> Result<Option<f64>> {
        Ok(match self {
            Filter::Gibbs(beta) => Some(-beta * lambda as f64),
            Filter::Micro(e) => (*e == lambda).then_some(0.0),
            Filter::Custom(map) => match map.get(&lambda) {
                None => None,
                Some(&v) if v < 0.0 || !v.is_finite() => {
                    return Err(HdqiError::NegativeValue { point: lambda, value: v });
                }
                Some(&v) if v == 0.0 => None,
                Some(&v) => Some(v.ln()),
            },
        })
    }
}

/// Exact sampler for `f(H)/Tr f(H)` over stabilizer eigenstates of a commuting `H`.
#[derive(Clone, Debug)]
pub struct SpectralSampler {
    pub diag: DiagonalizationResult,
    /// Terms forming a basis of the span, in index order.
    pub basis_terms: Vec<usize>,
    /// Logical completion in the original frame.
    pub logicals: Vec<PauliWord>,
    /// Relation parity checks on `e` (`k × m`).
    pub relations: BitMatrix,
    /// Required relation parities.
    pub target: u64,
    pub table: CosetTable,
    /// `p_f(w)` for `w = 0..=m`.
    pub class_probs: Vec<f64>,
    signs: Vec<i8>,
}

impl SpectralSampler {
    pub fn new(h: &PauliHamiltonian, filter: &Filter) -> Result<Self> {
        let diag = diagonalize_commuting(h)?;
        let n = h.num_qubits();
        let m = h.num_terms();
        let code = SymplecticCode::from_hamiltonian(h);
        let kernel = code.kernel_basis();
        let mut target = 0u64;
        for (j, y) in kernel.iter().enumerate() {
            if relation_of(h, y)?.sign < 0 {
                target |= 1 << j;
            }
        }
        let relations = if kernel.is_empty() {
            BitMatrix::zeros(0, m)
        } else {
            BitMatrix::from_rows(m, kernel)
        };
        let table = CosetTable::build(&relations, m)?;

        let mut ln_w = vec![None; m + 1];
        for (w, slot) in ln_w.iter_mut().enumerate() {
            let count = table.count(w, target);
            if count.is_zero() {
                continue;
            }
            if let Some(lf) = filter.ln_weight(m as i64 - 2 * w as i64)? {
                *slot = Some(lf + big_ln(&count));
            }
        }
        let max = ln_w.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(HdqiError::ZeroNorm("filtered spectrum"));
        }
        let unnorm: Vec<f64> = ln_w.iter().map(|l| l.map_or(0.0, |l| (l - max).exp())).collect();
        let total: f64 = unnorm.iter().sum();
        let class_probs = unnorm.iter().map(|p| p / total).collect();

        let mut basis = IncrementalBasis::new(2 * n);
        let basis_terms: Vec<usize> = (0..m).filter(|&i| basis.insert(&h.term(i).word.symp())).collect();
        let mut zspan = IncrementalBasis::new(n);
        for &i in &basis_terms {
            zspan.insert(&diag.a_vectors[i]);
        }
        let mut logicals = Vec::new();
        for q in 0..n {
            if zspan.insert(&BitVec::from_indices(n, &[q])) {
                let (s, w) = diag.conjugate_inverse(1, &PauliWord::single(n, q, Pauli1::Z));
                debug_assert_eq!(s, 1, "inverse image of Z_q kept as an unsigned word");
                logicals.push(w);
            }
        }
        Ok(Self {
            diag,
            basis_terms,
            logicals,
            relations,
            target,
            table,
            class_probs,
            signs: h.signs(),
        })
    }

    pub fn num_terms(&self) -> usize {
        self.signs.len()
    }

    /// Degeneracy count `Δ(w)` of valid sign patterns.
    pub fn class_count(&self, w: usize) -> BigUint {
        self.table.count(w, self.target)
    }

    /// Draws `e` and the tableau of a matching eigenstate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(BitVec, StabilizerTableau)> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut w = self.class_probs.iter().rposition(|&p| p > 0.0).expect("normalised");
        for (i, &p) in self.class_probs.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                w = i;
                break;
            }
        }
        let e = self.table.sample(w, self.target, rng)?;
        Ok((e.clone(), self.tableau_for(&e, rng)))
    }

    /// Eigenstate with pattern `e`; logical signs drawn uniformly.
    pub fn tableau_for<R: Rng + ?Sized>(&self, e: &BitVec, rng: &mut R) -> StabilizerTableau {
        let n = self.diag.n;
        let mut gens = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for &i in &self.basis_terms {
            gens.push(self.term_word(i));
            let s = self.signs[i] * if e.get(i) { -1 } else { 1 };
            signs.push(s);
        }
        for l in &self.logicals {
            gens.push(l.clone());
            signs.push(if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        StabilizerTableau { n, generators: gens, signs }
    }

    fn term_word(&self, i: usize) -> PauliWord {
        // recover Pᵢ from its diagonal image
        let (s, w) = self.diag.conjugate_inverse(1, &PauliWord::new(BitVec::zeros(self.diag.n), self.diag.a_vectors[i].clone()).expect("length n"));
        let fold = self.diag.folded_signs[i] * self.signs[i];
        debug_assert_eq!(s, fold);
        w
    }

    /// Exact mixture `Σ_e p(e) ρ_e` for small `n`; logical signs averaged.
    pub fn exact_mixture(&self) -> Result<CMatrix> {
        let m = self.num_terms();
        let n = self.diag.n;
        if m > 20 || n > 8 {
            return Err(HdqiError::BudgetExceeded {
                what: "exact mixture enumeration",
                needed: m as u128,
                limit: 20,
            });
        }
        let dim = 1usize << n;
        let mut out = CMatrix::zeros(dim, dim);
        for bits in 0..1u64 << m {
            let e = BitVec::from_u64(m, bits);
            let syn = self.relations.mul_vec(&e)?;
            if syn.iter_ones().fold(0u64, |a, j| a | 1 << j) != self.target {
                continue;
            }
            let w = e.weight();
            let p = self.class_probs[w];
            if p == 0.0 {
                continue;
            }
            let share = p / big_ln(&self.class_count(w)).exp();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut t = self.tableau_for(&e, &mut rng);
            let nl = self.logicals.len();
            for lbits in 0..1u64 << nl {
                for j in 0..nl {
                    t.signs[n - nl + j] = if lbits >> j & 1 == 1 { -1 } else { 1 };
                }
                let rho = t.density()?;
                out += rho * num_complex::Complex64::new(share / (1u64 << nl) as f64, 0.0);
            }
        }
        Ok(out)
    }
}

/// `samples` tableaus from `f(H)/Tr f(H)`.
pub fn spectral_sample(h: &PauliHamiltonian, filter: &Filter, samples: usize, seed: u64) -> Result<Vec<StabilizerTableau>> {
    let s = SpectralSampler::new(h, filter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| s.sample(&mut rng).map(|(_, t)| t)).collect()
}

/// Axis states `±X, ±Y, ±Z` indexed `0..6` as `2·axis + (sign < 0)`.
pub type Axis = u8;

fn axis_perm_h() -> [Axis; 6] {
    // X ↔ Z, Y → −Y
    [4, 5, 3, 2, 0, 1]
}

fn axis_perm_s() -> [Axis; 6] {
    // X → Y, Y → −X, Z → Z
    [2, 3, 1, 0, 4, 5]
}

/// The 24 single-qubit Cliffords as permutations of the axis states.
pub fn single_qubit_cliffords() -> Vec<[Axis; 6]> {
    let id: [Axis; 6] = [0, 1, 2, 3, 4, 5];
    let gens = [axis_perm_h(), axis_perm_s()];
    let mut seen: HashSet<[Axis; 6]> = HashSet::from([id]);
    let mut order = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let next: [Axis; 6] = std::array::from_fn(|a| g[p[a] as usize]);
            if seen.insert(next) {
                order.push(next);
                queue.push_back(next);
            }
        }
    }
    order
}

fn axis_expectation(axis: Axis, p: Pauli1) -> i8 {
    let t = match p {
        Pauli1::I => return 1,
        Pauli1::X => 0,
        Pauli1::Y => 1,
        Pauli1::Z => 2,
    };
    if axis / 2 != t {
        0
    } else if axis % 2 == 0 {
        1
    } else {
        -1
    }
}

fn axis_word(n: usize, q: usize, axis: Axis) -> (PauliWord, i8) {
    let p = [Pauli1::X, Pauli1::Y, Pauli1::Z][(axis / 2) as usize];
    (PauliWord::single(n, q, p), if axis % 2 == 0 { 1 } else { -1 })
}

pub fn product_tableau(axes: &[Axis]) -> StabilizerTableau {
    let n = axes.len();
    let (gens, signs) = axes.iter().enumerate().map(|(q, &a)| axis_word(n, q, a)).unzip();
    StabilizerTableau { n, generators: gens, signs }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub steps: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub restarts: usize,
}

impl SaSchedule {
    pub fn geometric(steps: usize) -> Self {
        Self {
            steps,
            t_start: 2.0,
            t_end: 0.01,
            restarts: 20,
        }
    }

    pub fn temperature(&self, step: usize) -> f64 {
        if self.steps <= 1 {
            return self.t_end;
        }
        let f = step as f64 / (self.steps - 1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaResult {
    pub best: StabilizerTableau,
    pub energy: f64,
    /// `(m + E)/(2m)`.
    pub ratio: f64,
    /// Best energy per restart.
    pub restart_energies: Vec<f64>,
    /// Current energy of the winning restart, sampled about 200 times per run.
    pub trace: Vec<f64>,
}

/// Metropolis maximisation of `⟨H⟩` over product stabilizer states, starting at `|0ⁿ⟩`.
pub fn clifford_sa(h: &PauliHamiltonian, schedule: &SaSchedule, seed: u64) -> Result<SaResult> {
    if schedule.restarts == 0 || !(schedule.t_start > 0.0 && schedule.t_end > 0.0) {
        return Err(HdqiError::InvalidParameter("annealing needs restarts and positive temperatures".into()));
    }
    let n = h.num_qubits();
    let m = h.num_terms();
    let factors: Vec<Vec<(usize, Pauli1)>> = h
        .terms()
        .iter()
        .map(|t| t.word.support().into_iter().map(|q| (q, t.word.get(q))).collect())
        .collect();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, f) in factors.iter().enumerate() {
        for &(q, _) in f {
            touching[q].push(t);
        }
    }
    let signs: Vec<f64> = h.signs().iter().map(|&s| s as f64).collect();
    let cliffords = single_qubit_cliffords();
    let term_value = |axes: &[Axis], t: usize| -> i8 { factors[t].iter().map(|&(q, p)| axis_expectation(axes[q], p)).product() };
    let trace_every = (schedule.steps / 200).max(1);

    let runs: Vec<(f64, Vec<Axis>, Vec<f64>)> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64, 0x5a));
            let mut axes: Vec<Axis> = vec![4; n];
            let mut vals: Vec<i8> = (0..m).map(|t| term_value(&axes, t)).collect();
            let mut energy: f64 = vals.iter().zip(&signs).map(|(&v, s)| v as f64 * s).sum();
            let (mut best, mut best_axes) = (energy, axes.clone());
            let mut trace = Vec::new();
            let mut fresh: Vec<i8> = Vec::new();
            for step in 0..schedule.steps {
                let temp = schedule.temperature(step);
                let q = rng.gen_range(0..n);
                let c = &cliffords[rng.gen_range(0..cliffords.len())];
                let old = axes[q];
                let new = c[old as usize];
                if new != old {
                    axes[q] = new;
                    fresh.clear();
                    let mut delta = 0.0;
                    for &t in &touching[q] {
                        let v = term_value(&axes, t);
                        delta += signs[t] * (v - vals[t]) as f64;
                        fresh.push(v);
                    }
                    if delta >= 0.0 || rng.gen::<f64>() < (delta / temp).exp() {
                        for (&t, &v) in touching[q].iter().zip(&fresh) {
                            vals[t] = v;
                        }
                        energy += delta;
                        if energy > best {
                            best = energy;
                            best_axes.clone_from(&axes);
                        }
                    } else {
                        axes[q] = old;
                    }
                }
                if step % trace_every == 0 {
                    trace.push(energy);
                }
            }
            (best, best_axes, trace)
        })
        .collect();
    let restart_energies: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (energy, axes, trace) = runs
        .into_iter()
        .fold(None::<(f64, Vec<Axis>, Vec<f64>)>, |acc, r| match acc {
            Some(a) if a.0 >= r.0 => Some(a),
            _ => Some(r),
        })
        .expect("at least one restart");
    Ok(SaResult {
        best: product_tableau(&axes),
        energy,
        ratio: (m as f64 + energy) / (2.0 * m as f64),
        restart_energies,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{hamiltonian_matrix, max_abs_diff, pauli_matrix};
    use crate::pauli::SignedTerm;
    use nalgebra::SymmetricEigen;
    use num_complex::Complex64;

    fn random_commuting(rng: &mut ChaCha8Rng, n: usize, m: usize) -> PauliHamiltonian {
        // conjugate random Z-type words by a random Clifford circuit
        let mut gates = Vec::new();
        for _ in 0..4 * n {
            let q = rng.gen_range(0..n);
            gates.push(match rng.gen_range(0..3) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                _ => {
                    let r = (q + rng.gen_range(1..n.max(2))) % n;
                    if r == q {
                        Gate::H(q)
                    } else {
                        Gate::Cx(q, r)
                    }
                }
            });
        }
        let u = DiagonalizationResult {
            n,
            gates,
            a_vectors: vec![],
            folded_signs: vec![],
        };
        let mut terms: Vec<SignedTerm> = Vec::new();
        while terms.len() < m {
            let z = BitVec::random(n, rng);
            if z.is_zero() {
                continue;
            }
            let (_, w) = u.conjugate(1, &PauliWord::new(BitVec::zeros(n), z).unwrap());
            if terms.iter().any(|t| t.word == w) {
                continue;
            }
            terms.push(SignedTerm::new(if rng.gen_bool(0.5) { 1 } else { -1 }, w).unwrap());
        }
        PauliHamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn gate_rules_match_dense_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [Gate::H(0), Gate::S(1), Gate::Cx(0, 1), Gate::Cx(1, 0)] {
            let d = DiagonalizationResult {
                n: 2,
                gates: vec![g],
                a_vectors: vec![],
                folded_signs: vec![],
            };
            let u = d.unitary().unwrap();
            for _ in 0..16 {
                let p = PauliWord::random(2, &mut rng);
                let lhs = &u * pauli_matrix(&p).unwrap() * u.adjoint();
                let (s, w) = d.conjugate(1, &p);
                let rhs = pauli_matrix(&w).unwrap() * Complex64::new(s as f64, 0.0);
                assert!(max_abs_diff(&lhs, &rhs) < 1e-12, "{g:?} {p}");
                let (s2, w2) = d.conjugate_inverse(s, &w);
                assert_eq!((s2, w2), (1, p));
            }
        }
    }

    #[test]
    fn diagonalization_examples() {
        let h = PauliHamiltonian::from_strs(&[(1, "ZZ"), (-1, "IZ")]).unwrap();
        let d = diagonalize_commuting(&h).unwrap();
        assert!(d.gates.is_empty());
        assert_eq!(d.folded_signs, vec![1, -1]);
        let x = PauliHamiltonian::from_strs(&[(1, "X")]).unwrap();
        let d = diagonalize_commuting(&x).unwrap();
        assert_eq!(d.gates, vec![Gate::H(0)]);
        assert_eq!(d.a_vectors[0], BitVec::from_indices(1, &[0]));
        let bad = PauliHamiltonian::from_strs(&[(1, "X"), (1, "Z")]).unwrap();
        assert!(diagonalize_commuting(&bad).is_err());
    }

    fn sorted_eigs(m: &CMatrix) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().cloned().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonalization_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..10 {
                let h = random_commuting(&mut rng, n, (n + 1).min((1 << n) - 1));
                let d = diagonalize_commuting(&h).unwrap();
                let u = d.unitary().unwrap();
                let hm = hamiltonian_matrix(&h).unwrap();
                let conj = &u * &hm * u.adjoint();
                let dim = 1 << n;
                for r in 0..dim {
                    for c in 0..dim {
                        if r != c {
                            assert!(conj[(r, c)].norm() < 1e-12);
                        }
                    }
                }
                let diag_h = PauliHamiltonian::new(
                    n,
                    d.a_vectors
                        .iter()
                        .zip(&d.folded_signs)
                        .map(|(a, &s)| SignedTerm::new(s, PauliWord::new(BitVec::zeros(n), a.clone()).unwrap()).unwrap())
                        .collect(),
                )
                .unwrap();
                let e1 = sorted_eigs(&hm);
                let e2 = sorted_eigs(&hamiltonian_matrix(&diag_h).unwrap());
                assert!(e1.iter().zip(&e2).all(|(a, b)| (a - b).abs() < 1e-9));
                assert!(max_abs_diff(&conj, &hamiltonian_matrix(&diag_h).unwrap()) < 1e-12);
                assert!(crate::symplectic::is_symplectic(&d.symplectic_matrix()));
            }
        }
    }

    fn brute_count(b: &BitMatrix, w: usize, z: &BitVec) -> u64 {
        let m = b.ncols();
        (0..1u64 << m)
            .filter(|&y| {
                let v = BitVec::from_u64(m, y);
                v.weight() == w && &b.mul_vec(&v).unwrap() == z
            })
            .count() as u64
    }

    #[test]
    fn coset_count_examples() {
        let none = BitMatrix::zeros(0, 5);
        for w in 0..=5 {
            let c = coset_count(&none, w, &BitVec::zeros(0)).unwrap();
            assert_eq!(c, BigUint::from(crate::combinatorics::binomial_u128(5, w) as u64));
        }
        let ones = BitMatrix::from_rows(4, vec![BitVec::from_indices(4, &[0, 1, 2, 3])]);
        assert_eq!(coset_count(&ones, 2, &BitVec::zeros(1)).unwrap(), BigUint::from(6u32));
        assert_eq!(coset_count(&ones, 1, &BitVec::zeros(1)).unwrap(), BigUint::zero());
        assert!(matches!(coset_sample(&ones, 1, &BitVec::zeros(1), 0), Err(HdqiError::EmptyCoset { .. })));
    }

    #[test]
    fn coset_count_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let b = BitMatrix::random(3, 12, &mut rng);
            let t = CosetTable::build(&b, 12).unwrap();
            for w in 0..=12 {
                for zi in 0..8u64 {
                    let z = BitVec::from_u64(3, zi);
                    assert_eq!(t.count(w, zi), BigUint::from(brute_count(&b, w, &z)));
                }
            }
        }
    }

    #[test]
    fn coset_table_recurrence_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = BitMatrix::random(2, 7, &mut rng);
        let t = CosetTable::build(&b, 7).unwrap();
        for x in 0..4 {
            assert_eq!(*t.get(0, 7, x), if x == 0 { BigUint::one() } else { BigUint::zero() });
            for w in 1..=7 {
                assert!(t.get(w, 7, x).is_zero());
            }
        }
        for i in 1..=7 {
            for w in 0..=7 {
                for x in 0..4 {
                    let mut want = t.get(w, i, x).clone();
                    if w > 0 {
                        want += t.get(w - 1, i, x ^ t.column(i - 1));
                    }
                    assert_eq!(*t.get(w, i - 1, x), want);
                }
            }
        }
    }

    #[test]
    fn coset_sampler_is_uniform() {
        let b = BitMatrix::from_rows(8, vec![BitVec::from_indices(8, &[0, 1, 2, 3]), BitVec::from_indices(8, &[2, 3, 4, 5, 6])]);
        let t = CosetTable::build(&b, 8).unwrap();
        let (w, z) = (3usize, 0b01u64);
        let members = t.count(w, z).to_u64().unwrap() as usize;
        assert!(members > 4 && members <= 64);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = 100_000;
        let mut hist: HashMap<BitVec, usize> = HashMap::new();
        for _ in 0..draws {
            let y = t.sample(w, z, &mut rng).unwrap();
            assert_eq!(y.weight(), w);
            assert_eq!(b.mul_vec(&y).unwrap().to_u64(), z);
            *hist.entry(y).or_default() += 1;
        }
        assert_eq!(hist.len(), members);
        let expect = draws as f64 / members as f64;
        let chi2: f64 = hist.values().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // upper 10⁻³ quantile of χ² with ν = members − 1 (Wilson–Hilferty)
        let nu = (members - 1) as f64;
        let zq = 3.090;
        let crit = nu * (1.0 - 2.0 / (9.0 * nu) + zq * (2.0 / (9.0 * nu)).sqrt()).powi(3);
        assert!(chi2 < crit, "chi2 {chi2} crit {crit}");
    }

    #[test]
    fn energy_examples() {
        let h = PauliHamiltonian::from_strs(&[(1, "ZII"), (1, "IZI"), (1, "IIZ")]).unwrap();
        assert_eq!(stabilizer_energy(&StabilizerTableau::zero_state(3), &h).unwrap(), 3.0);
        assert_eq!(stabilizer_energy(&product_tableau(&[0, 0, 0]), &h).unwrap(), 0.0);
    }

    #[test]
    fn energy_matches_dense_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let stab = random_commuting(&mut rng, 3, 3);
            let basis: Vec<usize> = {
                let mut b = IncrementalBasis::new(6);
                (0..3).filter(|&i| b.insert(&stab.term(i).word.symp())).collect()
            };
            if basis.len() < 3 {
                continue;
            }
            let t = StabilizerTableau::new(3, stab.words().cloned().collect(), stab.signs()).unwrap();
            let rho = t.density().unwrap();
            let h = PauliHamiltonian::new(3, (0..5).map(|_| SignedTerm::new(1, PauliWord::random(3, &mut rng)).unwrap()).collect()).unwrap();
            let dense = (&rho * hamiltonian_matrix(&h).unwrap()).trace().re;
            assert!((dense - stabilizer_energy(&t, &h).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn independent_stabilizer_uniform_signs() {
        let h = PauliHamiltonian::from_strs(&[(-1, "XX"), (-1, "ZZ")]).unwrap();
        let s = SpectralSampler::new(&h, &Filter::Custom((-2..=2).map(|l| (l, 1.0)).collect())).unwrap();
        assert_eq!(s.class_probs, vec![0.25, 0.5, 0.25]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hist = [0usize; 4];
        for _ in 0..40_000 {
            let (e, _) = s.sample(&mut rng).unwrap();
            hist[e.to_u64() as usize] += 1;
        }
        assert!(hist.iter().all(|&c| (c as f64 / 40_000.0 - 0.25).abs() < 0.01), "{hist:?}");
    }

    #[test]
    fn cold_gibbs_finds_unique_ground_state() {
        let h = PauliHamiltonian::from_strs(&[(-1, "ZZI"), (-1, "IZZ"), (-1, "XXX")]).unwrap();
        let s = SpectralSampler::new(&h, &Filter::Gibbs(40.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (_, t) = s.sample(&mut rng).unwrap();
            assert_eq!(stabilizer_energy(&t, &h).unwrap(), -3.0);
        }
    }

    #[test]
    fn exact_mixture_equals_filtered_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=4 {
            for extra in 0..3 {
                if n + extra >= 1 << n {
                    continue;
                }
                let h = random_commuting(&mut rng, n, n + extra);
                for filter in [Filter::Gibbs(0.7), Filter::Gibbs(-1.3), Filter::Micro(h.num_terms() as i64 % 2)] {
                    let Ok(s) = SpectralSampler::new(&h, &filter) else {
                        continue;
                    };
                    let mix = s.exact_mixture().unwrap();
                    let want = crate::sim::rho_of_function(&h, |l| {
                        let li = l.round() as i64;
                        filter.ln_weight(li).unwrap().map_or(0.0, f64::exp)
                    })
                    .unwrap();
                    assert!(max_abs_diff(&mix, &want) < 1e-9, "n={n} {filter:?}");
                }
            }
        }
    }

    #[test]
    fn clifford_group_has_24_elements() {
        let g = single_qubit_cliffords();
        assert_eq!(g.len(), 24);
        // each axis state reached by exactly four elements
        for a in 0..6u8 {
            assert_eq!(g.iter().filter(|p| p[4] == a).count(), 4);
        }
    }

    #[test]
    fn sa_solves_field_model() {
        let n = 12;
        let terms: Vec<SignedTerm> = (0..n).map(|q| SignedTerm::new(1, PauliWord::single(n, q, Pauli1::Z)).unwrap()).collect();
        let h = PauliHamiltonian::new(n, terms).unwrap();
        let r = clifford_sa(&h, &SaSchedule::geometric(2000), 1).unwrap();
        assert_eq!(r.energy, n as f64);
        assert_eq!(stabilizer_energy(&r.best, &h).unwrap(), r.energy);
        let y: Vec<SignedTerm> = (0..n).map(|q| SignedTerm::new(-1, PauliWord::single(n, q, Pauli1::Y)).unwrap()).collect();
        let hy = PauliHamiltonian::new(n, y).unwrap();
        let r = clifford_sa(&hy, &SaSchedule::geometric(5000), 2).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(stabilizer_energy(&r.best, &hy).unwrap(), r.energy);
    }
}
