//! Dense statevector execution of the interferometry circuit.
//!
//! Register layout is `A (m qubits) ⊗ B (n) ⊗ C (n)`; a basis index is
//! `a·4ⁿ + b·2ⁿ + c` and within each register qubit `j` is the bit
//! `len−1−j` (big-endian, as in [`crate::dense`]).

use nalgebra::{Complex, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decoders::SyndromeDecoder;
use crate::dense::{poly_of_hamiltonian, CMatrix};
use crate::error::{HdqiError, Result};
use crate::gf2::BitVec;
use crate::noncommuting::{PilotMps, DEFAULT_COMPONENT_CAP};
use crate::pauli::{PauliHamiltonian, PauliWord, Phase};
use crate::poly::{blockwise_expand, relations_from_hamiltonian, symmetric_weights, BlockExpansion, UniPoly};

/// Largest total qubit count `m + 2n` the simulator accepts.
pub const MAX_SIM_QUBITS: usize = 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(HdqiError::DimensionMismatch {
                expected: 1 << num_qubits,
                found: amps.len(),
            });
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    pub fn h(&mut self, q: usize) {
        let b = self.bit(q);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (u, v) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = (u + v) * r;
                self.amps[i | b] = (u - v) * r;
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        let b = self.bit(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & b != 0 {
                *a = -*a;
            }
        }
    }

    pub fn s(&mut self, q: usize) {
        let b = self.bit(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & b != 0 {
                *a *= Complex64::new(0.0, 1.0);
            }
        }
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let (c, t) = (self.bit(control), self.bit(target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (self.bit(a), self.bit(b));
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
    }

    /// Multiplies basis states with both qubits set by `phase`.
    pub fn controlled_phase(&mut self, a: usize, b: usize, phase: Complex64) {
        let mask = self.bit(a) | self.bit(b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp *= phase;
            }
        }
    }

    /// Applies `word` on `targets` (word qubit `j` acts on `targets[j]`),
    /// conditioned on `control` when given.
    pub fn pauli(&mut self, word: &PauliWord, targets: &[usize], control: Option<usize>) {
        assert_eq!(word.num_qubits(), targets.len());
        let mut xm = 0usize;
        let mut zm = 0usize;
        for (j, &q) in targets.iter().enumerate() {
            let (x, z) = word.get(j).bits();
            if x {
                xm |= self.bit(q);
            }
            if z {
                zm |= self.bit(q);
            }
        }
        let base = Phase::from_exponent(word.x_part().and_count(word.z_part()) as i64).to_complex();
        let cm = control.map_or(0, |c| self.bit(c));
        let mut out = self.amps.clone();
        for (i, &a) in self.amps.iter().enumerate() {
            if i & cm != cm {
                continue;
            }
            // P|i⟩ = i^{|x&z|} (−1)^{|z&i|} |i⊕x⟩
            let s = if (zm & i).count_ones() % 2 == 1 { -base } else { base };
            out[i ^ xm] = s * a;
        }
        self.amps = out;
    }

    /// Basis permutation `i ↦ f(i)`; `f` must be a bijection.
    pub fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            out[f(i)] += a;
        }
        self.amps = out;
    }

    /// Reduced density matrix on a contiguous block of qubits `[start, start+len)`.
    pub fn reduced_density(&self, start: usize, len: usize) -> CMatrix {
        let n = self.num_qubits;
        let low = n - start - len;
        let dim = 1usize << len;
        let high = 1usize << start;
        let lowdim = 1usize << low;
        let mut rho = CMatrix::zeros(dim, dim);
        for h in 0..high {
            for l in 0..lowdim {
                let base = (h << (len + low)) | l;
                for r in 0..dim {
                    let a = self.amps[base | (r << low)];
                    if a == ZERO {
                        continue;
                    }
                    for c in 0..dim {
                        rho[(r, c)] += a * self.amps[base | (c << low)].conj();
                    }
                }
            }
        }
        rho
    }
}

/// Bell-pair preparation `|0…0⟩ ↦ |Φⁿ⟩` across the qubit pairs `(b[i], c[i])`.
pub fn prepare_bell_pairs(state: &mut DenseState, b: &[usize], c: &[usize]) {
    for (&bi, &ci) in b.iter().zip(c) {
        state.h(bi);
        state.cx(bi, ci);
    }
}

/// Coherent Bell measurement: `(P ⊗ I)|Φⁿ⟩ ↦ |x⟩_B |z⟩_C` with `symp(P) = (x | z)`.
///
/// Per pair: CX, H, a phase of `i` on `|11⟩` (fixes the `i` carried by `Y`),
/// then a swap so that the X bit lands in B.
pub fn bell_transform(state: &mut DenseState, b: &[usize], c: &[usize]) {
    for (&bi, &ci) in b.iter().zip(c) {
        state.cx(bi, ci);
        state.h(bi);
        state.controlled_phase(bi, ci, Complex64::new(0.0, 1.0));
        state.swap(bi, ci);
    }
}

pub fn bell_transform_inverse(state: &mut DenseState, b: &[usize], c: &[usize]) {
    for (&bi, &ci) in b.iter().zip(c) {
        state.swap(bi, ci);
        state.controlled_phase(bi, ci, Complex64::new(0.0, -1.0));
        state.h(bi);
        state.cx(bi, ci);
    }
}

/// `𝒫²(H) / Tr 𝒫²(H)` evaluated densely.
pub fn rho_direct(h: &PauliHamiltonian, coeffs: &[f64]) -> Result<CMatrix> {
    let p = poly_of_hamiltonian(h, coeffs)?;
    let sq = &p * &p;
    normalise_trace(sq)
}

/// `f(H) / Tr f(H)` for a function of the spectrum.
pub fn rho_of_function(h: &PauliHamiltonian, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let hm = crate::dense::hamiltonian_matrix(h)?;
    let eig = SymmetricEigen::new(hm);
    let vals = eig.eigenvalues.map(|l| Complex64::new(f(l), 0.0));
    let v = &eig.eigenvectors;
    let m = v * CMatrix::from_diagonal(&vals) * v.adjoint();
    normalise_trace(m)
}

fn normalise_trace(m: CMatrix) -> Result<CMatrix> {
    let tr = m.trace().re;
    if !(tr.abs() > 1e-300) {
        return Err(HdqiError::ZeroNorm("trace of the filtered operator"));
    }
    Ok(m / Complex64::new(tr, 0.0))
}

/// `½‖a − b‖₁` from the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = hermitian_part(&(a - b));
    SymmetricEigen::new(d).eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

/// Root fidelity `Tr √(√a b √a)`.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> f64 {
    let sa = psd_sqrt(a);
    let inner = &sa * b * &sa;
    SymmetricEigen::new(hermitian_part(&inner))
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum()
}

/// `(trace distance, fidelity)`.
pub fn distance_metrics(a: &CMatrix, b: &CMatrix) -> Result<(f64, f64)> {
    if a.shape() != b.shape() {
        return Err(HdqiError::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok((trace_distance(a, b), fidelity(a, b)))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let vals = eig.eigenvalues.map(|l| Complex::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&vals) * v.adjoint()
}

/// Hermitian, unit trace and PSD within `tol`.
pub fn is_density_matrix(m: &CMatrix, tol: f64) -> bool {
    let herm = (m - m.adjoint()).iter().all(|x| x.norm() <= tol);
    let tr = (m.trace() - Complex64::new(1.0, 0.0)).norm() <= tol;
    let psd = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().all(|&l| l >= -tol);
    herm && tr && psd
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PilotMode {
    /// Commuting terms, weights `w_{|y|}`.
    Dicke,
    /// Commuting terms with relations; amplitudes `γ_{a(y)}` on free terms.
    Blockwise,
    /// General terms via the matrix-product pilot.
    Mps,
}

/// Normalised pilot amplitudes over `y ∈ F₂^m`, indexed big-endian, without the `vᵢ` signs.
#[derive(Clone, Debug)]
pub struct Pilot {
    pub mode: PilotMode,
    pub amplitudes: Vec<f64>,
    /// Present in blockwise mode.
    pub expansion: Option<BlockExpansion>,
}

fn label_to_bits(a: usize, m: usize) -> BitVec {
    let idx: Vec<usize> = (0..m).filter(|&i| a >> (m - 1 - i) & 1 == 1).collect();
    BitVec::from_indices(m, &idx)
}

fn bits_to_label(v: &BitVec) -> usize {
    let m = v.len();
    v.iter_ones().fold(0, |acc, i| acc | 1 << (m - 1 - i))
}

impl Pilot {
    pub fn new(h: &PauliHamiltonian, coeffs: &[f64], mode: PilotMode) -> Result<Self> {
        let m = h.num_terms();
        if m > MAX_SIM_QUBITS {
            return Err(HdqiError::BudgetExceeded {
                what: "pilot register qubits",
                needed: m as u128,
                limit: MAX_SIM_QUBITS as u128,
            });
        }
        let mut expansion = None;
        let raw: Vec<f64> = match mode {
            PilotMode::Dicke => {
                if let Some((i, j)) = h.first_anticommuting_pair() {
                    return Err(HdqiError::NonCommuting(i, j));
                }
                let w = symmetric_weights(&UniPoly::new(coeffs.to_vec()), m)?.w;
                (0..1usize << m)
                    .map(|a| w.get(a.count_ones() as usize).copied().unwrap_or(0.0))
                    .collect()
            }
            PilotMode::Blockwise => {
                let rel = relations_from_hamiltonian(h)?;
                let e = blockwise_expand(&UniPoly::new(coeffs.to_vec()), m, &rel)?;
                let amps = (0..1usize << m).map(|a| e.amplitude(&label_to_bits(a, m))).collect();
                expansion = Some(e);
                amps
            }
            PilotMode::Mps => {
                let mps = PilotMps::build(h, coeffs, DEFAULT_COMPONENT_CAP)?;
                (0..1usize << m).map(|a| mps.amplitude(&label_to_bits(a, m))).collect()
            }
        };
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(HdqiError::ZeroNorm("pilot state"));
        }
        Ok(Self {
            mode,
            amplitudes: raw.iter().map(|x| x / norm).collect(),
            expansion,
        })
    }
}

/// Result of a circuit run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    /// Reduced state on register B.
    pub rho: CMatrix,
    /// Final pure state on `A ⊗ B ⊗ C`.
    pub state: DenseState,
    /// Norm after each stage.
    pub stage_norms: Vec<f64>,
    /// Probability that register A is not returned to zero.
    pub residual_weight: f64,
}

impl RunOutput {
    pub fn rho_c(&self, m: usize, n: usize) -> CMatrix {
        self.state.reduced_density(m + n, n)
    }
}

/// Full circuit with a prepared pilot.
pub fn hdqi_run_with_pilot(h: &PauliHamiltonian, pilot: &Pilot, decoder: &dyn SyndromeDecoder) -> Result<RunOutput> {
    let n = h.num_qubits();
    let m = h.num_terms();
    let total = m + 2 * n;
    if total > MAX_SIM_QUBITS {
        return Err(HdqiError::BudgetExceeded {
            what: "simulator qubits m + 2n",
            needed: total as u128,
            limit: MAX_SIM_QUBITS as u128,
        });
    }
    if decoder.num_bits() != m {
        return Err(HdqiError::DimensionMismatch {
            expected: m,
            found: decoder.num_bits(),
        });
    }
    let a_q: Vec<usize> = (0..m).collect();
    let b_q: Vec<usize> = (m..m + n).collect();
    let c_q: Vec<usize> = (m + n..m + 2 * n).collect();
    let low = 2 * n;
    let mut norms = Vec::new();

    // 1. pilot on A, |0⟩ on B and C
    let mut amps = vec![ZERO; 1 << total];
    for (a, &p) in pilot.amplitudes.iter().enumerate() {
        amps[a << low] = Complex64::new(p, 0.0);
    }
    let mut st = DenseState::from_amplitudes(total, amps)?;
    norms.push(st.norm());
    // 2. Bell pairs on B, C
    prepare_bell_pairs(&mut st, &b_q, &c_q);
    norms.push(st.norm());
    // 3. signs vᵢ
    for (i, t) in h.terms().iter().enumerate() {
        if t.sign < 0 {
            st.z(a_q[i]);
        }
    }
    // 4. controlled terms, last index first so that P_y is the increasing-order product
    for i in (0..m).rev() {
        st.pauli(&h.term(i).word, &b_q, Some(a_q[i]));
    }
    norms.push(st.norm());
    // 5. Bell measurement, coherently
    bell_transform(&mut st, &b_q, &c_q);
    norms.push(st.norm());
    // 6. syndrome-controlled correction of A
    let table: Vec<usize> = (0..1usize << low)
        .map(|s| {
            let (bb, cc) = (s >> n, s & ((1 << n) - 1));
            let mut bits = Vec::new();
            for i in 0..n {
                if bb >> (n - 1 - i) & 1 == 1 {
                    bits.push(i);
                }
                if cc >> (n - 1 - i) & 1 == 1 {
                    bits.push(n + i);
                }
            }
            let syn = BitVec::from_indices(2 * n, &bits);
            let r = decoder.decode(&syn);
            if r.is_decoded() {
                bits_to_label(&r.error)
            } else {
                0
            }
        })
        .collect();
    let smask = (1usize << low) - 1;
    st.permute(|i| i ^ (table[i & smask] << low));
    norms.push(st.norm());
    // 7. undo the Bell measurement
    bell_transform_inverse(&mut st, &b_q, &c_q);
    norms.push(st.norm());

    let residual_weight: f64 = st
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i >> low != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let rho = st.reduced_density(m, n);
    Ok(RunOutput {
        rho,
        state: st,
        stage_norms: norms,
        residual_weight,
    })
}

pub fn hdqi_run(
    h: &PauliHamiltonian,
    coeffs: &[f64],
    decoder: &dyn SyndromeDecoder,
    mode: PilotMode,
) -> Result<RunOutput> {
    let pilot = Pilot::new(h, coeffs, mode)?;
    hdqi_run_with_pilot(h, &pilot, decoder)
}

/// Decoder for blockwise runs: Gaussian elimination on the free columns.
pub fn blockwise_decoder(
    h: &PauliHamiltonian,
    expansion: &BlockExpansion,
) -> Result<crate::decoders::EmbeddedDecoder<crate::decoders::GeDecoder>> {
    let sub = h.subset(&expansion.free)?;
    let code = crate::code::SymplecticCode::from_hamiltonian(&sub);
    let ge = crate::decoders::GeDecoder::build(&code)?;
    crate::decoders::EmbeddedDecoder::new(ge, expansion.free.clone(), h.num_terms())
}

/// `ρ` as `{"real": [[..]], "imag": [[..]]}`.
pub fn rho_to_json(rho: &CMatrix) -> serde_json::Value {
    let re: Vec<Vec<f64>> = (0..rho.nrows()).map(|r| (0..rho.ncols()).map(|c| rho[(r, c)].re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..rho.nrows()).map(|r| (0..rho.ncols()).map(|c| rho[(r, c)].im).collect()).collect();
    serde_json::json!({ "dim": rho.nrows(), "real": re, "imag": im })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::SymplecticCode;
    use crate::decoders::{FaultyDecoder, LookupDecoder, ZeroDecoder};
    use crate::pauli::SignedTerm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bell_label_examples() {
        for (p, want) in [("I", 0b00), ("X", 0b10), ("Z", 0b01), ("Y", 0b11)] {
            let mut st = DenseState::zero(2);
            prepare_bell_pairs(&mut st, &[0], &[1]);
            st.pauli(&p.parse().unwrap(), &[0], None);
            bell_transform(&mut st, &[0], &[1]);
            for (i, a) in st.amplitudes().iter().enumerate() {
                let expect = if i == want { 1.0 } else { 0.0 };
                assert!((a - c(expect, 0.0)).norm() < 1e-12, "{p}: {:?}", st.amplitudes());
            }
        }
    }

    fn all_words(n: usize) -> Vec<PauliWord> {
        (0..1u64 << (2 * n))
            .map(|v| PauliWord::from_symp(&BitVec::from_u64(2 * n, v)).unwrap())
            .collect()
    }

    #[test]
    fn bell_basis_is_orthonormal_and_labelled_by_symp() {
        for n in 1..=2 {
            let b: Vec<usize> = (0..n).collect();
            let cq: Vec<usize> = (n..2 * n).collect();
            let states: Vec<DenseState> = all_words(n)
                .iter()
                .map(|w| {
                    let mut st = DenseState::zero(2 * n);
                    prepare_bell_pairs(&mut st, &b, &cq);
                    st.pauli(w, &b, None);
                    st
                })
                .collect();
            for (i, s) in states.iter().enumerate() {
                for (j, t) in states.iter().enumerate() {
                    let g = s.inner(t);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - c(want, 0.0)).norm() < 1e-12);
                }
            }
            for (w, s) in all_words(n).iter().zip(&states) {
                let mut st = s.clone();
                bell_transform(&mut st, &b, &cq);
                // label: x bits in B, z bits in C
                let sy = w.symp();
                let mut label = 0usize;
                for i in 0..n {
                    if sy.get(i) {
                        label |= 1 << (2 * n - 1 - i);
                    }
                    if sy.get(n + i) {
                        label |= 1 << (n - 1 - i);
                    }
                }
                assert!((st.amplitudes()[label] - c(1.0, 0.0)).norm() < 1e-12, "{w}");
                bell_transform_inverse(&mut st, &b, &cq);
                for (x, y) in st.amplitudes().iter().zip(s.amplitudes()) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rho_direct_examples() {
        let z = PauliHamiltonian::from_strs(&[(1, "Z")]).unwrap();
        let r = rho_direct(&z, &[0.0, 1.0]).unwrap();
        assert!((r[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15 && (r[(1, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        let zz = PauliHamiltonian::from_strs(&[(1, "ZI"), (1, "IZ")]).unwrap();
        let r = rho_direct(&zz, &[0.0, 1.0]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| r[(i, i)].re).collect();
        assert_eq!(diag, vec![0.5, 0.0, 0.0, 0.5]);
        assert!(rho_direct(&z, &[0.0]).is_err());
        let g = crate::poly::gibbs_poly(1e-9, 2.0, 0.01).unwrap();
        let r = rho_direct(&zz, g.to_poly().coeffs()).unwrap();
        let mixed = CMatrix::identity(4, 4) * c(0.25, 0.0);
        assert!(trace_distance(&r, &mixed) < 0.01);
    }

    #[test]
    fn metric_examples() {
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let zero = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let one = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (td, f) = distance_metrics(&half, &half).unwrap();
        assert!(td.abs() < 1e-12 && (f - 1.0).abs() < 1e-12);
        let (td, f) = distance_metrics(&zero, &one).unwrap();
        assert!((td - 1.0).abs() < 1e-12 && f.abs() < 1e-12);
        let (td, f) = distance_metrics(&half, &zero).unwrap();
        assert!((td - 0.5).abs() < 1e-12);
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    fn random_commuting(rng: &mut ChaCha8Rng, n: usize, m: usize) -> PauliHamiltonian {
        let bases: Vec<char> = (0..n).map(|_| ['X', 'Y', 'Z'][rng.gen_range(0..3)]).collect();
        let mut terms: Vec<SignedTerm> = Vec::new();
        while terms.len() < m {
            let s: String = (0..n).map(|q| if rng.gen_bool(0.5) { bases[q] } else { 'I' }).collect();
            let w: PauliWord = s.parse().unwrap();
            if w.is_identity() || terms.iter().any(|t| t.word == w) {
                continue;
            }
            terms.push(SignedTerm::new(if rng.gen_bool(0.5) { 1 } else { -1 }, w).unwrap());
        }
        PauliHamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn commuting_run_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut done = 0;
        for _ in 0..200 {
            let h = random_commuting(&mut rng, 4, 4);
            let code = SymplecticCode::from_hamiltonian(&h);
            let ell = 2;
            if !code.min_distance_bruteforce(4).unwrap().supports_radius(ell) {
                continue;
            }
            let dec = LookupDecoder::build(&code, ell).unwrap();
            let coeffs = [0.3, -0.8, 0.5];
            let out = hdqi_run(&h, &coeffs, &dec, PilotMode::Dicke).unwrap();
            let want = rho_direct(&h, &coeffs).unwrap();
            assert!(trace_distance(&out.rho, &want) < 1e-9);
            assert!(out.residual_weight < 1e-20);
            assert!(out.stage_norms.iter().all(|x| (x - 1.0).abs() < 1e-12));
            // thermofield-double symmetry
            assert!(trace_distance(&out.rho_c(4, 4), &out.rho.transpose()) < 1e-9);
            done += 1;
            if done == 5 {
                break;
            }
        }
        assert!(done > 0);
    }

    #[test]
    fn fig2_mps_run_matches_direct() {
        let h = PauliHamiltonian::from_strs(&[(1, "XZX"), (1, "ZXZ"), (1, "XII")]).unwrap();
        let code = SymplecticCode::from_hamiltonian(&h);
        assert_eq!(code.min_distance_bruteforce(3).unwrap(), crate::code::Distance::Infinite);
        let dec = LookupDecoder::build(&code, 2).unwrap();
        let coeffs = [0.1, 0.6, -0.9];
        let out = hdqi_run(&h, &coeffs, &dec, PilotMode::Mps).unwrap();
        assert!(trace_distance(&out.rho, &rho_direct(&h, &coeffs).unwrap()) < 1e-9);
    }

    #[test]
    fn blockwise_ising_ring_matches_filter() {
        let h = PauliHamiltonian::from_strs(&[(-1, "ZZII"), (-1, "IZZI"), (-1, "IIZZ"), (-1, "ZIIZ")]).unwrap();
        // arbitrary nonnegative filter on the spectrum {−4, …, 4}
        let f = |l: f64| (0.7 * l).exp() + 0.1 * l * l;
        let p = crate::poly::interpolate_sqrt(|x| f(x as f64), 4).unwrap().to_float();
        let pilot = Pilot::new(&h, p.coeffs(), PilotMode::Blockwise).unwrap();
        let dec = blockwise_decoder(&h, pilot.expansion.as_ref().unwrap()).unwrap();
        let out = hdqi_run_with_pilot(&h, &pilot, &dec).unwrap();
        let want = rho_of_function(&h, f).unwrap();
        assert!(trace_distance(&out.rho, &want) < 1e-9);
        assert!(out.residual_weight < 1e-20);
    }

    #[test]
    fn pilot_mode_mismatch_is_refused() {
        let h = PauliHamiltonian::from_strs(&[(1, "X"), (1, "Z")]).unwrap();
        assert!(matches!(
            Pilot::new(&h, &[0.0, 1.0], PilotMode::Dicke),
            Err(HdqiError::NonCommuting(0, 1))
        ));
        let big = PauliHamiltonian::from_strs(&[(1, "ZIIIIIIIIIII"); 3]).unwrap();
        assert!(hdqi_run(&big, &[1.0], &ZeroDecoder(3), PilotMode::Mps).is_err());
    }

    #[test]
    fn faults_respect_fidelity_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 4 {
            let h = random_commuting(&mut rng, 3, 5);
            let code = SymplecticCode::from_hamiltonian(&h);
            if !code.min_distance_bruteforce(5).unwrap().supports_radius(1) {
                continue;
            }
            let coeffs = [0.4, 1.0];
            let ideal = rho_direct(&h, &coeffs).unwrap();
            for eps in [0.0, 0.1, 1.0] {
                let dec = LookupDecoder::build(&code, 1).unwrap();
                let (faulty, _) = FaultyDecoder::inject(dec, &code, 1, eps, 7).unwrap();
                let out = hdqi_run(&h, &coeffs, &faulty, PilotMode::Dicke).unwrap();
                let (td, f) = distance_metrics(&out.rho, &ideal).unwrap();
                if eps == 0.0 {
                    assert!(td < 1e-9);
                } else if eps < 1.0 {
                    assert!(f >= 1.0 - eps - 1e-12 && td <= (2.0 * eps).sqrt() + 1e-12);
                } else {
                    assert!(out.residual_weight > 0.0);
                }
            }
            checked += 1;
        }
    }
}
