//! Dense complex matrices for small systems. Qubit `j` is bit `n-1-j` of a basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HdqiError, Result};
use crate::pauli::{PauliHamiltonian, PauliWord, Phase};

pub type CMatrix = DMatrix<Complex64>;

/// Largest qubit count accepted for dense operators.
pub const DENSE_MAX_QUBITS: usize = 12;

fn check_size(n: usize) -> Result<()> {
    if n > DENSE_MAX_QUBITS {
        return Err(HdqiError::BudgetExceeded {
            what: "dense operator qubits",
            needed: n as u128,
            limit: DENSE_MAX_QUBITS as u128,
        });
    }
    Ok(())
}

pub fn pauli_matrix(w: &PauliWord) -> Result<CMatrix> {
    check_size(w.num_qubits())?;
    let dim = 1usize << w.num_qubits();
    Ok(CMatrix::from_row_slice(dim, dim, &w.to_dense()))
}

/// `Σ v_i P_i`.
pub fn hamiltonian_matrix(h: &PauliHamiltonian) -> Result<CMatrix> {
    let dim = 1usize << h.num_qubits();
    check_size(h.num_qubits())?;
    let mut out = CMatrix::zeros(dim, dim);
    for t in h.terms() {
        add_scaled_pauli(&mut out, &t.word, Complex64::new(t.sign as f64, 0.0));
    }
    Ok(out)
}

/// `out += s · P`.
pub fn add_scaled_pauli(out: &mut CMatrix, w: &PauliWord, s: Complex64) {
    let (xm, zm) = w.masks();
    let base = Phase::from_exponent((xm & zm).count_ones() as i64).to_complex() * s;
    for c in 0..out.ncols() {
        let r = c ^ xm as usize;
        let v = if (zm & c as u64).count_ones() % 2 == 1 { -base } else { base };
        out[(r, c)] += v;
    }
}

/// `P · M` without forming `P`.
pub fn pauli_times(w: &PauliWord, m: &CMatrix) -> CMatrix {
    let (xm, zm) = w.masks();
    let base = Phase::from_exponent((xm & zm).count_ones() as i64).to_complex();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        // row r of P·M is phase(r) times row r⊕x of M
        let src = r ^ xm as usize;
        let sign = if (zm & src as u64).count_ones() % 2 == 1 { -base } else { base };
        for c in 0..m.ncols() {
            out[(r, c)] = sign * m[(src, c)];
        }
    }
    out
}

/// `H · M` as a sum of signed Pauli actions.
pub fn hamiltonian_times(h: &PauliHamiltonian, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for t in h.terms() {
        let p = pauli_times(&t.word, m);
        if t.sign > 0 {
            out += p;
        } else {
            out -= p;
        }
    }
    out
}

/// `Σ c_k H^k` by Horner on Pauli actions.
pub fn poly_of_hamiltonian(h: &PauliHamiltonian, coeffs: &[f64]) -> Result<CMatrix> {
    check_size(h.num_qubits())?;
    let dim = 1usize << h.num_qubits();
    let id = CMatrix::identity(dim, dim);
    let mut acc = CMatrix::zeros(dim, dim);
    for &c in coeffs.iter().rev() {
        acc = hamiltonian_times(h, &acc) + &id * Complex64::new(c, 0.0);
    }
    Ok(acc)
}

/// `Σ c_k M^k` by Horner.
pub fn matrix_poly(coeffs: &[f64], m: &CMatrix) -> CMatrix {
    let dim = m.nrows();
    let id = CMatrix::identity(dim, dim);
    let mut acc = CMatrix::zeros(dim, dim);
    for &c in coeffs.iter().rev() {
        acc = m * acc + &id * Complex64::new(c, 0.0);
    }
    acc
}

/// Largest absolute entry difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
