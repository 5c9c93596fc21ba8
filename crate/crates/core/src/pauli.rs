//! Phase-free Pauli words in symplectic form and signed Pauli Hamiltonians.
//!
//! A word on `n` qubits is stored as two bit vectors, the X support and the
//! Z support; its symplectic vector is the concatenation `(x | z)`.
//! The operator a word denotes is `⊗_j i^{x_j z_j} X^{x_j} Z^{z_j}`, so a
//! qubit with both bits set is the Hermitian `Y`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HdqiError, Result};
use crate::gf2::BitVec;

/// Power of `i`, stored as an exponent mod 4.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: i64) -> Phase {
        Phase(e.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::mul(self, rhs)
    }
}

/// Single-qubit factor of a word.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli1 {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli1> {
        match c {
            'I' => Some(Pauli1::I),
            'X' => Some(Pauli1::X),
            'Y' => Some(Pauli1::Y),
            'Z' => Some(Pauli1::Z),
            _ => None,
        }
    }
}

/// Phase-free tensor product of single-qubit Paulis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliWord {
    x: BitVec,
    z: BitVec,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn new(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(HdqiError::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self { x, z })
    }

    /// Word with one non-identity factor.
    pub fn single(n: usize, qubit: usize, p: Pauli1) -> Self {
        let mut w = Self::identity(n);
        w.set(qubit, p);
        w
    }

    pub fn from_factors(factors: &[Pauli1]) -> Self {
        let mut w = Self::identity(factors.len());
        for (q, &p) in factors.iter().enumerate() {
            w.set(q, p);
        }
        w
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            x: BitVec::random(n, rng),
            z: BitVec::random(n, rng),
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_part(&self) -> &BitVec {
        &self.x
    }

    pub fn z_part(&self) -> &BitVec {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli1 {
        Pauli1::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, p: Pauli1) {
        let (x, z) = p.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn factors(&self) -> Vec<Pauli1> {
        (0..self.num_qubits()).map(|q| self.get(q)).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        let mut acc = 0;
        for (a, b) in self.x.words().iter().zip(self.z.words()) {
            acc += (a | b).count_ones() as usize;
        }
        acc
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits())
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// Symplectic vector `(x | z)` of length `2n`.
    pub fn symp(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_symp(v: &BitVec) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(HdqiError::InvalidParameter(format!(
                "symplectic vector has odd length {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Ok(Self {
            x: v.slice(0, n),
            z: v.slice(n, 2 * n),
        })
    }

    fn check_len(&self, other: &PauliWord) -> Result<()> {
        if self.num_qubits() != other.num_qubits() {
            return Err(HdqiError::DimensionMismatch {
                expected: self.num_qubits(),
                found: other.num_qubits(),
            });
        }
        Ok(())
    }

    /// Product of operators: `self · other = phase · result`.
    pub fn mul(&self, other: &PauliWord) -> Result<(Phase, PauliWord)> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliWord) -> (Phase, PauliWord) {
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        // i^{a1 b1} X^{a1} Z^{b1} i^{a2 b2} X^{a2} Z^{b2}
        //   = i^{a1 b1 + a2 b2 + 2 b1 a2 - a3 b3} · i^{a3 b3} X^{a3} Z^{b3}
        let e = self.x.and_count(&self.z) as i64
            + other.x.and_count(&other.z) as i64
            + 2 * self.z.and_count(&other.x) as i64
            - x.and_count(&z) as i64;
        (Phase::from_exponent(e), PauliWord { x, z })
    }

    /// Symplectic form `x_p·z_q + z_p·x_q mod 2`; true iff the words anticommute.
    pub fn symplectic_product(&self, other: &PauliWord) -> bool {
        let mut acc = 0u64;
        for i in 0..self.x.words().len() {
            acc ^= (self.x.words()[i] & other.z.words()[i]) ^ (self.z.words()[i] & other.x.words()[i]);
        }
        acc.count_ones() % 2 == 1
    }

    pub fn commutes(&self, other: &PauliWord) -> Result<bool> {
        self.check_len(other)?;
        Ok(!self.symplectic_product(other))
    }

    /// X and Z supports as integer masks under the big-endian convention used by
    /// dense matrices: qubit `j` is bit `n-1-j` of a basis index.
    pub fn masks(&self) -> (u64, u64) {
        let n = self.num_qubits();
        assert!(n <= 63, "dense masks need n <= 63");
        let mut xm = 0u64;
        let mut zm = 0u64;
        for q in self.x.iter_ones() {
            xm |= 1 << (n - 1 - q);
        }
        for q in self.z.iter_ones() {
            zm |= 1 << (n - 1 - q);
        }
        (xm, zm)
    }

    /// Dense `2^n × 2^n` matrix, row-major.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.num_qubits();
        let dim = 1usize << n;
        let (xm, zm) = self.masks();
        let base = Phase::from_exponent((xm & zm).count_ones() as i64);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            let r = c ^ xm as usize;
            let sign = if (zm & c as u64).count_ones() % 2 == 1 {
                Phase::MINUS_ONE
            } else {
                Phase::ONE
            };
            out[r * dim + c] = (base * sign).to_complex();
        }
        out
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord({self})")
    }
}

impl FromStr for PauliWord {
    type Err = HdqiError;
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| {
                Pauli1::from_char(c).ok_or_else(|| HdqiError::Parse {
                    line: 0,
                    msg: format!("unexpected character {c:?} in Pauli word"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliWord::from_factors(&factors))
    }
}

/// A `±1`-weighted Pauli word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SignedTerm {
    pub sign: i8,
    pub word: PauliWord,
}

impl SignedTerm {
    pub fn new(sign: i8, word: PauliWord) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(HdqiError::InvalidParameter(format!("sign {sign} is not ±1")));
        }
        Ok(Self { sign, word })
    }
}

/// `H = Σ_i v_i P_i` with `v_i ∈ {±1}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    n: usize,
    terms: Vec<SignedTerm>,
}

impl PauliHamiltonian {
    pub fn new(n: usize, terms: Vec<SignedTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(HdqiError::InvalidParameter("Hamiltonian needs at least one term".into()));
        }
        for t in &terms {
            if t.word.num_qubits() != n {
                return Err(HdqiError::DimensionMismatch {
                    expected: n,
                    found: t.word.num_qubits(),
                });
            }
        }
        Ok(Self { n, terms })
    }

    /// Builds from `(sign, word string)` pairs.
    pub fn from_strs(items: &[(i8, &str)]) -> Result<Self> {
        let terms = items
            .iter()
            .map(|(s, w)| SignedTerm::new(*s, w.parse()?))
            .collect::<Result<Vec<_>>>()?;
        let n = terms.first().map(|t| t.word.num_qubits()).unwrap_or(0);
        Self::new(n, terms)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[SignedTerm] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &SignedTerm {
        &self.terms[i]
    }

    pub fn signs(&self) -> Vec<i8> {
        self.terms.iter().map(|t| t.sign).collect()
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> {
        self.terms.iter().map(|t| &t.word)
    }

    /// Keeps the listed terms in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.n, indices.iter().map(|&i| self.terms[i].clone()).collect())
    }

    /// First anticommuting pair, if any.
    pub fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if self.terms[i].word.symplectic_product(&self.terms[j].word) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_commuting(&self) -> bool {
        self.first_anticommuting_pair().is_none()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.terms.len());
        for t in &self.terms {
            let sign = if t.sign > 0 { "+1" } else { "-1" };
            s.push_str(&format!("{sign} {}\n", t.word));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(HdqiError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut it = header.split_whitespace();
        let parse_usize = |tok: Option<&str>, what: &str| -> Result<usize> {
            tok.ok_or_else(|| HdqiError::Parse {
                line: hl,
                msg: format!("missing {what}"),
            })?
            .parse::<usize>()
            .map_err(|e| HdqiError::Parse {
                line: hl,
                msg: format!("{what}: {e}"),
            })
        };
        let n = parse_usize(it.next(), "qubit count")?;
        let m = parse_usize(it.next(), "term count")?;
        let mut terms = Vec::with_capacity(m);
        for (ln, line) in lines {
            let mut parts = line.split_whitespace();
            let sign = match parts.next() {
                Some("+1") | Some("1") => 1,
                Some("-1") => -1,
                other => {
                    return Err(HdqiError::Parse {
                        line: ln,
                        msg: format!("expected ±1, found {other:?}"),
                    })
                }
            };
            let word_str = parts.next().ok_or(HdqiError::Parse {
                line: ln,
                msg: "missing Pauli word".into(),
            })?;
            if parts.next().is_some() {
                return Err(HdqiError::Parse {
                    line: ln,
                    msg: "trailing tokens".into(),
                });
            }
            let word: PauliWord = word_str.parse().map_err(|e| match e {
                HdqiError::Parse { msg, .. } => HdqiError::Parse { line: ln, msg },
                other => other,
            })?;
            if word.num_qubits() != n {
                return Err(HdqiError::Parse {
                    line: ln,
                    msg: format!("word has {} qubits, header says {n}", word.num_qubits()),
                });
            }
            terms.push(SignedTerm { sign, word });
        }
        if terms.len() != m {
            return Err(HdqiError::Parse {
                line: hl,
                msg: format!("header declares {m} terms, found {}", terms.len()),
            });
        }
        Self::new(n, terms)
    }
}
