//! Symplectic linear algebra on F2^{2n} with the form `<u,v> = u_x·v_z + u_z·v_x`.

use crate::error::{HdqiError, Result};
use crate::gf2::{BitMatrix, BitVec, IncrementalBasis};

/// Symplectic form of two `(x | z)` vectors.
pub fn symplectic_inner(u: &BitVec, v: &BitVec) -> bool {
    debug_assert_eq!(u.len(), v.len());
    let n = u.len() / 2;
    let (ux, uz) = (u.slice(0, n), u.slice(n, 2 * n));
    let (vx, vz) = (v.slice(0, n), v.slice(n, 2 * n));
    ux.dot(&vz) ^ uz.dot(&vx)
}

/// Swaps the two halves, so that `<u,v> = swap(u)·v`.
fn swap_halves(u: &BitVec) -> BitVec {
    let n = u.len() / 2;
    u.slice(n, 2 * n).concat(&u.slice(0, n))
}

/// Output of symplectic Gram-Schmidt.
#[derive(Clone, Debug, Default)]
pub struct SymplecticBasis {
    /// Hyperbolic pairs with `<u_i, u'_j> = δ_ij`.
    pub pairs: Vec<(BitVec, BitVec)>,
    /// Vectors orthogonal to everything returned, including each other.
    pub isotropic: Vec<BitVec>,
}

impl SymplecticBasis {
    pub fn dimension(&self) -> usize {
        2 * self.pairs.len() + self.isotropic.len()
    }

    pub fn vectors(&self) -> Vec<BitVec> {
        let mut out = Vec::with_capacity(self.dimension());
        for (u, v) in &self.pairs {
            out.push(u.clone());
            out.push(v.clone());
        }
        out.extend(self.isotropic.iter().cloned());
        out
    }
}

/// Splits the span of `vectors` into hyperbolic pairs and an isotropic remainder.
/// Dependent inputs are dropped first, so the output is a basis of the span.
pub fn symplectic_gram_schmidt(vectors: &[BitVec]) -> SymplecticBasis {
    let Some(first) = vectors.first() else {
        return SymplecticBasis::default();
    };
    let mut ind = IncrementalBasis::new(first.len());
    let mut work: Vec<BitVec> = vectors.iter().filter(|v| ind.insert(v)).cloned().collect();
    let mut out = SymplecticBasis::default();
    while let Some(u) = work.pop() {
        match work.iter().position(|w| symplectic_inner(&u, w)) {
            Some(idx) => {
                let v = work.swap_remove(idx);
                for w in work.iter_mut() {
                    let wv = symplectic_inner(w, &v);
                    let wu = symplectic_inner(w, &u);
                    if wv {
                        w.xor_assign(&u);
                    }
                    if wu {
                        w.xor_assign(&v);
                    }
                }
                out.pairs.push((u, v));
            }
            None => out.isotropic.push(u),
        }
    }
    out
}

/// Extends hyperbolic pairs plus isotropic vectors (all mutually orthogonal except
/// within pairs) to a full symplectic basis of F2^{2n}. The returned list starts
/// with the given pairs, then each isotropic vector with a new partner, then any
/// remaining pairs.
pub fn complete_symplectic_basis(
    len: usize,
    pairs: &[(BitVec, BitVec)],
    isotropic: &[BitVec],
) -> Result<Vec<(BitVec, BitVec)>> {
    let mut basis: Vec<(BitVec, BitVec)> = pairs.to_vec();
    let mut partners: Vec<BitVec> = Vec::new();
    for (j, w) in isotropic.iter().enumerate() {
        // <c, y> = target for every constraint vector c.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (u, v) in pairs {
            rows.push(swap_halves(u));
            rhs.push(false);
            rows.push(swap_halves(v));
            rhs.push(false);
        }
        for (i, wi) in isotropic.iter().enumerate() {
            rows.push(swap_halves(wi));
            rhs.push(i == j);
        }
        for y in &partners {
            rows.push(swap_halves(y));
            rhs.push(false);
        }
        let a = BitMatrix::from_rows(len, rows);
        let y = a.solve(&BitVec::from_bools(&rhs)).ok_or_else(|| {
            HdqiError::Precondition("isotropic vectors are not independent of the pairs".into())
        })?;
        partners.push(y.clone());
        basis.push((w.clone(), y));
    }
    // Symplectic complement of everything chosen so far.
    let constraints: Vec<BitVec> = basis
        .iter()
        .flat_map(|(u, v)| [swap_halves(u), swap_halves(v)])
        .collect();
    let complement = if constraints.is_empty() {
        (0..len).map(|i| BitVec::from_indices(len, &[i])).collect()
    } else {
        BitMatrix::from_rows(len, constraints).nullspace()
    };
    let rest = symplectic_gram_schmidt(&complement);
    if !rest.isotropic.is_empty() {
        return Err(HdqiError::Precondition(
            "complement is degenerate; inputs were not a valid partial symplectic basis".into(),
        ));
    }
    basis.extend(rest.pairs);
    if 2 * basis.len() != len {
        return Err(HdqiError::Precondition("basis completion fell short".into()));
    }
    Ok(basis)
}

/// `MᵀJM = J`, checked on basis vectors.
pub fn is_symplectic(m: &BitMatrix) -> bool {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
        return false;
    }
    let cols = m.columns();
    let n2 = cols.len();
    let n = n2 / 2;
    for i in 0..n2 {
        for j in 0..n2 {
            let expected = (i + n == j) || (j + n == i);
            if symplectic_inner(&cols[i], &cols[j]) != expected {
                return false;
            }
        }
    }
    true
}

fn preserves_form_on(t: &BitMatrix, vecs: &[BitVec]) -> Result<bool> {
    let images = vecs.iter().map(|v| t.mul_vec(v)).collect::<Result<Vec<_>>>()?;
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            if symplectic_inner(&vecs[i], &vecs[j]) != symplectic_inner(&images[i], &images[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Symplectic matrix agreeing with `t` on the column span of `b`.
///
/// Requires `t` to preserve the form on all column pairs of `b` and to be
/// injective on their span.
pub fn extend_symplectic(t: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    let len = t.nrows();
    if t.ncols() != len || len % 2 != 0 {
        return Err(HdqiError::InvalidParameter(format!(
            "transformation must be 2n×2n, got {}×{}",
            t.nrows(),
            t.ncols()
        )));
    }
    if b.nrows() != len {
        return Err(HdqiError::DimensionMismatch {
            expected: len,
            found: b.nrows(),
        });
    }
    let cols = b.columns();
    if !preserves_form_on(t, &cols)? {
        return Err(HdqiError::Precondition(
            "transformation does not preserve the symplectic form on the columns".into(),
        ));
    }
    let tb = t.mul(b)?;
    if tb.rank() != b.rank() {
        return Err(HdqiError::Precondition(
            "transformation is not injective on the column span".into(),
        ));
    }

    let gs = symplectic_gram_schmidt(&cols);
    let domain = complete_symplectic_basis(len, &gs.pairs, &gs.isotropic)?;

    let image_pairs = gs
        .pairs
        .iter()
        .map(|(u, v)| Ok((t.mul_vec(u)?, t.mul_vec(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let image_iso = gs
        .isotropic
        .iter()
        .map(|w| t.mul_vec(w))
        .collect::<Result<Vec<_>>>()?;
    let image = complete_symplectic_basis(len, &image_pairs, &image_iso)?;

    let flatten = |basis: &[(BitVec, BitVec)]| -> Vec<BitVec> {
        let mut v: Vec<BitVec> = basis.iter().map(|(u, _)| u.clone()).collect();
        v.extend(basis.iter().map(|(_, w)| w.clone()));
        v
    };
    let u_mat = BitMatrix::from_columns(len, &flatten(&domain));
    let v_mat = BitMatrix::from_columns(len, &flatten(&image));
    let u_inv = u_mat
        .inverse()
        .ok_or_else(|| HdqiError::Precondition("domain basis is singular".into()))?;
    let t_prime = v_mat.mul(&u_inv)?;
    debug_assert!(is_symplectic(&t_prime));
    debug_assert_eq!(t_prime.mul(b)?, tb);
    Ok(t_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(len: usize, i: usize) -> BitVec {
        BitVec::from_indices(len, &[i])
    }

    fn check_pattern(basis: &SymplecticBasis) {
        let p = &basis.pairs;
        for i in 0..p.len() {
            for j in 0..p.len() {
                assert_eq!(symplectic_inner(&p[i].0, &p[j].1), i == j);
                assert!(!symplectic_inner(&p[i].0, &p[j].0));
                assert!(!symplectic_inner(&p[i].1, &p[j].1));
            }
        }
        let all = basis.vectors();
        for w in &basis.isotropic {
            for v in &all {
                assert!(!symplectic_inner(w, v));
            }
        }
    }

    #[test]
    fn single_pair_and_single_leftover() {
        let n = 3;
        let gs = symplectic_gram_schmidt(&[e(2 * n, 0), e(2 * n, n)]);
        assert_eq!((gs.pairs.len(), gs.isotropic.len()), (1, 0));
        let gs = symplectic_gram_schmidt(&[e(2 * n, 0)]);
        assert_eq!((gs.pairs.len(), gs.isotropic.len()), (0, 1));
        assert_eq!(symplectic_gram_schmidt(&[]).dimension(), 0);
    }

    #[test]
    fn random_gram_schmidt_has_block_pattern_and_same_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let vecs: Vec<BitVec> = (0..6).map(|_| BitVec::random(8, &mut rng)).collect();
            let gs = symplectic_gram_schmidt(&vecs);
            check_pattern(&gs);
            let input = BitMatrix::from_rows(8, vecs.clone());
            let out = BitMatrix::from_rows(8, gs.vectors());
            assert_eq!(out.rank(), input.rank());
            assert_eq!(out.rank(), gs.dimension());
            let mut both = vecs.clone();
            both.extend(gs.vectors());
            assert_eq!(BitMatrix::from_rows(8, both).rank(), input.rank());
        }
    }

    #[test]
    fn identity_extension_is_identity_on_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = BitMatrix::random(6, 4, &mut rng);
        let t = BitMatrix::identity(6);
        let tp = extend_symplectic(&t, &b).unwrap();
        assert!(is_symplectic(&tp));
        assert_eq!(tp.mul(&b).unwrap(), b);
    }

    #[test]
    fn full_span_forces_t() {
        // A symplectic T restricted to a spanning B admits no freedom.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_symplectic(3, &mut rng);
        let b = BitMatrix::identity(6);
        assert_eq!(extend_symplectic(&t, &b).unwrap(), t);
    }

    #[test]
    fn violations_are_reported() {
        let n = 2;
        let b = BitMatrix::from_columns(4, &[e(4, 0), e(4, n)]);
        // maps X1 -> X1, Z1 -> X1: breaks <X1,Z1> = 1
        let mut t = BitMatrix::zeros(4, 4);
        t.set(0, 0, true);
        t.set(0, n, true);
        assert!(extend_symplectic(&t, &b).is_err());
        // isotropic vector sent to zero
        let b = BitMatrix::from_columns(4, &[e(4, 0)]);
        assert!(extend_symplectic(&BitMatrix::zeros(4, 4), &b).is_err());
    }

    pub(crate) fn random_symplectic(n: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
        // Random symplectic basis via Gram-Schmidt completion from random vectors.
        loop {
            let vecs: Vec<BitVec> = (0..2 * n).map(|_| BitVec::random(2 * n, rng)).collect();
            let gs = symplectic_gram_schmidt(&vecs);
            if gs.pairs.len() == n {
                let mut cols: Vec<BitVec> = gs.pairs.iter().map(|p| p.0.clone()).collect();
                cols.extend(gs.pairs.iter().map(|p| p.1.clone()));
                let m = BitMatrix::from_columns(2 * n, &cols);
                assert!(is_symplectic(&m));
                return m;
            }
        }
    }

    #[test]
    fn random_three_qubit_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let s = random_symplectic(3, &mut rng);
            // T agrees with a symplectic map on a random subspace and is arbitrary elsewhere.
            let b = BitMatrix::random(6, 3, &mut rng);
            let t = s.clone();
            let tp = extend_symplectic(&t, &b).unwrap();
            assert!(is_symplectic(&tp));
            assert_eq!(tp.mul(&b).unwrap(), t.mul(&b).unwrap());
        }
    }
}
