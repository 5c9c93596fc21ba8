//! Polynomial machinery: univariate polynomials, symmetric expansion weights,
//! Chebyshev Gibbs filters, exact spectral interpolation and the blockwise
//! expansion for commuting Hamiltonians with a few product relations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::pascal_big;
use crate::error::{HdqiError, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::PauliHamiltonian;
use crate::Real;

/// `c₀ + c₁x + … + c_ℓ x^ℓ` with no trailing zero coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Num> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

impl<T: Real> UniPoly<T> {
    pub fn to_f64(&self) -> UniPoly<f64> {
        UniPoly::new(self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn from_f64(p: &UniPoly<f64>) -> Self {
        UniPoly::new(p.coeffs.iter().map(|&c| T::from_f64(c).unwrap_or_else(T::nan)).collect())
    }
}

impl UniPoly<BigRational> {
    pub fn to_float(&self) -> UniPoly<f64> {
        UniPoly::new(self.coeffs.iter().map(rational_to_f64).collect())
    }
}

/// Nearest-ish `f64` for a big rational, robust to numerators beyond `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both sides down to 64 significant bits before dividing.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((ns - ds) as i32)
}

/// Exact value of a finite float.
pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| HdqiError::InvalidParameter(format!("non-finite coefficient {x}")))
}

/// All `a(m, ℓ, r)` for `ℓ ≤ lmax`, `r ≤ ℓ`, indexed `[ℓ][r]`.
///
/// `a(m,ℓ,r) = 2^{-m} Σ_{n₁} C(r,n₁)(−1)^{n₁} Σ_{n₂} C(m−r,n₂)(m−2n₁−2n₂)^ℓ`.
pub fn a_table(m: usize, lmax: usize) -> Vec<Vec<BigInt>> {
    let pascal = pascal_big(m);
    // powers[s][ℓ] = (m − 2s)^ℓ for s = n₁ + n₂
    let powers: Vec<Vec<BigInt>> = (0..=m)
        .map(|s| {
            let base = BigInt::from(m as i64 - 2 * s as i64);
            let mut row = Vec::with_capacity(lmax + 1);
            let mut acc = BigInt::one();
            for _ in 0..=lmax {
                row.push(acc.clone());
                acc *= &base;
            }
            row
        })
        .collect();
    let denom = BigInt::one() << m;
    let mut out = vec![Vec::new(); lmax + 1];
    for (l, row) in out.iter_mut().enumerate() {
        for r in 0..=l.min(m) {
            let mut total = BigInt::zero();
            for n1 in 0..=r {
                let mut inner = BigInt::zero();
                for n2 in 0..=(m - r) {
                    inner += BigInt::from(pascal[m - r][n2].clone()) * &powers[n1 + n2][l];
                }
                let term = BigInt::from(pascal[r][n1].clone()) * inner;
                if n1 % 2 == 1 {
                    total -= term;
                } else {
                    total += term;
                }
            }
            let (q, rem) = total.div_rem(&denom);
            debug_assert!(rem.is_zero());
            row.push(q);
        }
        row.resize(l + 1, BigInt::zero());
    }
    out
}

pub fn a_coefficient(m: usize, l: usize, r: usize) -> BigInt {
    if r > l || r > m {
        return BigInt::zero();
    }
    a_table(m, l)[l][r].clone()
}

/// Coefficients of `𝒫(Σ zᵢ)` in the elementary symmetric basis `e_j(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricWeights<T> {
    pub m: usize,
    pub w: Vec<T>,
}

/// Exact weights `w_j = Σ_k c_k a(m,k,j)` from exact coefficients.
pub fn symmetric_weights_exact(coeffs: &[BigRational], m: usize) -> Result<Vec<BigRational>> {
    let l = coeffs.len().saturating_sub(1);
    if l > m {
        return Err(HdqiError::DegreeTooLarge { degree: l, m });
    }
    let a = a_table(m, l);
    Ok((0..=l)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .skip(j)
                .fold(BigRational::zero(), |acc, (k, c)| acc + c * BigRational::from_integer(a[k][j].clone()))
        })
        .collect())
}

pub fn symmetric_weights<T: Real>(poly: &UniPoly<T>, m: usize) -> Result<SymmetricWeights<T>> {
    let exact = poly
        .coeffs()
        .iter()
        .map(|c| f64_to_rational(c.to_f64().unwrap_or(f64::NAN)))
        .collect::<Result<Vec<_>>>()?;
    let w = symmetric_weights_exact(&exact, m)?
        .iter()
        .map(|x| T::from_f64(rational_to_f64(x)).unwrap_or_else(T::nan))
        .collect();
    Ok(SymmetricWeights { m, w })
}

/// Modified Bessel `I_0(a) … I_kmax(a)` by Miller's backward recurrence,
/// normalised with `e^a = I₀ + 2 Σ I_k`.
pub fn bessel_i_sequence(a: f64, kmax: usize) -> Vec<f64> {
    if a == 0.0 {
        let mut v = vec![0.0; kmax + 1];
        v[0] = 1.0;
        return v;
    }
    let a = a.abs();
    let start = kmax.max(a.ceil() as usize) + 32 + (2.0 * a.sqrt()) as usize * 4;
    let mut vals = vec![0.0f64; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = vals[k + 1] + (2.0 * k as f64 / a) * vals[k];
        if vals[k - 1] > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    // log-domain normalisation keeps large a finite
    let sum = vals[0] + 2.0 * vals[1..].iter().sum::<f64>();
    let scale = (a - sum.ln()).exp();
    vals.truncate(kmax + 1);
    vals.iter().map(|v| v * scale).collect()
}

/// Power series for `I_k(a)`, used as a spot check.
pub fn bessel_i_series(k: usize, a: f64) -> f64 {
    let half = a / 2.0;
    let mut term = half.powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>();
    let mut sum = term;
    for j in 1..200 {
        term *= half * half / (j as f64 * (j + k) as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Chebyshev approximation of `e^{−βx/2}` on `[−K, K]` whose square approximates `e^{−βx}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsPoly {
    pub beta: f64,
    pub k_norm: f64,
    pub epsilon: f64,
    pub degree: usize,
    /// `d_k` with `𝒫(x) = Σ d_k T_k(x/K)`.
    pub chebyshev: Vec<f64>,
}

/// `⌈1.12·βK + 0.648·ln(12/ε)⌉`.
pub fn gibbs_degree(beta: f64, k_norm: f64, epsilon: f64) -> usize {
    (1.12 * beta * k_norm + 0.648 * (12.0 / epsilon).ln()).ceil().max(0.0) as usize
}

pub fn gibbs_poly(beta: f64, k_norm: f64, epsilon: f64) -> Result<GibbsPoly> {
    if !(beta >= 0.0 && k_norm > 0.0 && epsilon > 0.0 && epsilon < 12.0) {
        return Err(HdqiError::InvalidParameter(format!(
            "gibbs_poly needs β ≥ 0, K > 0, 0 < ε < 12 (got β={beta}, K={k_norm}, ε={epsilon})"
        )));
    }
    let degree = gibbs_degree(beta, k_norm, epsilon);
    let a = beta * k_norm / 2.0;
    let bessel = bessel_i_sequence(a, degree);
    let chebyshev = bessel
        .iter()
        .enumerate()
        .map(|(k, &i)| match k {
            0 => i,
            _ if k % 2 == 1 => -2.0 * i,
            _ => 2.0 * i,
        })
        .collect();
    Ok(GibbsPoly {
        beta,
        k_norm,
        epsilon,
        degree,
        chebyshev,
    })
}

impl GibbsPoly {
    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.k_norm;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &d in self.chebyshev.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + d;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.chebyshev[0]
    }

    /// Monomial coefficients in `x`.
    pub fn to_poly(&self) -> UniPoly<f64> {
        let t = chebyshev_monomials(self.degree);
        let mut out = vec![0.0; self.degree + 1];
        for (k, d) in self.chebyshev.iter().enumerate() {
            for (j, c) in t[k].iter().enumerate() {
                out[j] += d * c.to_f64().unwrap_or(f64::NAN);
            }
        }
        for (j, c) in out.iter_mut().enumerate() {
            *c /= self.k_norm.powi(j as i32);
        }
        UniPoly::new(out)
    }

    /// Largest `|𝒫(x)² − e^{−βx}| / e^{−βx}` over `points` evenly spaced points of `[−K, K]`.
    pub fn max_relative_error_squared(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = -self.k_norm + 2.0 * self.k_norm * i as f64 / (points - 1).max(1) as f64;
                let target = (-self.beta * x).exp();
                (self.eval(x).powi(2) - target).abs() / target
            })
            .fold(0.0, f64::max)
    }
}

/// Integer coefficients of `T_0 … T_d`, indexed `[k][power]`.
pub fn chebyshev_monomials(d: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    if d >= 1 {
        t.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for k in 2..=d {
        let mut next = vec![BigInt::zero(); k + 1];
        for (j, c) in t[k - 1].iter().enumerate() {
            next[j + 1] += c * 2;
        }
        for (j, c) in t[k - 2].iter().enumerate() {
            next[j] -= c;
        }
        t.push(next);
    }
    t
}

/// Degree-≤m polynomial with `𝒫(λ) = √f(λ)` on `λ ∈ {−m, −m+2, …, m}`.
///
/// The float square roots are taken exactly as rationals, so the divided
/// differences and monomial conversion carry no further rounding.
pub fn interpolate_sqrt(f: impl Fn(i64) -> f64, m: usize) -> Result<UniPoly<BigRational>> {
    let xs: Vec<i64> = (0..=m).map(|i| -(m as i64) + 2 * i as i64).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = f(x);
        if !(v >= 0.0) {
            return Err(HdqiError::NegativeValue { point: x, value: v });
        }
        ys.push(f64_to_rational(v.sqrt())?);
    }
    // Newton divided differences in place.
    let n = xs.len();
    let mut dd = ys;
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / BigRational::from_integer(BigInt::from(xs[i] - xs[i - j]));
        }
    }
    // Nested form to monomials: p = dd[n−1]; p = p·(x − x_i) + dd[i].
    let mut p: Vec<BigRational> = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let xi = BigRational::from_integer(BigInt::from(xs[i]));
        let mut next = vec![BigRational::zero(); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &xi;
        }
        next[0] += &dd[i];
        p = next;
    }
    Ok(UniPoly::new(p))
}

/// Product relation `Π_{i∈U} zᵢ = sign` among commuting variables `zᵢ = vᵢPᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub members: Vec<usize>,
    pub sign: i8,
}

/// Relations spanning `ker Bᵀ` for a commuting Hamiltonian. Signs include the `vᵢ`.
pub fn relations_from_hamiltonian(h: &PauliHamiltonian) -> Result<Vec<Relation>> {
    if let Some((i, j)) = h.first_anticommuting_pair() {
        return Err(HdqiError::NonCommuting(i, j));
    }
    let code = crate::code::SymplecticCode::from_hamiltonian(h);
    code.kernel_basis()
        .into_iter()
        .map(|v| relation_of(h, &v))
        .collect()
}

/// Sign of `Π_{i∈y} vᵢPᵢ` for a kernel vector `y` (increasing index order).
pub fn relation_of(h: &PauliHamiltonian, y: &BitVec) -> Result<Relation> {
    let n = h.num_qubits();
    let mut phase = crate::pauli::Phase::ONE;
    let mut word = crate::pauli::PauliWord::identity(n);
    let mut sign = 1i8;
    for i in y.iter_ones() {
        let t = h.term(i);
        let (ph, w) = word.mul(&t.word)?;
        phase = phase * ph;
        word = w;
        sign *= t.sign;
    }
    if !word.is_identity() {
        return Err(HdqiError::Precondition("vector is not in the kernel".into()));
    }
    let ps = phase
        .sign()
        .ok_or_else(|| HdqiError::Precondition("relation product has imaginary phase".into()))?;
    Ok(Relation {
        members: y.iter_ones().collect(),
        sign: sign * ps,
    })
}

/// Largest relation count accepted by [`blockwise_expand`].
pub const MAX_RELATIONS: usize = 10;
const BLOCK_ARRAY_BUDGET: u128 = 1 << 24;

/// Expansion `𝒫(Σ zᵢ) = Σ_a γ_a Π_t e_{a_t}(V_t)` over the free variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockExpansion {
    pub m: usize,
    /// Eliminated variable per reduced relation.
    pub pivots: Vec<usize>,
    /// Variables not eliminated, increasing.
    pub free: Vec<usize>,
    /// Blocks of free variables with identical relation membership.
    pub blocks: Vec<Vec<usize>>,
    /// For each reduced relation: blocks in `U_j \ {pivot}` and the sign `σ'_j`.
    pub reflections: Vec<(Vec<usize>, i8)>,
    /// `γ` flattened row-major over `a ∈ Π_t [0, |V_t|]`.
    pub gamma: Vec<f64>,
    /// `γ · 2^scale` exactly.
    pub gamma_scaled: Vec<BigInt>,
    pub scale: u64,
}

impl BlockExpansion {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Index of `a` in the flattened array.
    pub fn flat_index(&self, a: &[usize]) -> usize {
        a.iter()
            .zip(&self.blocks)
            .fold(0, |acc, (&ai, b)| acc * (b.len() + 1) + ai)
    }

    pub fn gamma_at(&self, a: &[usize]) -> f64 {
        self.gamma[self.flat_index(a)]
    }

    pub fn gamma_exact(&self, a: &[usize]) -> BigRational {
        BigRational::new(self.gamma_scaled[self.flat_index(a)].clone(), BigInt::one() << self.scale as usize)
    }

    /// Block occupation `a(y)` of a string over all m variables (pivot bits ignored).
    pub fn occupation(&self, y: &BitVec) -> Vec<usize> {
        self.blocks.iter().map(|b| b.iter().filter(|&&i| y.get(i)).count()).collect()
    }

    /// `γ_{a(y)}` for strings supported on the free variables, 0 otherwise.
    pub fn amplitude(&self, y: &BitVec) -> f64 {
        if self.pivots.iter().any(|&p| y.get(p)) {
            return 0.0;
        }
        self.gamma_at(&self.occupation(y))
    }
}

/// Exact dyadic form of float coefficients: integers over a common `2^scale`.
fn dyadic(coeffs: &[f64]) -> Result<(Vec<BigInt>, u64)> {
    let rats = coeffs.iter().map(|&c| f64_to_rational(c)).collect::<Result<Vec<_>>>()?;
    let scale = rats.iter().map(|r| r.denom().trailing_zeros().unwrap_or(0)).max().unwrap_or(0);
    let ints = rats.iter().map(|r| (r.numer() << scale as usize) / r.denom()).collect();
    Ok((ints, scale))
}

/// Blockwise Horner expansion of `𝒫(Σ zᵢ)` under independent product relations.
pub fn blockwise_expand(poly: &UniPoly<f64>, m: usize, relations: &[Relation]) -> Result<BlockExpansion> {
    if relations.len() > MAX_RELATIONS {
        return Err(HdqiError::BudgetExceeded {
            what: "relation count",
            needed: relations.len() as u128,
            limit: MAX_RELATIONS as u128,
        });
    }
    // Reduce relations to RREF, multiplying signs along with rows.
    let mut rows: Vec<(BitVec, i8)> = Vec::with_capacity(relations.len());
    for r in relations {
        if r.members.iter().any(|&i| i >= m) || r.sign.abs() != 1 {
            return Err(HdqiError::InvalidParameter(format!("bad relation {r:?}")));
        }
        rows.push((BitVec::from_indices(m, &r.members), r.sign));
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].0.get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let (pr, ps) = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.0.get(c) {
                row.0.xor_assign(&pr);
                row.1 *= ps;
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rank < rows.len() {
        return Err(HdqiError::DependentRelations);
    }
    let is_pivot: Vec<bool> = (0..m).map(|i| pivots.contains(&i)).collect();
    let free: Vec<usize> = (0..m).filter(|&i| !is_pivot[i]).collect();

    // Membership pattern of each free variable, grouped in order of first appearance.
    let mut patterns: Vec<Vec<bool>> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &i in &free {
        let pat: Vec<bool> = rows.iter().map(|(r, _)| r.get(i)).collect();
        match patterns.iter().position(|p| *p == pat) {
            Some(t) => blocks[t].push(i),
            None => {
                patterns.push(pat);
                blocks.push(vec![i]);
            }
        }
    }
    let reflections: Vec<(Vec<usize>, i8)> = rows
        .iter()
        .enumerate()
        .map(|(j, (_, s))| ((0..blocks.len()).filter(|&t| patterns[t][j]).collect(), *s))
        .collect();

    let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    let dims: Vec<usize> = sizes.iter().map(|s| s + 1).collect();
    let total: u128 = dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
    if total > BLOCK_ARRAY_BUDGET {
        return Err(HdqiError::BudgetExceeded {
            what: "blockwise coefficient array",
            needed: total,
            limit: BLOCK_ARRAY_BUDGET,
        });
    }
    let d = total as usize;
    let r = blocks.len();
    let mut strides = vec![1usize; r];
    for t in (0..r.saturating_sub(1)).rev() {
        strides[t] = strides[t + 1] * dims[t + 1];
    }
    let coords = |mut idx: usize| -> Vec<usize> {
        let mut a = vec![0; r];
        for t in 0..r {
            a[t] = idx / strides[t];
            idx %= strides[t];
        }
        a
    };
    let all_coords: Vec<Vec<usize>> = (0..d).map(coords).collect();
    let reflect_index: Vec<Vec<usize>> = reflections
        .iter()
        .map(|(bl, _)| {
            all_coords
                .iter()
                .map(|a| {
                    let mut idx = 0;
                    for t in 0..r {
                        let at = if bl.contains(&t) { sizes[t] - a[t] } else { a[t] };
                        idx += at * strides[t];
                    }
                    idx
                })
                .collect()
        })
        .collect();

    let (pc, scale) = dyadic(poly.coeffs())?;
    let apply = |v: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); d];
        for (idx, a) in all_coords.iter().enumerate() {
            let mut acc = BigInt::zero();
            for t in 0..r {
                if a[t] > 0 {
                    acc += &v[idx - strides[t]] * a[t];
                }
                if a[t] < sizes[t] {
                    acc += &v[idx + strides[t]] * (sizes[t] - a[t]);
                }
            }
            for (j, (_, s)) in reflections.iter().enumerate() {
                let src = &v[reflect_index[j][idx]];
                if *s > 0 {
                    acc += src;
                } else {
                    acc -= src;
                }
            }
            out[idx] = acc;
        }
        out
    };
    let mut v = vec![BigInt::zero(); d];
    for q in (0..pc.len()).rev() {
        if q + 1 < pc.len() {
            v = apply(&v);
        }
        v[0] += &pc[q];
    }
    let denom = BigInt::one() << scale as usize;
    let gamma = v
        .iter()
        .map(|x| rational_to_f64(&BigRational::new(x.clone(), denom.clone())))
        .collect();
    Ok(BlockExpansion {
        m,
        pivots,
        free,
        blocks,
        reflections,
        gamma,
        gamma_scaled: v,
        scale,
    })
}

/// Reduced Hamiltonian on the free terms; its code has dimension 0.
pub fn free_part(h: &PauliHamiltonian, exp: &BlockExpansion) -> Result<PauliHamiltonian> {
    h.subset(&exp.free)
}

/// Check matrix restricted to free columns.
pub fn free_check_matrix(h: &PauliHamiltonian, exp: &BlockExpansion) -> BitMatrix {
    let cols: Vec<BitVec> = exp.free.iter().map(|&i| h.term(i).word.symp()).collect();
    BitMatrix::from_columns(2 * h.num_qubits(), &cols)
}

/// `sign(d_k) = (−1)^k`, as expected for `a > 0`.
pub fn chebyshev_signs_alternate(g: &GibbsPoly) -> bool {
    g.chebyshev
        .iter()
        .enumerate()
        .all(|(k, &d)| d == 0.0 || (d > 0.0) == (k % 2 == 0))
}
