//! Syndrome decoders for [`SymplecticCode`]: exhaustive lookup, Gaussian
//! elimination for dimension-zero codes, and belief propagation on a
//! rank-pruned check matrix.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SymplecticCode;
use crate::combinatorics::{ball_size, binomial_u128, for_each_combination};
use crate::error::{HdqiError, Result};
use crate::gf2::{BitMatrix, BitVec, IncrementalBasis};

/// Default cap on lookup-table entries.
pub const LOOKUP_BUDGET: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    Decoded,
    DetectedFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Meaningful only when decoded; zero otherwise.
    pub error: BitVec,
}

impl DecodeResult {
    pub fn decoded(error: BitVec) -> Self {
        Self {
            status: DecodeStatus::Decoded,
            error,
        }
    }

    pub fn failure(m: usize) -> Self {
        Self {
            status: DecodeStatus::DetectedFailure,
            error: BitVec::zeros(m),
        }
    }

    pub fn is_decoded(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }
}

/// A deterministic function from syndromes to corrections.
pub trait SyndromeDecoder: Send + Sync {
    fn num_bits(&self) -> usize;
    fn decode(&self, syndrome: &BitVec) -> DecodeResult;
}

impl<D: SyndromeDecoder + ?Sized> SyndromeDecoder for Box<D> {
    fn num_bits(&self) -> usize {
        (**self).num_bits()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        (**self).decode(syndrome)
    }
}

/// Syndrome-controlled XOR `|y⟩|s⟩ ↦ |y ⊕ dec(s)⟩|s⟩`. A failed decode XORs nothing.
///
/// Since the correction depends only on `s`, the map is an involution on labels.
pub fn oracle_apply<D: SyndromeDecoder + ?Sized>(decoder: &D, y: &BitVec, s: &BitVec) -> BitVec {
    let r = decoder.decode(s);
    if r.is_decoded() {
        y.xor(&r.error)
    } else {
        y.clone()
    }
}

/// Minimum-weight preimage table for every syndrome of weight ≤ ℓ.
#[derive(Clone, Debug)]
pub struct LookupDecoder {
    m: usize,
    ell: usize,
    table: HashMap<BitVec, BitVec>,
}

impl LookupDecoder {
    pub fn build(code: &SymplecticCode, ell: usize) -> Result<Self> {
        Self::build_with_budget(code, ell, LOOKUP_BUDGET)
    }

    pub fn build_with_budget(code: &SymplecticCode, ell: usize, budget: u128) -> Result<Self> {
        let m = code.num_bits();
        let needed = ball_size(m, ell);
        if needed > budget {
            return Err(HdqiError::BudgetExceeded {
                what: "lookup table",
                needed,
                limit: budget,
            });
        }
        let mut table = HashMap::with_capacity(needed as usize);
        for w in 0..=ell.min(m) {
            for_each_combination::<()>(m, w, |support| {
                table
                    .entry(code.syndrome_of_support(support))
                    .or_insert_with(|| BitVec::from_indices(m, support));
                std::ops::ControlFlow::Continue(())
            });
        }
        Ok(Self { m, ell, table })
    }

    pub fn radius(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl SyndromeDecoder for LookupDecoder {
    fn num_bits(&self) -> usize {
        self.m
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        match self.table.get(syndrome) {
            Some(e) => DecodeResult::decoded(e.clone()),
            None => DecodeResult::failure(self.m),
        }
    }
}

/// Exact decoder for codes of dimension zero: `y = L s` with `L Bᵀ = I`.
#[derive(Clone, Debug)]
pub struct GeDecoder {
    check: BitMatrix,
    /// m × 2n left inverse of `Bᵀ`.
    left_inverse: BitMatrix,
}

impl GeDecoder {
    pub fn build(code: &SymplecticCode) -> Result<Self> {
        if code.dimension() != 0 {
            return Err(HdqiError::Precondition(format!(
                "Gaussian-elimination decoding needs dimension 0, code has dimension {}",
                code.dimension()
            )));
        }
        let check = code.check_matrix().clone();
        let (r, m) = (check.nrows(), check.ncols());
        let rows = check
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut ext = BitVec::zeros(m + r);
                for c in row.iter_ones() {
                    ext.set(c, true);
                }
                ext.set(m + i, true);
                ext
            })
            .collect();
        let ech = BitMatrix::from_rows(m + r, rows).echelon();
        // Full column rank puts pivots on 0..m in order.
        debug_assert!(ech.pivots.iter().take(m).copied().eq(0..m));
        let left_inverse =
            BitMatrix::from_rows(r, ech.rows[..m].iter().map(|row| row.slice(m, m + r)).collect());
        Ok(Self {
            check,
            left_inverse,
        })
    }
}

impl SyndromeDecoder for GeDecoder {
    fn num_bits(&self) -> usize {
        self.check.ncols()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        let m = self.check.ncols();
        let Ok(y) = self.left_inverse.mul_vec(syndrome) else {
            return DecodeResult::failure(m);
        };
        match self.check.mul_vec(&y) {
            Ok(s) if &s == syndrome => DecodeResult::decoded(y),
            _ => DecodeResult::failure(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpParams {
    pub max_iters: usize,
    pub prior_flip_probability: f64,
}

impl BpParams {
    /// Prior `ℓ/m`, 100 iterations.
    pub fn for_radius(ell: usize, m: usize) -> Self {
        Self {
            max_iters: 100,
            prior_flip_probability: (ell as f64 / m as f64).clamp(1e-6, 0.49),
        }
    }
}

const LLR_CLIP: f64 = 50.0;

/// Sum-product decoder, flooding schedule, on the checks kept by pruning.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    code: SymplecticCode,
    kept_rows: Vec<usize>,
    params: BpParams,
    /// Per kept check, its variables. Edge ids are positions in `edges`.
    check_edges: Vec<Vec<usize>>,
    /// Per variable, its edge ids.
    var_edges: Vec<Vec<usize>>,
    edge_var: Vec<usize>,
}

/// Rows kept after deleting dependent checks, heaviest first with ties to the
/// larger index. Returned in increasing index order.
///
/// Greedy insertion in the reverse order (lightest first, smaller index first)
/// keeps exactly the same rows: both are the lexicographically optimal basis of
/// the row matroid under that order.
pub fn prune_checks(check: &BitMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..check.nrows()).collect();
    order.sort_by_key(|&r| (check.row(r).weight(), r));
    let mut basis = IncrementalBasis::new(check.ncols());
    let mut kept: Vec<usize> = order.into_iter().filter(|&r| basis.insert(check.row(r))).collect();
    kept.sort_unstable();
    kept
}

impl BpDecoder {
    pub fn new(code: &SymplecticCode, params: BpParams) -> Result<Self> {
        let p = params.prior_flip_probability;
        if !(p > 0.0 && p < 0.5) {
            return Err(HdqiError::InvalidParameter(format!(
                "prior flip probability {p} outside (0, 0.5)"
            )));
        }
        let check = code.check_matrix();
        let kept_rows = prune_checks(check);
        let mut check_edges = Vec::with_capacity(kept_rows.len());
        let mut var_edges = vec![Vec::new(); code.num_bits()];
        let mut edge_var = Vec::new();
        for &r in &kept_rows {
            let mut ids = Vec::new();
            for v in check.row(r).iter_ones() {
                let e = edge_var.len();
                edge_var.push(v);
                var_edges[v].push(e);
                ids.push(e);
            }
            check_edges.push(ids);
        }
        Ok(Self {
            code: code.clone(),
            kept_rows,
            params,
            check_edges,
            var_edges,
            edge_var,
        })
    }

    pub fn kept_rows(&self) -> &[usize] {
        &self.kept_rows
    }

    pub fn with_prior(&self, prior: f64) -> Result<Self> {
        let mut params = self.params;
        params.prior_flip_probability = prior;
        if !(prior > 0.0 && prior < 0.5) {
            return Err(HdqiError::InvalidParameter(format!(
                "prior flip probability {prior} outside (0, 0.5)"
            )));
        }
        let mut out = self.clone();
        out.params = params;
        Ok(out)
    }

    /// Decode and report the number of completed iterations.
    pub fn decode_with_stats(&self, syndrome: &BitVec) -> (DecodeResult, usize) {
        let m = self.code.num_bits();
        if syndrome.len() != self.code.num_checks() {
            return (DecodeResult::failure(m), 0);
        }
        if syndrome.is_zero() {
            return (DecodeResult::decoded(BitVec::zeros(m)), 0);
        }
        let p = self.params.prior_flip_probability;
        let prior = ((1.0 - p) / p).ln();
        let ne = self.edge_var.len();
        let mut q = vec![prior; ne];
        let mut r = vec![0.0f64; ne];
        let mut post = vec![prior; m];
        let sign: Vec<f64> = self
            .kept_rows
            .iter()
            .map(|&row| if syndrome.get(row) { -1.0 } else { 1.0 })
            .collect();
        let mut tanh_buf: Vec<f64> = Vec::new();
        let mut suffix: Vec<f64> = Vec::new();
        for it in 1..=self.params.max_iters {
            for (c, edges) in self.check_edges.iter().enumerate() {
                tanh_buf.clear();
                tanh_buf.extend(edges.iter().map(|&e| (q[e] * 0.5).tanh()));
                let d = edges.len();
                suffix.clear();
                suffix.resize(d + 1, 1.0);
                for i in (0..d).rev() {
                    suffix[i] = suffix[i + 1] * tanh_buf[i];
                }
                let mut prefix = 1.0;
                for i in 0..d {
                    let prod = (sign[c] * prefix * suffix[i + 1]).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                    r[edges[i]] = (2.0 * prod.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                    prefix *= tanh_buf[i];
                }
            }
            let mut hard = BitVec::zeros(m);
            for v in 0..m {
                let total = prior + self.var_edges[v].iter().map(|&e| r[e]).sum::<f64>();
                post[v] = total;
                if total < 0.0 {
                    hard.set(v, true);
                }
                for &e in &self.var_edges[v] {
                    q[e] = (total - r[e]).clamp(-LLR_CLIP, LLR_CLIP);
                }
            }
            let s = self.code.syndrome_of_support(&hard.iter_ones().collect::<Vec<_>>());
            if &s == syndrome {
                return (DecodeResult::decoded(hard), it);
            }
        }
        (DecodeResult::failure(m), self.params.max_iters)
    }
}

impl SyndromeDecoder for BpDecoder {
    fn num_bits(&self) -> usize {
        self.code.num_bits()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        self.decode_with_stats(syndrome).0
    }
}

/// Wraps a decoder and forces detected failure on a fixed set of syndromes.
pub struct FaultyDecoder<D> {
    inner: D,
    failing: HashSet<BitVec>,
}

impl<D: SyndromeDecoder> FaultyDecoder<D> {
    pub fn new(inner: D, failing: HashSet<BitVec>) -> Self {
        Self { inner, failing }
    }

    /// For each weight class `j ≤ ℓ`, picks `⌊ε·C(m,j)⌋` errors by a seeded
    /// shuffle and makes their syndromes fail. Returns the wrapper together with
    /// the failing errors.
    pub fn inject(
        inner: D,
        code: &SymplecticCode,
        ell: usize,
        epsilon: f64,
        seed: u64,
    ) -> Result<(Self, Vec<BitVec>)> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(HdqiError::InvalidParameter(format!("fault fraction {epsilon}")));
        }
        let m = code.num_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failing = HashSet::new();
        let mut errors = Vec::new();
        for j in 0..=ell.min(m) {
            let mut class = Vec::new();
            for_each_combination::<()>(m, j, |s| {
                class.push(BitVec::from_indices(m, s));
                std::ops::ControlFlow::Continue(())
            });
            let take = (epsilon * binomial_u128(m, j) as f64).floor() as usize;
            class.shuffle(&mut rng);
            for e in class.into_iter().take(take) {
                failing.insert(code.syndrome(&e)?);
                errors.push(e);
            }
        }
        Ok((Self { inner, failing }, errors))
    }

    pub fn failing_syndromes(&self) -> &HashSet<BitVec> {
        &self.failing
    }
}

impl<D: SyndromeDecoder> SyndromeDecoder for FaultyDecoder<D> {
    fn num_bits(&self) -> usize {
        self.inner.num_bits()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        if self.failing.contains(syndrome) {
            DecodeResult::failure(self.inner.num_bits())
        } else {
            self.inner.decode(syndrome)
        }
    }
}

/// Runs a decoder for a code on a subset of columns and scatters its
/// correction back into the full column range.
pub struct EmbeddedDecoder<D> {
    inner: D,
    columns: Vec<usize>,
    m: usize,
}

impl<D: SyndromeDecoder> EmbeddedDecoder<D> {
    pub fn new(inner: D, columns: Vec<usize>, m: usize) -> Result<Self> {
        if inner.num_bits() != columns.len() || columns.iter().any(|&c| c >= m) {
            return Err(HdqiError::InvalidParameter("embedding does not fit the decoder".into()));
        }
        Ok(Self { inner, columns, m })
    }
}

impl<D: SyndromeDecoder> SyndromeDecoder for EmbeddedDecoder<D> {
    fn num_bits(&self) -> usize {
        self.m
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        let r = self.inner.decode(syndrome);
        if !r.is_decoded() {
            return DecodeResult::failure(self.m);
        }
        let idx: Vec<usize> = r.error.iter_ones().map(|i| self.columns[i]).collect();
        DecodeResult::decoded(BitVec::from_indices(self.m, &idx))
    }
}

/// Decoder that never corrects anything.
#[derive(Clone, Copy, Debug)]
pub struct ZeroDecoder(pub usize);

impl SyndromeDecoder for ZeroDecoder {
    fn num_bits(&self) -> usize {
        self.0
    }

    fn decode(&self, _: &BitVec) -> DecodeResult {
        DecodeResult::decoded(BitVec::zeros(self.0))
    }
}

/// Independent stream seed for `(seed, a, b)` via a SplitMix64 finaliser.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaterfallPoint {
    pub flips: usize,
    pub trials: usize,
    pub successes: usize,
}

impl WaterfallPoint {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// BP success over `trials` planted errors of weight exactly `flips`. Success
/// means the decoder returns the planted error itself.
pub fn waterfall_point(code: &SymplecticCode, flips: usize, trials: usize, seed: u64, max_iters: usize) -> Result<WaterfallPoint> {
    let m = code.num_bits();
    if flips == 0 {
        return Ok(WaterfallPoint {
            flips,
            trials,
            successes: trials,
        });
    }
    let prior = (flips as f64 / m as f64).clamp(1e-6, 0.49);
    let bp = BpDecoder::new(
        code,
        BpParams {
            max_iters,
            prior_flip_probability: prior,
        },
    )?;
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, flips as u64, t as u64));
            let support: Vec<usize> = rand::seq::index::sample(&mut rng, m, flips).into_vec();
            let y = BitVec::from_indices(m, &support);
            let s = code.syndrome_of_support(&support);
            let r = bp.decode(&s);
            r.is_decoded() && r.error == y
        })
        .count();
    Ok(WaterfallPoint {
        flips,
        trials,
        successes,
    })
}

/// Largest flip fraction with success rate ≥ `target`, by bracketing then
/// integer bisection. Returns the fraction and every evaluated point, sorted.
pub fn waterfall_threshold(
    code: &SymplecticCode,
    trials: usize,
    target: f64,
    seed: u64,
    max_iters: usize,
) -> Result<(f64, Vec<WaterfallPoint>)> {
    let m = code.num_bits();
    let mut curve: Vec<WaterfallPoint> = Vec::new();
    let eval = |f: usize, curve: &mut Vec<WaterfallPoint>| -> Result<f64> {
        let p = waterfall_point(code, f, trials, seed, max_iters)?;
        curve.push(p);
        Ok(p.rate())
    };
    let mut lo = 0usize;
    let mut hi = (m / 64).max(1);
    while eval(hi, &mut curve)? >= target {
        lo = hi;
        if hi >= m / 2 {
            curve.sort_by_key(|p| p.flips);
            return Ok((hi as f64 / m as f64, curve));
        }
        hi = (2 * hi).min(m / 2);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if eval(mid, &mut curve)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    curve.sort_by_key(|p| p.flips);
    Ok((lo as f64 / m as f64, curve))
}

pub fn waterfall_csv(curve: &[WaterfallPoint]) -> String {
    let mut out = String::from("flips,trials,successes,rate\n");
    for p in curve {
        out.push_str(&format!("{},{},{},{:.6}\n", p.flips, p.trials, p.successes, p.rate()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_code(rng: &mut ChaCha8Rng, rows: usize, m: usize) -> SymplecticCode {
        SymplecticCode::from_check_matrix(BitMatrix::random(rows, m, rng))
    }

    /// Random code with verified distance ≥ 2ℓ+1.
    fn code_with_distance(rng: &mut ChaCha8Rng, rows: usize, m: usize, ell: usize) -> SymplecticCode {
        loop {
            let c = random_code(rng, rows, m);
            if c.min_distance_bruteforce(m).unwrap().supports_radius(ell) {
                return c;
            }
        }
    }

    #[test]
    fn lookup_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = code_with_distance(&mut rng, 10, 8, 1);
        let d = LookupDecoder::build(&c, 1).unwrap();
        assert_eq!(d.decode(&BitVec::zeros(10)), DecodeResult::decoded(BitVec::zeros(8)));
        for i in 0..8 {
            assert_eq!(d.decode(&c.columns()[i]).error, BitVec::from_indices(8, &[i]));
        }
    }

    #[test]
    fn lookup_is_exact_within_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = code_with_distance(&mut rng, 13, 14, 2);
        let d = LookupDecoder::build(&c, 2).unwrap();
        for w in 0..=2 {
            for_each_combination::<()>(14, w, |s| {
                let e = BitVec::from_indices(14, s);
                assert_eq!(d.decode(&c.syndrome(&e).unwrap()), DecodeResult::decoded(e));
                std::ops::ControlFlow::Continue(())
            });
        }
        assert!(LookupDecoder::build_with_budget(&c, 2, 10).is_err());
    }

    #[test]
    fn ge_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = loop {
            let c = random_code(&mut rng, 20, 20);
            if c.dimension() == 0 {
                break c;
            }
        };
        let d = GeDecoder::build(&c).unwrap();
        assert_eq!(d.decode(&BitVec::zeros(20)).error, BitVec::zeros(20));
        for _ in 0..100 {
            let s = BitVec::random(20, &mut rng);
            let y = c.check_matrix().solve(&s).unwrap();
            assert_eq!(d.decode(&s), DecodeResult::decoded(y));
        }
    }

    #[test]
    fn ge_detects_inconsistent_syndromes_and_refuses_redundant_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = loop {
            let c = random_code(&mut rng, 12, 6);
            if c.dimension() == 0 {
                break c;
            }
        };
        let d = GeDecoder::build(&c).unwrap();
        let mut inconsistent = 0;
        for _ in 0..200 {
            let s = BitVec::random(12, &mut rng);
            let r = d.decode(&s);
            match c.check_matrix().solve(&s) {
                Some(y) => assert_eq!(r, DecodeResult::decoded(y)),
                None => {
                    inconsistent += 1;
                    assert_eq!(r.status, DecodeStatus::DetectedFailure);
                }
            }
        }
        assert!(inconsistent > 0);
        assert!(GeDecoder::build(&random_code(&mut rng, 4, 6)).is_err());
    }

    #[test]
    fn pruning_keeps_kernel_and_prefers_light_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut check = BitMatrix::random(12, 10, &mut rng);
            // duplicate a row to force a dependency
            let dup = check.row(0).clone();
            check = BitMatrix::from_rows(10, check.rows().iter().cloned().chain([dup]).collect());
            let kept = prune_checks(&check);
            let pruned = BitMatrix::from_rows(10, kept.iter().map(|&r| check.row(r).clone()).collect());
            assert_eq!(pruned.rank(), kept.len());
            assert_eq!(pruned.rank(), check.rank());
            assert_eq!(pruned.nullspace().len(), check.nullspace().len());
            for v in check.nullspace() {
                assert!(pruned.mul_vec(&v).unwrap().is_zero());
            }
            // reverse-delete oracle: drop the heaviest dependent row, ties to larger index
            let mut alive: Vec<usize> = (0..check.nrows()).collect();
            loop {
                let mut order = alive.clone();
                order.sort_by_key(|&r| std::cmp::Reverse((check.row(r).weight(), r)));
                let rank = BitMatrix::from_rows(10, alive.iter().map(|&r| check.row(r).clone()).collect()).rank();
                if rank == alive.len() {
                    break;
                }
                let victim = order.into_iter().find(|&v| {
                    let rest: Vec<BitVec> = alive.iter().filter(|&&r| r != v).map(|&r| check.row(r).clone()).collect();
                    BitMatrix::from_rows(10, rest).rank() == rank
                });
                alive.retain(|&r| Some(r) != victim);
            }
            assert_eq!(kept, alive);
        }
    }

    fn sparse_code(rng: &mut ChaCha8Rng, rows: usize, m: usize, col_weight: usize) -> SymplecticCode {
        let cols: Vec<BitVec> = (0..m)
            .map(|_| {
                let idx = rand::seq::index::sample(rng, rows, col_weight).into_vec();
                BitVec::from_indices(rows, &idx)
            })
            .collect();
        SymplecticCode::from_columns(rows, cols)
    }

    #[test]
    fn bp_zero_syndrome_takes_no_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = sparse_code(&mut rng, 150, 300, 3);
        let bp = BpDecoder::new(&c, BpParams::for_radius(1, 300)).unwrap();
        let (r, it) = bp.decode_with_stats(&BitVec::zeros(150));
        assert_eq!((r, it), (DecodeResult::decoded(BitVec::zeros(300)), 0));
    }

    #[test]
    fn bp_recovers_single_bit_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = sparse_code(&mut rng, 200, 300, 3);
        let bp = BpDecoder::new(&c, BpParams::for_radius(1, 300)).unwrap();
        let mut ok = 0;
        for _ in 0..50 {
            let i = rng.gen_range(0..300);
            let e = BitVec::from_indices(300, &[i]);
            let r = bp.decode(&c.syndrome(&e).unwrap());
            assert!(r.is_decoded());
            assert!(c.syndrome(&r.error).unwrap() == c.syndrome(&e).unwrap());
            if r.error == e {
                ok += 1;
            }
        }
        assert!(ok >= 45, "{ok}");
    }

    #[test]
    fn bp_never_reports_a_wrong_syndrome() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = sparse_code(&mut rng, 60, 90, 3);
        let bp = BpDecoder::new(&c, BpParams::for_radius(10, 90)).unwrap();
        for _ in 0..100 {
            let s = BitVec::random(60, &mut rng);
            let r = bp.decode(&s);
            if r.is_decoded() {
                assert_eq!(c.syndrome(&r.error).unwrap(), s);
            }
        }
    }

    #[test]
    fn oracle_is_an_involution_and_zeroes_correctable_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = code_with_distance(&mut rng, 12, 8, 1);
        let d = LookupDecoder::build(&c, 1).unwrap();
        for _ in 0..200 {
            let y = BitVec::random(8, &mut rng);
            let s = BitVec::random(12, &mut rng);
            let once = oracle_apply(&d, &y, &s);
            assert_eq!(oracle_apply(&d, &once, &s), y);
        }
        for i in 0..8 {
            let e = BitVec::from_indices(8, &[i]);
            assert!(oracle_apply(&d, &e, &c.syndrome(&e).unwrap()).is_zero());
            assert_eq!(oracle_apply(&ZeroDecoder(8), &e, &c.columns()[i]), e);
        }
    }

    #[test]
    fn faults_leave_exactly_the_failures_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let c = code_with_distance(&mut rng, 14, 10, 2);
        let d = LookupDecoder::build(&c, 2).unwrap();
        let (faulty, failed) = FaultyDecoder::inject(d, &c, 2, 0.2, 3).unwrap();
        assert_eq!(failed.len(), 0 + 2 + 9);
        let failed: HashSet<BitVec> = failed.into_iter().collect();
        for w in 0..=2 {
            for_each_combination::<()>(10, w, |s| {
                let e = BitVec::from_indices(10, s);
                let out = oracle_apply(&faulty, &e, &c.syndrome(&e).unwrap());
                assert_eq!(!out.is_zero(), failed.contains(&e));
                std::ops::ControlFlow::Continue(())
            });
        }
    }

    #[test]
    fn waterfall_noiseless_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = sparse_code(&mut rng, 200, 300, 3);
        assert_eq!(waterfall_point(&c, 0, 10, 1, 100).unwrap().rate(), 1.0);
        let rates: Vec<f64> = [2, 10, 40]
            .iter()
            .map(|&f| waterfall_point(&c, f, 60, 2, 100).unwrap().rate())
            .collect();
        assert!(rates[0] + 0.1 >= rates[1] && rates[1] + 0.1 >= rates[2], "{rates:?}");
        let (frac, curve) = waterfall_threshold(&c, 40, 0.5, 3, 50).unwrap();
        assert!(frac > 0.0 && frac < 0.5);
        assert!(waterfall_csv(&curve).starts_with("flips,trials,successes,rate\n"));
    }
}
