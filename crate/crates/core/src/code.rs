//! The classical code whose parity-check matrix has the symplectic vectors of
//! the Hamiltonian terms as columns.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{ball_size, for_each_combination};
use crate::error::{HdqiError, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::PauliHamiltonian;

/// Kernel dimension up to which the distance is found by scanning the whole kernel.
const KERNEL_SCAN_MAX_DIM: usize = 22;
/// Largest number of candidate supports a weight-ordered distance search may visit.
const DISTANCE_BUDGET: u128 = 1 << 31;
const EXPANSION_BUDGET: u128 = 1 << 28;

/// Minimum distance as far as it was resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    Exact(usize),
    /// The kernel is trivial.
    Infinite,
    /// No nonzero codeword of weight at most the cap.
    GreaterThan(usize),
}

impl Distance {
    /// Whether a decoder of radius `ell` is guaranteed unique.
    pub fn supports_radius(self, ell: usize) -> bool {
        match self {
            Distance::Exact(d) => 2 * ell < d,
            Distance::Infinite => true,
            Distance::GreaterThan(c) => 2 * ell <= c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticCode {
    /// `Bᵀ`, 2n × m.
    check: BitMatrix,
    /// Column `i` of `Bᵀ`, i.e. `symp(P_i)`.
    columns: Vec<BitVec>,
    rank: usize,
    pub distance: Option<Distance>,
}

impl SymplecticCode {
    pub fn from_hamiltonian(h: &PauliHamiltonian) -> Self {
        let columns: Vec<BitVec> = h.words().map(|w| w.symp()).collect();
        Self::from_columns(2 * h.num_qubits(), columns)
    }

    pub fn from_columns(nrows: usize, columns: Vec<BitVec>) -> Self {
        let check = BitMatrix::from_columns(nrows, &columns);
        let rank = check.rank();
        Self {
            check,
            columns,
            rank,
            distance: None,
        }
    }

    pub fn from_check_matrix(check: BitMatrix) -> Self {
        let columns = check.columns();
        let rank = check.rank();
        Self {
            check,
            columns,
            rank,
            distance: None,
        }
    }

    pub fn check_matrix(&self) -> &BitMatrix {
        &self.check
    }

    pub fn columns(&self) -> &[BitVec] {
        &self.columns
    }

    pub fn num_bits(&self) -> usize {
        self.columns.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dimension(&self) -> usize {
        self.num_bits() - self.rank
    }

    pub fn syndrome(&self, y: &BitVec) -> Result<BitVec> {
        if y.len() != self.num_bits() {
            return Err(HdqiError::DimensionMismatch {
                expected: self.num_bits(),
                found: y.len(),
            });
        }
        let mut s = BitVec::zeros(self.num_checks());
        for i in y.iter_ones() {
            s.xor_assign(&self.columns[i]);
        }
        Ok(s)
    }

    pub fn syndrome_of_support(&self, support: &[usize]) -> BitVec {
        let mut s = BitVec::zeros(self.num_checks());
        for &i in support {
            s.xor_assign(&self.columns[i]);
        }
        s
    }

    /// Basis of `ker Bᵀ`, vectors of length m.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        self.check.nullspace()
    }

    /// Minimum weight of a nonzero codeword, resolved up to `weight_cap`.
    ///
    /// Scans the whole kernel when it is small, otherwise enumerates supports by
    /// increasing weight. Refuses rather than guessing when neither fits the budget.
    pub fn min_distance_bruteforce(&self, weight_cap: usize) -> Result<Distance> {
        let k = self.dimension();
        if k == 0 {
            return Ok(Distance::Infinite);
        }
        let m = self.num_bits();
        let cap = weight_cap.min(m);
        if k <= KERNEL_SCAN_MAX_DIM {
            let d = min_weight_of_span(&self.kernel_basis());
            return Ok(if d <= cap {
                Distance::Exact(d)
            } else {
                Distance::GreaterThan(cap)
            });
        }
        if !(m <= 30 || cap <= 6) {
            return Err(HdqiError::BudgetExceeded {
                what: "distance enumeration (needs m ≤ 30 or cap ≤ 6)",
                needed: ball_size(m, cap),
                limit: DISTANCE_BUDGET,
            });
        }
        let needed = ball_size(m, cap);
        if needed > DISTANCE_BUDGET {
            return Err(HdqiError::BudgetExceeded {
                what: "distance enumeration",
                needed,
                limit: DISTANCE_BUDGET,
            });
        }
        for w in 1..=cap {
            let hit = for_each_combination(m, w, |c| {
                if self.syndrome_of_support(c).is_zero() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if hit.is_some() {
                return Ok(Distance::Exact(w));
            }
        }
        Ok(Distance::GreaterThan(cap))
    }

    /// Computes and caches the distance.
    pub fn compute_distance(&mut self, weight_cap: usize) -> Result<Distance> {
        let d = self.min_distance_bruteforce(weight_cap)?;
        self.distance = Some(d);
        Ok(d)
    }

    pub fn tanner_graph(&self) -> TannerGraph {
        TannerGraph::new(&self.check)
    }

    /// Sparse text export: `N M`, max degrees, degree lists, then 1-based
    /// adjacency per column and per row. Zero rows are kept.
    pub fn to_alist(&self) -> String {
        let m = self.num_bits();
        let r = self.num_checks();
        let col_adj: Vec<Vec<usize>> = self.columns.iter().map(|c| c.iter_ones().collect()).collect();
        let row_adj: Vec<Vec<usize>> = self.check.rows().iter().map(|row| row.iter_ones().collect()).collect();
        let mut out = String::new();
        let line = |out: &mut String, xs: &mut dyn Iterator<Item = usize>| {
            let v: Vec<String> = xs.map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", v.join(" "));
        };
        let _ = writeln!(out, "{m} {r}");
        let _ = writeln!(
            out,
            "{} {}",
            col_adj.iter().map(Vec::len).max().unwrap_or(0),
            row_adj.iter().map(Vec::len).max().unwrap_or(0)
        );
        line(&mut out, &mut col_adj.iter().map(Vec::len));
        line(&mut out, &mut row_adj.iter().map(Vec::len));
        for c in &col_adj {
            line(&mut out, &mut c.iter().map(|x| x + 1));
        }
        for row in &row_adj {
            line(&mut out, &mut row.iter().map(|x| x + 1));
        }
        out
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, l) = lines.next().ok_or_else(|| HdqiError::Parse {
                line: 0,
                msg: format!("missing {what}"),
            })?;
            let nums = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| HdqiError::Parse {
                        line: no + 1,
                        msg: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no + 1, nums))
        };
        let (no, head) = next_nums("header")?;
        let [m, r] = head[..] else {
            return Err(HdqiError::Parse {
                line: no,
                msg: "expected `N M`".into(),
            });
        };
        next_nums("max degrees")?;
        next_nums("column degrees")?;
        next_nums("row degrees")?;
        let mut cols = Vec::with_capacity(m);
        for _ in 0..m {
            let (no, idx) = next_nums("column adjacency")?;
            let mut c = BitVec::zeros(r);
            for i in idx {
                if i == 0 || i > r {
                    return Err(HdqiError::Parse {
                        line: no,
                        msg: format!("row index {i} out of range"),
                    });
                }
                c.set(i - 1, true);
            }
            cols.push(c);
        }
        Ok(Self::from_columns(r, cols))
    }
}

/// Minimum nonzero weight over the span of independent `basis` vectors (Gray-code scan).
pub fn min_weight_of_span(basis: &[BitVec]) -> usize {
    let Some(first) = basis.first() else {
        return usize::MAX;
    };
    let k = basis.len();
    let mut cur = BitVec::zeros(first.len());
    let mut best = usize::MAX;
    for step in 1u64..(1u64 << k) {
        cur.xor_assign(&basis[step.trailing_zeros() as usize]);
        best = best.min(cur.weight());
    }
    best
}

/// Bipartite graph between data nodes (terms) and the nonzero rows of `Bᵀ`.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    /// Original row index of each check node.
    pub check_rows: Vec<usize>,
    pub data_adj: Vec<Vec<usize>>,
    pub check_adj: Vec<Vec<usize>>,
    /// Neighbourhood of each data node as a mask over check nodes.
    masks: Vec<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// `|Γ(S)| ≥ γ|S|` for every `S` up to the given size.
    Holds { max_subset: usize },
    Violated { subset: Vec<usize>, neighbours: usize },
}

impl TannerGraph {
    pub fn new(check: &BitMatrix) -> Self {
        let check_rows: Vec<usize> = (0..check.nrows()).filter(|&r| !check.row(r).is_zero()).collect();
        let m = check.ncols();
        let mut data_adj = vec![Vec::new(); m];
        let mut check_adj = Vec::with_capacity(check_rows.len());
        for (c, &r) in check_rows.iter().enumerate() {
            let row: Vec<usize> = check.row(r).iter_ones().collect();
            for &d in &row {
                data_adj[d].push(c);
            }
            check_adj.push(row);
        }
        let masks = data_adj
            .iter()
            .map(|adj| BitVec::from_indices(check_rows.len(), adj))
            .collect();
        Self {
            check_rows,
            data_adj,
            check_adj,
            masks,
        }
    }

    pub fn num_data(&self) -> usize {
        self.data_adj.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check_adj.len()
    }

    pub fn max_data_degree(&self) -> usize {
        self.data_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `|Γ(S)|` and `|Γ₁(S)|` (checks with exactly one neighbour in `S`).
    pub fn neighbourhood(&self, subset: &[usize]) -> (usize, usize) {
        let nc = self.num_checks();
        let mut once = BitVec::zeros(nc);
        let mut twice = BitVec::zeros(nc);
        for &d in subset {
            let hit = once.and(&self.masks[d]);
            twice.or_assign(&hit);
            once.or_assign(&self.masks[d]);
        }
        let all = once.weight();
        once.and_not_assign(&twice);
        (all, once.weight())
    }

    /// Exhaustive `(δ, γ)` expansion check over `|S| ≤ min(⌊δm⌋, subset_cap)`.
    pub fn expansion_check(&self, delta: f64, gamma: f64, subset_cap: usize) -> Result<Expansion> {
        self.expansion_scan(delta, gamma, subset_cap, false)
    }

    /// Same scan with `|Γ₁(S)|` in place of `|Γ(S)|`.
    pub fn unique_expansion_check(&self, delta: f64, gamma: f64, subset_cap: usize) -> Result<Expansion> {
        self.expansion_scan(delta, gamma, subset_cap, true)
    }

    fn expansion_scan(&self, delta: f64, gamma: f64, subset_cap: usize, unique: bool) -> Result<Expansion> {
        let m = self.num_data();
        let max_subset = ((delta * m as f64).floor() as usize).min(subset_cap).min(m);
        let needed = ball_size(m, max_subset);
        if needed > EXPANSION_BUDGET {
            return Err(HdqiError::BudgetExceeded {
                what: "expansion subset enumeration",
                needed,
                limit: EXPANSION_BUDGET,
            });
        }
        for s in 1..=max_subset {
            let bad = for_each_combination(m, s, |c| {
                let (all, uniq) = self.neighbourhood(c);
                let got = if unique { uniq } else { all };
                if (got as f64) < gamma * s as f64 {
                    ControlFlow::Break((c.to_vec(), got))
                } else {
                    ControlFlow::Continue(())
                }
            });
            if let Some((subset, neighbours)) = bad {
                return Ok(Expansion::Violated { subset, neighbours });
            }
        }
        Ok(Expansion::Holds { max_subset })
    }
}
