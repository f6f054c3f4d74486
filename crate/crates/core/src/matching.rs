//! One-to-one matchings between two equal-size configurations and the
//! distance `W_d = sqrt(sum_i D[i][target_of[i]]^2)` they induce.
//!
//! Three solvers share the [`CostMatrix`] input:
//! - [`exact_assignment_bruteforce`] enumerates every permutation (n <= 10);
//! - [`exact_assignment_poly`] solves the same problem as a linear assignment
//!   on squared costs with a shortest-augmenting-path Hungarian method;
//! - [`greedy_distance`] runs rounds of nearest-available association until
//!   every target is taken.
//!
//! Ties are always broken towards the lowest index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::PointConfiguration;

pub const BRUTEFORCE_MAX_N: usize = 10;

/// Square matrix of non-negative finite chord distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InsufficientPoints { needed: 1, got: 0 });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::CardinalityMismatch {
                    source_len: n,
                    target_len: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(Error::InvalidCost { row: i, col: j, value });
                }
                entries.push(value);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Self { n, entries }
    }

    /// `sqrt(sum_i D[i][target_of[i]]^2)`.
    pub fn matching_distance(&self, assignment: &Assignment) -> f64 {
        assignment
            .target_of()
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let d = self.get(i, j);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Chord distances from every source point to every target point.
pub fn build_cost_matrix(source: &PointConfiguration, target: &PointConfiguration) -> Result<CostMatrix> {
    if source.len() != target.len() {
        return Err(Error::CardinalityMismatch {
            source_len: source.len(),
            target_len: target.len(),
        });
    }
    if source.radius_km() != target.radius_km() {
        return Err(Error::RadiusMismatch {
            left: source.radius_km(),
            right: target.radius_km(),
        });
    }
    let n = source.len();
    let radius = source.radius_km();
    // |u_i - u_j| of the unit vectors equals the chord on the unit sphere and
    // keeps the inner loop free of trig calls.
    let units = |c: &PointConfiguration| -> Vec<[f64; 3]> { c.points().iter().map(|p| p.unit_vector()).collect() };
    let src = units(source);
    let dst = units(target);
    let mut entries = Vec::with_capacity(n * n);
    for a in &src {
        for b in &dst {
            let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
            entries.push(radius * d2.sqrt());
        }
    }
    Ok(CostMatrix { n, entries })
}

/// A bijection from sources to targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    target_of: Vec<usize>,
}

impl Assignment {
    pub fn new(target_of: Vec<usize>) -> Result<Self> {
        let n = target_of.len();
        let mut seen = vec![false; n];
        for &j in &target_of {
            if j >= n || seen[j] {
                return Err(Error::Internal(format!("{target_of:?} is not a permutation")));
            }
            seen[j] = true;
        }
        Ok(Self { target_of })
    }

    pub fn target_of(&self) -> &[usize] {
        &self.target_of
    }

    pub fn is_permutation(&self) -> bool {
        Self::new(self.target_of.clone()).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchOutcome {
    pub assignment: Assignment,
    pub distance_km: f64,
    /// Association rounds used by the greedy solver; `None` for exact solvers.
    pub rounds: Option<usize>,
}

/// Minimum-distance matching by enumerating all `n!` permutations in
/// lexicographic order; the first optimum found wins ties.
pub fn exact_assignment_bruteforce(d: &CostMatrix) -> Result<MatchOutcome> {
    let n = d.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::SizeLimit {
            n,
            max: BRUTEFORCE_MAX_N,
        });
    }
    let sq: Vec<f64> = d.entries.iter().map(|x| x * x).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        let cost: f64 = perm.iter().enumerate().map(|(i, &j)| sq[i * n + j]).sum();
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(MatchOutcome {
        assignment: Assignment { target_of: best },
        distance_km: best_cost.sqrt(),
        rounds: None,
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exact matching in O(n^3): Hungarian method with row/column potentials on
/// the squared distances. Minimising `sum D^2` minimises its square root.
pub fn exact_assignment_poly(d: &CostMatrix) -> Result<MatchOutcome> {
    let n = d.n();
    for (k, &value) in d.entries.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::InvalidCost {
                row: k / n,
                col: k % n,
                value,
            });
        }
    }
    let cost = |i: usize, j: usize| {
        let x = d.get(i - 1, j - 1);
        x * x
    };
    // 1-based; column 0 is the virtual root of each augmenting search
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let i0 = row_of[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            if col1 == 0 {
                return Err(Error::Internal("assignment search found no free column".into()));
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if row_of[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of[col0] = row_of[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut target_of = vec![0usize; n];
    for j in 1..=n {
        target_of[row_of[j] - 1] = j - 1;
    }
    let assignment = Assignment::new(target_of)?;
    let distance_km = d.matching_distance(&assignment);
    Ok(MatchOutcome {
        assignment,
        distance_km,
        rounds: None,
    })
}

/// Working vectors of the greedy association.
///
/// `index_vec[i]` is the target currently held by source `i`;
/// `count_vec[j]` is 1 once target `j` is taken; `temp_count_vec` holds the
/// claims of the round in progress and `delta_km` the distance added by the
/// last completed round.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    pub index_vec: Vec<Option<usize>>,
    pub count_vec: Vec<u8>,
    pub temp_count_vec: Vec<usize>,
    pub delta_km: f64,
}

impl GreedyState {
    pub fn new(n: usize) -> Self {
        Self {
            index_vec: vec![None; n],
            count_vec: vec![0; n],
            temp_count_vec: vec![0; n],
            delta_km: 0.0,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.count_vec.iter().all(|&c| c == 1)
    }

    pub fn taken(&self) -> usize {
        self.count_vec.iter().filter(|&&c| c == 1).count()
    }
}

/// One association round.
///
/// Every free source claims its nearest free target. Each claimed target is
/// then taken by the nearest of its claimants; the other claimants are
/// released for the next round.
pub fn greedy_round(d: &CostMatrix, mut state: GreedyState) -> Result<GreedyState> {
    let n = d.n();
    if state.index_vec.len() != n || state.count_vec.len() != n || state.temp_count_vec.len() != n {
        return Err(Error::Internal("greedy state does not match the cost matrix".into()));
    }
    if state.is_complete() {
        return Err(Error::Internal("greedy round called with every target taken".into()));
    }
    if state.index_vec.iter().all(Option::is_some) {
        return Err(Error::Internal("free target left but every source is associated".into()));
    }
    state.temp_count_vec.iter_mut().for_each(|c| *c = 0);
    let mut winner = vec![usize::MAX; n];
    let mut claimants = Vec::new();

    // ascending, so a strict `<` keeps the lowest target on ties
    let free: Vec<usize> = (0..n).filter(|&j| state.count_vec[j] == 0).collect();
    for i in 0..n {
        if state.index_vec[i].is_some() {
            continue;
        }
        let row = d.row(i);
        let mut best = free[0];
        let mut best_d = row[best];
        for &j in &free[1..] {
            if row[j] < best_d {
                best = j;
                best_d = row[j];
            }
        }
        let j = best;
        state.index_vec[i] = Some(j);
        state.temp_count_vec[j] += 1;
        if winner[j] == usize::MAX || dij_less(d, i, winner[j], j) {
            winner[j] = i;
        }
        claimants.push(i);
    }

    let mut delta_sq = 0.0;
    for (j, &w) in winner.iter().enumerate() {
        if state.temp_count_vec[j] >= 1 {
            state.count_vec[j] = 1;
            let dist = d.get(w, j);
            delta_sq += dist * dist;
        }
    }
    for i in claimants {
        let j = state.index_vec[i].expect("claimed this round");
        if winner[j] != i {
            state.index_vec[i] = None;
        }
    }
    state.delta_km = delta_sq.sqrt();
    Ok(state)
}

#[inline]
fn dij_less(d: &CostMatrix, i: usize, incumbent: usize, j: usize) -> bool {
    d.get(i, j) < d.get(incumbent, j)
}

/// Runs [`greedy_round`] until every target is taken.
pub fn greedy_match(d: &CostMatrix) -> Result<MatchOutcome> {
    let n = d.n();
    let mut state = GreedyState::new(n);
    let mut total_sq = 0.0;
    let mut rounds = 0;
    while !state.is_complete() {
        let before = state.taken();
        state = greedy_round(d, state)?;
        rounds += 1;
        if state.taken() <= before || rounds > n {
            return Err(Error::Internal("greedy round made no progress".into()));
        }
        total_sq += state.delta_km * state.delta_km;
    }
    let target_of = state
        .index_vec
        .iter()
        .map(|j| j.ok_or_else(|| Error::Internal("source left unassociated".into())))
        .collect::<Result<Vec<_>>>()?;
    let assignment = Assignment::new(target_of)?;
    // Same value as the per-round accumulation, summed in source order so that
    // an optimal greedy matching compares equal to the exact solvers.
    let distance_km = d.matching_distance(&assignment);
    debug_assert!((distance_km - total_sq.sqrt()).abs() <= 1e-9 * distance_km.max(1.0));
    Ok(MatchOutcome {
        assignment,
        distance_km,
        rounds: Some(rounds),
    })
}

pub fn greedy_distance(source: &PointConfiguration, target: &PointConfiguration) -> Result<MatchOutcome> {
    greedy_match(&build_cost_matrix(source, target)?)
}
