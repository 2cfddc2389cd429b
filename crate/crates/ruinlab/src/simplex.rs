//! Enumeration and indexing of the lattice simplex.
//!
//! States of the k-player game are the integer points of the simplex
//! `{ x : x_i >= 0, sum x_i = N }`. Interior states have every coordinate
//! positive; the chain is absorbed on the reachable boundary, where exactly
//! one coordinate is zero. Corner points with two or more zeros exist as
//! `ChipConfig` values but are excluded from every index: the game cannot
//! reach them.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A distribution of chips among `k` players.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ChipConfig {
    chips: Vec<u64>,
}

/// A single-chip transfer: `donor` loses one chip, `recipient` gains one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Move {
    pub donor: usize,
    pub recipient: usize,
}

impl fmt::Display for ChipConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chips.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl ChipConfig {
    pub fn new(chips: Vec<u64>) -> Result<Self> {
        if chips.len() < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 players, got {}",
                chips.len()
            )));
        }
        Ok(Self { chips })
    }

    pub fn chips(&self) -> &[u64] {
        &self.chips
    }

    /// Number of players.
    pub fn k(&self) -> usize {
        self.chips.len()
    }

    /// Total chip count `N`.
    pub fn total(&self) -> u64 {
        self.chips.iter().sum()
    }

    /// All coordinates strictly positive.
    pub fn is_interior(&self) -> bool {
        self.chips.iter().all(|&c| c > 0)
    }

    pub fn zero_count(&self) -> usize {
        self.chips.iter().filter(|&&c| c == 0).count()
    }

    /// Exactly one coordinate zero: a state the chain can be absorbed at.
    pub fn is_reachable_boundary(&self) -> bool {
        self.zero_count() == 1
    }

    /// The player holding zero chips, for a reachable-boundary state.
    pub fn ruined_player(&self) -> Option<usize> {
        if self.is_reachable_boundary() {
            self.chips.iter().position(|&c| c == 0)
        } else {
            None
        }
    }

    /// Target of one move, or `None` when the donor has no chip to give
    /// (the move would leave the nonnegative orthant).
    pub fn apply_move(&self, mv: Move) -> Option<ChipConfig> {
        if self.chips[mv.donor] == 0 {
            return None;
        }
        let mut chips = self.chips.clone();
        chips[mv.donor] -= 1;
        chips[mv.recipient] += 1;
        Some(ChipConfig { chips })
    }

    /// All `2*C(k,2)` candidate moves, in pair order `(0,1), (0,2), ...`
    /// with both directions per pair. Moves leaving the orthant carry a
    /// `None` target.
    pub fn neighbors(&self) -> Vec<(Move, Option<ChipConfig>)> {
        let k = self.k();
        let mut out = Vec::with_capacity(k * (k - 1));
        for i in 0..k {
            for j in (i + 1)..k {
                for (donor, recipient) in [(i, j), (j, i)] {
                    let mv = Move { donor, recipient };
                    out.push((mv, self.apply_move(mv)));
                }
            }
        }
        out
    }

    /// Interior states one move away from a reachable-boundary state: the
    /// set through which the chain can exit here. Always nonempty.
    pub fn interior_neighbors_of_boundary(&self) -> Result<Vec<ChipConfig>> {
        if !self.is_reachable_boundary() {
            return Err(Error::Invalid(format!(
                "{self} does not have exactly one zero coordinate"
            )));
        }
        Ok(self
            .neighbors()
            .into_iter()
            .filter_map(|(_, target)| target)
            .filter(ChipConfig::is_interior)
            .collect())
    }

    /// Euclidean distance within the hyperplane `sum x_i = N`.
    pub fn distance(&self, other: &ChipConfig) -> Result<f64> {
        if self.k() != other.k() || self.total() != other.total() {
            return Err(Error::Invalid(format!(
                "distance between incompatible states {self} and {other}"
            )));
        }
        let sq: u128 = self
            .chips
            .iter()
            .zip(&other.chips)
            .map(|(&a, &b)| {
                let d = a.abs_diff(b) as u128;
                d * d
            })
            .sum();
        Ok((sq as f64).sqrt())
    }
}

/// Exact binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dense, lexicographically ordered index of the interior and reachable
/// boundary of the simplex for fixed `(k, N)`.
#[derive(Debug)]
pub struct SimplexIndex {
    k: usize,
    n: u64,
    interior: Vec<ChipConfig>,
    boundary: Vec<ChipConfig>,
    interior_rank: HashMap<ChipConfig, usize>,
    boundary_rank: HashMap<ChipConfig, usize>,
    faces: Vec<Vec<usize>>,
}

/// All compositions of `n` into `k` strictly positive parts, in
/// lexicographic order.
fn positive_compositions(k: usize, n: u64) -> Vec<Vec<u64>> {
    fn rec(buf: &mut Vec<u64>, pos: usize, remaining: u64, out: &mut Vec<Vec<u64>>) {
        let k = buf.len();
        if pos == k - 1 {
            buf[pos] = remaining;
            out.push(buf.clone());
            return;
        }
        let reserve = (k - 1 - pos) as u64;
        for v in 1..=(remaining - reserve) {
            buf[pos] = v;
            rec(buf, pos + 1, remaining - v, out);
        }
    }
    let mut out = Vec::new();
    let mut buf = vec![0u64; k];
    rec(&mut buf, 0, n, &mut out);
    out
}

impl SimplexIndex {
    /// Enumerate all interior and reachable-boundary states.
    ///
    /// Interior count is `C(N-1, k-1)`, boundary count `k*C(N-1, k-2)`;
    /// both enumerations are lexicographic in the chip vector, which is the
    /// canonical order for every cached or exported vector.
    pub fn new(k: usize, n: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid(format!("need k >= 2 players, got {k}")));
        }
        if n < k as u64 {
            return Err(Error::Invalid(format!(
                "need N >= k so the interior is nonempty, got k={k}, N={n}"
            )));
        }
        let interior: Vec<ChipConfig> = positive_compositions(k, n)
            .into_iter()
            .map(|chips| ChipConfig { chips })
            .collect();
        debug_assert_eq!(interior.len() as u128, binomial(n - 1, k as u64 - 1));

        let mut boundary: Vec<ChipConfig> = Vec::new();
        for player in 0..k {
            for rest in positive_compositions(k - 1, n) {
                let mut chips = Vec::with_capacity(k);
                chips.extend_from_slice(&rest[..player]);
                chips.push(0);
                chips.extend_from_slice(&rest[player..]);
                boundary.push(ChipConfig { chips });
            }
        }
        boundary.sort_unstable_by(|a, b| a.chips.cmp(&b.chips));

        let interior_rank = interior
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let boundary_rank: HashMap<ChipConfig, usize> = boundary
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        let mut faces = vec![Vec::new(); k];
        for (i, z) in boundary.iter().enumerate() {
            faces[z.ruined_player().expect("boundary state has one zero")].push(i);
        }

        Ok(Self {
            k,
            n,
            interior,
            boundary,
            interior_rank,
            boundary_rank,
            faces,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn interior_states(&self) -> &[ChipConfig] {
        &self.interior
    }

    pub fn boundary_states(&self) -> &[ChipConfig] {
        &self.boundary
    }

    pub fn interior_state(&self, i: usize) -> &ChipConfig {
        &self.interior[i]
    }

    pub fn boundary_state(&self, i: usize) -> &ChipConfig {
        &self.boundary[i]
    }

    pub fn interior_index(&self, x: &ChipConfig) -> Option<usize> {
        self.interior_rank.get(x).copied()
    }

    pub fn boundary_index(&self, z: &ChipConfig) -> Option<usize> {
        self.boundary_rank.get(z).copied()
    }

    /// Boundary indices of the face where `player` is ruined.
    pub fn face(&self, player: usize) -> Result<&[usize]> {
        if player >= self.k {
            return Err(Error::Invalid(format!(
                "face index {player} out of range for k={}",
                self.k
            )));
        }
        Ok(&self.faces[player])
    }

    /// Index of the lexicographically first interior state closest to the
    /// center `(N/k, ..., N/k)`. Comparison is exact: it minimizes the
    /// integer `sum (k*x_i - N)^2`.
    pub fn center_state(&self) -> usize {
        let k = self.k as i128;
        let n = self.n as i128;
        let mut best = 0usize;
        let mut best_cost = i128::MAX;
        for (i, s) in self.interior.iter().enumerate() {
            let cost: i128 = s
                .chips
                .iter()
                .map(|&c| {
                    let d = k * c as i128 - n;
                    d * d
                })
                .sum();
            if cost < best_cost {
                best_cost = cost;
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(chips: &[u64]) -> ChipConfig {
        ChipConfig::new(chips.to_vec()).unwrap()
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(SimplexIndex::new(1, 5).is_err());
        assert!(SimplexIndex::new(3, 2).is_err());
        assert!(ChipConfig::new(vec![4]).is_err());
    }

    #[test]
    fn smallest_simplices_have_one_state() {
        let idx = SimplexIndex::new(3, 3).unwrap();
        assert_eq!(idx.interior_count(), 1);
        assert_eq!(idx.interior_state(0), &cfg(&[1, 1, 1]));

        let idx = SimplexIndex::new(4, 4).unwrap();
        assert_eq!(idx.interior_count(), 1);
        assert_eq!(idx.interior_state(0), &cfg(&[1, 1, 1, 1]));
    }

    #[test]
    fn k3_n4_interior_enumeration_is_lexicographic() {
        let idx = SimplexIndex::new(3, 4).unwrap();
        assert_eq!(idx.interior_count(), 3);
        let expect = [[1, 1, 2], [1, 2, 1], [2, 1, 1]];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(idx.interior_state(i), &cfg(e));
        }
    }

    /// All points of the closed simplex, by brute force.
    fn closed_simplex_scan(k: usize, n: u64) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut buf = vec![0u64; k];
        fn rec(buf: &mut Vec<u64>, pos: usize, rem: u64, out: &mut Vec<Vec<u64>>) {
            if pos == buf.len() - 1 {
                buf[pos] = rem;
                out.push(buf.clone());
                return;
            }
            for v in 0..=rem {
                buf[pos] = v;
                rec(buf, pos + 1, rem - v, out);
            }
        }
        rec(&mut buf, 0, n, &mut out);
        out
    }

    #[test]
    fn counts_match_binomials_and_direct_scan() {
        for (k, n) in [(2, 7), (3, 9), (3, 16), (4, 9), (5, 8)] {
            let idx = SimplexIndex::new(k, n).unwrap();
            assert_eq!(
                idx.interior_count() as u128,
                binomial(n - 1, k as u64 - 1),
                "interior count for k={k}, N={n}"
            );
            assert_eq!(
                idx.boundary_count() as u128,
                k as u128 * binomial(n - 1, k as u64 - 2),
                "boundary count for k={k}, N={n}"
            );
            // Same counts two other ways: face partition and a direct scan
            // of the closed simplex.
            let by_faces: usize = (0..k).map(|p| idx.face(p).unwrap().len()).sum();
            assert_eq!(by_faces, idx.boundary_count());
            let scan = closed_simplex_scan(k, n);
            let interior_scan = scan.iter().filter(|c| c.iter().all(|&x| x > 0)).count();
            let boundary_scan = scan
                .iter()
                .filter(|c| c.iter().filter(|&&x| x == 0).count() == 1)
                .count();
            assert_eq!(interior_scan, idx.interior_count());
            assert_eq!(boundary_scan, idx.boundary_count());
        }
    }

    #[test]
    fn neighbors_of_central_state_all_exit() {
        let x = cfg(&[1, 1, 1]);
        let moves = x.neighbors();
        assert_eq!(moves.len(), 6);
        for (_, target) in moves {
            let t = target.expect("all donors hold a chip");
            assert!(t.is_reachable_boundary());
        }
    }

    #[test]
    fn interior_neighbor_targets_enumerated() {
        let x = cfg(&[1, 1, 2]);
        let mut interior: Vec<ChipConfig> = x
            .neighbors()
            .into_iter()
            .filter_map(|(_, t)| t)
            .filter(ChipConfig::is_interior)
            .collect();
        interior.sort_unstable_by(|a, b| a.chips.cmp(&b.chips));
        assert_eq!(interior, vec![cfg(&[1, 2, 1]), cfg(&[2, 1, 1])]);
    }

    #[test]
    fn dominant_start_interior_moves_counted_by_enumeration() {
        // Oracle: direct enumeration. A move stays interior iff it does not
        // decrement a coordinate equal to one, so the three moves that take
        // a chip from the dominant player are the interior ones.
        let n = 40u64;
        let x = cfg(&[1, 1, 1, n - 3]);
        let moves = x.neighbors();
        assert_eq!(moves.len(), 12);
        let interior = moves
            .iter()
            .filter(|(_, t)| t.as_ref().is_some_and(ChipConfig::is_interior))
            .count();
        let by_rule = moves
            .iter()
            .filter(|(mv, _)| x.chips()[mv.donor] > 1)
            .count();
        assert_eq!(interior, by_rule);
        assert_eq!(interior, 3);
    }

    #[test]
    fn exit_sets_of_boundary_states() {
        let z = cfg(&[0, 1, 3]);
        assert_eq!(
            z.interior_neighbors_of_boundary().unwrap(),
            vec![cfg(&[1, 1, 2])]
        );

        let z = cfg(&[0, 2, 2]);
        let mut got = z.interior_neighbors_of_boundary().unwrap();
        got.sort_unstable_by(|a, b| a.chips.cmp(&b.chips));
        assert_eq!(got, vec![cfg(&[1, 1, 2]), cfg(&[1, 2, 1])]);

        // Corners are rejected.
        assert!(cfg(&[0, 0, 4]).interior_neighbors_of_boundary().is_err());
        assert!(cfg(&[1, 1, 2]).interior_neighbors_of_boundary().is_err());
    }

    #[test]
    fn distances() {
        let a = cfg(&[1, 1, 2]);
        assert_eq!(a.distance(&a).unwrap(), 0.0);
        assert!((a.distance(&cfg(&[2, 1, 1])).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(a.distance(&cfg(&[1, 1, 3])).is_err());
        assert!(a.distance(&cfg(&[1, 1, 1, 1])).is_err());

        // Distance from the dominant-player corner to the opposite face is
        // at least (N-3)/sqrt(2); the oracle minimizes over the whole face.
        let n = 24u64;
        let idx = SimplexIndex::new(4, n).unwrap();
        let s = cfg(&[1, 1, 1, n - 3]);
        let min_d = idx
            .face(3)
            .unwrap()
            .iter()
            .map(|&zi| s.distance(idx.boundary_state(zi)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min_d >= (n - 3) as f64 / 2f64.sqrt());
    }

    #[test]
    fn face_listings() {
        let idx = SimplexIndex::new(3, 4).unwrap();
        let face0: Vec<&ChipConfig> = idx
            .face(0)
            .unwrap()
            .iter()
            .map(|&i| idx.boundary_state(i))
            .collect();
        assert_eq!(
            face0,
            vec![&cfg(&[0, 1, 3]), &cfg(&[0, 2, 2]), &cfg(&[0, 3, 1])]
        );

        let idx = SimplexIndex::new(4, 4).unwrap();
        let face3: Vec<&ChipConfig> = idx
            .face(3)
            .unwrap()
            .iter()
            .map(|&i| idx.boundary_state(i))
            .collect();
        assert_eq!(
            face3,
            vec![&cfg(&[1, 1, 2, 0]), &cfg(&[1, 2, 1, 0]), &cfg(&[2, 1, 1, 0])]
        );

        assert!(idx.face(4).is_err());
    }

    #[test]
    fn boundary_states_have_exactly_one_zero() {
        let idx = SimplexIndex::new(4, 7).unwrap();
        for z in idx.boundary_states() {
            assert_eq!(z.zero_count(), 1);
        }
    }

    #[test]
    fn exit_set_members_are_interior_and_adjacent() {
        let idx = SimplexIndex::new(4, 8).unwrap();
        for z in idx.boundary_states() {
            let ys = z.interior_neighbors_of_boundary().unwrap();
            assert!(!ys.is_empty());
            for y in ys {
                assert!(y.is_interior());
                assert!((y.distance(z).unwrap() - 2f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn center_state_picks_lexicographic_first_nearest() {
        let idx = SimplexIndex::new(3, 4).unwrap();
        assert_eq!(idx.interior_state(idx.center_state()), &cfg(&[1, 1, 2]));

        let idx = SimplexIndex::new(3, 12).unwrap();
        assert_eq!(idx.interior_state(idx.center_state()), &cfg(&[4, 4, 4]));

        let idx = SimplexIndex::new(3, 16).unwrap();
        assert_eq!(idx.interior_state(idx.center_state()), &cfg(&[5, 5, 6]));
    }

    proptest! {
        #[test]
        fn index_round_trip(k in 2usize..5, n_extra in 0u64..9) {
            let n = k as u64 + n_extra;
            let idx = SimplexIndex::new(k, n).unwrap();
            for (i, s) in idx.interior_states().iter().enumerate() {
                prop_assert_eq!(idx.interior_index(s), Some(i));
            }
            for (i, z) in idx.boundary_states().iter().enumerate() {
                prop_assert_eq!(idx.boundary_index(z), Some(i));
            }
        }

        #[test]
        fn neighbor_relation_is_symmetric(k in 2usize..5, n_extra in 0u64..7) {
            let n = k as u64 + n_extra;
            let idx = SimplexIndex::new(k, n).unwrap();
            for x in idx.interior_states() {
                for (_, t) in x.neighbors() {
                    if let Some(y) = t {
                        if y.is_interior() {
                            let back = y
                                .neighbors()
                                .into_iter()
                                .filter_map(|(_, t)| t)
                                .any(|b| &b == x);
                            prop_assert!(back);
                        }
                    }
                }
            }
        }
    }
}
