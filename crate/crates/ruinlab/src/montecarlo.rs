//! Seeded simulation of the chip-exchange game.
//!
//! Runs are split into fixed-size chunks and chunk `i` draws from its own
//! counter-derived RNG stream, so totals are identical no matter how the
//! chunks are scheduled across threads. Merging is plain integer addition.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simplex::ChipConfig;

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    /// Runs per RNG stream; part of the reproducibility key.
    pub chunk_size: u64,
    /// Tally full terminal-state histograms (memory grows with the
    /// boundary size); face tallies are always on.
    pub histogram: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            chunk_size: 1 << 14,
            histogram: true,
        }
    }
}

/// Tallies from a batch of simulated games.
#[derive(Clone, Debug, PartialEq)]
pub struct McStats {
    pub runs: u64,
    /// Terminal counts per ruined player.
    pub face_counts: Vec<u64>,
    /// Terminal counts per boundary state (empty when histograms are off).
    pub boundary_counts: HashMap<ChipConfig, u64>,
    /// Average number of games until absorption.
    pub mean_tau: f64,
    pub seed: u64,
    pub chunk_size: u64,
    pub total_steps: u128,
}

struct ChunkTally {
    face_counts: Vec<u64>,
    boundary_counts: HashMap<ChipConfig, u64>,
    steps: u128,
}

fn run_chunk(
    start: &ChipConfig,
    count: u64,
    rng: &mut ChaCha8Rng,
    pairs: &[(usize, usize)],
    histogram: bool,
) -> ChunkTally {
    let k = start.k();
    let mut tally = ChunkTally {
        face_counts: vec![0; k],
        boundary_counts: HashMap::new(),
        steps: 0,
    };
    let mut chips = start.chips().to_vec();
    for _ in 0..count {
        chips.copy_from_slice(start.chips());
        let mut steps: u64 = 0;
        let ruined = loop {
            let &(i, j) = &pairs[rng.random_range(0..pairs.len())];
            let (donor, recipient) = if rng.random::<bool>() { (i, j) } else { (j, i) };
            chips[donor] -= 1;
            chips[recipient] += 1;
            steps += 1;
            if chips[donor] == 0 {
                break donor;
            }
        };
        tally.face_counts[ruined] += 1;
        tally.steps += steps as u128;
        if histogram {
            *tally
                .boundary_counts
                .entry(ChipConfig::new(chips.clone()).expect("terminal state is valid"))
                .or_insert(0) += 1;
        }
    }
    tally
}

/// Simulate with default options.
pub fn simulate(start: &ChipConfig, runs: u64, seed: u64) -> Result<McStats> {
    simulate_with(start, runs, seed, &SimOptions::default())
}

/// Simulate `runs` games from `start`, reproducibly for a given
/// `(seed, runs, chunk_size)`.
pub fn simulate_with(
    start: &ChipConfig,
    runs: u64,
    seed: u64,
    options: &SimOptions,
) -> Result<McStats> {
    if !start.is_interior() {
        return Err(Error::Invalid(format!("start {start} not interior")));
    }
    if runs == 0 {
        return Err(Error::Invalid("runs must be at least 1".into()));
    }
    if options.chunk_size == 0 {
        return Err(Error::Invalid("chunk size must be at least 1".into()));
    }

    let k = start.k();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect();

    let chunk = options.chunk_size;
    let nchunks = runs.div_ceil(chunk);
    let tallies: Vec<ChunkTally> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(runs);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c + 1);
            run_chunk(start, hi - lo, &mut rng, &pairs, options.histogram)
        })
        .collect();

    let mut face_counts = vec![0u64; k];
    let mut boundary_counts: HashMap<ChipConfig, u64> = HashMap::new();
    let mut total_steps: u128 = 0;
    for t in tallies {
        for (a, b) in face_counts.iter_mut().zip(&t.face_counts) {
            *a += b;
        }
        for (z, c) in t.boundary_counts {
            *boundary_counts.entry(z).or_insert(0) += c;
        }
        total_steps += t.steps;
    }

    Ok(McStats {
        runs,
        face_counts,
        boundary_counts,
        mean_tau: total_steps as f64 / runs as f64,
        seed,
        chunk_size: chunk,
        total_steps,
    })
}

/// Binomial point estimate and standard error for one face.
pub fn estimate_face_probability(stats: &McStats, player: usize) -> Result<(f64, f64)> {
    if player >= stats.face_counts.len() {
        return Err(Error::Invalid(format!(
            "face {player} out of range for k={}",
            stats.face_counts.len()
        )));
    }
    let p = stats.face_counts[player] as f64 / stats.runs as f64;
    let stderr = (p * (1.0 - p) / stats.runs as f64).sqrt();
    Ok((p, stderr))
}

impl McStats {
    /// CSV export of the terminal histogram, lexicographically sorted so
    /// identical tallies serialize to identical bytes.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# schema: ruinlab.mcstats.v1")?;
        let k = self.face_counts.len();
        let coords: Vec<String> = (1..=k).map(|i| format!("z{i}")).collect();
        writeln!(w, "{},count,frequency", coords.join(","))?;
        let mut rows: Vec<(&ChipConfig, u64)> =
            self.boundary_counts.iter().map(|(z, &c)| (z, c)).collect();
        rows.sort_unstable_by(|a, b| a.0.chips().cmp(b.0.chips()));
        for (z, c) in rows {
            let chips: Vec<String> = z.chips().iter().map(|v| v.to_string()).collect();
            writeln!(
                w,
                "{},{c},{:.17e}",
                chips.join(","),
                c as f64 / self.runs as f64
            )?;
        }
        Ok(())
    }
}
