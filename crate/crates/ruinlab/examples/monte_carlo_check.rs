//! Cross-validate the exact solver with seeded simulation: every face
//! frequency should sit within a few standard errors of the exact value,
//! and a rerun with the same seed reproduces the tallies byte for byte.

use std::sync::Arc;

use ruinlab::absorption::absorption_row;
use ruinlab::kernel::KernelOperator;
use ruinlab::montecarlo::{estimate_face_probability, simulate};
use ruinlab::simplex::{ChipConfig, SimplexIndex};

fn main() -> ruinlab::Result<()> {
    let (k, n) = (4usize, 12u64);
    let start = ChipConfig::new(vec![1, 1, 1, 9])?;
    let runs = 1_000_000u64;
    let seed = 7u64;

    let index = Arc::new(SimplexIndex::new(k, n)?);
    let op = KernelOperator::build(Arc::clone(&index));
    let exact = absorption_row(&op, &start, 1e-12)?;
    let stats = simulate(&start, runs, seed)?;

    println!("start {start}, {runs} runs, seed {seed}");
    println!(
        "  {:>7} {:>14} {:>14} {:>10} {:>8}",
        "face", "exact", "simulated", "stderr", "pull"
    );
    for player in 0..k {
        let p = exact.face_hit_probability(player)?;
        let (est, se) = estimate_face_probability(&stats, player)?;
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        println!(
            "  {:>7} {:>14.8} {:>14.8} {:>10.2e} {:>8.2}",
            player + 1,
            p,
            est,
            se,
            (est - p) / sigma
        );
    }
    println!("  mean absorption time ~ {:.2} games", stats.mean_tau);

    let again = simulate(&start, runs, seed)?;
    println!(
        "  rerun with the same seed reproduces all tallies: {}",
        again == stats
    );

    // Terminal histogram against the exact law on the heaviest states.
    let mut heavy: Vec<(usize, f64)> = exact
        .probabilities
        .iter()
        .copied()
        .enumerate()
        .collect();
    heavy.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\n  five heaviest terminal states:");
    println!("  {:>14} {:>12} {:>12}", "state", "exact", "simulated");
    for (zi, p) in heavy.into_iter().take(5) {
        let z = index.boundary_state(zi);
        let count = stats.boundary_counts.get(z).copied().unwrap_or(0);
        println!(
            "  {:>14} {:>12.6} {:>12.6}",
            z.to_string(),
            p,
            count as f64 / runs as f64
        );
    }
    Ok(())
}
