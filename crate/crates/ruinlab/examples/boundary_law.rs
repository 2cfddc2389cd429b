//! Exact absorption laws: where does the chain leave the simplex?
//!
//! One SPD solve per start state gives the full boundary law; faces
//! aggregate it per ruined player, and conditioning on a face gives the
//! final-allocation law among the survivors.

use std::sync::Arc;

use ruinlab::absorption::absorption_row;
use ruinlab::kernel::KernelOperator;
use ruinlab::simplex::{ChipConfig, SimplexIndex};

fn main() -> ruinlab::Result<()> {
    // The hand-checkable case: three players, four chips.
    let index = Arc::new(SimplexIndex::new(3, 4)?);
    let op = KernelOperator::build(Arc::clone(&index));
    let start = ChipConfig::new(vec![1, 1, 2])?;
    let row = absorption_row(&op, &start, 1e-12)?;
    println!("start {start}: full boundary law (all nine reachable states)");
    for (zi, z) in index.boundary_states().iter().enumerate() {
        println!("  P(X_tau = {z}) = {:.12} ({})", row.probabilities[zi],
            approx_fraction(row.probabilities[zi]));
    }
    println!("  total = {:.15}, solver residual {:.1e}\n", row.total(), row.solver_residual);

    // A four-player game with a dominant player.
    let (k, n) = (4usize, 20u64);
    let index = Arc::new(SimplexIndex::new(k, n)?);
    let op = KernelOperator::build(Arc::clone(&index));
    let start = ChipConfig::new(vec![2, 3, 5, 10])?;
    let row = absorption_row(&op, &start, 1e-12)?;
    println!("start {start} (k={k}, N={n}):");
    for player in 0..k {
        println!(
            "  P(player {} ruined) = {:.8}",
            player + 1,
            row.face_hit_probability(player)?
        );
    }

    // Conditional on the dominant player losing, how are the chips split?
    let cond = row.conditional_final_distribution(k - 1)?;
    let mut top: Vec<(usize, f64)> = cond.clone();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\ngiven that player {k} is ruined, the five likeliest final splits:");
    for (zi, p) in top.into_iter().take(5) {
        println!("  {}  with conditional probability {:.6}", index.boundary_state(zi), p);
    }
    Ok(())
}

/// Render small rationals with denominator up to 64 when they match.
fn approx_fraction(x: f64) -> String {
    for den in 1..=64u64 {
        let num = (x * den as f64).round();
        if (x - num / den as f64).abs() < 1e-12 && num >= 0.0 {
            return format!("{}/{}", num as u64, den);
        }
    }
    format!("{x:.6}")
}
