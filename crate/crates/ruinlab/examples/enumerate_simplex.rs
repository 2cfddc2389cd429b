//! Walk the state space of a small game: enumerate the interior and the
//! reachable boundary, list faces, and inspect the neighbor structure.

use std::sync::Arc;

use ruinlab::kernel::KernelOperator;
use ruinlab::simplex::{binomial, ChipConfig, SimplexIndex};

fn main() -> ruinlab::Result<()> {
    let (k, n) = (3usize, 6u64);
    let index = Arc::new(SimplexIndex::new(k, n)?);

    println!("simplex k={k}, N={n}");
    println!(
        "  interior:  {} states (C({},{}) = {})",
        index.interior_count(),
        n - 1,
        k - 1,
        binomial(n - 1, k as u64 - 1)
    );
    println!(
        "  boundary:  {} states (k*C({},{}) = {})",
        index.boundary_count(),
        n - 1,
        k - 2,
        k as u128 * binomial(n - 1, k as u64 - 2)
    );

    println!("\ninterior states in index order:");
    for (i, s) in index.interior_states().iter().enumerate() {
        println!("  {i:2}  {s}");
    }

    for player in 0..k {
        let face: Vec<String> = index
            .face(player)?
            .iter()
            .map(|&zi| index.boundary_state(zi).to_string())
            .collect();
        println!("face where player {} is ruined: {}", player + 1, face.join(" "));
    }

    let x = ChipConfig::new(vec![1, 2, 3])?;
    println!("\nmoves from {x}:");
    for (mv, target) in x.neighbors() {
        match target {
            Some(t) if t.is_interior() => {
                println!("  {} -> {}: {t} (interior)", mv.donor + 1, mv.recipient + 1)
            }
            Some(t) => println!("  {} -> {}: {t} (boundary)", mv.donor + 1, mv.recipient + 1),
            None => println!("  {} -> {}: blocked (no chip)", mv.donor + 1, mv.recipient + 1),
        }
    }

    let op = KernelOperator::build(Arc::clone(&index));
    let z = ChipConfig::new(vec![0, 2, 4])?;
    let ys: Vec<String> = z
        .interior_neighbors_of_boundary()?
        .iter()
        .map(|y| y.to_string())
        .collect();
    println!("\nexit set of boundary state {z}: {}", ys.join(" "));
    println!(
        "every admissible transition has probability 1/(2*C({k},2)) = {:.6}",
        op.step_probability()
    );
    Ok(())
}
