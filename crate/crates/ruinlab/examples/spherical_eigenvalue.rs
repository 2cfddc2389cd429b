//! The exponent alpha comes from a spectral-geometry problem: the lowest
//! Dirichlet eigenvalue of the sphere Laplacian on the equilateral
//! geodesic triangle of side pi/3 (the base of the four-player corner
//! cone). The octant triangle, whose eigenvalue is exactly 12, calibrates
//! the discretization.

use ruinlab::profile::{alpha_from_lambda, ProfileConstants};
use ruinlab::sphereig::{dirichlet_lambda, octant_triangle, tetrahedral_triangle};

fn main() -> ruinlab::Result<()> {
    let levels = 6;

    let octant = octant_triangle();
    println!(
        "octant triangle: sides {:?} (all pi/2), known eigenvalue 12",
        octant.side_lengths().map(|s| (s * 1e4).round() / 1e4)
    );
    let (sol, _) = dirichlet_lambda(&octant, levels)?;
    println!("  {:>6} {:>16} {:>12} {:>8}", "level", "lambda", "error", "order");
    let mut prev_err: Option<f64> = None;
    for (level, lambda) in &sol.level_lambdas {
        let err = (lambda - 12.0).abs();
        let order = prev_err
            .map(|p| format!("{:.3}", (p / err).log2()))
            .unwrap_or_default();
        println!("  {level:>6} {lambda:>16.8} {err:>12.3e} {order:>8}");
        prev_err = Some(err);
    }
    println!(
        "  Richardson extrapolation: {:.8} (relative error {:.2e})\n",
        sol.extrapolated_lambda,
        (sol.extrapolated_lambda - 12.0).abs() / 12.0
    );

    let tetra = tetrahedral_triangle();
    println!(
        "corner-cone triangle: sides pi/3, corner angles arccos(1/3), area {:.6}",
        tetra.area()
    );
    let (sol, _) = dirichlet_lambda(&tetra, levels)?;
    println!("  {:>6} {:>16}", "level", "lambda");
    for (level, lambda) in &sol.level_lambdas {
        println!("  {level:>6} {lambda:>16.8}");
    }
    let lambda4 = sol.extrapolated_lambda;
    println!("  Richardson extrapolation: {lambda4:.8}");

    let alpha = alpha_from_lambda(4, lambda4)?;
    println!("\nderived exponent: alpha = {alpha:.6}");
    let computed = ProfileConstants::from_lambda(4, lambda4, "computed-by-sphereig")?;
    if let Some(note) = computed.discrepancy_note() {
        println!("note: {note}");
    }
    let defaults = ProfileConstants::default_for(4)?;
    println!(
        "default constants use lambda = {:.3} giving alpha = {:.6}",
        defaults.lambda_k, defaults.alpha_k
    );
    Ok(())
}
