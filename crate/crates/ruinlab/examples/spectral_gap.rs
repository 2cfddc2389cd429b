//! The spectral gap of the killed kernel closes like N^{-2}: compute
//! 1 - beta0 over a sweep of sizes and fit the exponent.

use ruinlab::analysis::fit_power_law;
use ruinlab::spectral::{spectral_gap_scan, PowerSettings};

fn main() -> ruinlab::Result<()> {
    let settings = PowerSettings::default();
    for k in [3usize, 4] {
        let ns: Vec<u64> = if k == 3 {
            (12..=48).step_by(4).collect()
        } else {
            (12..=32).step_by(4).collect()
        };
        let scan = spectral_gap_scan(k, &ns, &settings, None)?;
        println!("k = {k}");
        println!("  {:>4} {:>22} {:>22} {:>10}", "N", "beta0", "1-beta0", "iters");
        for g in &scan {
            println!(
                "  {:>4} {:>22.15} {:>22.6e} {:>10}",
                g.n, g.beta0, g.gap, g.iterations
            );
        }
        let points: Vec<(f64, f64)> = scan.iter().map(|g| (g.n as f64, g.gap)).collect();
        let fit = fit_power_law(&points)?;
        println!(
            "  fitted exponent of 1-beta0: {:.4} +- {:.1e} (r2 = {:.6})\n",
            fit.slope, fit.stderr_slope, fit.r_squared
        );
    }
    Ok(())
}
