//! How fast does the very dominant player's ruin probability vanish?
//!
//! Starting from (1,...,1,N-k+1), the probability that the dominant
//! player is first to lose decays like N^-3 for three players and
//! N^-alpha with alpha near 5.72 for four. The local log-slopes of the
//! exact probabilities drift monotonically toward those exponents;
//! desk-scale sizes get remarkably close.

use std::sync::Arc;

use ruinlab::absorption::absorption_row;
use ruinlab::analysis::successive_exponents;
use ruinlab::kernel::KernelOperator;
use ruinlab::profile::{power_scale_exponent, subdominant_exponent, ProfileConstants};
use ruinlab::simplex::{ChipConfig, SimplexIndex};

fn main() -> ruinlab::Result<()> {
    for (k, target) in [(3usize, "3 (exact)"), (4usize, "about 5.72")] {
        println!("k = {k}: asymptotic exponent {target}");
        println!("  {:>4} {:>16} {:>12}", "N", "P(dominant loses)", "local slope");
        let mut points = Vec::new();
        for n in (8..=32).step_by(4) {
            let index = Arc::new(SimplexIndex::new(k, n)?);
            let op = KernelOperator::build(Arc::clone(&index));
            let mut chips = vec![1u64; k];
            chips[k - 1] = n - (k as u64 - 1);
            let row = absorption_row(&op, &ChipConfig::new(chips)?, 1e-13)?;
            let p = row.face_hit_probability(k - 1)?;
            points.push((n as f64, p));
        }
        let slopes = successive_exponents(&points)?;
        for (i, (n, p)) in points.iter().enumerate() {
            let slope = if i == 0 {
                String::from("")
            } else {
                format!("{:.4}", -slopes[i - 1].1)
            };
            println!("  {:>4} {:>16.6e} {:>12}", n, p, slope);
        }
        println!();
    }

    // Predicted exponents for structured starts.
    let c = ProfileConstants::default_for(4)?;
    println!("prediction table (alpha = {:.4}, beta = {:.4}):", c.alpha_k, c.beta);
    println!("  minor players all of size one:        exponent {:.4}",
        power_scale_exponent([0.0, 0.0, 0.0], &c)?);
    for eps in [0.25, 0.5, 0.75] {
        println!(
            "  minors ~ N^{eps:.2} each:                 exponent {:.4}",
            power_scale_exponent([eps, eps, eps], &c)?
        );
        println!(
            "  minors ~ (N^{:.2}, N^{:.2}, N^{eps:.2}):    exponent {:.4}",
            eps / 2.0,
            eps / 2.0,
            power_scale_exponent([eps / 2.0, eps / 2.0, eps], &c)?
        );
    }
    let sub = subdominant_exponent(&c);
    println!(
        "\nsubdominant player (~N^eps chips) ruined first: exponent {:.4}*eps;\n\
         the three-player reduction would predict {:.0}*eps and is wrong",
        sub.coefficient, sub.heuristic_coefficient
    );
    Ok(())
}
