//! Compare the exact eigenvector phi0 against its closed-form
//! comparators: the exact product formula for three players and the
//! tau display for four. Agreement is up to constants, so the statistic
//! is the max/min spread of pointwise ratios.

use std::sync::Arc;

use ruinlab::analysis::ratio_report;
use ruinlab::kernel::KernelOperator;
use ruinlab::profile::{phi0_formula_k3, phi0_formula_tau, ProfileConstants};
use ruinlab::simplex::SimplexIndex;
use ruinlab::spectral::{center_value, perron_frobenius, PowerSettings};

fn main() -> ruinlab::Result<()> {
    let settings = PowerSettings::default();

    println!("three players: phi0 vs N^-7 (s1+s2)(s1+s3)(s2+s3) s1 s2 s3");
    for n in [24u64, 36, 48] {
        let index = Arc::new(SimplexIndex::new(3, n)?);
        let op = KernelOperator::build(Arc::clone(&index));
        let pair = perron_frobenius(&op, &settings)?;
        let items = index
            .interior_states()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), pair.phi0[i], phi0_formula_k3(s).unwrap()));
        let rep = ratio_report(&format!("full interior, N={n}"), items)?;
        println!(
            "  N={n:2}: spread {:.3} over {} states (min at {}, max at {})",
            rep.spread, rep.points, rep.argmin, rep.argmax
        );
    }

    let constants = ProfileConstants::default_for(4)?;
    println!("\nfour players: phi0 vs the tau display (alpha={:.4}, beta={:.4})",
        constants.alpha_k, constants.beta);
    for n in [16u64, 20, 24] {
        let index = Arc::new(SimplexIndex::new(4, n)?);
        let op = KernelOperator::build(Arc::clone(&index));
        let pair = perron_frobenius(&op, &settings)?;

        let full = ratio_report(
            &format!("full interior, N={n}"),
            index.interior_states().iter().enumerate().map(|(i, s)| {
                (s.clone(), pair.phi0[i], phi0_formula_tau(s, &constants).unwrap())
            }),
        )?;
        let corner = ratio_report(
            &format!("corner x4 >= N/4, N={n}"),
            index
                .interior_states()
                .iter()
                .enumerate()
                .filter(|(_, s)| 4 * s.chips()[3] >= n)
                .map(|(i, s)| {
                    (s.clone(), pair.phi0[i], phi0_formula_tau(s, &constants).unwrap())
                }),
        )?;
        println!(
            "  N={n:2}: full-interior spread {:.3} ({} states), corner spread {:.3} ({} states)",
            full.spread, full.points, corner.spread, corner.points
        );

        let c = center_value(&pair, &index);
        println!(
            "        phi0(center) * N^{{3/2}} = {:.4} (the center value scales like N^-(k-1)/2)",
            c * (n as f64).powf(1.5)
        );
    }
    Ok(())
}
