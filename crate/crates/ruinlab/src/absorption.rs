//! Exact boundary hitting laws.
//!
//! With `K` the killed kernel and `g = (I - K)^{-1} e_s`, the chance of
//! being absorbed at the boundary state `z` is the step probability times
//! the sum of `g` over the interior neighbors of `z`. One symmetric
//! positive-definite solve per start state yields the whole boundary law.
//!
//! `I - K` has unit diagonal, so the Jacobi-preconditioned conjugate
//! gradient iteration reduces to plain CG.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::KernelOperator;
use crate::simplex::{ChipConfig, SimplexIndex};

/// Probabilities below this are flushed to zero and counted; far-corner
/// targets underflow for large N.
pub const FLUSH_THRESHOLD: f64 = 1e-300;

/// The full absorption law from one start state.
#[derive(Clone, Debug)]
pub struct AbsorptionRow {
    pub start: ChipConfig,
    /// Probability per boundary index.
    pub probabilities: Vec<f64>,
    /// Relative residual of the linear solve.
    pub solver_residual: f64,
    pub iterations: u64,
    /// Entries flushed to zero for falling below [`FLUSH_THRESHOLD`].
    pub flushed: usize,
    index: Arc<SimplexIndex>,
}

/// Solve `(I - K) x = b` by conjugate gradients to a relative residual.
pub fn solve_identity_minus_k(
    op: &KernelOperator,
    b: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64, u64)> {
    let n = op.interior_count();
    if b.len() != n {
        return Err(Error::Invalid(format!(
            "right-hand side length {} does not match interior count {n}",
            b.len()
        )));
    }
    let tol_ok = tol.is_finite() && tol > 0.0;
    if !tol_ok {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0.0, 0));
    }

    let apply_a = |p: &[f64], out: &mut Vec<f64>| -> Result<()> {
        op.apply_into(p, out)?;
        for (o, pi) in out.iter_mut().zip(p) {
            *o = pi - *o;
        }
        Ok(())
    };

    let max_iter: u64 = (20 * n as u64).max(10_000);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let mut iterations: u64 = 0;

    loop {
        let rel = rr.sqrt() / bnorm;
        if rel <= tol {
            return Ok((x, rel, iterations));
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence {
                what: "conjugate gradients",
                iterations,
                residual: rel,
            });
        }
        apply_a(&p, &mut ap)?;
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical(format!(
                "curvature {pap:.3e} is not positive; I - K lost definiteness"
            )));
        }
        let alpha = rr / pap;
        for ((xi, pi), (ri, api)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        iterations += 1;
    }
}

/// Compute the boundary law from an interior start state.
pub fn absorption_row(op: &KernelOperator, s: &ChipConfig, tol: f64) -> Result<AbsorptionRow> {
    let index = op.index_arc();
    if s.k() != index.k() || s.total() != index.n() {
        return Err(Error::Invalid(format!(
            "start {s} does not belong to the (k={}, N={}) simplex",
            index.k(),
            index.n()
        )));
    }
    if !s.is_interior() {
        return Err(Error::Invalid(format!("start {s} not interior")));
    }
    let si = index
        .interior_index(s)
        .expect("interior state is enumerated");

    let mut b = vec![0.0; index.interior_count()];
    b[si] = 1.0;
    let (g, solver_residual, iterations) = solve_identity_minus_k(op, &b, tol)?;

    let p = op.step_probability();
    let mut probabilities = vec![0.0; index.boundary_count()];
    let mut flushed = 0usize;
    for (zi, z) in index.boundary_states().iter().enumerate() {
        let mut acc = 0.0;
        for y in z
            .interior_neighbors_of_boundary()
            .expect("indexed boundary state has one zero")
        {
            acc += g[index.interior_index(&y).expect("neighbor is interior")];
        }
        let prob = acc * p;
        if prob != 0.0 && prob.abs() < FLUSH_THRESHOLD {
            flushed += 1;
        } else {
            probabilities[zi] = prob;
        }
    }

    Ok(AbsorptionRow {
        start: s.clone(),
        probabilities,
        solver_residual,
        iterations,
        flushed,
        index,
    })
}

impl AbsorptionRow {
    pub fn index(&self) -> &SimplexIndex {
        &self.index
    }

    /// Total mass; absorption is certain, so this is 1 up to solver error.
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Probability that `player` is the one ruined.
    pub fn face_hit_probability(&self, player: usize) -> Result<f64> {
        let face = self.index.face(player)?;
        Ok(face.iter().map(|&zi| self.probabilities[zi]).sum())
    }

    /// The law on one face, renormalized to total mass one. Entries are
    /// `(boundary index, probability)`.
    pub fn conditional_final_distribution(&self, player: usize) -> Result<Vec<(usize, f64)>> {
        let mass = self.face_hit_probability(player)?;
        if mass <= 0.0 {
            return Err(Error::Invalid(format!(
                "face {player} carries zero mass; conditional law undefined"
            )));
        }
        Ok(self
            .index
            .face(player)?
            .iter()
            .map(|&zi| (zi, self.probabilities[zi] / mass))
            .collect())
    }

    /// CSV export: one row per boundary state.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# schema: ruinlab.absorption.v1")?;
        let coords: Vec<String> = (1..=self.index.k()).map(|i| format!("z{i}")).collect();
        writeln!(w, "{},probability", coords.join(","))?;
        for (zi, z) in self.index.boundary_states().iter().enumerate() {
            let chips: Vec<String> = z.chips().iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{:.17e}", chips.join(","), self.probabilities[zi])?;
        }
        Ok(())
    }
}
