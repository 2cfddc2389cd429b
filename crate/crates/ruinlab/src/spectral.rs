//! Perron-Frobenius eigenpair of the killed kernel.
//!
//! Power iteration with a Rayleigh-quotient convergence test. The iteration
//! runs on `I + K` rather than `K` itself: both share the positive
//! eigenvector, and the shift keeps the iteration from stalling when the
//! interior graph is bipartite (the k = 2 interior is a path, whose
//! spectrum is symmetric). Convergence is still measured by the residual of
//! `K` directly, and the all-ones start vector makes the result
//! deterministic.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kernel::KernelOperator;
use crate::simplex::SimplexIndex;

/// Top eigenpair of the killed kernel.
#[derive(Clone, Debug)]
pub struct EigenPair {
    /// Largest eigenvalue, in `[0, 1)`.
    pub beta0: f64,
    /// Positive eigenvector, unit Euclidean norm, in index order.
    pub phi0: Vec<f64>,
    /// `||K phi0 - beta0 phi0||_2` at termination.
    pub residual: f64,
    /// Power-iteration steps taken (0 when loaded from cache).
    pub iterations: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct PowerSettings {
    pub tol: f64,
    pub max_iter: u64,
}

impl Default for PowerSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual_norm(kv: &[f64], beta: f64, v: &[f64]) -> f64 {
    kv.iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a - beta * b;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Compute the top eigenpair by power iteration from the all-ones vector.
pub fn perron_frobenius(op: &KernelOperator, settings: &PowerSettings) -> Result<EigenPair> {
    let n = op.interior_count();
    if n == 0 {
        return Err(Error::Invalid("empty interior".into()));
    }
    let tol_ok = settings.tol.is_finite() && settings.tol > 0.0;
    if !tol_ok {
        return Err(Error::Invalid(format!(
            "tolerance must be positive, got {}",
            settings.tol
        )));
    }

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut kv = op.apply(&v)?;
    let mut beta = dot(&v, &kv);
    let mut res = residual_norm(&kv, beta, &v);
    let mut iterations: u64 = 0;

    while res > settings.tol {
        if iterations >= settings.max_iter {
            return Err(Error::NoConvergence {
                what: "power iteration",
                iterations,
                residual: res,
            });
        }
        // One step of the shifted iteration: w = v + K v, renormalized.
        let mut w = kv;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += *vi;
        }
        let norm = norm2(&w);
        let inv = 1.0 / norm;
        for wi in w.iter_mut() {
            *wi *= inv;
        }
        v = w;
        kv = op.apply(&v)?;
        beta = dot(&v, &kv);
        res = residual_norm(&kv, beta, &v);
        iterations += 1;
    }

    Ok(EigenPair {
        beta0: beta,
        phi0: v,
        residual: res,
        iterations,
    })
}

/// Eigenvector value at the lexicographically first interior state nearest
/// the simplex center.
pub fn center_value(pair: &EigenPair, index: &SimplexIndex) -> f64 {
    pair.phi0[index.center_state()]
}

/// One row of a spectral-gap sweep.
#[derive(Clone, Debug)]
pub struct GapPoint {
    pub n: u64,
    pub beta0: f64,
    /// `1 - beta0`.
    pub gap: f64,
    pub iterations: u64,
    pub cache_hit: bool,
}

/// Compute `(N, 1 - beta0)` for each requested `N`, sorted by `N`.
pub fn spectral_gap_scan(
    k: usize,
    n_list: &[u64],
    settings: &PowerSettings,
    cache_dir: Option<&Path>,
) -> Result<Vec<GapPoint>> {
    let mut ns: Vec<u64> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Vec::with_capacity(ns.len());
    for n in ns {
        let index = std::sync::Arc::new(SimplexIndex::new(k, n)?);
        let op = KernelOperator::build(index);
        let (pair, cache_hit) = cached_perron_frobenius(&op, settings, cache_dir)
            .map_err(|e| Error::Numerical(format!("eigen solve failed at N={n}: {e}")))?;
        out.push(GapPoint {
            n,
            beta0: pair.beta0,
            gap: 1.0 - pair.beta0,
            iterations: pair.iterations,
            cache_hit,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Eigenvector cache.
//
// Little-endian binary, one file per (k, N, tol):
//   bytes 0..8   magic + version  b"RUINPH01"
//   bytes 8..12  k    as u32
//   bytes 12..20 N    as u64
//   bytes 20..28 count as u64
//   bytes 28..36 tol  as f64
//   then `count` f64 eigenvector entries in index order.
// ---------------------------------------------------------------------------

const CACHE_MAGIC: &[u8; 8] = b"RUINPH01";

/// Canonical cache file name for a `(k, N, tol)` key.
pub fn cache_file_name(k: usize, n: u64, tol: f64) -> String {
    format!("phi0_k{k}_N{n}_tol{tol:e}.bin")
}

pub fn write_phi0_cache(path: &Path, k: usize, n: u64, tol: f64, phi0: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(36 + 8 * phi0.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&(k as u32).to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&(phi0.len() as u64).to_le_bytes());
    buf.extend_from_slice(&tol.to_le_bytes());
    for x in phi0 {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub struct Phi0Cache {
    pub k: usize,
    pub n: u64,
    pub tol: f64,
    pub phi0: Vec<f64>,
}

pub fn read_phi0_cache(path: &Path) -> Result<Phi0Cache> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 36 {
        return Err(Error::Format(format!("{}: truncated header", path.display())));
    }
    if &bytes[0..8] != CACHE_MAGIC {
        return Err(Error::Format(format!(
            "{}: unknown magic or version (expected {:?})",
            path.display(),
            std::str::from_utf8(CACHE_MAGIC).unwrap()
        )));
    }
    let k = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
    let tol = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
    if bytes.len() != 36 + 8 * count {
        return Err(Error::Format(format!(
            "{}: expected {count} entries, file holds {} bytes of payload",
            path.display(),
            bytes.len() - 36
        )));
    }
    let phi0 = bytes[36..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Phi0Cache { k, n, tol, phi0 })
}

/// Power iteration backed by the on-disk cache. Returns the pair and
/// whether it was served from cache. A cached vector is revalidated by one
/// kernel application; stale or corrupt entries are recomputed.
pub fn cached_perron_frobenius(
    op: &KernelOperator,
    settings: &PowerSettings,
    cache_dir: Option<&Path>,
) -> Result<(EigenPair, bool)> {
    let index = op.index();
    let path: Option<PathBuf> = cache_dir
        .map(|d| d.join(cache_file_name(index.k(), index.n(), settings.tol)));

    if let Some(p) = &path {
        if p.exists() {
            if let Ok(cache) = read_phi0_cache(p) {
                if cache.k == index.k()
                    && cache.n == index.n()
                    && cache.phi0.len() == index.interior_count()
                    && cache.tol == settings.tol
                {
                    let kv = op.apply(&cache.phi0)?;
                    let beta = dot(&cache.phi0, &kv);
                    let res = residual_norm(&kv, beta, &cache.phi0);
                    if res <= settings.tol {
                        return Ok((
                            EigenPair {
                                beta0: beta,
                                phi0: cache.phi0,
                                residual: res,
                                iterations: 0,
                            },
                            true,
                        ));
                    }
                }
            }
        }
    }

    let pair = perron_frobenius(op, settings)?;
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        write_phi0_cache(p, index.k(), index.n(), settings.tol, &pair.phi0)?;
    }
    Ok((pair, false))
}

/// CSV export of the eigenvector: one row per interior state.
pub fn write_phi0_csv<W: Write>(w: &mut W, index: &SimplexIndex, pair: &EigenPair) -> Result<()> {
    writeln!(w, "# schema: ruinlab.phi0.v1")?;
    let coords: Vec<String> = (1..=index.k()).map(|i| format!("x{i}")).collect();
    writeln!(w, "index,{},phi0", coords.join(","))?;
    for (i, s) in index.interior_states().iter().enumerate() {
        let chips: Vec<String> = s.chips().iter().map(|c| c.to_string()).collect();
        writeln!(w, "{i},{},{:.17e}", chips.join(","), pair.phi0[i])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::ChipConfig;
    use std::sync::Arc;

    fn op(k: usize, n: u64) -> KernelOperator {
        KernelOperator::build(Arc::new(SimplexIndex::new(k, n).unwrap()))
    }

    fn solve(k: usize, n: u64) -> (KernelOperator, EigenPair) {
        let o = op(k, n);
        let pair = perron_frobenius(&o, &PowerSettings::default()).unwrap();
        (o, pair)
    }

    #[test]
    fn zero_operator_has_zero_eigenvalue() {
        let (_, pair) = solve(3, 3);
        assert_eq!(pair.beta0, 0.0);
        assert_eq!(pair.phi0, vec![1.0]);
        assert_eq!(pair.residual, 0.0);
    }

    #[test]
    fn three_cycle_eigenpair_is_exact() {
        let (_, pair) = solve(3, 4);
        assert!((pair.beta0 - 1.0 / 3.0).abs() < 1e-12);
        let expect = 1.0 / 3f64.sqrt();
        for x in &pair.phi0 {
            assert!((x - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_is_positive_and_normalized() {
        for (k, n) in [(2usize, 9u64), (3, 11), (4, 9)] {
            let (_, pair) = solve(k, n);
            assert!(pair.phi0.iter().all(|&x| x > 0.0), "k={k} N={n}");
            let norm: f64 = pair.phi0.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(pair.residual <= 1e-12);
        }
    }

    #[test]
    fn eigenvector_is_permutation_invariant() {
        let (o, pair) = solve(3, 13);
        let idx = o.index();
        // All six coordinate permutations.
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            for (i, s) in idx.interior_states().iter().enumerate() {
                let permuted: Vec<u64> = p.iter().map(|&j| s.chips()[j]).collect();
                let pi = idx
                    .interior_index(&ChipConfig::new(permuted).unwrap())
                    .unwrap();
                assert!((pair.phi0[i] - pair.phi0[pi]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn gap_scan_is_sorted_and_monotone() {
        let scan =
            spectral_gap_scan(3, &[8, 4, 6, 10, 12], &PowerSettings::default(), None).unwrap();
        let ns: Vec<u64> = scan.iter().map(|g| g.n).collect();
        assert_eq!(ns, vec![4, 6, 8, 10, 12]);
        // beta0 strictly increases with N at fixed k.
        for w in scan.windows(2) {
            assert!(w[1].beta0 > w[0].beta0);
        }
        assert!((scan[0].gap - 2.0 / 3.0).abs() < 1e-12);

        let scan4 = spectral_gap_scan(4, &[4], &PowerSettings::default(), None).unwrap();
        assert_eq!(scan4[0].gap, 1.0);
    }

    #[test]
    fn center_value_at_small_case() {
        let (o, pair) = solve(3, 4);
        let v = center_value(&pair, o.index());
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn center_value_tracks_scaling_band() {
        // phi0(o_N) * N^{(k-1)/2} stays within a narrow band; also the
        // center is comparable to the maximum entry.
        let mut scaled = Vec::new();
        for n in [12u64, 16, 20, 24] {
            let (o, pair) = solve(3, n);
            let c = center_value(&pair, o.index());
            let sup = pair.phi0.iter().cloned().fold(0.0, f64::max);
            assert!(sup / c <= 2.0, "center value should be near the maximum");
            scaled.push(c * (n as f64));
        }
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 3.0);
    }

    #[test]
    fn eigenvector_mass_tracks_scaling_band() {
        let mut scaled = Vec::new();
        for n in [12u64, 16, 20, 24] {
            let (_, pair) = solve(3, n);
            let mass: f64 = pair.phi0.iter().sum();
            scaled.push(mass / (n as f64));
        }
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 3.0);
    }

    #[test]
    fn rejects_bad_settings() {
        let o = op(3, 4);
        assert!(perron_frobenius(
            &o,
            &PowerSettings {
                tol: 0.0,
                max_iter: 10
            }
        )
        .is_err());
        let err = perron_frobenius(
            &o,
            &PowerSettings {
                tol: 1e-300,
                max_iter: 1,
            },
        );
        match err {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn cache_round_trip_and_hit() {
        let dir = tempfile::tempdir().unwrap();
        let o = op(3, 8);
        let settings = PowerSettings::default();
        let (pair, hit) = cached_perron_frobenius(&o, &settings, Some(dir.path())).unwrap();
        assert!(!hit);
        let (pair2, hit2) = cached_perron_frobenius(&o, &settings, Some(dir.path())).unwrap();
        assert!(hit2);
        assert_eq!(pair.phi0, pair2.phi0);
        assert_eq!(pair2.iterations, 0);

        let path = dir.path().join(cache_file_name(3, 8, settings.tol));
        let cache = read_phi0_cache(&path).unwrap();
        assert_eq!(cache.k, 3);
        assert_eq!(cache.n, 8);
        assert_eq!(cache.phi0, pair.phi0);

        // A corrupt magic is rejected.
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_phi0_cache(&path), Err(Error::Format(_))));
        // ... and the cached path falls back to recomputation.
        let (pair3, hit3) = cached_perron_frobenius(&o, &settings, Some(dir.path())).unwrap();
        assert!(!hit3);
        assert_eq!(pair3.phi0, pair.phi0);
    }
}
