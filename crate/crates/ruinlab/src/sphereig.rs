//! Lowest Dirichlet eigenvalue of the Laplace-Beltrami operator on a
//! geodesic spherical triangle.
//!
//! The triangle is meshed by recursive midpoint subdivision (midpoints
//! reprojected to the sphere), and piecewise-linear elements are assembled
//! on the inscribed flat triangles. The element stiffness uses the flat
//! geometry, which is scale invariant in two dimensions; the element mass
//! is corrected to the true geodesic area, which removes the leading
//! metric distortion. Boundary nodes are eliminated, the smallest
//! generalized eigenvalue is found by inverse iteration with conjugate
//! gradient inner solves, and the eigenvalue is Richardson-extrapolated
//! across the two finest levels assuming second-order convergence.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};

type Vec3 = [f64; 3];

fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

fn normalize3(a: Vec3) -> Vec3 {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Geodesic distance between unit vectors.
fn arc(a: Vec3, b: Vec3) -> f64 {
    dot3(a, b).clamp(-1.0, 1.0).acos()
}

/// Solid angle of the geodesic triangle spanned by three unit vectors.
fn spherical_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let num = dot3(a, cross3(b, c)).abs();
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

/// A geodesic triangle on the unit sphere.
#[derive(Clone, Debug)]
pub struct SphericalTriangle {
    vertices: [Vec3; 3],
}

impl SphericalTriangle {
    /// Vertices are normalized to the sphere; degenerate triangles are
    /// rejected.
    pub fn new(vertices: [Vec3; 3]) -> Result<Self> {
        for v in &vertices {
            if norm3(*v) < 1e-12 {
                return Err(Error::Invalid("zero vertex vector".into()));
            }
        }
        let vertices = vertices.map(normalize3);
        if spherical_area(vertices[0], vertices[1], vertices[2]) < 1e-12 {
            return Err(Error::Invalid("degenerate spherical triangle".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> [Vec3; 3] {
        self.vertices
    }

    /// Geodesic side lengths, side `i` opposite vertex `i`.
    pub fn side_lengths(&self) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        [arc(b, c), arc(c, a), arc(a, b)]
    }

    /// Interior angle at each vertex.
    pub fn corner_angles(&self) -> [f64; 3] {
        let v = self.vertices;
        let mut out = [0.0; 3];
        for i in 0..3 {
            let (p, q, r) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
            // Tangent directions at p toward q and r.
            let tq = normalize3(sub3(q, [p[0] * dot3(p, q), p[1] * dot3(p, q), p[2] * dot3(p, q)]));
            let tr = normalize3(sub3(r, [p[0] * dot3(p, r), p[1] * dot3(p, r), p[2] * dot3(p, r)]));
            out[i] = dot3(tq, tr).clamp(-1.0, 1.0).acos();
        }
        out
    }

    /// Area by the angle excess.
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.corner_angles();
        a + b + c - std::f64::consts::PI
    }

    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> SphericalTriangle {
        let rotate = |v: Vec3| -> Vec3 {
            [
                rot[0][0] * v[0] + rot[0][1] * v[1] + rot[0][2] * v[2],
                rot[1][0] * v[0] + rot[1][1] * v[1] + rot[1][2] * v[2],
                rot[2][0] * v[0] + rot[2][1] * v[1] + rot[2][2] * v[2],
            ]
        };
        SphericalTriangle {
            vertices: self.vertices.map(rotate),
        }
    }
}

/// The equilateral triangle of side pi/3: edge directions of a regular
/// simplex corner, with pairwise dot products 1/2. Its corner angle is
/// arccos(1/3). This is the spherical base of the four-player corner cone.
pub fn tetrahedral_triangle() -> SphericalTriangle {
    let s3 = 3f64.sqrt();
    SphericalTriangle {
        vertices: [
            [0.0, 0.0, 1.0],
            [s3 / 2.0, 0.0, 0.5],
            [s3 / 6.0, (2f64 / 3.0).sqrt(), 0.5],
        ],
    }
}

/// The first-octant triangle (sides pi/2), whose lowest Dirichlet
/// eigenvalue is exactly 12 with eigenfunction proportional to xyz.
pub fn octant_triangle() -> SphericalTriangle {
    SphericalTriangle {
        vertices: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    }
}

/// Conforming geodesic mesh of a spherical triangle.
pub struct TriMesh {
    nodes: Vec<Vec3>,
    tris: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    level: u32,
    /// Normals of the three great-circle planes holding the sides; a node
    /// is a boundary node iff it lies in one of these planes.
    side_planes: [Vec3; 3],
}

const PLANE_TOL: f64 = 1e-12;

impl TriMesh {
    pub fn base(tri: &SphericalTriangle) -> TriMesh {
        let v = tri.vertices();
        let side_planes = [
            normalize3(cross3(v[0], v[1])),
            normalize3(cross3(v[1], v[2])),
            normalize3(cross3(v[2], v[0])),
        ];
        TriMesh {
            nodes: v.to_vec(),
            tris: vec![[0, 1, 2]],
            boundary: vec![true; 3],
            level: 0,
            side_planes,
        }
    }

    fn is_boundary_point(&self, p: Vec3) -> bool {
        self.side_planes
            .iter()
            .any(|&n| dot3(n, p).abs() <= PLANE_TOL)
    }

    /// Four-way midpoint subdivision; midpoints are reprojected to the
    /// sphere, so midpoints of geodesic edges stay on their geodesic.
    pub fn refine(&self) -> TriMesh {
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut tris = Vec::with_capacity(self.tris.len() * 4);

        let mut mid = |a: usize, b: usize, nodes: &mut Vec<Vec3>, boundary: &mut Vec<bool>| {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let p = normalize3([
                nodes[a][0] + nodes[b][0],
                nodes[a][1] + nodes[b][1],
                nodes[a][2] + nodes[b][2],
            ]);
            let m = nodes.len();
            nodes.push(p);
            boundary.push(self.is_boundary_point(p));
            midpoint.insert(key, m);
            m
        };

        for &[a, b, c] in &self.tris {
            let ab = mid(a, b, &mut nodes, &mut boundary);
            let bc = mid(b, c, &mut nodes, &mut boundary);
            let ca = mid(c, a, &mut nodes, &mut boundary);
            tris.push([a, ab, ca]);
            tris.push([ab, b, bc]);
            tris.push([ca, bc, c]);
            tris.push([ab, bc, ca]);
        }

        TriMesh {
            nodes,
            tris,
            boundary,
            level: self.level + 1,
            side_planes: self.side_planes,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tri_count(&self) -> usize {
        self.tris.len()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn tris(&self) -> &[[usize; 3]] {
        &self.tris
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| !self.boundary[i]).collect()
    }

    /// Largest geodesic edge length.
    pub fn max_diameter(&self) -> f64 {
        let mut h = 0.0f64;
        for &[a, b, c] in &self.tris {
            h = h.max(arc(self.nodes[a], self.nodes[b]));
            h = h.max(arc(self.nodes[b], self.nodes[c]));
            h = h.max(arc(self.nodes[c], self.nodes[a]));
        }
        h
    }

    /// Plain-text export: a node count line, one `x y z boundary` line per
    /// node, a triangle count line, one connectivity line per element.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# schema: ruinlab.mesh.v1")?;
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (p, b) in self.nodes.iter().zip(&self.boundary) {
            writeln!(w, "{:.17e} {:.17e} {:.17e} {}", p[0], p[1], p[2], u8::from(*b))?;
        }
        writeln!(w, "triangles {}", self.tris.len())?;
        for t in &self.tris {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Symmetric sparse matrix in CSR form.
struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    fn from_rows(rows: Vec<std::collections::BTreeMap<usize, f64>>) -> CsrMatrix {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[idx] * v[self.cols[idx]];
            }
            *o = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[idx] == i {
                    *di = self.vals[idx];
                }
            }
        }
        d
    }
}

/// Assemble stiffness and mass over interior nodes. Returns the matrices
/// and the interior node list.
fn assemble(mesh: &TriMesh) -> Result<(CsrMatrix, CsrMatrix, Vec<usize>)> {
    let interior = mesh.interior_nodes();
    if interior.is_empty() {
        return Err(Error::Numerical(
            "mesh has no interior nodes; refine further".into(),
        ));
    }
    let mut local = vec![usize::MAX; mesh.node_count()];
    for (i, &g) in interior.iter().enumerate() {
        local[g] = i;
    }

    let n = interior.len();
    let mut k_rows = vec![std::collections::BTreeMap::<usize, f64>::new(); n];
    let mut m_rows = vec![std::collections::BTreeMap::<usize, f64>::new(); n];

    for t in mesh.tris() {
        let p = [mesh.nodes()[t[0]], mesh.nodes()[t[1]], mesh.nodes()[t[2]]];
        // Edge vectors opposite each vertex.
        let e = [sub3(p[2], p[1]), sub3(p[0], p[2]), sub3(p[1], p[0])];
        let flat_area = 0.5 * norm3(cross3(e[2], [-e[1][0], -e[1][1], -e[1][2]]));
        if flat_area <= 0.0 {
            return Err(Error::Numerical("degenerate element".into()));
        }
        let geo_area = spherical_area(p[0], p[1], p[2]);

        for a in 0..3 {
            let ia = t[a];
            if mesh.boundary_flags()[ia] {
                continue;
            }
            let la = local[ia];
            for b in 0..3 {
                let ib = t[b];
                if mesh.boundary_flags()[ib] {
                    continue;
                }
                let lb = local[ib];
                let k_ab = dot3(e[a], e[b]) / (4.0 * flat_area);
                let m_ab = geo_area / 12.0 * if a == b { 2.0 } else { 1.0 };
                *k_rows[la].entry(lb).or_insert(0.0) += k_ab;
                *m_rows[la].entry(lb).or_insert(0.0) += m_ab;
            }
        }
    }

    // Structural sanity per assembly: both matrices symmetric with the
    // definite diagonals the solve relies on.
    for i in 0..n {
        assert!(m_rows[i][&i] > 0.0, "mass diagonal must be positive");
        assert!(k_rows[i][&i] > 0.0, "stiffness diagonal must be positive");
        for (&j, &v) in &k_rows[i] {
            assert_eq!(k_rows[j][&i], v, "stiffness must be symmetric");
        }
        for (&j, &v) in &m_rows[i] {
            assert_eq!(m_rows[j][&i], v, "mass must be symmetric");
        }
    }

    Ok((CsrMatrix::from_rows(k_rows), CsrMatrix::from_rows(m_rows), interior))
}

/// Jacobi-preconditioned conjugate gradients for an SPD CSR matrix.
fn cg_spd(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: u64) -> Result<Vec<f64>> {
    let n = a.n;
    let diag = a.diagonal();
    let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rnorm <= tol * bnorm {
            return Ok(x);
        }
        a.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical(format!(
                "stiffness lost definiteness (curvature {pap:.3e} at iteration {it})"
            )));
        }
        let alpha = rz / pap;
        for ((xi, pi), (ri, api)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        for (zi, (ri, di)) in z.iter_mut().zip(r.iter().zip(&diag)) {
            *zi = ri / di;
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rz = rz_new;
    }
    Err(Error::NoConvergence {
        what: "stiffness-side conjugate gradients",
        iterations: max_iter,
        residual: r.iter().map(|x| x * x).sum::<f64>().sqrt() / bnorm,
    })
}

/// Smallest generalized eigenvalue of `K u = lambda M u` by inverse
/// iteration. The relative change of the Rayleigh quotient is the
/// convergence test.
fn smallest_eigenpair(
    kmat: &CsrMatrix,
    mmat: &CsrMatrix,
    tol: f64,
    max_outer: u64,
) -> Result<(f64, Vec<f64>)> {
    let n = kmat.n;
    let mut u = vec![1.0 / (n as f64).sqrt(); n];
    let mut mu = vec![0.0; n];
    let mut ku = vec![0.0; n];
    let mut rho_prev = f64::INFINITY;
    for _ in 0..max_outer {
        mmat.apply(&u, &mut mu);
        let w = cg_spd(kmat, &mu, 1e-12, (40 * n as u64).max(20_000))?;
        kmat.apply(&w, &mut ku);
        mmat.apply(&w, &mut mu);
        let wkw: f64 = w.iter().zip(&ku).map(|(a, b)| a * b).sum();
        let wmw: f64 = w.iter().zip(&mu).map(|(a, b)| a * b).sum();
        let wmw_ok = wmw.is_finite() && wmw > 0.0;
        if !wmw_ok {
            return Err(Error::Numerical("mass norm collapsed during inverse iteration".into()));
        }
        let rho = wkw / wmw;
        let scale = 1.0 / wmw.sqrt();
        u = w.into_iter().map(|x| x * scale).collect();
        if (rho - rho_prev).abs() <= tol * rho.abs() {
            // Sign-normalize positive: the ground mode has one sign.
            let mass: f64 = u.iter().sum();
            if mass < 0.0 {
                for x in u.iter_mut() {
                    *x = -*x;
                }
            }
            return Ok((rho, u));
        }
        rho_prev = rho;
    }
    Err(Error::NoConvergence {
        what: "inverse iteration",
        iterations: max_outer,
        residual: f64::NAN,
    })
}

/// Discrete Dirichlet eigensolution across refinement levels.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Eigenvalue on the finest mesh.
    pub lambda: f64,
    /// Eigenvector over the finest mesh's interior nodes, positive,
    /// normalized in the discrete mass norm.
    pub eigenvector: Vec<f64>,
    /// Finest refinement level.
    pub level: u32,
    /// Order-2 Richardson extrapolation from the two finest levels.
    pub extrapolated_lambda: f64,
    /// `(level, lambda)` for every level solved.
    pub level_lambdas: Vec<(u32, f64)>,
    /// Interior node ids (into the finest mesh) for the eigenvector.
    pub interior_nodes: Vec<usize>,
}

/// Tolerance on the relative change of the generalized Rayleigh quotient.
const EIGEN_TOL: f64 = 1e-10;

/// Assemble and solve on every level from 3 to `levels`, then extrapolate.
/// Returns the solution and the finest mesh.
pub fn dirichlet_lambda(tri: &SphericalTriangle, levels: u32) -> Result<(EigenSolution, TriMesh)> {
    if levels < 3 {
        return Err(Error::Invalid(format!(
            "need levels >= 3 for a usable interior, got {levels}"
        )));
    }
    let mut mesh = TriMesh::base(tri);
    let mut level_lambdas = Vec::new();
    let mut finest: Option<(f64, Vec<f64>, Vec<usize>)> = None;
    for level in 1..=levels {
        mesh = mesh.refine();
        if level < 3 {
            continue;
        }
        let (kmat, mmat, interior) = assemble(&mesh)?;
        let (lambda, vec) = smallest_eigenpair(&kmat, &mmat, EIGEN_TOL, 200)?;
        level_lambdas.push((level, lambda));
        finest = Some((lambda, vec, interior));
    }
    let (lambda, eigenvector, interior_nodes) = finest.expect("levels >= 3 solves at least once");
    let extrapolated_lambda = if level_lambdas.len() >= 2 {
        let (_, coarse) = level_lambdas[level_lambdas.len() - 2];
        (4.0 * lambda - coarse) / 3.0
    } else {
        lambda
    };
    Ok((
        EigenSolution {
            lambda,
            eigenvector,
            level: levels,
            extrapolated_lambda,
            level_lambdas,
            interior_nodes,
        },
        mesh,
    ))
}

/// Cone exponent from the extrapolated eigenvalue.
pub fn derive_alpha(sol: &EigenSolution, k: usize) -> Result<f64> {
    crate::profile::alpha_from_lambda(k, sol.extrapolated_lambda)
}

/// CSV export of the discrete eigenfunction over all mesh nodes
/// (boundary nodes carry the value 0).
pub fn write_eigenfunction_csv<W: Write>(
    w: &mut W,
    mesh: &TriMesh,
    sol: &EigenSolution,
) -> Result<()> {
    writeln!(w, "# schema: ruinlab.eigenfunction.v1")?;
    writeln!(w, "x,y,z,value")?;
    let mut values = vec![0.0; mesh.node_count()];
    for (&g, &v) in sol.interior_nodes.iter().zip(&sol.eigenvector) {
        values[g] = v;
    }
    for (p, v) in mesh.nodes().iter().zip(&values) {
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", p[0], p[1], p[2], v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedral_triangle_geometry() {
        let tri = tetrahedral_triangle();
        let v = tri.vertices();
        for i in 0..3 {
            assert!((norm3(v[i]) - 1.0).abs() < 1e-14);
            for j in (i + 1)..3 {
                assert!((dot3(v[i], v[j]) - 0.5).abs() < 1e-14);
            }
        }
        for s in tri.side_lengths() {
            assert!((s - std::f64::consts::PI / 3.0).abs() < 1e-14);
        }
        let eta = (1f64 / 3.0).acos();
        for a in tri.corner_angles() {
            assert!((a - eta).abs() < 1e-12);
        }
        assert!((tri.area() - (3.0 * eta - std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn octant_triangle_geometry() {
        let tri = octant_triangle();
        for s in tri.side_lengths() {
            assert!((s - std::f64::consts::PI / 2.0).abs() < 1e-15);
        }
        assert!((tri.area() - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn refine_counts_and_flags() {
        let mut mesh = TriMesh::base(&tetrahedral_triangle());
        for _ in 0..4 {
            let nodes = mesh.node_count();
            let tris = mesh.tri_count();
            // Edge count via the handshake over triangles.
            let mut edges = std::collections::HashSet::new();
            for &[a, b, c] in mesh.tris() {
                for (p, q) in [(a, b), (b, c), (c, a)] {
                    edges.insert((p.min(q), p.max(q)));
                }
            }
            let next = mesh.refine();
            assert_eq!(next.node_count(), nodes + edges.len());
            assert_eq!(next.tri_count(), 4 * tris);
            for (i, p) in next.nodes().iter().enumerate() {
                assert!((norm3(*p) - 1.0).abs() < 1e-14);
                // Flags match the geometric predicate.
                assert_eq!(next.boundary_flags()[i], next.is_boundary_point(*p));
            }
            mesh = next;
        }
        // Boundary node count: three sides of 2^level segments.
        assert_eq!(
            mesh.boundary_flags().iter().filter(|&&b| b).count(),
            3 * (1usize << mesh.level())
        );
    }

    #[test]
    fn diameters_halve_under_refinement() {
        // Measured behavior: the coarsest transitions overshoot one half
        // by the curvature of the patch (up to a ratio of 2/3 on the
        // octant); from level 2 on the ratio is within 5% of one half.
        for tri in [octant_triangle(), tetrahedral_triangle()] {
            let mut mesh = TriMesh::base(&tri);
            let mut prev = mesh.max_diameter();
            for _ in 0..6 {
                mesh = mesh.refine();
                let h = mesh.max_diameter();
                let ratio = h / prev;
                if mesh.level() >= 3 {
                    assert!(
                        (0.475..=0.525).contains(&ratio),
                        "diameter ratio {ratio} at level {}",
                        mesh.level()
                    );
                } else {
                    assert!(ratio < 0.7, "coarse ratio {ratio} at level {}", mesh.level());
                }
                prev = h;
            }
        }
    }

    #[test]
    fn octant_eigenvalue_is_near_twelve() {
        let (sol, _) = dirichlet_lambda(&octant_triangle(), 4).unwrap();
        // Modest level: the raw value and the extrapolation bracket 12.
        assert!((sol.extrapolated_lambda - 12.0).abs() / 12.0 < 5e-3);
        assert!(sol.lambda > 12.0);
        // Conforming elements refine downward.
        for w in sol.level_lambdas.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        // Discrete ground mode is positive.
        assert!(sol.eigenvector.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn eigenvalue_is_rotation_invariant() {
        // Two fixed rotations: around z by 0.7, then a composition.
        let c = 0.7f64.cos();
        let s = 0.7f64.sin();
        let rz = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let cx = 1.3f64.cos();
        let sx = 1.3f64.sin();
        let rx = [[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]];

        let base = dirichlet_lambda(&tetrahedral_triangle(), 4).unwrap().0;
        for rot in [rz, rx] {
            let turned = tetrahedral_triangle().rotated(&rot);
            let sol = dirichlet_lambda(&turned, 4).unwrap().0;
            assert!(
                (sol.lambda - base.lambda).abs() <= 1e-9 * base.lambda,
                "lambda changed under rotation: {} vs {}",
                sol.lambda,
                base.lambda
            );
        }
    }

    #[test]
    fn rejects_too_few_levels() {
        assert!(dirichlet_lambda(&octant_triangle(), 2).is_err());
    }

    #[test]
    fn alpha_derivation_delegates_to_the_formula() {
        let (sol, _) = dirichlet_lambda(&tetrahedral_triangle(), 4).unwrap();
        let alpha = derive_alpha(&sol, 4).unwrap();
        let direct = crate::profile::alpha_from_lambda(4, sol.extrapolated_lambda).unwrap();
        assert_eq!(alpha, direct);
        assert!(alpha > 5.0 && alpha < 6.5);
    }

    #[test]
    fn mesh_text_export_shape() {
        let mesh = TriMesh::base(&octant_triangle()).refine();
        let mut buf = Vec::new();
        mesh.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# schema: ruinlab.mesh.v1\nnodes 6\n"));
        assert!(text.contains("triangles 4\n"));
    }
}
