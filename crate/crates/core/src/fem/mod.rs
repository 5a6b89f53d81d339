//! P1 finite elements for the sign-changing pencil on the two-phase disk.
//!
//! The bilinear form is `∫₊ a₊∇u·∇v − ∫₋ a₋∇u·∇v` with the `L²(dx)` mass,
//! whose natural interface condition is continuity of the flux `a ∂_r u`.

mod mesh;
mod sparse;

pub use mesh::{build_disk_mesh, Region, TriangleMesh};
pub use sparse::{dot, CsrMatrix};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Transmission, TwoPhaseDiskConfig};

/// Element stiffness (`a ∫ ∇φᵢ·∇φⱼ`, signed by region) and exact P1 mass.
pub fn element_matrices(p: [[f64; 2]; 3], a: f64, region: Region) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let area = 0.5 * area2.abs();
    // ∇φᵢ = rot(p_{i+2} − p_{i+1}) / (2A) up to orientation, which cancels in products
    let g: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let (q, r) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            [(q[1] - r[1]) / area2, (r[0] - q[0]) / area2]
        })
        .collect();
    let s = region.sign() * a * area;
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = s * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (k, m)
}

/// Stiffness/mass pair with the outer Dirichlet vertices eliminated.
#[derive(Debug, Clone)]
pub struct AssembledPair {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    /// Mesh vertex of each free degree of freedom.
    pub dof_vertex: Vec<usize>,
    /// Degree of freedom of each vertex (`None` on the Dirichlet boundary).
    pub vertex_dof: Vec<Option<usize>>,
}

impl AssembledPair {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Expand a free-dof vector to all mesh vertices (zero on the boundary).
    pub fn to_vertex_values(&self, x: &[f64]) -> Vec<f64> {
        self.vertex_dof
            .iter()
            .map(|d| d.map_or(0.0, |i| x[i]))
            .collect()
    }
}

/// Assemble `K = Σ ±∫ a∇φᵢ·∇φⱼ` (coefficient at the triangle centroid) and
/// `M = Σ ∫ φᵢφⱼ`, then delete the Dirichlet rows and columns.
///
/// Element matrices may be computed in parallel; the reduction is performed in
/// triangle order so the result is bitwise reproducible.
pub fn assemble(config: &TwoPhaseDiskConfig, mesh: &TriangleMesh, exec: Exec) -> Result<AssembledPair> {
    if config.transmission != Transmission::Flux {
        return Err(Error::UnsupportedConvention(
            "finite elements implement the flux convention only".into(),
        ));
    }
    let boundary = mesh.is_boundary();
    let mut vertex_dof = vec![None; mesh.vertices.len()];
    let mut dof_vertex = Vec::new();
    for (v, &b) in boundary.iter().enumerate() {
        if !b {
            vertex_dof[v] = Some(dof_vertex.len());
            dof_vertex.push(v);
        }
    }
    let ids: Vec<usize> = (0..mesh.triangles.len()).collect();
    let elements = exec.map(&ids, |&t| {
        let tri = mesh.triangles[t];
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let c = mesh.centroid(t);
        let r = c[0].hypot(c[1]);
        let region = mesh.regions[t];
        let a = match region {
            Region::Plus => config.a_plus.value(r),
            Region::Minus => config.a_minus.value(r),
        };
        element_matrices(p, a, region)
    });
    let mut kt = Vec::with_capacity(9 * elements.len());
    let mut mt = Vec::with_capacity(9 * elements.len());
    for (tri, (ke, me)) in mesh.triangles.iter().zip(&elements) {
        for i in 0..3 {
            let Some(di) = vertex_dof[tri[i]] else { continue };
            for j in 0..3 {
                let Some(dj) = vertex_dof[tri[j]] else { continue };
                kt.push((di, dj, ke[i][j]));
                mt.push((di, dj, me[i][j]));
            }
        }
    }
    let n = dof_vertex.len();
    Ok(AssembledPair {
        k: CsrMatrix::from_triplets(n, &kt),
        m: CsrMatrix::from_triplets(n, &mt),
        dof_vertex,
        vertex_dof,
    })
}

/// Squared `L²` mass of a vertex field restricted to triangles selected by
/// `keep(centroid radius)`, using exact P1 element masses.
pub fn partial_mass(mesh: &TriangleMesh, values: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    let mut total = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let c = mesh.centroid(t);
        if !keep(c[0].hypot(c[1])) {
            continue;
        }
        let area = mesh.signed_area(t).abs();
        let u = [values[tri[0]], values[tri[1]], values[tri[2]]];
        let sq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let cross = u[0] * u[1] + u[1] * u[2] + u[0] * u[2];
        total += area / 6.0 * (sq + cross);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_right_triangle() {
        let p = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let (k, m) = element_matrices(p, 1.0, Region::Plus);
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert!((m[0][0] - 1.0 / 12.0).abs() < 1e-15);
        assert!((m[0][1] - 1.0 / 24.0).abs() < 1e-15);
        let (km, _) = element_matrices(p, 1.0, Region::Minus);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(km[i][j], -k[i][j]);
            }
        }
    }

    #[test]
    fn unit_normal_is_unsupported() {
        let c = TwoPhaseDiskConfig::reference(Transmission::UnitNormal);
        let mesh = build_disk_mesh(&c, 0.25).unwrap();
        assert!(matches!(
            assemble(&c, &mesh, Exec::Sequential),
            Err(Error::UnsupportedConvention(_))
        ));
    }
}
