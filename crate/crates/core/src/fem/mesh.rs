//! Structured polar triangulation of the two-phase disk.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TwoPhaseDiskConfig;
use crate::numerics::fmt17;

/// Phase a triangle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Plus,
    Minus,
}

impl Region {
    pub fn sign(self) -> f64 {
        match self {
            Region::Plus => 1.0,
            Region::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Plus => "plus",
            Region::Minus => "minus",
        }
    }
}

/// Conforming triangulation with region tags.
///
/// Vertices are numbered ring by ring from the center outward, which keeps the
/// profile of the assembled matrices narrow.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub boundary: Vec<usize>,
    pub interface: Vec<usize>,
    pub rz: f64,
    pub ry: f64,
}

impl TriangleMesh {
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    pub fn is_boundary(&self) -> Vec<bool> {
        let mut flag = vec![false; self.vertices.len()];
        for &v in &self.boundary {
            flag[v] = true;
        }
        flag
    }

    /// Check the structural invariants; returns the first violation.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::MeshInvalid(format!("triangle {t} references a missing vertex")));
            }
            if self.signed_area(t) <= 0.0 {
                return Err(Error::MeshInvalid(format!("triangle {t} has non-positive area")));
            }
            let tol = 1e-12 * self.rz;
            let radii: Vec<f64> = tri
                .iter()
                .map(|&v| self.vertices[v][0].hypot(self.vertices[v][1]))
                .collect();
            let ok = match self.regions[t] {
                Region::Plus => radii.iter().all(|&r| r <= self.rz + tol),
                Region::Minus => radii.iter().all(|&r| r >= self.rz - tol),
            };
            if !ok {
                return Err(Error::MeshInvalid(format!("triangle {t} straddles the interface")));
            }
        }
        for &v in &self.interface {
            let r = self.vertices[v][0].hypot(self.vertices[v][1]);
            if (r - self.rz).abs() > 1e-12 * self.rz {
                return Err(Error::MeshInvalid(format!("interface vertex {v} at radius {r}")));
            }
        }
        // conformity: every interior edge shared by exactly two triangles with
        // opposite orientation, boundary edges only on the outer circle
        let mut edges: Vec<(usize, usize, bool)> = Vec::with_capacity(3 * self.triangles.len());
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b), a < b));
            }
        }
        edges.sort_unstable();
        let on_boundary = self.is_boundary();
        let mut i = 0;
        while i < edges.len() {
            let mut j = i;
            while j < edges.len() && edges[j].0 == edges[i].0 && edges[j].1 == edges[i].1 {
                j += 1;
            }
            match j - i {
                1 => {
                    let (a, b, _) = edges[i];
                    if !(on_boundary[a] && on_boundary[b]) {
                        return Err(Error::MeshInvalid(format!("edge ({a}, {b}) is unmatched")));
                    }
                }
                2 if edges[i].2 != edges[i + 1].2 => {}
                _ => {
                    return Err(Error::MeshInvalid(format!(
                        "edge ({}, {}) is not conforming",
                        edges[i].0, edges[i].1
                    )))
                }
            }
            i = j;
        }
        Ok(())
    }

    /// Plain-text export: vertex count, `x y` lines, triangle count,
    /// `i j k region` lines.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(w, "{} {}", fmt17(v[0]), fmt17(v[1]))?;
        }
        writeln!(w, "{}", self.triangles.len())?;
        for (t, r) in self.triangles.iter().zip(&self.regions) {
            writeln!(w, "{} {} {} {}", t[0], t[1], t[2], r.as_str())?;
        }
        Ok(())
    }
}

/// Concentric rings with angular resolution proportional to the radius and
/// one ring exactly on `rz`; neighbouring rings are stitched by walking both
/// angle sequences in order.
pub fn build_disk_mesh(config: &TwoPhaseDiskConfig, target_edge: f64) -> Result<TriangleMesh> {
    let (rz, ry) = (config.rz, config.ry);
    if !(target_edge > 0.0) || !target_edge.is_finite() {
        return Err(Error::MeshInvalid(format!(
            "target edge length must be positive, got {target_edge}"
        )));
    }
    if target_edge > ry - rz || target_edge > rz {
        return Err(Error::MeshInvalid(format!(
            "edge {target_edge} cannot resolve the phases (rz = {rz}, ry − rz = {})",
            ry - rz
        )));
    }
    let n_in = (rz / target_edge).ceil() as usize;
    let n_out = ((ry - rz) / target_edge).ceil() as usize;
    let mut radii: Vec<f64> = (1..=n_in).map(|i| rz * i as f64 / n_in as f64).collect();
    radii.extend((1..=n_out).map(|i| rz + (ry - rz) * i as f64 / n_out as f64));
    radii[n_in - 1] = rz;
    *radii.last_mut().unwrap() = ry;

    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_start = Vec::with_capacity(radii.len());
    let mut ring_count = Vec::with_capacity(radii.len());
    let mut prev = 1usize;
    for &r in &radii {
        let m = ((2.0 * PI * r / target_edge).ceil() as usize).max(6).max(prev);
        ring_start.push(vertices.len());
        ring_count.push(m);
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
        prev = m;
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    // center fan
    let m0 = ring_count[0];
    for k in 0..m0 {
        triangles.push([0, ring_start[0] + k, ring_start[0] + (k + 1) % m0]);
        regions.push(Region::Plus);
    }
    for ring in 0..radii.len() - 1 {
        let region = if radii[ring + 1] <= rz { Region::Plus } else { Region::Minus };
        let (sa, ma) = (ring_start[ring], ring_count[ring]);
        let (sb, mb) = (ring_start[ring + 1], ring_count[ring + 1]);
        let (mut i, mut j) = (0usize, 0usize);
        while i < ma || j < mb {
            let next_a = (i + 1) as f64 / ma as f64;
            let next_b = (j + 1) as f64 / mb as f64;
            let a0 = sa + i % ma;
            let b0 = sb + j % mb;
            if j == mb || (i < ma && next_a < next_b) {
                triangles.push([a0, sa + (i + 1) % ma, b0]);
                i += 1;
            } else {
                triangles.push([a0, sb + (j + 1) % mb, b0]);
                j += 1;
            }
            regions.push(region);
        }
    }
    let mut mesh = TriangleMesh {
        interface: (0..ring_count[n_in - 1]).map(|k| ring_start[n_in - 1] + k).collect(),
        boundary: {
            let last = radii.len() - 1;
            (0..ring_count[last]).map(|k| ring_start[last] + k).collect()
        },
        vertices,
        triangles,
        regions,
        rz,
        ry,
    };
    for t in 0..mesh.triangles.len() {
        if mesh.signed_area(t) < 0.0 {
            mesh.triangles[t].swap(1, 2);
        }
    }
    mesh.validate()?;
    Ok(mesh)
}
