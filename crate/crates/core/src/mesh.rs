//! Structured triangulations of axis-aligned rectangles.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use core::num::NonZeroUsize;

use crate::{Error, Result};

/// Side of the rectangle a boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryTag {
    /// Left side, x = x_min.
    Gamma1,
    /// Right side, x = x_max.
    Gamma2,
    /// Top side, y = y_max.
    Gamma3,
    /// Bottom side, y = y_min.
    Gamma4,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [
        BoundaryTag::Gamma1,
        BoundaryTag::Gamma2,
        BoundaryTag::Gamma3,
        BoundaryTag::Gamma4,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            BoundaryTag::Gamma1 => [-1.0, 0.0],
            BoundaryTag::Gamma2 => [1.0, 0.0],
            BoundaryTag::Gamma3 => [0.0, 1.0],
            BoundaryTag::Gamma4 => [0.0, -1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundaryTag::Gamma1 => "G1",
            BoundaryTag::Gamma2 => "G2",
            BoundaryTag::Gamma3 => "G3",
            BoundaryTag::Gamma4 => "G4",
        }
    }
}

/// Small set of boundary tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct TagSet(u8);

impl TagSet {
    pub const EMPTY: TagSet = TagSet(0);
    pub const ALL: TagSet = TagSet(0b1111);

    pub fn of(tags: &[BoundaryTag]) -> TagSet {
        TagSet(tags.iter().fold(0, |acc, t| acc | t.bit()))
    }

    pub fn contains(self, tag: BoundaryTag) -> bool {
        self.0 & tag.bit() != 0
    }

    pub fn insert(&mut self, tag: BoundaryTag) {
        self.0 |= tag.bit();
    }

    pub fn intersects(self, other: TagSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> TagSet {
        TagSet(!self.0 & 0b1111)
    }

    pub fn iter(self) -> impl Iterator<Item = BoundaryTag> {
        BoundaryTag::ALL.into_iter().filter(move |t| self.contains(*t))
    }
}

/// Geometry of the affine map from the reference triangle
/// {(0,0), (1,0), (0,1)} onto a mesh triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub origin: [f64; 2],
    /// Columns are the images of the reference edge vectors.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    pub inv_transpose: [[f64; 2]; 2],
}

impl AffineMap {
    pub fn to_physical(&self, p: [f64; 2]) -> [f64; 2] {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * p[0] + j[0][1] * p[1],
            self.origin[1] + j[1][0] * p[0] + j[1][1] * p[1],
        ]
    }

    /// Physical gradient `J⁻ᵀ ĝ` of a reference gradient `ĝ`.
    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let m = &self.inv_transpose;
        [m[0][0] * g[0] + m[0][1] * g[1], m[1][0] * g[0] + m[1][1] * g[1]]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Each edge stored once as (lower index, higher index).
    pub edges: Vec<[usize; 2]>,
    /// Per triangle: edges (v0,v1), (v1,v2), (v2,v0).
    pub triangle_edges: Vec<[usize; 3]>,
    pub boundary_edges: Vec<(usize, BoundaryTag)>,
    /// Tags of all boundary edges incident to each vertex (corners carry two).
    pub vertex_tags: Vec<TagSet>,
    pub h: f64,
    pub bounds: [[f64; 2]; 2],
}

impl TriMesh {
    /// n×n structured mesh of the unit square.
    pub fn unit_square(n: NonZeroUsize) -> TriMesh {
        Self::rectangle(n, [0.0, 1.0], [0.0, 1.0])
    }

    /// n×n structured mesh of `(x0, x1) × (y0, y1)`; every cell is split along
    /// its lower-left to upper-right diagonal.
    pub fn rectangle(n: NonZeroUsize, xr: [f64; 2], yr: [f64; 2]) -> TriMesh {
        assert!(xr[1] > xr[0] && yr[1] > yr[0], "empty rectangle");
        let n = n.get();
        let nv = n + 1;
        let mut vertices = Vec::with_capacity(nv * nv);
        for j in 0..=n {
            for i in 0..=n {
                // exact endpoints so boundary detection is exact
                let x = if i == n { xr[1] } else { xr[0] + (xr[1] - xr[0]) * i as f64 / n as f64 };
                let y = if j == n { yr[1] } else { yr[0] + (yr[1] - yr[0]) * j as f64 / n as f64 };
                vertices.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * nv + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }

        let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut uses: Vec<u8> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let mut te = [0; 3];
            for k in 0..3 {
                let (p, q) = (tri[k], tri[(k + 1) % 3]);
                let key = (p.min(q), p.max(q));
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    uses.push(0);
                    edges.len() - 1
                });
                uses[e] += 1;
                te[k] = e;
            }
            triangle_edges.push(te);
        }

        let mut boundary_edges = Vec::new();
        let mut vertex_tags = alloc::vec![TagSet::EMPTY; vertices.len()];
        for (e, &[p, q]) in edges.iter().enumerate() {
            if uses[e] != 1 {
                continue;
            }
            let (a, b) = (vertices[p], vertices[q]);
            let tag = if a[0] == xr[0] && b[0] == xr[0] {
                BoundaryTag::Gamma1
            } else if a[0] == xr[1] && b[0] == xr[1] {
                BoundaryTag::Gamma2
            } else if a[1] == yr[1] && b[1] == yr[1] {
                BoundaryTag::Gamma3
            } else {
                debug_assert!(a[1] == yr[0] && b[1] == yr[0]);
                BoundaryTag::Gamma4
            };
            boundary_edges.push((e, tag));
            vertex_tags[p].insert(tag);
            vertex_tags[q].insert(tag);
        }

        let mut mesh = TriMesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_edges,
            vertex_tags,
            h: 0.0,
            bounds: [xr, yr],
        };
        mesh.h = mesh
            .triangles
            .iter()
            .map(|t| {
                (0..3)
                    .map(|k| dist(mesh.vertices[t[k]], mesh.vertices[t[(k + 1) % 3]]))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        mesh
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn affine_map(&self, t: usize) -> Result<AffineMap> {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det > 0.0) {
            return Err(Error::DegenerateElement { triangle: t });
        }
        // J⁻¹ = adj(J)/det, and we need its transpose
        let inv_transpose = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        Ok(AffineMap { origin: a, jacobian: jac, det, inv_transpose })
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [p, q] = self.edges[e];
        let (a, b) = (self.vertices[p], self.vertices[q]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Plain-text dump: `v x y`, `t i j k`, `b i j tag` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.17e} {:.17e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
        }
        for &(e, tag) in &self.boundary_edges {
            let [p, q] = self.edges[e];
            let _ = writeln!(out, "b {} {} {}", p, q, tag.label());
        }
        out
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}
