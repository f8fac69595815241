//! Triangular meshes with tagged boundary edges.

use crate::error::{FrakturError, Result};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Displacement fixed to zero.
    Dirichlet,
    /// Carries the control force.
    Neumann,
    /// Traction free.
    Free,
}

/// Tag per side of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tagging {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl Default for Tagging {
    fn default() -> Self {
        Self {
            left: BoundaryTag::Dirichlet,
            right: BoundaryTag::Neumann,
            bottom: BoundaryTag::Free,
            top: BoundaryTag::Free,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh2D {
    nodes: Vec<[f64; 2]>,
    elements: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh2D {
    /// Validates orientation, boundary coverage and the presence of both a
    /// Dirichlet and a Neumann edge.
    pub fn new(
        nodes: Vec<[f64; 2]>,
        elements: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mesh = Self { nodes, elements, boundary };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let nn = self.nodes.len();
        if self.elements.is_empty() {
            return Err(FrakturError::InvalidMesh("no elements".into()));
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, tri) in self.elements.iter().enumerate() {
            if tri.iter().any(|&v| v >= nn) {
                return Err(FrakturError::InvalidMesh(format!("element {e} references a missing node")));
            }
            if self.signed_area(e) <= 0.0 {
                return Err(FrakturError::InvalidMesh(format!(
                    "element {e} has non-positive signed area"
                )));
            }
            for k in 0..3 {
                *edge_count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut tagged: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for edge in &self.boundary {
            let key = edge_key(edge.nodes[0], edge.nodes[1]);
            if edge_count.get(&key) != Some(&1) {
                return Err(FrakturError::InvalidMesh(format!(
                    "tagged edge {:?} is not a boundary edge",
                    edge.nodes
                )));
            }
            if tagged.insert(key, edge.tag).is_some() {
                return Err(FrakturError::InvalidMesh(format!(
                    "boundary edge {:?} tagged more than once",
                    edge.nodes
                )));
            }
        }
        let untagged = edge_count.iter().filter(|(k, &c)| c == 1 && !tagged.contains_key(k)).count();
        if untagged > 0 {
            return Err(FrakturError::InvalidMesh(format!("{untagged} boundary edges carry no tag")));
        }
        for tag in [BoundaryTag::Dirichlet, BoundaryTag::Neumann] {
            if !self.boundary.iter().any(|e| e.tag == tag) {
                return Err(FrakturError::InvalidMesh(format!("no {tag:?} edge")));
            }
        }
        Ok(())
    }

    /// Uniform mesh of the unit square, each cell split along its rising diagonal.
    pub fn unit_square(n: usize, tagging: &Tagging) -> Result<Self> {
        if n == 0 {
            return Err(FrakturError::InvalidArgument("mesh subdivision n must be >= 1".into()));
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let h = 1.0 / n as f64;
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                nodes.push([i as f64 * h, j as f64 * h]);
            }
        }
        let mut elements = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                elements.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut boundary = Vec::with_capacity(4 * n);
        for k in 0..n {
            boundary.push(BoundaryEdge { nodes: [id(k, 0), id(k + 1, 0)], tag: tagging.bottom });
            boundary.push(BoundaryEdge { nodes: [id(n, k), id(n, k + 1)], tag: tagging.right });
            boundary.push(BoundaryEdge { nodes: [id(k + 1, n), id(k, n)], tag: tagging.top });
            boundary.push(BoundaryEdge { nodes: [id(0, k + 1), id(0, k)], tag: tagging.left });
        }
        Self::new(nodes, elements, boundary)
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }
    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }
    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn signed_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.signed_area(e)).sum()
    }

    /// Sorted nodes lying on at least one edge with the given tag.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.boundary.iter().filter(|e| e.tag == tag).flat_map(|e| e.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Nodes on any boundary edge.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_nodes()];
        for e in &self.boundary {
            mask[e.nodes[0]] = true;
            mask[e.nodes[1]] = true;
        }
        mask
    }

    /// Plain-text listing of nodes, elements and tagged edges.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "nodes {}", self.n_nodes());
        for (i, p) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "{i} {:.17e} {:.17e}", p[0], p[1]);
        }
        let _ = writeln!(s, "elements {}", self.n_elements());
        for (e, t) in self.elements.iter().enumerate() {
            let _ = writeln!(s, "{e} {} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "boundary_edges {}", self.boundary.len());
        for b in &self.boundary {
            let tag = match b.tag {
                BoundaryTag::Dirichlet => "dirichlet",
                BoundaryTag::Neumann => "neumann",
                BoundaryTag::Free => "free",
            };
            let _ = writeln!(s, "{} {} {tag}", b.nodes[0], b.nodes[1]);
        }
        s
    }
}

pub fn build_unit_square_mesh(n: usize, tagging: &Tagging) -> Result<Mesh2D> {
    Mesh2D::unit_square(n, tagging)
}
