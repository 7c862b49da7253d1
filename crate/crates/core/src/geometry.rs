//! Straight-segment contours, local frames and P1/P0 basis bookkeeping.
//!
//! Frames follow `n = rotate(τ, −90°)`, so `ν = n × τ = +ẑ`: the in-plane
//! tangent `τ`, the outward normal `n` and the out-of-plane direction `ν`
//! form the surface frame of the 2D problem.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

pub const MIN_ELEMENTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("mesh too coarse: {n} elements, at least {MIN_ELEMENTS} required")]
    MeshTooCoarse { n: usize },
    #[error("invalid geometry: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    nodes: Vec<Point>,
    elements: Vec<[usize; 2]>,
    closed: bool,
    tangents: Vec<Point>,
    normals: Vec<Point>,
    lengths: Vec<f64>,
}

impl Contour {
    /// Polyline through `nodes`; closed contours join the last node to the
    /// first. The normal is on the right of the direction of travel.
    pub fn from_nodes(nodes: Vec<Point>, closed: bool) -> Result<Self> {
        let nn = nodes.len();
        let ne = if closed { nn } else { nn.saturating_sub(1) };
        if ne < 1 || (closed && nn < 3) {
            return Err(GeometryError::Invalid(format!("{nn} nodes do not form a contour")));
        }
        let elements: Vec<[usize; 2]> = (0..ne).map(|e| [e, (e + 1) % nn]).collect();
        let mut tangents = Vec::with_capacity(ne);
        let mut normals = Vec::with_capacity(ne);
        let mut lengths = Vec::with_capacity(ne);
        for (e, &[i, j]) in elements.iter().enumerate() {
            let d = [nodes[j][0] - nodes[i][0], nodes[j][1] - nodes[i][1]];
            let h = d[0].hypot(d[1]);
            if !(h > 0.0 && h.is_finite()) {
                return Err(GeometryError::Invalid(format!("element {e} has length {h}")));
            }
            let t = [d[0] / h, d[1] / h];
            tangents.push(t);
            normals.push([t[1], -t[0]]);
            lengths.push(h);
        }
        Ok(Self { nodes, elements, closed, tangents, normals, lengths })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 2]] {
        &self.elements
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn tangent(&self, e: usize) -> Point {
        self.tangents[e]
    }

    pub fn normal(&self, e: usize) -> Point {
        self.normals[e]
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Point at local coordinate `t ∈ [0, 1]` of element `e`.
    pub fn point(&self, e: usize, t: f64) -> Point {
        let [i, j] = self.elements[e];
        let (a, b) = (self.nodes[i], self.nodes[j]);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    pub fn midpoint(&self, e: usize) -> Point {
        self.point(e, 0.5)
    }

    /// Stable FNV-1a fingerprint of the node coordinates and topology.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(&[self.closed as u8]);
        for p in &self.nodes {
            feed(&p[0].to_le_bytes());
            feed(&p[1].to_le_bytes());
        }
        format!("{h:016x}")
    }

    /// CSV dump: node rows then element rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# closed={}", self.closed)?;
        writeln!(w, "kind,index,x,y,node0,node1,tx,ty,nx,ny,length")?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "node,{i},{:e},{:e},,,,,,,", p[0], p[1])?;
        }
        for (e, &[i, j]) in self.elements.iter().enumerate() {
            let (t, n) = (self.tangents[e], self.normals[e]);
            writeln!(w, "element,{e},,,{i},{j},{:e},{:e},{:e},{:e},{:e}", t[0], t[1], n[0], n[1], self.lengths[e])?;
        }
        Ok(())
    }
}

/// Inscribed regular polygon, counter-clockwise, node `i` at angle `2πi/N`.
pub fn mesh_circle(radius: f64, n_elements: usize) -> Result<Contour> {
    if n_elements < MIN_ELEMENTS {
        return Err(GeometryError::MeshTooCoarse { n: n_elements });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeometryError::Invalid(format!("radius must be positive, got {radius}")));
    }
    let nodes = (0..n_elements)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n_elements as f64;
            [radius * th.cos(), radius * th.sin()]
        })
        .collect();
    Contour::from_nodes(nodes, true)
}

/// Straight plate of the given length centred on the origin along the
/// x-axis. Nodes run from `+L/2` to `−L/2`, which puts the normals on `+ŷ`.
pub fn mesh_plate(length: f64, n_elements: usize) -> Result<Contour> {
    if n_elements < MIN_ELEMENTS {
        return Err(GeometryError::MeshTooCoarse { n: n_elements });
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(GeometryError::Invalid(format!("length must be positive, got {length}")));
    }
    let h = length / n_elements as f64;
    let nodes = (0..=n_elements).map(|i| [0.5 * length - i as f64 * h, 0.0]).collect();
    Contour::from_nodes(nodes, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    P1Nodal,
    P0Elementwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofSpace {
    pub kind: SpaceKind,
    pub count: usize,
    /// Degrees of freedom held at zero (endpoints of open contours).
    pub constrained: BTreeSet<usize>,
}

impl DofSpace {
    pub fn p1(contour: &Contour) -> Self {
        let count = contour.n_nodes();
        let constrained = if contour.is_closed() { BTreeSet::new() } else { [0, count - 1].into_iter().collect() };
        Self { kind: SpaceKind::P1Nodal, count, constrained }
    }

    pub fn p0(contour: &Contour) -> Self {
        Self { kind: SpaceKind::P0Elementwise, count: contour.n_elements(), constrained: BTreeSet::new() }
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained.contains(&dof)
    }

    /// Global DOFs touching element `e`, in local order.
    pub fn element_dofs(&self, contour: &Contour, e: usize) -> Vec<usize> {
        match self.kind {
            SpaceKind::P1Nodal => contour.elements()[e].to_vec(),
            SpaceKind::P0Elementwise => vec![e],
        }
    }
}

/// Value and arc-length derivative of one basis function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValue {
    pub dof: usize,
    pub value: f64,
    pub deriv: f64,
}

/// Basis functions supported on element `e`, evaluated at local `t`.
pub fn basis_eval(space: &DofSpace, contour: &Contour, e: usize, t: f64) -> Vec<BasisValue> {
    let h = contour.length(e);
    match space.kind {
        SpaceKind::P1Nodal => {
            let [i, j] = contour.elements()[e];
            vec![
                BasisValue { dof: i, value: 1.0 - t, deriv: -1.0 / h },
                BasisValue { dof: j, value: t, deriv: 1.0 / h },
            ]
        }
        SpaceKind::P0Elementwise => vec![BasisValue { dof: e, value: 1.0, deriv: 0.0 }],
    }
}
