use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Identity of a structured mesh; two meshes with equal ids are identical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshId {
    pub nx: usize,
    pub ny: usize,
}

/// Structured triangulation of `[0,1]^2` with row-major node numbering.
///
/// Node `(i, j)` sits at `(i / (nx-1), j / (ny-1))` and has index `j * nx + i`.
/// Each grid cell is split along its lower-left to upper-right diagonal.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    nx: usize,
    ny: usize,
    nodes: Vec<[T; 2]>,
    elements: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    on_boundary: Vec<bool>,
}

impl<T: Real> Mesh<T> {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::MeshSize { nx, ny });
        }
        let hx = T::from_usize_lossy(nx - 1);
        let hy = T::from_usize_lossy(ny - 1);
        let mut nodes = Vec::with_capacity(nx * ny);
        let mut boundary = Vec::new();
        let mut on_boundary = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = nodes.len();
                nodes.push([T::from_usize_lossy(i) / hx, T::from_usize_lossy(j) / hy]);
                let b = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
                on_boundary.push(b);
                if b {
                    boundary.push(k);
                }
            }
        }
        let mut elements = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let a = j * nx + i;
                let b = a + 1;
                let c = b + nx;
                let d = a + nx;
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            }
        }
        Ok(Self {
            nx,
            ny,
            nodes,
            elements,
            boundary,
            on_boundary,
        })
    }

    pub fn id(&self) -> MeshId {
        MeshId {
            nx: self.nx,
            ny: self.ny,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[T; 2]] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.on_boundary[node]
    }

    /// Largest cell edge along either axis.
    pub fn spacing(&self) -> T {
        T::one() / T::from_usize_lossy((self.nx - 1).min(self.ny - 1))
    }

    /// Signed area of an element (positive for counter-clockwise vertices).
    pub fn element_area(&self, e: usize) -> T {
        let [a, b, c] = self.elements[e];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])) / T::lit(2.0)
    }

    /// Node index of grid position `(i, j)`.
    pub fn node_at(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Interior nodes at least `margin` cells away from the boundary.
    pub fn interior_nodes(&self, margin: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for j in margin..self.ny.saturating_sub(margin) {
            for i in margin..self.nx.saturating_sub(margin) {
                out.push(self.node_at(i, j));
            }
        }
        out
    }

    /// Locates `p` and returns the three vertices with their barycentric weights.
    pub fn locate(&self, p: [T; 2]) -> Result<[(usize, T); 3]> {
        let tol = T::lit(1e-12);
        let outside = |v: T| v < -tol || v > T::one() + tol || !v.is_finite();
        if outside(p[0]) || outside(p[1]) {
            return Err(Error::OutsideDomain {
                x1: p[0].as_f64(),
                x2: p[1].as_f64(),
            });
        }
        let clamp = |v: T| v.max(T::zero()).min(T::one());
        let gx = clamp(p[0]) * T::from_usize_lossy(self.nx - 1);
        let gy = clamp(p[1]) * T::from_usize_lossy(self.ny - 1);
        let i = gx.floor().as_f64().max(0.0) as usize;
        let j = gy.floor().as_f64().max(0.0) as usize;
        let i = i.min(self.nx - 2);
        let j = j.min(self.ny - 2);
        let s = gx - T::from_usize_lossy(i);
        let t = gy - T::from_usize_lossy(j);
        let a = self.node_at(i, j);
        let b = a + 1;
        let c = b + self.nx;
        let d = a + self.nx;
        if t <= s {
            Ok([(a, T::one() - s), (b, s - t), (c, t)])
        } else {
            Ok([(a, T::one() - t), (c, s), (d, t - s)])
        }
    }
}
