//! Radial meshes on `[0, R_dom]` and composite Simpson weights on them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    nodes: Vec<f64>,
}

impl RadialMesh {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 {
            return Err(Error::InvalidParams("mesh needs >= 3 nodes starting at r = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("mesh nodes must increase strictly".into()));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(radius: f64, intervals: usize) -> Self {
        let intervals = intervals.max(2);
        let h = radius / intervals as f64;
        Self {
            nodes: (0..=intervals).map(|i| i as f64 * h).collect(),
        }
    }

    /// Uniform spacing `h` up to `core_radius`, then cells growing by `ratio`
    /// until `outer_radius` is covered.
    pub fn stretched(h: f64, core_radius: f64, ratio: f64, outer_radius: f64) -> Result<Self> {
        if !(h > 0.0) || !(core_radius > 0.0) || !(ratio >= 1.0) {
            return Err(Error::InvalidParams("bad stretched-mesh parameters".into()));
        }
        let core_cells = (core_radius / h).round().max(2.0) as usize;
        let mut nodes: Vec<f64> = (0..=core_cells).map(|i| i as f64 * h).collect();
        let mut cell = h;
        while *nodes.last().unwrap() < outer_radius {
            cell *= ratio;
            let next = nodes.last().unwrap() + cell;
            nodes.push(next);
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn nodes_within(&self, radius: f64) -> usize {
        self.nodes.iter().take_while(|&&r| r < radius).count()
    }

    /// Same mesh with every cell split in two.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len());
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.radius());
        Self { nodes }
    }

    /// Weights `w_i` with `sum w_i f(r_i) ≈ ∫_0^R f dr`: piecewise quadratic
    /// over pairs of cells, the last cell closed with the quadratic through the
    /// final three nodes when the cell count is odd.
    pub fn simpson_weights(&self) -> Vec<f64> {
        simpson_weights(&self.nodes)
    }
}

pub fn simpson_weights(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let mut w = vec![0.0; m];
    let cells = m - 1;
    let paired = cells - cells % 2;
    let mut i = 0;
    while i < paired {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let s = h0 + h1;
        w[i] += s * (2.0 * h0 - h1) / (6.0 * h0);
        w[i + 1] += s * s * s / (6.0 * h0 * h1);
        w[i + 2] += s * (2.0 * h1 - h0) / (6.0 * h1);
        i += 2;
    }
    if cells % 2 == 1 {
        let j = m - 3;
        let h0 = x[j + 1] - x[j];
        let h1 = x[j + 2] - x[j + 1];
        w[j] -= h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        w[j + 1] += h1 * (3.0 * h0 + h1) / (6.0 * h0);
        w[j + 2] += h1 * (3.0 * h0 + 2.0 * h1) / (6.0 * (h0 + h1));
    }
    w
}

/// Composite Simpson on a uniform grid over `[0, b]` with `intervals` cells.
pub fn simpson<F: Fn(f64) -> f64>(f: F, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = b / n as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..n {
        let c = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += c * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_integrate_cubics_exactly() {
        let meshes = [
            RadialMesh::uniform(2.0, 10),
            RadialMesh::uniform(2.0, 11),
            RadialMesh::stretched(0.1, 1.0, 1.1, 5.0).unwrap(),
        ];
        for mesh in meshes {
            let b = mesh.radius();
            let w = mesh.simpson_weights();
            let approx: f64 = mesh
                .nodes()
                .iter()
                .zip(&w)
                .map(|(r, wi)| wi * (1.0 + r * r))
                .sum();
            assert_relative_eq!(approx, b + b * b * b / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn stretched_mesh_covers_outer_radius() {
        let m = RadialMesh::stretched(0.05, 4.0, 1.02, 1000.0).unwrap();
        assert!(m.radius() >= 1000.0);
        assert!(m.len() < 1000);
        assert_relative_eq!(m.min_spacing(), 0.05, max_relative = 1e-9);
        assert_eq!(m.nodes_within(1.0), 20);
    }

    #[test]
    fn refine_halves_cells() {
        let m = RadialMesh::uniform(1.0, 4).refined();
        assert_eq!(m.len(), 9);
        assert_relative_eq!(m.min_spacing(), 0.125);
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(RadialMesh::from_nodes(vec![0.0, 1.0]).is_err());
        assert!(RadialMesh::from_nodes(vec![0.0, 1.0, 1.0]).is_err());
        assert!(RadialMesh::from_nodes(vec![0.1, 1.0, 2.0]).is_err());
    }
}
