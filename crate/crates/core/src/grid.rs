//! One-dimensional spatial quadrature grids.

use crate::error::{Error, Result};

/// Nodes `z_i` with positive quadrature weights `w_i`.
///
/// Kernels defined on a grid store densities; integrals `∫ dz f(z)` become
/// `Σ_i w_i f(z_i)` and the delta function becomes `δ_ij / w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SpatialGrid {
    /// Uniform grid on `[z_min, z_max]` with trapezoid weights.
    pub fn uniform(z_min: f64, z_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
            return Err(Error::InvalidGrid(format!("bad extent [{z_min}, {z_max}]")));
        }
        let h = (z_max - z_min) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    z_max
                } else {
                    z_min + h * i as f64
                }
            })
            .collect();
        Self::from_nodes(nodes)
    }

    /// Arbitrary strictly increasing nodes with trapezoid weights.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes".into()));
        }
        let n = nodes.len();
        let mut weights = vec![0.0; n];
        for k in 0..n - 1 {
            let h = nodes[k + 1] - nodes[k];
            weights[k] += 0.5 * h;
            weights[k + 1] += 0.5 * h;
        }
        Self::from_nodes_weights(nodes, weights)
    }

    /// Explicit nodes and weights; used for pure kernel algebra where the
    /// weights need not come from a trapezoid rule.
    pub fn from_nodes_weights(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidGrid(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidGrid("non-finite node".into()));
        }
        if nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidGrid(
                "nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGrid("weights must be positive".into()));
        }
        Ok(SpatialGrid { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn z_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn z_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// `Σ w_i`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Node spacings `z_{k+1} - z_k`.
    pub fn spacings(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|p| p[1] - p[0]).collect()
    }

    /// Sub-grid on the given node indices, keeping the original weights.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let nodes = indices.iter().map(|&i| self.nodes[i]).collect();
        let weights = indices.iter().map(|&i| self.weights[i]).collect();
        Self::from_nodes_weights(nodes, weights)
    }
}
