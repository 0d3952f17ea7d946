//! Partition of [-1, 1] whose nodes carry the break configuration.

use serde::{Deserialize, Serialize};

use crate::breaks::{Break, BreakConfig, BreakKind, MIN_BREAK_SEPARATION};
use crate::error::{Error, Result};

/// Break locations within this distance of a node are taken to be that node.
const SNAP_TOLERANCE: f64 = 1e-14;

/// Node coordinates spanning [-1, 1] plus the break kind carried by each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    nodes: Vec<f64>,
    kinds: Vec<Option<BreakKind>>,
}

impl Mesh {
    /// Mesh from explicit node coordinates and per-node break kinds.
    pub fn from_parts(nodes: Vec<f64>, kinds: Vec<Option<BreakKind>>) -> Result<Self> {
        if nodes.len() < 2 || kinds.len() != nodes.len() {
            return Err(Error::DegenerateMesh("need at least two nodes".into()));
        }
        if nodes[0] != -1.0 || nodes[nodes.len() - 1] != 1.0 {
            return Err(Error::DegenerateMesh("nodes must span [-1, 1]".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateMesh(format!(
                "nodes not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Mesh { nodes, kinds })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn last_node(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    pub fn element_length(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn kind_at(&self, node: usize) -> Option<BreakKind> {
        self.kinds[node]
    }

    pub fn is_endpoint(&self, node: usize) -> bool {
        node == 0 || node == self.last_node()
    }

    /// Node indices carrying a break, with their kinds.
    pub fn break_nodes(&self) -> impl Iterator<Item = (usize, BreakKind)> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.map(|k| (i, k)))
    }

    /// The break configuration encoded in this mesh.
    pub fn break_config(&self) -> BreakConfig {
        let breaks = self
            .break_nodes()
            .map(|(i, k)| Break::new(self.nodes[i], k))
            .collect();
        BreakConfig::new(breaks).expect("mesh nodes are strictly increasing")
    }

    /// Node index at exactly `x`, if any.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&v| v < x);
        (i < self.nodes.len() && self.nodes[i] == x).then_some(i)
    }

    /// Element containing `x`; the right element at interior nodes.
    pub fn locate(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&v| v <= x);
        i.clamp(1, self.element_count()) - 1
    }

    /// Breaks separate the mesh into smooth pieces; returns their node ranges.
    pub fn pieces(&self) -> Vec<(usize, usize)> {
        let mut cuts: Vec<usize> = vec![0];
        for (i, _) in self.break_nodes() {
            if !self.is_endpoint(i) {
                cuts.push(i);
            }
        }
        cuts.push(self.last_node());
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Splits every element in two, keeping the breaks.
    pub fn refine_uniform(&self) -> Mesh {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        let mut kinds = Vec::with_capacity(2 * self.nodes.len() - 1);
        for e in 0..self.element_count() {
            nodes.push(self.nodes[e]);
            kinds.push(self.kinds[e]);
            nodes.push(0.5 * (self.nodes[e] + self.nodes[e + 1]));
            kinds.push(None);
        }
        nodes.push(1.0);
        kinds.push(self.kinds[self.last_node()]);
        Mesh { nodes, kinds }
    }

    /// Same nodes, different breaks (each must sit on an existing node).
    pub fn with_breaks(&self, k: &BreakConfig) -> Result<Mesh> {
        let mut kinds = vec![None; self.nodes.len()];
        for b in k.iter() {
            let i = self.node_at(b.x).ok_or_else(|| {
                Error::MeshMismatch(format!("break at {} is not a mesh node", b.x))
            })?;
            kinds[i] = Some(b.kind);
        }
        Ok(Mesh {
            nodes: self.nodes.clone(),
            kinds,
        })
    }
}

/// Uniform coordinate of node `i` of an `n`-element partition of [-1, 1].
pub fn uniform_node(i: usize, n: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / n as f64
}

/// Uniform partition of [-1, 1] into `n_elements`, adjusted so every break
/// location is a node.
///
/// A break close to an interior node (within a quarter cell) moves that node
/// onto the break; otherwise the break is inserted as a new node.
pub fn build_mesh(n_elements: usize, k: &BreakConfig) -> Result<Mesh> {
    if n_elements < 2 {
        return Err(Error::DegenerateMesh(format!(
            "need at least 2 elements, got {n_elements}"
        )));
    }
    for w in k.breaks().windows(2) {
        if w[1].x - w[0].x < MIN_BREAK_SEPARATION {
            return Err(Error::DegenerateMesh(format!(
                "breaks at {} and {} closer than {MIN_BREAK_SEPARATION:e}",
                w[0].x, w[1].x
            )));
        }
    }
    let h = 2.0 / n_elements as f64;
    let mut nodes: Vec<f64> = (0..=n_elements).map(|i| uniform_node(i, n_elements)).collect();
    let mut kinds: Vec<Option<BreakKind>> = vec![None; nodes.len()];

    for b in k.iter() {
        let pos = nodes.partition_point(|&v| v < b.x);
        let mut nearest = pos.min(nodes.len() - 1);
        if pos > 0 && (pos == nodes.len() || (b.x - nodes[pos - 1]).abs() < (nodes[pos] - b.x).abs()) {
            nearest = pos - 1;
        }
        let dist = (nodes[nearest] - b.x).abs();
        if dist <= SNAP_TOLERANCE {
            if kinds[nearest].is_some() {
                return Err(Error::DegenerateMesh(format!("two breaks map to node {}", nodes[nearest])));
            }
            nodes[nearest] = b.x;
            kinds[nearest] = Some(b.kind);
            continue;
        }
        let last = nodes.len() - 1;
        let movable = nearest != 0 && nearest != last && kinds[nearest].is_none();
        if movable && dist < 0.25 * h {
            nodes[nearest] = b.x;
            kinds[nearest] = Some(b.kind);
        } else {
            nodes.insert(pos, b.x);
            kinds.insert(pos, Some(b.kind));
        }
    }
    Mesh::from_parts(nodes, kinds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_without_breaks() {
        let m = build_mesh(4, &BreakConfig::empty()).unwrap();
        assert_eq!(m.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(m.break_nodes().count(), 0);
    }

    #[test]
    fn break_location_becomes_node() {
        let k = BreakConfig::single(0.1, BreakKind::Crack).unwrap();
        let m = build_mesh(4, &k).unwrap();
        let i = m.node_at(0.1).expect("0.1 is a node");
        assert_eq!(m.kind_at(i), Some(BreakKind::Crack));
        assert_eq!(m.break_config(), k);
    }

    #[test]
    fn far_break_is_inserted() {
        let k = BreakConfig::single(0.2, BreakKind::Crease).unwrap();
        let m = build_mesh(4, &k).unwrap();
        assert_eq!(m.nodes(), &[-1.0, -0.5, 0.0, 0.2, 0.5, 1.0]);
    }

    #[test]
    fn endpoint_break_marks_endpoint() {
        let k = BreakConfig::single(-1.0, BreakKind::Crease).unwrap();
        let m = build_mesh(2, &k).unwrap();
        assert_eq!(m.nodes(), &[-1.0, 0.0, 1.0]);
        assert_eq!(m.kind_at(0), Some(BreakKind::Crease));
    }

    #[test]
    fn break_near_endpoint_does_not_move_it() {
        let k = BreakConfig::single(0.99, BreakKind::Crack).unwrap();
        let m = build_mesh(4, &k).unwrap();
        assert_eq!(m.nodes()[m.last_node()], 1.0);
        assert!(m.node_at(0.99).is_some());
    }

    #[test]
    fn too_few_elements() {
        assert!(matches!(
            build_mesh(1, &BreakConfig::empty()),
            Err(Error::DegenerateMesh(_))
        ));
    }

    #[test]
    fn pieces_split_at_interior_breaks() {
        let k = BreakConfig::new(vec![
            Break::new(-1.0, BreakKind::Crack),
            Break::new(0.0, BreakKind::Crease),
        ])
        .unwrap();
        let m = build_mesh(4, &k).unwrap();
        assert_eq!(m.pieces(), vec![(0, 2), (2, 4)]);
    }

    #[test]
    fn refinement_keeps_breaks() {
        let k = BreakConfig::single(0.0, BreakKind::Crack).unwrap();
        let m = build_mesh(4, &k).unwrap().refine_uniform();
        assert_eq!(m.element_count(), 8);
        assert_eq!(m.break_config(), k);
    }

    #[test]
    fn locate_elements() {
        let m = build_mesh(4, &BreakConfig::empty()).unwrap();
        assert_eq!(m.locate(-1.0), 0);
        assert_eq!(m.locate(-0.75), 0);
        assert_eq!(m.locate(0.0), 2);
        assert_eq!(m.locate(1.0), 3);
    }
}
