//! Piecewise-cubic displacements with one-sided traces at every node.

use serde::{Deserialize, Serialize};

use crate::breaks::BreakKind;
use crate::data::DirichletDatum;
use crate::error::{Error, Result};
use crate::hermite::ElementCubic;
use crate::mesh::Mesh;

/// Side of a node from which a trace is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// Limit from the left (`u⁻`).
    Left,
    /// Limit from the right (`u⁺`).
    Right,
}

impl Side {
    pub fn marker(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

/// Value and slope of a one-sided trace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub value: f64,
    pub slope: f64,
}

impl Trace {
    pub fn new(value: f64, slope: f64) -> Self {
        Trace { value, slope }
    }
}

/// H²-conforming piecewise cubic on a [`Mesh`].
///
/// Every node stores the limit from the left and from the right. At
/// `-1` the left trace is the clamping datum outside the beam, and at `+1`
/// the right trace is; so jumps at the endpoints are read off like interior
/// ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDisplacement {
    mesh: Mesh,
    left: Vec<Trace>,
    right: Vec<Trace>,
}

impl PiecewiseDisplacement {
    /// Builds a field and checks it conforms to the mesh's breaks:
    /// single-valued at plain interior nodes, continuous at creases and hinges.
    pub fn new(mesh: Mesh, left: Vec<Trace>, right: Vec<Trace>) -> Result<Self> {
        let n = mesh.node_count();
        if left.len() != n || right.len() != n {
            return Err(Error::MeshMismatch(format!(
                "expected {n} traces per side, got {} and {}",
                left.len(),
                right.len()
            )));
        }
        let field = PiecewiseDisplacement { mesh, left, right };
        field.check_conformity()?;
        Ok(field)
    }

    fn check_conformity(&self) -> Result<()> {
        for i in 0..self.mesh.node_count() {
            let (l, r) = (self.left[i], self.right[i]);
            match self.mesh.kind_at(i) {
                None if !self.mesh.is_endpoint(i) => {
                    if l != r {
                        return Err(Error::MeshMismatch(format!(
                            "traces differ at unbroken node {i} (x = {})",
                            self.mesh.nodes()[i]
                        )));
                    }
                }
                Some(BreakKind::Crease) | Some(BreakKind::Hinge) => {
                    if l.value != r.value {
                        return Err(Error::MeshMismatch(format!(
                            "displacement jumps at node {i} which only admits a slope jump"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Field with all traces zero, clamped to nothing.
    pub fn zero(mesh: Mesh) -> Self {
        let n = mesh.node_count();
        PiecewiseDisplacement {
            mesh,
            left: vec![Trace::default(); n],
            right: vec![Trace::default(); n],
        }
    }

    /// Nodal Hermite interpolant of a smooth datum; breaks carry no jump.
    pub fn interpolate(mesh: Mesh, w: &DirichletDatum) -> Self {
        let traces: Vec<Trace> = mesh
            .nodes()
            .iter()
            .map(|&x| {
                let [v, s, _] = w.eval(x);
                Trace::new(v, s)
            })
            .collect();
        PiecewiseDisplacement {
            mesh,
            left: traces.clone(),
            right: traces,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn traces(&self, node: usize) -> (Trace, Trace) {
        (self.left[node], self.right[node])
    }

    pub fn left_traces(&self) -> &[Trace] {
        &self.left
    }

    pub fn right_traces(&self) -> &[Trace] {
        &self.right
    }

    pub fn trace(&self, node: usize, side: Side) -> Trace {
        match side {
            Side::Left => self.left[node],
            Side::Right => self.right[node],
        }
    }

    /// The cubic on element `e`.
    pub fn element(&self, e: usize) -> ElementCubic {
        let (x0, x1) = self.mesh.element(e);
        let a = self.right[e];
        let b = self.left[e + 1];
        ElementCubic {
            x0,
            h: x1 - x0,
            coeffs: [a.value, a.slope, b.value, b.slope],
        }
    }

    /// Element adjacent to `node` on `side`, if it lies inside [-1, 1].
    pub fn element_on(&self, node: usize, side: Side) -> Option<usize> {
        match side {
            Side::Left => node.checked_sub(1),
            Side::Right => (node < self.mesh.element_count()).then_some(node),
        }
    }

    /// One-sided second derivative `ü±` at a node (inside the beam only).
    pub fn second_derivative(&self, node: usize, side: Side) -> Option<f64> {
        let e = self.element_on(node, side)?;
        let (a, b) = self.element(e).d2_ends();
        Some(match side {
            Side::Left => b,
            Side::Right => a,
        })
    }

    /// One-sided third derivative `u⃛±` at a node (inside the beam only).
    pub fn third_derivative(&self, node: usize, side: Side) -> Option<f64> {
        self.element_on(node, side).map(|e| self.element(e).d3())
    }

    /// Jump `u⁺ - u⁻` of value and slope at a node.
    pub fn jump(&self, node: usize) -> Trace {
        Trace::new(
            self.right[node].value - self.left[node].value,
            self.right[node].slope - self.left[node].slope,
        )
    }

    /// Value at `x`, taking the right limit at nodes.
    pub fn value(&self, x: f64) -> f64 {
        self.element(self.mesh.locate(x)).value(x)
    }

    /// Largest |u''| over the beam.
    pub fn max_abs_second_derivative(&self) -> f64 {
        (0..self.mesh.element_count())
            .map(|e| {
                let (a, b) = self.element(e).d2_ends();
                a.abs().max(b.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Rebuilds the field on a mesh with the same nodes (e.g. a relabeled break).
    pub fn with_mesh(&self, mesh: Mesh) -> Result<Self> {
        if mesh.nodes() != self.mesh.nodes() {
            return Err(Error::MeshMismatch("node coordinates differ".into()));
        }
        PiecewiseDisplacement::new(mesh, self.left.clone(), self.right.clone())
    }

    /// Re-expresses the field on a mesh whose nodes include this mesh's nodes.
    pub fn transfer_to(&self, fine: &Mesh) -> Result<Self> {
        let mut left = Vec::with_capacity(fine.node_count());
        let mut right = Vec::with_capacity(fine.node_count());
        for &x in fine.nodes() {
            if let Some(j) = self.mesh.node_at(x) {
                left.push(self.left[j]);
                right.push(self.right[j]);
            } else {
                let c = self.element(self.mesh.locate(x));
                let t = Trace::new(c.value(x), c.d1(x));
                left.push(t);
                right.push(t);
            }
        }
        PiecewiseDisplacement::new(fine.clone(), left, right)
    }
}
