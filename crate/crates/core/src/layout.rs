//! Degree-of-freedom bookkeeping.
//!
//! Every one-sided trace (value and slope, left and right of each node) is an
//! affine function of the unknown vector. Clamped quantities become
//! constants, hinge slopes are "left slope + jump", and for the unilateral
//! strengthening problem the reinforcement is written as plate + gap so that
//! the constraint becomes a simple lower bound on gap values.

use crate::breaks::BreakKind;
use crate::data::DirichletDatum;
use crate::error::{Error, Result};
use crate::field::{PiecewiseDisplacement, Side, Trace};
use crate::mesh::Mesh;
use crate::params::ProblemKind;

/// `constant + Σ coeff·x[index]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn var(j: usize) -> Self {
        Affine {
            constant: 0.0,
            terms: vec![(j, 1.0)],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(j, c)| acc + c * x[j])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// The unknown this expression is exactly equal to, if any.
    pub fn as_single_var(&self) -> Option<usize> {
        match self.terms.as_slice() {
            [(j, c)] if *c == 1.0 && self.constant == 0.0 => Some(*j),
            _ => None,
        }
    }

    pub fn plus(&self, other: &Affine) -> Affine {
        self.combine(other, 1.0)
    }

    pub fn minus(&self, other: &Affine) -> Affine {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Affine, s: f64) -> Affine {
        let mut terms = self.terms.clone();
        for &(j, c) in &other.terms {
            match terms.iter_mut().find(|(k, _)| *k == j) {
                Some(t) => t.1 += s * c,
                None => terms.push((j, s * c)),
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        Affine {
            constant: self.constant + s * other.constant,
            terms,
        }
    }
}

/// Affine value and slope of a one-sided trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceMap {
    pub value: Affine,
    pub slope: Affine,
}

impl TraceMap {
    fn constant(v: f64, s: f64) -> Self {
        TraceMap {
            value: Affine::constant(v),
            slope: Affine::constant(s),
        }
    }

    fn vars(v: usize, s: usize) -> Self {
        TraceMap {
            value: Affine::var(v),
            slope: Affine::var(s),
        }
    }

    fn plus(&self, o: &TraceMap) -> TraceMap {
        TraceMap {
            value: self.value.plus(&o.value),
            slope: self.slope.plus(&o.slope),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Trace {
        Trace::new(self.value.eval(x), self.slope.eval(x))
    }
}

/// Trace maps of one field on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLayout {
    pub left: Vec<TraceMap>,
    pub right: Vec<TraceMap>,
}

impl FieldLayout {
    /// Hermite coefficients of element `e`.
    pub fn element(&self, e: usize) -> [Affine; 4] {
        let a = &self.right[e];
        let b = &self.left[e + 1];
        [
            a.value.clone(),
            a.slope.clone(),
            b.value.clone(),
            b.slope.clone(),
        ]
    }

    pub fn reconstruct(&self, mesh: &Mesh, x: &[f64]) -> Result<PiecewiseDisplacement> {
        PiecewiseDisplacement::new(
            mesh.clone(),
            self.left.iter().map(|t| t.eval(x)).collect(),
            self.right.iter().map(|t| t.eval(x)).collect(),
        )
    }

    fn plus(&self, o: &FieldLayout) -> FieldLayout {
        FieldLayout {
            left: self.left.iter().zip(&o.left).map(|(a, b)| a.plus(b)).collect(),
            right: self.right.iter().zip(&o.right).map(|(a, b)| a.plus(b)).collect(),
        }
    }
}

/// How the ends of a field are treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Clamping {
    /// Value and slope prescribed at ±1 (released according to endpoint breaks).
    Clamped { left: Trace, right: Trace },
    /// No boundary conditions at all; exterior traces mirror the interior.
    Free,
}

impl Clamping {
    pub fn from_datum(w: &DirichletDatum) -> Self {
        let [a, b, _] = w.eval(-1.0);
        let [c, d, _] = w.eval(1.0);
        Clamping::Clamped {
            left: Trace::new(a, b),
            right: Trace::new(c, d),
        }
    }

    pub fn homogeneous() -> Self {
        Clamping::Clamped {
            left: Trace::default(),
            right: Trace::default(),
        }
    }
}

/// A slope-jump unknown at a hinge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JumpDof {
    pub node: usize,
    pub dof: usize,
}

/// A unilateral constraint `x[dof] >= bound` attached to a node trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundDof {
    pub node: usize,
    /// `None` when the value is shared by both sides.
    pub side: Option<Side>,
    pub dof: usize,
    pub bound: f64,
}

/// Which fields the unknown vector describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Single,
    /// Reinforcement and plate, each with its own unknowns.
    Pair,
    /// Plate and gap (reinforcement minus plate).
    PairGap,
}

/// Complete map from unknowns to traces of every field.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub kind: LayoutKind,
    pub n_dofs: usize,
    /// Broken field (reinforcement, or the only field).
    pub primary: FieldLayout,
    /// Plate field for pair problems.
    pub plate: Option<FieldLayout>,
    pub jumps: Vec<JumpDof>,
    pub bounds: Vec<BoundDof>,
}

#[derive(Default)]
struct Counter(usize);

impl Counter {
    fn next(&mut self) -> usize {
        self.0 += 1;
        self.0 - 1
    }
}

struct NodeTraces {
    left: TraceMap,
    right: TraceMap,
    jump: Option<usize>,
}

/// Allocates the unknowns of one field at node `i`.
fn node_traces(mesh: &Mesh, i: usize, kind: Option<BreakKind>, clamp: Clamping, c: &mut Counter) -> NodeTraces {
    let last = mesh.last_node();
    let interior = i != 0 && i != last;
    if interior || matches!(clamp, Clamping::Free) {
        return match kind {
            None => {
                let t = TraceMap::vars(c.next(), c.next());
                NodeTraces {
                    left: t.clone(),
                    right: t,
                    jump: None,
                }
            }
            Some(_) if !interior => {
                // unclamped ends carry no exterior, so a break there changes nothing
                let t = TraceMap::vars(c.next(), c.next());
                NodeTraces {
                    left: t.clone(),
                    right: t,
                    jump: None,
                }
            }
            Some(BreakKind::Crack) => NodeTraces {
                left: TraceMap::vars(c.next(), c.next()),
                right: TraceMap::vars(c.next(), c.next()),
                jump: None,
            },
            Some(BreakKind::Crease) => {
                let v = c.next();
                NodeTraces {
                    left: TraceMap::vars(v, c.next()),
                    right: TraceMap::vars(v, c.next()),
                    jump: None,
                }
            }
            Some(BreakKind::Hinge) => {
                let v = c.next();
                let s = c.next();
                let d = c.next();
                NodeTraces {
                    left: TraceMap::vars(v, s),
                    right: TraceMap {
                        value: Affine::var(v),
                        slope: Affine::var(s).plus(&Affine::var(d)),
                    },
                    jump: Some(d),
                }
            }
        };
    }
    let Clamping::Clamped { left, right } = clamp else {
        unreachable!()
    };
    let outer = if i == 0 { left } else { right };
    let exterior = TraceMap::constant(outer.value, outer.slope);
    let (inner, jump) = match kind {
        None => (exterior.clone(), None),
        Some(BreakKind::Crack) => (TraceMap::vars(c.next(), c.next()), None),
        Some(BreakKind::Crease) => (
            TraceMap {
                value: Affine::constant(outer.value),
                slope: Affine::var(c.next()),
            },
            None,
        ),
        Some(BreakKind::Hinge) => {
            let d = c.next();
            // jump is right minus left in both cases
            let sign = if i == 0 { 1.0 } else { -1.0 };
            let slope = Affine {
                constant: outer.slope,
                terms: vec![(d, sign)],
            };
            (
                TraceMap {
                    value: Affine::constant(outer.value),
                    slope,
                },
                Some(d),
            )
        }
    };
    if i == 0 {
        NodeTraces {
            left: exterior,
            right: inner,
            jump,
        }
    } else {
        NodeTraces {
            left: inner,
            right: exterior,
            jump,
        }
    }
}

struct FieldBuilder {
    left: Vec<TraceMap>,
    right: Vec<TraceMap>,
}

impl FieldBuilder {
    fn new(n: usize) -> Self {
        FieldBuilder {
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: NodeTraces) -> Option<usize> {
        self.left.push(t.left);
        self.right.push(t.right);
        t.jump
    }

    fn finish(self) -> FieldLayout {
        FieldLayout {
            left: self.left,
            right: self.right,
        }
    }
}

impl Layout {
    /// One field honouring the mesh's breaks.
    pub fn single(mesh: &Mesh, clamp: Clamping) -> Layout {
        let mut c = Counter::default();
        let mut f = FieldBuilder::new(mesh.node_count());
        let mut jumps = Vec::new();
        for i in 0..mesh.node_count() {
            if let Some(d) = f.push(node_traces(mesh, i, mesh.kind_at(i), clamp, &mut c)) {
                jumps.push(JumpDof { node: i, dof: d });
            }
        }
        Layout {
            kind: LayoutKind::Single,
            n_dofs: c.0,
            primary: f.finish(),
            plate: None,
            jumps,
            bounds: Vec::new(),
        }
    }

    /// Reinforcement (broken per the mesh) and unbroken plate, unknowns
    /// interleaved node by node to keep the operator banded. With `gap`, the
    /// reinforcement is parametrized as plate + gap.
    pub fn pair(mesh: &Mesh, clamp: Clamping, gap: bool) -> Layout {
        let mut c = Counter::default();
        let mut r = FieldBuilder::new(mesh.node_count());
        let mut p = FieldBuilder::new(mesh.node_count());
        let mut jumps = Vec::new();
        let gap_clamp = match clamp {
            Clamping::Free => Clamping::Free,
            Clamping::Clamped { .. } => Clamping::homogeneous(),
        };
        for i in 0..mesh.node_count() {
            let tr = node_traces(mesh, i, mesh.kind_at(i), if gap { gap_clamp } else { clamp }, &mut c);
            if let Some(d) = r.push(tr) {
                jumps.push(JumpDof { node: i, dof: d });
            }
            p.push(node_traces(mesh, i, None, clamp, &mut c));
        }
        let plate = p.finish();
        let mut primary = r.finish();
        if gap {
            primary = plate.plus(&primary);
        }
        Layout {
            kind: if gap { LayoutKind::PairGap } else { LayoutKind::Pair },
            n_dofs: c.0,
            primary,
            plate: Some(plate),
            jumps,
            bounds: Vec::new(),
        }
    }

    /// Layout of the inner problem for `problem` on `mesh`. Constrained runs
    /// also attach the unilateral bounds.
    pub fn for_problem(problem: ProblemKind, mesh: &Mesh, w: &DirichletDatum, constrained: bool) -> Result<Layout> {
        let clamp = Clamping::from_datum(w);
        match (problem, constrained) {
            (ProblemKind::E1, false) => Ok(Layout::single(mesh, clamp)),
            (ProblemKind::E1, true) => {
                let mut l = Layout::single(mesh, clamp);
                l.bounds = value_bounds(mesh, &l.primary, |x| w.value(x))?;
                Ok(l)
            }
            (ProblemKind::F1, false) | (ProblemKind::G1, false) => Ok(Layout::pair(mesh, clamp, false)),
            (ProblemKind::F1, true) => {
                let mut l = Layout::pair(mesh, clamp, true);
                let gap = gap_field(mesh, &l);
                l.bounds = value_bounds(mesh, &gap, |_| 0.0)?;
                Ok(l)
            }
            (ProblemKind::G1, true) => Err(Error::Unsupported(
                "unilateral constraint is available for E1 and F1 only".into(),
            )),
        }
    }

    pub fn is_pair(&self) -> bool {
        self.plate.is_some()
    }

    /// Largest index distance between unknowns coupled by one element.
    pub fn bandwidth(&self, mesh: &Mesh) -> usize {
        let mut bw = 0;
        for e in 0..mesh.element_count() {
            let mut lo = usize::MAX;
            let mut hi = 0;
            let mut visit = |a: &[Affine; 4]| {
                for t in a {
                    for &(j, _) in &t.terms {
                        lo = lo.min(j);
                        hi = hi.max(j);
                    }
                }
            };
            visit(&self.primary.element(e));
            if let Some(p) = &self.plate {
                visit(&p.element(e));
            }
            if hi >= lo && lo != usize::MAX {
                bw = bw.max(hi - lo);
            }
        }
        bw
    }

    pub fn jump_values(&self, x: &[f64]) -> Vec<f64> {
        self.jumps.iter().map(|j| x[j.dof]).collect()
    }
}

/// Gap field (reinforcement minus plate) of a plate+gap layout, used for bounds.
fn gap_field(mesh: &Mesh, l: &Layout) -> FieldLayout {
    let plate = l.plate.as_ref().expect("pair layout");
    let neg = |t: &TraceMap, p: &TraceMap| TraceMap {
        value: t.value.minus(&p.value),
        slope: t.slope.minus(&p.slope),
    };
    let n = mesh.node_count();
    FieldLayout {
        left: (0..n).map(|i| neg(&l.primary.left[i], &plate.left[i])).collect(),
        right: (0..n).map(|i| neg(&l.primary.right[i], &plate.right[i])).collect(),
    }
}

/// Lower bounds `value >= bound(x)` on every distinct value unknown inside
/// [-1, 1]: one per plain node, one per side at cracks.
fn value_bounds(mesh: &Mesh, f: &FieldLayout, bound: impl Fn(f64) -> f64) -> Result<Vec<BoundDof>> {
    let mut out = Vec::new();
    let last = mesh.last_node();
    for i in 0..mesh.node_count() {
        let x = mesh.nodes()[i];
        let b = bound(x);
        // the exterior traces at ±1 are clamping data, not part of the beam
        let sides: &[Side] = if i == 0 {
            &[Side::Right]
        } else if i == last {
            &[Side::Left]
        } else {
            &[Side::Left, Side::Right]
        };
        let mut seen: Vec<usize> = Vec::new();
        let split = mesh.kind_at(i) == Some(BreakKind::Crack) && i != 0 && i != last;
        for &side in sides {
            let t = match side {
                Side::Left => &f.left[i].value,
                Side::Right => &f.right[i].value,
            };
            if t.is_constant() {
                if t.constant < b - 1e-12 * (1.0 + b.abs()) {
                    return Err(Error::InfeasibleClamp(format!(
                        "clamped value {} below the obstacle {} at x = {x}",
                        t.constant, b
                    )));
                }
                continue;
            }
            let dof = t.as_single_var().ok_or_else(|| {
                Error::Unsupported("constraint on a composite value trace".into())
            })?;
            if seen.contains(&dof) {
                continue;
            }
            seen.push(dof);
            let side = if split || i == 0 || i == last { Some(side) } else { None };
            out.push(BoundDof {
                node: i,
                side,
                dof,
                bound: b,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breaks::BreakConfig;
    use crate::mesh::build_mesh;

    fn mesh(n: usize, k: &[(f64, BreakKind)]) -> Mesh {
        let k = BreakConfig::new(k.iter().map(|&(x, t)| crate::breaks::Break::new(x, t)).collect()).unwrap();
        build_mesh(n, &k).unwrap()
    }

    #[test]
    fn unbroken_clamped_counts() {
        let m = mesh(4, &[]);
        let l = Layout::single(&m, Clamping::homogeneous());
        // three interior nodes, value and slope each
        assert_eq!(l.n_dofs, 6);
        assert!(l.primary.left[0].value.is_constant());
        assert!(l.primary.right[4].slope.is_constant());
    }

    #[test]
    fn interior_break_counts() {
        let m = mesh(4, &[(0.0, BreakKind::Crack)]);
        assert_eq!(Layout::single(&m, Clamping::homogeneous()).n_dofs, 8);
        let m = mesh(4, &[(0.0, BreakKind::Crease)]);
        assert_eq!(Layout::single(&m, Clamping::homogeneous()).n_dofs, 7);
        let m = mesh(4, &[(0.0, BreakKind::Hinge)]);
        let l = Layout::single(&m, Clamping::homogeneous());
        assert_eq!(l.n_dofs, 7);
        assert_eq!(l.jumps.len(), 1);
    }

    #[test]
    fn endpoint_release() {
        let clamp = Clamping::Clamped {
            left: Trace::new(1.0, 2.0),
            right: Trace::new(3.0, 4.0),
        };
        let m = mesh(2, &[(1.0, BreakKind::Crack)]);
        let l = Layout::single(&m, clamp);
        // only the +1 inner trace is released
        assert_eq!(l.n_dofs, 4);
        assert!(!l.primary.left[2].value.is_constant());
        assert_eq!(l.primary.right[2].eval(&[0.0; 4]), Trace::new(3.0, 4.0));
        assert_eq!(l.primary.right[0].eval(&[0.0; 4]), Trace::new(1.0, 2.0));

        let m = mesh(2, &[(-1.0, BreakKind::Crease)]);
        let l = Layout::single(&m, clamp);
        assert_eq!(l.n_dofs, 3);
        assert_eq!(l.primary.right[0].value, Affine::constant(1.0));
        assert!(!l.primary.right[0].slope.is_constant());
    }

    #[test]
    fn endpoint_hinge_jump_is_right_minus_left() {
        let clamp = Clamping::Clamped {
            left: Trace::new(0.0, 0.5),
            right: Trace::new(0.0, -0.5),
        };
        let m = mesh(2, &[(-1.0, BreakKind::Hinge), (1.0, BreakKind::Hinge)]);
        let l = Layout::single(&m, clamp);
        let mut x = vec![0.0; l.n_dofs];
        for j in &l.jumps {
            x[j.dof] = 0.25;
        }
        let u = l.primary.reconstruct(&m, &x).unwrap();
        assert!((u.jump(0).slope - 0.25).abs() < 1e-15);
        assert!((u.jump(2).slope - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pair_gap_parametrization() {
        let m = mesh(4, &[(0.0, BreakKind::Crack)]);
        let w = DirichletDatum::polynomial(vec![0.1, 0.2]);
        let l = Layout::for_problem(ProblemKind::F1, &m, &w, true).unwrap();
        assert_eq!(l.kind, LayoutKind::PairGap);
        // gap values: 3 interior nodes, one extra at the crack
        assert_eq!(l.bounds.len(), 4);
        assert!(l.bounds.iter().all(|b| b.bound == 0.0));
        // the reinforcement still matches the clamp at the ends
        let x = vec![0.0; l.n_dofs];
        let u = l.primary.reconstruct(&m, &x).unwrap();
        assert!((u.traces(0).0.value - 0.1 + 0.2).abs() < 1e-15);
    }

    #[test]
    fn obstacle_bounds_follow_datum() {
        let m = mesh(4, &[(0.5, BreakKind::Crack), (-1.0, BreakKind::Crack)]);
        let w = DirichletDatum::polynomial(vec![0.0, 1.0]);
        let l = Layout::for_problem(ProblemKind::E1, &m, &w, true).unwrap();
        let at_crack: Vec<_> = l.bounds.iter().filter(|b| b.node == 3).collect();
        assert_eq!(at_crack.len(), 2);
        assert!(l.bounds.iter().any(|b| b.node == 0 && b.bound == -1.0));
    }

    #[test]
    fn interleaving_keeps_band_narrow() {
        let m = mesh(64, &[(0.0, BreakKind::Crack)]);
        let l = Layout::pair(&m, Clamping::homogeneous(), false);
        assert!(l.bandwidth(&m) <= 12);
    }
}
