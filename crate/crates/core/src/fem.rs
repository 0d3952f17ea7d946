//! Assembly of bending, mass and load operators on a [`Layout`].

use crate::banded::SymBanded;
use crate::data::{DirichletDatum, LoadField};
use crate::hermite::{bending_matrix, mass_matrix, shape, Local, LocalMatrix};
use crate::layout::{Affine, Clamping, FieldLayout, Layout};
use crate::mesh::Mesh;
use crate::params::{ModelParams, ProblemKind};
use crate::quadrature::GaussRule;

/// `E(x) = ½ xᵀ H x − gᵀ x + c`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub h: SymBanded,
    pub g: Vec<f64>,
    pub c: f64,
}

impl QuadraticForm {
    pub fn zeros(n: usize, bw: usize) -> Self {
        QuadraticForm {
            h: SymBanded::zeros(n, bw),
            g: vec![0.0; n],
            c: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.g.iter().zip(x).map(|(a, b)| a * b).sum();
        0.5 * self.h.quad_form(x) - lin + self.c
    }

    /// `1 + ‖g‖∞ + ‖H‖∞ ‖x‖∞`: the size below which `H x − g` is round-off.
    pub fn residual_scale(&self, x: &[f64]) -> f64 {
        let xn = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let gn = self.g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        1.0 + gn + self.h.norm_inf() * xn
    }

    /// `H x − g`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.h.mul_vec(x);
        for (r, g) in r.iter_mut().zip(&self.g) {
            *r -= g;
        }
        r
    }

    /// `scale · aᵀ K a` with `a` affine in the unknowns.
    pub fn add_quadratic(&mut self, a: &[Affine; 4], k: &LocalMatrix, scale: f64) {
        for p in 0..4 {
            for q in 0..4 {
                let kpq = scale * k[p][q];
                if kpq == 0.0 {
                    continue;
                }
                for &(i, ci) in &a[p].terms {
                    for &(j, cj) in &a[q].terms {
                        // the lower triangle holds the whole entry
                        if i >= j {
                            self.h.add(i, j, 2.0 * kpq * ci * cj);
                        }
                    }
                    self.g[i] -= 2.0 * kpq * ci * a[q].constant;
                }
                self.c += kpq * a[p].constant * a[q].constant;
            }
        }
    }

    /// `scale · vᵀ a` with `a` affine in the unknowns.
    pub fn add_linear(&mut self, a: &[Affine; 4], v: &Local, scale: f64) {
        for p in 0..4 {
            let s = scale * v[p];
            for &(i, ci) in &a[p].terms {
                self.g[i] -= s * ci;
            }
            self.c += s * a[p].constant;
        }
    }
}

/// `∫ f φ_k` for the four shape functions of an element.
pub fn element_load(x0: f64, x1: f64, rule: &GaussRule, f: impl Fn(f64) -> f64) -> Local {
    let h = x1 - x0;
    let mut out = [0.0; 4];
    for (x, wq) in rule.mapped(x0, x1) {
        let n = shape((x - x0) / h, h);
        let fx = f(x) * wq;
        for k in 0..4 {
            out[k] += fx * n[k];
        }
    }
    out
}

fn elem_diff(a: &[Affine; 4], b: &[Affine; 4]) -> [Affine; 4] {
    [a[0].minus(&b[0]), a[1].minus(&b[1]), a[2].minus(&b[2]), a[3].minus(&b[3])]
}

/// Fresh form sized for `layout`.
fn empty_form(layout: &Layout, mesh: &Mesh) -> QuadraticForm {
    QuadraticForm::zeros(layout.n_dofs, layout.bandwidth(mesh))
}

/// Unclamped single-field layout used by the stand-alone operators.
fn free_layout(mesh: &Mesh) -> Layout {
    Layout::single(mesh, Clamping::Free)
}

/// Matrix of `∫ φ_i'' φ_j''` over the pieces of `mesh`, no boundary conditions.
pub fn assemble_bending(mesh: &Mesh) -> SymBanded {
    let l = free_layout(mesh);
    let mut q = empty_form(&l, mesh);
    for e in 0..mesh.element_count() {
        q.add_quadratic(&l.primary.element(e), &bending_matrix(mesh.element_length(e)), 0.5);
    }
    q.h
}

/// Matrix of `∫ φ_i φ_j`, no boundary conditions.
pub fn assemble_mass(mesh: &Mesh) -> SymBanded {
    let l = free_layout(mesh);
    let mut q = empty_form(&l, mesh);
    for e in 0..mesh.element_count() {
        q.add_quadratic(&l.primary.element(e), &mass_matrix(mesh.element_length(e)), 0.5);
    }
    q.h
}

/// Vector of `∫ f φ_i`, no boundary conditions.
pub fn assemble_load(mesh: &Mesh, f: &LoadField) -> Vec<f64> {
    let l = free_layout(mesh);
    let mut q = empty_form(&l, mesh);
    let rule = GaussRule::element();
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        let v = element_load(a, b, &rule, |x| f.eval(x));
        q.add_linear(&l.primary.element(e), &v, -1.0);
    }
    q.g
}

fn add_field_terms(
    q: &mut QuadraticForm,
    mesh: &Mesh,
    f: &FieldLayout,
    stiffness: f64,
    load: &LoadField,
    rule: &GaussRule,
) {
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        let el = f.element(e);
        q.add_quadratic(&el, &bending_matrix(b - a), stiffness);
        if !load.is_zero() {
            let v = element_load(a, b, rule, |x| load.eval(x));
            q.add_linear(&el, &v, -1.0);
        }
    }
}

/// Smooth part of the energy of `problem` as a quadratic form on `layout`:
/// everything except the damage and plastic terms.
pub fn assemble_problem(
    problem: ProblemKind,
    p: &ModelParams,
    w: &DirichletDatum,
    f_r: &LoadField,
    f_p: Option<&LoadField>,
    mesh: &Mesh,
    layout: &Layout,
) -> QuadraticForm {
    let rule = GaussRule::element();
    let mut q = empty_form(layout, mesh);
    add_field_terms(&mut q, mesh, &layout.primary, p.eta, f_r, &rule);
    match problem {
        ProblemKind::E1 => {
            for e in 0..mesh.element_count() {
                let (a, b) = mesh.element(e);
                let el = layout.primary.element(e);
                q.add_quadratic(&el, &mass_matrix(b - a), p.mu);
                let wv = element_load(a, b, &rule, |x| w.value(x));
                q.add_linear(&el, &wv, -2.0 * p.mu);
                q.c += p.mu * rule.integrate(a, b, |x| w.value(x).powi(2));
            }
        }
        ProblemKind::F1 | ProblemKind::G1 => {
            let plate = layout.plate.as_ref().expect("pair layout for pair problem");
            let zero = LoadField::zero();
            add_field_terms(&mut q, mesh, plate, p.gamma, f_p.unwrap_or(&zero), &rule);
            for e in 0..mesh.element_count() {
                let d = elem_diff(&layout.primary.element(e), &plate.element(e));
                q.add_quadratic(&d, &mass_matrix(mesh.element_length(e)), p.mu);
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breaks::{BreakConfig, BreakKind};
    use crate::mesh::build_mesh;

    #[test]
    fn single_element_bending_entry() {
        let m = build_mesh(2, &BreakConfig::empty()).unwrap();
        let a = assemble_bending(&m);
        // h = 1; node 0 value is unknown 0
        assert!((a.get(0, 0) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn crack_decouples_elements() {
        let k = BreakConfig::single(0.0, BreakKind::Crack).unwrap();
        let m = build_mesh(2, &k).unwrap();
        let a = assemble_bending(&m).to_dense();
        assert_eq!(a.len(), 8);
        for i in 0..4 {
            for j in 4..8 {
                assert_eq!(a[i][j], 0.0);
            }
        }
    }

    #[test]
    fn unit_load_on_element() {
        let m = build_mesh(2, &BreakConfig::empty()).unwrap();
        let h = 1.0;
        let g = assemble_load(&m, &LoadField::Constant(1.0));
        // first element contributes (h/2, h²/12) to node 0
        assert!((g[0] - h / 2.0).abs() < 1e-14);
        assert!((g[1] - h * h / 12.0).abs() < 1e-14);
        // node 1 gets h/2 from each side, slopes cancel
        assert!((g[2] - h).abs() < 1e-14);
        assert!(g[3].abs() < 1e-14);
    }

    #[test]
    fn mass_row_sums_integrate_shape_functions() {
        let m = build_mesh(4, &BreakConfig::empty()).unwrap();
        let mass = assemble_mass(&m);
        let g = assemble_load(&m, &LoadField::Constant(1.0));
        // Σ_j M_ij over value unknowns: constants are spanned by value shapes
        let ones: Vec<f64> = (0..mass.dim()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let r = mass.mul_vec(&ones);
        for (a, b) in r.iter().zip(&g) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_load_vector() {
        let m = build_mesh(4, &BreakConfig::empty()).unwrap();
        assert!(assemble_load(&m, &LoadField::zero()).iter().all(|&v| v == 0.0));
    }
}
