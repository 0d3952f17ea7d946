//! Cubic Hermite shape functions on an element of length `h`.
//!
//! Local degrees of freedom are ordered `[value_left, slope_left,
//! value_right, slope_right]`; `t ∈ [0, 1]` is the local coordinate.

pub type Local = [f64; 4];
pub type LocalMatrix = [[f64; 4]; 4];

pub fn shape(t: f64, h: f64) -> Local {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        1.0 - 3.0 * t2 + 2.0 * t3,
        h * (t - 2.0 * t2 + t3),
        3.0 * t2 - 2.0 * t3,
        h * (t3 - t2),
    ]
}

pub fn shape_d1(t: f64, h: f64) -> Local {
    let t2 = t * t;
    [
        (-6.0 * t + 6.0 * t2) / h,
        1.0 - 4.0 * t + 3.0 * t2,
        (6.0 * t - 6.0 * t2) / h,
        3.0 * t2 - 2.0 * t,
    ]
}

pub fn shape_d2(t: f64, h: f64) -> Local {
    let h2 = h * h;
    [
        (-6.0 + 12.0 * t) / h2,
        (-4.0 + 6.0 * t) / h,
        (6.0 - 12.0 * t) / h2,
        (-2.0 + 6.0 * t) / h,
    ]
}

pub fn shape_d3(h: f64) -> Local {
    let h2 = h * h;
    let h3 = h2 * h;
    [12.0 / h3, 6.0 / h2, -12.0 / h3, 6.0 / h2]
}

pub fn dot(a: &Local, b: &Local) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// `∫ N_i'' N_j'' dx` over the element.
pub fn bending_matrix(h: f64) -> LocalMatrix {
    let h2 = h * h;
    let c = 1.0 / (h2 * h);
    [
        [12.0 * c, 6.0 * h * c, -12.0 * c, 6.0 * h * c],
        [6.0 * h * c, 4.0 * h2 * c, -6.0 * h * c, 2.0 * h2 * c],
        [-12.0 * c, -6.0 * h * c, 12.0 * c, -6.0 * h * c],
        [6.0 * h * c, 2.0 * h2 * c, -6.0 * h * c, 4.0 * h2 * c],
    ]
}

/// `∫ N_i N_j dx` over the element.
pub fn mass_matrix(h: f64) -> LocalMatrix {
    let c = h / 420.0;
    let h2 = h * h;
    [
        [156.0 * c, 22.0 * h * c, 54.0 * c, -13.0 * h * c],
        [22.0 * h * c, 4.0 * h2 * c, 13.0 * h * c, -3.0 * h2 * c],
        [54.0 * c, 13.0 * h * c, 156.0 * c, -22.0 * h * c],
        [-13.0 * h * c, -3.0 * h2 * c, -22.0 * h * c, 4.0 * h2 * c],
    ]
}

/// Local cubic given by its Hermite coefficients on `[x0, x0 + h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementCubic {
    pub x0: f64,
    pub h: f64,
    pub coeffs: Local,
}

impl ElementCubic {
    pub fn local(&self, x: f64) -> f64 {
        (x - self.x0) / self.h
    }

    pub fn value(&self, x: f64) -> f64 {
        dot(&shape(self.local(x), self.h), &self.coeffs)
    }

    pub fn d1(&self, x: f64) -> f64 {
        dot(&shape_d1(self.local(x), self.h), &self.coeffs)
    }

    pub fn d2(&self, x: f64) -> f64 {
        dot(&shape_d2(self.local(x), self.h), &self.coeffs)
    }

    pub fn d3(&self) -> f64 {
        dot(&shape_d3(self.h), &self.coeffs)
    }

    /// Second derivative at the left and right ends.
    pub fn d2_ends(&self) -> (f64, f64) {
        (
            dot(&shape_d2(0.0, self.h), &self.coeffs),
            dot(&shape_d2(1.0, self.h), &self.coeffs),
        )
    }

    /// `∫ (u'')²` over the element; a sum of non-negative terms.
    pub fn bending_energy(&self) -> f64 {
        let (a, b) = self.d2_ends();
        self.h / 3.0 * (a * a + a * b + b * b)
    }
}
