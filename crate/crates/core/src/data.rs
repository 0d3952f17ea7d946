//! Boundary datum `w` and distributed loads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::GaussRule;

/// Cubic spline with C² continuity through the given knots.
///
/// End conditions are either natural (zero second derivative) or clamped
/// to prescribed end slopes. Outside the knot range the end cubics are
/// extended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
}

/// End condition for [`CubicSpline::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplineEnds {
    Natural,
    Clamped { left_slope: f64, right_slope: f64 },
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, ends: SplineEnds) -> Result<Self> {
        let n = knots.len();
        if n < 2 || values.len() != n {
            return Err(Error::ParamViolation(
                "spline needs at least two knots and one value per knot".into(),
            ));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ParamViolation("spline knots must be strictly increasing".into()));
        }
        // Tridiagonal system for the knot moments.
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope = |i: usize| (values[i + 1] - values[i]) / h[i];
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        match ends {
            SplineEnds::Natural => {
                diag[0] = 1.0;
                diag[n - 1] = 1.0;
            }
            SplineEnds::Clamped {
                left_slope,
                right_slope,
            } => {
                diag[0] = 2.0 * h[0];
                sup[0] = h[0];
                rhs[0] = 6.0 * (slope(0) - left_slope);
                diag[n - 1] = 2.0 * h[n - 2];
                sub[n - 1] = h[n - 2];
                rhs[n - 1] = 6.0 * (right_slope - slope(n - 2));
            }
        }
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope(i) - slope(i - 1));
        }
        // Thomas algorithm.
        for i in 1..n {
            let m = sub[i] / diag[i - 1];
            diag[i] -= m * sup[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        let mut moments = vec![0.0; n];
        moments[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            moments[i] = (rhs[i] - sup[i] * moments[i + 1]) / diag[i];
        }
        Ok(CubicSpline {
            knots,
            values,
            moments,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.knots.len();
        match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Value and first three derivatives at `x`.
    pub fn eval_all(&self, x: f64) -> [f64; 4] {
        let i = self.segment(x);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let a = x1 - x;
        let b = x - x0;
        let value = m0 * a.powi(3) / (6.0 * h)
            + m1 * b.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0);
        let d2 = (m0 * a + m1 * b) / h;
        let d3 = (m1 - m0) / h;
        [value, d1, d2, d3]
    }
}

/// The prescribed displacement `w` on (-2, 2): clamping data at ±1 and the
/// substrate in the hard-device energy.
#[derive(Debug, Clone, PartialEq)]
pub enum DirichletDatum {
    /// Polynomial with coefficients in increasing degree.
    Polynomial(Vec<f64>),
    Spline(CubicSpline),
    Expression {
        source: String,
        w: Expr,
        dw: Expr,
        d2w: Expr,
    },
}

impl Default for DirichletDatum {
    fn default() -> Self {
        DirichletDatum::zero()
    }
}

impl DirichletDatum {
    pub fn zero() -> Self {
        DirichletDatum::Polynomial(vec![0.0])
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        DirichletDatum::Polynomial(coeffs)
    }

    pub fn expression(source: &str) -> Result<Self> {
        let w = Expr::parse(source)?;
        let dw = w.derivative();
        let d2w = dw.derivative();
        Ok(DirichletDatum::Expression {
            source: source.to_string(),
            w,
            dw,
            d2w,
        })
    }

    /// Value, slope and curvature at `x`.
    pub fn eval(&self, x: f64) -> [f64; 3] {
        match self {
            DirichletDatum::Polynomial(c) => poly_eval(c, x),
            DirichletDatum::Spline(s) => {
                let [v, d1, d2, _] = s.eval_all(x);
                [v, d1, d2]
            }
            DirichletDatum::Expression { w, dw, d2w, .. } => [w.eval(x), dw.eval(x), d2w.eval(x)],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.eval(x)[1]
    }

    pub fn curvature(&self, x: f64) -> f64 {
        self.eval(x)[2]
    }

    /// Whether value and slope vanish at both clamped endpoints.
    pub fn is_homogeneous(&self) -> bool {
        let [a, b, _] = self.eval(-1.0);
        let [c, d, _] = self.eval(1.0);
        [a, b, c, d].iter().all(|v| v.abs() <= 1e-14)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DirichletDatum::Polynomial(c) => c.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }
}

fn poly_eval(c: &[f64], x: f64) -> [f64; 3] {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for &a in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + a;
    }
    [v, d1, d2]
}

/// A square-integrable load density on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum LoadField {
    Constant(f64),
    Expression { source: String, f: Expr },
    /// Piecewise-linear interpolation of samples; constant beyond the ends.
    Samples { x: Vec<f64>, y: Vec<f64> },
}

impl Default for LoadField {
    fn default() -> Self {
        LoadField::Constant(0.0)
    }
}

impl LoadField {
    pub fn zero() -> Self {
        LoadField::Constant(0.0)
    }

    pub fn expression(source: &str) -> Result<Self> {
        let f = Expr::parse(source)?;
        Ok(LoadField::Expression {
            source: source.to_string(),
            f,
        })
    }

    pub fn samples(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::ParamViolation("load samples need matching nonempty x and y".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ParamViolation("load sample abscissae must increase".into()));
        }
        Ok(LoadField::Samples { x, y })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LoadField::Constant(c) => *c,
            LoadField::Expression { f, .. } => f.eval(t),
            LoadField::Samples { x, y } => {
                let n = x.len();
                if t <= x[0] {
                    return y[0];
                }
                if t >= x[n - 1] {
                    return y[n - 1];
                }
                let i = x.partition_point(|&v| v <= t) - 1;
                let s = (t - x[i]) / (x[i + 1] - x[i]);
                y[i] + s * (y[i + 1] - y[i])
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LoadField::Constant(c) => *c == 0.0,
            LoadField::Samples { y, .. } => y.iter().all(|&v| v == 0.0),
            LoadField::Expression { .. } => false,
        }
    }

    /// Squared L² norm on [-1, 1], by composite Gauss quadrature.
    pub fn l2_norm_squared(&self) -> f64 {
        let rule = GaussRule::new(8);
        let cells = 256;
        let h = 2.0 / cells as f64;
        (0..cells)
            .map(|c| {
                let a = -1.0 + c as f64 * h;
                rule.integrate(a, a + h, |x| self.eval(x).powi(2))
            })
            .sum()
    }
}

/// Loads for one energy: a single density for E1, a reinforcement/plate pair otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Loads {
    Single(LoadField),
    Pair {
        reinforcement: LoadField,
        plate: LoadField,
    },
}

impl Default for Loads {
    fn default() -> Self {
        Loads::Single(LoadField::zero())
    }
}

impl Loads {
    pub fn single(f: LoadField) -> Self {
        Loads::Single(f)
    }

    pub fn pair(reinforcement: LoadField, plate: LoadField) -> Self {
        Loads::Pair {
            reinforcement,
            plate,
        }
    }

    /// Load acting on the reinforcement (the only load for E1).
    pub fn reinforcement(&self) -> &LoadField {
        match self {
            Loads::Single(f) => f,
            Loads::Pair { reinforcement, .. } => reinforcement,
        }
    }

    /// Load acting on the plate; zero for E1.
    pub fn plate(&self) -> Option<&LoadField> {
        match self {
            Loads::Single(_) => None,
            Loads::Pair { plate, .. } => Some(plate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // w = 1 + 2x - x^2 + 3x^3
        let w = DirichletDatum::polynomial(vec![1.0, 2.0, -1.0, 3.0]);
        let x = 0.7;
        let [v, d1, d2] = w.eval(x);
        assert!((v - (1.0 + 2.0 * x - x * x + 3.0 * x.powi(3))).abs() < 1e-14);
        assert!((d1 - (2.0 - 2.0 * x + 9.0 * x * x)).abs() < 1e-14);
        assert!((d2 - (-2.0 + 18.0 * x)).abs() < 1e-14);
    }

    #[test]
    fn clamped_spline_reproduces_cubic() {
        let f = |x: f64| x.powi(3) - 0.5 * x + 0.25;
        let df = |x: f64| 3.0 * x * x - 0.5;
        let knots: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
        let values = knots.iter().map(|&x| f(x)).collect();
        let s = CubicSpline::new(
            knots,
            values,
            SplineEnds::Clamped {
                left_slope: df(-2.0),
                right_slope: df(2.0),
            },
        )
        .unwrap();
        for &x in &[-1.9, -1.0, -0.3, 0.0, 0.77, 1.0, 1.99] {
            let [v, d1, d2, d3] = s.eval_all(x);
            assert!((v - f(x)).abs() < 1e-12);
            assert!((d1 - df(x)).abs() < 1e-12);
            assert!((d2 - 6.0 * x).abs() < 1e-11);
            assert!((d3 - 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn natural_spline_is_c2_at_knots() {
        let knots = vec![-2.0, -1.0, -0.2, 0.5, 1.0, 2.0];
        let values = vec![0.0, 1.0, -0.5, 0.3, 0.0, 0.2];
        let s = CubicSpline::new(knots.clone(), values.clone(), SplineEnds::Natural).unwrap();
        for (i, &k) in knots.iter().enumerate().skip(1).take(knots.len() - 2) {
            let l = s.eval_all(k - 1e-9);
            let r = s.eval_all(k + 1e-9);
            assert!((l[0] - r[0]).abs() < 1e-7);
            assert!((l[1] - r[1]).abs() < 1e-7);
            assert!((l[2] - r[2]).abs() < 1e-6);
            assert!((s.eval_all(k)[0] - values[i]).abs() < 1e-14);
        }
        assert!(s.eval_all(-2.0)[2].abs() < 1e-14);
        assert!(s.eval_all(2.0)[2].abs() < 1e-12);
    }

    #[test]
    fn expression_datum_has_derivatives() {
        let w = DirichletDatum::expression("x^3").unwrap();
        assert_eq!(w.eval(0.5), [0.125, 0.75, 3.0]);
        assert!(!w.is_homogeneous());
        let w0 = DirichletDatum::expression("(1 - x^2)^2").unwrap();
        assert!(w0.is_homogeneous());
    }

    #[test]
    fn load_norm_and_samples() {
        assert!((LoadField::Constant(3.0).l2_norm_squared() - 18.0).abs() < 1e-12);
        let f = LoadField::samples(vec![-1.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(5.0), 2.0);
        // ∫(x+1)^2 over [-1,1] = 8/3
        assert!((f.l2_norm_squared() - 8.0 / 3.0).abs() < 1e-12);
    }
}
