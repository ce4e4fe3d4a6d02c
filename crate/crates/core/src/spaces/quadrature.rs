//! Gauss rules on the reference triangle and the unit interval.
//!
//! The reference triangle is `{(x, y) : x, y >= 0, x + y <= 1}`. Triangle
//! rules are collapsed tensor products of Gauss-Legendre rules.

use crate::{Error, Result};

/// Highest polynomial degree accepted by the rule constructors.
pub const MAX_DEGREE: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// 1D rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

impl LineRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "quadrature degree {degree} unsupported (maximum {MAX_DEGREE})"
        )));
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and P_{n-1}
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss rule on `[0, 1]` exact for polynomials of the given degree.
pub fn line_rule(degree: usize) -> Result<LineRule> {
    check_degree(degree)?;
    Ok(unit_interval_rule(degree))
}

fn unit_interval_rule(degree: usize) -> LineRule {
    let (x, w) = gauss_legendre(degree / 2 + 1);
    LineRule {
        points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
        degree,
    }
}

/// Rule on the reference triangle exact for polynomials of the given degree.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule> {
    check_degree(degree)?;
    // the collapse adds one power of (1 - s) to the integrand
    let line = unit_interval_rule(degree + 1);
    let mut points = Vec::with_capacity(line.len() * line.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&s, &ws) in line.points.iter().zip(&line.weights) {
        for (&t, &wt) in line.points.iter().zip(&line.weights) {
            points.push([s, t * (1.0 - s)]);
            weights.push(ws * wt * (1.0 - s));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!
    fn monomial_integral(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn simple_integrals() {
        let q = triangle_rule(2).unwrap();
        assert!((q.integrate(|_| 1.0) - 0.5).abs() < 1e-15);
        assert!((q.integrate(|p| p[0] * p[0]) - 1.0 / 12.0).abs() < 1e-15);
        let q = triangle_rule(5).unwrap();
        // 3! 2! / 7! = 12 / 5040
        assert!((q.integrate(|p| p[0].powi(3) * p[1].powi(2)) - 1.0 / 420.0).abs() < 1e-16);
    }

    #[test]
    fn triangle_rules_are_exact_to_their_degree() {
        for d in 0..=MAX_DEGREE {
            let q = triangle_rule(d).unwrap();
            assert!(q.weights.iter().all(|&w| w > 0.0));
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let exact = monomial_integral(a, b);
                    let got = q.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!(
                        (got - exact).abs() <= 1e-14 * exact,
                        "degree {d}, x^{a} y^{b}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn line_rules_are_exact_to_their_degree() {
        for d in 0..=MAX_DEGREE {
            let q = line_rule(d).unwrap();
            for a in 0..=d as i32 {
                let got = q.integrate(|t| t.powi(a));
                let exact = 1.0 / (a as f64 + 1.0);
                assert!((got - exact).abs() < 1e-14 * exact, "degree {d}, t^{a}");
            }
        }
    }

    #[test]
    fn unsupported_degree_is_rejected() {
        assert!(triangle_rule(MAX_DEGREE + 1).is_err());
        assert!(line_rule(MAX_DEGREE + 1).is_err());
    }
}
