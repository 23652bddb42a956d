//! Real roots of low-degree polynomials via companion-matrix eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::spectrum::eigenvalues;
use crate::EPS;

/// Polynomial of degree at most 4, `coefficients[i]` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    /// Trailing coefficients with `|c| <= 1e2 eps max|c_i|` are dropped.
    pub fn new(coefficients: &[f64]) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("non-finite polynomial coefficient".into()));
        }
        let scale = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return Err(Error::Precondition("zero polynomial".into()));
        }
        let cut = 1e2 * EPS * scale;
        let mut coefficients = coefficients.to_vec();
        while coefficients.last().is_some_and(|c| c.abs() <= cut) {
            coefficients.pop();
        }
        if coefficients.len() > 5 {
            return Err(Error::Precondition(format!(
                "degree {} exceeds 4",
                coefficients.len() - 1
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `(p(x), p'(x))` by Horner.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coefficients.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Acceptance bound on `|p(x)|` for a polished root.
    pub fn residual_bound(&self, x: f64) -> f64 {
        1e3 * EPS * self.max_coefficient() * x.abs().max(1.0).powi(self.degree() as i32)
    }

    fn companion(&self) -> DenseMatrix {
        let d = self.degree();
        let lead = self.coefficients[d];
        let mut c = DenseMatrix::zeros(d, d);
        for i in 1..d {
            c[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            c[(i, d - 1)] = -self.coefficients[i] / lead;
        }
        c
    }

    fn newton_polish(&self, x0: f64) -> f64 {
        let mut x = x0;
        let mut best = (self.eval(x).abs(), x);
        for _ in 0..60 {
            let (p, dp) = self.eval_with_derivative(x);
            if p == 0.0 || dp == 0.0 {
                break;
            }
            let next = x - p / dp;
            if !next.is_finite() {
                break;
            }
            let r = self.eval(next).abs();
            if r < best.0 {
                best = (r, next);
            } else if (next - x).abs() <= EPS * x.abs() {
                break;
            }
            x = next;
        }
        best.1
    }
}

/// Companion eigenvalues with `|Im| <= 1e-8 (1 + |Re|)` are treated as real.
const IMAG_ACCEPT: f64 = 1e-8;

/// All distinct real roots, ascending, each Newton-polished.
pub fn real_roots(p: &Polynomial) -> Result<Vec<f64>> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::Precondition("constant polynomial has no roots".into()));
    }
    let candidates: Vec<f64> = if d == 1 {
        vec![-p.coefficients[0] / p.coefficients[1]]
    } else {
        eigenvalues(&p.companion())?
            .eigenvalues
            .into_iter()
            .filter(|z| z.im.abs() <= IMAG_ACCEPT * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .collect()
    };

    let mut roots: Vec<f64> = candidates
        .into_iter()
        .map(|x| p.newton_polish(x))
        .filter(|&x| p.eval(x).abs() <= p.residual_bound(x))
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1.0));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x4_minus_1() {
        let p = Polynomial::new(&[-1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(real_roots(&p).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn two_real_two_complex() {
        // (x-2)(x-3)(x^2+1)
        let p = Polynomial::new(&[6.0, -5.0, 7.0, -5.0, 1.0]).unwrap();
        let r = real_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 2.0).abs() < 1e-14 && (r[1] - 3.0).abs() < 1e-14, "{r:?}");
    }

    #[test]
    fn no_real_roots() {
        let p = Polynomial::new(&[1.0, 0.0, 1.0]).unwrap();
        assert!(real_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn double_root_collapsed() {
        // (x-1)^2 (x+2)
        let p = Polynomial::new(&[2.0, -3.0, 0.0, 1.0]).unwrap();
        let r = real_roots(&p).unwrap();
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] + 2.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn trims_negligible_leading_coefficients() {
        let p = Polynomial::new(&[-1.0, 1.0, 1e-30]).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(real_roots(&p).unwrap(), vec![1.0]);
    }

    #[test]
    fn errors() {
        assert!(Polynomial::new(&[0.0, 0.0]).is_err());
        assert!(real_roots(&Polynomial::new(&[3.0]).unwrap()).is_err());
        assert!(Polynomial::new(&[1.0; 6]).is_err());
    }
}
