//! Degree-distribution polynomials.
//!
//! A [`DegreePolynomial`] stores dense coefficients indexed by degree, so
//! `coeffs[i]` multiplies `x^i`. Node-perspective distributions are validated
//! on construction and never renormalised; edge-perspective polynomials are
//! obtained with [`DegreePolynomial::to_edge_perspective`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance on the normalisation of a node-perspective distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perspective {
    /// Fraction of nodes of each degree (`L`, `R`).
    Node,
    /// Fraction of edges attached to nodes of each degree (`λ`, `ρ`).
    Edge,
    /// Any other polynomial, e.g. a derivative. Carries no normalisation.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreePolynomial {
    coeffs: Vec<f64>,
    perspective: Perspective,
}

impl DegreePolynomial {
    /// Node-perspective distribution from dense coefficients.
    pub fn node(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        }
        for (i, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient of x^{i} is {c}, expected a value in [0, 1]"
                )));
            }
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPolynomial(format!(
                "coefficients sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            coeffs,
            perspective: Perspective::Node,
        })
    }

    /// The monomial `x^k` as a node-perspective distribution.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self {
            coeffs,
            perspective: Perspective::Node,
        }
    }

    /// Node-perspective distribution from `(degree, coefficient)` pairs.
    /// Repeated degrees are summed.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let max = pairs
            .iter()
            .map(|&(d, _)| d)
            .max()
            .ok_or_else(|| Error::InvalidPolynomial("no (degree, coefficient) pairs".into()))?;
        let mut coeffs = vec![0.0; max + 1];
        for &(d, c) in pairs {
            coeffs[d] += c;
        }
        Self::node(coeffs)
    }

    /// Wraps coefficients without validation.
    pub fn raw(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs,
            perspective: Perspective::Raw,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn perspective(&self) -> Perspective {
        self.perspective
    }

    /// Highest degree with a non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Horner evaluation of `Σ coeffs[i] x^i`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Formal derivative. The result is tagged [`Perspective::Raw`].
    pub fn derivative(&self) -> Self {
        let coeffs = if self.coeffs.len() <= 1 {
            vec![0.0]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect()
        };
        Self::raw(coeffs)
    }

    /// `p'(1)`, the average degree of a node-perspective distribution.
    pub fn mean_degree(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| i as f64 * c)
            .sum()
    }

    /// `p'(x) / p'(1)`.
    pub fn to_edge_perspective(&self) -> Result<Self> {
        if self.perspective != Perspective::Node {
            return Err(Error::InvalidPolynomial(
                "edge perspective requires a node-perspective distribution".into(),
            ));
        }
        let scale = self.mean_degree();
        if scale <= 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        let mut d = self.derivative();
        d.coeffs.iter_mut().for_each(|c| *c /= scale);
        d.perspective = Perspective::Edge;
        Ok(d)
    }
}

impl fmt::Display for DegreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c == 1.0, i) {
                (_, 0) => write!(f, "{c}")?,
                (true, _) => write!(f, "x^{i}")?,
                (false, _) => write!(f, "{c}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses node-perspective distributions written as a sum of terms such as
/// `x^3`, `x`, `0.5x^2 + 0.5x^3` or `0.25*x^4`.
impl FromStr for DegreePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for term in s.split('+') {
            let term: String = term.chars().filter(|c| !c.is_whitespace()).collect();
            if term.is_empty() {
                return Err(Error::InvalidPolynomial(format!("empty term in {s:?}")));
            }
            let bad = || Error::InvalidPolynomial(format!("cannot parse term {term:?}"));
            let (coef, power) = match term.find('x') {
                None => (term.parse::<f64>().map_err(|_| bad())?, 0),
                Some(pos) => {
                    let coef = term[..pos].trim_end_matches('*');
                    let coef = if coef.is_empty() {
                        1.0
                    } else {
                        coef.parse::<f64>().map_err(|_| bad())?
                    };
                    let rest = &term[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<usize>()
                            .map_err(|_| bad())?
                    };
                    (coef, power)
                }
            };
            pairs.push((power, coef));
        }
        Self::from_pairs(&pairs)
    }
}
