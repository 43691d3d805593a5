use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::Real;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn new(points: usize) -> Result<Self> {
        let gl = GaussLegendre::new(points)
            .map_err(|_| Error::InvalidConfig(format!("quadrature order {points} < 2")))?;
        let (nodes, weights) = gl.as_node_weight_pairs().iter().map(|&(x, w)| (T::lit(x), T::lit(w))).unzip();
        Ok(Rule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_a^b f` for a vector-valued integrand of `K` components.
    pub fn integrate<const K: usize, F>(&self, a: T, b: T, f: &mut F) -> Result<[Complex<T>; K]>
    where
        F: FnMut(T) -> Result<[Complex<T>; K]>,
    {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = [Complex::zero(); K];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * *x)?;
            for (s, t) in acc.iter_mut().zip(v) {
                *s = *s + t * (*w * half);
            }
        }
        Ok(acc)
    }
}

/// Geometric grading toward one endpoint of an interval whose integrand
/// has an integrable (logarithmic) singularity there.
#[derive(Debug, Clone)]
pub struct Graded<T> {
    pub rule: Rule<T>,
    pub ratio: T,
    pub levels: usize,
}

impl<T: Real> Graded<T> {
    pub fn new(points: usize, levels: usize) -> Result<Self> {
        Ok(Graded { rule: Rule::new(points)?, ratio: T::lit(0.15), levels })
    }

    /// `∫` over the interval from `sing` (singular end) to `other`.
    pub fn integrate<const K: usize, F>(&self, sing: T, other: T, f: &mut F) -> Result<[Complex<T>; K]>
    where
        F: FnMut(T) -> Result<[Complex<T>; K]>,
    {
        let len = other - sing;
        let mut acc = [Complex::zero(); K];
        let mut outer = T::one();
        for _ in 0..self.levels {
            let inner = outer * self.ratio;
            let part = self.rule.integrate(sing + len * inner, sing + len * outer, f)?;
            for (s, t) in acc.iter_mut().zip(part) {
                *s = *s + t;
            }
            outer = inner;
        }
        let part = self.rule.integrate(sing, sing + len * outer, f)?;
        for (s, t) in acc.iter_mut().zip(part) {
            *s = *s + t;
        }
        Ok(acc)
    }
}
