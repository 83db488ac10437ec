//! Scalars, small dense vectors, and positive-weight inner products.
//!
//! This is the base layer: the 2-inner product in [`crate::two_inner`] is a
//! Gram determinant over the weighted product defined here, and the integral
//! case in [`crate::funcspace`] discretizes onto exactly this structure with
//! quadrature-times-density weights.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Scalar field selector for a space.
///
/// Real mode is not a runtime special case of complex mode: a real-mode
/// space carries scalars whose imaginary part is exactly zero, which keeps
/// sign handling and error reporting exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Real,
    Complex,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Real => write!(f, "real"),
            Mode::Complex => write!(f, "complex"),
        }
    }
}

/// A scalar from the field of the ambient space: a complex number stored as
/// an explicit `(re, im)` pair. Real-mode values keep `im == 0.0` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scalar {
    pub re: f64,
    pub im: f64,
}

impl Scalar {
    pub const ZERO: Scalar = Scalar { re: 0.0, im: 0.0 };
    pub const ONE: Scalar = Scalar { re: 1.0, im: 0.0 };
    pub const I: Scalar = Scalar { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: f64) -> Self {
        Scalar { re, im: 0.0 }
    }

    pub fn conj(self) -> Self {
        Scalar {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn abs_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Multiplication by a real factor.
    pub fn scale(self, t: f64) -> Self {
        Scalar {
            re: self.re * t,
            im: self.im * t,
        }
    }

    /// Division by a real factor.
    pub fn div_real(self, t: f64) -> Self {
        Scalar {
            re: self.re / t,
            im: self.im / t,
        }
    }

    /// `self / |self|`; caller guarantees `self != 0`.
    pub fn sgn(self) -> Self {
        self.div_real(self.abs())
    }

    pub fn is_real(self) -> bool {
        self.im == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        Scalar {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        Scalar {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        Scalar {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl From<f64> for Scalar {
    fn from(re: f64) -> Self {
        Scalar::real(re)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// A dense vector over [`Scalar`]. Dimension is at least 2: the ambient
/// theory needs more than one direction to say anything.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<Scalar>,
}

impl Vector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::precondition(format!(
                "vector dimension must be at least 2, got {}",
                entries.len()
            )));
        }
        Ok(Vector { entries })
    }

    pub fn from_reals(entries: &[f64]) -> Result<Self> {
        Vector::new(entries.iter().copied().map(Scalar::real).collect())
    }

    /// Zero vector of dimension `dim`.
    pub fn zero(dim: usize) -> Result<Self> {
        Vector::new(vec![Scalar::ZERO; dim])
    }

    /// Standard basis vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        let mut entries = vec![Scalar::ZERO; dim];
        if index >= dim {
            return Err(Error::precondition(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        entries[index] = Scalar::ONE;
        Vector::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> Scalar {
        self.entries[i]
    }

    pub fn add(&self, o: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), o.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), o.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, t: Scalar) -> Vector {
        Vector {
            entries: self.entries.iter().map(|&a| t * a).collect(),
        }
    }

    /// `alpha * self + beta * other`, the workhorse for building the
    /// composite vectors `Ay - x`, `x - ay`, `x - lambda y`, ...
    pub fn combine(&self, alpha: Scalar, other: &Vector, beta: Scalar) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect(),
        }
    }
}

/// Finite-dimensional space with a strictly positive weight per coordinate:
/// `<x,y> = sum_i w_i x_i conj(y_i)`.
///
/// This doubles as the discretization of a weighted-integral product: take
/// quadrature nodes as coordinates and quadrature-weight-times-density as
/// the weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInnerSpace {
    weights: Vec<f64>,
    mode: Mode,
}

impl WeightedInnerSpace {
    pub fn new(weights: Vec<f64>, mode: Mode) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::precondition(format!(
                "space dimension must be at least 2, got {}",
                weights.len()
            )));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::precondition(format!(
                    "weight {i} must be a finite positive real, got {w}"
                )));
            }
        }
        Ok(WeightedInnerSpace { weights, mode })
    }

    /// Unit weights in every coordinate.
    pub fn unit(dim: usize, mode: Mode) -> Result<Self> {
        WeightedInnerSpace::new(vec![1.0; dim], mode)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }

    /// Weighted inner product, linear in the first argument and
    /// conjugate-linear in the second.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<Scalar> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for ((&w, &a), &b) in self.weights.iter().zip(x.entries()).zip(y.entries()) {
            let p = a * b.conj();
            re.add(w * p.re);
            im.add(w * p.im);
        }
        Ok(Scalar::new(re.value(), im.value()))
    }

    /// Norm induced by [`inner`](Self::inner); always nonnegative.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let mut acc = CompensatedSum::new();
        for (&w, &a) in self.weights.iter().zip(x.entries()) {
            acc.add(w * a.abs_sq());
        }
        Ok(acc.value().max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rvec(entries: &[f64]) -> Vector {
        Vector::from_reals(entries).unwrap()
    }

    #[test]
    fn inner_orthogonal_coordinates() {
        let s = WeightedInnerSpace::unit(2, Mode::Real).unwrap();
        let v = s.inner(&rvec(&[1.0, 0.0]), &rvec(&[0.0, 1.0])).unwrap();
        assert_eq!(v, Scalar::ZERO);
    }

    #[test]
    fn inner_all_ones() {
        let s = WeightedInnerSpace::unit(2, Mode::Real).unwrap();
        let v = s.inner(&rvec(&[1.0, 1.0]), &rvec(&[1.0, 1.0])).unwrap();
        assert_eq!(v, Scalar::real(2.0));
    }

    #[test]
    fn inner_weighted_by_hand() {
        // weights (2,3), x=(1,1), y=(1,-1): 2*1*1 + 3*1*(-1) = -1
        let s = WeightedInnerSpace::new(vec![2.0, 3.0], Mode::Real).unwrap();
        let v = s.inner(&rvec(&[1.0, 1.0]), &rvec(&[1.0, -1.0])).unwrap();
        assert_eq!(v, Scalar::real(-1.0));
    }

    #[test]
    fn norm_three_four_five() {
        let s = WeightedInnerSpace::unit(2, Mode::Real).unwrap();
        assert_eq!(s.norm(&rvec(&[3.0, 4.0])).unwrap(), 5.0);
    }

    #[test]
    fn norm_zero_vector() {
        let s = WeightedInnerSpace::unit(3, Mode::Real).unwrap();
        assert_eq!(s.norm(&Vector::zero(3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn norm_weighted() {
        // weights (2,2), x=(1,1): sqrt(2+2) = 2
        let s = WeightedInnerSpace::new(vec![2.0, 2.0], Mode::Real).unwrap();
        assert_eq!(s.norm(&rvec(&[1.0, 1.0])).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_names_both_dims() {
        let s = WeightedInnerSpace::unit(3, Mode::Real).unwrap();
        let err = s.inner(&rvec(&[1.0, 0.0]), &rvec(&[0.0, 1.0])).unwrap_err();
        match err {
            Error::DimMismatch { expected, found } => {
                assert_eq!((expected, found), (3, 2));
            }
            other => panic!("unexpected error: {other:?}"),
        }
        assert!(err.to_string().contains('3') && err.to_string().contains('2'));
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(WeightedInnerSpace::new(vec![1.0, 0.0], Mode::Real).is_err());
        assert!(WeightedInnerSpace::new(vec![1.0, -2.0], Mode::Real).is_err());
        assert!(WeightedInnerSpace::new(vec![1.0, f64::NAN], Mode::Real).is_err());
    }

    #[test]
    fn rejects_dimension_one() {
        assert!(WeightedInnerSpace::new(vec![1.0], Mode::Real).is_err());
        assert!(Vector::from_reals(&[1.0]).is_err());
    }

    #[test]
    fn scalar_arithmetic() {
        let a = Scalar::new(1.0, 2.0);
        let b = Scalar::new(3.0, -1.0);
        assert_eq!(a * b, Scalar::new(5.0, 5.0));
        assert_eq!(a.conj(), Scalar::new(1.0, -2.0));
        assert_eq!(Scalar::new(3.0, 4.0).abs(), 5.0);
        assert_eq!(Scalar::real(-2.0).sgn(), Scalar::real(-1.0));
    }

    mod properties {
        use super::*;
        use crate::sampling;
        use rand_chacha::rand_core::SeedableRng;
        use rand_chacha::ChaCha12Rng;

        #[test]
        fn hermitian_symmetry() {
            let mut rng = ChaCha12Rng::seed_from_u64(101);
            for &mode in &[Mode::Real, Mode::Complex] {
                let s = WeightedInnerSpace::new(vec![0.5, 2.0, 1.0, 3.5], mode).unwrap();
                for _ in 0..500 {
                    let x = sampling::random_vector(&mut rng, 4, mode);
                    let y = sampling::random_vector(&mut rng, 4, mode);
                    let a = s.inner(&x, &y).unwrap();
                    let b = s.inner(&y, &x).unwrap().conj();
                    if mode == Mode::Real {
                        assert_eq!(a, b, "real mode must be exact");
                    } else {
                        let scale = a.abs().max(1.0);
                        assert!((a - b).abs() <= 1e-12 * scale);
                    }
                }
            }
        }

        #[test]
        fn linearity_in_first_argument() {
            let mut rng = ChaCha12Rng::seed_from_u64(102);
            let s = WeightedInnerSpace::new(vec![1.0, 0.25, 4.0], Mode::Complex).unwrap();
            for _ in 0..500 {
                let x = sampling::random_vector(&mut rng, 3, Mode::Complex);
                let xp = sampling::random_vector(&mut rng, 3, Mode::Complex);
                let y = sampling::random_vector(&mut rng, 3, Mode::Complex);
                let alpha = sampling::random_scalar(&mut rng, Mode::Complex);
                let lhs = s.inner(&x.combine(alpha, &xp, Scalar::ONE), &y).unwrap();
                let rhs = alpha * s.inner(&x, &y).unwrap() + s.inner(&xp, &y).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!((lhs - rhs).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn base_cauchy_schwarz() {
            let mut rng = ChaCha12Rng::seed_from_u64(103);
            for &mode in &[Mode::Real, Mode::Complex] {
                let s = WeightedInnerSpace::new(vec![2.0, 0.1, 1.0, 1.0, 5.0], mode).unwrap();
                for _ in 0..500 {
                    let x = sampling::random_vector(&mut rng, 5, mode);
                    let y = sampling::random_vector(&mut rng, 5, mode);
                    let lhs = s.inner(&x, &y).unwrap().abs();
                    let bound = s.norm(&x).unwrap() * s.norm(&y).unwrap();
                    assert!(lhs <= bound + 1e-12 * bound.max(1.0));
                }
            }
        }
    }
}
