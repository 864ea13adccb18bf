use std::fmt;

use super::{Field, ScalarError};

/// Univariate polynomial, coefficients stored lowest degree first with no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 x`
    pub fn linear(c0: F, c1: F) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| self.coeff(i) + other.coeff(i))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = F::one() / l.clone();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Lagrange interpolation through points with pairwise distinct abscissas.
    pub fn interpolate(points: &[(F, F)]) -> Result<Self, ScalarError> {
        if points.is_empty() {
            return Err(ScalarError::NoPoints);
        }
        for (i, (xi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(ScalarError::DuplicateAbscissa(xi.to_string()));
            }
        }
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Self::constant(F::one());
            let mut denom = F::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(&Self::linear(-xj.clone(), F::one()));
                denom = denom * (xi.clone() - xj.clone());
            }
            acc = acc.add(&basis.scale(&(yi.clone() / denom)));
        }
        Ok(acc)
    }

    fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})λ")?,
                _ => write!(f, "({c})λ^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type P = UniPoly<Rational>;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(P::from_i64(&[1, 2]).eval(&r(3)), r(7));
        assert_eq!(P::zero().eval(&r(5)), r(0));
        assert_eq!(P::from_i64(&[-1, 0, 1]).eval(&r(1)), r(0));
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let p = P::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(P::from_i64(&[0, 0]), P::zero());
        assert_eq!(P::zero().degree(), None);
    }

    #[test]
    fn interpolate_examples() {
        let line = P::interpolate(&[(r(0), r(1)), (r(1), r(3))]).unwrap();
        assert_eq!(line, P::from_i64(&[1, 2]));
        let c = P::interpolate(&[(r(0), r(-4))]).unwrap();
        assert_eq!(c, P::from_i64(&[-4]));
        assert_eq!(
            P::interpolate(&[(r(2), r(1)), (r(2), r(3))]),
            Err(ScalarError::DuplicateAbscissa("2".into()))
        );
        assert_eq!(P::interpolate(&[]), Err(ScalarError::NoPoints));
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)^2 (x+2) and (x-1)(x+3)
        let a = P::from_i64(&[1, -2, 1]).mul(&P::from_i64(&[2, 1]));
        let b = P::from_i64(&[-1, 1]).mul(&P::from_i64(&[3, 1]));
        let (q, rem) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&rem), a);
        assert!(rem.degree().unwrap_or(0) < b.degree().unwrap());
        assert_eq!(a.gcd(&b), P::from_i64(&[-1, 1]));
        assert_eq!(a.derivative(), P::from_i64(&[-3, 0, 3]));
    }

    proptest! {
        #[test]
        fn interpolation_inverts_sampling(coeffs in proptest::collection::vec(-50i64..50, 1..6)) {
            let p = P::from_i64(&coeffs);
            let pts: Vec<_> = (0..coeffs.len() as i64)
                .map(|x| (Rational::new(BigInt::from(2 * x - 3), BigInt::from(3)), p.eval(&Rational::new(BigInt::from(2 * x - 3), BigInt::from(3)))))
                .collect();
            prop_assert_eq!(P::interpolate(&pts).unwrap(), p);
        }
    }
}
