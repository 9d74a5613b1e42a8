//! Exact arithmetic in quadratic number fields Q(√d).
//!
//! Eigendata of the catalog matrices is either rational (λ = a+2b, λ = b+2r,
//! λ = 2, ...) or lives in a real quadratic field (λ = 1+√2, λ = 2√(ab)).
//! A [`Quad`] value `a + b√d` with rational `a, b` covers both, and lets the
//! oracle tests assert *exactly zero* residuals instead of floating-point
//! tolerances.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Rat = BigRational;

/// Rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rint(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

/// An element `a + b√d` of the quadratic field Q(√d) (`d` square-free and
/// positive, or 0 for plain rationals). Values with `b = 0` normalize `d` to
/// 0 so rationals from different fields compare equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Quad {
    pub a: Rat,
    pub b: Rat,
    pub d: u32,
}

impl Quad {
    pub fn new(a: Rat, b: Rat, d: u32) -> Quad {
        let mut q = Quad { a, b, d };
        q.normalize();
        q
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.d = 0;
        }
        assert!(
            self.b.is_zero() || self.d > 1,
            "irrational part requires a radicand d >= 2"
        );
    }

    pub fn from_rat(a: Rat) -> Quad {
        Quad { a, b: Rat::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> Quad {
        Quad::from_rat(rint(n))
    }

    /// `p + q√d` from integers.
    pub fn surd(p: i64, q: i64, d: u32) -> Quad {
        Quad::new(rint(p), rint(q), d)
    }

    pub fn zero() -> Quad {
        Quad::from_int(0)
    }

    pub fn one() -> Quad {
        Quad::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational part when the value is rational.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn same_field(&self, other: &Quad) -> u32 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d,
            (_, true) => self.d,
            _ => {
                assert_eq!(self.d, other.d, "mixed radicands {} vs {}", self.d, other.d);
                self.d
            }
        }
    }

    /// Field conjugate `a − b√d`.
    pub fn conj(&self) -> Quad {
        Quad {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    /// Multiplicative inverse (panics on zero).
    pub fn inv(&self) -> Quad {
        assert!(!self.is_zero(), "division by zero");
        // 1/(a+b√d) = (a−b√d)/(a²−b²d)
        let norm = &self.a * &self.a - &self.b * &self.b * rint(self.d as i64);
        assert!(!norm.is_zero(), "zero field norm — d must be square-free");
        Quad {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
            d: self.d,
        }
    }

    pub fn pow(&self, n: i32) -> Quad {
        if n < 0 {
            return self.inv().pow(-n);
        }
        let mut acc = Quad::one();
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt();
        // When a and b√d nearly cancel (e.g. high powers of √2 − 1, whose
        // coefficients grow like (1+√2)^n while the value shrinks), the
        // direct sum loses all precision. Evaluate through the conjugate
        // instead: a + b√d = (a² − b²d) / (a − b√d), whose terms reinforce.
        if a.signum() != b.signum() && (a + b).abs() < 1e-3 * a.abs().max(b.abs()) {
            let norm = (&self.a * &self.a - &self.b * &self.b * rint(self.d as i64))
                .to_f64()
                .unwrap_or(f64::NAN);
            let conj = a - b;
            if conj != 0.0 && norm.is_finite() {
                return norm / conj;
            }
        }
        a + b
    }

    /// Sign of the real value (exact).
    pub fn is_positive(&self) -> bool {
        if self.b.is_zero() {
            return self.a.is_positive();
        }
        if self.a.is_zero() {
            return self.b.is_positive();
        }
        // a and b√d: compare |a| vs |b|√d exactly via squares.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rint(self.d as i64);
        match (self.a.is_positive(), self.b.is_positive()) {
            (true, true) => true,
            (false, false) => false,
            (true, false) => a2 > b2d,
            (false, true) => b2d > a2,
        }
    }
}

impl Add for &Quad {
    type Output = Quad;
    fn add(self, rhs: &Quad) -> Quad {
        let d = self.same_field(rhs);
        Quad::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl Sub for &Quad {
    type Output = Quad;
    fn sub(self, rhs: &Quad) -> Quad {
        let d = self.same_field(rhs);
        Quad::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl Mul for &Quad {
    type Output = Quad;
    fn mul(self, rhs: &Quad) -> Quad {
        let d = self.same_field(rhs);
        let dd = rint(d as i64);
        Quad::new(
            &self.a * &rhs.a + &self.b * &rhs.b * &dd,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Div for &Quad {
    type Output = Quad;
    fn div(self, rhs: &Quad) -> Quad {
        self * &rhs.inv()
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Quad {
            type Output = Quad;
            fn $method(self, rhs: Quad) -> Quad {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        -&self
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl From<i64> for Quad {
    fn from(n: i64) -> Quad {
        Quad::from_int(n)
    }
}

impl From<Rat> for Quad {
    fn from(a: Rat) -> Quad {
        Quad::from_rat(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silver_ratio_identities() {
        // λ = 1+√2 satisfies λ² = 2λ+1 and 1/λ = √2−1.
        let lambda = Quad::surd(1, 1, 2);
        let two_lambda_plus_one = &(&Quad::from_int(2) * &lambda) + &Quad::one();
        assert_eq!(&lambda * &lambda, two_lambda_plus_one);
        assert_eq!(lambda.inv(), Quad::surd(-1, 1, 2));
        assert!((lambda.to_f64() - 2.414213562373095).abs() < 1e-14);
    }

    #[test]
    fn rational_values_compare_across_fields() {
        let two_a = &Quad::surd(1, 1, 2) + &Quad::surd(1, -1, 2);
        assert_eq!(two_a, Quad::from_int(2));
        assert!(two_a.is_rational());
    }

    #[test]
    fn exact_sign() {
        assert!(Quad::surd(-1, 1, 2).is_positive()); // √2 − 1 > 0
        assert!(!Quad::surd(3, -2, 2).is_positive() == false); // 3 − 2√2 > 0
        assert!(Quad::surd(3, -2, 2).is_positive());
        assert!(!Quad::surd(1, -1, 2).is_positive()); // 1 − √2 < 0
    }

    #[test]
    fn powers_match_f64() {
        let l = Quad::surd(1, 1, 2);
        let p = l.pow(5);
        assert!((p.to_f64() - l.to_f64().powi(5)).abs() < 1e-9);
        assert_eq!(&l.pow(3) * &l.pow(-3), Quad::one());
    }
}
