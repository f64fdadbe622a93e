//! Coefficient fields. A field is a small value object carrying whatever
//! context its elements need (the modulus for `Z/p`), so matrices can hold
//! plain element values.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// `p/q` for rationals (integers without denominator), residues for `Z/p`.
    fn render(&self, a: &Self::Elem) -> String;
    /// Whether the element is `1` or `-1`, used when printing chains.
    fn unit_sign(&self, a: &Self::Elem) -> Option<bool> {
        if *a == self.one() {
            Some(true)
        } else if *a == self.neg(&self.one()) {
            Some(false)
        } else {
            None
        }
    }
    /// Whether the element should be printed with a leading minus sign.
    fn is_negative(&self, a: &Self::Elem) -> bool;
    fn name(&self) -> String;
}

/// The rational numbers with arbitrary-precision numerator and denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn is_negative(&self, a: &BigRational) -> bool {
        a.is_negative()
    }
    fn name(&self) -> String {
        "Q".to_string()
    }
}

/// The prime field `Z/p`. Elements are residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Returns `None` unless `p` is a prime below `2^31` (so products fit in
    /// a `u64`).
    pub fn new(p: u64) -> Option<Self> {
        if !(2..1 << 31).contains(&p) {
            return None;
        }
        let mut d = 2;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return None;
            }
            d += 1;
        }
        Some(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in Z/{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn is_negative(&self, _a: &u64) -> bool {
        false
    }
    fn name(&self) -> String {
        format!("Z/{}", self.p)
    }
}
