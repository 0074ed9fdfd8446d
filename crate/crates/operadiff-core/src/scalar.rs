//! Exact scalar arithmetic over a computable field.
//!
//! The engine restricts the base ring to a field so that kernels and quotient
//! bases are computable by Gaussian elimination: either `ℚ` (arbitrary
//! precision, the default) or a prime field `ℤ/p`.  Representations are
//! canonical — reduced fractions with positive denominator, residues in
//! `[0, p)` — so equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed as _, Zero};
use serde::{Deserialize, Serialize};

/// Tag naming the field a [`Scalar`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    /// The rationals `ℚ`.
    Q,
    /// The prime field `ℤ/p`.
    Fp(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Q => write!(f, "Q"),
            FieldTag::Fp(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact scalar: an arbitrary-precision rational or a residue mod a prime.
///
/// Arithmetic between scalars of different fields is a programming error and
/// panics; all public constructors tag their results, and the containers in
/// [`crate::linalg`] never mix fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, val: u64 },
}

impl Scalar {
    /// Zero in the given field.
    pub fn zero(tag: FieldTag) -> Self {
        match tag {
            FieldTag::Q => Scalar::Q(BigRational::zero()),
            FieldTag::Fp(p) => Scalar::Fp { p, val: 0 },
        }
    }

    /// One in the given field.
    pub fn one(tag: FieldTag) -> Self {
        match tag {
            FieldTag::Q => Scalar::Q(BigRational::one()),
            FieldTag::Fp(p) => Scalar::Fp { p, val: 1 % p },
        }
    }

    /// The image of an integer in the given field.
    pub fn from_int(n: i64, tag: FieldTag) -> Self {
        match tag {
            FieldTag::Q => Scalar::Q(BigRational::from(BigInt::from(n))),
            FieldTag::Fp(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, val: r }
            }
        }
    }

    /// The rational `num / den` (only meaningful over `ℚ`; over `ℤ/p` the
    /// division is performed in the field).  Panics if `den` maps to zero.
    pub fn from_ratio(num: i64, den: i64, tag: FieldTag) -> Self {
        assert!(den != 0, "zero denominator");
        let n = Self::from_int(num, tag);
        let d = Self::from_int(den, tag);
        &n * &d.inv().expect("denominator is zero in the field")
    }

    /// Which field this scalar belongs to.
    pub fn tag(&self) -> FieldTag {
        match self {
            Scalar::Q(_) => FieldTag::Q,
            Scalar::Fp { p, .. } => FieldTag::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { p, val } => *val == 1 % p,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(q.recip()))
                }
            }
            Scalar::Fp { p, val } => {
                if *val == 0 {
                    None
                } else {
                    Some(Scalar::Fp {
                        p: *p,
                        val: mod_inv(*val, *p),
                    })
                }
            }
        }
    }

    fn check_same(&self, other: &Scalar) {
        assert_eq!(
            self.tag(),
            other.tag(),
            "scalar arithmetic across different fields"
        );
    }
}

/// Inverse of `a` modulo the prime `p` via extended Euclid.
fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "{a} is not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                p: *p,
                val: ((*a as u128 + *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                p: *p,
                val: ((*a as u128 * *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { p, val } => Scalar::Fp {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

/// Parses `"p"` or `"p/q"` into a rational scalar (used by spec files and
/// the expression grammar).
pub fn parse_rational(text: &str, tag: FieldTag) -> Result<Scalar, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: i64 = num
        .parse()
        .map_err(|_| format!("invalid rational numerator: {num:?}"))?;
    let d: i64 = den
        .parse()
        .map_err(|_| format!("invalid rational denominator: {den:?}"))?;
    if d == 0 {
        return Err("zero denominator".to_string());
    }
    Ok(Scalar::from_ratio(n, d, tag))
}

impl Scalar {
    /// True for negative rationals (used only for rendering signs; residues
    /// mod `p` are never negative).
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(q) if q.is_negative())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rationals() {
        let a = Scalar::from_ratio(2, 4, FieldTag::Q);
        let b = Scalar::from_ratio(1, 2, FieldTag::Q);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/2");
        let c = Scalar::from_ratio(1, -2, FieldTag::Q);
        assert_eq!(c.to_string(), "-1/2");
    }

    #[test]
    fn field_ops_mod_p() {
        let t = FieldTag::Fp(7);
        let a = Scalar::from_int(5, t);
        let b = Scalar::from_int(4, t);
        assert_eq!((&a + &b).to_string(), "2");
        assert_eq!((&a * &b).to_string(), "6");
        assert_eq!((&a * &a.inv().unwrap()), Scalar::one(t));
        assert!(Scalar::zero(t).inv().is_none());
    }

    #[test]
    fn parse_ratio_strings() {
        assert_eq!(
            parse_rational("3/4", FieldTag::Q).unwrap(),
            Scalar::from_ratio(3, 4, FieldTag::Q)
        );
        assert_eq!(
            parse_rational("-2", FieldTag::Q).unwrap(),
            Scalar::from_int(-2, FieldTag::Q)
        );
        assert!(parse_rational("1/0", FieldTag::Q).is_err());
        assert!(parse_rational("x", FieldTag::Q).is_err());
    }
}
