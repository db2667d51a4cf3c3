//! Gaussian integers and Laurent polynomials in `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// An element `re + im*i` of the Gaussian integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub const fn from_int(re: i64) -> Self {
        GaussInt { re, im: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }
}

impl From<i64> for GaussInt {
    fn from(v: i64) -> Self {
        GaussInt::from_int(v)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        gauss_mul(self, o)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, o: GaussInt) {
        *self = *self + o;
    }
}

impl SubAssign for GaussInt {
    fn sub_assign(&mut self, o: GaussInt) {
        *self = *self - o;
    }
}

impl MulAssign for GaussInt {
    fn mul_assign(&mut self, o: GaussInt) {
        *self = *self * o;
    }
}

impl Zero for GaussInt {
    fn zero() -> Self {
        GaussInt::ZERO
    }
    fn is_zero(&self) -> bool {
        GaussInt::is_zero(*self)
    }
}

impl One for GaussInt {
    fn one() -> Self {
        GaussInt::ONE
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, im) => write!(f, "{im}i"),
            (re, 1) => write!(f, "{re}+i"),
            (re, -1) => write!(f, "{re}-i"),
            (re, im) if im > 0 => write!(f, "{re}+{im}i"),
            (re, im) => write!(f, "{re}{im}i"),
        }
    }
}

pub fn gauss_mul(a: GaussInt, b: GaussInt) -> GaussInt {
    GaussInt::new(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
}

/// `i^k` for any integer `k`.
pub fn i_pow(k: i64) -> GaussInt {
    match k.rem_euclid(4) {
        0 => GaussInt::ONE,
        1 => GaussInt::I,
        2 => -GaussInt::ONE,
        _ => -GaussInt::I,
    }
}

/// `(-1)^k`.
pub fn sign_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A Laurent polynomial in `q` with integer coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(coeff, exp);
        p
    }

    pub fn add_term(&mut self, coeff: i64, exp: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.coeffs.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    /// Sorted `"c*q^e"` strings.
    pub fn to_term_strings(&self) -> Vec<String> {
        self.terms().map(|(e, c)| format!("{c}*q^{e}")).collect()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(c, e);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(e, c)| match (c, e) {
                (c, 0) => format!("{c}"),
                (1, e) => format!("q^{e}"),
                (-1, e) => format!("-q^{e}"),
                (c, e) => format!("{c}q^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}
