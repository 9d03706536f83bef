//! Arithmetic in a prime field GF(q), univariate polynomials over it, and
//! Lagrange interpolation.
//!
//! Moduli are primes below 2^63, so sums of two reduced values fit in a
//! `u64` and products are reduced through a single `u128` remainder.
//! The default modulus is the Mersenne prime 2^61 - 1.
//!
//! Elements carry their modulus. Operator impls (`+`, `-`, `*`) panic when
//! the moduli differ; the `checked_*` methods and [`field_arith`] report
//! [`Error::ModulusMismatch`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A prime modulus q < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldModulus(u64);

impl FieldModulus {
    /// 2^61 - 1.
    pub const MERSENNE_61: u64 = (1 << 61) - 1;

    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 63 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Bit length of q, i.e. `lg q` rounded up for non-powers of two.
    pub fn bits(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    /// Succeeds when every `width`-bit integer is a distinct field element,
    /// i.e. q > 2^width.
    pub fn check_id_width(self, width: u32) -> Result<()> {
        let fits = width < 64 && (1u64 << width) < self.0;
        if fits {
            Ok(())
        } else {
            Err(Error::IdWidthExceedsField {
                width,
                limit: self.bits() - 1,
            })
        }
    }

    /// Reduces `v` into the field.
    pub fn element(self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.0,
            modulus: self,
        }
    }

    /// Builds an element from an already reduced value.
    pub fn try_element(self, v: u64) -> Result<FieldElement> {
        if v < self.0 {
            Ok(FieldElement {
                value: v,
                modulus: self,
            })
        } else {
            Err(Error::OutOfRange(format!("{v} is not below q={}", self.0)))
        }
    }

    pub fn zero(self) -> FieldElement {
        self.element(0)
    }

    pub fn one(self) -> FieldElement {
        self.element(1)
    }
}

impl Default for FieldModulus {
    fn default() -> Self {
        Self(Self::MERSENNE_61)
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: FieldModulus,
}

/// Binary operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// `a * b^-1`
    InvMul,
}

/// Checked binary operation on two elements.
pub fn field_arith(a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::InvMul => a.checked_div(b),
    }
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> FieldModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus.0,
                right: other.modulus.0,
            })
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self.sub_unchecked(rhs))
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self.mul_unchecked(rhs.inverse()?))
    }

    fn add_unchecked(self, rhs: Self) -> Self {
        let q = self.modulus.0;
        // both < 2^63, no overflow
        let s = self.value + rhs.value;
        Self {
            value: if s >= q { s - q } else { s },
            modulus: self.modulus,
        }
    }

    fn sub_unchecked(self, rhs: Self) -> Self {
        let q = self.modulus.0;
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + q - rhs.value
        };
        Self {
            value,
            modulus: self.modulus,
        }
    }

    fn mul_unchecked(self, rhs: Self) -> Self {
        let q = self.modulus.0 as u128;
        Self {
            value: ((self.value as u128 * rhs.value as u128) % q) as u64,
            modulus: self.modulus,
        }
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = self.modulus.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inverse(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.modulus.0 - 2))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn assert_same(a: FieldElement, b: FieldElement) {
    assert_eq!(a.modulus, b.modulus, "field elements from different moduli");
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_same(self, rhs);
        self.add_unchecked(rhs)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_same(self, rhs);
        self.sub_unchecked(rhs)
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_same(self, rhs);
        self.mul_unchecked(rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.modulus.zero().sub_unchecked(self)
    }
}

/// Instrumentation hook for polynomial evaluation. The unit type counts
/// nothing and optimizes away.
pub trait OpCounter {
    fn mul(&mut self) {}
    fn add(&mut self) {}
}

impl OpCounter for () {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub muls: u64,
    pub adds: u64,
}

impl OpCounter for OpCount {
    fn mul(&mut self) {
        self.muls += 1;
    }
    fn add(&mut self) {
        self.adds += 1;
    }
}

/// Univariate polynomial; `coeffs[j]` multiplies `y^j`. The nominal degree is
/// `coeffs.len() - 1` even when leading coefficients are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self> {
        let first = *coeffs.first().ok_or(Error::EmptyPointSet)?;
        for c in &coeffs[1..] {
            first.same_field(*c)?;
        }
        Ok(Self { coeffs })
    }

    /// Convenience constructor from raw values, reduced mod q.
    pub fn from_values(modulus: FieldModulus, values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| modulus.element(v)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn modulus(&self) -> FieldModulus {
        self.coeffs[0].modulus
    }

    /// Horner evaluation: `degree()` multiplications and additions.
    pub fn eval(&self, y: FieldElement) -> Result<FieldElement> {
        self.eval_counted(y, &mut ())
    }

    pub fn eval_counted<C: OpCounter>(&self, y: FieldElement, counter: &mut C) -> Result<FieldElement> {
        self.coeffs[0].same_field(y)?;
        let mut rev = self.coeffs.iter().rev();
        let mut acc = *rev.next().expect("non-empty");
        for &c in rev {
            acc = acc.mul_unchecked(y);
            counter.mul();
            acc = acc.add_unchecked(c);
            counter.add();
        }
        Ok(acc)
    }
}

/// Horner evaluation of `p` at `y`.
pub fn horner_eval(p: &UniPoly, y: FieldElement) -> Result<FieldElement> {
    p.eval(y)
}

/// The unique polynomial of degree `< points.len()` through `points`.
pub fn lagrange_interpolate(points: &[(FieldElement, FieldElement)]) -> Result<UniPoly> {
    let (x0, _) = *points.first().ok_or(Error::EmptyPointSet)?;
    let modulus = x0.modulus;
    for &(x, v) in points {
        x0.same_field(x)?;
        x0.same_field(v)?;
    }
    for (i, &(xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|&(xj, _)| xj == xi) {
            return Err(Error::DuplicateAbscissa(xi.value));
        }
    }

    let k = points.len();
    let zero = modulus.zero();
    // master(y) = prod (y - x_i), coefficients low to high
    let mut master = vec![zero; k + 1];
    master[0] = modulus.one();
    for (deg, &(x, _)) in points.iter().enumerate() {
        for j in (0..=deg + 1).rev() {
            let shifted = if j > 0 { master[j - 1] } else { zero };
            master[j] = shifted - x * master[j];
        }
    }

    let mut out = vec![zero; k];
    let mut basis = vec![zero; k];
    for (i, &(xi, vi)) in points.iter().enumerate() {
        // basis = master / (y - xi) by synthetic division
        let mut carry = zero;
        for j in (0..k).rev() {
            carry = master[j + 1] + carry * xi;
            basis[j] = carry;
        }
        let denom = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(modulus.one(), |acc, (_, &(xj, _))| acc * (xi - xj));
        let scale = vi.checked_div(denom)?;
        for (o, &b) in out.iter_mut().zip(&basis) {
            *o = *o + scale * b;
        }
    }
    UniPoly::new(out)
}
