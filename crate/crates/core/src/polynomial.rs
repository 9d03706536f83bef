//! Symmetric bivariate polynomials `f(x, y) = sum a_ij x^i y^j` with
//! `a_ij = a_ji`, the univariate shares `g_id(y) = f(id, y)` handed to nodes,
//! and the threshold recovery an attacker runs on collected shares.

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::field::{lagrange_interpolate, FieldElement, FieldModulus, UniPoly};
use crate::rng::uniform_below;

/// Symmetric bivariate polynomial of degree `t` in each variable.
///
/// Only the upper triangle (`i <= j`) is stored, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymBivarPoly {
    degree: usize,
    modulus: FieldModulus,
    upper: Vec<u64>,
}

fn tri_index(t: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..i hold (t+1) + t + ... + (t+2-i) entries
    i * (2 * (t + 1) - i + 1) / 2 + (j - i)
}

impl SymBivarPoly {
    /// Draws every upper-triangle coefficient uniformly from `[0, q)`, row by
    /// row. The draw order is part of the deployment format.
    pub fn random<R: RngCore + ?Sized>(degree: usize, modulus: FieldModulus, rng: &mut R) -> Self {
        let len = (degree + 1) * (degree + 2) / 2;
        let upper = (0..len).map(|_| uniform_below(rng, modulus.value())).collect();
        Self { degree, modulus, upper }
    }

    /// Builds from a full matrix, rejecting non-square or asymmetric input.
    pub fn from_matrix(matrix: &[Vec<FieldElement>]) -> Result<Self> {
        let size = matrix.len();
        if size == 0 || matrix.iter().any(|row| row.len() != size) {
            return Err(Error::ParamDomain(
                "coefficient matrix must be square and non-empty".into(),
            ));
        }
        let modulus = matrix[0][0].modulus();
        let mut upper = Vec::with_capacity(size * (size + 1) / 2);
        for i in 0..size {
            for j in 0..size {
                let c = matrix[i][j];
                if c.modulus() != modulus {
                    return Err(Error::ModulusMismatch {
                        left: modulus.value(),
                        right: c.modulus().value(),
                    });
                }
                if c != matrix[j][i] {
                    return Err(Error::AsymmetricResult);
                }
                if j >= i {
                    upper.push(c.value());
                }
            }
        }
        Ok(Self {
            degree: size - 1,
            modulus,
            upper,
        })
    }

    /// Rebuilds from the packed upper triangle.
    pub fn from_upper(degree: usize, modulus: FieldModulus, upper: Vec<u64>) -> Result<Self> {
        if upper.len() != (degree + 1) * (degree + 2) / 2 {
            return Err(Error::Format(format!(
                "degree {degree} needs {} coefficients, got {}",
                (degree + 1) * (degree + 2) / 2,
                upper.len()
            )));
        }
        if let Some(&bad) = upper.iter().find(|&&v| v >= modulus.value()) {
            return Err(Error::OutOfRange(format!("coefficient {bad} not below q")));
        }
        Ok(Self { degree, modulus, upper })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    /// `a_ij`; symmetric in its arguments.
    pub fn coeff(&self, i: usize, j: usize) -> FieldElement {
        assert!(i <= self.degree && j <= self.degree, "coefficient index out of range");
        self.modulus.element(self.upper[tri_index(self.degree, i, j)])
    }

    pub fn upper(&self) -> &[u64] {
        &self.upper
    }

    pub fn matrix(&self) -> Vec<Vec<FieldElement>> {
        (0..=self.degree)
            .map(|i| (0..=self.degree).map(|j| self.coeff(i, j)).collect())
            .collect()
    }

    fn check(&self, e: FieldElement) -> Result<()> {
        if e.modulus() == self.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus.value(),
                right: e.modulus().value(),
            })
        }
    }

    pub fn eval(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.share(x)?.share.eval(y)
    }

    /// `g_id(y) = f(id, y)`: coefficient `j` is `sum_i a_ij id^i`.
    pub fn share(&self, id: FieldElement) -> Result<PolyShare> {
        self.check(id)?;
        let coeffs = (0..=self.degree)
            .map(|j| {
                (0..=self.degree)
                    .rev()
                    .fold(self.modulus.zero(), |acc, i| acc * id + self.coeff(i, j))
            })
            .collect();
        Ok(PolyShare {
            owner: id,
            share: UniPoly::new(coeffs)?,
        })
    }
}

/// Fresh symmetric polynomial of degree `t`.
pub fn gen_sym_bivar<R: RngCore + ?Sized>(t: usize, modulus: FieldModulus, rng: &mut R) -> SymBivarPoly {
    SymBivarPoly::random(t, modulus, rng)
}

/// Direct evaluation of the double sum; independent of the share path.
pub fn eval_bivar(f: &SymBivarPoly, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
    f.check(x)?;
    f.check(y)?;
    let mut acc = f.modulus.zero();
    let mut xi = f.modulus.one();
    for i in 0..=f.degree {
        let mut yj = f.modulus.one();
        for j in 0..=f.degree {
            acc = acc + f.coeff(i, j) * xi * yj;
            yj = yj * y;
        }
        xi = xi * x;
    }
    Ok(acc)
}

pub fn derive_share(f: &SymBivarPoly, id: FieldElement) -> Result<PolyShare> {
    f.share(id)
}

/// A node's univariate share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyShare {
    pub owner: FieldElement,
    pub share: UniPoly,
}

impl PolyShare {
    pub fn degree(&self) -> usize {
        self.share.degree()
    }

    /// Pairwise key with the node whose evaluated ID is `other`.
    pub fn key_with(&self, other: FieldElement) -> Result<FieldElement> {
        self.share.eval(other)
    }
}

pub fn eval_share(s: &PolyShare, other_id: FieldElement) -> Result<FieldElement> {
    s.key_with(other_id)
}

/// Recovers the bivariate polynomial from `t + 1` or more shares.
///
/// Column `j` of the matrix is the polynomial `x -> share_x.coeffs[j]`; one
/// interpolation per column over the first `t + 1` shares recovers it. The
/// result must be symmetric, and every extra share must agree with it.
pub fn recover_from_shares(shares: &[PolyShare], t: usize) -> Result<SymBivarPoly> {
    if shares.len() < t + 1 {
        return Err(Error::InsufficientShares {
            needed: t + 1,
            got: shares.len(),
        });
    }
    for (i, s) in shares.iter().enumerate() {
        if s.degree() != t {
            return Err(Error::DegreeMismatch {
                expected: t,
                got: s.degree(),
            });
        }
        if shares[..i].iter().any(|p| p.owner == s.owner) {
            return Err(Error::DuplicateOwner(s.owner.value()));
        }
    }
    let basis = &shares[..=t];
    let columns = (0..=t)
        .map(|j| {
            let points: Vec<_> = basis.iter().map(|s| (s.owner, s.share.coeffs()[j])).collect();
            lagrange_interpolate(&points)
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix: Vec<Vec<FieldElement>> = (0..=t)
        .map(|i| columns.iter().map(|col| col.coeffs()[i]).collect())
        .collect();
    let f = SymBivarPoly::from_matrix(&matrix)?;
    for extra in &shares[t + 1..] {
        if f.share(extra.owner)? != *extra {
            return Err(Error::AsymmetricResult);
        }
    }
    Ok(f)
}
