//! Persisted deployment document (JSON).
//!
//! Large integers (modulus, seed, coefficients) are decimal strings so the
//! file survives parsers that read JSON numbers as doubles. Authority
//! polynomials store their packed upper triangle row by row.

use serde::{Deserialize, Serialize};

use super::{DegreePolicy, Deployment, KeyRing, PolicyKind};
use crate::error::{Error, Result};
use crate::field::{FieldModulus, UniPoly};
use crate::polynomial::{PolyShare, SymBivarPoly};
use crate::topology::GridParams;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentDoc {
    pub format_version: u32,
    pub n: u32,
    pub k: u32,
    pub alpha: Option<f64>,
    pub policy: PolicyKind,
    pub t0: usize,
    pub modulus: String,
    pub master_seed: String,
    pub truncation: u32,
    pub rings: Vec<RingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authority_polynomials: Option<Vec<PolynomialDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub id: u64,
    pub shares: Vec<ShareDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareDoc {
    pub order: u32,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDoc {
    pub order: u32,
    pub index: u64,
    pub degree: usize,
    pub coeffs: Vec<String>,
}

fn decimal(field: &str, s: &str) -> Result<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Format(format!("{field}: {s:?} is not a decimal integer")));
    }
    s.parse()
        .map_err(|_| Error::Format(format!("{field}: {s:?} overflows 64 bits")))
}

impl From<&Deployment> for DeploymentDoc {
    fn from(dep: &Deployment) -> Self {
        let rings = dep
            .rings
            .iter()
            .map(|ring| RingDoc {
                id: ring.owner.encode(),
                shares: ring
                    .shares
                    .iter()
                    .enumerate()
                    .map(|(o, s)| ShareDoc {
                        order: o as u32 + 1,
                        coeffs: s.share.coeffs().iter().map(|c| c.value().to_string()).collect(),
                    })
                    .collect(),
            })
            .collect();
        let authority_polynomials = dep.polynomials.as_ref().map(|orders| {
            orders
                .iter()
                .enumerate()
                .flat_map(|(o, polys)| {
                    polys.iter().enumerate().map(move |(g, p)| PolynomialDoc {
                        order: o as u32 + 1,
                        index: g as u64,
                        degree: p.degree(),
                        coeffs: p.upper().iter().map(u64::to_string).collect(),
                    })
                })
                .collect()
        });
        DeploymentDoc {
            format_version: FORMAT_VERSION,
            n: dep.grid.order(),
            k: dep.grid.unit(),
            alpha: dep.policy.alpha,
            policy: dep.policy.kind,
            t0: dep.policy.t0,
            modulus: dep.modulus.value().to_string(),
            master_seed: dep.master_seed.to_string(),
            truncation: dep.truncation,
            rings,
            authority_polynomials,
        }
    }
}

impl TryFrom<DeploymentDoc> for Deployment {
    type Error = Error;

    fn try_from(doc: DeploymentDoc) -> Result<Self> {
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        let grid = GridParams::new(doc.n, doc.k)?;
        let modulus = FieldModulus::new(decimal("modulus", &doc.modulus)?)?;
        modulus.check_id_width(grid.id_width())?;
        let master_seed = decimal("master_seed", &doc.master_seed)?;
        let policy = DegreePolicy {
            kind: doc.policy,
            alpha: doc.alpha,
            t0: doc.t0,
        };
        if let Some(alpha) = doc.alpha {
            let expected = DegreePolicy::new(doc.policy, alpha, grid.zone_size())?;
            if expected.t0 != doc.t0 {
                return Err(Error::Format(format!("t0 {} inconsistent with alpha {alpha}", doc.t0)));
            }
        }
        grid.check_order(doc.truncation)?;
        if doc.rings.len() as u64 != grid.capacity() {
            return Err(Error::Format(format!(
                "{} rings for a network of {}",
                doc.rings.len(),
                grid.capacity()
            )));
        }

        let mut rings = Vec::with_capacity(doc.rings.len());
        for (index, ring) in doc.rings.into_iter().enumerate() {
            let owner = grid.decode_id(ring.id)?;
            if owner.index() != index as u64 {
                return Err(Error::Format(format!("ring {index} holds ID {} out of order", ring.id)));
            }
            if ring.shares.len() != doc.truncation as usize {
                return Err(Error::Format(format!(
                    "ring {} holds {} shares, truncation is {}",
                    ring.id,
                    ring.shares.len(),
                    doc.truncation
                )));
            }
            let x = modulus.element(owner.encode());
            let mut shares = Vec::with_capacity(ring.shares.len());
            for (o, share) in ring.shares.into_iter().enumerate() {
                let order = o as u32 + 1;
                if share.order != order {
                    return Err(Error::Format(format!(
                        "ring {}: share order {} out of sequence",
                        ring.id, share.order
                    )));
                }
                if share.coeffs.len() != policy.degree_at(order) + 1 {
                    return Err(Error::DegreeMismatch {
                        expected: policy.degree_at(order),
                        got: share.coeffs.len().saturating_sub(1),
                    });
                }
                let coeffs = share
                    .coeffs
                    .iter()
                    .map(|c| modulus.try_element(decimal("coeffs", c)?))
                    .collect::<Result<Vec<_>>>()?;
                shares.push(PolyShare {
                    owner: x,
                    share: UniPoly::new(coeffs)?,
                });
            }
            rings.push(KeyRing { owner, shares });
        }

        let polynomials = match doc.authority_polynomials {
            None => None,
            Some(list) => {
                let mut orders: Vec<Vec<SymBivarPoly>> = Vec::new();
                let mut iter = list.into_iter();
                for o in 1..=grid.order() {
                    let mut polys = Vec::new();
                    for g in 0..grid.grids_at(o) {
                        let p = iter
                            .next()
                            .ok_or_else(|| Error::Format("authority polynomial list too short".into()))?;
                        if (p.order, p.index) != (o, g) {
                            return Err(Error::Format(format!(
                                "authority polynomial ({}, {}) where ({o}, {g}) expected",
                                p.order, p.index
                            )));
                        }
                        if p.degree != policy.degree_at(o) {
                            return Err(Error::DegreeMismatch {
                                expected: policy.degree_at(o),
                                got: p.degree,
                            });
                        }
                        let upper = p
                            .coeffs
                            .iter()
                            .map(|c| decimal("coeffs", c))
                            .collect::<Result<Vec<_>>>()?;
                        polys.push(SymBivarPoly::from_upper(p.degree, modulus, upper)?);
                    }
                    orders.push(polys);
                }
                if iter.next().is_some() {
                    return Err(Error::Format("authority polynomial list too long".into()));
                }
                Some(orders)
            }
        };

        Ok(Deployment {
            grid,
            policy,
            modulus,
            master_seed,
            truncation: doc.truncation,
            polynomials,
            rings,
        })
    }
}

impl Deployment {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&DeploymentDoc::from(self)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DeploymentDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Deployment::try_from(doc)
    }
}
