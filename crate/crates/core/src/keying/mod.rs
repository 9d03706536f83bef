//! Keying material assignment and pairwise key establishment.
//!
//! A trusted authority draws, for every order `o`, one symmetric polynomial
//! per order-`o` grid (`2^(n-o)` of them). Each node receives one share per
//! order: the share of the polynomial owning the order-`o` grid on its path.
//! Two nodes agree on a key by evaluating the share of the lowest-order
//! polynomial they have in common.
//!
//! Polynomial `(o, g)` is generated from `ChaCha8Rng` seeded with
//! [`mix_seed`]`(master_seed, [o, g])`, so a deployment is a pure function of
//! its parameters and seed.

mod document;

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldModulus};
use crate::polynomial::{PolyShare, SymBivarPoly};
use crate::rng::{sub_rng, uniform_below};
use crate::topology::{GridParams, NodeId};

pub use document::{DeploymentDoc, FORMAT_VERSION};

#[cfg(doc)]
use crate::rng::mix_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// Every order uses `t0`.
    Flat,
    /// Order `o` uses `2^(o-1) t0`.
    Doubling,
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(PolicyKind::Flat),
            "doubling" => Ok(PolicyKind::Doubling),
            other => Err(Error::ParamDomain(format!("policy {other:?} (expected flat|doubling)"))),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolicyKind::Flat => "flat",
            PolicyKind::Doubling => "doubling",
        })
    }
}

/// `max(1, floor(alpha m))`. A 1e-9 slack absorbs products such as
/// `0.7 * 10 = 6.999999999999999`.
pub fn base_degree(alpha: f64, zone_size: u64) -> usize {
    ((alpha * zone_size as f64 + 1e-9).floor() as usize).max(1)
}

/// Mapping from order to polynomial degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreePolicy {
    kind: PolicyKind,
    alpha: Option<f64>,
    t0: usize,
}

impl DegreePolicy {
    /// Policy with `t0 = max(1, floor(alpha m))`; `alpha` must lie in (0, 1].
    pub fn new(kind: PolicyKind, alpha: f64, zone_size: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::ParamDomain(format!("alpha {alpha} outside (0, 1]")));
        }
        Ok(Self {
            kind,
            alpha: Some(alpha),
            t0: base_degree(alpha, zone_size),
        })
    }

    /// Policy with an explicit base degree.
    pub fn with_base_degree(kind: PolicyKind, t0: usize) -> Self {
        Self { kind, alpha: None, t0 }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn base(&self) -> usize {
        self.t0
    }

    pub fn degree_at(&self, order: u32) -> usize {
        match self.kind {
            PolicyKind::Flat => self.t0,
            PolicyKind::Doubling => self.t0 << (order - 1),
        }
    }
}

/// A node's shares, `shares[o - 1]` for orders `1..=truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyRing {
    pub owner: NodeId,
    pub shares: Vec<PolyShare>,
}

impl KeyRing {
    /// Highest retained order.
    pub fn truncation(&self) -> u32 {
        self.shares.len() as u32
    }

    pub fn share(&self, order: u32) -> Option<&PolyShare> {
        self.shares.get((order as usize).checked_sub(1)?)
    }
}

/// Result of a relayed key setup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathKey {
    pub key: FieldElement,
    pub relay: NodeId,
    /// Direct key protecting the transfer from the relay to the first node.
    pub first_hop_key: FieldElement,
    /// Direct key protecting the transfer from the relay to the second node.
    pub second_hop_key: FieldElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Deployment {
    grid: GridParams,
    policy: DegreePolicy,
    modulus: FieldModulus,
    master_seed: u64,
    truncation: u32,
    /// `polynomials[o - 1][g]`. Held by the authority only; kept for oracles.
    polynomials: Option<Vec<Vec<SymBivarPoly>>>,
    rings: Vec<KeyRing>,
}

/// Generates all polynomials and per-node key rings.
pub fn assign_keying_material(
    grid: GridParams,
    policy: DegreePolicy,
    modulus: FieldModulus,
    master_seed: u64,
) -> Result<Deployment> {
    modulus.check_id_width(grid.id_width())?;
    let n = grid.order();
    let polynomials: Vec<Vec<SymBivarPoly>> = (1..=n)
        .map(|o| {
            (0..grid.grids_at(o))
                .map(|g| {
                    let mut rng = sub_rng(master_seed, &[o as u64, g]);
                    SymBivarPoly::random(policy.degree_at(o), modulus, &mut rng)
                })
                .collect()
        })
        .collect();

    let nodes: Vec<NodeId> = grid.nodes().collect();
    let rings = nodes
        .par_iter()
        .map(|&owner| {
            let x = modulus.element(owner.encode());
            let shares = (1..=n)
                .map(|o| polynomials[o as usize - 1][owner.grid_index(o)? as usize].share(x))
                .collect::<Result<Vec<_>>>()?;
            Ok(KeyRing { owner, shares })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Deployment {
        grid,
        policy,
        modulus,
        master_seed,
        truncation: n,
        polynomials: Some(polynomials),
        rings,
    })
}

impl Deployment {
    pub fn grid(&self) -> GridParams {
        self.grid
    }

    pub fn policy(&self) -> DegreePolicy {
        self.policy
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn rings(&self) -> &[KeyRing] {
        &self.rings
    }

    /// Number of polynomials across all orders, `2^n - 1`.
    pub fn polynomial_count(&self) -> u64 {
        (1..=self.grid.order()).map(|o| self.grid.grids_at(o)).sum()
    }

    /// Authority copy of polynomial `(order, index)`, if retained.
    pub fn authority_polynomial(&self, order: u32, index: u64) -> Option<&SymBivarPoly> {
        self.polynomials
            .as_ref()?
            .get((order as usize).checked_sub(1)?)?
            .get(index as usize)
    }

    pub fn has_authority(&self) -> bool {
        self.polynomials.is_some()
    }

    /// Drops the authority polynomials, leaving only node material.
    pub fn without_authority(&self) -> Deployment {
        Deployment {
            polynomials: None,
            ..self.clone()
        }
    }

    pub fn ring(&self, id: NodeId) -> Result<&KeyRing> {
        if id.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(&self.rings[id.index() as usize])
    }

    /// Evaluated ID of a node as a field element.
    pub fn id_element(&self, id: NodeId) -> FieldElement {
        self.modulus.element(id.encode())
    }

    /// Key computed by `i` for the pair `(i, j)` with the polynomial of the
    /// given order, which must contain both nodes and be retained by `i`.
    pub fn key_at_order(&self, i: NodeId, j: NodeId, order: u32) -> Result<FieldElement> {
        self.grid.check_order(order)?;
        let needed = i.common_order(j)?;
        if order < needed {
            return Err(Error::PolynomialNotShared { order });
        }
        let ring = self.ring(i)?;
        let share = ring.share(order).ok_or(Error::OrderTruncated {
            needed: order,
            retained: ring.truncation(),
        })?;
        share.key_with(self.id_element(j))
    }

    /// Pairwise key from the lowest-order polynomial the two nodes share.
    pub fn establish_key(&self, i: NodeId, j: NodeId) -> Result<FieldElement> {
        if i == j {
            return Err(Error::SameNode);
        }
        let order = i.common_order(j)?;
        self.ring(j)?;
        self.key_at_order(i, j, order)
    }

    /// Keeps orders `1..=d` in every ring.
    pub fn truncate_rings(&self, d: u32) -> Result<Deployment> {
        self.grid.check_order(d)?;
        let mut out = self.clone();
        for ring in &mut out.rings {
            ring.shares.truncate(d as usize);
        }
        out.truncation = out.truncation.min(d);
        Ok(out)
    }

    /// Nodes other than `i` and `j` that hold a retained direct key with both.
    ///
    /// The zone tree makes `common_order` an ultrametric:
    /// `co(i, j) <= max(co(i, w), co(w, j))` for every `w`. With uniform
    /// truncation a pair that needs an order above `d` therefore has no
    /// candidate at all.
    pub fn relay_candidates(&self, i: NodeId, j: NodeId) -> Result<Vec<NodeId>> {
        let ri = self.ring(i)?.truncation();
        let rj = self.ring(j)?.truncation();
        let mut out = Vec::new();
        for w in &self.rings {
            let relay = w.owner;
            if relay == i || relay == j {
                continue;
            }
            let (a, b) = (i.common_order(relay)?, relay.common_order(j)?);
            let rw = w.truncation();
            if a <= ri.min(rw) && b <= rj.min(rw) {
                out.push(relay);
            }
        }
        Ok(out)
    }

    /// Key for a pair without a retained common polynomial, set up through a
    /// single relay. The relay draws a fresh key and sends it to each end
    /// under its direct key with that end.
    pub fn establish_path_key<R: RngCore + ?Sized>(&self, i: NodeId, j: NodeId, rng: &mut R) -> Result<PathKey> {
        if i == j {
            return Err(Error::SameNode);
        }
        let needed = i.common_order(j)?;
        let retained = self.ring(i)?.truncation().min(self.ring(j)?.truncation());
        if needed <= retained {
            return Err(Error::DirectKeyAvailable);
        }
        let candidates = self.relay_candidates(i, j)?;
        if candidates.is_empty() {
            return Err(Error::NoRelayExists);
        }
        let relay = candidates[uniform_below(rng, candidates.len() as u64) as usize];
        let key = self.modulus.element(uniform_below(rng, self.modulus.value()));
        Ok(PathKey {
            key,
            relay,
            first_hop_key: self.establish_key(relay, i)?,
            second_hop_key: self.establish_key(relay, j)?,
        })
    }

    /// Bits a node stores: its ID plus `(t + 1) lg q` per retained share.
    pub fn ring_memory_bits(&self, id: NodeId) -> Result<u64> {
        let ring = self.ring(id)?;
        let coeffs: u64 = ring.shares.iter().map(|s| s.degree() as u64 + 1).sum();
        Ok(self.grid.id_width() as u64 + coeffs * self.modulus.bits() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::eval_bivar;
    use crate::topology::make_grid;

    fn deploy(n: u32, k: u32, kind: PolicyKind, alpha: f64, seed: u64) -> Deployment {
        let grid = make_grid(n, k).unwrap();
        let policy = DegreePolicy::new(kind, alpha, grid.zone_size()).unwrap();
        assign_keying_material(grid, policy, FieldModulus::default(), seed).unwrap()
    }

    #[test]
    fn base_degree_rounding() {
        assert_eq!(base_degree(0.6, 16), 9);
        assert_eq!(base_degree(0.5, 4), 2);
        assert_eq!(base_degree(0.7, 10), 7);
        assert_eq!(base_degree(0.01, 4), 1);
        assert_eq!(base_degree(1.0, 36), 36);
        assert!(DegreePolicy::new(PolicyKind::Flat, 0.0, 4).is_err());
        assert!(DegreePolicy::new(PolicyKind::Flat, 1.5, 4).is_err());
        assert!(DegreePolicy::new(PolicyKind::Flat, f64::NAN, 4).is_err());
    }

    #[test]
    fn policy_degrees() {
        let flat = DegreePolicy::with_base_degree(PolicyKind::Flat, 3);
        let dbl = DegreePolicy::with_base_degree(PolicyKind::Doubling, 3);
        assert_eq!((1..=4).map(|o| flat.degree_at(o)).collect::<Vec<_>>(), [3, 3, 3, 3]);
        assert_eq!((1..=4).map(|o| dbl.degree_at(o)).collect::<Vec<_>>(), [3, 6, 12, 24]);
    }

    #[test]
    fn assignment_counts() {
        let dep = deploy(2, 1, PolicyKind::Flat, 0.5, 1);
        assert_eq!(dep.grid().grids_at(1), 2);
        assert_eq!(dep.grid().grids_at(2), 1);
        assert_eq!(dep.polynomial_count(), 3);
        assert!(dep.authority_polynomial(1, 1).is_some());
        assert!(dep.authority_polynomial(2, 1).is_none());
        for o in 1..=2 {
            for g in 0..dep.grid().grids_at(o) {
                assert_eq!(dep.authority_polynomial(o, g).unwrap().degree(), 2);
            }
        }
        assert_eq!(dep.rings().len(), 8);
        assert!(dep.rings().iter().all(|r| r.shares.len() == 2));

        let single = deploy(1, 1, PolicyKind::Doubling, 0.5, 1);
        assert_eq!(single.polynomial_count(), 1);
        assert!(single.rings().iter().all(|r| r.shares.len() == 1));
    }

    #[test]
    fn rings_hold_the_right_shares() {
        let dep = deploy(3, 1, PolicyKind::Doubling, 0.5, 4);
        for ring in dep.rings() {
            let x = dep.id_element(ring.owner);
            for o in 1..=3 {
                let g = ring.owner.grid_index(o).unwrap();
                let poly = dep.authority_polynomial(o, g).unwrap();
                assert_eq!(ring.share(o).unwrap(), &poly.share(x).unwrap());
            }
        }
    }

    #[test]
    fn same_seed_same_deployment() {
        let a = deploy(3, 1, PolicyKind::Flat, 0.5, 99);
        let b = deploy(3, 1, PolicyKind::Flat, 0.5, 99);
        let c = deploy(3, 1, PolicyKind::Flat, 0.5, 100);
        assert_eq!(a, b);
        assert_ne!(a.rings(), c.rings());
    }

    #[test]
    fn small_field_rejected() {
        let grid = make_grid(3, 2).unwrap();
        let policy = DegreePolicy::with_base_degree(PolicyKind::Flat, 2);
        let q = FieldModulus::new(127).unwrap();
        assert!(matches!(
            assign_keying_material(grid, policy, q, 0),
            Err(Error::IdWidthExceedsField { width: 7, .. })
        ));
        assert!(assign_keying_material(grid, policy, FieldModulus::new(131).unwrap(), 0).is_ok());
    }

    #[test]
    fn key_examples() {
        let dep = deploy(2, 1, PolicyKind::Flat, 0.5, 17);
        let g = dep.grid();
        let i = g.node(0, 1).unwrap();
        let j = g.node(1, 1).unwrap();
        let kij = dep.establish_key(i, j).unwrap();
        let kji = dep.establish_key(j, i).unwrap();
        let root = dep.authority_polynomial(2, 0).unwrap();
        let oracle = eval_bivar(root, dep.id_element(i), dep.id_element(j)).unwrap();
        assert_eq!(kij, kji);
        assert_eq!(kij, oracle);

        let same_zone = g.node(0, 3).unwrap();
        let zone_poly = dep.authority_polynomial(1, 0).unwrap();
        assert_eq!(
            dep.establish_key(i, same_zone).unwrap(),
            eval_bivar(zone_poly, dep.id_element(i), dep.id_element(same_zone)).unwrap()
        );
        assert_eq!(dep.establish_key(i, i), Err(Error::SameNode));
    }

    #[test]
    fn key_at_order_fallback() {
        let dep = deploy(3, 1, PolicyKind::Flat, 0.5, 2);
        let g = dep.grid();
        let (i, j) = (g.node(0, 1).unwrap(), g.node(0, 2).unwrap());
        for o in 1..=3 {
            assert_eq!(dep.key_at_order(i, j, o).unwrap(), dep.key_at_order(j, i, o).unwrap());
        }
        let far = g.node(3, 1).unwrap();
        assert_eq!(
            dep.key_at_order(i, far, 2),
            Err(Error::PolynomialNotShared { order: 2 })
        );
    }

    #[test]
    fn truncation() {
        let dep = deploy(3, 1, PolicyKind::Flat, 0.5, 3);
        assert_eq!(dep.truncate_rings(3).unwrap(), dep);
        let t1 = dep.truncate_rings(1).unwrap();
        assert!(t1.rings().iter().all(|r| r.shares.len() == 1));
        assert_eq!(t1.truncation(), 1);
        assert!(dep.truncate_rings(0).is_err());
        assert!(dep.truncate_rings(4).is_err());

        let g = dep.grid();
        let (i, j) = (g.node(0, 1).unwrap(), g.node(1, 1).unwrap());
        assert_eq!(
            t1.establish_key(i, j),
            Err(Error::OrderTruncated { needed: 2, retained: 1 })
        );
        assert!(t1.establish_key(i, g.node(0, 2).unwrap()).is_ok());

        let id = g.node(0, 1).unwrap();
        let full = dep.ring_memory_bits(id).unwrap();
        let cut = t1.ring_memory_bits(id).unwrap();
        assert_eq!(full, 5 + 3 * 3 * 61);
        assert_eq!(cut, 5 + 3 * 61);
    }

    #[test]
    fn path_key_untruncated_is_direct() {
        let dep = deploy(3, 1, PolicyKind::Flat, 0.5, 3);
        let g = dep.grid();
        let mut rng = sub_rng(0, &[]);
        for i in g.nodes().step_by(3) {
            for j in g.nodes().step_by(5) {
                if i != j {
                    assert_eq!(dep.establish_path_key(i, j, &mut rng), Err(Error::DirectKeyAvailable));
                }
            }
        }
    }

    #[test]
    fn path_key_candidates_by_exhaustive_scan() {
        let dep = deploy(3, 1, PolicyKind::Flat, 0.5, 3);
        let g = dep.grid();
        let mut rng = sub_rng(0, &[]);

        // d = 1: zone 0 to zone 3
        let t1 = dep.truncate_rings(1).unwrap();
        let (i, j) = (g.node(0, 1).unwrap(), g.node(3, 1).unwrap());
        let scan: Vec<_> = g
            .nodes()
            .filter(|&w| w != i && w != j)
            .filter(|&w| i.common_order(w).unwrap() <= 1 && w.common_order(j).unwrap() <= 1)
            .collect();
        assert!(scan.is_empty());
        assert_eq!(t1.relay_candidates(i, j).unwrap(), scan);
        assert_eq!(t1.establish_path_key(i, j, &mut rng), Err(Error::NoRelayExists));

        // d = 2: zone 0 to zone 2. A relay needs path prefix 0 (for i) and 1
        // (for j) at the same time, so the scan comes back empty as well.
        let t2 = dep.truncate_rings(2).unwrap();
        let j = g.node(2, 1).unwrap();
        let scan: Vec<_> = g
            .nodes()
            .filter(|&w| w != i && w != j)
            .filter(|&w| i.common_order(w).unwrap() <= 2 && w.common_order(j).unwrap() <= 2)
            .collect();
        assert!(scan.is_empty());
        assert_eq!(t2.relay_candidates(i, j).unwrap(), scan);
        assert_eq!(t2.establish_path_key(i, j, &mut rng), Err(Error::NoRelayExists));
    }

    #[test]
    fn path_key_through_untruncated_relay() {
        // A relay only helps when one endpoint retains more orders than the
        // other; uniform truncation never yields a candidate.
        let dep = deploy(3, 1, PolicyKind::Flat, 0.5, 8);
        let g = dep.grid();
        let (i, j) = (g.node(0, 1).unwrap(), g.node(2, 1).unwrap());
        let mut partial = dep.clone();
        partial.rings[j.index() as usize].shares.truncate(2);
        partial.rings[i.index() as usize].shares.truncate(2);
        assert_eq!(partial.relay_candidates(i, j).unwrap(), Vec::<NodeId>::new());

        let mut partial = dep.clone();
        partial.rings[i.index() as usize].shares.truncate(2);
        let cands = partial.relay_candidates(i, j).unwrap();
        // relays share order <= 2 with i (paths 0 and 1) and anything with j
        assert!(!cands.is_empty());
        assert!(cands.iter().all(|w| w.path() < 2));
        let mut rng = sub_rng(5, &[]);
        let pk = partial.establish_path_key(i, j, &mut rng).unwrap();
        assert!(cands.contains(&pk.relay));
        assert_eq!(pk.first_hop_key, partial.establish_key(i, pk.relay).unwrap());
        assert_eq!(pk.second_hop_key, partial.establish_key(j, pk.relay).unwrap());
    }
}
