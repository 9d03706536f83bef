//! Hierarchical grid of zones and structured node identifiers.
//!
//! The network is a complete binary tree of depth `n - 1`. Its `2^(n-1)`
//! leaves are basic zones of `m = (2k)^2` nodes each; a grid of order `o`
//! is a subtree spanning `2^(o-1)` basic zones, and the order-`n` grid is
//! the whole network.
//!
//! A node is addressed by its leaf `path` (root-side bit first) and a
//! 1-based `local` index inside its zone. The encoded ID is
//!
//! ```text
//! | 0 | path: n-1 bits | local-1: ceil(lg m) bits |
//! ```
//!
//! for a total width of `n + ceil(lg m)` bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest ID accepted by [`make_grid`]; keeps IDs injective below 2^61 - 1.
pub const MAX_ID_WIDTH: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridParams {
    n: u32,
    k: u32,
}

/// Validated grid for network order `n` and distribution unit `k`.
pub fn make_grid(n: u32, k: u32) -> Result<GridParams> {
    GridParams::new(n, k)
}

impl GridParams {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::ParamDomain(format!(
                "order and unit must be >= 1 (n={n}, k={k})"
            )));
        }
        let side = 2 * k as u128;
        let local_bits = 128 - (side * side - 1).leading_zeros();
        let width = n.saturating_add(local_bits);
        if width > MAX_ID_WIDTH {
            return Err(Error::IdWidthExceedsField {
                width,
                limit: MAX_ID_WIDTH,
            });
        }
        Ok(Self { n, k })
    }

    /// Network order.
    pub fn order(self) -> u32 {
        self.n
    }

    /// Distribution unit.
    pub fn unit(self) -> u32 {
        self.k
    }

    /// Nodes per basic zone, `(2k)^2`.
    pub fn zone_size(self) -> u64 {
        let side = 2 * self.k as u64;
        side * side
    }

    /// Number of basic zones, `2^(n-1)`.
    pub fn zones(self) -> u64 {
        1 << (self.n - 1)
    }

    /// Network capacity `N = 2^(n-1) (2k)^2`.
    pub fn capacity(self) -> u64 {
        self.zones() * self.zone_size()
    }

    /// `ceil(lg m)`.
    pub fn local_bits(self) -> u32 {
        let m = self.zone_size();
        64 - (m - 1).leading_zeros()
    }

    /// `n + ceil(lg m)`.
    pub fn id_width(self) -> u32 {
        self.n + self.local_bits()
    }

    /// Grids of order `o` covering the network, `2^(n-o)`.
    pub fn grids_at(self, o: u32) -> u64 {
        1 << (self.n - o)
    }

    /// Nodes in one grid of order `o`, `m 2^(o-1)`.
    pub fn grid_population(self, o: u32) -> u64 {
        self.zone_size() << (o - 1)
    }

    pub fn check_order(self, o: u32) -> Result<()> {
        if (1..=self.n).contains(&o) {
            Ok(())
        } else {
            Err(Error::OrderOutOfRange { order: o, max: self.n })
        }
    }

    pub fn node(self, path: u64, local: u64) -> Result<NodeId> {
        if path >= self.zones() {
            return Err(Error::OutOfRange(format!("path {path} outside 0..{}", self.zones())));
        }
        if local == 0 || local > self.zone_size() {
            return Err(Error::OutOfRange(format!(
                "local {local} outside 1..={}",
                self.zone_size()
            )));
        }
        Ok(NodeId {
            grid: self,
            path,
            local,
        })
    }

    /// Node by dense index `path * m + (local - 1)`.
    pub fn node_at(self, index: u64) -> Result<NodeId> {
        let m = self.zone_size();
        self.node(index / m, index % m + 1)
    }

    /// All nodes in index order (equivalently, encoded-ID order).
    pub fn nodes(self) -> impl Iterator<Item = NodeId> {
        let m = self.zone_size();
        (0..self.capacity()).map(move |i| NodeId {
            grid: self,
            path: i / m,
            local: i % m + 1,
        })
    }

    /// Decodes an encoded ID.
    pub fn decode_id(self, value: u64) -> Result<NodeId> {
        if self.id_width() < 64 && value >> self.id_width() != 0 {
            return Err(Error::OutOfRange(format!(
                "{value} wider than {} bits",
                self.id_width()
            )));
        }
        let low = value & ((1 << self.local_bits()) - 1);
        self.node(value >> self.local_bits(), low + 1)
    }

    /// Zero-padded binary rendering of an encoded ID.
    pub fn format_binary(self, value: u64) -> String {
        format!("{:0width$b}", value, width = self.id_width() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    grid: GridParams,
    path: u64,
    local: u64,
}

impl NodeId {
    pub fn grid(self) -> GridParams {
        self.grid
    }

    pub fn path(self) -> u64 {
        self.path
    }

    pub fn local(self) -> u64 {
        self.local
    }

    pub fn index(self) -> u64 {
        self.path * self.grid.zone_size() + self.local - 1
    }

    pub fn encode(self) -> u64 {
        (self.path << self.grid.local_bits()) | (self.local - 1)
    }

    /// Which grid of order `o` contains this node: `path >> (o-1)`.
    pub fn grid_index(self, o: u32) -> Result<u64> {
        self.grid.check_order(o)?;
        Ok(self.path >> (o - 1))
    }

    /// Lowest order whose grid contains both nodes.
    pub fn common_order(self, other: NodeId) -> Result<u32> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let diff = self.path ^ other.path;
        Ok(1 + (64 - diff.leading_zeros()))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.encode(), self.grid.format_binary(self.encode()))
    }
}

pub fn encode_id(id: NodeId) -> u64 {
    id.encode()
}

pub fn decode_id(value: u64, grid: GridParams) -> Result<NodeId> {
    grid.decode_id(value)
}

pub fn grid_index(id: NodeId, order: u32) -> Result<u64> {
    id.grid_index(order)
}

pub fn common_order(a: NodeId, b: NodeId) -> Result<u32> {
    a.common_order(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = make_grid(3, 2).unwrap();
        assert_eq!((g.zone_size(), g.zones(), g.capacity()), (16, 4, 64));
        let g = make_grid(1, 1).unwrap();
        assert_eq!((g.zone_size(), g.zones(), g.capacity()), (4, 1, 4));
        assert_eq!(make_grid(4, 2).unwrap().capacity(), 128);
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(make_grid(0, 1), Err(Error::ParamDomain(_))));
        assert!(matches!(make_grid(1, 0), Err(Error::ParamDomain(_))));
        // 55 + ceil(lg 36) = 61 bits
        assert!(matches!(
            make_grid(55, 3),
            Err(Error::IdWidthExceedsField { width: 61, .. })
        ));
        assert!(make_grid(54, 3).is_ok());
        assert!(make_grid(3, u32::MAX).is_err());
    }

    #[test]
    fn id_widths() {
        assert_eq!(make_grid(3, 2).unwrap().id_width(), 7);
        assert_eq!(make_grid(1, 1).unwrap().id_width(), 3);
        assert_eq!(make_grid(2, 3).unwrap().local_bits(), 6);
    }

    #[test]
    fn encode_examples() {
        let g = make_grid(3, 2).unwrap();
        let id = g.node(2, 6).unwrap();
        assert_eq!(encode_id(id), 37);
        assert_eq!(g.format_binary(37), "0100101");
        assert_eq!(encode_id(g.node(0, 1).unwrap()), 0);
        assert_eq!(decode_id(37, g).unwrap(), id);
    }

    #[test]
    fn decode_errors() {
        let g = make_grid(3, 2).unwrap();
        // pad bit set
        assert!(decode_id(0b1000000, g).is_err());
        assert!(decode_id(1 << 7, g).is_err());
        // n=2, k=3: m=36 uses 6 local bits, codes 36..63 are unassigned
        let g = make_grid(2, 3).unwrap();
        assert!(decode_id(35, g).is_ok());
        assert!(decode_id(36, g).is_err());
        assert!(g.node(2, 1).is_err());
        assert!(g.node(0, 0).is_err());
        assert!(g.node(0, 37).is_err());
    }

    #[test]
    fn grid_index_examples() {
        let g = make_grid(4, 1).unwrap();
        let id = g.node(5, 1).unwrap();
        assert_eq!(grid_index(id, 2).unwrap(), 2);
        assert_eq!(grid_index(id, 4).unwrap(), 0);
        assert_eq!(grid_index(id, 1).unwrap(), 5);
        assert_eq!(grid_index(id, 0), Err(Error::OrderOutOfRange { order: 0, max: 4 }));
        assert!(grid_index(id, 5).is_err());
    }

    #[test]
    fn common_order_examples() {
        let g = make_grid(4, 1).unwrap();
        let a = g.node(5, 1).unwrap();
        assert_eq!(common_order(a, g.node(4, 2).unwrap()).unwrap(), 2);
        assert_eq!(common_order(a, g.node(0, 1).unwrap()).unwrap(), 4);
        assert_eq!(common_order(a, a).unwrap(), 1);
        let other = make_grid(4, 2).unwrap().node(5, 1).unwrap();
        assert_eq!(common_order(a, other), Err(Error::GridMismatch));
    }

    #[test]
    fn node_index_round_trip() {
        let g = make_grid(3, 1).unwrap();
        for (i, id) in g.nodes().enumerate() {
            assert_eq!(id.index(), i as u64);
            assert_eq!(g.node_at(i as u64).unwrap(), id);
        }
        assert!(g.node_at(g.capacity()).is_err());
    }
}
