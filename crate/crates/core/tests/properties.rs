use proptest::prelude::*;

use hgbs_core::field::{field_arith, lagrange_interpolate, ArithOp, FieldElement};
use hgbs_core::polynomial::{eval_bivar, recover_from_shares, SymBivarPoly};
use hgbs_core::rng::sub_rng;
use hgbs_core::{assign_keying_material, make_grid, DegreePolicy, Error, FieldModulus, PolicyKind, UniPoly};

const SMALL_PRIMES: [u64; 6] = [2, 3, 7, 13, 101, 65_537];

fn q61() -> FieldModulus {
    FieldModulus::default()
}

fn elem() -> impl Strategy<Value = u64> {
    0..FieldModulus::MERSENNE_61
}

proptest! {
    #[test]
    fn field_laws(a in elem(), b in elem(), c in elem()) {
        let q = q61();
        let (a, b, c) = (q.element(a), q.element(b), q.element(c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a + q.zero(), a);
        prop_assert_eq!(a * q.one(), a);
        prop_assert_eq!(a + (-a), q.zero());
        prop_assert_eq!(a - b + b, a);
        if !a.is_zero() {
            prop_assert_eq!(a * a.inverse().unwrap(), q.one());
            prop_assert_eq!(field_arith(b, a, ArithOp::InvMul).unwrap() * a, b);
        } else {
            prop_assert_eq!(a.inverse(), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn wide_products_match_u128(a in elem(), b in elem()) {
        let q = q61();
        let expected = (a as u128 * b as u128 % q.value() as u128) as u64;
        prop_assert_eq!((q.element(a) * q.element(b)).value(), expected);
    }

    #[test]
    fn interpolation_round_trip(coeffs in prop::collection::vec(elem(), 1..10), start in 0u64..1_000_000) {
        let q = q61();
        let p = UniPoly::from_values(q, &coeffs).unwrap();
        let points: Vec<_> = (0..coeffs.len() as u64)
            .map(|i| {
                let x = q.element(start + 3 * i);
                (x, p.eval(x).unwrap())
            })
            .collect();
        let back = lagrange_interpolate(&points).unwrap();
        prop_assert_eq!(back.coeffs(), p.coeffs());
    }

    #[test]
    fn key_symmetry(t in 0usize..8, seed in any::<u64>(), a in elem(), b in elem()) {
        let q = q61();
        let f = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[]));
        let (x, y) = (q.element(a), q.element(b));
        let kxy = f.share(x).unwrap().key_with(y).unwrap();
        prop_assert_eq!(kxy, f.share(y).unwrap().key_with(x).unwrap());
        prop_assert_eq!(kxy, eval_bivar(&f, x, y).unwrap());
    }

    #[test]
    fn recovery_from_any_t_plus_one_of_t_plus_two(t in 0usize..7, seed in any::<u64>(), drop in 0usize..9) {
        let q = q61();
        let f = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[1]));
        let mut shares: Vec<_> = (0..t as u64 + 2).map(|i| f.share(q.element(11 + i)).unwrap()).collect();
        prop_assert_eq!(recover_from_shares(&shares, t).unwrap(), f.clone());
        shares.remove(drop % (t + 2));
        prop_assert_eq!(recover_from_shares(&shares, t).unwrap(), f);
    }

    #[test]
    fn t_shares_are_insufficient(t in 1usize..7, seed in any::<u64>()) {
        let q = q61();
        let f = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[2]));
        let shares: Vec<_> = (0..t as u64).map(|i| f.share(q.element(5 + i)).unwrap()).collect();
        let is_insufficient = matches!(
            recover_from_shares(&shares, t),
            Err(Error::InsufficientShares { .. })
        );
        prop_assert!(is_insufficient);
    }

    #[test]
    fn mixed_shares_are_rejected(t in 1usize..6, seed in any::<u64>()) {
        let q = q61();
        let f = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[3]));
        let g = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[4]));
        prop_assume!(f != g);
        let mut shares: Vec<_> = (0..t as u64 + 2).map(|i| f.share(q.element(20 + i)).unwrap()).collect();
        let last = shares.len() - 1;
        shares[last] = g.share(q.element(20 + last as u64)).unwrap();
        prop_assert!(recover_from_shares(&shares, t).is_err());
    }

    /// With `t` shares known, the key of an outside pair is uniform: every
    /// value is produced by the same number of consistent polynomials.
    #[test]
    fn small_field_secrecy(qi in 1usize..3, seed in any::<u64>()) {
        let q = FieldModulus::new(SMALL_PRIMES[qi]).unwrap();
        let t = 1;
        let f = SymBivarPoly::random(t, q, &mut sub_rng(seed, &[5]));
        let known = f.share(q.element(0)).unwrap();
        let (x, y) = (q.element(1), q.element(2));
        let mut counts = vec![0u64; q.value() as usize];
        let p = q.value();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let cand = SymBivarPoly::from_upper(t, q, vec![a, b, c]).unwrap();
                    if cand.share(q.element(0)).unwrap() == known {
                        counts[eval_bivar(&cand, x, y).unwrap().value() as usize] += 1;
                    }
                }
            }
        }
        prop_assert!(counts.iter().all(|&c| c == counts[0] && c > 0), "{:?}", counts);
    }

    #[test]
    fn common_order_brute_force(n in 1u32..=5, k in 1u32..=2, a in any::<u64>(), b in any::<u64>()) {
        let g = make_grid(n, k).unwrap();
        let (ia, ib) = (g.node_at(a % g.capacity()).unwrap(), g.node_at(b % g.capacity()).unwrap());
        let brute = (1..=n).find(|&o| ia.grid_index(o).unwrap() == ib.grid_index(o).unwrap()).unwrap();
        prop_assert_eq!(ia.common_order(ib).unwrap(), brute);
        prop_assert_eq!(ib.common_order(ia).unwrap(), brute);
        prop_assert_eq!(ia.grid_index(n).unwrap(), 0);
    }

    #[test]
    fn ultrametric(a in 0u64..64, b in 0u64..64, c in 0u64..64) {
        let g = make_grid(3, 2).unwrap();
        let (x, y, z) = (g.node_at(a).unwrap(), g.node_at(b).unwrap(), g.node_at(c).unwrap());
        let xy = x.common_order(y).unwrap();
        prop_assert!(xy <= x.common_order(z).unwrap().max(z.common_order(y).unwrap()));
    }

    #[test]
    fn keys_agree_in_random_deployments(n in 1u32..=4, k in 1u32..=2, seed in any::<u64>(), doubling in any::<bool>(), a in any::<u64>(), b in any::<u64>()) {
        let grid = make_grid(n, k).unwrap();
        let kind = if doubling { PolicyKind::Doubling } else { PolicyKind::Flat };
        let policy = DegreePolicy::new(kind, 0.3, grid.zone_size()).unwrap();
        let dep = assign_keying_material(grid, policy, q61(), seed).unwrap();
        let (i, j) = (grid.node_at(a % grid.capacity()).unwrap(), grid.node_at(b % grid.capacity()).unwrap());
        if i == j {
            prop_assert_eq!(dep.establish_key(i, j), Err(Error::SameNode));
        } else {
            let o = i.common_order(j).unwrap();
            let oracle = eval_bivar(dep.authority_polynomial(o, i.grid_index(o).unwrap()).unwrap(), dep.id_element(i), dep.id_element(j)).unwrap();
            prop_assert_eq!(dep.establish_key(i, j).unwrap(), oracle);
            prop_assert_eq!(dep.establish_key(j, i).unwrap(), oracle);
        }
    }
}

#[test]
fn orders_partition_the_pairs() {
    for (n, k) in [(1, 1), (3, 1), (4, 1), (3, 2)] {
        let g = make_grid(n, k).unwrap();
        let m = g.zone_size();
        let nodes: Vec<_> = g.nodes().collect();
        let mut per_order = vec![0u64; n as usize];
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                per_order[a.common_order(*b).unwrap() as usize - 1] += 1;
            }
        }
        let total: u64 = per_order.iter().sum();
        assert_eq!(total, g.capacity() * (g.capacity() - 1) / 2);
        assert_eq!(per_order[0], g.zones() * m * (m - 1) / 2);
        for o in 2..=n {
            let half = g.grid_population(o - 1);
            assert_eq!(per_order[o as usize - 1], g.grids_at(o) * half * half);
        }
    }
}

#[test]
fn ids_are_injective_and_fit() {
    for (n, k) in [(1, 1), (2, 3), (4, 2), (5, 1)] {
        let g = make_grid(n, k).unwrap();
        let mut ids: Vec<u64> = g.nodes().map(|id| id.encode()).collect();
        assert!(ids.iter().all(|&v| v < 1 << (g.id_width() - 1)));
        for (i, id) in g.nodes().enumerate() {
            assert_eq!(g.decode_id(ids[i]).unwrap(), id);
        }
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len() as u64, g.capacity());
    }
}

#[test]
fn elements_from_other_fields_do_not_mix() {
    let a = FieldModulus::new(7).unwrap().element(3);
    let b = FieldModulus::new(13).unwrap().element(3);
    assert!(matches!(
        a.checked_add(b),
        Err(Error::ModulusMismatch { left: 7, right: 13 })
    ));
    let _: FieldElement = a;
}
