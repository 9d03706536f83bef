use num_bigint::BigInt;
use num_traits::Zero;

use super::{BigRational, TrafficModel};
use crate::error::{Error, Result};
use crate::keying::{base_degree, DegreePolicy};
use crate::topology::GridParams;

/// Per-node memory model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryModel {
    /// ID plus `n` shares of degree `t0`.
    M1,
    /// ID plus shares whose sizes double per order, `(2^n - 1)` base shares.
    M2,
    /// Geometric series in the top-order degree, closed form as published
    /// (it sums `n + 1` terms).
    M3,
    /// The same series summed over its `n` terms.
    M3Exact,
}

impl MemoryModel {
    pub const ALL: [MemoryModel; 4] = [MemoryModel::M1, MemoryModel::M2, MemoryModel::M3, MemoryModel::M3Exact];

    pub fn name(self) -> &'static str {
        match self {
            MemoryModel::M1 => "M1",
            MemoryModel::M2 => "M2",
            MemoryModel::M3 => "M3",
            MemoryModel::M3Exact => "M3_EXACT",
        }
    }
}

impl std::str::FromStr for MemoryModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "M1" => Ok(MemoryModel::M1),
            "M2" => Ok(MemoryModel::M2),
            "M3" => Ok(MemoryModel::M3),
            "M3_EXACT" | "M3EXACT" => Ok(MemoryModel::M3Exact),
            _ => Err(Error::ParamDomain(format!(
                "memory model {s:?} (expected M1|M2|M3|M3_EXACT)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryCost {
    /// Real-valued evaluation with `alpha N / 2^(n-1)` as the degree.
    pub bits: f64,
    /// Integer evaluation with `t0 = max(1, floor(alpha m))`.
    pub bits_exact: u64,
}

/// Memory per node in bits for `N` nodes, order `n`, security parameter
/// `alpha` and `lg_q`-bit coefficients.
pub fn memory_cost(nodes: u64, n: u32, alpha: f64, lg_q: u32, model: MemoryModel) -> Result<MemoryCost> {
    if n == 0 || n > 40 {
        return Err(Error::ParamDomain(format!("order {n} outside 1..=40")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::ParamDomain(format!("alpha {alpha} outside (0, 1]")));
    }
    let zones = 1u64 << (n - 1);
    if nodes < zones {
        return Err(Error::ParamDomain(format!("{nodes} nodes cannot fill {zones} zones")));
    }
    let lg_q_f = lg_q as f64;
    let m_real = nodes as f64 / zones as f64;
    let id_real = n as f64 + m_real.log2().ceil();
    let share_real = (alpha * m_real + 1.0) * lg_q_f;
    let top_real = alpha * nodes as f64 * lg_q_f;
    let half_pow = 0.5f64.powi(n as i32);

    let m_int = nodes / zones;
    let t0 = base_degree(alpha, m_int) as u128;
    let id_int = n as u128
        + if m_int <= 1 {
            0
        } else {
            64 - (m_int - 1).leading_zeros()
        } as u128;
    let share_int = (t0 + 1) * lg_q as u128;
    let top_int = t0 * lg_q as u128;
    let two_n = 1u128 << n;

    let (bits, exact) = match model {
        MemoryModel::M1 => (id_real + n as f64 * share_real, id_int + n as u128 * share_int),
        MemoryModel::M2 => (
            id_real + (two_n as f64 - 1.0) * share_real,
            id_int + (two_n - 1) * share_int,
        ),
        // top * (1 - 2^-(n+1)) / (1/2) = top * (2 - 2^-n); with top = 2^(n-1) t0
        // the exact value is t0 lgq (2^n - 1/2), rounded up.
        MemoryModel::M3 => (top_real * (2.0 - half_pow), top_int * two_n - top_int / 2),
        MemoryModel::M3Exact => (top_real * 2.0 * (1.0 - half_pow), top_int * (two_n - 1)),
    };
    let bits_exact = u64::try_from(exact).map_err(|_| Error::ParamDomain("memory exceeds 64-bit range".into()))?;
    Ok(MemoryCost { bits, bits_exact })
}

/// Bits exchanged to set up a key: the peer's structured ID.
pub fn communication_bits(grid: GridParams) -> u32 {
    grid.id_width()
}

/// Word multiplications per `GF(q)` multiplication on an 8-bit platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordMult {
    /// Long multiplication of two 64-bit operands.
    Schoolbook64,
    /// Karatsuba-Ofman on two 64-bit operands.
    Karatsuba64,
    /// A 16-bit by 64-bit product.
    Mixed16x64,
}

impl WordMult {
    pub fn per_field_mult(self) -> u64 {
        match self {
            WordMult::Schoolbook64 => 64,
            WordMult::Karatsuba64 => 27,
            WordMult::Mixed16x64 => 16,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WordMult::Schoolbook64 => "schoolbook_64",
            WordMult::Karatsuba64 => "karatsuba_64",
            WordMult::Mixed16x64 => "mixed_16x64",
        }
    }
}

impl std::str::FromStr for WordMult {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schoolbook_64" | "schoolbook" => Ok(WordMult::Schoolbook64),
            "karatsuba_64" | "karatsuba" => Ok(WordMult::Karatsuba64),
            "mixed_16x64" | "mixed" => Ok(WordMult::Mixed16x64),
            _ => Err(Error::ParamDomain(format!(
                "word multiplication {s:?} (expected schoolbook_64|karatsuba_64|mixed_16x64)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    /// Cost of comparing two path strings, in field multiplications.
    pub comparison_cost: u64,
    pub word_mult: WordMult,
}

impl CostModel {
    /// Evaluating a degree-`t` share counts `2t` multiplications: `t`
    /// products plus `t` additions weighted as one product each.
    pub fn mults_per_eval(t: usize) -> u64 {
        2 * t as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputeCost {
    pub field_mults: BigRational,
    pub word_mults: BigRational,
}

/// Expected multiplications per key setup: `sum_i p_i 2 t_i + c`.
pub fn compute_cost(policy: &DegreePolicy, traffic: &TrafficModel, cost: &CostModel) -> ComputeCost {
    let eval = (1..=traffic.order()).fold(BigRational::zero(), |acc, i| {
        let mults = CostModel::mults_per_eval(policy.degree_at(i));
        acc + traffic.weight(i).expect("order in range") * BigInt::from(mults)
    });
    let field_mults = eval + BigRational::from_integer(BigInt::from(cost.comparison_cost));
    let word_mults = &field_mults * BigInt::from(cost.word_mult.per_field_mult());
    ComputeCost {
        field_mults,
        word_mults,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ctf_weights, ratio};
    use crate::keying::PolicyKind;
    use crate::topology::make_grid;

    #[test]
    fn memory_examples() {
        let m1 = memory_cost(64, 3, 0.6, 61, MemoryModel::M1).unwrap();
        assert_eq!(m1.bits_exact, 1837);
        assert!((m1.bits - 1946.8).abs() < 1e-9, "{}", m1.bits);

        let m2 = memory_cost(64, 3, 0.6, 61, MemoryModel::M2).unwrap();
        // 7 + 7 * 10 * 61
        assert_eq!(m2.bits_exact, 4277);
        assert!((m2.bits - (7.0 + 7.0 * 10.6 * 61.0)).abs() < 1e-9);

        // top degree 4 * 9 = 36; exact M3 = ceil(9 * 61 * 7.5), M3_EXACT = 9 * 61 * 7
        let m3 = memory_cost(64, 3, 0.6, 61, MemoryModel::M3).unwrap();
        assert_eq!(m3.bits_exact, 4118);
        assert!((m3.bits - 0.6 * 64.0 * 61.0 * 1.875).abs() < 1e-9);
        let m3e = memory_cost(64, 3, 0.6, 61, MemoryModel::M3Exact).unwrap();
        assert_eq!(m3e.bits_exact, 3843);
        assert!((m3e.bits - 0.6 * 64.0 * 61.0 * 1.75).abs() < 1e-9);
    }

    #[test]
    fn memory_domain() {
        assert!(memory_cost(3, 3, 0.6, 61, MemoryModel::M1).is_err());
        assert!(memory_cost(64, 0, 0.6, 61, MemoryModel::M1).is_err());
        assert!(memory_cost(64, 3, 0.0, 61, MemoryModel::M1).is_err());
        assert_eq!("m3_exact".parse::<MemoryModel>().unwrap(), MemoryModel::M3Exact);
    }

    #[test]
    fn communication() {
        assert_eq!(communication_bits(make_grid(3, 2).unwrap()), 7);
    }

    #[test]
    fn compute_examples() {
        let cost = CostModel {
            comparison_cost: 1,
            word_mult: WordMult::Karatsuba64,
        };
        let dbl = DegreePolicy::with_base_degree(PolicyKind::Doubling, 9);
        let r = compute_cost(&dbl, &ctf_weights(2).unwrap(), &cost);
        assert_eq!(r.field_mults, ratio(25, 1));
        assert_eq!(r.word_mults, ratio(675, 1));

        let flat = DegreePolicy::with_base_degree(PolicyKind::Flat, 9);
        let zero_c = CostModel {
            comparison_cost: 0,
            ..cost
        };
        assert_eq!(
            compute_cost(&flat, &ctf_weights(1).unwrap(), &zero_c).field_mults,
            ratio(18, 1)
        );
    }

    #[test]
    fn word_mult_constants() {
        let got: Vec<u64> = [WordMult::Schoolbook64, WordMult::Karatsuba64, WordMult::Mixed16x64]
            .iter()
            .map(|w| w.per_field_mult())
            .collect();
        assert_eq!(got, [64, 27, 16]);
    }
}
