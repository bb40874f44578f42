//! Target families and their independent brute-force oracles.
//!
//! Each family defines a scalar target polynomial in the entries of its
//! variable set. Oracles evaluate the defining sum literally (mod p) and are
//! kept independent of the grammar evaluator: they are the ground truth the
//! engine's discoveries are checked against.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::context::{ContextError, DimBinding, EvalContext};
use crate::descriptor::Descriptor;
use crate::grammar::{GrammarConfig, VarSpec};
use crate::matrix::ModMatrix;
use crate::modp;
use crate::shape::{Dim, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    /// sum((A A')^floor(k/2) [A]) over square A; matmul removed.
    Aat,
    /// sum((B A' [B])...) with B = A .* A; matmul removed.
    ElemAat,
    /// Elementary symmetric polynomial e_k of a vector.
    Sym,
    /// sum over binary masks v of (v' A)^k.
    Rbm1,
    /// sum over binary masks v, h of (v' A h)^k.
    Rbm2,
    /// sum(sum(A * B)) for A:(n,m), B:(m,p).
    SumAb,
    /// sum(sum((A * B)^k)) for A:(n,m), B:(m,n).
    SumAbPow,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Aat,
        Family::ElemAat,
        Family::Sym,
        Family::Rbm1,
        Family::Rbm2,
        Family::SumAb,
        Family::SumAbPow,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::Aat => "aat",
            Family::ElemAat => "elem-aat",
            Family::Sym => "sym",
            Family::Rbm1 => "rbm1",
            Family::Rbm2 => "rbm2",
            Family::SumAb => "sum-ab",
            Family::SumAbPow => "sum-abk",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.cli_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    /// The family's oracle cost bound forbids these dims.
    DimsBudget {
        family: Family,
        n: usize,
        limit: usize,
        cost: String,
    },
    BadK {
        family: Family,
        k: u32,
    },
    Context(ContextError),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::DimsBudget { family, n, limit, cost } => write!(
                f,
                "{}: oracle cost {cost} exceeds budget at n={n} (limit n<={limit})",
                family.cli_name()
            ),
            FamilyError::BadK { family, k } => {
                write!(f, "{}: unsupported k={k}", family.cli_name())
            }
            FamilyError::Context(e) => write!(f, "{e}"),
        }
    }
}

impl From<ContextError> for FamilyError {
    fn from(e: ContextError) -> FamilyError {
        FamilyError::Context(e)
    }
}

/// A concrete target: family plus degree parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetSpec {
    pub family: Family,
    pub k: u32,
    /// Use the alternate reading of the elementwise family's odd-k formula,
    /// sum((B A')^floor(k/2) B), instead of the literal sum((B A' B)^floor(k/2)).
    pub alt_odd_elem: bool,
}

impl TargetSpec {
    pub fn new(family: Family, k: u32) -> TargetSpec {
        TargetSpec {
            family,
            k,
            alt_odd_elem: false,
        }
    }

    pub fn target_id(&self) -> String {
        match self.family {
            Family::SumAb => String::from("sum-ab"),
            f => format!("{}:k={}", f.cli_name(), self.k),
        }
    }

    /// Tree degree a matching expression must have (total variable leaves).
    pub fn tree_degree(&self) -> u32 {
        let k = self.k;
        match self.family {
            Family::Aat | Family::Sym | Family::Rbm1 | Family::Rbm2 => k,
            Family::ElemAat => {
                if k % 2 == 0 {
                    3 * (k / 2)
                } else if self.alt_odd_elem {
                    3 * (k / 2) + 2
                } else {
                    5 * (k / 2)
                }
            }
            Family::SumAb => 2,
            Family::SumAbPow => 2 * k,
        }
    }

    /// The searchable grammar for this target. The two square AAT families
    /// drop the matrix-matrix multiply rule.
    pub fn grammar_config(&self) -> GrammarConfig {
        let deg = self.tree_degree();
        match self.family {
            Family::Aat | Family::ElemAat => {
                GrammarConfig::single("A", Shape::new(Dim::N, Dim::N), deg).with_matmul(false)
            }
            Family::Rbm2 => GrammarConfig::single("A", Shape::new(Dim::N, Dim::N), deg),
            Family::Sym | Family::Rbm1 => {
                GrammarConfig::single("A", Shape::new(Dim::N, Dim::One), deg)
            }
            Family::SumAb => GrammarConfig::new(vec![
                VarSpec::new("A", Shape::new(Dim::N, Dim::M), 1),
                VarSpec::new("B", Shape::new(Dim::M, Dim::P), 1),
            ]),
            Family::SumAbPow => GrammarConfig::new(vec![
                VarSpec::new("A", Shape::new(Dim::N, Dim::M), self.k),
                VarSpec::new("B", Shape::new(Dim::M, Dim::N), self.k),
            ]),
        }
    }

    /// Fingerprinting dims: n=m=5 for square/vector families, distinct
    /// rectangular (3,4,5) for the two-matrix targets so transposition bugs
    /// surface.
    pub fn default_dims(&self) -> DimBinding {
        match self.family {
            Family::SumAb | Family::SumAbPow => DimBinding::new(3, 4, 5),
            _ => DimBinding::square(5),
        }
    }

    pub fn check_budget(&self, dims: DimBinding) -> Result<(), FamilyError> {
        let n = dims.n;
        match self.family {
            Family::Rbm1 if n > 15 => Err(FamilyError::DimsBudget {
                family: self.family,
                n,
                limit: 15,
                cost: String::from("2^n masks"),
            }),
            Family::Rbm2 if n > 7 => Err(FamilyError::DimsBudget {
                family: self.family,
                n,
                limit: 7,
                cost: String::from("2^(2n) mask pairs"),
            }),
            Family::Aat | Family::ElemAat if self.k < 2 => Err(FamilyError::BadK {
                family: self.family,
                k: self.k,
            }),
            _ => Ok(()),
        }
    }

    /// Exact target descriptor: the family's defining sum evaluated by its
    /// oracle on every copy of the context.
    pub fn target_descriptor(&self, ctx: &EvalContext) -> Result<Descriptor, FamilyError> {
        self.check_budget(ctx.dims())?;
        let p = ctx.prime();
        let mut values = Vec::with_capacity(ctx.n_copies());
        for copy in 0..ctx.n_copies() {
            let v = match self.family {
                Family::Aat => aat_oracle(ctx.var_matrix(0, copy), self.k, false, false, p),
                Family::ElemAat => {
                    aat_oracle(ctx.var_matrix(0, copy), self.k, true, self.alt_odd_elem, p)
                }
                Family::Sym => sym_oracle(column(ctx.var_matrix(0, copy)), self.k, p),
                Family::Rbm1 => rbm1_oracle(column(ctx.var_matrix(0, copy)), self.k, p),
                Family::Rbm2 => rbm2_oracle(ctx.var_matrix(0, copy), self.k, p),
                Family::SumAb => {
                    sum_ab_pow_oracle(ctx.var_matrix(0, copy), ctx.var_matrix(1, copy), 1, p)
                }
                Family::SumAbPow => {
                    sum_ab_pow_oracle(ctx.var_matrix(0, copy), ctx.var_matrix(1, copy), self.k, p)
                }
            };
            values.push(v);
        }
        Ok(Descriptor::new(values, ctx.id()))
    }
}

fn column(m: &ModMatrix) -> &[u64] {
    debug_assert_eq!(m.cols, 1);
    m.data()
}

fn ones_row(n: usize) -> ModMatrix {
    let mut m = ModMatrix::zeros(1, n);
    for j in 0..n {
        m.set(0, j, 1);
    }
    m
}

/// Naive chain oracle for the two square families.
///
/// `elementwise_first = false`: sum((A A')^(k/2)) for even k and
/// sum((A A')^floor(k/2) A) for odd k. `elementwise_first = true` sets
/// B = A .* A and computes sum((B A')^(k/2)) for even k; odd k follows the
/// literal formula sum((B A' B)^floor(k/2)) unless `alt_odd` selects
/// sum((B A')^floor(k/2) B).
pub fn aat_oracle(a: &ModMatrix, k: u32, elementwise_first: bool, alt_odd: bool, p: u64) -> u64 {
    debug_assert_eq!(a.rows, a.cols);
    let at = a.transpose();
    let b = if elementwise_first {
        a.elem_mul(a, p)
    } else {
        a.clone()
    };
    let half = k / 2;
    let mut u = ones_row(a.rows);
    if k % 2 == 0 {
        for _ in 0..half {
            u = u.matmul(&b, p);
            u = u.matmul(&at, p);
        }
    } else if !elementwise_first {
        for _ in 0..half {
            u = u.matmul(&b, p);
            u = u.matmul(&at, p);
        }
        u = u.matmul(&b, p);
    } else if alt_odd {
        for _ in 0..half {
            u = u.matmul(&b, p);
            u = u.matmul(&at, p);
        }
        u = u.matmul(&b, p);
    } else {
        for _ in 0..half {
            u = u.matmul(&b, p);
            u = u.matmul(&at, p);
            u = u.matmul(&b, p);
        }
    }
    u.total(p)
}

/// e_k(A) mod p via the truncated generating product prod_i (1 + A_i x).
/// O(nk), independent of the engine under test. k > n yields 0 (no
/// k-subsets); k = 0 yields 1.
pub fn sym_oracle(a: &[u64], k: u32, p: u64) -> u64 {
    let k = k as usize;
    let mut coeff = vec![0u64; k + 1];
    coeff[0] = 1 % p;
    for &ai in a {
        for j in (1..=k.min(coeff.len() - 1)).rev() {
            let add = modp::mul(coeff[j - 1], ai, p);
            coeff[j] = modp::add(coeff[j], add, p);
        }
    }
    coeff[k]
}

/// Literal enumeration of all 2^n binary masks v, accumulating (v' A)^k.
pub fn rbm1_oracle(a: &[u64], k: u32, p: u64) -> u64 {
    let n = a.len();
    debug_assert!(n <= 24, "mask enumeration blow-up");
    let mut acc = 0u64;
    // Gray-code walk: dot product changes by one coordinate per step.
    let mut dot = 0u64;
    let mut prev = 0u64;
    for i in 0..(1u64 << n) {
        let gray = i ^ (i >> 1);
        let flipped = gray ^ prev;
        if flipped != 0 {
            let bit = flipped.trailing_zeros() as usize;
            if gray & flipped != 0 {
                dot = modp::add(dot, a[bit], p);
            } else {
                dot = modp::sub(dot, a[bit], p);
            }
        }
        prev = gray;
        acc = modp::add(acc, modp::pow(dot, k as u64, p), p);
    }
    acc
}

/// Literal enumeration of all mask pairs (v, h), accumulating (v' A h)^k.
pub fn rbm2_oracle(a: &ModMatrix, k: u32, p: u64) -> u64 {
    let n = a.rows;
    debug_assert_eq!(a.rows, a.cols);
    debug_assert!(2 * n <= 28, "mask enumeration blow-up");
    // row combinations r_v = v' A for every v, built incrementally
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(1 << n);
    rows.push(vec![0u64; n]);
    for v in 1usize..(1 << n) {
        let bit = v.trailing_zeros() as usize;
        let base = &rows[v & (v - 1)];
        let mut r = Vec::with_capacity(n);
        for j in 0..n {
            r.push(modp::add(base[j], a.get(bit, j), p));
        }
        rows.push(r);
    }
    let mut acc = 0u64;
    for rv in &rows {
        for h in 0usize..(1 << n) {
            let mut dot = 0u64;
            let mut hh = h;
            while hh != 0 {
                let bit = hh.trailing_zeros() as usize;
                dot = modp::add(dot, rv[bit], p);
                hh &= hh - 1;
            }
            acc = modp::add(acc, modp::pow(dot, k as u64, p), p);
        }
    }
    acc
}

/// sum of all entries of (A B)^k computed as a vector chain, O(k n m).
pub fn sum_ab_pow_oracle(a: &ModMatrix, b: &ModMatrix, k: u32, p: u64) -> u64 {
    let mut u = ones_row(a.rows);
    for _ in 0..k {
        u = u.matmul(a, p);
        u = u.matmul(b, p);
    }
    u.total(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 101;

    #[test]
    fn aat_k2_concrete() {
        // A=[[1,2],[3,4]]: sum(A A') = sum([[5,11],[11,25]]) = 52
        let a = ModMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(aat_oracle(&a, 2, false, false, P), 52);
    }

    #[test]
    fn aat_k3_identity_matrix() {
        // A = I: sum(A A' A) = sum(I) = 2
        let a = ModMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(aat_oracle(&a, 3, false, false, P), 2);
    }

    #[test]
    fn elem_aat_k2_concrete() {
        // B = A.*A = [[1,4],[9,16]]; B A' = [[9,19],[41,91]]; sum = 160
        let a = ModMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(aat_oracle(&a, 2, true, false, 1009), 160);
    }

    #[test]
    fn elem_aat_odd_readings_differ() {
        let a = ModMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        let literal = aat_oracle(&a, 3, true, false, 1_000_003);
        let alt = aat_oracle(&a, 3, true, true, 1_000_003);
        // literal is (B A' B)^1: degree 5; alt is (B A')^1 B: also ends in B
        // but with one fewer block; they are genuinely different polynomials
        assert_eq!(literal, alt, "k=3 blocks coincide: B A' B both ways");
        let lit5 = aat_oracle(&a, 5, true, false, 1_000_003);
        let alt5 = aat_oracle(&a, 5, true, true, 1_000_003);
        assert_ne!(lit5, alt5, "k=5: (BA'B)^2 vs (BA')^2 B must differ");
    }

    #[test]
    fn sym_small_cases() {
        assert_eq!(sym_oracle(&[1, 2, 3], 2, P), 11); // 1*2 + 1*3 + 2*3
        assert_eq!(sym_oracle(&[1, 2, 3], 3, P), 6); // 1*2*3
        assert_eq!(sym_oracle(&[1, 2, 3], 1, P), 6); // sum
        assert_eq!(sym_oracle(&[1, 2, 3], 4, P), 0); // k > n
        assert_eq!(sym_oracle(&[5, 7], 0, P), 1);
    }

    #[test]
    fn rbm1_small_cases() {
        // n=2, A=[1,1], k=2: 0 + 1 + 1 + 4 = 6
        assert_eq!(rbm1_oracle(&[1, 1], 2, P), 6);
        // k=1 closed form 2^(n-1) * sum(A): A=[3,4] -> 2*(7) = 14
        assert_eq!(rbm1_oracle(&[3, 4], 1, P), 14);
        // k=0: every mask contributes 1 -> 2^n
        assert_eq!(rbm1_oracle(&[9, 2, 4], 0, P), 8);
    }

    #[test]
    fn rbm2_small_cases() {
        // n=1, k=1: only v=h=1 contributes -> a
        let a = ModMatrix::from_rows(&[&[42]]);
        assert_eq!(rbm2_oracle(&a, 1, P), 42);
        // n=2, k=1 by hand: sum over v,h of v'Ah = (sum over v of v')A(sum over h of h)
        // = (2^(n-1))^2 * sum(A) = 4 * sum(A)
        let a = ModMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(rbm2_oracle(&a, 1, P), (4 * 10) % P);
    }

    #[test]
    fn sum_ab_matches_direct() {
        let a = ModMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        let b = ModMatrix::from_rows(&[&[5, 6], &[7, 8]]);
        let ab = a.matmul(&b, P);
        assert_eq!(sum_ab_pow_oracle(&a, &b, 1, P), ab.total(P));
        let abab = ab.matmul(&ab, P);
        assert_eq!(sum_ab_pow_oracle(&a, &b, 2, P), abab.total(P));
    }

    #[test]
    fn tree_degrees() {
        assert_eq!(TargetSpec::new(Family::Aat, 4).tree_degree(), 4);
        assert_eq!(TargetSpec::new(Family::ElemAat, 2).tree_degree(), 3);
        assert_eq!(TargetSpec::new(Family::ElemAat, 4).tree_degree(), 6);
        assert_eq!(TargetSpec::new(Family::ElemAat, 3).tree_degree(), 5);
        assert_eq!(TargetSpec::new(Family::SumAbPow, 6).tree_degree(), 12);
        assert_eq!(TargetSpec::new(Family::SumAb, 1).tree_degree(), 2);
    }

    #[test]
    fn budgets_enforced() {
        let spec = TargetSpec::new(Family::Rbm2, 2);
        assert!(spec.check_budget(DimBinding::square(8)).is_err());
        assert!(spec.check_budget(DimBinding::square(5)).is_ok());
        let spec = TargetSpec::new(Family::Rbm1, 2);
        assert!(spec.check_budget(DimBinding::square(16)).is_err());
    }

    #[test]
    fn matmul_removed_for_square_families() {
        assert!(!TargetSpec::new(Family::Aat, 2).grammar_config().allow_matmul);
        assert!(!TargetSpec::new(Family::ElemAat, 2).grammar_config().allow_matmul);
        assert!(TargetSpec::new(Family::Rbm2, 2).grammar_config().allow_matmul);
    }
}
