//! Grammar configuration: the variable set, rule toggles and enumeration
//! conventions.

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{Expr, Rejection, Rule};
use crate::shape::{Dim, Shape};

/// One grammar variable with the exact number of times a completed tree must
/// use it.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarSpec {
    pub name: String,
    pub shape: Shape,
    pub count: u32,
}

impl VarSpec {
    pub fn new(name: &str, shape: Shape, count: u32) -> VarSpec {
        VarSpec {
            name: String::from(name),
            shape,
            count,
        }
    }
}

/// Structural conventions for exhaustive enumeration. These pin down an
/// otherwise infinite space (unary chains like transpose-of-transpose or
/// sum-of-repeat scalings never terminate on their own).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnumConventions {
    /// Unary closure rounds applied after each binary combination level.
    pub unary_rounds: u8,
    /// Ban ColSum/RowSum directly on a repeat node (these only produce
    /// dimension-scaled copies n*x of existing values).
    pub ban_sum_of_repeat: bool,
    /// Ban repeats of scalars to row/column shapes (keep only ElemRepeat for
    /// scalars); repeats of proper vectors are unaffected.
    pub strict_scalar_repeat: bool,
    /// Dedup pools by descriptor value during the bottom-up sweep. When
    /// false, pools are keyed by canonical string (structural identity).
    pub value_pools: bool,
}

impl Default for EnumConventions {
    fn default() -> Self {
        EnumConventions {
            unary_rounds: 2,
            ban_sum_of_repeat: true,
            strict_scalar_repeat: false,
            value_pools: true,
        }
    }
}

/// Configuration of the searchable grammar for one target.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrammarConfig {
    pub variables: Vec<VarSpec>,
    /// When false, the MatMul rule is removed; MatVecMul stays.
    pub allow_matmul: bool,
    /// Per-node cost cap as a total monomial degree (e.g. 2 for the O(n^2)
    /// class). `None` leaves the grammar's natural ceiling.
    pub complexity_cap: Option<u8>,
    pub conventions: EnumConventions,
}

impl GrammarConfig {
    pub fn new(variables: Vec<VarSpec>) -> GrammarConfig {
        GrammarConfig {
            variables,
            allow_matmul: true,
            complexity_cap: None,
            conventions: EnumConventions::default(),
        }
    }

    pub fn single(name: &str, shape: Shape, count: u32) -> GrammarConfig {
        GrammarConfig::new(alloc::vec![VarSpec::new(name, shape, count)])
    }

    pub fn with_matmul(mut self, allow: bool) -> GrammarConfig {
        self.allow_matmul = allow;
        self
    }

    pub fn with_complexity_cap(mut self, cap: Option<u8>) -> GrammarConfig {
        self.complexity_cap = cap;
        self
    }

    /// Total degree a completed tree must have: the sum of per-variable
    /// counts.
    pub fn target_degree(&self) -> u32 {
        self.variables.iter().map(|v| v.count).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn leaf(&self, index: usize) -> Expr {
        let v = &self.variables[index];
        Expr::var(index, &v.name, v.shape)
    }

    /// Dimensions usable as repeat targets: every symbolic dimension that
    /// occurs in the variable set. Tying targets to the variable shapes keeps
    /// the grammar finite.
    pub fn repeat_dims(&self) -> Vec<Dim> {
        let mut dims = Vec::new();
        for v in &self.variables {
            for d in [v.shape.rows, v.shape.cols] {
                if !d.is_one() && !dims.contains(&d) {
                    dims.push(d);
                }
            }
        }
        dims.sort();
        dims
    }

    /// Config-level gate on a candidate node: rule toggles plus the
    /// complexity cap. Shape checking happens in `Expr::apply`.
    pub fn admit(&self, e: &Expr) -> Result<(), Rejection> {
        if !self.allow_matmul && e.rule() == Rule::MatMul {
            return Err(Rejection::MatMulDisabled);
        }
        if let Some(cap) = self.complexity_cap {
            let deg = e.complexity().total_degree();
            if deg > cap {
                return Err(Rejection::ComplexityExceeded { degree: deg, cap });
            }
        }
        let max = self.target_degree();
        if e.degree() > max {
            return Err(Rejection::DegreeExceeded {
                degree: e.degree(),
                max,
            });
        }
        Ok(())
    }

    /// Build a node and admit it in one step.
    pub fn build(
        &self,
        rule: Rule,
        children: &[Expr],
        repeat: Option<(Dim, Dim)>,
    ) -> Result<Expr, Rejection> {
        let e = Expr::apply(rule, children, repeat)?;
        self.admit(&e)?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(k: u32) -> GrammarConfig {
        GrammarConfig::single("A", Shape::new(Dim::N, Dim::N), k)
    }

    #[test]
    fn degree_cap_rejects() {
        let cfg = square(2);
        let a = cfg.leaf(0);
        let d2 = cfg.build(Rule::ElemMul, &[a.clone(), a.clone()], None).unwrap();
        // degree 3 > cap 2
        let r = cfg.build(Rule::ElemMul, &[d2, a], None);
        assert!(matches!(r, Err(Rejection::DegreeExceeded { .. })));
    }

    #[test]
    fn matmul_toggle() {
        let cfg = square(2).with_matmul(false);
        let a = cfg.leaf(0);
        let r = cfg.build(Rule::MatMul, &[a.clone(), a.clone()], None);
        assert!(matches!(r, Err(Rejection::MatMulDisabled)));
        // MatVecMul survives the toggle
        let col = cfg.build(Rule::RowSum, &[a.clone()], None).unwrap();
        assert!(cfg.build(Rule::MatVecMul, &[a, col], None).is_ok());
    }

    #[test]
    fn complexity_cap_blocks_cubic_nodes() {
        let cfg = square(2).with_complexity_cap(Some(2));
        let a = cfg.leaf(0);
        let r = cfg.build(Rule::MatMul, &[a.clone(), a.clone()], None);
        assert!(matches!(r, Err(Rejection::ComplexityExceeded { .. })));
    }

    #[test]
    fn repeat_dims_follow_variables() {
        let cfg = GrammarConfig::new(alloc::vec![
            VarSpec::new("A", Shape::new(Dim::N, Dim::M), 1),
            VarSpec::new("B", Shape::new(Dim::M, Dim::P), 1),
        ]);
        assert_eq!(cfg.repeat_dims(), alloc::vec![Dim::N, Dim::M, Dim::P]);
        assert_eq!(cfg.target_degree(), 2);
    }
}
