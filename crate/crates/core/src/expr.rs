//! Typed expression trees over the matrix-operation grammar.
//!
//! Nodes are immutable and reference-counted, so subtrees are shared freely
//! and `Expr` values can cross worker threads. Shape, degree, the canonical
//! string and the worst node-cost monomial are computed at construction;
//! ill-shaped nodes cannot be built.
//!
//! The grammar is the nine-rule table plus variable leaves:
//!
//! | rule            | input             | output  | notation          | cost |
//! |-----------------|-------------------|---------|-------------------|------|
//! | MatMul          | (a,b), (b,c) c!=1 | (a,c)   | `(X * Y)`         | abc  |
//! | ElemMul         | (a,b), (a,b)      | (a,b)   | `(X .* Y)`        | ab   |
//! | MatVecMul       | (a,b), (b,1)      | (a,1)   | `(X * Y)`         | ab   |
//! | Transpose       | (a,b)             | (b,a)   | `(X')`            | ab   |
//! | ColSum          | (a,b)             | (1,b)   | `(sum(X, 1))`     | ab   |
//! | RowSum          | (a,b)             | (a,1)   | `(sum(X, 2))`     | ab   |
//! | ColRepeat       | (a,1)             | (a,d)   | `(repmat(X, 1, d))` | ad |
//! | RowRepeat       | (1,b)             | (d,b)   | `(repmat(X, d, 1))` | db |
//! | ElemRepeat      | (1,1)             | (d,e)   | `(repmat(X, d, e))` | de |
//!
//! Sum semantics follow Matlab: `sum(X, 1)` collapses the row dimension and
//! yields a row vector, which is what lets `sum(A, 1) * B` typecheck. The
//! one-based dimension names in `ColSum`/`RowSum` refer to the summed axis.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::shape::{Dim, Monomial, Shape};

/// Grammar rule tags. `Variable` is the leaf pseudo-rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Rule {
    MatMul,
    ElemMul,
    MatVecMul,
    Transpose,
    ColSum,
    RowSum,
    ColRepeat,
    RowRepeat,
    ElemRepeat,
    Variable,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::MatMul,
        Rule::ElemMul,
        Rule::MatVecMul,
        Rule::Transpose,
        Rule::ColSum,
        Rule::RowSum,
        Rule::ColRepeat,
        Rule::RowRepeat,
        Rule::ElemRepeat,
        Rule::Variable,
    ];

    pub fn arity(self) -> usize {
        match self {
            Rule::MatMul | Rule::ElemMul | Rule::MatVecMul => 2,
            Rule::Variable => 0,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::MatMul => "MatMul",
            Rule::ElemMul => "ElemMul",
            Rule::MatVecMul => "MatVecMul",
            Rule::Transpose => "Transpose",
            Rule::ColSum => "ColSum",
            Rule::RowSum => "RowSum",
            Rule::ColRepeat => "ColRepeat",
            Rule::RowRepeat => "RowRepeat",
            Rule::ElemRepeat => "ElemRepeat",
            Rule::Variable => "Variable",
        }
    }

    pub fn is_repeat(self) -> bool {
        matches!(self, Rule::ColRepeat | Rule::RowRepeat | Rule::ElemRepeat)
    }

    pub fn is_sum(self) -> bool {
        matches!(self, Rule::ColSum | Rule::RowSum)
    }
}

/// A shape/degree violation. This is an expected rejection, not a fault:
/// the scheduler uses it to mask illegal rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    ArityMismatch { rule: Rule, got: usize },
    ShapeMismatch { rule: Rule },
    DegreeExceeded { degree: u32, max: u32 },
    MissingRepeatDim { rule: Rule },
    TrivialRepeat,
    MatMulDisabled,
    ComplexityExceeded { degree: u8, cap: u8 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::ArityMismatch { rule, got } => {
                write!(f, "{} expects {} children, got {got}", rule.name(), rule.arity())
            }
            Rejection::ShapeMismatch { rule } => write!(f, "shape mismatch for {}", rule.name()),
            Rejection::DegreeExceeded { degree, max } => {
                write!(f, "degree {degree} exceeds cap {max}")
            }
            Rejection::MissingRepeatDim { rule } => {
                write!(f, "{} requires a target dimension", rule.name())
            }
            Rejection::TrivialRepeat => f.write_str("repeat to dimension 1 is the identity"),
            Rejection::MatMulDisabled => f.write_str("matrix-matrix multiply disabled"),
            Rejection::ComplexityExceeded { degree, cap } => {
                write!(f, "node cost degree {degree} exceeds cap {cap}")
            }
        }
    }
}

#[derive(Debug)]
enum Node {
    Var { index: usize, name: String },
    Transpose(Expr),
    ColSum(Expr),
    RowSum(Expr),
    ColRepeat(Expr, Dim),
    RowRepeat(Expr, Dim),
    ElemRepeat(Expr, Dim, Dim),
    MatMul(Expr, Expr),
    MatVecMul(Expr, Expr),
    ElemMul(Expr, Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    shape: Shape,
    degree: u32,
    canon: String,
    max_monomial: Monomial,
    node_count: u32,
}

/// An immutable typed expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.canonical())
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.canon == other.0.canon
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.canon.cmp(&other.0.canon)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.canon)
    }
}

fn mono_of(dims: &[Dim]) -> Monomial {
    Monomial::from_dims(dims)
}

impl Expr {
    fn new(node: Node, shape: Shape, degree: u32, canon: String, own_cost: Monomial) -> Expr {
        let (child_max, child_nodes) = {
            let mut m = Monomial::ONE;
            let mut c = 0u32;
            for ch in node_children(&node) {
                m = m.max(ch.0.max_monomial);
                c += ch.0.node_count;
            }
            (m, c)
        };
        Expr(Arc::new(Inner {
            node,
            shape,
            degree,
            canon,
            max_monomial: child_max.max(own_cost),
            node_count: child_nodes + 1,
        }))
    }

    /// Variable leaf. `index` identifies the variable within its grammar
    /// configuration; `name` is the display name.
    pub fn var(index: usize, name: &str, shape: Shape) -> Expr {
        Expr::new(
            Node::Var {
                index,
                name: String::from(name),
            },
            shape,
            1,
            String::from(name),
            Monomial::ONE,
        )
    }

    pub fn transpose(x: &Expr) -> Expr {
        let sh = x.shape().transposed();
        let cost = mono_of(&[x.shape().rows, x.shape().cols]);
        let canon = alloc::format!("({}')", x.0.canon);
        Expr::new(Node::Transpose(x.clone()), sh, x.degree(), canon, cost)
    }

    /// `sum(X, 1)`: collapse rows, yielding `(1, cols)`.
    pub fn col_sum(x: &Expr) -> Expr {
        let sh = Shape::new(Dim::One, x.shape().cols);
        let cost = mono_of(&[x.shape().rows, x.shape().cols]);
        let canon = alloc::format!("(sum({}, 1))", x.0.canon);
        Expr::new(Node::ColSum(x.clone()), sh, x.degree(), canon, cost)
    }

    /// `sum(X, 2)`: collapse columns, yielding `(rows, 1)`.
    pub fn row_sum(x: &Expr) -> Expr {
        let sh = Shape::new(x.shape().rows, Dim::One);
        let cost = mono_of(&[x.shape().rows, x.shape().cols]);
        let canon = alloc::format!("(sum({}, 2))", x.0.canon);
        Expr::new(Node::RowSum(x.clone()), sh, x.degree(), canon, cost)
    }

    /// `repmat(X, 1, d)` for a column `(a, 1)`.
    pub fn col_repeat(x: &Expr, d: Dim) -> Result<Expr, Rejection> {
        if !x.shape().cols.is_one() {
            return Err(Rejection::ShapeMismatch { rule: Rule::ColRepeat });
        }
        if d.is_one() {
            return Err(Rejection::TrivialRepeat);
        }
        let sh = Shape::new(x.shape().rows, d);
        let cost = mono_of(&[sh.rows, sh.cols]);
        let canon = alloc::format!("(repmat({}, 1, {}))", x.0.canon, d);
        Ok(Expr::new(Node::ColRepeat(x.clone(), d), sh, x.degree(), canon, cost))
    }

    /// `repmat(X, d, 1)` for a row `(1, b)`.
    pub fn row_repeat(x: &Expr, d: Dim) -> Result<Expr, Rejection> {
        if !x.shape().rows.is_one() {
            return Err(Rejection::ShapeMismatch { rule: Rule::RowRepeat });
        }
        if d.is_one() {
            return Err(Rejection::TrivialRepeat);
        }
        let sh = Shape::new(d, x.shape().cols);
        let cost = mono_of(&[sh.rows, sh.cols]);
        let canon = alloc::format!("(repmat({}, {}, 1))", x.0.canon, d);
        Ok(Expr::new(Node::RowRepeat(x.clone(), d), sh, x.degree(), canon, cost))
    }

    /// `repmat(X, d1, d2)` for a scalar.
    pub fn elem_repeat(x: &Expr, d1: Dim, d2: Dim) -> Result<Expr, Rejection> {
        if !x.shape().is_scalar() {
            return Err(Rejection::ShapeMismatch { rule: Rule::ElemRepeat });
        }
        if d1.is_one() && d2.is_one() {
            return Err(Rejection::TrivialRepeat);
        }
        let sh = Shape::new(d1, d2);
        let cost = mono_of(&[sh.rows, sh.cols]);
        let canon = alloc::format!("(repmat({}, {}, {}))", x.0.canon, d1, d2);
        Ok(Expr::new(Node::ElemRepeat(x.clone(), d1, d2), sh, x.degree(), canon, cost))
    }

    /// `X * Y`, dispatched to MatMul or MatVecMul on the column dimension of
    /// `Y`. The two rules are disjoint: a product with a column-vector right
    /// operand is always MatVecMul.
    pub fn multiply(x: &Expr, y: &Expr) -> Result<Expr, Rejection> {
        let (a, b) = (x.shape().rows, x.shape().cols);
        let (b2, c) = (y.shape().rows, y.shape().cols);
        if b != b2 {
            return Err(Rejection::ShapeMismatch { rule: Rule::MatMul });
        }
        let sh = Shape::new(a, c);
        let cost = mono_of(&[a, b, c]);
        let canon = alloc::format!("({} * {})", x.0.canon, y.0.canon);
        let degree = x.degree() + y.degree();
        let node = if c.is_one() {
            Node::MatVecMul(x.clone(), y.clone())
        } else {
            Node::MatMul(x.clone(), y.clone())
        };
        Ok(Expr::new(node, sh, degree, canon, cost))
    }

    pub fn elem_mul(x: &Expr, y: &Expr) -> Result<Expr, Rejection> {
        if x.shape() != y.shape() {
            return Err(Rejection::ShapeMismatch { rule: Rule::ElemMul });
        }
        let sh = x.shape();
        let cost = mono_of(&[sh.rows, sh.cols]);
        let canon = alloc::format!("({} .* {})", x.0.canon, y.0.canon);
        Ok(Expr::new(
            Node::ElemMul(x.clone(), y.clone()),
            sh,
            x.degree() + y.degree(),
            canon,
            cost,
        ))
    }

    /// Rule-driven constructor. Repeat rules read their target dimensions
    /// from `repeat`; other rules ignore it.
    pub fn apply(
        rule: Rule,
        children: &[Expr],
        repeat: Option<(Dim, Dim)>,
    ) -> Result<Expr, Rejection> {
        if children.len() != rule.arity() {
            return Err(Rejection::ArityMismatch {
                rule,
                got: children.len(),
            });
        }
        match rule {
            Rule::Transpose => Ok(Expr::transpose(&children[0])),
            Rule::ColSum => Ok(Expr::col_sum(&children[0])),
            Rule::RowSum => Ok(Expr::row_sum(&children[0])),
            Rule::ColRepeat => {
                let (_, d) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
                Expr::col_repeat(&children[0], d)
            }
            Rule::RowRepeat => {
                let (d, _) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
                Expr::row_repeat(&children[0], d)
            }
            Rule::ElemRepeat => {
                let (d1, d2) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
                Expr::elem_repeat(&children[0], d1, d2)
            }
            Rule::MatMul => {
                let e = Expr::multiply(&children[0], &children[1])?;
                if e.rule() != Rule::MatMul {
                    return Err(Rejection::ShapeMismatch { rule });
                }
                Ok(e)
            }
            Rule::MatVecMul => {
                let e = Expr::multiply(&children[0], &children[1])?;
                if e.rule() != Rule::MatVecMul {
                    return Err(Rejection::ShapeMismatch { rule });
                }
                Ok(e)
            }
            Rule::ElemMul => Expr::elem_mul(&children[0], &children[1]),
            Rule::Variable => Err(Rejection::ShapeMismatch { rule }),
        }
    }

    pub fn rule(&self) -> Rule {
        match &self.0.node {
            Node::Var { .. } => Rule::Variable,
            Node::Transpose(_) => Rule::Transpose,
            Node::ColSum(_) => Rule::ColSum,
            Node::RowSum(_) => Rule::RowSum,
            Node::ColRepeat(..) => Rule::ColRepeat,
            Node::RowRepeat(..) => Rule::RowRepeat,
            Node::ElemRepeat(..) => Rule::ElemRepeat,
            Node::MatMul(..) => Rule::MatMul,
            Node::MatVecMul(..) => Rule::MatVecMul,
            Node::ElemMul(..) => Rule::ElemMul,
        }
    }

    pub fn shape(&self) -> Shape {
        self.0.shape
    }

    /// Number of variable-leaf occurrences.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn canonical(&self) -> &str {
        &self.0.canon
    }

    pub fn node_count(&self) -> u32 {
        self.0.node_count
    }

    /// The maximum-total-degree cost monomial over all nodes. A tree is in
    /// the O(n^2) class iff this has total degree <= 2.
    pub fn complexity(&self) -> Monomial {
        self.0.max_monomial
    }

    pub fn children(&self) -> Vec<Expr> {
        node_children(&self.0.node).map(|e| e.clone()).collect()
    }

    pub fn child(&self, i: usize) -> Option<Expr> {
        node_children(&self.0.node).nth(i).cloned()
    }

    /// Variable index for leaves.
    pub fn var_index(&self) -> Option<usize> {
        match &self.0.node {
            Node::Var { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.0.node {
            Node::Var { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Repeat target dimensions for repeat nodes: (rows, cols) of the output
    /// that were chosen freely.
    pub fn repeat_dims(&self) -> Option<(Dim, Dim)> {
        match &self.0.node {
            Node::ColRepeat(x, d) => Some((x.shape().rows, *d)),
            Node::RowRepeat(x, d) => Some((*d, x.shape().cols)),
            Node::ElemRepeat(_, d1, d2) => Some((*d1, *d2)),
            _ => None,
        }
    }

    /// True if any node in the tree is a MatMul-rule node.
    pub fn contains_matmul(&self) -> bool {
        if self.rule() == Rule::MatMul {
            return true;
        }
        node_children(&self.0.node).any(|c| c.contains_matmul())
    }

    /// Count of variable-leaf occurrences per variable index.
    pub fn var_counts(&self, n_vars: usize) -> Vec<u32> {
        let mut counts = alloc::vec![0u32; n_vars];
        fn walk(e: &Expr, counts: &mut [u32]) {
            if let Some(i) = e.var_index() {
                counts[i] += 1;
            }
            for c in node_children(&e.0.node) {
                walk(c, counts);
            }
        }
        walk(self, &mut counts);
        counts
    }

    /// Depth of the tree (leaf = 1).
    pub fn depth(&self) -> u32 {
        1 + node_children(&self.0.node)
            .map(|c| c.depth())
            .max()
            .unwrap_or(0)
    }

    /// Length of the chain of unary nodes ending at this root.
    pub fn unary_run(&self) -> u32 {
        match self.rule().arity() {
            1 => 1 + self.child(0).map(|c| c.unary_run()).unwrap_or(0),
            _ => 0,
        }
    }

    /// Pointer identity, used as a cache key during embedding.
    pub fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }
}

fn node_children(node: &Node) -> impl Iterator<Item = &Expr> {
    let (a, b) = match node {
        Node::Var { .. } => (None, None),
        Node::Transpose(x)
        | Node::ColSum(x)
        | Node::RowSum(x)
        | Node::ColRepeat(x, _)
        | Node::RowRepeat(x, _)
        | Node::ElemRepeat(x, _, _) => (Some(x), None),
        Node::MatMul(x, y) | Node::MatVecMul(x, y) | Node::ElemMul(x, y) => (Some(x), Some(y)),
    };
    a.into_iter().chain(b)
}

/// Pure shape inference for a rule application, without building a node.
/// Repeat rules need their free target dimensions supplied.
pub fn infer_shape(
    rule: Rule,
    child_shapes: &[Shape],
    repeat: Option<(Dim, Dim)>,
) -> Result<Shape, Rejection> {
    if child_shapes.len() != rule.arity() {
        return Err(Rejection::ArityMismatch {
            rule,
            got: child_shapes.len(),
        });
    }
    match rule {
        Rule::Transpose => Ok(child_shapes[0].transposed()),
        Rule::ColSum => Ok(Shape::new(Dim::One, child_shapes[0].cols)),
        Rule::RowSum => Ok(Shape::new(child_shapes[0].rows, Dim::One)),
        Rule::ColRepeat => {
            let (_, d) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
            if !child_shapes[0].cols.is_one() {
                return Err(Rejection::ShapeMismatch { rule });
            }
            if d.is_one() {
                return Err(Rejection::TrivialRepeat);
            }
            Ok(Shape::new(child_shapes[0].rows, d))
        }
        Rule::RowRepeat => {
            let (d, _) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
            if !child_shapes[0].rows.is_one() {
                return Err(Rejection::ShapeMismatch { rule });
            }
            if d.is_one() {
                return Err(Rejection::TrivialRepeat);
            }
            Ok(Shape::new(d, child_shapes[0].cols))
        }
        Rule::ElemRepeat => {
            let (d1, d2) = repeat.ok_or(Rejection::MissingRepeatDim { rule })?;
            if !child_shapes[0].is_scalar() {
                return Err(Rejection::ShapeMismatch { rule });
            }
            if d1.is_one() && d2.is_one() {
                return Err(Rejection::TrivialRepeat);
            }
            Ok(Shape::new(d1, d2))
        }
        Rule::MatMul => {
            let (x, y) = (child_shapes[0], child_shapes[1]);
            if x.cols != y.rows || y.cols.is_one() {
                return Err(Rejection::ShapeMismatch { rule });
            }
            Ok(Shape::new(x.rows, y.cols))
        }
        Rule::MatVecMul => {
            let (x, y) = (child_shapes[0], child_shapes[1]);
            if x.cols != y.rows || !y.cols.is_one() {
                return Err(Rejection::ShapeMismatch { rule });
            }
            Ok(Shape::new(x.rows, Dim::One))
        }
        Rule::ElemMul => {
            if child_shapes[0] != child_shapes[1] {
                return Err(Rejection::ShapeMismatch { rule });
            }
            Ok(child_shapes[0])
        }
        Rule::Variable => Err(Rejection::ArityMismatch { rule, got: 0 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a_nm() -> Expr {
        Expr::var(0, "A", Shape::new(Dim::N, Dim::M))
    }

    #[test]
    fn matmul_shape() {
        // MatMul, [(n,m),(m,p)] -> (n,p)
        let sh = infer_shape(
            Rule::MatMul,
            &[Shape::new(Dim::N, Dim::M), Shape::new(Dim::M, Dim::P)],
            None,
        )
        .unwrap();
        assert_eq!(sh, Shape::new(Dim::N, Dim::P));
    }

    #[test]
    fn transpose_involution_shape() {
        let sh0 = Shape::new(Dim::N, Dim::M);
        let sh1 = infer_shape(Rule::Transpose, &[sh0], None).unwrap();
        let sh2 = infer_shape(Rule::Transpose, &[sh1], None).unwrap();
        assert_eq!(sh2, sh0);
    }

    #[test]
    fn elem_mul_rejects_mismatched_shapes() {
        let r = infer_shape(
            Rule::ElemMul,
            &[Shape::new(Dim::N, Dim::M), Shape::new(Dim::M, Dim::N)],
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn matvec_output_is_column() {
        // (n,m) * (m,1) -> (n,1)
        let sh = infer_shape(
            Rule::MatVecMul,
            &[Shape::new(Dim::N, Dim::M), Shape::new(Dim::M, Dim::One)],
            None,
        )
        .unwrap();
        assert_eq!(sh, Shape::new(Dim::N, Dim::One));
    }

    #[test]
    fn col_sum_yields_row() {
        // sum(A,1) on (n,m) gives (1,m), so it can left-multiply a (m,p)
        let a = a_nm();
        let s = Expr::col_sum(&a);
        assert_eq!(s.shape(), Shape::new(Dim::One, Dim::M));
        let b = Expr::var(1, "B", Shape::new(Dim::M, Dim::P));
        let prod = Expr::multiply(&s, &b).unwrap();
        assert_eq!(prod.shape(), Shape::new(Dim::One, Dim::P));
        assert_eq!(prod.rule(), Rule::MatMul);
    }

    #[test]
    fn double_transpose_canonical_string() {
        let a = a_nm();
        let tt = Expr::transpose(&Expr::transpose(&a));
        assert_eq!(tt.canonical(), "((A')')");
        assert_eq!(tt.shape(), a.shape());
        assert_eq!(tt.degree(), 1);
    }

    #[test]
    fn degree_sums_over_children() {
        let a = a_nm();
        let both = Expr::elem_mul(&a, &a).unwrap();
        assert_eq!(both.degree(), 2);
        assert_eq!(both.canonical(), "(A .* A)");
    }

    #[test]
    fn example_one_efficient_tree() {
        // sum((sum(A, 1) * B)', 1) over A:(n,m), B:(m,p) is scalar
        let a = a_nm();
        let b = Expr::var(1, "B", Shape::new(Dim::M, Dim::P));
        let s = Expr::col_sum(&a);
        let prod = Expr::multiply(&s, &b).unwrap();
        let t = Expr::transpose(&prod);
        let out = Expr::col_sum(&t);
        assert!(out.shape().is_scalar());
        assert_eq!(out.degree(), 2);
        assert_eq!(out.canonical(), "(sum((((sum(A, 1)) * B)'), 1))");
        // max node cost is degree 2 (mp for the product)
        assert_eq!(out.complexity().total_degree(), 2);
    }

    #[test]
    fn naive_example_one_is_cubic() {
        // sum(sum(A*B)) has an nmp node
        let a = a_nm();
        let b = Expr::var(1, "B", Shape::new(Dim::M, Dim::P));
        let prod = Expr::multiply(&a, &b).unwrap();
        let out = Expr::row_sum(&Expr::col_sum(&prod));
        assert!(out.shape().is_scalar());
        assert_eq!(out.complexity().total_degree(), 3);
        assert_eq!(out.complexity(), Monomial { n: 1, m: 1, p: 1 });
    }

    #[test]
    fn variable_leaf_complexity_is_constant() {
        assert_eq!(a_nm().complexity().total_degree(), 0);
    }

    #[test]
    fn repeats_reject_trivial_and_mismatched() {
        let a = a_nm();
        let col = Expr::row_sum(&a); // (n,1)
        assert!(Expr::col_repeat(&col, Dim::One).is_err());
        assert!(Expr::col_repeat(&a, Dim::M).is_err()); // not a column
        let rep = Expr::col_repeat(&col, Dim::M).unwrap();
        assert_eq!(rep.shape(), Shape::new(Dim::N, Dim::M));
        assert_eq!(rep.canonical(), "(repmat((sum(A, 2)), 1, m))");
    }

    #[test]
    fn apply_matches_direct_constructors() {
        let a = a_nm();
        let via_apply = Expr::apply(Rule::ColSum, &[a.clone()], None).unwrap();
        assert_eq!(via_apply, Expr::col_sum(&a));
        // MatMul apply on a column RHS must reject (it is MatVecMul)
        let col = Expr::row_sum(&a);
        let e = Expr::apply(Rule::MatMul, &[a.clone(), col.clone()], None);
        assert!(e.is_err());
        let e = Expr::apply(Rule::MatVecMul, &[a.clone(), col], None).unwrap();
        assert_eq!(e.rule(), Rule::MatVecMul);
    }

    #[test]
    fn var_counts_and_unary_run() {
        let a = a_nm();
        let b = Expr::var(1, "B", Shape::new(Dim::M, Dim::P));
        let t = Expr::multiply(&Expr::col_sum(&a), &b).unwrap();
        let t = Expr::col_sum(&Expr::transpose(&t));
        assert_eq!(t.var_counts(2), vec![1, 1]);
        assert_eq!(t.unary_run(), 2);
        assert_eq!(t.depth(), 5);
    }
}
