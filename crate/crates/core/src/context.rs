//! Evaluation contexts: N random instantiations of the variable set over Z_p
//! at fixed concrete dimensions.
//!
//! A context is a pure function of (prime, dims, N, seed, variable set):
//! entries for copy `i` of variable `v` come from a ChaCha8 stream keyed by
//! (seed, v, i), so growing N extends a context without disturbing existing
//! copies and identical parameters reproduce identical contexts bit for bit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::descriptor::{CtxId, Descriptor};
use crate::expr::{Expr, Rule};
use crate::matrix::ModMatrix;
use crate::modp;
use crate::shape::{Dim, Shape};

/// Concrete bindings for the symbolic dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimBinding {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

impl DimBinding {
    pub fn square(n: usize) -> DimBinding {
        DimBinding { n, m: n, p: n }
    }

    pub fn new(n: usize, m: usize, p: usize) -> DimBinding {
        DimBinding { n, m, p }
    }

    pub fn resolve(&self, d: Dim) -> usize {
        match d {
            Dim::One => 1,
            Dim::N => self.n,
            Dim::M => self.m,
            Dim::P => self.p,
        }
    }

    pub fn resolve_shape(&self, s: Shape) -> (usize, usize) {
        (self.resolve(s.rows), self.resolve(s.cols))
    }

    /// The neighbouring binding used to probe for dimension-dependent
    /// certificate weights.
    pub fn bumped(&self) -> DimBinding {
        DimBinding {
            n: self.n + 1,
            m: self.m + 1,
            p: self.p + 1,
        }
    }
}

impl fmt::Display for DimBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, m={}, p={}", self.n, self.m, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextError {
    NotPrime(u64),
    ZeroCopies,
    BadDims,
    UnboundVariable { index: usize },
    NonScalar { canonical: String },
}

impl fmt::Display for ContextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextError::NotPrime(p) => write!(f, "{p} is not prime"),
            ContextError::ZeroCopies => f.write_str("context needs at least one copy"),
            ContextError::BadDims => f.write_str("dimensions must be positive"),
            ContextError::UnboundVariable { index } => {
                write!(f, "expression references unbound variable #{index}")
            }
            ContextError::NonScalar { canonical } => {
                write!(f, "descriptor requested for non-scalar expression {canonical}")
            }
        }
    }
}

/// N instantiations of every variable, with all metadata needed to replay.
#[derive(Debug, Clone)]
pub struct EvalContext {
    prime: u64,
    dims: DimBinding,
    n_copies: usize,
    seed: u64,
    var_shapes: Vec<Shape>,
    /// vars[v][copy]
    vars: Vec<Vec<ModMatrix>>,
    id: CtxId,
}

fn mix(seed: u64, var: u64, copy: u64) -> u64 {
    // splitmix64 finalizer over the packed key
    let mut z = seed ^ var.wrapping_mul(0x9E3779B97F4A7C15) ^ copy.wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn uniform_residue(rng: &mut rand_chacha::ChaCha8Rng, p: u64) -> u64 {
    // rejection sampling on the smallest power-of-two window covering p
    let bits = 64 - (p - 1).leading_zeros();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    loop {
        let x = rng.next_u64() & mask;
        if x < p {
            return x;
        }
    }
}

impl EvalContext {
    /// Build a context. `var_shapes` lists the variable set in index order.
    pub fn new(
        var_shapes: Vec<Shape>,
        dims: DimBinding,
        n_copies: usize,
        prime: u64,
        seed: u64,
    ) -> Result<EvalContext, ContextError> {
        if !modp::is_prime(prime) {
            return Err(ContextError::NotPrime(prime));
        }
        if n_copies == 0 {
            return Err(ContextError::ZeroCopies);
        }
        if dims.n == 0 || dims.m == 0 || dims.p == 0 {
            return Err(ContextError::BadDims);
        }
        let mut vars = Vec::with_capacity(var_shapes.len());
        for (v, &shape) in var_shapes.iter().enumerate() {
            let (r, c) = dims.resolve_shape(shape);
            let mut copies = Vec::with_capacity(n_copies);
            for copy in 0..n_copies {
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(mix(seed, v as u64, copy as u64));
                let mut mat = ModMatrix::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        mat.set(i, j, uniform_residue(&mut rng, prime));
                    }
                }
                copies.push(mat);
            }
            vars.push(copies);
        }
        let id = CtxId {
            prime,
            seed,
            n: dims.n,
            m: dims.m,
            p_dim: dims.p,
            n_copies,
            n_vars: var_shapes.len(),
        };
        Ok(EvalContext {
            prime,
            dims,
            n_copies,
            seed,
            var_shapes,
            vars,
            id,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn dims(&self) -> DimBinding {
        self.dims
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> CtxId {
        self.id
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_shapes(&self) -> &[Shape] {
        &self.var_shapes
    }

    pub fn var_matrix(&self, var: usize, copy: usize) -> &ModMatrix {
        &self.vars[var][copy]
    }

    /// Same parameters, more copies. Existing copies are bit-identical.
    pub fn grown(&self, n_copies: usize) -> Result<EvalContext, ContextError> {
        EvalContext::new(
            self.var_shapes.clone(),
            self.dims,
            n_copies,
            self.prime,
            self.seed,
        )
    }

    /// Evaluate an expression on one copy, producing its full matrix value.
    pub fn eval_matrix(&self, e: &Expr, copy: usize) -> Result<ModMatrix, ContextError> {
        let p = self.prime;
        Ok(match e.rule() {
            Rule::Variable => {
                let idx = e.var_index().expect("variable node");
                let copies = self
                    .vars
                    .get(idx)
                    .ok_or(ContextError::UnboundVariable { index: idx })?;
                copies[copy].clone()
            }
            Rule::Transpose => self.eval_matrix(&e.child(0).unwrap(), copy)?.transpose(),
            Rule::ColSum => self.eval_matrix(&e.child(0).unwrap(), copy)?.col_sum(p),
            Rule::RowSum => self.eval_matrix(&e.child(0).unwrap(), copy)?.row_sum(p),
            Rule::ColRepeat => {
                let d = e.repeat_dims().unwrap().1;
                self.eval_matrix(&e.child(0).unwrap(), copy)?
                    .col_repeat(self.dims.resolve(d))
            }
            Rule::RowRepeat => {
                let d = e.repeat_dims().unwrap().0;
                self.eval_matrix(&e.child(0).unwrap(), copy)?
                    .row_repeat(self.dims.resolve(d))
            }
            Rule::ElemRepeat => {
                let (d1, d2) = e.repeat_dims().unwrap();
                self.eval_matrix(&e.child(0).unwrap(), copy)?
                    .elem_repeat(self.dims.resolve(d1), self.dims.resolve(d2))
            }
            Rule::MatMul | Rule::MatVecMul => {
                let x = self.eval_matrix(&e.child(0).unwrap(), copy)?;
                let y = self.eval_matrix(&e.child(1).unwrap(), copy)?;
                x.matmul(&y, p)
            }
            Rule::ElemMul => {
                let x = self.eval_matrix(&e.child(0).unwrap(), copy)?;
                let y = self.eval_matrix(&e.child(1).unwrap(), copy)?;
                x.elem_mul(&y, p)
            }
        })
    }

    /// Evaluate a scalar expression on all copies, producing its descriptor.
    pub fn evaluate(&self, e: &Expr) -> Result<Descriptor, ContextError> {
        if !e.shape().is_scalar() {
            return Err(ContextError::NonScalar {
                canonical: String::from(e.canonical()),
            });
        }
        let mut values = Vec::with_capacity(self.n_copies);
        for copy in 0..self.n_copies {
            values.push(self.eval_matrix(e, copy)?.scalar());
        }
        Ok(Descriptor::new(values, self.id))
    }

    /// Key identifying the value of an arbitrary-shape expression in this
    /// context: the resolved shape followed by every entry of every copy.
    /// Used for dedup and class labels, where non-scalar expressions compare
    /// too.
    pub fn value_key(&self, e: &Expr) -> Result<Vec<u64>, ContextError> {
        let (r, c) = self.dims.resolve_shape(e.shape());
        let mut key = Vec::with_capacity(2 + self.n_copies * r * c);
        key.push(r as u64);
        key.push(c as u64);
        for copy in 0..self.n_copies {
            let m = self.eval_matrix(e, copy)?;
            key.extend_from_slice(m.data());
        }
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::DEFAULT_PRIME;
    use alloc::vec;

    fn square_shapes() -> Vec<Shape> {
        vec![Shape::new(Dim::N, Dim::N)]
    }

    #[test]
    fn determinism_and_growth() {
        let a = EvalContext::new(square_shapes(), DimBinding::square(3), 4, DEFAULT_PRIME, 7)
            .unwrap();
        let b = EvalContext::new(square_shapes(), DimBinding::square(3), 4, DEFAULT_PRIME, 7)
            .unwrap();
        assert_eq!(a.var_matrix(0, 2), b.var_matrix(0, 2));
        let grown = a.grown(8).unwrap();
        for copy in 0..4 {
            assert_eq!(a.var_matrix(0, copy), grown.var_matrix(0, copy));
        }
        assert_ne!(a.id(), grown.id());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            EvalContext::new(square_shapes(), DimBinding::square(3), 0, DEFAULT_PRIME, 7),
            Err(ContextError::ZeroCopies)
        ));
        assert!(matches!(
            EvalContext::new(square_shapes(), DimBinding::square(3), 1, 100, 7),
            Err(ContextError::NotPrime(100))
        ));
    }

    #[test]
    fn entries_in_range() {
        let p = 101;
        let ctx = EvalContext::new(square_shapes(), DimBinding::square(4), 8, p, 3).unwrap();
        for copy in 0..8 {
            for &v in ctx.var_matrix(0, copy).data() {
                assert!(v < p);
            }
        }
    }
}
