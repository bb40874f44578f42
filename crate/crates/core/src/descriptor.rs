//! Numerical descriptors: length-N vectors of residues that fingerprint
//! scalar expressions. Equal descriptors certify analytic equality with
//! probability 1 - (k/p)^N for degree-k polynomials (Schwartz-Zippel);
//! distinct descriptors prove inequality outright.

use alloc::vec::Vec;
use core::fmt;

/// Identifies the context a descriptor was evaluated in. Descriptors are
/// comparable only within the same context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CtxId {
    pub prime: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub p_dim: usize,
    pub n_copies: usize,
    pub n_vars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    values: Vec<u64>,
    context_id: CtxId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextMismatch {
    pub left: CtxId,
    pub right: CtxId,
}

impl fmt::Display for ContextMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "descriptors from different contexts (seeds {} vs {})",
            self.left.seed, self.right.seed
        )
    }
}

impl Descriptor {
    pub fn new(values: Vec<u64>, context_id: CtxId) -> Descriptor {
        Descriptor { values, context_id }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn context_id(&self) -> CtxId {
        self.context_id
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// Componentwise equality, defined only within a shared context.
pub fn descriptors_equal(a: &Descriptor, b: &Descriptor) -> Result<bool, ContextMismatch> {
    if a.context_id != b.context_id {
        return Err(ContextMismatch {
            left: a.context_id,
            right: b.context_id,
        });
    }
    Ok(a.values == b.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn id(seed: u64) -> CtxId {
        CtxId {
            prime: 101,
            seed,
            n: 2,
            m: 2,
            p_dim: 2,
            n_copies: 2,
            n_vars: 1,
        }
    }

    #[test]
    fn equality_rules() {
        let a = Descriptor::new(vec![1, 2], id(0));
        let b = Descriptor::new(vec![1, 2], id(0));
        let c = Descriptor::new(vec![1, 3], id(0));
        assert_eq!(descriptors_equal(&a, &b), Ok(true));
        assert_eq!(descriptors_equal(&a, &c), Ok(false));
        let other = Descriptor::new(vec![1, 2], id(1));
        assert!(descriptors_equal(&a, &other).is_err());
    }
}
