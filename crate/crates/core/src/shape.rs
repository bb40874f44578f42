//! Symbolic dimensions, shapes and complexity monomials.
//!
//! Dimensions stay symbolic while trees are built; they are bound to concrete
//! sizes only inside an [`crate::context::EvalContext`].

use core::fmt;

/// A symbolic size parameter. `One` is the literal dimension 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Dim {
    One,
    N,
    M,
    P,
}

impl Dim {
    pub fn symbol(self) -> &'static str {
        match self {
            Dim::One => "1",
            Dim::N => "n",
            Dim::M => "m",
            Dim::P => "p",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Dim> {
        match s {
            "1" => Some(Dim::One),
            "n" => Some(Dim::N),
            "m" => Some(Dim::M),
            "p" => Some(Dim::P),
            _ => None,
        }
    }

    pub fn is_one(self) -> bool {
        self == Dim::One
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The symbolic shape of an expression: rows x cols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Shape {
    pub rows: Dim,
    pub cols: Dim,
}

impl Shape {
    pub const SCALAR: Shape = Shape {
        rows: Dim::One,
        cols: Dim::One,
    };

    pub fn new(rows: Dim, cols: Dim) -> Shape {
        Shape { rows, cols }
    }

    pub fn is_scalar(self) -> bool {
        self == Shape::SCALAR
    }

    pub fn is_column(self) -> bool {
        self.cols.is_one() && !self.rows.is_one()
    }

    pub fn is_row(self) -> bool {
        self.rows.is_one() && !self.cols.is_one()
    }

    pub fn transposed(self) -> Shape {
        Shape {
            rows: self.cols,
            cols: self.rows,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rows, self.cols)
    }
}

/// A monomial in the size parameters, recording per-node computation cost.
///
/// Exponents are per symbol; `Dim::One` contributes nothing. Total degree
/// drives the complexity classification: a tree is in the O(n^2) class iff
/// no node monomial has total degree 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Monomial {
    pub n: u8,
    pub m: u8,
    pub p: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { n: 0, m: 0, p: 0 };

    pub fn from_dims(dims: &[Dim]) -> Monomial {
        let mut mono = Monomial::ONE;
        for d in dims {
            match d {
                Dim::One => {}
                Dim::N => mono.n += 1,
                Dim::M => mono.m += 1,
                Dim::P => mono.p += 1,
            }
        }
        mono
    }

    pub fn total_degree(self) -> u8 {
        self.n + self.m + self.p
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Total degree first, then exponent-lexicographic. This gives the
    /// "maximum monomial" of a tree a well-defined meaning.
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.total_degree(), self.n, self.m, self.p).cmp(&(
            other.total_degree(),
            other.n,
            other.m,
            other.p,
        ))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total_degree() == 0 {
            return f.write_str("1");
        }
        for (sym, e) in [("n", self.n), ("m", self.m), ("p", self.p)] {
            for _ in 0..e {
                f.write_str(sym)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_ordering_by_total_degree() {
        let nmp = Monomial { n: 1, m: 1, p: 1 };
        let nm = Monomial { n: 1, m: 1, p: 0 };
        let n2 = Monomial { n: 2, m: 0, p: 0 };
        assert!(nmp > nm);
        assert!(nmp > n2);
        assert!(n2 > nm); // equal total degree: lexicographic on exponents
        assert_eq!(Monomial::ONE.total_degree(), 0);
    }

    #[test]
    fn monomial_display() {
        use alloc::string::ToString;
        assert_eq!(Monomial { n: 1, m: 1, p: 1 }.to_string(), "nmp");
        assert_eq!(Monomial { n: 2, m: 0, p: 0 }.to_string(), "nn");
        assert_eq!(Monomial::ONE.to_string(), "1");
    }
}
