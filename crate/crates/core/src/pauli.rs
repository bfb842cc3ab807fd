//! Single-qubit Paulis, signed Pauli words, and vertex-keyed deviations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// X or Y: flips a computational-basis outcome.
    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// `self · other = i^k · result`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn parse(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase · ops[0] ⊗ ops[1] ⊗ …` over positional sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    pub phase: u8,
    pub ops: Vec<Pauli>,
}

impl PauliWord {
    pub fn identity(n: usize) -> PauliWord {
        PauliWord { phase: 0, ops: alloc::vec![Pauli::I; n] }
    }

    pub fn new(phase: u8, ops: Vec<Pauli>) -> PauliWord {
        PauliWord { phase: phase % 4, ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Operator product `self · other`; both must have the same length.
    pub fn mul(&self, other: &PauliWord) -> PauliWord {
        assert_eq!(self.ops.len(), other.ops.len(), "Pauli word length mismatch");
        let mut phase = self.phase + other.phase;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase += k;
                p
            })
            .collect();
        PauliWord { phase: phase % 4, ops }
    }

    /// Hermitian words have phase ±1 and square to `+I`.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// `-1` for phase `i^2`, `+1` for `i^0`; `None` for non-Hermitian words.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        f.write_str(p)?;
        for op in &self.ops {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

/// A Pauli deviation keyed by vertex; absent vertices carry the identity.
/// Global phases are irrelevant for deviations and are not tracked.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliDeviation(BTreeMap<usize, Pauli>);

impl PauliDeviation {
    pub fn identity() -> PauliDeviation {
        PauliDeviation(BTreeMap::new())
    }

    pub fn single(v: usize, p: Pauli) -> PauliDeviation {
        let mut d = PauliDeviation::identity();
        d.set(v, p);
        d
    }

    /// Places `p` on every vertex of `support`.
    pub fn uniform<'a>(support: impl IntoIterator<Item = &'a usize>, p: Pauli) -> PauliDeviation {
        let mut d = PauliDeviation::identity();
        for &v in support {
            d.set(v, p);
        }
        d
    }

    pub fn set(&mut self, v: usize, p: Pauli) {
        if p == Pauli::I {
            self.0.remove(&v);
        } else {
            self.0.insert(v, p);
        }
    }

    pub fn get(&self, v: usize) -> Pauli {
        self.0.get(&v).copied().unwrap_or(Pauli::I)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.0.iter().map(|(&v, &p)| (v, p))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    /// Vertices carrying X or Y.
    pub fn xy_support(&self) -> BTreeSet<usize> {
        self.iter().filter(|(_, p)| p.has_x()).map(|(v, _)| v).collect()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0.keys().copied().collect()
    }

    /// True when only I and Z occur.
    pub fn is_z_only(&self) -> bool {
        self.iter().all(|(_, p)| p == Pauli::Z)
    }

    pub fn restrict(&self, keep: &BTreeSet<usize>) -> PauliDeviation {
        PauliDeviation(self.0.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, &p)| (v, p)).collect())
    }

    /// Relabels every vertex through `f`.
    pub fn map_vertices(&self, mut f: impl FnMut(usize) -> usize) -> PauliDeviation {
        PauliDeviation(self.0.iter().map(|(&v, &p)| (f(v), p)).collect())
    }

    /// Pointwise product, dropping phases.
    pub fn compose(&self, other: &PauliDeviation) -> PauliDeviation {
        let mut out = self.clone();
        for (v, p) in other.iter() {
            let (_, q) = out.get(v).mul(p);
            out.set(v, q);
        }
        out
    }
}

impl FromIterator<(usize, Pauli)> for PauliDeviation {
    fn from_iter<T: IntoIterator<Item = (usize, Pauli)>>(iter: T) -> Self {
        let mut d = PauliDeviation::identity();
        for (v, p) in iter {
            d.set(v, p);
        }
        d
    }
}

impl fmt::Display for PauliDeviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for (v, p) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}{}", p.symbol(), v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_site_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (1, Pauli::Z));
        assert_eq!(Pauli::X.mul(Pauli::Z), (3, Pauli::Y));
        assert_eq!(Pauli::Z.mul(Pauli::Z), (0, Pauli::I));
    }

    #[test]
    fn word_product_of_edge_stabilisers() {
        // (X⊗Z)(Z⊗X) = Y⊗Y on an edge.
        let a = PauliWord::new(0, vec![Pauli::X, Pauli::Z]);
        let b = PauliWord::new(0, vec![Pauli::Z, Pauli::X]);
        let p = a.mul(&b);
        assert_eq!(p, PauliWord::new(0, vec![Pauli::Y, Pauli::Y]));
        assert!(a.commutes_with(&b));
        let x = PauliWord::new(0, vec![Pauli::X]);
        let z = PauliWord::new(0, vec![Pauli::Z]);
        assert!(!x.commutes_with(&z));
        assert_eq!(x.mul(&z).phase, 3);
    }

    #[test]
    fn deviation_support() {
        let d: PauliDeviation = [(1, Pauli::X), (2, Pauli::Z), (4, Pauli::Y), (5, Pauli::I)].into_iter().collect();
        assert_eq!(d.weight(), 3);
        assert_eq!(d.xy_support().into_iter().collect::<Vec<_>>(), vec![1, 4]);
        assert!(!d.is_z_only());
        assert!(PauliDeviation::single(3, Pauli::Z).is_z_only());
        assert_eq!(d.compose(&PauliDeviation::single(1, Pauli::Z)).get(1), Pauli::Y);
    }
}
