//! Signed permutation matrices: the rotation groups relating loops of the
//! cubic family.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// A 3×3 matrix with exactly one `±1` per row and column.
///
/// Row `r` has its nonzero entry in column `perm[r]` with sign `signs[r]`,
/// so `(M v)[r] = signs[r] * v[perm[r]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrthTransform {
    perm: [u8; 3],
    signs: [i8; 3],
}

impl OrthTransform {
    pub const IDENTITY: Self = Self { perm: [0, 1, 2], signs: [1, 1, 1] };

    /// Returns `None` unless `perm` is a permutation and every sign is `±1`.
    pub fn new(perm: [u8; 3], signs: [i8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p as usize] {
                return None;
            }
            seen[p as usize] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return None;
        }
        Some(Self { perm, signs })
    }

    pub fn diagonal(signs: [i8; 3]) -> Self {
        Self::new([0, 1, 2], signs).expect("diagonal signs must be ±1")
    }

    /// The cyclic relabeling `(x, y, z) → (y, z, x)`.
    pub fn cyclic() -> Self {
        Self { perm: [1, 2, 0], signs: [1, 1, 1] }
    }

    /// Build from a dense matrix; `None` unless it is a signed permutation.
    pub fn from_matrix(m: &Matrix3<f64>) -> Option<Self> {
        let mut perm = [0u8; 3];
        let mut signs = [0i8; 3];
        for r in 0..3 {
            let mut found = false;
            for c in 0..3 {
                let v = m[(r, c)];
                if v == 0.0 {
                    continue;
                }
                if found || (v != 1.0 && v != -1.0) {
                    return None;
                }
                found = true;
                perm[r] = c as u8;
                signs[r] = v as i8;
            }
            if !found {
                return None;
            }
        }
        Self::new(perm, signs)
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for r in 0..3 {
            m[(r, self.perm[r] as usize)] = self.signs[r] as f64;
        }
        m
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            self.signs[0] as f64 * v[self.perm[0] as usize],
            self.signs[1] as f64 * v[self.perm[1] as usize],
            self.signs[2] as f64 * v[self.perm[2] as usize],
        )
    }

    /// `Mᵀ v`, the inverse action.
    pub fn apply_transpose(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for r in 0..3 {
            out[self.perm[r] as usize] = self.signs[r] as f64 * v[r];
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut perm = [0u8; 3];
        let mut signs = [0i8; 3];
        for r in 0..3 {
            let mid = self.perm[r] as usize;
            perm[r] = other.perm[mid];
            signs[r] = self.signs[r] * other.signs[mid];
        }
        Self { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0u8; 3];
        let mut signs = [0i8; 3];
        for r in 0..3 {
            let c = self.perm[r] as usize;
            perm[c] = r as u8;
            signs[c] = self.signs[r];
        }
        Self { perm, signs }
    }

    pub fn determinant(&self) -> i8 {
        let sign_product: i8 = self.signs.iter().product();
        // parity of the permutation: count inversions
        let p = self.perm;
        let inversions = (p[0] > p[1]) as u8 + (p[0] > p[2]) as u8 + (p[1] > p[2]) as u8;
        if inversions % 2 == 0 {
            sign_product
        } else {
            -sign_product
        }
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl fmt::Display for OrthTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const AXES: [char; 3] = ['x', 'y', 'z'];
        write!(f, "(")?;
        for r in 0..3 {
            if r > 0 {
                write!(f, ",")?;
            }
            let sign = if self.signs[r] < 0 { "-" } else { "" };
            write!(f, "{sign}{}", AXES[self.perm[r] as usize])?;
        }
        write!(f, ")")
    }
}

/// The four π-rotations about the coordinate axes (and the identity).
pub fn klein_elements() -> Vec<OrthTransform> {
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
        .into_iter()
        .map(OrthTransform::diagonal)
        .collect()
}

/// The rotation subgroup isomorphic to A4: Klein four-group plus the cyclic
/// axis relabeling, closed under composition.
pub fn a4_elements() -> Vec<OrthTransform> {
    let mut gens = klein_elements();
    gens.push(OrthTransform::cyclic());
    closure(&gens)
}

/// All 48 signed permutations (the full cube group including reflections).
pub fn all_signed_permutations() -> Vec<OrthTransform> {
    const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for bits in 0..8u8 {
            let signs = [0, 1, 2].map(|i| if bits >> i & 1 == 1 { -1 } else { 1 });
            out.push(OrthTransform { perm, signs });
        }
    }
    out
}

/// Smallest set containing the identity and `generators`, closed under
/// composition. Sorted for deterministic output.
pub fn closure(generators: &[OrthTransform]) -> Vec<OrthTransform> {
    let mut set = vec![OrthTransform::IDENTITY];
    let mut frontier = vec![OrthTransform::IDENTITY];
    while let Some(g) = frontier.pop() {
        for h in generators {
            let gh = g.compose(h);
            if !set.contains(&gh) {
                set.push(gh);
                frontier.push(gh);
            }
        }
    }
    set.sort();
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_basics() {
        let k = klein_elements();
        assert_eq!(k.len(), 4);
        let v = Vector3::new(0.1, 0.2, 0.3);
        let g = OrthTransform::diagonal([1, -1, -1]);
        assert!(k.contains(&g));
        assert_eq!(g.apply(&v), Vector3::new(0.1, -0.2, -0.3));
        for g in &k {
            assert!(g.compose(g).is_identity());
            for h in &k {
                assert!(k.contains(&g.compose(h)));
            }
        }
    }

    #[test]
    fn a4_structure() {
        let a4 = a4_elements();
        assert_eq!(a4.len(), 12);
        for g in &a4 {
            assert_eq!(g.determinant(), 1);
            assert_eq!(g.minus_count() % 2, 0);
            assert_eq!(g.matrix().determinant(), 1.0);
            for h in &a4 {
                assert!(a4.contains(&g.compose(h)));
            }
        }
        // Klein is normal in A4
        let klein = klein_elements();
        for g in &a4 {
            for k in &klein {
                assert!(klein.contains(&g.compose(k).compose(&g.inverse())));
            }
        }
        // and A4 is exactly the rotations with an even number of -1s among
        // the identity and the two 3-cycles
        let expected: Vec<_> = all_signed_permutations()
            .into_iter()
            .filter(|g| g.determinant() == 1 && g.minus_count() % 2 == 0)
            .filter(|g| [[0, 1, 2], [1, 2, 0], [2, 0, 1]].contains(&g.perm))
            .collect();
        assert_eq!(expected.len(), 12);
        for g in expected {
            assert!(a4.contains(&g));
        }
    }

    #[test]
    fn matrix_roundtrip_and_action() {
        for g in all_signed_permutations() {
            let m = g.matrix();
            assert_eq!(OrthTransform::from_matrix(&m), Some(g));
            assert_eq!(m.determinant(), g.determinant() as f64);
            let v = Vector3::new(0.3, -1.7, 2.2);
            assert_eq!(g.apply(&v), m * v);
            assert_eq!(g.apply_transpose(&v), m.transpose() * v);
            assert!(g.compose(&g.inverse()).is_identity());
            for h in all_signed_permutations().iter().step_by(7) {
                assert_eq!(g.compose(h).matrix(), m * h.matrix());
            }
        }
        assert_eq!(all_signed_permutations().len(), 48);
        assert!(OrthTransform::new([0, 0, 1], [1, 1, 1]).is_none());
        assert!(OrthTransform::new([0, 1, 2], [1, 2, 1]).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(OrthTransform::diagonal([1, -1, -1]).to_string(), "(x,-y,-z)");
        assert_eq!(OrthTransform::cyclic().to_string(), "(y,z,x)");
    }
}
