use super::{CVector, ModelError, C64};

/// Binary tree over the squared magnitudes of a vector, as used for
/// QRAM-style state preparation.
///
/// Leaves keep the complex entries (zero-padded to a power of two); every
/// internal node stores the sum of squared magnitudes below it, so the root is
/// `||v||^2`. Updates return a new tree and leave the original untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct KpTree {
    len: usize,
    leaves: Vec<C64>,
    // levels[0] holds leaf weights, the last level holds the root
    levels: Vec<Vec<f64>>,
}

impl KpTree {
    pub fn build(v: &[C64]) -> Self {
        let width = v.len().max(1).next_power_of_two();
        let mut leaves = vec![C64::new(0.0, 0.0); width];
        leaves[..v.len()].copy_from_slice(v);
        let mut levels = vec![leaves.iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>()];
        while levels.last().map_or(0, Vec::len) > 1 {
            let below = levels.last().unwrap();
            let next = below.chunks(2).map(|p| p[0] + p[1]).collect();
            levels.push(next);
        }
        Self { len: v.len(), leaves, levels }
    }

    /// Length of the stored vector (before padding).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `||v||^2`.
    pub fn root(&self) -> f64 {
        self.levels[self.depth()][0]
    }

    /// Weight of node `index` at `level` (0 = leaves).
    pub fn node(&self, level: usize, index: usize) -> f64 {
        self.levels[level][index]
    }

    /// Copy of the tree with entry `i` replaced.
    pub fn update(&self, i: usize, value: C64) -> Result<KpTree, ModelError> {
        if i >= self.len {
            return Err(ModelError::IndexOutOfRange { index: i, len: self.len });
        }
        let mut next = self.clone();
        next.leaves[i] = value;
        next.levels[0][i] = value.norm_sqr();
        let mut idx = i;
        for level in 1..next.levels.len() {
            idx /= 2;
            let below = &next.levels[level - 1];
            let sum = below[2 * idx] + below[2 * idx + 1];
            next.levels[level][idx] = sum;
        }
        Ok(next)
    }

    /// Unit state `v / ||v||` rebuilt from root-to-leaf weight ratios.
    pub fn amplitudes(&self) -> Result<CVector, ModelError> {
        if self.root() == 0.0 {
            return Err(ModelError::ZeroSignal);
        }
        let depth = self.depth();
        let out = (0..self.len).map(|i| {
            let mut magnitude = 1.0;
            for level in (0..depth).rev() {
                let child = self.levels[level][i >> level];
                let parent = self.levels[level + 1][i >> (level + 1)];
                if parent == 0.0 {
                    magnitude = 0.0;
                    break;
                }
                magnitude *= (child / parent).sqrt();
            }
            let leaf = self.leaves[i];
            if leaf.norm() == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                leaf / leaf.norm() * magnitude
            }
        });
        Ok(CVector::from_iterator(self.len, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn root_is_squared_norm() {
        let t = KpTree::build(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert_eq!(t.root(), 25.0);
    }

    #[test]
    fn padding_to_power_of_two() {
        let t = KpTree::build(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.node(0, 3), 0.0);
        assert_eq!(t.root(), 3.0);
    }

    #[test]
    fn update_is_persistent() {
        let t = KpTree::build(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let u = t.update(1, c(0.0, 0.0)).unwrap();
        assert_eq!(t.root(), 5.0);
        assert_eq!(u.root(), 1.0);
        assert!(t.update(2, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn amplitudes_keep_phase() {
        let v = [c(0.0, 2.0), c(-1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let a = KpTree::build(&v).amplitudes().unwrap();
        for (x, y) in a.iter().zip(v.iter()) {
            assert!((x - y / 3.0).norm() < 1e-15);
        }
    }
}
