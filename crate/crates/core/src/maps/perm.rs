use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{0, .., m-1}` stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; image.len()];
        for &x in &image {
            if x >= image.len() {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range for size {}",
                    image.len()
                )));
            }
            if std::mem::replace(&mut hit[x], true) {
                return Err(Error::InvalidPermutation(format!("image {x} repeated")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            image: (0..m).collect(),
        }
    }

    /// Builds the permutation whose cycles are the given sequences, each
    /// mapping an element to its successor. Elements not listed are fixed.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..m).collect();
        let mut used = vec![false; m];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= m || std::mem::replace(&mut used[x], true) {
                    return Err(Error::InvalidPermutation(format!("bad cycle element {x}")));
                }
                image[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "size mismatch in composition");
        Permutation {
            image: other.image.iter().map(|&x| self.image[x]).collect(),
        }
    }

    /// Cycles ordered by smallest element, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.image[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Index of the cycle containing each element, numbered as in [`Permutation::cycles`].
    pub fn cycle_labels(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.image.len()];
        let mut next = 0;
        for start in 0..self.image.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let mut x = start;
            while label[x] == usize::MAX {
                label[x] = next;
                x = self.image[x];
            }
            next += 1;
        }
        (label, next)
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_labels().1
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn all_cycles_odd(&self) -> bool {
        self.cycles().iter().all(|c| c.len() % 2 == 1)
    }

    pub fn is_fixed_point(&self, i: usize) -> bool {
        self.image[i] == i
    }
}
