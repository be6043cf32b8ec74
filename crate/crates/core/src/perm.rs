//! Permutations of `{0, …, n-1}`.
//!
//! Internally 0-based; slot and leaf numbers shown to users are 1-based.
//! A permutation `σ` acts on operations by renaming input `l` to input `σ(l)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "Perm[{}]", one.join(" "))
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Dimension(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// From a one-line notation with 1-based values.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Dimension("one-based permutation contains 0".into()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// The adjacent transposition exchanging `p` and `p + 1` (0-based).
    pub fn adjacent(n: usize, p: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(p, p + 1);
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn sign(&self) -> i64 {
        let n = self.len();
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.0[i] > self.0[j]).count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Adjacent transpositions `[p_1, …, p_r]` with `σ = s_{p_r} ∘ … ∘ s_{p_1}`,
    /// so acting by `σ` means applying `s_{p_1}` first.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut cur = self.0.clone();
        let mut word = Vec::new();
        while let Some(p) = (0..cur.len().saturating_sub(1)).find(|&p| cur[p] > cur[p + 1]) {
            cur.swap(p, p + 1);
            word.push(p);
        }
        word
    }

    /// All permutations of `n` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
            let n = used.len();
            if prefix.len() == n {
                out.push(Perm(prefix.clone()));
                return;
            }
            for x in 0..n {
                if !used[x] {
                    used[x] = true;
                    prefix.push(x);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[x] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
        out
    }

    /// Data for `δ_i(σ·x) = σ⁽ⁱ⁾·δ_j(x)`: returns `j = σ⁻¹(i)` and `σ⁽ⁱ⁾ ∈ Σ_{n-1}`.
    pub fn face(&self, i: usize) -> (usize, Perm) {
        let j = self.inverse().apply(i);
        let images = (0..self.len() - 1)
            .map(|l| {
                let old = if l >= j { l + 1 } else { l };
                let s = self.0[old];
                if s > i {
                    s - 1
                } else {
                    s
                }
            })
            .collect();
        (j, Perm(images))
    }

    /// The permutation `π` of `m + n - 1` inputs with
    /// `(σ·a) ∘_{σ(i)} (τ·b) = π·(a ∘_i b)`, for `σ = self ∈ Σ_m`, `τ ∈ Σ_n`.
    pub fn block(&self, i: usize, tau: &Perm) -> Perm {
        let (m, n) = (self.len(), tau.len());
        let si = self.0[i];
        let mut images = Vec::with_capacity(m + n - 1);
        let place = |l: usize| if l < si { l } else { l + n - 1 };
        for l in 0..i {
            images.push(place(self.0[l]));
        }
        for j in 0..n {
            images.push(si + tau.0[j]);
        }
        for l in i + 1..m {
            images.push(place(self.0[l]));
        }
        Perm(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_word_recovers_permutation() {
        for n in 0..5 {
            for p in Perm::all(n) {
                let mut acc = Perm::identity(n);
                for &s in &p.reduced_word() {
                    acc = Perm::adjacent(n, s).compose(&acc);
                }
                assert_eq!(acc, p);
            }
        }
    }

    #[test]
    fn all_counts_factorial() {
        assert_eq!(Perm::all(4).len(), 24);
        assert_eq!(Perm::all(0).len(), 1);
    }

    #[test]
    fn face_of_identity_is_identity() {
        let (j, s) = Perm::identity(4).face(2);
        assert_eq!(j, 2);
        assert!(s.is_identity());
    }

    #[test]
    fn block_with_identities_is_identity() {
        let b = Perm::identity(3).block(1, &Perm::identity(2));
        assert!(b.is_identity());
        assert_eq!(b.len(), 4);
    }
}
