#![allow(dead_code)]

use std::collections::HashSet;

/// A free product of cyclic groups; `None` is infinite cyclic.
pub struct FreeProduct {
    pub orders: Vec<Option<i64>>,
    /// Generators as (factor, exponent).
    pub letters: Vec<(usize, i64)>,
}

impl FreeProduct {
    fn normalize(&self, factor: usize, k: i64) -> i64 {
        match self.orders[factor] {
            Some(n) => k.rem_euclid(n),
            None => k,
        }
    }

    /// Appends a letter to an alternating syllable sequence.
    pub fn push(&self, word: &mut Vec<(usize, i64)>, (f, k): (usize, i64)) {
        match word.last_mut() {
            Some((g, j)) if *g == f => {
                *j = self.normalize(f, *j + k);
                if *j == 0 {
                    word.pop();
                }
            }
            _ => {
                let k = self.normalize(f, k);
                if k != 0 {
                    word.push((f, k));
                }
            }
        }
    }

    /// Sphere sizes up to `n` from all strings of length at most `n`.
    pub fn sphere_sizes(&self, n: usize) -> Vec<usize> {
        let mut seen: HashSet<Vec<(usize, i64)>> = HashSet::from([Vec::new()]);
        let mut sizes = vec![1];
        let mut strings: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(strings.len() * self.letters.len());
            let mut fresh = 0;
            for w in &strings {
                for &l in &self.letters {
                    let mut v = w.clone();
                    self.push(&mut v, l);
                    if seen.insert(v.clone()) {
                        fresh += 1;
                    }
                    next.push(v);
                }
            }
            sizes.push(fresh);
            strings = next;
        }
        sizes
    }

    /// Reduced form of a word over the letters.
    pub fn reduce(&self, word: &[usize]) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for &i in word {
            self.push(&mut out, self.letters[i]);
        }
        out
    }

    /// Short words over the letters that represent the identity.
    pub fn trivial_words(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (i, &(f, k)) in self.letters.iter().enumerate() {
            if let Some(j) = self.letters.iter().position(|&(g, m)| g == f && self.normalize(f, k + m) == 0) {
                out.push(vec![i, j]);
            }
            if let (Some(n), 1) = (self.orders[f], k) {
                out.push(vec![i; n as usize]);
            }
        }
        out
    }
}

/// Oracles for the free products in the corpus, letters in the order of the
/// symmetric generating set.
pub fn corpus_oracles() -> Vec<(&'static str, FreeProduct)> {
    vec![
        ("dinf", FreeProduct { orders: vec![Some(2), Some(2)], letters: vec![(0, 1), (1, 1)] }),
        ("z2z3", FreeProduct { orders: vec![Some(2), Some(3)], letters: vec![(0, 1), (1, 1), (1, -1)] }),
        ("f2", FreeProduct { orders: vec![None, None], letters: vec![(0, 1), (1, 1), (0, -1), (1, -1)] }),
        ("zz2", FreeProduct { orders: vec![None, Some(2)], letters: vec![(0, 1), (1, 1), (0, -1)] }),
    ]
}
