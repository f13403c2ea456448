//! Smith normal form over the integers and abelian group invariants.

use serde::{Deserialize, Serialize};

/// A finitely generated abelian group `Z^rank + Z/d_1 + ... + Z/d_k` with
/// `1 < d_1 | d_2 | ... | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        if self.rank > 0 {
            parts.insert(0, if self.rank == 1 { "Z".into() } else { format!("Z^{}", self.rank) });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Diagonal entries of the Smith normal form of `m` (`rows x cols`), zeros dropped.
pub fn smith_diagonal(m: &[Vec<i64>], cols: usize) -> Vec<u64> {
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged relation matrix");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let rows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = min_nonzero(&a, t) else { break };
        a.swap(t, pr);
        for r in a.iter_mut() {
            r.swap(t, pc);
        }
        loop {
            let mut done = true;
            for i in t + 1..rows {
                let q = a[i][t] / a[t][t];
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / a[t][t];
                if q != 0 {
                    for r in a.iter_mut().skip(t) {
                        r[j] -= q * r[t];
                    }
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                let p = a[t][t];
                let bad = (t + 1..rows).find_map(|i| (t + 1..cols).find(|&j| a[i][j] % p != 0).map(|_| i));
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..cols {
                            a[t][j] += a[i][j];
                        }
                    }
                }
            } else {
                let (pr, pc) = min_nonzero_restricted(&a, t);
                a.swap(t, pr);
                for r in a.iter_mut() {
                    r.swap(t, pc);
                }
            }
        }
        diag.push(a[t][t].unsigned_abs() as u64);
        t += 1;
    }
    diag
}

fn min_nonzero(a: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, r) in a.iter().enumerate().skip(t) {
        for (j, &x) in r.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` beyond the diagonal.
fn min_nonzero_restricted(a: &[Vec<i128>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for (i, r) in a.iter().enumerate().skip(t) {
        let x = r[t];
        if x != 0 && (a[best.0][best.1] == 0 || x.abs() < a[best.0][best.1].abs()) {
            best = (i, t);
        }
    }
    for j in t..a[t].len() {
        let x = a[t][j];
        if x != 0 && (a[best.0][best.1] == 0 || x.abs() < a[best.0][best.1].abs()) {
            best = (t, j);
        }
    }
    best
}

/// Invariants of `Z^cols / <rows of m>`.
pub fn abelian_invariants(m: &[Vec<i64>], cols: usize) -> AbelianInvariants {
    let d = smith_diagonal(m, cols);
    let rank = cols - d.len();
    let mut torsion: Vec<u64> = d.into_iter().filter(|&x| x != 1).collect();
    torsion.sort_unstable();
    AbelianInvariants { rank, torsion }
}

/// Exponent-sum vector of a word over letters `±(i+1)`.
pub fn exponent_sums(word: &[i32], cols: usize) -> Vec<i64> {
    let mut v = vec![0; cols];
    for &l in word {
        v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
    }
    v
}
