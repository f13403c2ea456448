use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use super::{FundamentalGroup, GeneratingSet, NormalForm};
use crate::BudgetExceeded;

pub const DEFAULT_BUDGET: usize = 2_000_000;

/// The ball of radius `radius` about the identity in the Cayley graph for
/// the symmetric generating set, with all generator edges between its points.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub radius: usize,
    pub generators: GeneratingSet,
    pub elements: Vec<NormalForm>,
    /// Word length of each element.
    pub layer: Vec<u32>,
    /// Sorted neighbour indices inside the ball.
    pub adjacency: Vec<Vec<u32>>,
    index: HashMap<NormalForm, u32>,
}

/// Breadth-first enumeration by right multiplication with the symmetric generating set.
pub fn word_metric_ball(fg: &FundamentalGroup, radius: usize, budget: usize) -> Result<CayleyBall, BudgetExceeded> {
    let generators = fg.symmetric_generating_set();
    let mut elements = vec![fg.identity()];
    let mut layer = vec![0u32];
    let mut index = HashMap::from([(fg.identity(), 0u32)]);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new()];
    let mut frontier: Vec<u32> = vec![0];
    for k in 0..=radius {
        let products: Vec<Vec<NormalForm>> = frontier
            .par_iter()
            .map(|&i| generators.elements.iter().map(|s| fg.multiply(&elements[i as usize], s)).collect())
            .collect();
        let mut next = Vec::new();
        for (&i, prods) in frontier.iter().zip(products) {
            for p in prods {
                let j = match index.get(&p) {
                    Some(&j) => j,
                    None if k < radius => {
                        let j = elements.len() as u32;
                        if elements.len() >= budget {
                            return Err(BudgetExceeded { limit: budget });
                        }
                        index.insert(p.clone(), j);
                        elements.push(p);
                        layer.push(k as u32 + 1);
                        adjacency.push(Vec::new());
                        next.push(j);
                        j
                    }
                    None => continue,
                };
                if j != i {
                    adjacency[i as usize].push(j);
                    adjacency[j as usize].push(i);
                }
            }
        }
        frontier = next;
    }
    for a in &mut adjacency {
        a.sort_unstable();
        a.dedup();
    }
    Ok(CayleyBall { radius, generators, elements, layer, adjacency, index })
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &NormalForm) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }

    pub fn contains(&self, x: &NormalForm) -> bool {
        self.index.contains_key(x)
    }

    /// Word length of `x` when it lies in the ball.
    pub fn length(&self, x: &NormalForm) -> Option<usize> {
        self.index_of(x).map(|i| self.layer[i] as usize)
    }

    /// Sizes of the spheres of radius `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &l in &self.layer {
            out[l as usize] += 1;
        }
        out
    }

    /// Indices of elements of length at most `r`.
    pub fn within(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.layer[i] as usize <= r).collect()
    }

    /// Exact `d_S(x, y)` when it is at most the radius.
    pub fn word_distance(&self, fg: &FundamentalGroup, x: &NormalForm, y: &NormalForm) -> Option<usize> {
        self.length(&fg.multiply(&fg.invert(x), y))
    }

    /// Breadth-first distances inside the ball's own graph from a set of sources.
    pub fn graph_distances(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of undirected generator edges.
    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}
