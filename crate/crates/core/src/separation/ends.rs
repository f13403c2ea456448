use serde::{Deserialize, Serialize};

use super::{r_components, GraphMetric, SeparationError};
use crate::fundgroup::{word_metric_ball, FundamentalGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndsVerdict {
    Zero,
    One,
    Two,
    InfiniteGrowing,
}

impl std::fmt::Display for EndsVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EndsVerdict::Zero => "0",
            EndsVerdict::One => "1",
            EndsVerdict::Two => "2",
            EndsVerdict::InfiniteGrowing => "infinite",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndsReport {
    pub radii: Vec<usize>,
    /// Unbounded components of the complement of each inner ball.
    pub counts: Vec<usize>,
    pub outer_radius: usize,
    pub noise_floor: usize,
    pub verdict: EndsVerdict,
}

/// Counts the components of `B(outer) \ B(n)` that reach the outer sphere and
/// have at least `noise_floor` points, for each `n` in `radii`.
///
/// The outer radius is `max(radii) + max(2, min(radii))` and the noise floor
/// defaults to `min(radii)`.
pub fn ends_estimate(
    fg: &FundamentalGroup,
    radii: &[usize],
    noise_floor: Option<usize>,
    budget: usize,
) -> Result<EndsReport, SeparationError> {
    assert!(!radii.is_empty() && radii.windows(2).all(|w| w[0] < w[1]), "radii must be increasing");
    let min = radii[0];
    let max = *radii.last().unwrap();
    let outer = max + min.max(2);
    let noise_floor = noise_floor.unwrap_or(min);
    let ball = word_metric_ball(fg, outer, budget)?;
    let exhausted = ball.sphere_sizes()[outer] == 0;
    let counts: Vec<usize> = radii
        .iter()
        .map(|&n| {
            let inner: Vec<bool> = ball.layer.iter().map(|&l| l as usize <= n).collect();
            let comps = r_components(&GraphMetric { ball: &ball }, &inner, 1);
            let mut touches = vec![false; comps.count()];
            for (i, l) in comps.label.iter().enumerate() {
                if let Some(c) = l {
                    touches[*c] |= ball.layer[i] as usize == outer;
                }
            }
            (0..comps.count()).filter(|&c| touches[c] && comps.sizes[c] >= noise_floor).count()
        })
        .collect();
    let last = counts[counts.len() - 1];
    let stable = counts.len() < 2 || counts[counts.len() - 2] == last;
    let verdict = match last {
        0 if exhausted && stable => EndsVerdict::Zero,
        1 if stable => EndsVerdict::One,
        2 if stable => EndsVerdict::Two,
        _ if counts.len() >= 2 && counts.windows(2).all(|w| w[0] < w[1]) && last > 2 => EndsVerdict::InfiniteGrowing,
        _ => return Err(SeparationError::Inconclusive { counts }),
    };
    Ok(EndsReport { radii: radii.to_vec(), counts, outer_radius: outer, noise_floor, verdict })
}
