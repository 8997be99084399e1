//! Negative (`None`) pair sampling.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pairs::LabeledPair;
use crate::error::{Error, Result};
use crate::relation::RelationClass;

/// Ordered pairs over `ids`, excluding self-pairs and any pair that is
/// related by a positive in either direction.
struct Admissible<'a> {
    ids: Vec<&'a str>,
    blocked: HashSet<(&'a str, &'a str)>,
}

impl<'a> Admissible<'a> {
    fn new(positives: &'a [LabeledPair], ids: &'a BTreeSet<String>) -> Self {
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        let mut blocked = HashSet::new();
        for p in positives {
            blocked.insert((p.seed_id.as_str(), p.target_id.as_str()));
            blocked.insert((p.target_id.as_str(), p.seed_id.as_str()));
        }
        Self { ids, blocked }
    }

    fn is_admissible(&self, s: &str, t: &str) -> bool {
        s != t && !self.blocked.contains(&(s, t))
    }

    fn count(&self) -> usize {
        let n = self.ids.len();
        let members: HashSet<&str> = self.ids.iter().copied().collect();
        let blocked_inside = self
            .blocked
            .iter()
            .filter(|(s, t)| s != t && members.contains(s) && members.contains(t))
            .count();
        n * n.saturating_sub(1) - blocked_inside
    }

    fn enumerate(&self) -> Vec<(&'a str, &'a str)> {
        let mut out = Vec::new();
        for &s in &self.ids {
            for &t in &self.ids {
                if self.is_admissible(s, t) {
                    out.push((s, t));
                }
            }
        }
        out
    }
}

/// Draws `n` distinct ordered pairs labeled `None`, uniformly from the pairs
/// over `ids` that are not self-pairs and share no positive relation in
/// either direction.
///
/// Sampling is by rejection; when `n` is more than half the admissible set
/// the admissible pairs are enumerated and shuffled instead.
pub fn negative_sample(
    positives: &[LabeledPair],
    ids: &BTreeSet<String>,
    n: usize,
    rng_seed: u64,
) -> Result<Vec<LabeledPair>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let adm = Admissible::new(positives, ids);
    let available = adm.count();
    if n > available {
        return Err(Error::InsufficientPairs {
            requested: n,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let chosen: Vec<(&str, &str)> = if 2 * n > available {
        let mut all = adm.enumerate();
        all.shuffle(&mut rng);
        all.truncate(n);
        all
    } else {
        let mut taken = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        let m = adm.ids.len();
        while out.len() < n {
            let s = adm.ids[rng.gen_range(0..m)];
            let t = adm.ids[rng.gen_range(0..m)];
            if adm.is_admissible(s, t) && taken.insert((s, t)) {
                out.push((s, t));
            }
        }
        out
    };
    Ok(chosen
        .into_iter()
        .map(|(s, t)| LabeledPair::new(s, t, RelationClass::None))
        .collect())
}

/// Ids appearing in any pair; the default pool for negative sampling.
pub fn id_pool(pairs: &[LabeledPair]) -> BTreeSet<String> {
    pairs
        .iter()
        .flat_map(|p| [p.seed_id.clone(), p.target_id.clone()])
        .collect()
}
