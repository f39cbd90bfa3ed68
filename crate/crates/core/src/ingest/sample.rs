use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws `min(target, group size)` members from every group without
/// replacement. Groups are visited in key order with one shared generator, so
/// the result is a pure function of `(groups, target, seed)`. Sampled members
/// keep their original relative order.
pub fn balance_sample<K: Ord + Clone, T: Clone>(
    groups: &BTreeMap<K, Vec<T>>,
    target: usize,
    seed: u64,
) -> BTreeMap<K, Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    groups
        .iter()
        .map(|(key, members)| {
            let take = target.min(members.len());
            let mut picked = index::sample(&mut rng, members.len(), take).into_vec();
            picked.sort_unstable();
            (key.clone(), picked.into_iter().map(|i| members[i].clone()).collect())
        })
        .collect()
}
