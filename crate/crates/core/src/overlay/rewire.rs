use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{circular_distance, Placement, Ring};
use crate::graph::SocialGraph;
use crate::scalar::Scalar;

/// Finger-rewiring baseline: every long link of a slot is re-pointed at the slot of the
/// occupant's friend closest to the link's sampled ring point. Slots whose occupant has no
/// friends keep their harmonic targets. Equidistant friends are chosen between at random.
pub fn rewire_fingers_to_friends<T: Scalar>(
    ring: &Ring<T>,
    placement: &Placement,
    graph: &SocialGraph,
    seed: u64,
) -> Ring<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rewired = Vec::with_capacity(ring.len());
    for slot in 0..ring.len() {
        let occupant = placement.user_at(slot);
        let friend_slots: Vec<u32> = graph
            .neighbors(occupant)
            .iter()
            .map(|&f| placement.slot_of(f as usize) as u32)
            .collect();
        let original = ring.long_links(slot);
        if friend_slots.is_empty() {
            rewired.push(original.to_vec());
            continue;
        }
        let mut chosen: Vec<u32> = Vec::with_capacity(original.len());
        for (&harmonic_target, &point) in original.iter().zip(ring.long_points(slot)) {
            let mut best: Vec<u32> = Vec::new();
            let mut best_distance = T::infinity();
            for &fs in friend_slots.iter().filter(|fs| !chosen.contains(fs)) {
                let d = circular_distance(ring.id(fs as usize), point);
                if d < best_distance {
                    best_distance = d;
                    best.clear();
                    best.push(fs);
                } else if d == best_distance {
                    best.push(fs);
                }
            }
            let pick = match best.len() {
                0 if !chosen.contains(&harmonic_target) => Some(harmonic_target),
                0 => None,
                1 => Some(best[0]),
                m => Some(best[rng.random_range(0..m)]),
            };
            chosen.extend(pick);
        }
        rewired.push(chosen);
    }
    ring.replace_long_links(rewired)
}
