//! Symphony overlay: fixed ring of slots, greedy routing and the user/slot placement.
//!
//! Finger tables belong to slots. Moving users between slots never changes the ring.

mod checkpoint;
mod placement;
mod rewire;
mod ring;
mod routing;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use placement::Placement;
pub use rewire::rewire_fingers_to_friends;
pub use ring::{build_ring, default_k, harmonic_distance, IdMode, Ring, LONG_LINK_RETRIES};
pub use routing::{circular_distance, DistanceMode, RoutePath};
