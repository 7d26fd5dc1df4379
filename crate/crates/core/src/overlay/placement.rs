use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Bijection between users and ring slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    user_to_slot: Vec<u32>,
    slot_to_user: Vec<u32>,
}

impl Placement {
    /// User `i` in slot `i`.
    pub fn identity(n: usize) -> Self {
        let ids: Vec<u32> = (0..n as u32).collect();
        Placement {
            user_to_slot: ids.clone(),
            slot_to_user: ids,
        }
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut slot_to_user: Vec<u32> = (0..n as u32).collect();
        slot_to_user.shuffle(rng);
        Self::from_slot_to_user_unchecked(slot_to_user)
    }

    /// `slot_to_user[s]` is the user occupying slot `s`; must be a permutation.
    pub fn from_slot_to_user(slot_to_user: Vec<usize>) -> Result<Self> {
        let n = slot_to_user.len();
        let mut seen = vec![false; n];
        for (slot, &u) in slot_to_user.iter().enumerate() {
            if u >= n {
                return Err(Error::InvalidPlacement(format!("slot {slot} holds unknown user {u}")));
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(Error::InvalidPlacement(format!("user {u} occupies two slots")));
            }
        }
        Ok(Self::from_slot_to_user_unchecked(
            slot_to_user.into_iter().map(|u| u as u32).collect(),
        ))
    }

    fn from_slot_to_user_unchecked(slot_to_user: Vec<u32>) -> Self {
        let mut user_to_slot = vec![0u32; slot_to_user.len()];
        for (slot, &u) in slot_to_user.iter().enumerate() {
            user_to_slot[u as usize] = slot as u32;
        }
        Placement {
            user_to_slot,
            slot_to_user,
        }
    }

    pub fn len(&self) -> usize {
        self.slot_to_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot_to_user.is_empty()
    }

    #[inline]
    pub fn slot_of(&self, user: usize) -> usize {
        self.user_to_slot[user] as usize
    }

    #[inline]
    pub fn user_at(&self, slot: usize) -> usize {
        self.slot_to_user[slot] as usize
    }

    pub fn slot_to_user(&self) -> impl Iterator<Item = usize> + '_ {
        self.slot_to_user.iter().map(|&u| u as usize)
    }

    /// Exchanges the slots of users `a` and `b`.
    pub fn swap_users(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.len();
        if a >= n {
            return Err(Error::UnknownUser(a));
        }
        if b >= n {
            return Err(Error::UnknownUser(b));
        }
        if a == b {
            return Err(Error::SelfPair(a));
        }
        self.user_to_slot.swap(a, b);
        self.slot_to_user[self.user_to_slot[a] as usize] = a as u32;
        self.slot_to_user[self.user_to_slot[b] as usize] = b as u32;
        Ok(())
    }

    /// Both maps are mutually inverse.
    pub fn is_consistent(&self) -> bool {
        self.user_to_slot.len() == self.slot_to_user.len()
            && self
                .slot_to_user
                .iter()
                .enumerate()
                .all(|(s, &u)| self.user_to_slot.get(u as usize) == Some(&(s as u32)))
    }
}
