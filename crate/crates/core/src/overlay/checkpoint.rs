//! Text checkpoint of a ring together with its placement.
//!
//! ```text
//! socialdht-overlay 1
//! slots <n> k <k>
//! <slot_id> <occupant> [<target>@<point> ...]
//! ```
//!
//! One line per slot in slot order. `target` is a slot index, `point` the ring point the
//! long link was drawn for. Floats are written in shortest round-trip form, so reading a
//! checkpoint back yields the identical ring. Blank lines and `#` comments are ignored.

use std::io::{BufRead, Write};

use super::{Placement, Ring};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CHECKPOINT_MAGIC: &str = "socialdht-overlay";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<T: Scalar, W: Write>(ring: &Ring<T>, placement: &Placement, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}")?;
    writeln!(out, "slots {} k {}", ring.len(), ring.k())?;
    for slot in 0..ring.len() {
        write!(out, "{} {}", ring.id(slot), placement.user_at(slot))?;
        for (t, p) in ring.long_links(slot).iter().zip(ring.long_points(slot)) {
            write!(out, " {t}@{p}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_checkpoint<T: Scalar, R: BufRead>(reader: R) -> Result<(Ring<T>, Placement)> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty() && !l.trim_start().starts_with('#')));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((n, Err(e))) => Err(Error::Parse {
                line: n,
                reason: e.to_string(),
            }),
            None => Err(Error::Parse {
                line: 0,
                reason: format!("unexpected end of checkpoint, expected {what}"),
            }),
        }
    };
    let bad = |line: usize, reason: String| Error::Parse { line, reason };

    let (ln, header) = next("header")?;
    match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [CHECKPOINT_MAGIC, v] if v.parse() == Ok(CHECKPOINT_VERSION) => {}
        _ => return Err(bad(ln, format!("not a version {CHECKPOINT_VERSION} overlay checkpoint"))),
    }
    let (ln, dims) = next("slot count")?;
    let (n, k) = match dims.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["slots", n, "k", k] => (
            n.parse::<usize>().map_err(|e| bad(ln, e.to_string()))?,
            k.parse::<usize>().map_err(|e| bad(ln, e.to_string()))?,
        ),
        _ => return Err(bad(ln, "expected `slots <n> k <k>`".into())),
    };

    let mut ids = Vec::with_capacity(n);
    let mut occupants = Vec::with_capacity(n);
    let mut links = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = next("slot line")?;
        let mut fields = line.split_whitespace();
        let id: T = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad(ln, "missing or invalid slot id".into()))?;
        let occupant: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad(ln, "missing or invalid occupant".into()))?;
        let mut slot_links = Vec::new();
        let mut slot_points = Vec::new();
        for field in fields {
            let (t, p) = field
                .split_once('@')
                .ok_or_else(|| bad(ln, format!("long link {field:?} is not target@point")))?;
            slot_links.push(t.parse::<usize>().map_err(|e| bad(ln, e.to_string()))?);
            slot_points.push(p.parse::<T>().map_err(|_| bad(ln, format!("invalid point {p:?}")))?);
        }
        ids.push(id);
        occupants.push(occupant);
        links.push(slot_links);
        points.push(slot_points);
    }
    let ring = Ring::from_parts_with_points(ids, k, links, points)?;
    let placement = Placement::from_slot_to_user(occupants)?;
    Ok((ring, placement))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlay::{build_ring, IdMode};
    use rand::SeedableRng;

    #[test]
    fn round_trip_is_exact() {
        let ring = build_ring::<f64>(120, 7, 8, IdMode::UniformRandom).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let placement = Placement::random(120, &mut rng);
        let mut buf = Vec::new();
        write_checkpoint(&ring, &placement, &mut buf).unwrap();
        let (r2, p2) = read_checkpoint::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(r2, ring);
        assert_eq!(p2, placement);
    }

    #[test]
    fn rejects_wrong_header_and_truncation() {
        assert!(read_checkpoint::<f64, _>("socialdht-overlay 9\n".as_bytes()).is_err());
        let text = "socialdht-overlay 1\nslots 3 k 0\n0.2 0\n0.5 1\n";
        assert!(read_checkpoint::<f64, _>(text.as_bytes()).is_err());
        let text = "socialdht-overlay 1\nslots 3 k 1\n0.2 0 1@0.5\n0.5 1\n0.9 1\n";
        assert!(matches!(read_checkpoint::<f64, _>(text.as_bytes()), Err(Error::InvalidPlacement(_))));
    }
}
