//! Plain-text `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is also accepted as a command-line
//! override through [`ExperimentSpec::set`].
//!
//! | key | values |
//! |-----|--------|
//! | `dataset` | edge-list path, or `symphony:<n>` for a Symphony finger graph |
//! | `directed` | `true`/`false`: symmetrize arcs of a directed edge list |
//! | `label` | prefix for output files |
//! | `output` | output directory |
//! | `scheme` | `random`, `direct`, `greedy`, `smart` |
//! | `metric` | `ring-distance`, `hop-count` |
//! | `distance` | `circular`, `literal-abs` |
//! | `ordering` | `random`, `descending-degree`, `ascending-degree` |
//! | `unit` | `sweep`, `attempt` |
//! | `strength` | `common-neighbors`, `id-distance` |
//! | `iterations`, `smart_width`, `metrics_every`, `sample_cap`, `max_hops` | integers |
//! | `hop_mode` | `greedy`, `bfs` |
//! | `k` | long links per slot, or `auto` for `⌈log₂ n⌉` |
//! | `id_mode` | `uniform`, `even` |
//! | `seeds` | comma-separated replicate seeds |
//! | `replicates`, `base_seed` | seeds `base_seed .. base_seed + replicates` |

use std::path::PathBuf;
use std::str::FromStr;

use super::{DatasetSource, ExperimentSpec};
use crate::engine::{CostMetric, ExecutionOrder, IterationUnit, Scheme};
use crate::error::{Error, Result};
use crate::graph::StrengthMode;
use crate::metrics::HopMode;
use crate::overlay::{DistanceMode, IdMode};

macro_rules! keyword_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl KeywordEnum for $ty {
            fn parse_keyword(s: &str) -> Option<Self> {
                match s {
                    $($name => Some($variant),)+
                    _ => None,
                }
            }
            fn keyword(&self) -> &'static str {
                $(if *self == $variant { return $name; })+
                unreachable!()
            }
            fn keywords() -> &'static [&'static str] {
                &[$($name),+]
            }
        }
    };
}

/// Enums spelled as kebab-case keywords in configs and on the command line.
pub trait KeywordEnum: Sized + PartialEq + 'static {
    fn parse_keyword(s: &str) -> Option<Self>;
    fn keyword(&self) -> &'static str;
    fn keywords() -> &'static [&'static str];
}

keyword_enum!(Scheme {
    "random" => Scheme::Random,
    "direct" => Scheme::Direct,
    "greedy" => Scheme::Greedy,
    "smart" => Scheme::Smart,
});
keyword_enum!(CostMetric {
    "ring-distance" => CostMetric::RingDistance,
    "hop-count" => CostMetric::HopCount,
});
keyword_enum!(DistanceMode {
    "circular" => DistanceMode::Circular,
    "literal-abs" => DistanceMode::LiteralAbs,
});
keyword_enum!(ExecutionOrder {
    "random" => ExecutionOrder::RandomOrder,
    "descending-degree" => ExecutionOrder::DescendingDegree,
    "ascending-degree" => ExecutionOrder::AscendingDegree,
});
keyword_enum!(IterationUnit {
    "sweep" => IterationUnit::Sweep,
    "attempt" => IterationUnit::Attempt,
});
keyword_enum!(StrengthMode {
    "common-neighbors" => StrengthMode::CommonNeighbors,
    "id-distance" => StrengthMode::IdDistance,
});
keyword_enum!(HopMode {
    "greedy" => HopMode::GreedyRoute,
    "bfs" => HopMode::Bfs,
});
keyword_enum!(IdMode {
    "uniform" => IdMode::UniformRandom,
    "even" => IdMode::EvenlySpaced,
});

pub fn parse_keyword<E: KeywordEnum>(key: &str, value: &str) -> Result<E> {
    E::parse_keyword(value).ok_or_else(|| {
        Error::Config(format!("{key}: unknown value {value:?}, expected one of {}", E::keywords().join(", ")))
    })
}

fn parse_num<N: FromStr>(key: &str, value: &str) -> Result<N> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

impl DatasetSource {
    pub fn parse(value: &str, directed: bool) -> Result<Self> {
        if let Some(n) = value.strip_prefix("symphony:") {
            return Ok(DatasetSource::SymphonyFingers {
                n: parse_num("dataset", n)?,
            });
        }
        Ok(DatasetSource::EdgeList {
            path: PathBuf::from(value),
            directed,
        })
    }
}

impl ExperimentSpec {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (key, value) = (key.trim(), value.trim());
        let g = &mut self.gossip;
        match key {
            "dataset" => {
                let directed = matches!(self.dataset, DatasetSource::EdgeList { directed: true, .. });
                self.dataset = DatasetSource::parse(value, directed)?;
            }
            "directed" => {
                let flag = parse_bool(key, value)?;
                if let DatasetSource::EdgeList { directed, .. } = &mut self.dataset {
                    *directed = flag;
                }
            }
            "label" => self.label = value.to_string(),
            "output" => self.output_dir = PathBuf::from(value),
            "scheme" => g.scheme = parse_keyword(key, value)?,
            "metric" => g.metric = parse_keyword(key, value)?,
            "distance" => g.distance = parse_keyword(key, value)?,
            "ordering" => g.ordering = parse_keyword(key, value)?,
            "unit" => g.unit = parse_keyword(key, value)?,
            "strength" => g.strength_mode = parse_keyword(key, value)?,
            "hop_mode" => g.metrics.hop_mode = parse_keyword(key, value)?,
            "iterations" => g.iterations = parse_num(key, value)?,
            "smart_width" => g.smart_width = parse_num(key, value)?,
            "metrics_every" => g.metrics_every = parse_num(key, value)?,
            "sample_cap" => g.metrics.sample_cap = parse_num(key, value)?,
            "max_hops" => g.metrics.max_hops = parse_num(key, value)?,
            "k" => {
                self.k = match value {
                    "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "id_mode" => self.id_mode = parse_keyword(key, value)?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| parse_num(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "replicates" | "base_seed" => {
                let base = if key == "base_seed" {
                    parse_num(key, value)?
                } else {
                    self.seeds.first().copied().unwrap_or(0)
                };
                let count = if key == "replicates" {
                    parse_num(key, value)?
                } else {
                    self.seeds.len().max(1)
                };
                self.seeds = (base..base + count as u64).collect();
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file body.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                reason: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round() {
        let mut spec = ExperimentSpec::default();
        spec.apply_config(
            "# FB run\ndataset = data/facebook_combined.txt\nscheme = smart\nsmart_width=3\nk = 10\nreplicates = 3\nbase_seed = 7\nordering = descending-degree\n",
        )
        .unwrap();
        assert_eq!(spec.gossip.scheme, Scheme::Smart);
        assert_eq!(spec.gossip.smart_width, 3);
        assert_eq!(spec.k, Some(10));
        assert_eq!(spec.seeds, vec![7, 8, 9]);
        assert_eq!(spec.gossip.ordering, ExecutionOrder::DescendingDegree);
        assert!(matches!(spec.dataset, DatasetSource::EdgeList { directed: false, .. }));
        spec.set("directed", "true").unwrap();
        assert!(matches!(spec.dataset, DatasetSource::EdgeList { directed: true, .. }));
    }

    #[test]
    fn config_errors_name_the_line() {
        let mut spec = ExperimentSpec::default();
        let err = spec.apply_config("scheme = direct\nscheme = sideways\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(spec.set("colour", "blue").is_err());
        assert!(spec.apply_config("no equals sign").is_err());
    }

    #[test]
    fn keywords_round_trip() {
        for s in Scheme::keywords() {
            assert_eq!(Scheme::parse_keyword(s).unwrap().keyword(), *s);
        }
        for s in ExecutionOrder::keywords() {
            assert_eq!(ExecutionOrder::parse_keyword(s).unwrap().keyword(), *s);
        }
    }

    #[test]
    fn symphony_generator_source() {
        assert_eq!(
            DatasetSource::parse("symphony:10000", false).unwrap(),
            DatasetSource::SymphonyFingers { n: 10000 }
        );
    }
}
