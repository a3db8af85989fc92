use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Measurement scenario: one-sided (many Alices, one Bob) or two-sided
/// (many Alices and Bobs), with predecessors' settings either unshared
/// (`*1`, averaged state) or shared (`*2`, averaged uncertainty).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Os1,
    Os2,
    Ts1,
    Ts2,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Os1, Scenario::Os2, Scenario::Ts1, Scenario::Ts2];

    pub fn is_two_sided(self) -> bool {
        matches!(self, Scenario::Ts1 | Scenario::Ts2)
    }

    /// True when the uncertainty is averaged over predecessor histories
    /// rather than evaluated on the history-averaged state.
    pub fn averages_uncertainty(self) -> bool {
        matches!(self, Scenario::Os2 | Scenario::Ts2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Os1 => "os1",
            Scenario::Os2 => "os2",
            Scenario::Ts1 => "ts1",
            Scenario::Ts2 => "ts2",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "os1" => Ok(Scenario::Os1),
            "os2" => Ok(Scenario::Os2),
            "ts1" => Ok(Scenario::Ts1),
            "ts2" => Ok(Scenario::Ts2),
            other => Err(format!("unknown scenario '{other}' (expected os1, os2, ts1, ts2)")),
        }
    }
}

/// Which of the two incompatible measurements an observer performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    X,
    Z,
}

impl Observable {
    pub const BOTH: [Observable; 2] = [Observable::X, Observable::Z];
}

/// All `2^len` measurement-choice histories, in lexicographic order with
/// `X < Z`.
pub fn histories(len: usize) -> impl Iterator<Item = Vec<Observable>> {
    (0..1usize << len).map(move |bits| {
        (0..len)
            .map(|k| {
                if bits >> (len - 1 - k) & 1 == 0 {
                    Observable::X
                } else {
                    Observable::Z
                }
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        assert!("os3".parse::<Scenario>().is_err());
    }

    #[test]
    fn history_enumeration() {
        assert_eq!(histories(0).collect::<Vec<_>>(), vec![Vec::<Observable>::new()]);
        let h: Vec<_> = histories(2).collect();
        assert_eq!(h.len(), 4);
        assert_eq!(h[1], vec![Observable::X, Observable::Z]);
        assert_eq!(h[2], vec![Observable::Z, Observable::X]);
    }
}
