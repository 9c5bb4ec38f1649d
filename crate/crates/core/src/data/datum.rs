use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// A non-missing cell value. Numbers serialize as JSON numbers, text as
/// strings, so category lists round-trip without tagging.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Datum {
    Num(f64),
    Text(String),
}

impl Datum {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Datum::Num(v) => Some(*v),
            Datum::Text(_) => None,
        }
    }

    fn num_key(v: f64) -> u64 {
        // -0.0 and 0.0 compare equal, so they must hash equal
        if v == 0.0 {
            0f64.to_bits()
        } else {
            v.to_bits()
        }
    }
}

impl PartialEq for Datum {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Datum {}

impl PartialOrd for Datum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Datum {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Datum::Num(a), Datum::Num(b)) => {
                if a == b {
                    Ordering::Equal
                } else {
                    a.total_cmp(b)
                }
            }
            (Datum::Num(_), Datum::Text(_)) => Ordering::Less,
            (Datum::Text(_), Datum::Num(_)) => Ordering::Greater,
            (Datum::Text(a), Datum::Text(b)) => a.cmp(b),
        }
    }
}

impl Hash for Datum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Datum::Num(v) => {
                0u8.hash(state);
                Self::num_key(*v).hash(state);
            }
            Datum::Text(s) => {
                1u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl From<&str> for Datum {
    fn from(s: &str) -> Self {
        Datum::Text(s.to_string())
    }
}

impl From<f64> for Datum {
    fn from(v: f64) -> Self {
        Datum::Num(v)
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Num(v) => f.write_str(&fmt_num(*v)),
            Datum::Text(s) => f.write_str(s),
        }
    }
}

/// Shortest human form of a number: `65`, `3.5`, `0.1`.
pub fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}
