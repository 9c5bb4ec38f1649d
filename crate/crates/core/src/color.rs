//! Colors and value-to-color palettes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::Datum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgb(pub [u8; 3]);

/// Mark color when Color is unbound.
pub const DEFAULT_MARK: Rgb = Rgb([0x4c, 0x78, 0xa8]);

/// Cyclic palette for categorical hue encodings.
pub const CATEGORY_CYCLE: [Rgb; 10] = [
    Rgb([0x4e, 0x79, 0xa7]),
    Rgb([0xf2, 0x8e, 0x2b]),
    Rgb([0xe1, 0x57, 0x59]),
    Rgb([0x76, 0xb7, 0xb2]),
    Rgb([0x59, 0xa1, 0x4f]),
    Rgb([0xed, 0xc9, 0x48]),
    Rgb([0xb0, 0x7a, 0xa1]),
    Rgb([0xff, 0x9d, 0xa7]),
    Rgb([0x9c, 0x75, 0x5f]),
    Rgb([0xba, 0xb0, 0xac]),
];

const RAMP_LOW: Rgb = Rgb([0xde, 0xeb, 0xf7]);
const RAMP_HIGH: Rgb = Rgb([0x08, 0x51, 0x9c]);

impl Rgb {
    pub fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let t = t.clamp(0.0, 1.0);
        let mut out = [0u8; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.0[i] as f64;
            let b = other.0[i] as f64;
            *o = (a + (b - a) * t).round() as u8;
        }
        Rgb(out)
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseColorError(pub String);

impl fmt::Display for ParseColorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid color `{}` (expected #rgb or #rrggbb)", self.0)
    }
}

impl std::error::Error for ParseColorError {}

impl FromStr for Rgb {
    type Err = ParseColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseColorError(s.to_string());
        let hex = s.trim().strip_prefix('#').ok_or_else(err)?;
        if !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(err());
        }
        let nibble = |i: usize| u8::from_str_radix(&hex[i..i + 1], 16).unwrap();
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).unwrap();
        match hex.len() {
            3 => Ok(Rgb([nibble(0) * 17, nibble(1) * 17, nibble(2) * 17])),
            6 => Ok(Rgb([byte(0), byte(2), byte(4)])),
            _ => Err(err()),
        }
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaletteScale {
    /// Exact value lookup.
    Categorical,
    /// Intervals hold their color; gaps interpolate between neighbours.
    Ramp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaletteKey {
    Value(Datum),
    Interval([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub key: PaletteKey,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorPalette {
    pub scale: PaletteScale,
    pub assignments: Vec<PaletteEntry>,
    pub default_color: Rgb,
    /// Carries user-demonstrated assignments.
    pub custom: bool,
}

impl ColorPalette {
    pub fn default_categorical(categories: &[Datum]) -> Self {
        ColorPalette {
            scale: PaletteScale::Categorical,
            assignments: categories
                .iter()
                .enumerate()
                .map(|(i, c)| PaletteEntry {
                    key: PaletteKey::Value(c.clone()),
                    color: CATEGORY_CYCLE[i % CATEGORY_CYCLE.len()],
                })
                .collect(),
            default_color: DEFAULT_MARK,
            custom: false,
        }
    }

    pub fn default_ramp(extent: [f64; 2]) -> Self {
        let [lo, hi] = extent;
        let mut assignments = vec![PaletteEntry { key: PaletteKey::Interval([lo, lo]), color: RAMP_LOW }];
        if hi > lo {
            assignments.push(PaletteEntry { key: PaletteKey::Interval([hi, hi]), color: RAMP_HIGH });
        }
        ColorPalette { scale: PaletteScale::Ramp, assignments, default_color: DEFAULT_MARK, custom: false }
    }

    /// Demonstrated value colors verbatim; every other category takes the next
    /// unused color of the cyclic palette.
    pub fn custom_categorical(categories: &[Datum], demonstrated: &[(Datum, Rgb)]) -> Self {
        let used: Vec<Rgb> = demonstrated.iter().map(|(_, c)| *c).collect();
        let mut free = CATEGORY_CYCLE.iter().copied().filter(|c| !used.contains(c)).collect::<Vec<_>>();
        if free.is_empty() {
            free = CATEGORY_CYCLE.to_vec();
        }
        let mut next = 0usize;
        let assignments = categories
            .iter()
            .map(|cat| {
                let color = match demonstrated.iter().find(|(v, _)| v == cat) {
                    Some((_, c)) => *c,
                    None => {
                        let c = free[next % free.len()];
                        next += 1;
                        c
                    }
                };
                PaletteEntry { key: PaletteKey::Value(cat.clone()), color }
            })
            .collect();
        ColorPalette { scale: PaletteScale::Categorical, assignments, default_color: DEFAULT_MARK, custom: true }
    }

    /// Each demonstrated interval keeps its color; values in between are
    /// interpolated between the neighbouring anchors.
    pub fn custom_ramp(mut intervals: Vec<([f64; 2], Rgb)>) -> Self {
        intervals.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
        ColorPalette {
            scale: PaletteScale::Ramp,
            assignments: intervals
                .into_iter()
                .map(|(iv, color)| PaletteEntry { key: PaletteKey::Interval(iv), color })
                .collect(),
            default_color: DEFAULT_MARK,
            custom: true,
        }
    }

    pub fn color_of(&self, value: &Datum) -> Rgb {
        match self.scale {
            PaletteScale::Categorical => self
                .assignments
                .iter()
                .find(|e| matches!(&e.key, PaletteKey::Value(v) if v == value))
                .map(|e| e.color)
                .unwrap_or(self.default_color),
            PaletteScale::Ramp => match value.as_f64() {
                Some(v) => self.ramp_color(v),
                None => self.default_color,
            },
        }
    }

    pub fn ramp_color(&self, v: f64) -> Rgb {
        let anchors: Vec<([f64; 2], Rgb)> = self
            .assignments
            .iter()
            .filter_map(|e| match e.key {
                PaletteKey::Interval(iv) => Some((iv, e.color)),
                PaletteKey::Value(ref d) => d.as_f64().map(|x| ([x, x], e.color)),
            })
            .collect();
        let Some(first) = anchors.first() else {
            return self.default_color;
        };
        if v <= first.0[0] {
            return first.1;
        }
        for (i, (iv, color)) in anchors.iter().enumerate() {
            if v >= iv[0] && v <= iv[1] {
                return *color;
            }
            if let Some((next_iv, next_color)) = anchors.get(i + 1) {
                if v > iv[1] && v < next_iv[0] {
                    let t = (v - iv[1]) / (next_iv[0] - iv[1]);
                    return color.lerp(*next_color, t);
                }
            }
        }
        anchors.last().map(|a| a.1).unwrap_or(self.default_color)
    }

    /// Assignments must not overlap over the attribute's domain.
    pub fn is_disjoint(&self) -> bool {
        let keys = &self.assignments;
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                let overlap = match (&a.key, &b.key) {
                    (PaletteKey::Value(x), PaletteKey::Value(y)) => x == y,
                    (PaletteKey::Interval(x), PaletteKey::Interval(y)) => x[0] <= y[1] && y[0] <= x[1],
                    (PaletteKey::Value(v), PaletteKey::Interval(iv))
                    | (PaletteKey::Interval(iv), PaletteKey::Value(v)) => {
                        v.as_f64().is_some_and(|x| x >= iv[0] && x <= iv[1])
                    }
                };
                if overlap {
                    return false;
                }
            }
        }
        true
    }
}
