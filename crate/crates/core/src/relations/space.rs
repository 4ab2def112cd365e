use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed integer interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub min: i64,
    pub max: i64,
}

impl Interval {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidSpace(format!("empty interval {min}..{max}")));
        }
        Ok(Interval { min, max })
    }

    /// The full machine-integer range, used for variables declared without bounds.
    pub const fn machine() -> Self {
        Interval {
            min: i64::MIN,
            max: i64::MAX,
        }
    }

    pub fn is_machine(&self) -> bool {
        *self == Self::machine()
    }

    pub fn size(&self) -> u128 {
        (self.max as i128 - self.min as i128 + 1) as u128
    }

    pub fn contains(&self, v: i64) -> bool {
        self.min <= v && v <= self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Int(Interval),
    Array { len: usize, elem: Interval },
}

impl Domain {
    pub fn width(&self) -> usize {
        match self {
            Domain::Int(_) => 1,
            Domain::Array { len, .. } => *len,
        }
    }

    pub fn elem(&self) -> Interval {
        match self {
            Domain::Int(i) => *i,
            Domain::Array { elem, .. } => *elem,
        }
    }

    pub fn is_array(&self) -> bool {
        matches!(self, Domain::Array { .. })
    }

    /// Number of values, or `None` when it does not fit in a `u128`.
    pub fn size(&self) -> Option<u128> {
        let e = self.elem().size();
        let mut acc: u128 = 1;
        for _ in 0..self.width() {
            acc = acc.checked_mul(e)?;
        }
        Some(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

/// Ordered list of typed variables; the universe `S` of states.
///
/// A state is laid out as a flat vector of slots (one per scalar, `len` per
/// array) in declaration order. State identifiers are the mixed-radix rank of
/// that vector, so identifier order is lexicographic order on the slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    vars: Vec<VarDecl>,
    offsets: Vec<usize>,
    width: usize,
}

pub type StateId = usize;

impl StateSpace {
    pub fn new(vars: Vec<VarDecl>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(vars.len());
        let mut width = 0;
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidSpace(format!("duplicate variable `{}`", v.name)));
            }
            let elem = v.domain.elem();
            if elem.min > elem.max {
                return Err(Error::InvalidSpace(format!("empty domain for `{}`", v.name)));
            }
            if let Domain::Array { len: 0, .. } = v.domain {
                return Err(Error::InvalidSpace(format!("zero-length array `{}`", v.name)));
            }
            offsets.push(width);
            width += v.domain.width();
        }
        Ok(StateSpace {
            vars,
            offsets,
            width,
        })
    }

    /// Single scalar variable over `[min, max]`.
    pub fn scalar(name: &str, min: i64, max: i64) -> Result<Self> {
        StateSpace::new(vec![VarDecl {
            name: name.to_string(),
            domain: Domain::Int(Interval::new(min, max)?),
        }])
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn offset(&self, var: usize) -> usize {
        self.offsets[var]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Interval constraining slot `slot`.
    pub fn slot_interval(&self, slot: usize) -> Interval {
        let var = match self.offsets.binary_search(&slot) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.vars[var].domain.elem()
    }

    /// Number of states, or `None` on overflow.
    pub fn size(&self) -> Option<u128> {
        self.vars
            .iter()
            .try_fold(1u128, |acc, v| acc.checked_mul(v.domain.size()?))
    }

    /// Number of states, failing when above `cap`.
    pub fn checked_size(&self, cap: u64) -> Result<usize> {
        match self.size() {
            Some(n) if n <= cap as u128 => Ok(n as usize),
            other => Err(Error::Capacity {
                what: "state enumeration",
                needed: other.map_or_else(|| "overflow".to_string(), |n| n.to_string()),
                cap,
            }),
        }
    }

    /// Extends the space with one more variable (block-local declarations).
    pub fn extend(&self, decl: VarDecl) -> Result<Self> {
        let mut vars = self.vars.clone();
        vars.push(decl);
        StateSpace::new(vars)
    }

    pub fn contains(&self, s: &State) -> bool {
        s.slots.len() == self.width
            && s
                .slots
                .iter()
                .enumerate()
                .all(|(i, v)| self.slot_interval(i).contains(*v))
    }

    /// Rank of `s`. Caller guarantees `s` is in the space and the space is enumerable.
    pub fn index(&self, s: &State) -> StateId {
        let mut id: usize = 0;
        for (i, v) in s.slots.iter().enumerate() {
            let iv = self.slot_interval(i);
            id = id * iv.size() as usize + (v - iv.min) as usize;
        }
        id
    }

    /// Inverse of [`StateSpace::index`].
    pub fn state(&self, mut id: StateId) -> State {
        let mut slots = vec![0i64; self.width];
        for i in (0..self.width).rev() {
            let iv = self.slot_interval(i);
            let size = iv.size() as usize;
            slots[i] = iv.min + (id % size) as i64;
            id /= size;
        }
        State { slots }
    }

    /// A state with every slot at zero, or at the interval minimum when zero is excluded.
    pub fn default_state(&self) -> State {
        let slots = (0..self.width)
            .map(|i| {
                let iv = self.slot_interval(i);
                if iv.contains(0) {
                    0
                } else {
                    iv.min
                }
            })
            .collect();
        State { slots }
    }

    /// Builds a state from named bindings. Scalars take `Int`, arrays take `Array`.
    pub fn state_from(&self, bindings: &BTreeMap<String, Binding>) -> Result<State> {
        let mut slots = Vec::with_capacity(self.width);
        for v in &self.vars {
            match (bindings.get(&v.name), &v.domain) {
                (Some(Binding::Int(x)), Domain::Int(_)) => slots.push(*x),
                (Some(Binding::Array(xs)), Domain::Array { len, .. }) if xs.len() == *len => {
                    slots.extend_from_slice(xs)
                }
                (None, _) => {
                    return Err(Error::InvalidState(format!("missing binding for `{}`", v.name)))
                }
                _ => {
                    return Err(Error::InvalidState(format!(
                        "binding for `{}` has the wrong shape",
                        v.name
                    )))
                }
            }
        }
        if bindings.len() != self.vars.len() {
            let extra = bindings
                .keys()
                .find(|k| self.position(k).is_none())
                .cloned()
                .unwrap_or_default();
            return Err(Error::InvalidState(format!("unknown variable `{extra}`")));
        }
        let s = State { slots };
        if !self.contains(&s) {
            return Err(Error::InvalidState(format!(
                "value out of domain in {}",
                self.render(&s)
            )));
        }
        Ok(s)
    }

    pub fn bindings(&self, s: &State) -> BTreeMap<String, Binding> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let off = self.offsets[i];
                let b = match v.domain {
                    Domain::Int(_) => Binding::Int(s.slots[off]),
                    Domain::Array { len, .. } => Binding::Array(s.slots[off..off + len].to_vec()),
                };
                (v.name.clone(), b)
            })
            .collect()
    }

    /// `name=value` rendering in declaration order, e.g. `a=[1,2] x=0`.
    pub fn render(&self, s: &State) -> String {
        let mut out = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let off = self.offsets[i];
            let txt = match v.domain {
                Domain::Int(_) => s.slots[off].to_string(),
                Domain::Array { len, .. } => {
                    let xs: Vec<String> =
                        s.slots[off..off + len].iter().map(|x| x.to_string()).collect();
                    format!("[{}]", xs.join(","))
                }
            };
            out.push(format!("{}={}", v.name, txt));
        }
        out.join(" ")
    }

    /// Parses the `name=value` format written by [`StateSpace::render`].
    /// Variables left out are bound to their default value.
    pub fn parse_state(&self, line: &str) -> Result<State> {
        let mut s = self.default_state();
        for tok in split_assignments(line) {
            let (name, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidState(format!("expected name=value, got `{tok}`")))?;
            let name = name.trim();
            let var = self
                .position(name)
                .ok_or_else(|| Error::InvalidState(format!("unknown variable `{name}`")))?;
            let off = self.offsets[var];
            let value = value.trim();
            let bad = |_| Error::InvalidState(format!("bad value `{value}` for `{name}`"));
            match self.vars[var].domain {
                Domain::Int(_) => s.slots[off] = value.parse().map_err(bad)?,
                Domain::Array { len, .. } => {
                    let inner = value
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| Error::InvalidState(format!("array `{name}` needs [..]")))?;
                    let xs: Vec<i64> = inner
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| t.trim().parse().map_err(bad))
                        .collect::<Result<_>>()?;
                    if xs.len() != len {
                        return Err(Error::InvalidState(format!(
                            "array `{name}` needs {len} elements"
                        )));
                    }
                    s.slots[off..off + len].copy_from_slice(&xs);
                }
            }
        }
        if !self.contains(&s) {
            return Err(Error::InvalidState(format!("value out of domain in `{line}`")));
        }
        Ok(s)
    }
}

fn split_assignments(line: &str) -> Vec<&str> {
    // whitespace-separated, but array literals may contain spaces after commas
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = None;
    for (i, c) in line.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&line[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&line[st..]);
    }
    out
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars
            .iter()
            .map(|v| match v.domain {
                Domain::Int(i) if i.is_machine() => v.name.clone(),
                Domain::Int(i) => format!("{}:{}..{}", v.name, i.min, i.max),
                Domain::Array { len, elem } => {
                    format!("{}[{}]:{}..{}", v.name, len, elem.min, elem.max)
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A valuation of every slot of a [`StateSpace`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub slots: Vec<i64>,
}

impl State {
    pub fn new(slots: Vec<i64>) -> Self {
        State { slots }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Binding {
    Int(i64),
    Array(Vec<i64>),
}

// JSON form: {"vars": [{"name": "x", "min": 0, "max": 4}, {"name": "a", "len": 3, "min": 0, "max": 1}]}
// min/max may be omitted for machine-range variables.

#[derive(Serialize, Deserialize)]
struct VarJson {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    vars: Vec<VarJson>,
}

impl Serialize for StateSpace {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let vars = self
            .vars
            .iter()
            .map(|v| {
                let elem = v.domain.elem();
                let (min, max) = if elem.is_machine() {
                    (None, None)
                } else {
                    (Some(elem.min), Some(elem.max))
                };
                VarJson {
                    name: v.name.clone(),
                    len: match v.domain {
                        Domain::Array { len, .. } => Some(len),
                        Domain::Int(_) => None,
                    },
                    min,
                    max,
                }
            })
            .collect();
        SpaceJson { vars }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StateSpace {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SpaceJson::deserialize(de)?;
        let mut vars = Vec::with_capacity(raw.vars.len());
        for v in raw.vars {
            let elem = Interval::new(v.min.unwrap_or(i64::MIN), v.max.unwrap_or(i64::MAX))
                .map_err(D::Error::custom)?;
            let domain = match v.len {
                Some(len) => Domain::Array { len, elem },
                None => Domain::Int(elem),
            };
            vars.push(VarDecl {
                name: v.name,
                domain,
            });
        }
        StateSpace::new(vars).map_err(D::Error::custom)
    }
}
