//! The method-code grammar: 55 four-to-five character codes that name one
//! prompt configuration each.
//!
//! A code is a structure part followed by a demonstration part:
//!
//! ```text
//! structure: XX | <hop><strategy> | <hop>'<strategy>   hop in {1,2}
//! demo:      XX | <scope><strategy>                    scope in {G,C}
//! strategy:  R (random) | P (pagerank) | S (similarity)
//! ```
//!
//! Primed structure (`1'R` .. `2'S`) turns labeled neighbors into the
//! demonstrations themselves, so it pairs only with demo `XX`. That yields
//! 7 x 7 unprimed combinations plus 6 primed ones: 55 codes total.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("empty method code")]
    Empty,
    #[error("method code {0:?}: structure part is truncated")]
    TruncatedStructure(String),
    #[error("method code {code:?}: unknown hop {found:?} (expected '1', '2', or \"XX\")")]
    UnknownHop { code: String, found: char },
    #[error("method code {code:?}: unknown {part} strategy {found:?} (expected 'R', 'P', or 'S')")]
    UnknownStrategy {
        code: String,
        part: &'static str,
        found: char,
    },
    #[error("method code {0:?}: demonstration part is truncated")]
    TruncatedDemo(String),
    #[error("method code {code:?}: bad demonstration token {token:?} (expected \"XX\", or 'G'/'C' plus a strategy)")]
    BadDemoToken { code: String, token: String },
    #[error("method code {0:?}: primed structure cannot carry a demonstration part")]
    PrimedWithDemo(String),
    #[error("method code {code:?}: unexpected trailing {rest:?}")]
    TrailingInput { code: String, rest: String },
}

/// Selection mechanism shared by neighbor and demonstration picking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Random,
    PageRank,
    Similarity,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::PageRank, Strategy::Similarity];

    fn letter(self) -> char {
        match self {
            Strategy::Random => 'R',
            Strategy::PageRank => 'P',
            Strategy::Similarity => 'S',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'R' => Some(Strategy::Random),
            'P' => Some(Strategy::PageRank),
            'S' => Some(Strategy::Similarity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hop {
    One,
    Two,
}

impl Hop {
    pub fn value(self) -> u8 {
        match self {
            Hop::One => 1,
            Hop::Two => 2,
        }
    }
}

/// Demonstration pool scope: whole training set, or one pick per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemoScope {
    Global,
    ClassAware,
}

impl DemoScope {
    fn letter(self) -> char {
        match self {
            DemoScope::Global => 'G',
            DemoScope::ClassAware => 'C',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructurePart {
    None,
    Neighbors {
        hop: Hop,
        strategy: Strategy,
        primed: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemoPart {
    None,
    Demos { scope: DemoScope, strategy: Strategy },
}

/// One of the 55 prompt configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodCode {
    structure: StructurePart,
    demo: DemoPart,
}

impl MethodCode {
    /// Build a code, enforcing the primed-pairs-with-XX rule.
    pub fn new(structure: StructurePart, demo: DemoPart) -> Result<Self, CodeError> {
        let code = Self { structure, demo };
        if code.is_primed() && !matches!(demo, DemoPart::None) {
            return Err(CodeError::PrimedWithDemo(code.to_string()));
        }
        Ok(code)
    }

    pub fn structure(&self) -> StructurePart {
        self.structure
    }

    pub fn demo(&self) -> DemoPart {
        self.demo
    }

    pub fn is_primed(&self) -> bool {
        matches!(self.structure, StructurePart::Neighbors { primed: true, .. })
    }

    pub fn wants_structure(&self) -> bool {
        !matches!(self.structure, StructurePart::None)
    }

    pub fn wants_demos(&self) -> bool {
        !matches!(self.demo, DemoPart::None)
    }

    /// Whether rendering this code needs global PageRank scores.
    pub fn needs_pagerank(&self) -> bool {
        let s = matches!(
            self.structure,
            StructurePart::Neighbors {
                strategy: Strategy::PageRank,
                ..
            }
        );
        let d = matches!(
            self.demo,
            DemoPart::Demos {
                strategy: Strategy::PageRank,
                ..
            }
        );
        s || d
    }

    /// The basic zero-shot code "XXXX".
    pub fn zero_shot() -> Self {
        Self {
            structure: StructurePart::None,
            demo: DemoPart::None,
        }
    }
}

impl fmt::Display for MethodCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.structure {
            StructurePart::None => f.write_str("XX")?,
            StructurePart::Neighbors {
                hop,
                strategy,
                primed,
            } => {
                write!(f, "{}", hop.value())?;
                if primed {
                    f.write_str("'")?;
                }
                write!(f, "{}", strategy.letter())?;
            }
        }
        match self.demo {
            DemoPart::None => f.write_str("XX"),
            DemoPart::Demos { scope, strategy } => {
                write!(f, "{}{}", scope.letter(), strategy.letter())
            }
        }
    }
}

impl FromStr for MethodCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, CodeError> {
        parse_code(s)
    }
}

impl Serialize for MethodCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MethodCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Parse a method-code string, rejecting anything outside the 55-code
/// grammar with a diagnostic naming the offending fragment.
pub fn parse_code(s: &str) -> Result<MethodCode, CodeError> {
    let chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return Err(CodeError::Empty);
    }

    let mut pos = 0;
    let structure = match chars[pos] {
        'X' => {
            if chars.get(pos + 1) != Some(&'X') {
                return Err(CodeError::TruncatedStructure(s.to_string()));
            }
            pos += 2;
            StructurePart::None
        }
        c @ ('1' | '2') => {
            let hop = if c == '1' { Hop::One } else { Hop::Two };
            pos += 1;
            let primed = chars.get(pos) == Some(&'\'');
            if primed {
                pos += 1;
            }
            let strategy_char = *chars
                .get(pos)
                .ok_or_else(|| CodeError::TruncatedStructure(s.to_string()))?;
            let strategy =
                Strategy::from_letter(strategy_char).ok_or(CodeError::UnknownStrategy {
                    code: s.to_string(),
                    part: "structure",
                    found: strategy_char,
                })?;
            pos += 1;
            StructurePart::Neighbors {
                hop,
                strategy,
                primed,
            }
        }
        other => {
            return Err(CodeError::UnknownHop {
                code: s.to_string(),
                found: other,
            })
        }
    };

    let demo = match chars.get(pos) {
        None => return Err(CodeError::TruncatedDemo(s.to_string())),
        Some('X') => match chars.get(pos + 1) {
            Some('X') => {
                pos += 2;
                DemoPart::None
            }
            Some(&other) => {
                return Err(CodeError::BadDemoToken {
                    code: s.to_string(),
                    token: format!("X{other}"),
                })
            }
            None => return Err(CodeError::TruncatedDemo(s.to_string())),
        },
        Some(&c @ ('G' | 'C')) => {
            let scope = if c == 'G' {
                DemoScope::Global
            } else {
                DemoScope::ClassAware
            };
            let strategy_char = *chars
                .get(pos + 1)
                .ok_or_else(|| CodeError::TruncatedDemo(s.to_string()))?;
            let strategy =
                Strategy::from_letter(strategy_char).ok_or(CodeError::UnknownStrategy {
                    code: s.to_string(),
                    part: "demonstration",
                    found: strategy_char,
                })?;
            pos += 2;
            DemoPart::Demos { scope, strategy }
        }
        Some(&other) => {
            return Err(CodeError::BadDemoToken {
                code: s.to_string(),
                token: other.to_string(),
            })
        }
    };

    if pos < chars.len() {
        return Err(CodeError::TrailingInput {
            code: s.to_string(),
            rest: chars[pos..].iter().collect(),
        });
    }

    MethodCode::new(structure, demo)
}

/// Canonical string form; the inverse of [`parse_code`] on valid codes.
pub fn format_code(code: &MethodCode) -> String {
    code.to_string()
}

/// All 55 codes: the 7 x 7 unprimed grid in row-major order, then the 6
/// primed codes.
pub fn enumerate_codes() -> Vec<MethodCode> {
    let hops = [Hop::One, Hop::Two];
    let mut structures = vec![StructurePart::None];
    for hop in hops {
        for strategy in Strategy::ALL {
            structures.push(StructurePart::Neighbors {
                hop,
                strategy,
                primed: false,
            });
        }
    }
    let mut demos = vec![DemoPart::None];
    for scope in [DemoScope::Global, DemoScope::ClassAware] {
        for strategy in Strategy::ALL {
            demos.push(DemoPart::Demos { scope, strategy });
        }
    }

    let mut codes = Vec::with_capacity(55);
    for &structure in &structures {
        for &demo in &demos {
            codes.push(MethodCode { structure, demo });
        }
    }
    for hop in hops {
        for strategy in Strategy::ALL {
            codes.push(MethodCode {
                structure: StructurePart::Neighbors {
                    hop,
                    strategy,
                    primed: true,
                },
                demo: DemoPart::None,
            });
        }
    }
    codes
}
