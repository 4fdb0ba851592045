//! Oriented path queries over one binary relation, written as bit strings: bit `i` is 1
//! for a forward atom `E(z_i, z_{i+1})` and 0 for a backward atom `E(z_{i+1}, z_i)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::hom::{core, holds, is_minimal};
use crate::query::{Atom, ConjunctiveQuery, Variable};

pub const DEFAULT_RELATION: &str = "E";
pub const DEFAULT_CHAIN_BOUND: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyBits);
        }
        Ok(Bits(bits))
    }

    /// All bit strings of length `n`, in numeric order.
    pub fn all_of_length(n: usize) -> Vec<Bits> {
        (0..1u64 << n)
            .map(|m| Bits((0..n).map(|i| m & (1 << (n - 1 - i)) != 0).collect()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Bits::new(bits)
    }
}

impl TryFrom<String> for Bits {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Bits> for String {
    fn from(b: Bits) -> String {
        b.to_string()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn z(i: usize) -> Variable {
    Variable::new(format!("z{i}")).expect("valid name")
}

pub fn opq_query(bits: &Bits) -> ConjunctiveQuery {
    opq_query_over(bits, DEFAULT_RELATION)
}

/// The Boolean query for `bits` over a binary relation named `relation`.
///
/// # Panics
/// If `relation` is not a valid relation name.
pub fn opq_query_over(bits: &Bits, relation: &str) -> ConjunctiveQuery {
    let body = bits
        .0
        .iter()
        .enumerate()
        .map(|(i, &forward)| {
            let (a, b) = if forward {
                (i + 1, i + 2)
            } else {
                (i + 2, i + 1)
            };
            Atom::new(relation, vec![z(a), z(b)]).expect("valid relation name")
        })
        .collect();
    ConjunctiveQuery::new(Vec::new(), body).expect("path bodies are well-formed")
}

/// The directed path query of length `n` (all bits forward).
pub fn path_query(n: usize) -> Result<ConjunctiveQuery> {
    Ok(opq_query(&Bits::new(vec![true; n])?))
}

/// Reads the path from the other end: reverse the string and flip every bit.
pub fn reverse_opq(bits: &Bits) -> Bits {
    Bits(bits.0.iter().rev().map(|b| !b).collect())
}

/// Bits of `Q_0 = O_111` and `Q_i = O_{11(01)^i 1}`.
pub fn pumped_bits(i: usize) -> Bits {
    let text = if i == 0 {
        "111".to_string()
    } else {
        format!("11{}1", "01".repeat(i))
    };
    text.parse().expect("literal bits")
}

pub fn pumped_query(i: usize) -> ConjunctiveQuery {
    opq_query(&pumped_bits(i))
}

/// Smallest `k ≤ max_len` with `O_bits ≡ P_k`, if any.
pub fn equivalent_path_length(bits: &Bits, max_len: usize) -> Option<usize> {
    let q = opq_query(bits);
    (1..=max_len).find(|&k| {
        let p = path_query(k).expect("k ≥ 1");
        holds(&q, &p) && holds(&p, &q)
    })
}

/// Outcome of checking `lower ⊏ upper` for one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub lower: Bits,
    pub upper: Bits,
    pub contained: bool,
    pub reverse_contained: bool,
}

impl ChainStep {
    fn check(lower: Bits, upper: Bits) -> Self {
        let (l, u) = (opq_query(&lower), opq_query(&upper));
        ChainStep {
            contained: holds(&l, &u),
            reverse_contained: holds(&u, &l),
            lower,
            upper,
        }
    }

    pub fn passed(&self) -> bool {
        self.contained && !self.reverse_contained
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub bound: usize,
    pub steps: Vec<ChainStep>,
    pub passed: bool,
}

/// Checks `Q_0 ⊏ Q_1 ⊏ … ⊏ Q_n ⊏ O_11`, each step strict.
///
/// This is a finite prefix of an unbounded chain; passing says nothing about larger `n`.
pub fn check_chain(n: usize) -> ChainReport {
    let mut pairs: Vec<(Bits, Bits)> = (0..n)
        .map(|i| (pumped_bits(i), pumped_bits(i + 1)))
        .collect();
    pairs.push((pumped_bits(n), "11".parse().expect("literal bits")));
    let steps: Vec<ChainStep> = std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .into_iter()
            .map(|(l, u)| s.spawn(move || ChainStep::check(l, u)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain worker panicked"))
            .collect()
    });
    let passed = steps.iter().all(ChainStep::passed);
    ChainReport {
        bound: n,
        steps,
        passed,
    }
}

/// The reference equivalence table: each row's query, its listed reversal, and its listed
/// minimal equivalent (`None` where the table leaves the entry blank).
pub const OPQ_TABLE: [(&str, Option<&str>, Option<&str>); 17] = [
    ("1", Some("0"), None),
    ("11", Some("00"), None),
    ("10", Some("01"), Some("1")),
    ("111", Some("000"), None),
    ("110", Some("100"), Some("11")),
    ("001", Some("011"), Some("11")),
    ("101", Some("010"), Some("1")),
    ("1111", Some("0000"), None),
    ("1110", Some("1000"), Some("111")),
    ("0111", Some("0001"), Some("111")),
    ("1101", Some("0100"), Some("11")),
    ("1011", Some("0010"), Some("11")),
    ("1001", Some("0110"), Some("11")),
    ("1100", None, Some("11")),
    ("0011", None, Some("11")),
    ("1010", None, Some("1")),
    ("0101", None, Some("1")),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub query: Bits,
    pub reversal: Option<Bits>,
    /// Whether the listed reversal is equivalent to the query.
    pub reversal_equivalent: Option<bool>,
    /// Whether the listed reversal is literally what `reverse_opq` returns. Informational.
    pub reversal_is_operator_image: Option<bool>,
    pub minimal: Option<Bits>,
    /// With a listed minimal query: the core of the row query is that query up to
    /// renaming. Without one: the row query is minimal.
    pub minimal_holds: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
    pub passed: bool,
}

fn check_row(query: &str, reversal: Option<&str>, minimal: Option<&str>) -> TableRow {
    let parse = |s: &str| s.parse::<Bits>().expect("table literal");
    let query = parse(query);
    let q = opq_query(&query);
    let reversal = reversal.map(parse);
    let reversal_equivalent = reversal.as_ref().map(|r| {
        let rq = opq_query(r);
        holds(&q, &rq) && holds(&rq, &q)
    });
    let reversal_is_operator_image = reversal.as_ref().map(|r| *r == reverse_opq(&query));
    let minimal = minimal.map(parse);
    let minimal_holds = match &minimal {
        Some(m) => canonicalize(&core(&q)) == canonicalize(&opq_query(m)),
        None => is_minimal(&q),
    };
    TableRow {
        passed: reversal_equivalent.unwrap_or(true) && minimal_holds,
        query,
        reversal,
        reversal_equivalent,
        reversal_is_operator_image,
        minimal,
        minimal_holds,
    }
}

pub fn verify_opq_table() -> TableReport {
    let rows: Vec<TableRow> = OPQ_TABLE
        .iter()
        .map(|&(q, r, m)| check_row(q, r, m))
        .collect();
    let passed = rows.iter().all(|r| r.passed);
    TableReport { rows, passed }
}
