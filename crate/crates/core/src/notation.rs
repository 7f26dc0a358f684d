//! Ket text and graph records.
//!
//! Ket text lists states separated by commas, one symbol per qubit:
//! `0`/`1` are the computational pair, a lowercase letter is a basis vector and
//! the same letter uppercase is its complement. Whitespace is ignored.
//!
//! Graph records are single-line JSON documents:
//! `{"p":2,"s":4,"qubits":[{"regions":[[0,1],[2,3]],"matching":[[0,1]]},...]}`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    GraphError, OrthogonalityGraph, QubitFactorization, Symbol, SymbolicProductBasis,
    ValidationReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotationError {
    #[error("syntax error at position {position}: unexpected {found:?}")]
    SyntaxError { position: usize, found: char },
    #[error("empty state at position {position}")]
    EmptyState { position: usize },
    #[error("ragged basis: state {state} has {found} symbols, expected {expected}")]
    RaggedBasis {
        state: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate state {state} (same as state {first})")]
    DuplicateState { state: usize, first: usize },
    #[error("qubit {qubit} needs more than 27 bases")]
    TooManyBases { qubit: usize },
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed graph record at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("record declares p={declared} but lists {found} qubits")]
    QubitCount { declared: usize, found: usize },
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
}

/// Parses ket text such as `000,1aA,A1a,aA1`.
pub fn parse_basis(text: &str) -> Result<SymbolicProductBasis, NotationError> {
    let mut states: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut state_start = 0;
    for (pos, c) in text.char_indices() {
        match c {
            '0' => states.last_mut().unwrap().push(Symbol::new(b'0', false)),
            '1' => states.last_mut().unwrap().push(Symbol::new(b'0', true)),
            'a'..='z' => states.last_mut().unwrap().push(Symbol::new(c as u8, false)),
            'A'..='Z' => states
                .last_mut()
                .unwrap()
                .push(Symbol::new(c.to_ascii_lowercase() as u8, true)),
            ',' => {
                if states.last().unwrap().is_empty() {
                    return Err(NotationError::EmptyState {
                        position: state_start,
                    });
                }
                states.push(Vec::new());
                state_start = pos + 1;
            }
            c if c.is_whitespace() => {}
            c => {
                return Err(NotationError::SyntaxError {
                    position: pos,
                    found: c,
                })
            }
        }
    }
    if states.last().unwrap().is_empty() {
        return Err(NotationError::EmptyState {
            position: state_start,
        });
    }
    let mut seen = std::collections::HashMap::new();
    for (i, st) in states.iter().enumerate() {
        if let Some(&first) = seen.get(st) {
            return Err(NotationError::DuplicateState { state: i, first });
        }
        seen.insert(st.clone(), i);
    }
    SymbolicProductBasis::new(states).map_err(|e| match e {
        GraphError::RaggedBasis {
            state,
            expected,
            found,
        } => NotationError::RaggedBasis {
            state,
            expected,
            found,
        },
        GraphError::InvalidGraph(_) => unreachable!("basis construction does not validate graphs"),
    })
}

fn symbol_char(sym: Symbol) -> char {
    match (sym.letter, sym.complemented) {
        (b'0', false) => '0',
        (b'0', true) => '1',
        (l, false) => l as char,
        (l, true) => (l as char).to_ascii_uppercase(),
    }
}

fn canonical_letter(index: usize) -> u8 {
    if index == 0 {
        b'0'
    } else {
        b'a' + (index - 1) as u8
    }
}

/// Renames letters per qubit in first-seen order (`0`, then `a`, `b`, ...),
/// keeping each symbol's complement flag.
pub fn normalize_letters(b: &SymbolicProductBasis) -> SymbolicProductBasis {
    let mut states: Vec<Vec<Symbol>> = b.states().to_vec();
    for q in 0..b.p() {
        let mut order: Vec<u8> = Vec::new();
        for st in states.iter_mut() {
            let sym = &mut st[q];
            let idx = match order.iter().position(|&l| l == sym.letter) {
                Some(i) => i,
                None => {
                    order.push(sym.letter);
                    order.len() - 1
                }
            };
            sym.letter = canonical_letter(idx);
        }
    }
    SymbolicProductBasis::new(states).expect("renaming keeps the basis rectangular")
}

/// Ket text with canonical letters.
pub fn format_basis(b: &SymbolicProductBasis) -> String {
    let norm = normalize_letters(b);
    norm.states()
        .iter()
        .map(|st| st.iter().map(|&sym| symbol_char(sym)).collect::<String>())
        .collect::<Vec<_>>()
        .join(",")
}

/// A symbolic basis realizing `g`: each matched pair becomes one basis letter
/// and each unmatched region its own letter.
pub fn basis_from_graph(g: &OrthogonalityGraph) -> Result<SymbolicProductBasis, NotationError> {
    let mut states = vec![Vec::with_capacity(g.p()); g.s()];
    for (q, f) in g.qubits().iter().enumerate() {
        let partners = f.partners();
        let mut letter_of = vec![None; f.regions().len()];
        let mut next = 0usize;
        let mut symbols = vec![Symbol::new(b'0', false); g.s()];
        // Walk vertices in order so the first state's vector becomes `0`.
        let region_of = f.region_of(g.s());
        for v in 0..g.s() {
            let r = region_of[v];
            if letter_of[r].is_none() {
                if next >= 27 {
                    return Err(NotationError::TooManyBases { qubit: q });
                }
                let l = canonical_letter(next);
                next += 1;
                letter_of[r] = Some(Symbol::new(l, false));
                if let Some(pr) = partners[r] {
                    letter_of[pr] = Some(Symbol::new(l, true));
                }
            }
            symbols[v] = letter_of[r].unwrap();
        }
        for (v, sym) in symbols.into_iter().enumerate() {
            states[v].push(sym);
        }
    }
    Ok(SymbolicProductBasis::new(states).expect("one symbol per qubit"))
}

#[derive(Serialize, Deserialize)]
struct QubitRecord {
    regions: Vec<Vec<usize>>,
    matching: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    p: usize,
    s: usize,
    qubits: Vec<QubitRecord>,
}

fn to_record(g: &OrthogonalityGraph) -> GraphRecord {
    GraphRecord {
        p: g.p(),
        s: g.s(),
        qubits: g
            .qubits()
            .iter()
            .map(|f| QubitRecord {
                regions: f.regions().to_vec(),
                matching: f.matching().iter().map(|&(a, b)| [a, b]).collect(),
            })
            .collect(),
    }
}

/// Compact single-line JSON record of a graph.
pub fn encode_graph(g: &OrthogonalityGraph) -> Vec<u8> {
    serde_json::to_vec(&to_record(g)).expect("graph records always serialize")
}

pub fn encode_graph_string(g: &OrthogonalityGraph) -> String {
    String::from_utf8(encode_graph(g)).expect("JSON output is UTF-8")
}

/// The record as a JSON value, for embedding in larger documents.
pub fn graph_to_value(g: &OrthogonalityGraph) -> serde_json::Value {
    serde_json::to_value(to_record(g)).expect("graph records always serialize")
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    bytes.len()
}

fn from_record(rec: GraphRecord) -> Result<OrthogonalityGraph, DecodeError> {
    if rec.qubits.len() != rec.p {
        return Err(DecodeError::QubitCount {
            declared: rec.p,
            found: rec.qubits.len(),
        });
    }
    let qubits = rec
        .qubits
        .into_iter()
        .map(|q| {
            QubitFactorization::new(q.regions, q.matching.into_iter().map(|[a, b]| (a, b)).collect())
        })
        .collect();
    let g = OrthogonalityGraph::new(rec.s, qubits);
    let report = g.validate();
    if report.is_ok() {
        Ok(g)
    } else {
        Err(DecodeError::Invalid(report))
    }
}

pub fn decode_graph(bytes: &[u8]) -> Result<OrthogonalityGraph, DecodeError> {
    let rec: GraphRecord = serde_json::from_slice(bytes).map_err(|e| DecodeError::Syntax {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    from_record(rec)
}

pub fn graph_from_value(value: serde_json::Value) -> Result<OrthogonalityGraph, DecodeError> {
    let rec: GraphRecord = serde_json::from_value(value).map_err(|e| DecodeError::Syntax {
        offset: 0,
        message: e.to_string(),
    })?;
    from_record(rec)
}

/// Letter-insensitive comparison: true when `a` and `b` differ only by a
/// per-qubit renaming of basis letters.
pub fn same_up_to_letters(a: &SymbolicProductBasis, b: &SymbolicProductBasis) -> bool {
    if a.s() != b.s() || a.p() != b.p() {
        return false;
    }
    (0..a.p()).all(|q| {
        let mut forward = std::collections::HashMap::new();
        let mut used = HashSet::new();
        a.states().iter().zip(b.states()).all(|(x, y)| {
            let (x, y) = (x[q], y[q]);
            let flip = x.complemented != y.complemented;
            match forward.get(&x.letter) {
                Some(&(l, f)) => l == y.letter && f == flip,
                None => {
                    if !used.insert(y.letter) {
                        return false;
                    }
                    forward.insert(x.letter, (y.letter, flip));
                    true
                }
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_states;

    #[test]
    fn parses_shifts() {
        let b = parse_basis("000,1aA,A1a,aA1").unwrap();
        assert_eq!(b.s(), 4);
        assert_eq!(b.p(), 3);
        assert_eq!(b.states()[1][0], Symbol::new(b'0', true));
        assert_eq!(b.states()[2][0], Symbol::new(b'a', true));
    }

    #[test]
    fn whitespace_is_ignored() {
        let b = parse_basis(" 00 ,\n01, 1 0,11 ").unwrap();
        assert_eq!(format_basis(&b), "00,01,10,11");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_basis("0a0,0b"),
            Err(NotationError::RaggedBasis { state: 1, .. })
        ));
        assert!(matches!(
            parse_basis("00,0+"),
            Err(NotationError::SyntaxError { position: 4, found: '+' })
        ));
        assert!(matches!(
            parse_basis("00,01,00"),
            Err(NotationError::DuplicateState { state: 2, first: 0 })
        ));
        assert!(matches!(parse_basis(""), Err(NotationError::EmptyState { .. })));
        assert!(matches!(parse_basis("00,,01"), Err(NotationError::EmptyState { position: 3 })));
        assert!(matches!(
            parse_basis("02"),
            Err(NotationError::SyntaxError { position: 1, found: '2' })
        ));
    }

    #[test]
    fn format_uses_first_seen_letters() {
        let b = parse_basis("000,1aA,A1a,aA1").unwrap();
        assert_eq!(format_basis(&b), "000,1aA,A1a,aA1");
        let b = parse_basis("0").unwrap();
        assert_eq!(format_basis(&b), "0");
        let b = parse_basis("qz,Qx,Zc").unwrap();
        assert_eq!(format_basis(&b), "00,1a,Ab");
    }

    #[test]
    fn format_is_a_fixed_point() {
        let b = parse_basis("xy0,Xzq,bYQ").unwrap();
        let once = format_basis(&b);
        let twice = format_basis(&parse_basis(&once).unwrap());
        assert_eq!(once, twice);
        assert!(same_up_to_letters(&b, &parse_basis(&once).unwrap()));
    }

    #[test]
    fn decode_smallest_matched_graph() {
        let g = decode_graph(br#"{"p":1,"s":2,"qubits":[{"regions":[[0],[1]],"matching":[[0,1]]}]}"#)
            .unwrap();
        assert_eq!(g.p(), 1);
        assert_eq!(g.s(), 2);
        assert_eq!(g.qubit(0).matching(), &[(0, 1)]);
        let std1 = graph_from_states(&parse_basis("0,1").unwrap());
        assert_eq!(g, std1);
    }

    #[test]
    fn encode_is_compact_and_roundtrips() {
        let g = graph_from_states(&parse_basis("000,1aA,A1a,aA1").unwrap());
        let bytes = encode_graph(&g);
        let text = std::str::from_utf8(&bytes).unwrap();
        assert!(!text.contains(' ') && !text.contains('\n'));
        assert!(text.starts_with(r#"{"p":3,"s":4,"qubits":[{"regions":"#));
        assert_eq!(decode_graph(&bytes).unwrap(), g);
    }

    #[test]
    fn truncated_record_reports_offset() {
        let g = graph_from_states(&parse_basis("000,1aA,A1a,aA1").unwrap());
        let bytes = encode_graph(&g);
        let cut = &bytes[..bytes.len() - 5];
        match decode_graph(cut) {
            Err(DecodeError::Syntax { offset, .. }) => assert!(offset <= cut.len()),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn decode_rejects_invalid_structure() {
        let bad = br#"{"p":1,"s":3,"qubits":[{"regions":[[0,1],[1,2]],"matching":[]}]}"#;
        assert!(matches!(decode_graph(bad), Err(DecodeError::Invalid(_))));
        let bad = br#"{"p":2,"s":2,"qubits":[{"regions":[[0],[1]],"matching":[]}]}"#;
        assert!(matches!(decode_graph(bad), Err(DecodeError::QubitCount { .. })));
    }

    #[test]
    fn basis_from_graph_realizes_graph() {
        let b = parse_basis("0000,0aa1,10ba,1aBb,a1AB,AA1A").unwrap();
        let g = graph_from_states(&b);
        let back = basis_from_graph(&g).unwrap();
        assert_eq!(graph_from_states(&back), g);
        assert!(same_up_to_letters(&back, &b));
    }
}
