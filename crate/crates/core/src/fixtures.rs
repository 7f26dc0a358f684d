//! Known unextendible product bases in ket text, used by tests and the CLI.

use crate::graph::{OrthogonalityGraph, QubitFactorization};

pub struct Fixture {
    pub name: &'static str,
    pub ket: &'static str,
}

const fn fx(name: &'static str, ket: &'static str) -> Fixture {
    Fixture { name, ket }
}

pub const SHIFTS: &str = "000,1aA,A1a,aA1";

/// Three-qubit, eight-state complete bases up to equivalence, labelled B1..B17.
pub const THREE_QUBIT_BASES: [Fixture; 17] = [
    fx("B1", "000,001,010,011,100,101,110,111"),
    fx("B2", "000,001,010,011,100,101,11a,11A"),
    fx("B3", "000,001,010,011,10a,10A,11b,11B"),
    fx("B4", "000,001,010,011,10a,1aA,11a,1AA"),
    fx("B5", "000,001,010,011,1aa,1aA,1Aa,1AA"),
    fx("B6", "000,001,010,011,1aa,1aA,1Ab,1AB"),
    fx("B7", "000,001,01a,01A,100,101,11a,11A"),
    fx("B8", "000,001,01a,01A,100,1a1,110,1A1"),
    fx("B9", "000,001,01a,01A,10a,10A,110,111"),
    fx("B10", "000,001,01a,01A,10b,10B,110,111"),
    fx("B11", "000,001,01a,01A,10b,10B,11c,11C"),
    fx("B12", "000,001,01a,01A,10b,1aB,11b,1AB"),
    fx("B13", "000,001,01a,01A,1a0,1a1,1Aa,1AA"),
    fx("B14", "000,001,01a,01A,1a0,1a1,1Ab,1AB"),
    fx("B15", "000,001,01a,01A,1ab,1Ab,1bB,1BB"),
    fx("B16", "000,001,01a,01A,1ab,1aB,1Ac,1AC"),
    fx("B17", "000,01a,01A,1a0,1A0,a01,A01,111"),
];

/// Unextendible product bases on four to six qubits.
pub const UPBS: [Fixture; 24] = [
    fx("shifts", SHIFTS),
    fx("4q6", "0000,0aa1,10ba,1aBb,a1AB,AA1A"),
    fx("4q7", "0000,0aa1,0A1a,100b,1AaB,aa10,A1AA"),
    fx("4q8-upb1", "0000,1aA0,A1a0,aA10,0001,1aA1,A1a1,aA11"),
    fx("4q8-upb2", "0000,1aA0,A1a0,aA10,0001,1bB1,B1b1,bB11"),
    fx("4q8-other", "0000,1aAa,aA1A,A1ab,0aA1,1aAA,a1aa,AA1B"),
    fx("4q9-1", "0000,1aA0,aA10,A1aa,0001,01A1,1A0A,0011,1011"),
    fx("4q9-2", "0000,Aa1a,a1a1,A11A,aaA1,1AAa,10aA,A10A,a1a0"),
    fx("4q9-3", "0000,0001,0010,010a,1aaa,100A,11A0,a1aA,AA11"),
    fx("4q9-4", "0000,0001,001a,010b,1aab,100B,11Aa,a1aB,AA1A"),
    fx("4q9-5", "0000,0001,001a,01aa,1aab,10Aa,110B,a1Ab,AA1A"),
    fx("4q9-6", "0000,0001,01aa,01Aa,1a0a,1AAb,a01B,a1aA,Aa1A"),
    fx("4q9-7", "0000,0001,01aa,01Aa,1a0a,1Abb,a01B,a1BA,Aa1A"),
    fx("4q9-8", "0000,0001,001a,01aa,1a0b,101a,1AaA,aa1A,A1AB"),
    fx("4q9-9", "0000,001a,001A,01a0,1aaa,10A0,111A,a1Aa,AA01"),
    fx("4q9-10", "0000,001a,001A,01a0,1a1A,1000,1Aa1,aa01,A1Aa"),
    fx("4q9-11", "0000,01aa,0a1A,1110,1a0a,10aA,a01a,a10A,AAA1"),
    fx("4q10", "0000,1aA0,aA10,A1aa,0001,0011,1001,1011,010A,11A1"),
    fx("4q12-a", "0000,Aaa1,a11a,A1AB,1000,a001,a10A,a010,a011,a11A,AA1b,a10a"),
    fx("4q12-b", "0000,1aaa,aA1b,10AB,0ab1,01BB,1A0b,1aaA,1AaB,1aAb,11AB,AA1b"),
    fx("5q8", "00000,001aa,aaa1A,aaAA1,1Abbb,1ABcc,A1cBC,A1CCB"),
    fx("5q9", "00000,0aa01,0b1a0,1abaa,1bBbb,aBa1A,a1AAB,AA0B1,AB11A"),
    fx("5q10", "00000,0a001,0b1aa,10abb,1abbB,ab1BA,aBB1B,aBA1b,A1BA0,AAAA1"),
    fx("6q9", "000000,0aaaa1,1aabaa,1bbBbb,aAb1Bc,abBA1A,A1AccB,bABaC1,BB1CAC"),
];

/// Shifts on the first three qubits with `0` on the fourth, together with a
/// complete three-qubit basis with `1` on the fourth: twelve states.
pub fn shifts_plus_basis(basis: &str) -> String {
    let mut parts: Vec<String> = SHIFTS.split(',').map(|k| format!("{k}0")).collect();
    parts.extend(basis.split(',').map(|k| format!("{k}1")));
    parts.join(",")
}

/// A seven-state, three-qubit graph (vertices `0..7`). It is not pairwise
/// orthogonal; the regions `{2,3,4,5}`, `{1,6}` and `{0,1,6}` on qubits 1, 0
/// and 2 together cover every vertex.
pub fn seven_state_example() -> OrthogonalityGraph {
    OrthogonalityGraph::new(
        7,
        vec![
            QubitFactorization::new(
                vec![vec![0], vec![1, 6], vec![2], vec![4], vec![3], vec![5]],
                vec![(0, 1), (2, 3), (4, 5)],
            ),
            QubitFactorization::new(
                vec![vec![0], vec![2, 3, 4, 5], vec![1], vec![6]],
                vec![(0, 1), (2, 3)],
            ),
            QubitFactorization::new(
                vec![vec![0, 1, 6], vec![3, 4], vec![2], vec![5]],
                vec![(0, 1), (2, 3)],
            ),
        ],
    )
}
