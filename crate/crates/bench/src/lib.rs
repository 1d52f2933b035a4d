//! Shared fixtures for the criterion benches.

use nahm_core::{build_quadruple, DiagramKind, NahmQuadruple};

/// Pairs of increasing rank used by the enumeration benches.
pub const PAIRS: &[(&str, &str, i64)] = &[
    ("A1", "T1", 200),
    ("T1", "A2", 100),
    ("A1", "C2", 60),
    ("T2", "T1", 100),
    ("A1", "A3", 40),
    ("E8", "T1", 12),
];

pub fn quadruple(x: &str, y: &str) -> NahmQuadruple {
    let x: DiagramKind = x.parse().expect("known kind");
    let y: DiagramKind = y.parse().expect("known kind");
    build_quadruple(x, y).expect("valid pair")
}
