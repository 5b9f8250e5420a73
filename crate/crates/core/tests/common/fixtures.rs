#![allow(clippy::excessive_precision)]

//! Minimax taps from an independent conic solver run offline
//! (scripts/minimax_reference.py, Clarabel at 1e-14 tolerances).
//! Entries: ((P, Q), order, taps, objective on the default 512-point grid).

pub type Fixture = ((i64, i64), usize, &'static [f64], f64);

#[rustfmt::skip]
pub const MINIMAX: &[Fixture] = &[
    ((160, 147), 1, &[9.25949671752713588e-01, 7.40503282472863983e-02], 9.10998056927297128e-02),
    ((160, 147), 2, &[9.11682099980523963e-01, 1.40858542606962955e-01, -5.25406425874873212e-02], 2.62533178439380600e-02),
    ((160, 147), 3, &[8.86597211666358631e-01, 1.77820078703598838e-01, -9.10650609238780329e-02, 2.66477705539208201e-02], 1.79671433545568263e-02),
    ((160, 147), 4, &[8.71736750419715878e-01, 2.21346010509294033e-01, -1.43597619709433660e-01, 7.48566012135482434e-02, -2.43417424331246121e-02], 8.04615273340852574e-03),
    ((160, 147), 5, &[8.56943674263833555e-01, 2.58512881683433338e-01, -2.00239069139781373e-01, 1.31893328381211483e-01, -6.28873304716670717e-02, 1.57765152829684382e-02], 5.55566787985729577e-03),
    ((147, 160), 1, &[1.05957385055111830e+00, -5.95738505511183430e-02], 9.57523737497310151e-02),
    ((147, 160), 2, &[1.07598049558231179e+00, -1.30529106376548965e-01, 5.45486107942366391e-02], 2.97430740780260522e-02),
    ((147, 160), 3, &[1.10325486446679011e+00, -1.70962017359259116e-01, 9.63750561349509677e-02, -2.86679032424817029e-02], 2.12317446856286202e-02),
    ((147, 160), 4, &[1.12075881955126588e+00, -2.21947175821871678e-01, 1.57890288055775041e-01, -8.48507570903307834e-02, 2.81488253051617975e-02], 9.85209413069099149e-03),
    ((147, 160), 5, &[1.13846538164389099e+00, -2.66445950319153024e-01, 2.25508612946597103e-01, -1.52860019852827322e-01, 7.39684648201615197e-02, -1.86364892386690455e-02], 6.98825189088458833e-03),
];
