//! Exact results against a floating-point model built straight from the
//! defining formulas, plus geometric cross-checks of the deduction rules.

use num_complex::Complex64;
use proptest::prelude::*;

use meslab_core::geometry::{intersection, line_points, Line, Point};
use meslab_core::mes::{leaky_marginal, line_state, overlap_point_line, point_state, MesBasis};
use meslab_core::mub::{mub_state, BasisLabel, MubLabel};
use meslab_core::protocols::{mkp_deduce, track_deduce, AliceOutcome};
use meslab_core::Dimension;

const TOL: f64 = 1e-9;

fn omega(d: u64, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / d as f64)
}

/// `⟨n|m;b⟩` with `b/2` taken as the real inverse of 2 mod d.
fn oracle_mub(d: u64, m: i64, b: Option<i64>) -> Vec<Complex64> {
    let di = d as i64;
    match b {
        None => (0..di).map(|n| Complex64::new((n == m) as i64 as f64, 0.0)).collect(),
        Some(b) => {
            let inv2 = (0..di).find(|x| (2 * x) % di == 1).unwrap();
            (0..di)
                .map(|n| omega(d, inv2 * b * n * (n - 1) - n * m) / (d as f64).sqrt())
                .collect()
        }
    }
}

fn oracle_line(d: u64, m_dd: i64, m0: i64) -> Vec<Complex64> {
    let di = d as i64;
    let mut v = vec![Complex64::new(0.0, 0.0); (d * d) as usize];
    for n in 0..di {
        let n2 = (2 * m_dd - n).rem_euclid(di);
        v[(n * di + n2) as usize] = omega(d, -(n - n2) * m0) / (d as f64).sqrt();
    }
    v
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < TOL
}

fn dims() -> impl Strategy<Value = Dimension> {
    prop::sample::select(vec![3u64, 5, 7, 11]).prop_map(|d| Dimension::new(d).unwrap())
}

fn dim_line() -> impl Strategy<Value = Line> {
    dims().prop_flat_map(|dim| {
        let d = dim.get() as i64;
        (0..d, 0..d).prop_map(move |(a, b)| Line::new(dim.elem(a), dim.elem(b)))
    })
}

fn basis_label(dim: Dimension, col: i64) -> BasisLabel {
    if col == 0 {
        BasisLabel::Cb
    } else {
        BasisLabel::Standard(dim.elem(col - 1))
    }
}

#[test]
fn mub_states_match_float_model() {
    for d in [3u64, 5, 7, 11, 13] {
        let dim = Dimension::new(d).unwrap();
        for col in 0..=d as i64 {
            let b = basis_label(dim, col);
            for m in 0..d as i64 {
                let exact = mub_state(MubLabel::new(dim.elem(m), b));
                let float = oracle_mub(d, m, (col > 0).then_some(col - 1));
                for (n, want) in float.iter().enumerate() {
                    let got = exact.amp(dim.elem(n as i64)).to_complex();
                    assert!(close(got, *want), "d={d} m={m} b={b} n={n}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn line_states_match_float_model() {
    for d in [3u64, 5, 7] {
        let dim = Dimension::new(d).unwrap();
        let basis = MesBasis::new(dim).unwrap();
        for j in Line::all(dim) {
            let float = oracle_line(d, j.m_dd.value() as i64, j.m0.value() as i64);
            let exact = basis.line(j).ket.amps();
            for (got, want) in exact.iter().zip(&float) {
                assert!(close(got.to_complex(), *want), "d={d} line {j}");
            }
        }
    }
}

#[test]
fn point_state_overlaps_match_float_model() {
    let d = 5u64;
    let dim = Dimension::new(d).unwrap();
    for p in Point::all(dim) {
        let b = (!p.b.is_cb()).then(|| p.b.column() as i64 - 1);
        let a1 = oracle_mub(d, p.m.value() as i64, b);
        let tilde_m = (d as i64 - p.m.value() as i64) % d as i64;
        let a2 = oracle_mub(d, if b.is_some() { tilde_m } else { p.m.value() as i64 }, b.map(|b| (d as i64 - b) % d as i64));
        for j in Line::all(dim) {
            let line = oracle_line(d, j.m_dd.value() as i64, j.m0.value() as i64);
            let mut ip = Complex64::new(0.0, 0.0);
            for n1 in 0..d as usize {
                for n2 in 0..d as usize {
                    ip += (a1[n1] * a2[n2]).conj() * line[n1 * d as usize + n2];
                }
            }
            let exact = overlap_point_line(p, j).unwrap().to_complex();
            assert!(close(exact, ip), "{p} / {j}: {exact} vs {ip}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The basis Alice names is the column where her line meets the prepared one.
    #[test]
    fn track_deduction_is_the_intersection_column(j in dim_line(), k in 0i64..1000, l in 0i64..1000) {
        let dim = j.dim();
        let other = Line::new(dim.elem(k), dim.elem(l));
        let deduced = track_deduce(j, AliceOutcome::from(other));
        prop_assert_eq!(deduced, intersection(j, other).map(|p| p.b).filter(|_| other != j));
    }

    /// The row Alice names lies on her line in the revealed column.
    #[test]
    fn mkp_deduction_lies_on_the_line(j in dim_line(), col in 0i64..12) {
        let dim = j.dim();
        let b = basis_label(dim, col.rem_euclid(dim.get() as i64 + 1));
        let m = mkp_deduce(AliceOutcome::from(j), b);
        prop_assert!(line_points(j).contains(&Point::new(m, b)));
    }

    #[test]
    fn overlap_law_on_random_pairs(j in dim_line(), m in 0i64..1000, col in 0i64..12) {
        let dim = j.dim();
        let p = Point::new(dim.elem(m), basis_label(dim, col.rem_euclid(dim.get() as i64 + 1)));
        let prob = overlap_point_line(p, j).unwrap().abs2().to_rational().unwrap();
        let want = if j.contains(p) { num_rational::Ratio::new(1, dim.get() as i64) } else { 0.into() };
        prop_assert_eq!(prob, want);
    }

    #[test]
    fn leaky_marginal_has_weight_one_over_d(j in dim_line(), m in 0i64..1000, col in 0i64..12) {
        let dim = j.dim();
        let l = MubLabel::new(dim.elem(m), basis_label(dim, col.rem_euclid(dim.get() as i64 + 1)));
        let r = leaky_marginal(l, j).unwrap();
        prop_assert_eq!(r.norm2.to_rational(), Some(num_rational::Ratio::new(1, dim.get() as i64)));
    }

    #[test]
    fn point_states_are_normalized_products(j in dim_line(), m in 0i64..1000, col in 0i64..12) {
        let dim = j.dim();
        let p = Point::new(dim.elem(m), basis_label(dim, col.rem_euclid(dim.get() as i64 + 1)));
        let ps = point_state(p);
        prop_assert!(ps.ket.is_normalized());
        prop_assert_eq!(ps.ket.support() as u64, if p.b.is_cb() { 1 } else { dim.get() * dim.get() });
        prop_assert!(line_state(j).unwrap().ket.is_normalized());
    }
}
