mod common;

use common::{counts, golden_entries, golden_totals, poly};
use vfrep::dimmonoid::{enumerate, Correction, DimVector};
use vfrep::groupgraph::GraphOfGroups;
use vfrep::series::Kind;

fn assert_totals(group: &str, max_dim: u32) {
    let c = counts(group, max_dim, Correction::Standard);
    let rows = golden_totals(group);
    assert!(!rows.is_empty());
    for (d, expected) in rows {
        assert_eq!(c.total(Kind::Ss, d), expected, "{group} d={d}");
    }
}

#[test]
fn psl2z_ss_totals() {
    assert_totals("psl2z", 12);
}

#[test]
fn sl2z_ss_totals() {
    assert_totals("sl2z", 8);
}

#[test]
fn gl2z_ss_totals() {
    assert_totals("gl2z", 10);
}

#[test]
fn pgl2z_ss_totals() {
    assert_totals("pgl2z", 12);
}

#[test]
fn psl2z_absim_entries() {
    common::criterion_goldens().unwrap();
}

#[test]
fn psl2z_absim_second_copy_of_dim6_row() {
    // the fixture lists one of these two; the C2 swap carries it to the other
    let g = GraphOfGroups::preset("psl2z").unwrap();
    let c = counts("psl2z", 6, Correction::Standard);
    let expected = poly("s^5-4s^4+6s^3-7s^2+9s-6");
    for text in ["((4,2),(2,2,2))", "((2,4),(2,2,2))"] {
        assert_eq!(c.absim_of(&DimVector::parse(&g, text).unwrap()).unwrap(), &expected);
    }
    let nonzero6: Vec<_> = enumerate(&g, 6)
        .into_iter()
        .filter(|m| !c.absim_of(m).unwrap().is_zero())
        .map(|m| m.to_string())
        .collect();
    let listed: Vec<String> = golden_entries("psl2z_absim_dim6.json").into_iter().map(|(m, _)| m).collect();
    for m in &listed {
        assert!(nonzero6.contains(m));
    }
    assert_eq!(nonzero6.len(), listed.len() + 1, "{nonzero6:?}");
}

#[test]
fn psl2z_absim_constant_within_low_dimensions() {
    // below dimension 6 all nonzero absim polynomials of one total dimension coincide
    let g = GraphOfGroups::preset("psl2z").unwrap();
    let c = counts("psl2z", 5, Correction::Standard);
    for d in 1..=5 {
        let mut seen: Vec<_> = enumerate(&g, d)
            .iter()
            .map(|m| c.absim_of(m).unwrap().clone())
            .filter(|p| !p.is_zero())
            .collect();
        seen.dedup();
        assert!(seen.len() <= 1, "d={d}: {seen:?}");
    }
}

/// `C_a *_{C_c} C_b` against `C_{a/c} * C_{b/c}`: absim is the free-product
/// value on the single nonzero block and zero when two blocks are nonzero.
#[test]
fn sl2z_absim_reduces_to_blocks() {
    let sl = GraphOfGroups::preset("sl2z").unwrap();
    let psl = GraphOfGroups::preset("psl2z").unwrap();
    let c_sl = counts("sl2z", 8, Correction::Standard);
    let c_psl = counts("psl2z", 8, Correction::Standard);
    for d in 1..=8 {
        for m in enumerate(&sl, d) {
            let p = m.parts();
            let blocks: Vec<Vec<Vec<u32>>> = (0..2)
                .map(|g| vec![vec![p[0][g], p[0][g + 2]], vec![p[1][g], p[1][g + 2], p[1][g + 4]]])
                .collect();
            let nonzero: Vec<_> = blocks.iter().filter(|b| b.iter().flatten().any(|&x| x > 0)).collect();
            let got = c_sl.absim_of(&m).unwrap();
            if nonzero.len() == 1 {
                let n = DimVector::new(&psl, nonzero[0].clone()).unwrap();
                assert_eq!(got, c_psl.absim_of(&n).unwrap(), "{m}");
            } else {
                assert!(got.is_zero(), "{m}");
            }
        }
    }
}
