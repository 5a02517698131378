use braidcalc::corpus::corpus;
use braidcalc::foliation::{
    be_statistics, classify, export_dot, is_standard_tiling, statistics, validate, Classification,
    FoliationMovie, Parity,
};

fn vertex_balance(m: &FoliationMovie) -> (usize, usize) {
    let pos = m.vertices.iter().filter(|v| v.parity == Parity::Pos).count();
    (pos, m.vertices.len() - pos)
}

#[test]
fn every_fixture_validates() {
    for (name, m) in corpus() {
        let report = validate(&m);
        assert!(report.is_valid(), "{name}: {report}");
    }
}

#[test]
fn tilings_balance() {
    for (name, m) in corpus() {
        if classify(&m).unwrap() != Classification::Tiled {
            continue;
        }
        let s = statistics(&m).unwrap();
        assert_eq!(m.n2(), m.saddle_count(), "{name}");
        assert_eq!(s.positive_saddles, s.negative_saddles, "{name}");
        let (p, n) = vertex_balance(&m);
        assert_eq!(p, n, "{name}");
        assert!(s.valence_balance.holds(), "{name}: {:?}", s.valence_balance);
        if is_standard_tiling(&m).is_ok() {
            assert_eq!((s.valence_balance.lhs, s.valence_balance.rhs), (0, 0), "{name}");
        }
    }
}

#[test]
fn mixed_fixtures_are_realizable() {
    let mut seen = 0;
    for (name, m) in corpus() {
        if classify(&m).unwrap() != Classification::Mixed {
            continue;
        }
        seen += 1;
        let be = be_statistics(&m).unwrap();
        assert!(be.be_balance.holds(), "{name}: {:?}", be.be_balance);
        assert!(be.realizable, "{name}");
    }
    assert!(seen >= 3);
}

#[test]
fn movie_json_round_trips() {
    for (name, m) in corpus() {
        assert_eq!(FoliationMovie::from_json(&m.to_json()).unwrap(), m, "{name}");
    }
}

#[test]
fn torus35_dot_counts() {
    let m = braidcalc::corpus::fixture("torus35").unwrap();
    let dot = export_dot(&m);
    assert_eq!(dot, export_dot(&m));
    let vertex_nodes = dot.lines().filter(|l| l.trim_start().starts_with("v") && l.contains("[") && !l.contains("--")).count();
    let saddle_nodes = dot.lines().filter(|l| l.trim_start().starts_with("s") && l.contains("[") && !l.contains("--")).count();
    assert_eq!((vertex_nodes, saddle_nodes), (8, 8), "{dot}");
}
