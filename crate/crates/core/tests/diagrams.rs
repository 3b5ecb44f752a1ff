use proptest::prelude::*;

use vph_core::diagram::{bin_measure, translate_diagram};
use vph_core::filtration::{build_filtered_complex, parse_kappa, shift_kappa};
use vph_core::homology::{
    boundary_dim, concise_diagram, cycle_dim, epbn_diagram, epbn_rank, verbose_diagram, verbose_diagrams,
    ExtendedPbnQuery, Field,
};
use vph_core::io::{read_diagrams, write_diagrams};
use vph_core::{MarkedPoint, MarkedPointCloud, VerboseDiagram};

fn cloud_strategy(max_len: usize) -> impl Strategy<Value = MarkedPointCloud> {
    let point = (proptest::collection::vec(0.0f64..3.0, 2), 0.0f64..0.4);
    proptest::collection::vec(point, 1..=max_len).prop_filter_map("simple cloud", |raw| {
        let pts = raw.into_iter().map(|(c, m)| MarkedPoint::new(c, m)).collect();
        MarkedPointCloud::new(pts, 2, 0.4).ok()
    })
}

fn kappa_strategy() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("rips"), Just("rips-marked"), Just("cech"), Just("cech-marked")]
}

/// Thresholds at 0, the distinct filtration values, and midpoints between them.
fn thresholds(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut out = vec![0.0];
    for w in v.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(v.last());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_and_diagram_routes_agree(x in cloud_strategy(6), name in kappa_strategy()) {
        let kappa = parse_kappa(name).unwrap();
        let fc = build_filtered_complex(&x, kappa.as_ref(), 2, f64::INFINITY).unwrap();
        let ts = thresholds(&fc.simplices().iter().map(|s| s.kappa).collect::<Vec<_>>());
        for q in 0..=2 {
            let vd = verbose_diagram(&fc, q).unwrap();
            for &t in &ts {
                let born = vd.points().iter().filter(|p| p.birth <= t).count();
                let dead = vd.points().iter().filter(|p| p.death <= t).count();
                prop_assert_eq!(cycle_dim(&fc, q, t).unwrap(), born);
                prop_assert_eq!(boundary_dim(&fc, q, t).unwrap(), dead);
                for &s in &ts {
                    let query = ExtendedPbnQuery::new(q, t, s).unwrap();
                    prop_assert_eq!(epbn_rank(&fc, query).unwrap(), epbn_diagram(&vd, query).unwrap());
                }
            }
        }
    }

    #[test]
    fn input_order_does_not_matter(x in cloud_strategy(7), name in kappa_strategy(), rot in 0usize..7) {
        let kappa = parse_kappa(name).unwrap();
        let mut pts = x.points().to_vec();
        let len = pts.len();
        pts.rotate_left(rot % len);
        pts.reverse();
        let y = MarkedPointCloud::new(pts, 2, x.r0()).unwrap();
        let a = verbose_diagrams(&build_filtered_complex(&x, kappa.as_ref(), 2, 2.0).unwrap(), Field::F2).unwrap();
        let b = verbose_diagrams(&build_filtered_complex(&y, kappa.as_ref(), 2, 2.0).unwrap(), Field::F2).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn concise_counts_match_above_diagonal(x in cloud_strategy(6), name in kappa_strategy()) {
        let kappa = parse_kappa(name).unwrap();
        let fc = build_filtered_complex(&x, kappa.as_ref(), 1, f64::INFINITY).unwrap();
        let ts = thresholds(&fc.simplices().iter().map(|s| s.kappa).collect::<Vec<_>>());
        for q in 0..=1 {
            let vd = verbose_diagram(&fc, q).unwrap();
            let cd = concise_diagram(&vd);
            prop_assert!(cd.points().iter().all(|p| vd.points().contains(p)));
            for &r in &ts {
                for &s in ts.iter().filter(|&&s| s >= r) {
                    prop_assert_eq!(cd.count_region(r, s), vd.count_region(r, s));
                }
            }
        }
    }

    #[test]
    fn shifted_diagrams_are_translates(x in cloud_strategy(6), name in kappa_strategy(), k in 0usize..4, t in prop_oneof![Just(0.0), Just(0.7), Just(2.5)]) {
        let base = parse_kappa(name).unwrap();
        let shifted = shift_kappa(parse_kappa(name).unwrap(), k, t).unwrap();
        let a = verbose_diagrams(&build_filtered_complex(&x, base.as_ref(), 2, f64::INFINITY).unwrap(), Field::F2).unwrap();
        let b = verbose_diagrams(&build_filtered_complex(&x, &shifted, 2, f64::INFINITY).unwrap(), Field::F2).unwrap();
        for (q, (orig, moved)) in a.iter().zip(&b).enumerate() {
            let shift = if k > q { (0.0, 0.0) } else if k == q { (0.0, t) } else { (t, t) };
            prop_assert_eq!(&translate_diagram(orig, shift).unwrap(), moved);
        }
    }

    #[test]
    fn binned_count_is_cardinality(x in cloud_strategy(7), name in kappa_strategy(), t_max in 0.0f64..2.0) {
        let kappa = parse_kappa(name).unwrap();
        let fc = build_filtered_complex(&x, kappa.as_ref(), 1, t_max).unwrap();
        for vd in verbose_diagrams(&fc, Field::F2).unwrap() {
            let m = bin_measure(&vd, 2.0, 0.25, 3.0).unwrap();
            prop_assert_eq!(m.total_count(), vd.len() as f64);
        }
    }

    #[test]
    fn prime_fields_agree_on_small_clouds(x in cloud_strategy(5), name in kappa_strategy()) {
        // complexes on five vertices have no torsion, so the field does not matter
        let kappa = parse_kappa(name).unwrap();
        let fc = build_filtered_complex(&x, kappa.as_ref(), 2, f64::INFINITY).unwrap();
        prop_assert_eq!(verbose_diagrams(&fc, Field::F2).unwrap(), verbose_diagrams(&fc, Field::new(3).unwrap()).unwrap());
    }

    #[test]
    fn diagram_csv_round_trip(x in cloud_strategy(7), name in kappa_strategy()) {
        let kappa = parse_kappa(name).unwrap();
        let ds = verbose_diagrams(&build_filtered_complex(&x, kappa.as_ref(), 2, 1.5).unwrap(), Field::F2).unwrap();
        let mut buf = Vec::new();
        write_diagrams(&mut buf, &ds).unwrap();
        let back = read_diagrams(buf.as_slice()).unwrap();
        for d in ds.iter().filter(|d| !d.is_empty()) {
            let parsed: &VerboseDiagram = &back[&d.q()];
            prop_assert_eq!(parsed.points(), d.points());
        }
    }
}
