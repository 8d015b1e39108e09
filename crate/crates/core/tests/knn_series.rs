use proptest::prelude::*;
use totalwalk::experiments::{family_levels, Family};
use totalwalk::graph::complete_bipartite;
use totalwalk::knn::{knn_levels, knn_search_asymptotics, knn_series, MarkedKind};
use totalwalk::search::{report, LevelWeights, SearchSetup};
use totalwalk::spectral::symmetric_eig;

const KINDS: [MarkedKind; 2] = [MarkedKind::Vertex, MarkedKind::Edge];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The truncated expansions stay within their stated order of the exact sums.
    #[test]
    fn series_error_orders(n in 10usize..400) {
        let nf = n as f64;
        for kind in KINDS {
            let rep = report(&knn_levels(n, kind).unwrap(), None).unwrap();
            let (s1, s2, eps, _) = knn_series(n, kind);
            prop_assert!((rep.s1 - s1).abs() * nf.powi(3) <= 5.0, "{} S1 {}", kind, rep.s1 - s1);
            prop_assert!((rep.s2 - s2).abs() * nf.powi(3) <= 5.0, "{} S2 {}", kind, rep.s2 - s2);
            let exact = rep.epsilon * (rep.dimension as f64).sqrt();
            prop_assert!((exact - eps).abs() * nf.powi(2) <= 10.0, "{} eps {}", kind, exact - eps);
        }
    }

    #[test]
    fn s2_leading_terms_agree(n in 10usize..400) {
        let v = report(&knn_levels(n, MarkedKind::Vertex).unwrap(), None).unwrap();
        let e = report(&knn_levels(n, MarkedKind::Edge).unwrap(), None).unwrap();
        prop_assert!((v.s2 - e.s2).abs() * (n as f64).powi(3) <= 5.0);
    }

    #[test]
    fn half_gap_tracks_first_order_gap(n in 5usize..200) {
        for kind in KINDS {
            let rep = report(&knn_levels(n, kind).unwrap(), None).unwrap();
            prop_assert!((rep.half_gap / rep.epsilon - 1.0).abs() <= 2.0 / n as f64);
        }
    }
}

#[test]
fn closed_form_levels_agree_with_dense_eigensystem() {
    for n in 2..7 {
        let g = complete_bipartite(n, n).unwrap();
        let t = totalwalk::graph::total_graph(&g);
        let a = symmetric_eig(&t.graph().adjacency_f64(), 1e-12).unwrap();
        for kind in KINDS {
            let label = totalwalk::knn::knn_marked(n, kind);
            let setup = SearchSetup::on_total_graph(&t, label, 1.0).unwrap();
            let dense = LevelWeights::from_eigensystem(&a, t.index_of(label).unwrap(), setup.initial()).unwrap();
            let cf = knn_levels(n, kind).unwrap();
            let family = family_levels(Family::Knn, n, kind).unwrap();
            let x = report(&dense, None).unwrap();
            for other in [&cf, &family] {
                let y = report(other, None).unwrap();
                assert!((x.s1 - y.s1).abs() <= 1e-10, "n={n} {kind}");
                assert!((x.s2 - y.s2).abs() <= 1e-10, "n={n} {kind}");
                assert!((x.lambda_plus - y.lambda_plus).abs() <= 1e-10, "n={n} {kind}");
            }
        }
    }
}

#[test]
fn asymptotic_summary_is_consistent() {
    for kind in KINDS {
        let a = knn_search_asymptotics(20, kind).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"n\":20"), "{json}");
    }
    assert!(knn_search_asymptotics(2, MarkedKind::Vertex).is_err());
}
