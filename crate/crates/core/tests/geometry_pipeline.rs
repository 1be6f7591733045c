//! Tessellation invariants and artwork export round trips.

use std::collections::HashMap;

use fssdome::artwork::{
    build_layer, drc_check, export_json, export_mesh, export_svg, parse_json, parse_mesh, signed_volume, ArtworkParams, LayerId,
    MESH_THICKNESS,
};
use fssdome::goldberg::{build_goldberg, hemisphere_with_skirt, irreducible_section, GoldbergSpec, GoldbergTessellation};
use proptest::prelude::*;

fn small_layers(m: u32) -> Vec<GoldbergTessellation> {
    [72.5, 73.75, 75.0].iter().map(|&r| hemisphere_with_skirt(&build_goldberg(&GoldbergSpec::new(m, r)).unwrap(), 25.0).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn class_one_counts(m in 1u32..=14, radius in 10.0..200.0f64) {
        let t = build_goldberg(&GoldbergSpec::new(m, radius)).unwrap();
        let m2 = (m * m) as usize;
        prop_assert_eq!(t.counts(), (12, 10 * m2 - 10));
        prop_assert_eq!(t.euler(), (20 * m2, 30 * m2, 10 * m2 + 2));
        prop_assert_eq!(t.euler_characteristic(), 2);
        for v in &t.vertices {
            prop_assert!((v.norm() - radius).abs() < 1e-9 * radius);
        }
        // Every edge borders two cells on a closed sphere.
        prop_assert!(t.edges.iter().all(|e| e.cells.iter().all(Option::is_some)));
    }
}

#[test]
fn hemisphere_section_rebuilds_every_cell() {
    for m in [4, 8, 20] {
        let hemi = small_layers(m);
        for t in &hemi {
            assert_eq!(t.counts().0, 6);
            let section = irreducible_section(t).unwrap();
            assert!(section.cell_ids.len() < t.cells.len());
        }
    }
}

/// Vertices are printed with fixed precision, so equal corners print identically.
type Key = (i64, i64, i64);

fn key(v: &nalgebra::Vector3<f64>) -> Key {
    let q = |x: f64| (x * 1e9).round() as i64;
    (q(v.x), q(v.y), q(v.z))
}

#[test]
fn mesh_solids_are_closed_and_outward() {
    let layers = small_layers(6);
    let params = ArtworkParams::default();
    for (id, t) in LayerId::ALL.iter().zip(&layers) {
        let art = build_layer(t, *id, &params).unwrap();
        let text = export_mesh(&art);
        assert!(text.starts_with("# fssdome.mesh/1"));
        let solids = parse_mesh(&text).unwrap();
        let segments: usize = art.traces.iter().map(|tr| tr.segments().count()).sum();
        assert_eq!(solids.len(), segments);
        let mut si = 0;
        for tr in &art.traces {
            for (a, b) in tr.segments() {
                let solid = &solids[si];
                si += 1;
                let mut directed: HashMap<(Key, Key), usize> = HashMap::new();
                for tri in solid {
                    for k in 0..3 {
                        *directed.entry((key(&tri[k]), key(&tri[(k + 1) % 3]))).or_default() += 1;
                    }
                }
                for (&(p, q), &n) in &directed {
                    assert_eq!(n, 1, "edge used twice in the same direction");
                    assert_eq!(directed.get(&(q, p)), Some(&1), "unpaired edge");
                }
                let want = (b - a).norm() * tr.width * MESH_THICKNESS;
                let vol = signed_volume(solid);
                assert!(vol > 0.0 && (vol / want - 1.0).abs() < 1e-3, "volume {vol} vs {want}");
            }
        }
    }
}

#[test]
fn json_round_trip_and_svg() {
    let layers = small_layers(4);
    let params = ArtworkParams::table_one();
    let arts: Vec<_> = LayerId::ALL.iter().zip(&layers).map(|(id, t)| build_layer(t, *id, &params).unwrap()).collect();
    let text = export_json(&arts).unwrap();
    let back = parse_json(&text).unwrap();
    assert_eq!(back.layers, arts);
    assert_eq!(export_json(&back.layers).unwrap(), text);
    for a in &arts {
        let svg = export_svg(a);
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(drc_check(a, 0.15, 0.125).is_clean());
    }
}
