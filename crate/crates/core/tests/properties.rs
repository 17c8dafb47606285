use nalgebra::Vector2;
use proptest::prelude::*;

use hcurl_ife::analysis::convergence_rates;
use hcurl_ife::config::{Resolution, RunConfig};
use hcurl_ife::ife::{build_local_basis, closed_form_curl, ct_apply, ct_inverse, CoefficientPair};
use hcurl_ife::interface::{CutConfiguration, Side};
use hcurl_ife::mesh::Point;
use hcurl_ife::nedelec::NdPoly;
use hcurl_ife::sparse::CsrMatrix;

fn cut_strategy() -> impl Strategy<Value = CutConfiguration> {
    (0usize..4, 0usize..3, 1e-3f64..=1.0, 1e-3f64..=1.0, any::<bool>(), -3.0f64..0.0).prop_map(|(rot, apex, d, e, plus, logh)| {
        let h = 10f64.powf(logh);
        let (s, c) = (rot as f64 * std::f64::consts::FRAC_PI_2).sin_cos();
        let verts = [Point::new(0.0, 0.0), Point::new(h, 0.0), Point::new(h, h)].map(|q| Point::new(0.3 + c * q.x - s * q.y, -0.2 + s * q.x + c * q.y));
        CutConfiguration::new(0, verts, apex, d, e, if plus { Side::Plus } else { Side::Minus })
    })
}

fn coeff_strategy() -> impl Strategy<Value = CoefficientPair> {
    prop::array::uniform4(-1.0f64..1.0).prop_map(|l| CoefficientPair::new(10f64.powf(l[0]), 10f64.powf(l[1]), 10f64.powf(l[2]), 10f64.powf(l[3])).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extension_round_trip(cut in cut_strategy(), coeff in coeff_strategy(), a in prop::array::uniform2(-5.0f64..5.0), b in -5.0f64..5.0) {
        let v = NdPoly::new(Vector2::new(a[0], a[1]), b / cut.diameter(), cut.midpoint);
        let w = ct_apply(&cut, &v, &coeff);
        let back = ct_inverse(&cut, &w, &coeff);
        for &x in &cut.vertices {
            let scale = v.eval(x).norm().max(w.eval(x).norm()).max(1e-300);
            prop_assert!((back.eval(x) - v.eval(x)).norm() <= 1e-13 * scale);
        }
        let t = cut.tangent;
        prop_assert!((v.eval(cut.d_point) - w.eval(cut.d_point)).dot(&t).abs() <= 1e-12 * v.eval(cut.d_point).norm().max(w.eval(cut.d_point).norm()).max(1e-300));
    }

    #[test]
    fn shape_functions_are_dual_to_edges(cut in cut_strategy(), coeff in coeff_strategy()) {
        let basis = build_local_basis(&cut, &coeff).unwrap();
        let c0 = closed_form_curl(&cut, &coeff);
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((basis.edge_dof(i, j) - delta).abs() <= 1e-11);
            }
            prop_assert!((basis.mu_inv_curl(i) - c0).abs() <= 1e-12 * c0.abs());
        }
    }

    #[test]
    fn csr_assembly_ignores_triplet_order(entries in prop::collection::vec((0usize..6, 0usize..6, -8i32..8), 0..60), seed in any::<u64>()) {
        let t: Vec<(usize, usize, f64)> = entries.iter().map(|&(r, c, v)| (r, c, v as f64)).collect();
        let mut shuffled = t.clone();
        let n = shuffled.len();
        for k in (1..n).rev() {
            shuffled.swap(k, (seed.wrapping_mul(k as u64 + 7) % (k as u64 + 1)) as usize);
        }
        let a = CsrMatrix::from_triplets(6, 6, t);
        let b = CsrMatrix::from_triplets(6, 6, shuffled);
        prop_assert_eq!(a.to_dense(), b.to_dense());
        prop_assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn rates_recover_power_laws(p in 0.1f64..3.0, c in 1e-3f64..1e3) {
        let levels: Vec<(f64, f64)> = (0..5).map(|k| { let h = 0.5f64.powi(k); (h, c * h.powf(p)) }).collect();
        for r in convergence_rates(&levels) {
            prop_assert!((r - p).abs() < 1e-10);
        }
    }

    #[test]
    fn config_accepts_increasing_sizes(mut sizes in prop::collection::btree_set(1usize..500, 1..6)) {
        let list: Vec<usize> = std::mem::take(&mut sizes).into_iter().collect();
        let text = format!("mesh.sizes = {}", list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "));
        let cfg: RunConfig = text.parse().unwrap();
        prop_assert_eq!(cfg.sizes, list.into_iter().map(Resolution).collect::<Vec<_>>());
    }
}
