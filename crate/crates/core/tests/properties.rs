use nalgebra::DMatrix;
use nash_learn::fixed_point::EpsSchedule;
use nash_learn::trajectory::{ErrorTrajectory, TrajectoryRow};
use nash_learn::vi::{check_p_matrix, contraction_factor, BoxSet, ContractionParams, ConvexSet, FirmPolyhedron};
use proptest::prelude::*;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn firm_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..5).prop_flat_map(|w| {
        (
            prop::collection::vec(0.1f64..10.0, w),
            prop::collection::vec(-20.0f64..20.0, 2 * w),
            prop::collection::vec(-20.0f64..20.0, 2 * w),
        )
    })
}

proptest! {
    #[test]
    fn firm_projection_is_feasible_idempotent_and_nonexpansive((caps, y, z) in firm_case()) {
        let set = FirmPolyhedron::new(caps).unwrap();
        let (py, pz) = (set.project(&y), set.project(&z));
        prop_assert!(set.contains(&py, 1e-9));
        let again = set.project(&py);
        prop_assert!(dist(&again, &py) <= 1e-9 * (1.0 + py.iter().map(|v| v.abs()).sum::<f64>()));
        prop_assert!(dist(&py, &pz) <= dist(&y, &z) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn box_projection_is_nonexpansive(
        y in prop::collection::vec(-5.0f64..5.0, 4),
        z in prop::collection::vec(-5.0f64..5.0, 4),
    ) {
        let set = BoxSet::cube(4, -1.0, 2.0).unwrap();
        let (py, pz) = (set.project(&y), set.project(&z));
        prop_assert!(set.contains(&py, 0.0));
        prop_assert_eq!(set.project(&py), py.clone());
        prop_assert!(dist(&py, &pz) <= dist(&y, &z) + 1e-15);
    }

    #[test]
    fn p_class_survives_relabeling_and_positive_scaling(
        entries in prop::collection::vec(-3.0f64..3.0, 16),
        perm_key in prop::collection::vec(0u32..1000, 4),
        scale in prop::collection::vec(0.1f64..10.0, 4),
    ) {
        let h = DMatrix::from_row_slice(4, 4, &entries);
        let mut perm: Vec<usize> = (0..4).collect();
        perm.sort_by_key(|&i| (perm_key[i], i));
        let permuted = DMatrix::from_fn(4, 4, |r, c| h[(perm[r], perm[c])]);
        let scaled = DMatrix::from_fn(4, 4, |r, c| scale[r] * h[(r, c)] * scale[c]);
        let class = check_p_matrix(&h).unwrap();
        prop_assert_eq!(check_p_matrix(&permuted).unwrap(), class);
        prop_assert_eq!(check_p_matrix(&scaled).unwrap(), class);
    }

    #[test]
    fn admissible_steps_contract(mu in 0.01f64..5.0, ratio in 1.0f64..20.0, frac in 0.001f64..0.999) {
        let l = mu * ratio;
        let p = ContractionParams::new(mu, l, frac * 2.0 * mu / (l * l)).unwrap();
        let q = contraction_factor(&p);
        prop_assert!((0.0..1.0).contains(&q));
    }

    #[test]
    fn regularisation_weights_decrease(eps0 in 1e-3f64..10.0, rho in 0.05f64..1.0, k in 0usize..100_000) {
        let s = EpsSchedule::new(eps0, rho).unwrap();
        prop_assert!(s.eps(k) > 0.0);
        prop_assert!(s.eps(k + 1) < s.eps(k));
    }

    #[test]
    fn trajectory_csv_round_trips(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 6..60)) {
        let mut t = ErrorTrajectory::new(&["extra"]);
        for (k, c) in values.chunks_exact(6).enumerate() {
            t.push(TrajectoryRow { k, err_x: c[0], err_theta: c[1], gamma_max: c[2], alpha_max: c[3], extra: vec![c[4]] }).unwrap();
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = ErrorTrajectory::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, t);
    }
}
