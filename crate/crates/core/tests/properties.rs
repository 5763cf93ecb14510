use proptest::prelude::*;

use specteig::dinkelbach::{dinkelbach_solve, DinkelbachConfig};
use specteig::eigen::{build_problem, Extremum, Kind};
use specteig::pam::{pam_solve, prox_sphere_step, PamConfig};
use specteig::tensor::{parse_tensor, write_tensor};
use specteig::trust_region::{
    homogenize, parse_poly, poly_to_json, random_cubic, solve_boundary, CubicScales, TaylorPoly, TrConfig,
};
use specteig::verify::random_tensor;
use specteig::{MultilinearForm, SymTensor};

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, dim)
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vector(dim).prop_filter("nonzero", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-3)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn tensor_and_blocks() -> impl Strategy<Value = (SymTensor, Vec<Vec<f64>>)> {
    (2usize..=4, 2usize..=4, any::<u64>()).prop_flat_map(|(m, n, seed)| {
        let a = random_tensor(m, n, seed).unwrap();
        (Just(a), prop::collection::vec(vector(n), m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multilinear_form_is_permutation_invariant(
        (a, blocks) in tensor_and_blocks(),
        shift in 0usize..4,
    ) {
        let refs: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
        let mut rotated = refs.clone();
        rotated.rotate_left(shift % refs.len());
        rotated.swap(0, refs.len() - 1);
        let v1 = a.multilinear_apply(&refs).unwrap();
        let v2 = a.multilinear_apply(&rotated).unwrap();
        prop_assert!((v1 - v2).abs() <= 1e-12 * (1.0 + v1.abs()));
    }

    #[test]
    fn partial_is_the_linear_functional_of_the_free_slot(
        (a, blocks) in tensor_and_blocks(),
        slot in 0usize..4,
    ) {
        let slot = slot % blocks.len();
        let refs: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
        let mut others = refs.clone();
        others.remove(slot);
        let g = a.multilinear_partial(&others, slot).unwrap();
        let via_partial: f64 = g.iter().zip(refs[slot]).map(|(a, b)| a * b).sum();
        let direct = a.multilinear_apply(&refs).unwrap();
        prop_assert!((via_partial - direct).abs() <= 1e-12 * (1.0 + direct.abs()));

        let mut doubled = blocks.clone();
        for v in &mut doubled[slot] {
            *v *= 2.0;
        }
        let drefs: Vec<&[f64]> = doubled.iter().map(|b| b.as_slice()).collect();
        let twice = a.multilinear_apply(&drefs).unwrap();
        prop_assert!((twice - 2.0 * direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn euler_identity_and_finite_difference_gradient(
        m in 2usize..=5,
        seed in any::<u64>(),
        x in nonzero(3),
    ) {
        let a = random_tensor(m, 3, seed).unwrap();
        let f = a.apply_full(&x).unwrap();
        let g = a.apply_gradient(&x).unwrap();
        let euler: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((euler - f).abs() <= 1e-12 * (1.0 + f.abs()));

        let h = 1e-6;
        let scale = g.iter().map(|v| (m as f64 * v).abs()).fold(1.0, f64::max);
        for i in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (a.apply_full(&xp).unwrap() - a.apply_full(&xm).unwrap()) / (2.0 * h);
            prop_assert!((fd - m as f64 * g[i]).abs() <= 1e-5 * scale);
        }
    }

    #[test]
    fn homogenization_matches_the_polynomial(
        n in 1usize..=5,
        p in 1usize..=4,
        coeffs in prop::collection::vec(-5.0..5.0f64, 12),
        seed in any::<u64>(),
        s in vector(5),
    ) {
        let mut poly = TaylorPoly::new(n, p).unwrap();
        let mut state = seed;
        for c in coeffs {
            let mut alpha = vec![0usize; n];
            let mut budget = (state % (p as u64 + 1)) as usize;
            while budget > 0 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                alpha[(state >> 33) as usize % n] += 1;
                budget -= 1;
            }
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            poly.add_term(&alpha, c).unwrap();
        }
        let s = &s[..n];
        let tensor = homogenize(&poly);
        prop_assert_eq!(tensor.order(), p);
        prop_assert_eq!(tensor.dim(), n + 1);
        let mut lifted = vec![1.0];
        lifted.extend_from_slice(s);
        let t = tensor.apply_full(&lifted).unwrap();
        let direct = poly.eval(s).unwrap();
        let size: f64 = poly.terms().map(|(_, c)| c.abs()).sum();
        prop_assert!((t - direct).abs() <= 1e-10 * (1.0 + size));

        let back = parse_poly(&poly_to_json(&poly)).unwrap();
        prop_assert!((back.eval(s).unwrap() - direct).abs() <= 1e-12 * (1.0 + size));
    }

    #[test]
    fn prox_step_beats_sampled_sphere_points(
        c in vector(4),
        xk in nonzero(4),
        gamma in 0.0..4.0f64,
        radius in 0.5..3.0f64,
        others in prop::collection::vec(nonzero(4), 16),
    ) {
        let xk: Vec<f64> = xk.iter().map(|v| v * radius / norm(&xk)).collect();
        let upd = prox_sphere_step(&c, &xk, gamma, radius);
        prop_assert!((norm(&upd.x) - radius).abs() <= 1e-12 * radius);
        let objective = |x: &[f64]| {
            let lin: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
            let prox: f64 = x.iter().zip(&xk).map(|(a, b)| (a - b) * (a - b)).sum();
            lin + 0.5 * gamma * prox
        };
        let best = objective(&upd.x);
        for y in others {
            let y: Vec<f64> = y.iter().map(|v| v * radius / norm(&y)).collect();
            prop_assert!(best <= objective(&y) + 1e-12);
        }
    }

    #[test]
    fn tensor_text_round_trip(m in 1usize..=4, n in 1usize..=4, seed in any::<u64>()) {
        let a = random_tensor(m, n, seed).unwrap();
        let mut buf = Vec::new();
        write_tensor(&a, &mut buf).unwrap();
        let b = parse_tensor(std::str::from_utf8(&buf).unwrap()).unwrap();
        for ((i1, v1), (i2, v2)) in a.entries().zip(b.entries()) {
            prop_assert_eq!(i1, i2);
            prop_assert_eq!(v1, v2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pam_descends_and_stays_on_the_spheres(
        m in prop::sample::select(vec![2usize, 4]),
        n in 2usize..=4,
        tensor_seed in any::<u64>(),
        seed in any::<u64>(),
        gamma in 0.5..3.0f64,
        radius in 0.5..2.0f64,
    ) {
        let a = random_tensor(m, n, tensor_seed).unwrap();
        let config = PamConfig {
            gammas: vec![gamma],
            radii: vec![radius],
            eps: 1e-10,
            max_iter: 300,
            seed,
            ..PamConfig::default()
        };
        let res = pam_solve(&a, &config).unwrap();
        for w in res.history.windows(2) {
            let [prev, next] = [w[0], w[1]];
            prop_assert!(next.h_t + 0.5 * gamma * next.step_norm.powi(2) <= prev.h_t + 1e-10);
        }
        for b in &res.blocks {
            prop_assert!((norm(b) - radius).abs() <= 1e-12 * radius);
        }
        prop_assert!((norm(&res.v) - radius).abs() <= 1e-12 * radius);
    }

    #[test]
    fn dinkelbach_trace_is_monotone(
        seed in any::<u64>(),
        tensor_seed in any::<u64>(),
        kind in prop::sample::select(vec![Kind::Z, Kind::H]),
    ) {
        let a = random_tensor(4, 3, tensor_seed).unwrap();
        let problem = build_problem(a, kind, None, Extremum::Min).unwrap();
        let config = DinkelbachConfig {
            inner: PamConfig { seed, ..PamConfig::default() },
            ..DinkelbachConfig::default()
        };
        let res = dinkelbach_solve(problem.fractional(), &config).unwrap();
        for w in res.trace.windows(2) {
            prop_assert!(w[1].theta <= w[0].theta + 1e-9);
            prop_assert!(w[1].f_theta >= w[0].f_theta - 1e-9);
        }
        prop_assert!(res.trace.iter().all(|r| r.f_theta <= 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trust_region_stays_on_the_boundary(
        n in 2usize..=6,
        seed in any::<u64>(),
        delta in 0.5..4.0f64,
    ) {
        let poly = random_cubic(n, CubicScales::default(), seed).unwrap();
        let res = solve_boundary(&poly, delta, &TrConfig::default()).unwrap();
        prop_assert!((norm(&res.s) - delta).abs() <= 1e-10 * delta);
        let slack = 1e-12 * (1.0 + res.history[0].abs());
        for w in res.history.windows(2) {
            prop_assert!(w[1] <= w[0] + slack);
        }
        prop_assert!((poly.eval(&res.s).unwrap() - res.value).abs() <= 1e-9 * (1.0 + res.value.abs()));
    }
}
