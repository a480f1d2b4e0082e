//! Property tests for the model invariants: probability bounds and
//! monotonicity, algebraic inverses, compensation exactness, kernel
//! closure, and serialization round-trips.

use a2s_core::bitstream::{abs_diff, and_multiply, encode, encode_correlated, scaled_add};
use a2s_core::calibration::{analytic_compensation, perturbed_log_prob_at};
use a2s_core::converter::{
    input_for_nonswitch_prob, nonswitch_log_prob, ConverterConfig, SensorParams,
};
use a2s_core::device::{
    biased_parallel_resistance, critical_current_spin, switching_probability,
    switching_time_constant, MtjParams,
};
use a2s_core::rng::{domains, StreamKey};
use a2s_core::sweep::{emit_csv, parse_csv, SweepSeries};
use proptest::prelude::*;

fn default_chain() -> (SensorParams<f64>, MtjParams<f64>, ConverterConfig<f64>) {
    (
        SensorParams::default(),
        MtjParams::default(),
        ConverterConfig::default(),
    )
}

proptest! {
    #[test]
    fn switching_probability_is_a_probability(
        i_w in 1e-6f64..2e-3,
        t in 0.0f64..1e-7,
    ) {
        let params = MtjParams::default();
        let p = switching_probability(&params, i_w, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        if i_w <= params.i_c0s || t == 0.0 {
            prop_assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn switching_probability_is_monotone(
        i_w in 2.01e-4f64..1e-3,
        t in 1e-12f64..2e-8,
        di in 0.0f64..5e-4,
        dt in 0.0f64..1e-8,
    ) {
        let params = MtjParams::default();
        let base = switching_probability(&params, i_w, t).unwrap();
        let more_current = switching_probability(&params, i_w + di, t).unwrap();
        let more_time = switching_probability(&params, i_w, t + dt).unwrap();
        prop_assert!(more_current >= base);
        prop_assert!(more_time >= base);
    }

    #[test]
    fn time_constant_inverts_the_spin_current(i_w in 2.000001e-4f64..5e-3) {
        let params = MtjParams::default();
        let tau_p = switching_time_constant(&params, i_w).unwrap();
        let back = critical_current_spin(&params, tau_p).unwrap();
        prop_assert!(((back - i_w) / i_w).abs() < 1e-12);
    }

    #[test]
    fn zero_bias_resistance_is_exactly_r_p(
        r_p in 100.0f64..10e3,
        bc1 in 0.0f64..1.0,
        bc2 in 0.0f64..1.0,
        v_b in -1.0f64..1.0,
    ) {
        let params = MtjParams { r_p, r_ap: 4.0 * r_p, bc1, bc2, ..MtjParams::default() };
        prop_assert_eq!(biased_parallel_resistance(&params, 0.0), r_p);
        prop_assert!(biased_parallel_resistance(&params, v_b) >= r_p);
    }

    #[test]
    fn affine_and_exponential_forms_agree(i_ph in 1e-9f64..1.5e-5) {
        let (s, m, c) = default_chain();
        let affine = nonswitch_log_prob(&s, &m, &c, i_ph).unwrap();
        prop_assume!(!affine.no_switching);
        let i_w = a2s_core::converter::write_current(&s, &m, &c, i_ph).unwrap();
        let p_w = switching_probability(&m, i_w, c.t_write).unwrap();
        let direct = 1.0 - p_w;
        prop_assert!(((affine.pbar() - direct) / direct).abs() < 1e-12);
    }

    #[test]
    fn full_compensation_is_pointwise_exact(
        delta_r in -100.0f64..100.0,
        i_ph in 1e-9f64..1.5e-5,
    ) {
        let (s, m, c) = default_chain();
        let comp = analytic_compensation(&s, &m, &c, delta_r).unwrap();
        let nominal = nonswitch_log_prob(&s, &m, &c, i_ph).unwrap().pbar();
        let compensated =
            perturbed_log_prob_at(&s, &m, &c, delta_r, comp.t_prime, comp.v_bias_prime, i_ph)
                .unwrap()
                .pbar();
        prop_assert!(((compensated - nominal) / nominal).abs() < 1e-9);
    }

    #[test]
    fn anchor_response_is_monotone_in_the_bias_voltage(
        delta_r in -100.0f64..100.0,
        v_lo in 0.0f64..1.0,
        dv in 1e-4f64..0.2,
    ) {
        // the empirical loop bisects on this response; it must be monotone
        let (s, m, c) = default_chain();
        let v_hi = (v_lo + dv).min(1.19);
        prop_assume!(v_lo < v_hi);
        let anchor = input_for_nonswitch_prob(&s, &m, &c, 0.5).unwrap();
        let lo = perturbed_log_prob_at(&s, &m, &c, delta_r, c.t_write, v_lo, anchor)
            .unwrap()
            .pbar();
        let hi = perturbed_log_prob_at(&s, &m, &c, delta_r, c.t_write, v_hi, anchor)
            .unwrap()
            .pbar();
        prop_assert!(hi >= lo, "pbar({v_hi}) = {hi} < pbar({v_lo}) = {lo}");
    }

    #[test]
    fn kernels_preserve_length_and_stay_in_unit_range(
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
        len in 1usize..2048,
        seed in any::<u64>(),
    ) {
        let root = StreamKey::root(seed);
        let mut rng = root.derive(domains::SCRATCH, 0).rng();
        let a = encode(p, len, &mut rng).unwrap();
        let b = encode(q, len, &mut rng).unwrap();
        let sel = encode(0.5, len, &mut rng).unwrap();
        let prod = and_multiply(&a, &b).unwrap();
        let sum = scaled_add(&a, &b, &sel).unwrap();
        let key = root.derive(domains::SCRATCH, 1);
        let ca = encode_correlated(p, len, key).unwrap();
        let cb = encode_correlated(q, len, key).unwrap();
        let diff = abs_diff(&ca, &cb).unwrap();
        for stream in [&prod, &sum, &diff] {
            prop_assert_eq!(stream.len(), len);
            prop_assert!((0.0..=1.0).contains(&stream.decode()));
        }
    }

    #[test]
    fn correlated_xor_converges_to_absolute_difference(
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let len = 65_536;
        let key = StreamKey::root(seed).derive(domains::SCRATCH, 2);
        let a = encode_correlated(p, len, key).unwrap();
        let b = encode_correlated(q, len, key).unwrap();
        let d = abs_diff(&a, &b).unwrap().decode();
        let truth = (p - q).abs();
        let sigma = (truth * (1.0 - truth) / len as f64).sqrt();
        prop_assert!((d - truth).abs() <= 4.0 * sigma + 1e-9,
            "decode {d} vs |p-q| {truth}");
    }

    #[test]
    fn csv_emit_parse_round_trips(
        labels in proptest::collection::vec("[a-z][a-z0-9_=.]{0,12}", 1..4),
        raw_points in proptest::collection::vec((1e-12f64..1e3, -1e6f64..1e6), 1..40),
    ) {
        prop_assume!(labels.iter().collect::<std::collections::HashSet<_>>().len() == labels.len());
        let mut series: Vec<SweepSeries> = labels
            .iter()
            .map(|l| SweepSeries::new(l.clone(), "x", "y"))
            .collect();
        let mut xs: Vec<f64> = raw_points.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        for (i, &x) in xs.iter().enumerate() {
            let s = &mut series[i % labels.len()];
            s.points.push((x, raw_points[i % raw_points.len()].1));
        }
        series.retain(|s| !s.points.is_empty());
        let text = emit_csv(&series).unwrap();
        let back = parse_csv(&text).unwrap();
        prop_assert_eq!(series, back);
    }
}
