use epmodem::experiments::{ber_sweep, SweepConfig};

#[test]
fn high_snr_is_error_free_over_ten_seeds() {
    let rows = ber_sweep(&SweepConfig::combined(vec![30.0], 10)).unwrap();
    let r = &rows[0];
    assert_eq!((r.frames, r.detected, r.decoded, r.bit_errors, r.false_detections), (100, 100, 100, 0, 0));
    assert_eq!(r.ber, 0.0);
    assert_eq!(r.detection_rate, 1.0);
}

#[test]
fn noise_only_point_stays_at_the_false_alarm_floor() {
    let rows = ber_sweep(&SweepConfig::combined(vec![f64::NEG_INFINITY], 10)).unwrap();
    let r = &rows[0];
    assert_eq!((r.detected, r.false_detections, r.bits), (0, 0, 0));
    assert_eq!(r.detection_rate, 0.0);
    assert!(r.ber.is_nan());
}

#[test]
fn ber_does_not_rise_with_snr() {
    let rows = ber_sweep(&SweepConfig::combined(vec![10.0, -3.0, 0.0, 3.0, 6.0], 6)).unwrap();
    let snrs: Vec<f64> = rows.iter().map(|r| r.snr_db).collect();
    assert_eq!(snrs, [-3.0, 0.0, 3.0, 6.0, 10.0]);
    for pair in rows.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        assert!(hi.ber_low <= lo.ber_high, "{} dB: {:?} vs {} dB: {:?}", lo.snr_db, lo, hi.snr_db, hi);
        assert!(hi.detection_rate >= lo.detection_rate - 0.1);
    }
    // the low end of the curve must actually degrade
    assert!(rows[0].bit_errors > 0 || rows[0].detection_rate < 1.0, "{:?}", rows[0]);
    assert_eq!(rows.last().unwrap().bit_errors, 0);
}

#[test]
fn same_seeds_same_rows() {
    let cfg = SweepConfig::combined(vec![0.0], 3);
    assert_eq!(ber_sweep(&cfg).unwrap(), ber_sweep(&cfg).unwrap());
}
