use cavity_qst::critical;
use cavity_qst::dynamics::{self, TimeGrid};
use cavity_qst::fock::SiteIndex;
use cavity_qst::fourlevel;
use cavity_qst::model::ModelParams;
use cavity_qst::output::{emit_timeseries, read_json_table, Format};
use cavity_qst::spectral;

#[test]
fn four_level_model_tracks_exact_critical_coupling() {
    let exact = critical::find_critical(&ModelParams::resonant(3, 4.0, 0.0), None).unwrap().g_c;
    let reduced = fourlevel::four_level_gc(3, 4.0, 1.0).unwrap().unwrap();
    assert!((exact - reduced).abs() / exact < 0.05);
}

#[test]
fn limiting_profile_is_long_time_average() {
    let p = ModelParams::resonant(2, 1.5, 1.2);
    let s = SiteIndex::new(2, 0);
    let exact = dynamics::limiting_profile(&p, s, None).unwrap();
    let d = spectral::decompose(&p).unwrap();
    let grid = TimeGrid::default_for(&d, 4e4).unwrap();
    let avg = dynamics::time_averaged_probabilities(&p, s, &grid).unwrap();
    for (x, y) in exact.values.iter().zip(&avg) {
        assert!((x - y).abs() < 5e-3, "{x} vs {y}");
    }
}

#[test]
fn trace_round_trips_through_json() {
    let p = ModelParams::resonant(3, 4.0, 2.0);
    let ts = dynamics::imbalance_trace(&p, SiteIndex::new(3, 0), &TimeGrid::new(10.0, 50).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    emit_timeseries(&ts, &path, Format::Json).unwrap();
    let table = read_json_table(&path).unwrap();
    let dp = table.column("dP").unwrap();
    for (row, want) in table.rows.iter().zip(ts.imbalance()) {
        assert_eq!(row[dp].as_f64().unwrap(), want);
    }
}

#[test]
fn spectral_gap_closes_at_critical_coupling() {
    let base = ModelParams::resonant(5, 4.0, 0.0);
    let res = critical::find_critical(&base, None).unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| res.g_c - 0.2 + 0.01 * i as f64).collect();
    let rows = critical::sweep_gap(&base, &grid, false).unwrap();
    let min = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    assert!(min < 1e-3);
    assert!(rows[0].gap > 10.0 * min && rows[40].gap > 10.0 * min);
}
