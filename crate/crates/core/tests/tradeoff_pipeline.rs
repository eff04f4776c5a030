use qsdc_core::entanglement::{concurrence_fill, concurrence_fill_w};
use qsdc_core::protocol::{analytic, WStateParams};
use qsdc_core::tradeoff::{
    figure_series, fill_bounds, fill_from_ps, ps_from_fill, Figure, GridSpec, RootMethod,
    SweepTable, TradeoffPoint,
};

#[test]
fn realized_point_is_consistent_across_modules() {
    let w = WStateParams::from_squares(0.35, 0.3, 0.35).unwrap();
    let point = TradeoffPoint::realized(&w);
    assert!((point.ps - analytic(&w)).abs() < 1e-12);
    let generic = concurrence_fill(&w.state(["A", "B", "C"])).unwrap().fill;
    assert!((point.fill - generic).abs() < 1e-10);
    assert!((concurrence_fill_w(&w).unwrap().fill - generic).abs() < 1e-10);
    assert!((fill_from_ps(point.ps, 0.3) - generic).abs() < 1e-10);
    let back = ps_from_fill(generic, 0.3, RootMethod::Numeric).unwrap();
    assert!((back.ps - point.ps).abs() < 1e-8);
}

#[test]
fn figure_csv_round_trip() {
    for spec in [
        GridSpec::Fig1 {
            tuples: vec![(0.1, 0.8, 0.1), (0.25, 0.5, 0.25)],
            points: 11,
        },
        GridSpec::Fig2 { n_max: 10 },
        GridSpec::Fig3 {
            beta_sqs: vec![0.05, 0.1],
            points: 12,
        },
    ] {
        let table = figure_series(&spec).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = SweepTable::read_csv(table.figure, buf.as_slice()).unwrap();
        assert_eq!(back.rows.len(), table.rows.len());
        for (a, b) in back.rows.iter().zip(&table.rows) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-11 * y.abs().max(1.0));
            }
        }
    }
}

#[test]
fn fig3_starts_at_the_lower_bound() {
    let table = figure_series(&GridSpec::Fig3 {
        beta_sqs: vec![0.1],
        points: 20,
    })
    .unwrap();
    assert_eq!(table.figure, Figure::Fig3);
    let (lower, _) = fill_bounds(0.1);
    assert!((table.rows[0][1] - lower).abs() < 1e-12);
    assert!((table.rows[0][2] - 0.12).abs() < 1e-9);
}
