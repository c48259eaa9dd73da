use lagwave_web::{burgers_profile, composite_profile, contact_profile};

#[test]
fn contact_rows_connect_end_temperatures() {
    let rows = contact_profile(1.0, 1.2, 1.0, 0.0, 1.0, -40.0, 40.0, 101).ok().unwrap();
    assert_eq!(rows.len(), 4 * 101);
    assert!((rows[3] - 1.0).abs() < 1e-6);
    assert!((rows[rows.len() - 1] - 1.2).abs() < 1e-6);
    // Pressure is nearly uniform across a contact: V ≈ RΘ/p.
    for r in rows.chunks(4) {
        assert!((r[1] - r[3]).abs() < 1e-2, "{r:?}");
    }
}

#[test]
fn composite_rows_reach_far_field() {
    let (l, r) = ((1.0, -0.08075804531708859, 1.0), (1.1, 0.0846997524894886, 1.1));
    let rows = composite_profile(l.0, l.1, l.2, r.0, r.1, r.2, 5.0, -200.0, 200.0, 201).ok().unwrap();
    let first = &rows[..4];
    let last = &rows[rows.len() - 4..];
    assert!((first[2] - l.1).abs() < 1e-3 && (last[2] - r.1).abs() < 1e-3, "{first:?} {last:?}");
}

#[test]
fn burgers_rows_are_monotone() {
    let rows = burgers_profile(-1.0, 1.0, 2.0, -10.0, 10.0, 81).ok().unwrap();
    let w: Vec<f64> = rows.chunks(3).map(|r| r[1]).collect();
    assert!(w.windows(2).all(|p| p[0] <= p[1]));
    assert!(rows.chunks(3).all(|r| r[2] >= 0.0));
}
