use std::fs::File;
use std::io::{BufReader, BufWriter};

use mm3nlos::geom::{DirectionVector, PathObservation, ProjectionPlane, Tolerances};
use mm3nlos::measure::{read_records, select_historical, write_records, MeasurementTable};
use mm3nlos::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn replayed_table_selects_the_same_records() {
    let ap = Point3::zero();
    let sta = Point3::new(2.0, 0.0, 0.0);
    let observe = |t: Point3, snr: f64, ts: u64| {
        PathObservation::new(
            DirectionVector::between(ap, t).unwrap().angles(),
            DirectionVector::between(sta, t).unwrap().angles(),
            ap.distance(t) + sta.distance(t),
            snr,
            ts,
        )
        .unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut table = MeasurementTable::new(16).unwrap();
    for ts in 0..40 {
        let t = Point3::new(rng.random_range(0.0..2.0), rng.random_range(0.5..4.0), rng.random_range(-1.0..1.0));
        table.push(observe(t, rng.random_range(0..30) as f64 * 0.5, ts)).unwrap();
    }
    table.record_first_path(observe(Point3::new(1.0, 3.0, 0.0), 40.0, 100));
    assert_eq!(table.len(), 16);

    let path = std::env::temp_dir().join(format!("mm3nlos-replay-{}.csv", std::process::id()));
    write_records(BufWriter::new(File::create(&path).unwrap()), &table.records()).unwrap();
    let back = read_records(BufReader::new(File::open(&path).unwrap())).unwrap();
    std::fs::remove_file(&path).ok();
    let replayed = MeasurementTable::from_records(16, &back).unwrap();
    assert_eq!(replayed, table);

    let current = observe(Point3::new(0.7, 1.4, 0.2), 25.0, 200);
    let plane = ProjectionPlane::yoz();
    let tol = Tolerances::default();
    let a = select_historical(&table, &current, 5, &plane, &tol).unwrap();
    let b = select_historical(&replayed, &current, 5, &plane, &tol).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 5);
}
