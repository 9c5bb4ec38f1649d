//! Seeded synthetic datasets for benchmarks and scale tests.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{load_csv, CsvOptions, Dataset};

const REGIONS: [&str; 3] = ["North", "South", "West"];

/// CSV text with `rows` rows and 12 attributes: 2 categorical, 2 discrete,
/// 8 continuous. Continuous columns are loosely correlated with `Cylinders`
/// so demonstrations have more than one consistent explanation.
pub fn synthetic_csv(rows: usize, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = String::with_capacity(rows * 80);
    out.push_str("Region,Brand,Cylinders,Gears,Power,Economy,Weight,Displacement,Acceleration,Price,Range,Torque\n");
    for _ in 0..rows {
        let cyl = [3, 4, 4, 6, 8][rng.gen_range(0..5)];
        let gears = rng.gen_range(3..7);
        let base = cyl as f64;
        let power = base * 20.0 + rng.gen_range(0.0..40.0);
        let economy = 60.0 - base * 5.0 + rng.gen_range(-4.0..4.0);
        let weight = 1500.0 + base * 250.0 + rng.gen_range(0.0..600.0);
        let disp = base * 50.0 + rng.gen_range(0.0..30.0);
        let accel = 20.0 - base + rng.gen_range(-2.0..2.0);
        let price = 10_000.0 + power * 120.0 + rng.gen_range(0.0..5_000.0);
        let range = economy * 12.0 + rng.gen_range(0.0..50.0);
        let torque = power * 1.3 + rng.gen_range(0.0..20.0);
        out.push_str(&format!(
            "{},B{:02},{},{},{:.1},{:.2},{:.0},{:.1},{:.2},{:.0},{:.1},{:.1}\n",
            REGIONS[rng.gen_range(0..REGIONS.len())],
            rng.gen_range(0..20),
            cyl,
            gears,
            power,
            economy,
            weight,
            disp,
            accel,
            price,
            range,
            torque
        ));
    }
    out
}

pub fn synthetic_dataset(rows: usize, seed: u64) -> Dataset {
    load_csv(synthetic_csv(rows, seed).as_bytes(), &CsvOptions::named(format!("synthetic-{rows}")))
        .expect("synthetic CSV is well-formed")
}
