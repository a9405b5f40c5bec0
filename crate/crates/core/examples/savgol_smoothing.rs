//! Savitzky-Golay smoothing of a noisy sigmoid.

use lvphase::experiments::{savgol_weights, savitzky_golay};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lvphase::Result<()> {
    let w = savgol_weights(5, 2)?;
    println!("window 5, degree 2 weights x 35: {:?}", w.iter().map(|v| (v * 35.0).round()).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<f64> = (0..41).map(|i| 0.5 + 0.05 * i as f64).collect();
    let noisy: Vec<f64> = xs
        .iter()
        .map(|x| 1.0 / (1.0 + (-(x - 1.4) * 8.0).exp()) + rng.gen_range(-0.05..0.05))
        .collect();
    let smooth = savitzky_golay(&noisy, 11, 3)?;
    for ((x, y), s) in xs.iter().zip(&noisy).zip(&smooth).step_by(4) {
        println!("{x:.2}  raw {y:.3}  smoothed {s:.3}");
    }
    Ok(())
}
