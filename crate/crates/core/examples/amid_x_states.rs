//! For X states the AMID optimum is one of two bi-local measurements: both
//! qubits along z, or both along the dominant transverse axis. Compare that
//! closed form with the general four-angle search.

use qcorr::measures::{amid, amid_x_candidates};
use qcorr::states;

fn main() -> qcorr::Result<()> {
    let mut worst = 0.0f64;
    for seed in 0..200 {
        let rho = states::random_x_state(seed);
        let general = amid(&rho)?;
        let closed = amid_x_candidates(&rho)?;
        worst = worst.max((general - closed).abs());
        if seed < 5 {
            println!("seed {seed}: search {general:.8}  candidates {closed:.8}");
        }
    }
    println!("largest difference over 200 X states: {worst:.2e}");

    let generic = states::random_state(1, None)?;
    match amid_x_candidates(&generic) {
        Err(e) => println!("generic state: {e}"),
        Ok(v) => println!("generic state happens to be X-shaped: {v}"),
    }
    Ok(())
}
