//! One-way discord depends on which side is measured. A classical-quantum
//! state has zero discord when its classical side is measured and positive
//! discord the other way.

use qcorr::measures::{discord_with_seeds, mutual_information};
use qcorr::{states, Subsystem};

fn main() -> qcorr::Result<()> {
    for seed in 0..5 {
        let rho = states::random_classical_quantum(seed);
        // Measuring A (the classical side) gives D->; measuring B gives D<-.
        let right = discord_with_seeds(&rho, Subsystem::A, &[])?;
        let left = discord_with_seeds(&rho, Subsystem::B, &[])?;
        println!(
            "seed {seed}: I = {:.5}  D-> = {:.2e}  D<- = {:.5}  optimal B axis {:.3?}",
            mutual_information(&rho),
            right.value,
            left.value,
            left.optimum.axis
        );
    }
    Ok(())
}
