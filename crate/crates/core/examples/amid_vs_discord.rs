//! Largest AMID among X states with a prescribed two-way discord: the upper
//! edge of the AMID-versus-discord scatter.

use qcorr::extremal::amid_vs_discord_upper_boundary;

fn main() -> qcorr::Result<()> {
    for d in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = amid_vs_discord_upper_boundary(d)?;
        println!("D<-> = {d:.2}: max A = {:.5} at S = {:.4}", p.value, p.entropy);
    }
    Ok(())
}
