//! Maximal discord and maximal AMID at fixed von Neumann entropy, with the
//! family that realises each point and the entropies where the maximising
//! family changes.

use qcorr::extremal::{a_star, boundary_curve, family_crossings, r_star, Measure};

fn main() -> qcorr::Result<()> {
    let crossings = family_crossings()?;
    println!("family crossings: {crossings:.5?}");
    println!("r*(1/3) = {:.5}, a*(0) = {:.5}", r_star(1.0 / 3.0)?, a_star(0.0)?);

    let discord = boundary_curve(Measure::Discord, 21)?;
    let amid = boundary_curve(Measure::Amid, 21)?;
    println!("{:>7} {:>9} {:>7} {:>9} {:>7}", "S", "max D", "family", "max A", "family");
    for (d, a) in discord.iter().zip(&amid) {
        println!(
            "{:>7.4} {:>9.6} {:>7} {:>9.6} {:>7}",
            d.entropy, d.value, d.family, a.value, a.family
        );
    }
    Ok(())
}
