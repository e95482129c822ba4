//! Full correlation reports along the Werner line, from the maximally mixed
//! state to the Bell state. Discord, AMID and MID coincide on this family.

use qcorr::{full_report, states};

fn main() -> qcorr::Result<()> {
    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "f", "S", "I", "D<->", "A", "M");
    for i in 0..=10 {
        let f = -1.0 / 3.0 + i as f64 * (4.0 / 3.0) / 10.0;
        let r = full_report(&states::werner(f)?)?;
        println!(
            "{f:>6.3} {:>8.5} {:>8.5} {:>8.5} {:>8.5} {:>8.5}",
            r.entropy, r.mutual_information, r.discord_two_way, r.amid, r.mid
        );
    }
    Ok(())
}
