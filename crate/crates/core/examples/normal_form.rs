//! Local unitaries bring any two-qubit state to a frame where the
//! correlation matrix is diagonal. The measures are unchanged by this.

use qcorr::{bloch_normal_form, full_report, states};

fn main() -> qcorr::Result<()> {
    let rho = states::random_state(5, None)?;
    let pe = rho.pauli_expansion();
    let form = bloch_normal_form(&rho);
    println!("T    = {:.4?}", pe.t);
    println!("chi  = {:.4?}", form.chi);
    println!("a, b = {:.4?}, {:.4?}", form.a, form.b);
    let rebuilt = form.reassemble();
    let normal = qcorr::DensityMatrix::new(rebuilt, qcorr::Provenance::new("normal form"))?;
    let (r0, r1) = (full_report(&rho)?, full_report(&normal)?);
    println!("A: {:.10} vs {:.10}", r0.amid, r1.amid);
    println!("D<->: {:.10} vs {:.10}", r0.discord_two_way, r1.discord_two_way);
    Ok(())
}
