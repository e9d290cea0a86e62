//! Scratch probe: CSV round-trip bit fidelity of the expansion fit.
use nb_core::asymptotics;
fn main() {
    let rows = nb_core::io::read_expansion_csv(std::path::Path::new(
        &std::env::args().nth(1).unwrap(),
    ))
    .unwrap();
    let half: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
    let ds: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let ms: Vec<f64> = rows.iter().map(|r| r.m_test_over_d).collect();
    for r in &rows {
        println!("d bits {:016x}  m bits {:016x}", r.d.to_bits(), r.m_test_over_d.to_bits());
    }
    let refit = asymptotics::fit_gamma_coeff(&ds, &ms, half);
    println!("refit {refit:.17e}  bits {:016x}", refit.to_bits());
}
