//! Regenerates the converged gate settings from the four-digit tables.
//!
//! cargo run -p lopsim --release --example refine_settings

use lopsim::gates::{ccz_block, CCZ_CLEMENTS_PRINTED, CCZ_RECK_PRINTED, CZ_PRINTED};
use lopsim::mesh::{build_network, Scheme};
use lopsim::solver::{fit_unitary, refine, ConditionProblem, LmOptions, SolveOptions};

fn main() -> lopsim::Result<()> {
    let opts = SolveOptions::default();

    let (cz, out) = refine(&ConditionProblem::Cz, &CZ_PRINTED, &opts)?;
    println!("cz       {cz:?}  |r| = {:.2e}", out.residual_norm);

    let clements = ConditionProblem::Ccz { scheme: Scheme::Clements };
    let (ccz_c, out) = refine(&clements, &CCZ_CLEMENTS_PRINTED, &opts)?;
    println!("clements {ccz_c:?}  |r| = {:.2e}", out.residual_norm);
    println!("         |A| = {:.9}", clements.success_amplitude(&ccz_c)?.norm());

    let target = build_network(&ccz_block(ccz_c.as_slice().try_into().expect("ten"), Scheme::Clements))?;
    let (ccz_r, err) = fit_unitary(Scheme::Reck, &target, &CCZ_RECK_PRINTED, &LmOptions::default())?;
    let reck = ConditionProblem::Ccz { scheme: Scheme::Reck };
    println!("reck     {ccz_r:?}  max|ΔU| = {err:.2e}  |r| = {:.2e}", {
        let r = reck.residuals(&ccz_r)?;
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    });
    Ok(())
}
