// scratch probe, not part of the deliverable
use wavechannels::channels::verify_exterior_lower_bound;
use wavechannels::presets;
use wavechannels::solver::{Nonlinearity, SolveConfig};
use wavechannels::Dim;

fn main() {
    let dim = Dim::new(5).unwrap();
    let data = presets::bump(dim, 0.31, 2.84, 0.84).unwrap();
    for (h, t_final) in [(1.0 / 512.0, 16.0), (1.0 / 1024.0, 16.0)] {
        let radius = 1.0;
        let mut cfg =
            SolveConfig::new(Nonlinearity::Linear, dim, t_final, radius + t_final + 3.1);
        cfg.grid_h = Some(h);
        cfg.snapshot_every = 512;
        let rep = verify_exterior_lower_bound(&data, radius, &cfg).unwrap();
        println!(
            "h=1/{:.0} t={t_final} residual {:.6}",
            1.0 / h,
            rep.residual_sq
        );
        for (t, (ef, eb)) in rep
            .report
            .times
            .iter()
            .zip(rep.report.ext_energy_fwd.iter().zip(&rep.report.ext_energy_bwd))
        {
            println!("  t={t:6.2} fwd {ef:.6} bwd {eb:.6} sum {:.6}", ef + eb);
        }
    }
}
