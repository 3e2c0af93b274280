//! Batch sizes and smoothing radii of the zeroth-order schedules, and the
//! exact draw totals against their closed forms.

use stochvi::zeroth_order::{closed_form_total_samples, make_schedule, ScheduleVariant};

fn main() -> stochvi::Result<()> {
    for variant in [ScheduleVariant::ExtraPoint, ScheduleVariant::ExtraMomentum] {
        let s = make_schedule(variant, 50, 2.0, 10, 20)?;
        println!(
            "{variant:?}: t_0 = {}, t_49 = {}, rho = ({:.3e}, {:.3e})",
            s.sizes()[0],
            s.sizes()[49],
            s.smoothing.rho_x,
            s.smoothing.rho_y
        );
        for (kappa, k) in [(1.0, 10), (10.0, 100), (100.0, 100)] {
            let exact = make_schedule(variant, k, kappa, 1, 1)?.total_samples();
            let closed = closed_form_total_samples(variant, k, kappa);
            println!("  kappa {kappa:>5}, K {k:>4}: {exact} draws, closed form {closed:.1}");
        }
    }
    Ok(())
}
