//! Builds the second slit domain, estimates a few constants and closes its
//! slits with hemispherical caps.

use carpetlab::constructions::gen_q;
use carpetlab::gluing::{comparison_check, fill_slits};
use carpetlab::predicates::{ahlfors_fit, llc1_constant, SampleSpec};

fn main() -> carpetlab::Result<()> {
    let q = gen_q::<f64>(2, 1.0 / 64.0)?;
    println!("{}: {} vertices, {} slits", q.space.label(), q.space.len(), q.slit_count());

    let spec = SampleSpec::default().with_seed(7).with_samples(32);
    let llc = llc1_constant(&q.space, &spec)?;
    println!("LLC1 constant ≈ {:?} over {} samples", llc.value, llc.samples);

    let fit = ahlfors_fit(&q.space, 2.0, &spec.clone().with_absolute_radii(1.0 / 16.0, 0.5))?;
    println!("Ahlfors slope ≈ {:.3}", fit.report.extra("slope").unwrap_or(f64::NAN));

    let filled = fill_slits(&q)?;
    let cmp = comparison_check(&filled, Some(16));
    println!(
        "filled: {} vertices, declared L = {:.4}, comparison inequality holds: {}",
        filled.space.len(),
        filled.lipschitz,
        cmp.pass
    );
    Ok(())
}
