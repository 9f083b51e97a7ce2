use vmlk::fixtures::bi_maxwellian;
use vmlk::grid::VelocityGrid;
use vmlk::relax::run_homogeneous;
use std::time::Instant;

fn main() {
    for n in [16usize, 24] {
        let g = VelocityGrid::new(6.0, n).unwrap();
        let f0 = bi_maxwellian(&g, 1.0, 1.0, 1.0);
        let t0 = Instant::now();
        match run_homogeneous(&f0, &g, 1.0, 1e-2, 5.0, 50) {
            Ok((recs, _f)) => {
                let mono = recs.windows(2).all(|w| w[1].entropy <= w[0].entropy + 1e-10);
                let last = recs.last().unwrap();
                let p_drift = recs.iter().map(|r| r.momentum[0].abs()).fold(0.0f64, f64::max);
                println!(
                    "N={n}: {:.1?}  H mono={} dist0={:.4} dist_end={:.4} mass_drift={:.2e} p_max={:.2e}",
                    t0.elapsed(), mono, recs[0].dist_maxwellian, last.dist_maxwellian,
                    (last.mass - recs[0].mass).abs(), p_drift
                );
            }
            Err(e) => println!("N={n} FAILED: {e}"),
        }
    }
}
