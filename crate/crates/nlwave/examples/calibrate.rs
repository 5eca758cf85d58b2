// Scratch calibration runs; removed before release.
use nlwave::dynamics::State;
use nlwave::experiments::{linearized_growth_fit, longtime_sweep, SweepConfig};
use nlwave::field::Field;
use nlwave::grid::Grid;
use nlwave::kernel::builtin_kernel;
use std::f64::consts::PI;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    if which == "growth" {
        let g = Grid::new(PI, 128).unwrap();
        let w = Field::from_fn(&g, |x| x.sin());
        let k = builtin_kernel("exponential").unwrap();
        for seed in [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13] {
            let f1 = linearized_growth_fit(&w, &k, 2.0, 1, &[0.1, 0.05], 10.0, 2e-3, seed).unwrap();
            let f2 = linearized_growth_fit(&w, &k, 2.0, 2, &[0.3, 0.15], 10.0, 2e-3, seed).unwrap();
            let q1 = f1[0].slope / f1[1].slope;
            let q2 = f2[0].slope / f2[1].slope;
            let ok1 = (1.6..=2.4).contains(&q1);
            let ok2 = (3.2..=4.8).contains(&q2);
            println!(
                "seed={seed:2}: p1 slope={:+.3e} ratio={q1:.3} {}  p2 slope={:+.3e} ratio={q2:.3} {}",
                f1[0].slope,
                if ok1 { "OK" } else { "X" },
                f2[0].slope,
                if ok2 { "OK" } else { "X" },
            );
        }
    } else if which == "sweep" {
        let g = Grid::new(20.0, 512).unwrap();
        let initial = State::new(
            Field::from_fn(&g, |x| (-x * x).exp()),
            Field::zeros(&g),
            0.0,
        )
        .unwrap();
        for p in [1u32, 2] {
            let cfg = SweepConfig {
                kernel: builtin_kernel("dirac").unwrap(),
                power: p,
                sobolev_index: 2.0,
                epsilon_list: vec![0.2, 0.1, 0.05],
                t_cap: 5.0,
                escape_factor: 10.0,
                integrator: "strang".into(),
                dt: None,
            };
            let t0 = std::time::Instant::now();
            let res = longtime_sweep(&initial, &cfg).unwrap();
            for r in &res {
                println!(
                    "p={p} eps={}: T_esc={:.3} product={:.4} cap={} ",
                    r.epsilon, r.t_esc, r.product, r.cap_hit
                );
            }
            println!("  wall: {:.1}s", t0.elapsed().as_secs_f64());
        }
    }
}
