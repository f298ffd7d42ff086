// scratch calibration probe, not part of the deliverable
use otalign::graph::load_dataset;
use otalign::trainer::{train, Mode, TrainConfig};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let n_sink: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1000);
    let tol: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1e-3);
    let inner: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(20);
    let (g1, g2, anchors) = load_dataset(
        "data/phone-email/edges1.txt",
        "data/phone-email/edges2.txt",
        None,
        None,
        "data/phone-email/anchors.txt",
    )
    .unwrap();
    eprintln!("loaded: n1={} m1={} n2={} m2={}", g1.n(), g1.num_edges(), g2.n(), g2.num_edges());
    let cfg = TrainConfig {
        alpha: 0.75,
        beta: 0.15,
        gamma_p: 1e-2,
        epochs,
        inner_steps: inner,
        t_outer: 10,
        n_sinkhorn: n_sink,
        sinkhorn_tol: tol,
        seed: 1,
        mode: Mode::Full,
        ..TrainConfig::default()
    };
    let t0 = Instant::now();
    match train(&cfg, &g1, &g2, &anchors) {
        Ok(out) => {
            for e in &out.history.epochs {
                eprintln!(
                    "epoch {:3}: obj_ot {:+.6e} lambda {:.3e} obj_end {:+.6e} mrr {:.4} embdist {:.4} warn {} ({:.1}s)",
                    e.epoch, e.objective_after_ot, e.lambda, e.objective_after_encoder,
                    e.test_mrr, e.mean_embedding_distance, e.monotone_warning, e.wall_time_secs
                );
            }
            eprintln!("total {:.1}s", t0.elapsed().as_secs_f64());
        }
        Err(e) => eprintln!("TRAIN ERROR after {:.1}s: {e}", t0.elapsed().as_secs_f64()),
    }
}
