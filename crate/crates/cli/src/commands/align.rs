//! `align`: run the full training pipeline from a config file and persist
//! every artifact into a fresh per-run directory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use otalign::checkpoint::{write_encoder, write_plan};
use otalign::graph::{inject_noise, load_dataset, write_dense_csv, AnchorSet, Graph};
use otalign::metrics::{alignment_metrics, compute_ranks, compute_ranks_pessimistic, MetricsReport};
use otalign::trainer::{train, TrainOutput};
use otalign::Error;

use crate::config::{RunConfig, RunMode};
use crate::manifest::{input_checksums, RunManifest, TimingSummary};
use crate::commands::{Stage, StageExt, StagedError};

pub const DEFAULT_KS: [usize; 4] = [1, 10, 30, 50];

/// Allocate `output_dir/run_NNN` with the first free index.
fn allocate_run_dir(output_dir: &Path) -> otalign::Result<PathBuf> {
    std::fs::create_dir_all(output_dir)?;
    for idx in 0..10_000 {
        let candidate = output_dir.join(format!("run_{idx:03}"));
        if !candidate.exists() {
            std::fs::create_dir(&candidate)?;
            return Ok(candidate);
        }
    }
    Err(Error::Config(format!(
        "no free run directory under {}",
        output_dir.display()
    )))
}

fn write_anchor_file(path: &Path, anchors: &AnchorSet) -> otalign::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (x, y) in anchors.pairs() {
        writeln!(out, "{x}\t{y}")?;
    }
    out.flush()?;
    Ok(())
}

fn write_history_csv(path: &Path, out: &TrainOutput) -> otalign::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "epoch,objective_after_ot,lambda,objective_after_encoder,wall_time_secs,test_mrr,mean_embedding_distance,monotone_warning"
    )?;
    for e in &out.history.epochs {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            e.epoch,
            e.objective_after_ot,
            e.lambda,
            e.objective_after_encoder,
            e.wall_time_secs,
            e.test_mrr,
            e.mean_embedding_distance,
            e.monotone_warning
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_prox_trace_csv(path: &Path, out: &TrainOutput) -> otalign::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "epoch,iteration,objective")?;
    for e in &out.history.epochs {
        for (i, obj) in e.prox_trace.iter().enumerate() {
            writeln!(w, "{},{},{}", e.epoch, i, obj)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_metrics_files(
    dir: &Path,
    optimistic: &MetricsReport,
    pessimistic: &MetricsReport,
) -> otalign::Result<()> {
    let mut w = BufWriter::new(File::create(dir.join("metrics.txt"))?);
    for (k, h) in &optimistic.hits {
        writeln!(w, "hits@{k} {h:.6}")?;
    }
    writeln!(w, "mrr {:.6}", optimistic.mrr)?;
    writeln!(w, "test_pairs {}", optimistic.num_pairs)?;
    for (k, h) in &pessimistic.hits {
        writeln!(w, "pessimistic_hits@{k} {h:.6}")?;
    }
    writeln!(w, "pessimistic_mrr {:.6}", pessimistic.mrr)?;
    w.flush()?;

    let json = serde_json::json!({
        "optimistic": optimistic,
        "pessimistic": pessimistic,
    });
    std::fs::write(
        dir.join("metrics.json"),
        serde_json::to_string_pretty(&json)
            .map_err(|e| Error::Config(format!("metrics encode failed: {e}")))?,
    )?;
    Ok(())
}

pub fn run(config_path: &Path, mode_override: Option<&str>) -> Result<PathBuf, StagedError> {
    let total_start = Instant::now();
    let mut cfg = RunConfig::load(config_path).at(Stage::Config)?;
    if let Some(mode) = mode_override {
        crate::config::parse_mode(mode).at(Stage::Config)?;
        cfg.mode = mode.to_string();
    }
    let train_cfg = cfg.train_config();
    train_cfg.validate().at(Stage::Config)?;

    let load_start = Instant::now();
    let (g1, g2, anchors) = load_dataset(
        &cfg.edges1,
        &cfg.edges2,
        cfg.attrs1.as_deref(),
        cfg.attrs2.as_deref(),
        &cfg.anchors,
    )
    .at(Stage::LoadData)?;
    let (g1, g2): (Graph, Graph) = match cfg.run_mode() {
        RunMode::Noise { kind, percent } => {
            let seed = otalign::seed::child_seed(cfg.seed, "noise");
            let noisy = inject_noise(&g2, kind, percent, seed).at(Stage::LoadData)?;
            (g1, noisy)
        }
        RunMode::Train(_) => (g1, g2),
    };
    let load_secs = load_start.elapsed().as_secs_f64();

    let train_start = Instant::now();
    let out = train(&train_cfg, &g1, &g2, &anchors).at(Stage::Train)?;
    let train_secs = train_start.elapsed().as_secs_f64();

    let write_start = Instant::now();
    let run_dir = allocate_run_dir(&cfg.output_dir).at(Stage::WriteOutputs)?;
    write_plan(run_dir.join("plan.bin"), &out.plan).at(Stage::WriteOutputs)?;
    write_encoder(run_dir.join("encoder.bin"), &out.params).at(Stage::WriteOutputs)?;
    write_dense_csv(run_dir.join("embeddings1.csv"), &out.embeddings.e1).at(Stage::WriteOutputs)?;
    write_dense_csv(run_dir.join("embeddings2.csv"), &out.embeddings.e2).at(Stage::WriteOutputs)?;
    write_history_csv(&run_dir.join("history.csv"), &out).at(Stage::WriteOutputs)?;
    write_prox_trace_csv(&run_dir.join("prox_trace.csv"), &out).at(Stage::WriteOutputs)?;
    write_anchor_file(&run_dir.join("train_anchors.txt"), &out.train_anchors)
        .at(Stage::WriteOutputs)?;
    write_anchor_file(&run_dir.join("test_anchors.txt"), &out.test_anchors)
        .at(Stage::WriteOutputs)?;

    let ranks = compute_ranks(out.plan.values(), &out.test_anchors);
    let optimistic = alignment_metrics(&ranks, &DEFAULT_KS).at(Stage::Evaluate)?;
    let pess_ranks = compute_ranks_pessimistic(out.plan.values(), &out.test_anchors);
    let pessimistic = alignment_metrics(&pess_ranks, &DEFAULT_KS).at(Stage::Evaluate)?;
    write_metrics_files(&run_dir, &optimistic, &pessimistic).at(Stage::WriteOutputs)?;

    for (k, h) in &optimistic.hits {
        println!("hits@{k} {h:.6}");
    }
    println!("mrr {:.6}", optimistic.mrr);

    let write_secs = write_start.elapsed().as_secs_f64();
    let manifest = RunManifest {
        input_checksums: input_checksums(&cfg).at(Stage::WriteOutputs)?,
        seed: cfg.seed,
        config: cfg,
        outputs: vec![
            "plan.bin".into(),
            "encoder.bin".into(),
            "embeddings1.csv".into(),
            "embeddings2.csv".into(),
            "history.csv".into(),
            "prox_trace.csv".into(),
            "train_anchors.txt".into(),
            "test_anchors.txt".into(),
            "metrics.txt".into(),
            "metrics.json".into(),
        ],
        timing: TimingSummary {
            load_secs,
            train_secs,
            write_secs,
            total_secs: total_start.elapsed().as_secs_f64(),
        },
        metrics: Some(serde_json::json!({
            "mrr": optimistic.mrr,
            "hits": optimistic.hits,
        })),
    };
    manifest.write(&run_dir.join("manifest.json")).at(Stage::WriteOutputs)?;
    println!("run directory: {}", run_dir.display());
    Ok(run_dir)
}
